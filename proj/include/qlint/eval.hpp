#pragma once

// Evaluation harness: match predicted warnings against ground truth under
// type-equal, line-intersecting one-to-one matching, and compute
// precision/recall/F1 overall and per problem type.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "qlint/errors.hpp"
#include "qlint/problems.hpp"
#include "qlint/warning.hpp"

namespace qlint {

struct GroundTruthEntry {
  std::string file;
  ProblemType problem = ProblemType::DoubleMeas;
  std::vector<int> lines;  // canonical: sorted, unique, non-empty
};

struct ConfusionCounts {
  long tp = 0;
  long fp = 0;
  long fn = 0;

  bool empty() const { return tp == 0 && fp == 0 && fn == 0; }
};

/// Full-precision metrics; undefined cases carry an explicit flag instead of
/// a sentinel value so they can never corrupt an average.
struct Metrics {
  ConfusionCounts counts;
  bool precision_defined = false;
  bool recall_defined = false;
  bool f1_defined = false;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MatchResult {
  ConfusionCounts overall;
  std::map<ProblemType, ConfusionCounts> per_problem;
  std::vector<std::string> ledger;  // one human-readable line per decision
};

struct MetricsReport {
  Metrics overall;
  std::map<ProblemType, Metrics> per_problem;
};

// ---------------------------------------------------------------------------
// Ground truth I/O

inline nlohmann::ordered_json truth_to_json(const GroundTruthEntry& e) {
  nlohmann::ordered_json j;
  j["file"] = e.file;
  j["problem"] = problem_name(e.problem);
  j["lines"] = e.lines;
  return j;
}

inline GroundTruthEntry truth_from_json(const nlohmann::json& j) {
  GroundTruthEntry e;
  e.file = j.at("file").get<std::string>();
  e.problem = require_problem(j.at("problem").get<std::string>());
  e.lines = j.at("lines").get<std::vector<int>>();
  canonicalize_lines(e.lines);
  if (e.lines.empty()) throw OutOfRange("ground truth record has empty lines");
  return e;
}

inline std::string truth_to_jsonl(const std::vector<GroundTruthEntry>& entries) {
  std::string out;
  for (const GroundTruthEntry& e : entries) {
    out += truth_to_json(e).dump();
    out += '\n';
  }
  return out;
}

/// Parse a truth file. Records may carry extra fields (a prediction file is
/// a valid truth file); (file, problem, lines) must be unique.
inline std::vector<GroundTruthEntry> truth_from_jsonl(std::string_view text) {
  std::vector<GroundTruthEntry> entries;
  std::set<std::tuple<std::string, std::string, std::vector<int>>> seen;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw MalformedResponse(
          "truth record " + std::to_string(line_no) + " is not a JSON object",
          std::string(line));
    }
    GroundTruthEntry e = truth_from_json(j);
    auto key = std::make_tuple(e.file, std::string(problem_name(e.problem)),
                               e.lines);
    if (!seen.insert(key).second) {
      throw MalformedResponse("duplicate ground truth record at line " +
                                  std::to_string(line_no),
                              std::string(line));
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

// ---------------------------------------------------------------------------
// Matching

namespace eval_detail {

inline bool lines_intersect(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t i = 0, j = 0;  // both canonical (sorted unique)
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return true;
    if (a[i] < b[j]) ++i;
    else ++j;
  }
  return false;
}

inline std::string lines_label(const std::vector<int>& lines) {
  std::string out = "[";
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(lines[i]);
  }
  return out + "]";
}

}  // namespace eval_detail

/// Greedy one-to-one matching. Predictions are taken in (file, min-line)
/// order; each consumes the first unconsumed truth entry with the same file
/// and problem whose line set intersects. Truth entries are ordered
/// canonically first, so the outcome is invariant under permutation of the
/// truth list. Unmatched predictions count as FP, unmatched truth as FN.
inline MatchResult match_warnings(const std::vector<Warning>& predicted,
                                  const std::vector<GroundTruthEntry>& truth) {
  struct TruthSlot {
    const GroundTruthEntry* entry;
    bool consumed = false;
  };
  std::vector<TruthSlot> slots;
  for (const GroundTruthEntry& e : truth) slots.push_back({&e});
  std::sort(slots.begin(), slots.end(), [](const TruthSlot& a, const TruthSlot& b) {
    if (a.entry->file != b.entry->file) return a.entry->file < b.entry->file;
    std::string_view pa = problem_name(a.entry->problem);
    std::string_view pb = problem_name(b.entry->problem);
    if (pa != pb) return pa < pb;
    return a.entry->lines < b.entry->lines;
  });

  std::vector<const Warning*> preds;
  for (const Warning& w : predicted) preds.push_back(&w);
  std::stable_sort(preds.begin(), preds.end(),
                   [](const Warning* a, const Warning* b) {
                     if (a->file != b->file) return a->file < b->file;
                     int la = a->lines.empty() ? 0 : a->lines.front();
                     int lb = b->lines.empty() ? 0 : b->lines.front();
                     return la < lb;
                   });

  MatchResult result;
  for (ProblemType p : kAllProblems) result.per_problem[p];  // stable rows

  for (const Warning* w : preds) {
    TruthSlot* hit = nullptr;
    for (TruthSlot& slot : slots) {
      if (slot.consumed || slot.entry->problem != w->problem ||
          slot.entry->file != w->file)
        continue;
      if (eval_detail::lines_intersect(slot.entry->lines, w->lines)) {
        hit = &slot;
        break;
      }
    }
    std::string label = std::string(problem_name(w->problem)) + " " + w->file +
                        " " + eval_detail::lines_label(w->lines);
    if (hit) {
      hit->consumed = true;
      result.overall.tp += 1;
      result.per_problem[w->problem].tp += 1;
      result.ledger.push_back("TP " + label + " matched truth " +
                              eval_detail::lines_label(hit->entry->lines));
    } else {
      result.overall.fp += 1;
      result.per_problem[w->problem].fp += 1;
      result.ledger.push_back("FP " + label);
    }
  }
  for (const TruthSlot& slot : slots) {
    if (slot.consumed) continue;
    result.overall.fn += 1;
    result.per_problem[slot.entry->problem].fn += 1;
    result.ledger.push_back("FN " + std::string(problem_name(slot.entry->problem)) +
                            " " + slot.entry->file + " " +
                            eval_detail::lines_label(slot.entry->lines));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Metrics

/// Precision = tp/(tp+fp); recall = tp/(tp+fn); F1 = harmonic mean. Each is
/// undefined when its denominator is zero; F1 additionally requires p+r > 0.
inline Metrics compute_metrics(const ConfusionCounts& counts) {
  Metrics m;
  m.counts = counts;
  if (counts.tp + counts.fp > 0) {
    m.precision_defined = true;
    m.precision = static_cast<double>(counts.tp) / (counts.tp + counts.fp);
  }
  if (counts.tp + counts.fn > 0) {
    m.recall_defined = true;
    m.recall = static_cast<double>(counts.tp) / (counts.tp + counts.fn);
  }
  if (m.precision_defined && m.recall_defined && m.precision + m.recall > 0) {
    m.f1_defined = true;
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  }
  return m;
}

inline MetricsReport build_report(const MatchResult& match) {
  MetricsReport report;
  report.overall = compute_metrics(match.overall);
  for (const auto& [problem, counts] : match.per_problem) {
    report.per_problem[problem] = compute_metrics(counts);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Rendering (rounding happens here and only here)

/// Half-up rounding to two decimals, applied at render time only.
inline long round2_cents(double x) {
  return static_cast<long>(std::floor(x * 100.0 + 0.5));
}

inline std::string format2(double x) {
  long cents = round2_cents(x);
  std::string sign = cents < 0 ? "-" : "";
  long mag = cents < 0 ? -cents : cents;
  std::string frac = std::to_string(mag % 100);
  if (frac.size() < 2) frac = "0" + frac;
  return sign + std::to_string(mag / 100) + "." + frac;
}

inline std::string format_metric(bool defined, double value) {
  return defined ? format2(value) : "n/a";
}

namespace eval_detail {

inline void append_row(std::string& out, const std::vector<std::string>& cells,
                       const std::vector<std::size_t>& widths) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += "  ";
    out += cells[i];
    if (i + 1 < cells.size())
      out += std::string(widths[i] - std::min(widths[i], cells[i].size()), ' ');
  }
  out += '\n';
}

inline std::string render_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    if (widths.size() < row.size()) widths.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i)
      widths[i] = std::max(widths[i], row[i].size());
  }
  std::string out;
  for (const auto& row : rows) append_row(out, row, widths);
  return out;
}

inline std::vector<std::string> metric_cells(const Metrics& m) {
  return {std::to_string(m.counts.tp),
          std::to_string(m.counts.fp),
          std::to_string(m.counts.fn),
          format_metric(m.precision_defined, m.precision),
          format_metric(m.recall_defined, m.recall),
          format_metric(m.f1_defined, m.f1)};
}

inline nlohmann::ordered_json metrics_to_json(const Metrics& m) {
  nlohmann::ordered_json j;
  j["tp"] = m.counts.tp;
  j["fp"] = m.counts.fp;
  j["fn"] = m.counts.fn;
  if (m.precision_defined)
    j["precision"] = round2_cents(m.precision) / 100.0;
  else
    j["precision"] = nullptr;
  if (m.recall_defined)
    j["recall"] = round2_cents(m.recall) / 100.0;
  else
    j["recall"] = nullptr;
  if (m.f1_defined)
    j["f1"] = round2_cents(m.f1) / 100.0;
  else
    j["f1"] = nullptr;
  return j;
}

}  // namespace eval_detail

enum class ReportFormat { text, structured };

/// Render the report. Text mode mirrors the overall-results table layout
/// (TP, FP, FN, Precision, Recall, F1); rows with no counts are omitted, so
/// an empty report renders as the header alone.
inline std::string render_report(const MetricsReport& report, ReportFormat format,
                                 bool per_problem = false) {
  if (format == ReportFormat::structured) {
    nlohmann::ordered_json j;
    j["overall"] = eval_detail::metrics_to_json(report.overall);
    nlohmann::ordered_json per = nlohmann::ordered_json::object();
    for (ProblemType p : kAllProblems) {
      auto it = report.per_problem.find(p);
      if (it == report.per_problem.end() || it->second.counts.empty()) continue;
      per[std::string(problem_name(p))] = eval_detail::metrics_to_json(it->second);
    }
    if (per_problem) j["per_problem"] = per;
    return j.dump(2) + "\n";
  }

  std::vector<std::vector<std::string>> rows;
  rows.push_back({"Scope", "TP", "FP", "FN", "Precision", "Recall", "F1"});
  if (!report.overall.counts.empty()) {
    std::vector<std::string> row{"overall"};
    for (auto& c : eval_detail::metric_cells(report.overall)) row.push_back(c);
    rows.push_back(std::move(row));
  }
  if (per_problem) {
    for (ProblemType p : kAllProblems) {
      auto it = report.per_problem.find(p);
      if (it == report.per_problem.end() || it->second.counts.empty()) continue;
      std::vector<std::string> row{std::string(problem_name(p))};
      for (auto& c : eval_detail::metric_cells(it->second)) row.push_back(c);
      rows.push_back(std::move(row));
    }
  }
  return eval_detail::render_table(rows);
}

/// Side-by-side per-problem comparison of two runs with delta columns
/// (second minus first, computed at full precision, rounded at render).
inline std::string render_comparison(const MetricsReport& cot,
                                     const MetricsReport& rag) {
  auto delta_cell = [](bool da, double a, bool db, double b) -> std::string {
    if (!da || !db) return "n/a";
    return format2(b - a);
  };
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"Problem", "P(cot)", "R(cot)", "F1(cot)", "P(rag)", "R(rag)",
                  "F1(rag)", "dP", "dR", "dF1"});
  for (ProblemType p : kAllProblems) {
    auto ic = cot.per_problem.find(p);
    auto ir = rag.per_problem.find(p);
    Metrics mc = ic == cot.per_problem.end() ? Metrics{} : ic->second;
    Metrics mr = ir == rag.per_problem.end() ? Metrics{} : ir->second;
    if (mc.counts.empty() && mr.counts.empty()) continue;
    rows.push_back({std::string(problem_name(p)),
                    format_metric(mc.precision_defined, mc.precision),
                    format_metric(mc.recall_defined, mc.recall),
                    format_metric(mc.f1_defined, mc.f1),
                    format_metric(mr.precision_defined, mr.precision),
                    format_metric(mr.recall_defined, mr.recall),
                    format_metric(mr.f1_defined, mr.f1),
                    delta_cell(mc.precision_defined, mc.precision,
                               mr.precision_defined, mr.precision),
                    delta_cell(mc.recall_defined, mc.recall, mr.recall_defined,
                               mr.recall),
                    delta_cell(mc.f1_defined, mc.f1, mr.f1_defined, mr.f1)});
  }
  return eval_detail::render_table(rows);
}

}  // namespace qlint
