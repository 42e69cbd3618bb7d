#pragma once

// Per-problem knowledge base of annotated true-positive examples plus k=1
// nearest-neighbor retrieval.
//
// Build protocol: each candidate (source, problem, warning lines) is
// annotated on its trigger lines with the standardized label
// "# Problem: <description>", token-counted, excluded when over the 8192
// token limit, and otherwise embedded and appended to that problem's index.
// Retrieval is an exact linear scan under Euclidean distance, ties broken by
// smallest entry id.
//
// On-disk layout: <kb>/<problem>/<id>.annotated, <kb>/<problem>/index.records
// (one JSON record per line), and <kb>/manifest (deterministic build log).

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qlint/errors.hpp"
#include "qlint/problems.hpp"
#include "qlint/providers.hpp"
#include "qlint/source_file.hpp"
#include "qlint/tokencount.hpp"

namespace qlint {

struct KbCandidate {
  std::string source;       // raw file text
  ProblemType problem;
  std::vector<int> lines;   // warning lines to annotate
  std::string source_path;  // provenance, also the basis of the entry id
};

struct KbEntry {
  std::string id;
  ProblemType problem;
  std::string annotated_source;
  int token_count = 0;
  std::vector<double> vector;
  std::string source_path;
};

struct VectorIndex {
  ProblemType problem;
  std::vector<KbEntry> entries;
  int dimension = 0;
};

struct RagStore {
  std::map<ProblemType, VectorIndex> indices;
  std::string manifest;
  int dimension = 0;

  const VectorIndex& index_for(ProblemType p) const { return indices.at(p); }
};

/// Append the standardized trailing label to every listed line.
inline std::string annotate_tp_file(std::string_view source, ProblemType problem,
                                    const std::set<int>& lines) {
  SourceFile probe = SourceFile::from_text("", std::string(source));
  for (int line : lines) {
    if (line < 1 || line > probe.line_count()) {
      throw OutOfRange("annotation line " + std::to_string(line) +
                       " outside file of " + std::to_string(probe.line_count()) +
                       " lines");
    }
  }
  std::string label = "  # Problem: " + std::string(problem_description(problem));
  std::string out;
  out.reserve(source.size() + lines.size() * label.size());
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= source.size()) {
    std::size_t nl = source.find('\n', pos);
    std::string_view line = (nl == std::string_view::npos)
                                ? source.substr(pos)
                                : source.substr(pos, nl - pos);
    ++lineno;
    out += line;
    if (lines.count(lineno)) out += label;
    if (nl == std::string_view::npos) break;
    out += '\n';
    pos = nl + 1;
  }
  return out;
}

namespace detail {

inline std::string sanitize_id(std::string_view path) {
  std::string stem = std::filesystem::path(std::string(path)).stem().string();
  if (stem.empty()) stem = "entry";
  for (char& c : stem) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
              (c >= '0' && c <= '9') || c == '_' || c == '-';
    if (!ok) c = '_';
  }
  return stem;
}

inline double euclidean(const std::vector<double>& a,
                        const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace detail

/// Sequentially annotate, filter, embed and group the candidates. The
/// manifest records every inclusion/exclusion decision in input order and is
/// byte-identical across rebuilds from identical inputs.
inline RagStore build_index(const std::vector<KbCandidate>& candidates,
                            Embedder& embedder) {
  RagStore store;
  store.dimension = embedder.dimension();
  for (ProblemType p : kAllProblems) {
    store.indices[p] = VectorIndex{p, {}, store.dimension};
  }

  struct Decision {
    std::string entry;  // "<problem>/<id>"
    int tokens = 0;
    bool included = false;
  };
  std::vector<Decision> decisions;
  std::set<std::string> included_files, excluded_files;
  std::map<ProblemType, std::set<std::string>> used_ids;

  for (const auto& cand : candidates) {
    std::set<int> lines(cand.lines.begin(), cand.lines.end());
    std::string annotated = annotate_tp_file(cand.source, cand.problem, lines);
    int tokens = count_tokens(annotated);

    std::string id = detail::sanitize_id(cand.source_path);
    auto& taken = used_ids[cand.problem];
    if (taken.count(id)) {
      int n = 2;
      while (taken.count(id + "_" + std::to_string(n))) ++n;
      id += "_" + std::to_string(n);
    }
    taken.insert(id);

    std::string tag = std::string(problem_name(cand.problem)) + "/" + id;
    if (tokens > kTokenLimit) {
      decisions.push_back({tag, tokens, false});
      excluded_files.insert(cand.source_path);
      continue;
    }
    decisions.push_back({tag, tokens, true});
    included_files.insert(cand.source_path);

    KbEntry entry;
    entry.id = id;
    entry.problem = cand.problem;
    entry.annotated_source = annotated;
    entry.token_count = tokens;
    entry.vector = embedder.embed(annotated);
    entry.source_path = cand.source_path;
    store.indices[cand.problem].entries.push_back(std::move(entry));
  }

  // A file only counts as excluded when none of its entries survived.
  for (const auto& f : included_files) excluded_files.erase(f);

  long entries_included = 0, entries_excluded = 0;
  for (const auto& d : decisions) (d.included ? entries_included : entries_excluded)++;

  std::ostringstream m;
  m << "qlint knowledge base manifest\n";
  m << "tokenizer: " << kTokenCounterName << "\n";
  m << "token_limit: " << kTokenLimit << "\n";
  m << "dimension: " << store.dimension << "\n";
  m << "candidate_entries: " << decisions.size() << "\n";
  m << "entries_included: " << entries_included << "\n";
  m << "entries_excluded: " << entries_excluded << "\n";
  m << "files_included: " << included_files.size() << "\n";
  m << "files_excluded: " << excluded_files.size() << "\n";
  m << "per_problem:";
  for (ProblemType p : kAllProblems) {
    m << " " << problem_name(p) << "=" << store.indices[p].entries.size();
  }
  m << "\n";
  for (const auto& d : decisions) {
    m << "entry " << d.entry << " tokens=" << d.tokens
      << (d.included ? " included" : " excluded token-limit") << "\n";
  }
  store.manifest = m.str();
  return store;
}

/// Exact nearest neighbor: the entry minimizing Euclidean distance to the
/// query, ties broken by smallest id.
inline std::pair<const KbEntry*, double> retrieve(
    const VectorIndex& index, const std::vector<double>& query) {
  if (index.entries.empty()) {
    throw EmptyIndex("no knowledge-base entries for " +
                     std::string(problem_name(index.problem)));
  }
  if (static_cast<int>(query.size()) != index.dimension) {
    throw DimensionMismatch("query has dimension " +
                            std::to_string(query.size()) + ", index has " +
                            std::to_string(index.dimension));
  }
  const KbEntry* best = nullptr;
  double best_dist = 0.0;
  for (const auto& entry : index.entries) {
    double d = detail::euclidean(entry.vector, query);
    if (!best || d < best_dist || (d == best_dist && entry.id < best->id)) {
      best = &entry;
      best_dist = d;
    }
  }
  return {best, best_dist};
}

/// Resolve the prompt example for one (problem, file) analysis. Oversized
/// query files fall back to the static catalog example instead of failing;
/// the fallback is recorded in the diagnostics log when one is supplied.
inline std::string retrieve_example_for(ProblemType problem,
                                        std::string_view source_text,
                                        Embedder& embedder,
                                        const RagStore& store,
                                        std::vector<std::string>* log = nullptr) {
  if (count_tokens(source_text) > kTokenLimit) {
    if (log) {
      log->push_back("query exceeds " + std::to_string(kTokenLimit) +
                     " tokens; using the static example for " +
                     std::string(problem_name(problem)));
    }
    return std::string(problem_static_example(problem));
  }
  const VectorIndex& index = store.index_for(problem);
  if (index.entries.empty()) {
    if (log) {
      log->push_back("knowledge base has no entries for " +
                     std::string(problem_name(problem)) +
                     "; using the static example");
    }
    return std::string(problem_static_example(problem));
  }
  auto query = embedder.embed(source_text);
  auto [entry, dist] = retrieve(index, query);
  (void)dist;
  return entry->annotated_source;
}

/// Persist a store under the documented layout.
inline void save_store(const RagStore& store, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [problem, index] : store.indices) {
    std::filesystem::path pdir = dir / std::string(problem_name(problem));
    std::filesystem::create_directories(pdir);
    std::ofstream records(pdir / "index.records", std::ios::binary);
    for (const auto& entry : index.entries) {
      std::ofstream annotated(pdir / (entry.id + ".annotated"), std::ios::binary);
      annotated << entry.annotated_source;
      nlohmann::ordered_json rec;
      rec["id"] = entry.id;
      rec["token_count"] = entry.token_count;
      rec["vector"] = entry.vector;
      rec["source_path"] = entry.source_path;
      records << rec.dump() << "\n";
    }
  }
  std::ofstream manifest(dir / "manifest", std::ios::binary);
  manifest << store.manifest;
}

/// Load a store persisted by save_store.
inline RagStore load_store(const std::filesystem::path& dir) {
  RagStore store;
  std::ifstream manifest(dir / "manifest", std::ios::binary);
  if (manifest) {
    std::ostringstream buf;
    buf << manifest.rdbuf();
    store.manifest = buf.str();
    std::istringstream lines(store.manifest);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.rfind("dimension: ", 0) == 0) {
        store.dimension = std::stoi(line.substr(11));
      }
    }
  }
  for (ProblemType p : kAllProblems) {
    VectorIndex index{p, {}, store.dimension};
    std::filesystem::path pdir = dir / std::string(problem_name(p));
    std::ifstream records(pdir / "index.records", std::ios::binary);
    std::string line;
    int lineno = 0;
    while (records && std::getline(records, line)) {
      ++lineno;
      if (line.empty()) continue;
      nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
      if (rec.is_discarded() || !rec.is_object()) {
        throw MalformedResponse("bad record at " + pdir.string() +
                                    "/index.records:" + std::to_string(lineno),
                                line);
      }
      KbEntry entry;
      entry.id = rec.at("id").get<std::string>();
      entry.problem = p;
      entry.token_count = rec.at("token_count").get<int>();
      entry.vector = rec.at("vector").get<std::vector<double>>();
      entry.source_path = rec.at("source_path").get<std::string>();
      entry.annotated_source =
          SourceFile::load((pdir / (entry.id + ".annotated")).string()).text;
      index.entries.push_back(std::move(entry));
    }
    store.indices[p] = std::move(index);
  }
  return store;
}

}  // namespace qlint
