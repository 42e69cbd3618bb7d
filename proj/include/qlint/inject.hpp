#pragma once

// Fault injection: plant one problem type into a verified-clean file and emit
// the matching ground truth.
//
// One mechanized mutation pattern per problem type. Candidates are collected
// deterministically from the circuit model, the seed picks among them, and
// every mutant is post-validated: it must parse, and the rule engine must
// report a warning of the injected type whose lines equal the emitted ground
// truth; candidates that fail validation (multi-line statements, unusual
// structure) are skipped. Newly introduced warnings of other types are
// reported, never hidden.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qlint/model.hpp"
#include "qlint/obfuscate.hpp"
#include "qlint/parser.hpp"
#include "qlint/rules.hpp"
#include "qlint/source_file.hpp"
#include "qlint/warning.hpp"

namespace qlint {

struct InjectionResult {
  std::string text;          // mutated source
  ProblemType problem;
  std::vector<int> lines;    // ground truth, mutant line numbers
  std::vector<std::string> side_effects;  // other problem types introduced
};

namespace inj_detail {

struct LineInsert {
  int after_line = 0;  // 1-based line in the original; 0 = top of file
  std::vector<std::string> lines;
};

struct SpanEdit {
  std::size_t offset = 0;
  std::size_t length = 0;
  std::string text;
};

/// One fully specified mutation: byte edits (which never change the line
/// grid) plus whole-line inserts, with the ground truth already expressed in
/// mutant coordinates.
struct Plan {
  std::vector<SpanEdit> span_edits;
  std::vector<LineInsert> inserts;
  std::vector<int> truth_lines;
};

inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.emplace_back(text.substr(pos));
      break;
    }
    lines.emplace_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

inline std::string indent_of(const std::string& line) {
  std::size_t n = line.find_first_not_of(" \t");
  return line.substr(0, n == std::string::npos ? line.size() : n);
}

/// Mutant line number of an original source line once inserts apply.
inline int shifted_line(const std::vector<LineInsert>& inserts, int line) {
  int shifted = line;
  for (const auto& ins : inserts) {
    if (ins.after_line < line) shifted += static_cast<int>(ins.lines.size());
  }
  return shifted;
}

/// Mutant line number of the k-th inserted line (0-based) of insert `idx`.
inline int inserted_line_at(const std::vector<LineInsert>& inserts,
                            std::size_t idx, int k) {
  const LineInsert& target = inserts[idx];
  int line = target.after_line + 1 + k;
  for (std::size_t i = 0; i < inserts.size(); ++i) {
    if (i == idx) continue;
    const LineInsert& other = inserts[i];
    bool before = other.after_line < target.after_line ||
                  (other.after_line == target.after_line && i < idx);
    if (before) line += static_cast<int>(other.lines.size());
  }
  return line;
}

inline std::string apply_plan(std::string_view source, const Plan& plan) {
  std::string text(source);
  std::vector<SpanEdit> edits = plan.span_edits;
  std::sort(edits.begin(), edits.end(),
            [](const SpanEdit& a, const SpanEdit& b) { return a.offset > b.offset; });
  for (const SpanEdit& e : edits) {
    text.replace(e.offset, e.length, e.text);
  }

  std::vector<std::string> lines = split_lines(text);
  struct Pending {
    int after_line;
    std::size_t order;
    const LineInsert* ins;
  };
  std::vector<Pending> pending;
  for (std::size_t i = 0; i < plan.inserts.size(); ++i) {
    pending.push_back({plan.inserts[i].after_line, i, &plan.inserts[i]});
  }
  std::sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
    if (a.after_line != b.after_line) return a.after_line > b.after_line;
    return a.order > b.order;  // later-listed insert ends up later in file
  });
  for (const Pending& p : pending) {
    lines.insert(lines.begin() + p.after_line, p.ins->lines.begin(),
                 p.ins->lines.end());
  }

  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

/// Span of a plain-decimal positional argument of a constructor call on the
/// given line (e.g. the 3 in QuantumCircuit(3, 2)).
inline std::optional<SpanEdit> int_arg_bump(const Module& mod, int line,
                                            const std::set<std::string>& callees,
                                            std::size_t arg_index, int delta) {
  std::optional<SpanEdit> found;
  auto visit_expr = [&](auto&& self, const Expr& e) -> void {
    if (e.kind == ExprKind::Call && !e.children.empty() && e.line == line) {
      const Expr& callee = e.children[0];
      std::string name = callee.kind == ExprKind::Name ||
                                 callee.kind == ExprKind::Attribute
                             ? callee.text
                             : std::string();
      if (callees.count(name) && e.children.size() > 1 + arg_index) {
        const Expr& arg = e.children[1 + arg_index];
        if (arg.kind == ExprKind::Num && arg.text.size() <= 9 &&
            arg.text.find_first_not_of("0123456789") == std::string::npos) {
          int value = std::stoi(arg.text);
          if (value + delta >= 0) {
            found = SpanEdit{arg.offset, arg.text.size(),
                             std::to_string(value + delta)};
          }
        }
      }
    }
    for (const Expr& c : e.children) self(self, c);
    for (const Kwarg& k : e.kwargs) {
      if (k.value) self(self, *k.value);
    }
  };
  auto visit_stmt = [&](auto&& self, const Stmt& s) -> void {
    for (const Expr& e : s.exprs) visit_expr(visit_expr, e);
    for (const Expr& d : s.decorators) visit_expr(visit_expr, d);
    for (const Expr& b : s.bases) visit_expr(visit_expr, b);
    for (const WithItem& w : s.with_items) {
      visit_expr(visit_expr, w.context);
      if (w.has_target) visit_expr(visit_expr, w.target);
    }
    for (const ExceptHandler& h : s.handlers) {
      for (const Stmt& b : h.body) self(self, b);
    }
    for (const Stmt& b : s.body) self(self, b);
    for (const Stmt& b : s.orelse) self(self, b);
    for (const Stmt& b : s.final_body) self(self, b);
  };
  for (const Stmt& s : mod.body) visit_stmt(visit_stmt, s);
  return found;
}

inline bool imports_name(const Module& mod, std::string_view name) {
  for (const Stmt& s : mod.body) {
    if (s.kind != StmtKind::Import && s.kind != StmtKind::ImportFrom) continue;
    for (const ImportAlias& a : s.aliases) {
      if (!a.asname.empty()) {
        if (a.asname == name) return true;
      } else if (a.module == name) {
        return true;
      }
    }
  }
  return false;
}

/// A fresh identifier that appears nowhere in the file.
inline std::string fresh_name(std::string_view source, const std::string& base) {
  std::string name = base;
  int n = 1;
  while (source.find(name) != std::string_view::npos) {
    name = base + "_" + std::to_string(++n);
  }
  return name;
}

inline int last_event_line(const CircuitModel& circ) {
  int line = circ.decl_line;
  for (const CircuitEvent& ev : circ.events) line = std::max(line, ev.line);
  return line;
}

}  // namespace inj_detail

/// Build the candidate mutation plans for one problem type, in deterministic
/// model order. Empty result means the file lacks the required structure.
inline std::vector<inj_detail::Plan> injection_candidates(
    ProblemType problem, const SourceFile& file, const Module& mod,
    const ProgramModel& model) {
  using namespace inj_detail;
  std::vector<Plan> plans;
  std::vector<std::string> lines = split_lines(file.text);
  auto line_text = [&](int line) -> const std::string& {
    return lines[static_cast<std::size_t>(line - 1)];
  };

  switch (problem) {
    case ProblemType::DoubleMeas: {
      // Duplicate an existing measure statement immediately after itself.
      for (const auto& circ : model.circuits) {
        for (const CircuitEvent& ev : circ->events) {
          if (ev.kind != EventKind::Measure || ev.qubits_symbolic ||
              ev.qubits.empty())
            continue;
          Plan p;
          p.inserts.push_back({ev.line, {line_text(ev.line)}});
          p.truth_lines = {inserted_line_at(p.inserts, 0, 0)};
          plans.push_back(std::move(p));
        }
      }
      break;
    }
    case ProblemType::OpAfterMeas: {
      // Apply a gate to a qubit right after it was measured.
      for (const auto& circ : model.circuits) {
        for (const CircuitEvent& ev : circ->events) {
          if (ev.kind != EventKind::Measure || ev.qubits_symbolic ||
              ev.qubits.empty())
            continue;
          Plan p;
          p.inserts.push_back(
              {ev.line,
               {indent_of(line_text(ev.line)) + circ->var_name + ".x(" +
                std::to_string(ev.qubits.front()) + ")"}});
          p.truth_lines = {inserted_line_at(p.inserts, 0, 0)};
          plans.push_back(std::move(p));
        }
      }
      break;
    }
    case ProblemType::MeasAllAbuse: {
      // measure_all() on a circuit that already has an explicit register.
      for (const auto& circ : model.circuits) {
        if (circ->derived || circ->explicit_cregs().empty()) continue;
        int anchor = last_event_line(*circ);
        Plan p;
        p.inserts.push_back(
            {anchor, {indent_of(line_text(anchor)) + circ->var_name +
                      ".measure_all()"}});
        p.truth_lines = {inserted_line_at(p.inserts, 0, 0)};
        plans.push_back(std::move(p));
      }
      break;
    }
    case ProblemType::CondWoMeas: {
      // Conditional gate on a register attached at construction, inserted
      // before any measurement can have written into it.
      for (const auto& circ : model.circuits) {
        if (circ->derived) continue;
        for (const auto& att : circ->cregs) {
          if (att.implicit || !att.decl || att.decl->name.empty()) continue;
          if (att.decl->line > circ->decl_line) continue;  // attached later
          Plan p;
          p.inserts.push_back(
              {circ->decl_line,
               {indent_of(line_text(circ->decl_line)) + circ->var_name +
                ".x(0).c_if(" + att.decl->name + ", 1)"}});
          p.truth_lines = {inserted_line_at(p.inserts, 0, 0)};
          plans.push_back(std::move(p));
        }
      }
      break;
    }
    case ProblemType::ConstClasBit: {
      // Measure a qubit before anything has transformed it, then reset so
      // the rest of the file sees a fresh qubit again.
      for (const auto& circ : model.circuits) {
        if (circ->derived || circ->clbit_count < 1) continue;
        std::set<int> measured;
        for (const CircuitEvent& ev : circ->events) {
          if (ev.kind == EventKind::Measure)
            for (int q : ev.qubits) measured.insert(q);
        }
        std::vector<int> qubit_choices;
        for (int q : measured) qubit_choices.push_back(q);
        if (qubit_choices.empty() && circ->qubit_count >= 1)
          qubit_choices.push_back(0);
        for (int q : qubit_choices) {
          std::string indent = indent_of(line_text(circ->decl_line));
          Plan p;
          p.inserts.push_back(
              {circ->decl_line,
               {indent + circ->var_name + ".measure(" + std::to_string(q) +
                    ", 0)",
                indent + circ->var_name + ".reset(" + std::to_string(q) + ")"}});
          p.truth_lines = {inserted_line_at(p.inserts, 0, 0)};
          plans.push_back(std::move(p));
        }
      }
      break;
    }
    case ProblemType::InsuffClasReg: {
      // Shrink a classical register below what the measurements need.
      for (const auto& circ : model.circuits) {
        // Pattern A: a whole-register measure; shrink its classical register
        // below the quantum register's size.
        std::vector<const CircuitEvent*> whole;
        for (const CircuitEvent& ev : circ->events) {
          if (ev.kind == EventKind::Measure && ev.whole_register)
            whole.push_back(&ev);
        }
        if (whole.size() == 1 && whole[0]->wr_qreg_size >= 1) {
          const CircuitEvent& ev = *whole[0];
          for (const auto& att : circ->cregs) {
            if (att.implicit || !att.decl || att.decl->size != ev.wr_creg_size)
              continue;
            auto edit = int_arg_bump(mod, att.decl->line, {"ClassicalRegister"},
                                     0, ev.wr_qreg_size - 1 - att.decl->size);
            if (edit) {
              Plan p;
              p.span_edits.push_back(*edit);
              p.truth_lines = {ev.line};
              plans.push_back(std::move(p));
            }
            break;
          }
        }
        if (!whole.empty()) continue;
        // Pattern B: distinct single-qubit measures; shrink the circuit's
        // classical capacity below the distinct-qubit count.
        if (circ->clbit_count < 1) continue;
        std::set<int> distinct;
        std::vector<int> measure_lines;
        for (const CircuitEvent& ev : circ->events) {
          if (ev.kind != EventKind::Measure || ev.qubits.empty()) continue;
          for (int q : ev.qubits) distinct.insert(q);
          measure_lines.push_back(ev.line);
        }
        if (distinct.empty()) continue;
        int target = static_cast<int>(distinct.size()) - 1;
        int delta = target - circ->clbit_count;
        if (delta >= 0) continue;  // cannot shrink below: already at capacity
        std::optional<SpanEdit> edit;
        bool positional = true;
        for (const auto& att : circ->cregs) {
          if (!att.implicit) positional = false;
        }
        if (positional) {
          edit = int_arg_bump(mod, circ->decl_line, {"QuantumCircuit"}, 1, delta);
        } else if (circ->cregs.size() == 1 && circ->cregs[0].decl) {
          edit = int_arg_bump(mod, circ->cregs[0].decl->line,
                              {"ClassicalRegister"}, 0, delta);
        }
        if (edit) {
          Plan p;
          p.span_edits.push_back(*edit);
          std::sort(measure_lines.begin(), measure_lines.end());
          measure_lines.erase(
              std::unique(measure_lines.begin(), measure_lines.end()),
              measure_lines.end());
          p.truth_lines = measure_lines;
          plans.push_back(std::move(p));
        }
      }
      break;
    }
    case ProblemType::OversizedCircuit: {
      // Grow the quantum register by one qubit nothing will ever touch.
      for (const auto& circ : model.circuits) {
        if (circ->derived || circ->qubit_count < 1) continue;
        bool suppressible = false;
        bool whole_reg = false;
        for (const CircuitEvent& ev : circ->events) {
          if (ev.kind == EventKind::MeasureAll || ev.qubits_symbolic)
            suppressible = true;
          if (ev.kind == EventKind::Measure && ev.whole_register)
            whole_reg = true;
        }
        if (suppressible) continue;
        bool positional = true;
        for (const auto& att : circ->qregs) {
          if (!att.implicit) positional = false;
        }
        Plan p;
        if (positional) {
          auto qedit = int_arg_bump(mod, circ->decl_line, {"QuantumCircuit"}, 0, 1);
          if (!qedit) continue;
          p.span_edits.push_back(*qedit);
        } else {
          if (whole_reg || circ->qregs.size() != 1 || !circ->qregs[0].decl)
            continue;
          auto qedit = int_arg_bump(mod, circ->qregs[0].decl->line,
                                    {"QuantumRegister"}, 0, 1);
          if (!qedit) continue;
          p.span_edits.push_back(*qedit);
        }
        p.truth_lines = {circ->decl_line};
        plans.push_back(std::move(p));
      }
      break;
    }
    case ProblemType::GhostCompose: {
      // Compose two circuits and discard the result.
      for (std::size_t i = 0; i < model.circuits.size(); ++i) {
        const auto& circ = model.circuits[i];
        if (circ->derived) continue;
        std::string other = circ->var_name;
        for (const auto& cand : model.circuits) {
          if (cand.get() != circ.get() && !cand->derived &&
              cand->decl_line < circ->decl_line) {
            other = cand->var_name;
          }
        }
        int anchor = last_event_line(*circ);
        Plan p;
        p.inserts.push_back(
            {anchor, {indent_of(line_text(anchor)) + circ->var_name +
                      ".compose(" + other + ")"}});
        p.truth_lines = {inserted_line_at(p.inserts, 0, 0)};
        plans.push_back(std::move(p));
      }
      break;
    }
    case ProblemType::OpAfterTransp: {
      // Transpile a circuit, then mutate the transpiled result.
      bool has_import = inj_detail::imports_name(mod, "transpile");
      for (const auto& circ : model.circuits) {
        if (circ->derived) continue;
        int anchor = last_event_line(*circ);
        std::string tvar = fresh_name(file.text, "tqc");
        std::string indent = indent_of(line_text(anchor));
        Plan p;
        if (!has_import) {
          p.inserts.push_back({0, {"from qiskit import transpile"}});
        }
        p.inserts.push_back({anchor,
                             {indent + tvar + " = transpile(" + circ->var_name + ")",
                              indent + tvar + ".h(0)"}});
        std::size_t idx = p.inserts.size() - 1;
        p.truth_lines = {inserted_line_at(p.inserts, idx, 1)};
        plans.push_back(std::move(p));
      }
      break;
    }
    case ProblemType::OldIdenGate: {
      // Call the removed identity-gate API on an existing circuit.
      for (const auto& circ : model.circuits) {
        if (circ->derived) continue;
        int anchor = last_event_line(*circ);
        Plan p;
        p.inserts.push_back(
            {anchor,
             {indent_of(line_text(anchor)) + circ->var_name + ".iden(0)"}});
        p.truth_lines = {inserted_line_at(p.inserts, 0, 0)};
        plans.push_back(std::move(p));
      }
      break;
    }
  }
  return plans;
}

/// Inject `problem` into `source`. The seed picks deterministically among the
/// candidate sites; candidates failing post-validation are skipped in order.
inline InjectionResult inject(ProblemType problem, const std::string& source,
                              std::uint64_t seed) {
  SourceFile file = SourceFile::from_text("<inject>", source);
  Module mod = parse_source(source);  // SyntaxError propagates
  ProgramModel model = build_model(mod, file);
  if (model.circuits.empty()) {
    throw NotInjectable("file constructs no quantum circuits");
  }

  std::vector<Warning> before = run_all_detectors(model);
  for (const Warning& w : before) {
    if (w.problem == problem) {
      throw NotInjectable("file already exhibits " +
                          std::string(problem_name(problem)) + " at line " +
                          std::to_string(w.lines.front()));
    }
  }

  std::vector<inj_detail::Plan> plans =
      injection_candidates(problem, file, mod, model);
  if (plans.empty()) {
    throw NotInjectable("file lacks the structure needed to inject " +
                        std::string(problem_name(problem)));
  }

  std::size_t start = static_cast<std::size_t>(seed % plans.size());
  for (std::size_t attempt = 0; attempt < plans.size(); ++attempt) {
    const inj_detail::Plan& plan = plans[(start + attempt) % plans.size()];
    std::string mutated = inj_detail::apply_plan(source, plan);

    ProgramModel mutant_model;
    try {
      mutant_model = model_from_file(SourceFile::from_text("<inject>", mutated));
    } catch (const SyntaxError&) {
      continue;  // anchor sat inside a multi-line statement; try the next site
    }
    std::vector<Warning> after = run_all_detectors(mutant_model);

    // The mutant must carry exactly one warning of the injected type and it
    // must sit exactly on the emitted ground truth.
    int of_type = 0;
    bool exact = false;
    for (const Warning& w : after) {
      if (w.problem != problem) continue;
      ++of_type;
      if (w.lines == plan.truth_lines) exact = true;
    }
    if (of_type != 1 || !exact) continue;

    InjectionResult result;
    result.text = std::move(mutated);
    result.problem = problem;
    result.lines = plan.truth_lines;

    // Compare other-type warnings against the originals, mapped through the
    // line shift the inserts caused.
    std::set<std::pair<std::string, std::string>> preexisting;
    for (const Warning& w : before) {
      std::set<int> shifted;
      for (int x : w.lines) shifted.insert(inj_detail::shifted_line(plan.inserts, x));
      preexisting.insert(
          {std::string(problem_name(w.problem)), detail::join_ints(shifted)});
    }
    for (const Warning& w : after) {
      if (w.problem == problem) continue;
      auto key = std::make_pair(
          std::string(problem_name(w.problem)),
          detail::join_ints(std::set<int>(w.lines.begin(), w.lines.end())));
      if (!preexisting.count(key)) {
        result.side_effects.push_back("introduced " + key.first + " at line(s) " +
                                      key.second);
      }
    }
    return result;
  }
  throw NotInjectable("no candidate site for " +
                      std::string(problem_name(problem)) +
                      " survived validation");
}

}  // namespace qlint
