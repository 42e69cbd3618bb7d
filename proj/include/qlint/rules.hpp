#pragma once

#include <set>
#include <string>
#include <vector>

#include "qlint/model.hpp"
#include "qlint/problems.hpp"
#include "qlint/warning.hpp"

namespace qlint {

namespace detail {

inline std::string rstrip(std::string s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.pop_back();
  return s;
}

inline std::string snippet_for(const SourceFile& f, const std::vector<int>& lines) {
  std::string out;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += rstrip(f.line(lines[i]));
  }
  return out;
}

inline std::string join_ints(const std::set<int>& xs) {
  std::string out;
  for (int x : xs) {
    if (!out.empty()) out += ", ";
    out += std::to_string(x);
  }
  return out;
}

inline Warning make_warning(const ProgramModel& model, ProblemType problem,
                            std::vector<int> lines, std::string explanation) {
  Warning w;
  w.file = model.file.path;
  w.problem = problem;
  canonicalize_lines(lines);
  w.lines = std::move(lines);
  w.snippet = snippet_for(model.file, w.lines);
  w.explanation = std::move(explanation);
  w.source = "rule";
  return w;
}

}  // namespace detail

inline std::vector<Warning> detect_double_meas(const ProgramModel& model) {
  std::vector<Warning> out;
  for (const auto& circ : model.circuits) {
    std::set<int> pending;  // measured qubits with no intervening gate/reset
    for (const CircuitEvent& ev : circ->events) {
      switch (ev.kind) {
        case EventKind::GateApp:
        case EventKind::Reset:
          if (ev.qubits_symbolic) {
            pending.clear();  // symbolic op may touch any qubit: suppress
          } else {
            for (int q : ev.qubits) pending.erase(q);
          }
          break;
        case EventKind::Measure: {
          if (ev.qubits_symbolic) break;  // never triggers, never sets
          std::set<int> hit;
          for (int q : ev.qubits)
            if (pending.count(q)) hit.insert(q);
          if (!hit.empty())
            out.push_back(detail::make_warning(
                model, ProblemType::DoubleMeas, {ev.line},
                "qubit(s) " + detail::join_ints(hit) +
                    " measured again with no intervening gate or reset"));
          for (int q : ev.qubits) pending.insert(q);
          break;
        }
        default:
          break;
      }
    }
  }
  return out;
}

inline std::vector<Warning> detect_op_after_meas(const ProgramModel& model) {
  std::vector<Warning> out;
  for (const auto& circ : model.circuits) {
    std::set<int> measured;
    for (const CircuitEvent& ev : circ->events) {
      switch (ev.kind) {
        case EventKind::Measure:
          if (!ev.qubits_symbolic)
            for (int q : ev.qubits) measured.insert(q);
          break;
        case EventKind::Reset:
          if (ev.qubits_symbolic) {
            measured.clear();
          } else {
            for (int q : ev.qubits) measured.erase(q);
          }
          break;
        case EventKind::GateApp: {
          if (ev.qubits_symbolic) break;  // symbolic never triggers
          std::set<int> hit;
          for (int q : ev.qubits)
            if (measured.count(q)) hit.insert(q);
          if (!hit.empty())
            out.push_back(detail::make_warning(
                model, ProblemType::OpAfterMeas, {ev.line},
                "gate '" + ev.gate_name + "' applied to already-measured qubit(s) " +
                    detail::join_ints(hit)));
          break;
        }
        default:
          break;
      }
    }
  }
  return out;
}

inline std::vector<Warning> detect_meas_all_abuse(const ProgramModel& model) {
  std::vector<Warning> out;
  for (const auto& circ : model.circuits) {
    auto explicit_cregs = circ->explicit_cregs();
    if (explicit_cregs.empty()) continue;
    for (const CircuitEvent& ev : circ->events)
      if (ev.kind == EventKind::MeasureAll)
        out.push_back(detail::make_warning(
            model, ProblemType::MeasAllAbuse, {ev.line},
            "measure_all() creates a new classical register although register '" +
                explicit_cregs.front()->name + "' already exists"));
  }
  return out;
}

inline std::vector<Warning> detect_cond_wo_meas(const ProgramModel& model) {
  std::vector<Warning> out;
  for (const auto& circ : model.circuits) {
    std::set<int> measured_cregs;  // attachment indices with a prior measure
    bool all_measured = false;
    for (const CircuitEvent& ev : circ->events) {
      if (ev.kind == EventKind::Measure) {
        if (ev.clbits_symbolic) {
          all_measured = true;  // may write anywhere: suppress
          continue;
        }
        for (int c : ev.clbits) {
          for (size_t i = 0; i < circ->cregs.size(); ++i) {
            const Attachment& a = circ->cregs[i];
            if (a.offset >= 0 && a.decl->size >= 0 && c >= a.offset &&
                c < a.offset + a.decl->size)
              measured_cregs.insert(int(i));
          }
        }
      } else if (ev.kind == EventKind::Conditional) {
        if (ev.creg_symbolic || all_measured) continue;
        if (!measured_cregs.count(ev.creg_attach))
          out.push_back(detail::make_warning(
              model, ProblemType::CondWoMeas, {ev.line},
              "conditional '" + ev.gate_name + "' tests classical register '" +
                  ev.creg_name + "' which has no prior measurement"));
      }
    }
  }
  return out;
}

inline std::vector<Warning> detect_const_clas_bit(const ProgramModel& model) {
  std::vector<Warning> out;
  for (const auto& circ : model.circuits) {
    std::set<int> transformed;
    bool all_transformed = circ->derived;  // derived circuits carry history
    for (const CircuitEvent& ev : circ->events) {
      if (ev.kind == EventKind::GateApp) {
        if (ev.qubits_symbolic)
          all_transformed = true;
        else
          for (int q : ev.qubits) transformed.insert(q);
      } else if (ev.kind == EventKind::Measure) {
        if (ev.qubits_symbolic || all_transformed) continue;
        std::set<int> hit;
        for (int q : ev.qubits)
          if (!transformed.count(q)) hit.insert(q);
        if (!hit.empty())
          out.push_back(detail::make_warning(
              model, ProblemType::ConstClasBit, {ev.line},
              "qubit(s) " + detail::join_ints(hit) +
                  " measured without any prior transformation"));
      }
    }
  }
  return out;
}

inline std::vector<Warning> detect_insuff_clas_reg(const ProgramModel& model) {
  std::vector<Warning> out;
  for (const auto& circ : model.circuits) {
    bool whole_reg_fired = false;
    for (const CircuitEvent& ev : circ->events) {
      if (ev.kind != EventKind::Measure || !ev.whole_register) continue;
      if (ev.wr_qreg_size >= 0 && ev.wr_creg_size >= 0 &&
          ev.wr_qreg_size > ev.wr_creg_size) {
        whole_reg_fired = true;
        out.push_back(detail::make_warning(
            model, ProblemType::InsuffClasReg, {ev.line},
            std::to_string(ev.wr_qreg_size) + " qubits measured into a register of " +
                std::to_string(ev.wr_creg_size) + " classical bits"));
      }
    }
    if (whole_reg_fired || circ->clbit_count < 0) continue;
    std::set<int> distinct;
    std::vector<int> lines;
    for (const CircuitEvent& ev : circ->events) {
      if (ev.kind != EventKind::Measure || ev.qubits.empty()) continue;
      for (int q : ev.qubits) distinct.insert(q);
      lines.push_back(ev.line);
    }
    if (int(distinct.size()) > circ->clbit_count)
      out.push_back(detail::make_warning(
          model, ProblemType::InsuffClasReg, lines,
          std::to_string(distinct.size()) + " distinct qubits measured but only " +
              std::to_string(circ->clbit_count) + " classical bits available"));
  }
  return out;
}

inline std::vector<Warning> detect_oversized_circuit(const ProgramModel& model) {
  std::vector<Warning> out;
  for (const auto& circ : model.circuits) {
    if (circ->derived || circ->qubit_count <= 0) continue;
    bool suppressed = false;
    bool uses_all = false;
    std::set<int> used;
    for (const CircuitEvent& ev : circ->events) {
      if (ev.qubits_symbolic) {
        suppressed = true;  // a symbolic ref may use any qubit
        break;
      }
      if (ev.kind == EventKind::MeasureAll) uses_all = true;
      if (ev.kind == EventKind::GateApp || ev.kind == EventKind::Measure)
        for (int q : ev.qubits) used.insert(q);
    }
    if (suppressed || uses_all) continue;
    std::set<int> unused;
    for (int q = 0; q < circ->qubit_count; ++q)
      if (!used.count(q)) unused.insert(q);
    if (!unused.empty())
      out.push_back(detail::make_warning(
          model, ProblemType::OversizedCircuit, {circ->decl_line},
          "qubit(s) " + detail::join_ints(unused) +
              " declared but never used by any gate or measurement"));
  }
  return out;
}

inline std::vector<Warning> detect_ghost_compose(const ProgramModel& model) {
  std::vector<Warning> out;
  for (const auto& circ : model.circuits) {
    for (const CircuitEvent& ev : circ->events) {
      if (ev.kind != EventKind::ComposeCall || ev.inplace) continue;
      if (!ev.result_bound) {
        out.push_back(detail::make_warning(
            model, ProblemType::GhostCompose, {ev.line},
            "compose() result is discarded; the composition has no effect"));
      } else if (!ev.result_used) {
        out.push_back(detail::make_warning(
            model, ProblemType::GhostCompose, {ev.line},
            "compose() result '" + ev.result_var + "' is never used"));
      }
    }
  }
  return out;
}

inline std::vector<Warning> detect_op_after_transp(const ProgramModel& model) {
  std::vector<Warning> out;
  for (const auto& circ : model.circuits) {
    if (!circ->transpiled) continue;
    for (const CircuitEvent& ev : circ->events) {
      if (ev.kind == EventKind::GateApp) {
        out.push_back(detail::make_warning(
            model, ProblemType::OpAfterTransp, {ev.line},
            "gate '" + ev.gate_name + "' applied to transpiled circuit '" +
                circ->var_name + "'"));
      } else if (ev.kind == EventKind::Measure) {
        out.push_back(detail::make_warning(
            model, ProblemType::OpAfterTransp, {ev.line},
            "measurement added to transpiled circuit '" + circ->var_name + "'"));
      }
    }
  }
  return out;
}

inline std::vector<Warning> detect_old_iden_gate(const ProgramModel& model) {
  std::vector<Warning> out;
  for (const auto& circ : model.circuits)
    for (const CircuitEvent& ev : circ->events)
      if (ev.kind == EventKind::IdenCall)
        out.push_back(detail::make_warning(
            model, ProblemType::OldIdenGate, {ev.line},
            "iden() was removed from the circuit API; use id() instead"));
  return out;
}

inline std::vector<Warning> detect_problem(const ProgramModel& model,
                                           ProblemType problem) {
  switch (problem) {
    case ProblemType::DoubleMeas: return detect_double_meas(model);
    case ProblemType::OpAfterMeas: return detect_op_after_meas(model);
    case ProblemType::MeasAllAbuse: return detect_meas_all_abuse(model);
    case ProblemType::CondWoMeas: return detect_cond_wo_meas(model);
    case ProblemType::ConstClasBit: return detect_const_clas_bit(model);
    case ProblemType::InsuffClasReg: return detect_insuff_clas_reg(model);
    case ProblemType::OversizedCircuit: return detect_oversized_circuit(model);
    case ProblemType::GhostCompose: return detect_ghost_compose(model);
    case ProblemType::OpAfterTransp: return detect_op_after_transp(model);
    case ProblemType::OldIdenGate: return detect_old_iden_gate(model);
  }
  return {};
}

/// Runs the selected detectors and returns warnings sorted by
/// (first line, problem name), with exact (problem, lines) duplicates --
/// which arise from loop unrolling -- collapsed.
inline std::vector<Warning> run_detectors(const ProgramModel& model,
                                          const std::vector<ProblemType>& problems) {
  std::vector<Warning> out;
  for (ProblemType p : problems) {
    std::vector<Warning> found = detect_problem(model, p);
    for (Warning& w : found) {
      bool dup = false;
      for (const Warning& prev : out)
        if (prev.problem == w.problem && prev.lines == w.lines) {
          dup = true;
          break;
        }
      if (!dup) out.push_back(std::move(w));
    }
  }
  std::stable_sort(out.begin(), out.end(), warning_order);
  return out;
}

inline std::vector<Warning> run_all_detectors(const ProgramModel& model) {
  return run_detectors(model, std::vector<ProblemType>(kAllProblems.begin(),
                                                       kAllProblems.end()));
}

}  // namespace qlint
