#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qlint {

/// The ten quantum programming problems the toolkit detects.
enum class ProblemType {
  DoubleMeas,
  OpAfterMeas,
  MeasAllAbuse,
  CondWoMeas,
  ConstClasBit,
  InsuffClasReg,
  OversizedCircuit,
  GhostCompose,
  OpAfterTransp,
  OldIdenGate,
};

inline constexpr std::array<ProblemType, 10> kAllProblems = {
    ProblemType::DoubleMeas,    ProblemType::OpAfterMeas,
    ProblemType::MeasAllAbuse,  ProblemType::CondWoMeas,
    ProblemType::ConstClasBit,  ProblemType::InsuffClasReg,
    ProblemType::OversizedCircuit, ProblemType::GhostCompose,
    ProblemType::OpAfterTransp, ProblemType::OldIdenGate,
};

/// Stable string names, used in every file format and CLI flag.
inline std::string_view problem_name(ProblemType p) {
  switch (p) {
    case ProblemType::DoubleMeas: return "DoubleMeas";
    case ProblemType::OpAfterMeas: return "OpAfterMeas";
    case ProblemType::MeasAllAbuse: return "MeasAllAbuse";
    case ProblemType::CondWoMeas: return "CondWoMeas";
    case ProblemType::ConstClasBit: return "ConstClasBit";
    case ProblemType::InsuffClasReg: return "InsuffClasReg";
    case ProblemType::OversizedCircuit: return "OversizedCircuit";
    case ProblemType::GhostCompose: return "GhostCompose";
    case ProblemType::OpAfterTransp: return "OpAfterTransp";
    case ProblemType::OldIdenGate: return "OldIdenGate";
  }
  return "";
}

inline std::optional<ProblemType> problem_from_name(std::string_view name) {
  for (ProblemType p : kAllProblems) {
    if (problem_name(p) == name) return p;
  }
  return std::nullopt;
}

inline ProblemType require_problem(std::string_view name) {
  auto p = problem_from_name(name);
  if (!p) throw std::invalid_argument("unknown problem type: " + std::string(name));
  return *p;
}

/// One-sentence description of each problem, shared by the rule engine's
/// warning text, the prompt catalog and the knowledge-base annotation label.
inline std::string_view problem_description(ProblemType p) {
  switch (p) {
    case ProblemType::DoubleMeas:
      return "Two consecutive measurements are performed on the same qubit state.";
    case ProblemType::OpAfterMeas:
      return "A gate is applied to a qubit after it has already been measured.";
    case ProblemType::MeasAllAbuse:
      return "Measurement results are stored in a newly and implicitly created register, "
             "despite the presence of an existing classical register.";
    case ProblemType::CondWoMeas:
      return "A conditional gate is applied without measuring the associated register.";
    case ProblemType::ConstClasBit:
      return "A qubit is measured without undergoing any prior transformation.";
    case ProblemType::InsuffClasReg:
      return "There are not enough classical bits to store the measurement results of all qubits.";
    case ProblemType::OversizedCircuit:
      return "The quantum register includes qubits that remain unused.";
    case ProblemType::GhostCompose:
      return "Two circuits are composed, but the resulting composed circuit is not utilized.";
    case ProblemType::OpAfterTransp:
      return "A gate is applied to the circuit after transpilation.";
    case ProblemType::OldIdenGate:
      return "An identity gate is created using an API that has been removed.";
  }
  return "";
}

/// Generic illustration of each problem, used in prompts when retrieval is
/// disabled or impossible. Kept minimal on purpose: a retrieved example is
/// always preferred.
inline std::string_view problem_static_example(ProblemType p) {
  switch (p) {
    case ProblemType::DoubleMeas:
      return "q = QuantumRegister(1)\n"
             "c = ClassicalRegister(1)\n"
             "qc = QuantumCircuit(q, c)\n"
             "qc.h(0)\n"
             "qc.measure(0, 0)\n"
             "qc.measure(0, 0)  # second measurement of the same qubit state\n";
    case ProblemType::OpAfterMeas:
      return "qc = QuantumCircuit(1, 1)\n"
             "qc.h(0)\n"
             "qc.measure(0, 0)\n"
             "qc.x(0)  # gate applied to an already measured qubit\n";
    case ProblemType::MeasAllAbuse:
      return "q = QuantumRegister(2)\n"
             "c = ClassicalRegister(2)\n"
             "qc = QuantumCircuit(q, c)\n"
             "qc.h(0)\n"
             "qc.measure_all()  # ignores the existing classical register c\n";
    case ProblemType::CondWoMeas:
      return "q = QuantumRegister(1)\n"
             "c = ClassicalRegister(1)\n"
             "qc = QuantumCircuit(q, c)\n"
             "qc.x(0).c_if(c, 1)  # register c was never measured into\n";
    case ProblemType::ConstClasBit:
      return "qc = QuantumCircuit(1, 1)\n"
             "qc.measure(0, 0)  # qubit 0 was never transformed before measuring\n";
    case ProblemType::InsuffClasReg:
      return "q = QuantumRegister(3)\n"
             "c = ClassicalRegister(2)\n"
             "qc = QuantumCircuit(q, c)\n"
             "qc.h(0)\n"
             "qc.measure(q, c)  # 3 qubits measured into 2 classical bits\n";
    case ProblemType::OversizedCircuit:
      return "qc = QuantumCircuit(3, 3)\n"
             "qc.h(0)\n"
             "qc.cx(0, 1)\n"
             "qc.measure(0, 0)\n"
             "qc.measure(1, 1)  # qubit 2 is never used\n";
    case ProblemType::GhostCompose:
      return "qc = QuantumCircuit(2)\n"
             "other = QuantumCircuit(2)\n"
             "other.h(0)\n"
             "qc.compose(other)  # composed circuit is discarded\n";
    case ProblemType::OpAfterTransp:
      return "qc = QuantumCircuit(2, 2)\n"
             "qc.h(0)\n"
             "tqc = transpile(qc)\n"
             "tqc.x(1)  # gate applied after transpilation\n";
    case ProblemType::OldIdenGate:
      return "qc = QuantumCircuit(1)\n"
             "qc.iden(0)  # removed API; use qc.id(0) instead\n";
  }
  return "";
}

}  // namespace qlint
