#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "qlint/model.hpp"

using namespace qlint;

namespace {

ProgramModel model_of(const std::string& text) {
  SourceFile f = SourceFile::from_text("mem.py", text);
  return model_from_file(f);
}

}  // namespace

TEST_CASE("registers and circuit construction produce an event model") {
  ProgramModel m = model_of(
      "from qiskit import QuantumCircuit, QuantumRegister, ClassicalRegister\n"
      "q = QuantumRegister(2)\n"
      "c = ClassicalRegister(2)\n"
      "qc = QuantumCircuit(q, c)\n"
      "qc.h(0)\n"
      "qc.measure(q, c)\n");
  REQUIRE(m.circuits.size() == 1);
  const CircuitModel& qc = *m.circuits[0];
  CHECK(qc.var_name == "qc");
  CHECK(qc.qubit_count == 2);
  CHECK(qc.clbit_count == 2);
  CHECK(qc.explicit_cregs().size() == 1);
  REQUIRE(qc.events.size() == 2);
  CHECK(qc.events[0].kind == EventKind::GateApp);
  CHECK(qc.events[0].gate_name == "h");
  CHECK(qc.events[0].qubits == std::vector<int>{0});
  CHECK(qc.events[1].kind == EventKind::Measure);
  CHECK(qc.events[1].qubits == std::vector<int>{0, 1});
  CHECK(qc.events[1].clbits == std::vector<int>{0, 1});
  CHECK(qc.events[1].whole_register);
  CHECK(qc.events[1].wr_qreg_size == 2);
  CHECK(qc.events[1].wr_creg_size == 2);
}

TEST_CASE("file without quantum imports yields no circuits") {
  ProgramModel m = model_of(
      "import numpy as np\n"
      "qc = QuantumCircuit(2)\n"  // not imported: unrecognized
      "qc.h(0)\n");
  CHECK(m.circuits.empty());
}

TEST_CASE("empty file yields an empty model") {
  ProgramModel m = model_of("");
  CHECK(m.circuits.empty());
  CHECK(m.unresolved_count == 0);
}

TEST_CASE("positional constructor creates implicit registers") {
  ProgramModel m = model_of(
      "from qiskit import QuantumCircuit\n"
      "qc = QuantumCircuit(3, 2)\n");
  REQUIRE(m.circuits.size() == 1);
  const CircuitModel& qc = *m.circuits[0];
  CHECK(qc.qubit_count == 3);
  CHECK(qc.clbit_count == 2);
  CHECK(qc.decl_line == 2);
  CHECK(qc.qregs.size() == 1);
  CHECK(qc.cregs.size() == 1);
  CHECK(qc.cregs[0].implicit);
  CHECK(qc.explicit_cregs().empty());  // implicit creg is not "explicit"
}

TEST_CASE("module-qualified and aliased constructors are recognized") {
  ProgramModel m1 = model_of("import qiskit\nqc = qiskit.QuantumCircuit(2)\n");
  CHECK(m1.circuits.size() == 1);
  ProgramModel m2 = model_of(
      "from qiskit import QuantumCircuit as QC\nqc = QC(2)\n");
  CHECK(m2.circuits.size() == 1);
  ProgramModel m3 = model_of("from qiskit import *\nqc = QuantumCircuit(2)\n");
  CHECK(m3.circuits.size() == 1);
  ProgramModel m4 = model_of(
      "import qiskit.circuit as qcirc\nqc = qcirc.QuantumCircuit(2)\n");
  CHECK(m4.circuits.size() == 1);
}

TEST_CASE("loop bodies are modeled twice so loop-carried orderings surface") {
  ProgramModel m = model_of(
      "from qiskit import QuantumCircuit\n"
      "qc = QuantumCircuit(1, 1)\n"
      "while True:\n"
      "    qc.measure(0, 0)\n"
      "    qc.x(0)\n");
  REQUIRE(m.circuits.size() == 1);
  const auto& ev = m.circuits[0]->events;
  REQUIRE(ev.size() == 4);  // 2-unrolling
  CHECK(ev[0].kind == EventKind::Measure);
  CHECK(ev[1].kind == EventKind::GateApp);
  CHECK(ev[2].kind == EventKind::Measure);
  CHECK(ev[3].kind == EventKind::GateApp);
  // The gate at index 1 follows a measure on the same qubit: the loop-carried
  // ordering is visible without any dataflow analysis.
}

TEST_CASE("if and else branches are appended sequentially") {
  ProgramModel m = model_of(
      "from qiskit import QuantumCircuit\n"
      "qc = QuantumCircuit(2)\n"
      "if flag:\n"
      "    qc.h(0)\n"
      "else:\n"
      "    qc.x(1)\n");
  REQUIRE(m.circuits.size() == 1);
  REQUIRE(m.circuits[0]->events.size() == 2);
  CHECK(m.circuits[0]->events[0].gate_name == "h");
  CHECK(m.circuits[0]->events[1].gate_name == "x");
}

TEST_CASE("function bodies are modeled as independent scopes") {
  ProgramModel m = model_of(
      "from qiskit import QuantumCircuit\n"
      "qc = QuantumCircuit(2)\n"
      "qc.h(0)\n"
      "def helper():\n"
      "    inner = QuantumCircuit(1)\n"
      "    inner.x(0)\n"
      "    return inner\n"
      "qc.x(1)\n");
  REQUIRE(m.circuits.size() == 2);
  CHECK(m.circuits[0]->var_name == "qc");
  CHECK(m.circuits[0]->events.size() == 2);
  CHECK(m.circuits[1]->var_name == "inner");
  CHECK(m.circuits[1]->events.size() == 1);
}

TEST_CASE("unclassifiable circuit methods increment unresolved_count") {
  ProgramModel m = model_of(
      "from qiskit import QuantumCircuit\n"
      "qc = QuantumCircuit(2)\n"
      "qc.h(0)\n"
      "qc.mystery_mutation(1)\n"
      "qc.draw()\n");  // known-irrelevant, not counted
  CHECK(m.unresolved_count == 1);
  CHECK(m.circuits[0]->events.size() == 1);
}

TEST_CASE("non-literal qubit indices are recorded as symbolic") {
  ProgramModel m = model_of(
      "from qiskit import QuantumCircuit\n"
      "qc = QuantumCircuit(4)\n"
      "for i in range(4):\n"
      "    qc.h(i)\n");
  const auto& ev = m.circuits[0]->events;
  REQUIRE(ev.size() == 2);
  CHECK(ev[0].qubits_symbolic);
  CHECK(ev[0].qubits.empty());
}

TEST_CASE("literal containers, slices and range calls resolve to flat indices") {
  ProgramModel m = model_of(
      "from qiskit import QuantumCircuit, QuantumRegister\n"
      "q = QuantumRegister(4)\n"
      "qc = QuantumCircuit(q)\n"
      "qc.h([0, 2])\n"
      "qc.x(q[1:3])\n"
      "qc.y(range(2))\n"
      "qc.z(q[-1])\n");
  const auto& ev = m.circuits[0]->events;
  REQUIRE(ev.size() == 4);
  CHECK(ev[0].qubits == std::vector<int>{0, 2});
  CHECK(ev[1].qubits == std::vector<int>{1, 2});
  CHECK(ev[2].qubits == std::vector<int>{0, 1});
  CHECK(ev[3].qubits == std::vector<int>{3});
  for (const auto& e : ev) CHECK_FALSE(e.qubits_symbolic);
}

TEST_CASE("rotation-style gates skip their angle parameters") {
  ProgramModel m = model_of(
      "from qiskit import QuantumCircuit\n"
      "qc = QuantumCircuit(2)\n"
      "qc.rx(0.5, 0)\n"
      "qc.u(0.1, 0.2, 0.3, 1)\n"
      "qc.cx(0, 1)\n");
  const auto& ev = m.circuits[0]->events;
  REQUIRE(ev.size() == 3);
  CHECK(ev[0].qubits == std::vector<int>{0});
  CHECK(ev[1].qubits == std::vector<int>{1});
  CHECK(ev[2].qubits == std::vector<int>{0, 1});
}

TEST_CASE("compose events track binding and later use") {
  ProgramModel discarded = model_of(
      "from qiskit import QuantumCircuit\n"
      "qc = QuantumCircuit(2)\n"
      "other = QuantumCircuit(2)\n"
      "qc.compose(other)\n");
  const CircuitEvent& ev1 = discarded.circuits[0]->events.at(0);
  CHECK(ev1.kind == EventKind::ComposeCall);
  CHECK_FALSE(ev1.result_bound);

  ProgramModel unused = model_of(
      "from qiskit import QuantumCircuit\n"
      "qc = QuantumCircuit(2)\n"
      "other = QuantumCircuit(2)\n"
      "qc2 = qc.compose(other)\n");
  const CircuitEvent& ev2 = unused.circuits[0]->events.at(0);
  CHECK(ev2.result_bound);
  CHECK_FALSE(ev2.result_used);

  ProgramModel used = model_of(
      "from qiskit import QuantumCircuit\n"
      "qc = QuantumCircuit(2)\n"
      "other = QuantumCircuit(2)\n"
      "qc2 = qc.compose(other)\n"
      "qc2.measure_all()\n");
  const CircuitEvent& ev3 = used.circuits[0]->events.at(0);
  CHECK(ev3.result_bound);
  CHECK(ev3.result_used);

  ProgramModel inplace = model_of(
      "from qiskit import QuantumCircuit\n"
      "qc = QuantumCircuit(2)\n"
      "other = QuantumCircuit(2)\n"
      "qc.compose(other, inplace=True)\n");
  CHECK(inplace.circuits[0]->events.at(0).inplace);
}

TEST_CASE("transpile produces an event on the argument and a derived circuit") {
  ProgramModel m = model_of(
      "from qiskit import QuantumCircuit, transpile\n"
      "qc = QuantumCircuit(2, 2)\n"
      "qc.h(0)\n"
      "tqc = transpile(qc)\n"
      "tqc.x(0)\n"
      "qc.x(1)\n");
  REQUIRE(m.circuits.size() == 2);
  const CircuitModel& qc = *m.circuits[0];
  const CircuitModel& tqc = *m.circuits[1];
  CHECK_FALSE(qc.transpiled);
  REQUIRE(qc.events.size() == 3);  // h, TranspileCall, x
  CHECK(qc.events[1].kind == EventKind::TranspileCall);
  CHECK(qc.events[1].arg_var == "qc");
  CHECK(qc.events[1].result_var == "tqc");
  CHECK(tqc.transpiled);
  CHECK(tqc.derived);
  CHECK(tqc.qubit_count == 2);
  REQUIRE(tqc.events.size() == 1);
  CHECK(tqc.events[0].gate_name == "x");
}

TEST_CASE("c_if chains emit a gate application plus a conditional") {
  ProgramModel m = model_of(
      "from qiskit import QuantumCircuit, QuantumRegister, ClassicalRegister\n"
      "q = QuantumRegister(1)\n"
      "c = ClassicalRegister(1)\n"
      "qc = QuantumCircuit(q, c)\n"
      "qc.x(0).c_if(c, 1)\n");
  const auto& ev = m.circuits[0]->events;
  REQUIRE(ev.size() == 2);
  CHECK(ev[0].kind == EventKind::GateApp);
  CHECK(ev[1].kind == EventKind::Conditional);
  CHECK(ev[1].creg_name == "c");
  CHECK(ev[1].gate_name == "x");
  CHECK(ev[1].creg_attach == 0);
  CHECK_FALSE(ev[1].creg_symbolic);
}

TEST_CASE("c_if accepts a flat clbit index in place of a register") {
  ProgramModel m = model_of(
      "from qiskit import QuantumCircuit\n"
      "qc = QuantumCircuit(1, 1)\n"
      "qc.x(0).c_if(0, 1)\n");
  const auto& ev = m.circuits[0]->events;
  REQUIRE(ev.size() == 2);
  CHECK(ev[1].kind == EventKind::Conditional);
  CHECK_FALSE(ev[1].creg_symbolic);
  CHECK(ev[1].creg_attach == 0);
}

TEST_CASE("add_register extends counts and explicit register list") {
  ProgramModel m = model_of(
      "from qiskit import QuantumCircuit, ClassicalRegister\n"
      "qc = QuantumCircuit(2)\n"
      "extra = ClassicalRegister(2, 'meas')\n"
      "qc.add_register(extra)\n");
  const CircuitModel& qc = *m.circuits[0];
  CHECK(qc.clbit_count == 2);
  REQUIRE(qc.explicit_cregs().size() == 1);
  CHECK(qc.explicit_cregs()[0]->name == "meas");
}

TEST_CASE("direct rebinding aliases the same circuit") {
  ProgramModel m = model_of(
      "from qiskit import QuantumCircuit\n"
      "qc = QuantumCircuit(1)\n"
      "alias = qc\n"
      "alias.h(0)\n");
  REQUIRE(m.circuits.size() == 1);
  CHECK(m.circuits[0]->events.size() == 1);
}

TEST_CASE("model construction is deterministic") {
  std::string src =
      "from qiskit import QuantumCircuit\n"
      "qc = QuantumCircuit(2, 2)\n"
      "qc.h(0)\n"
      "qc.measure(0, 0)\n";
  ProgramModel a = model_of(src);
  ProgramModel b = model_of(src);
  REQUIRE(a.circuits.size() == b.circuits.size());
  for (size_t i = 0; i < a.circuits.size(); ++i) {
    REQUIRE(a.circuits[i]->events.size() == b.circuits[i]->events.size());
    for (size_t j = 0; j < a.circuits[i]->events.size(); ++j) {
      CHECK(a.circuits[i]->events[j].kind == b.circuits[i]->events[j].kind);
      CHECK(a.circuits[i]->events[j].line == b.circuits[i]->events[j].line);
    }
  }
}
