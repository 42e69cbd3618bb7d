#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "qlint/inject.hpp"

using namespace qlint;

namespace {

std::string clean_source(const std::string& name) {
  return SourceFile::load(std::string(QLINT_TEST_DIR) + "/fixtures/clean/" + name)
      .text;
}

/// Detector closure: the mutant must carry exactly one warning of the
/// injected type, sitting exactly on the emitted ground truth.
void check_closure(const InjectionResult& result) {
  ProgramModel model =
      model_from_file(SourceFile::from_text("mutant.py", result.text));
  int hits = 0;
  for (const Warning& w : run_all_detectors(model)) {
    if (w.problem != result.problem) continue;
    ++hits;
    CHECK(w.lines == result.lines);
  }
  CHECK(hits == 1);
}

}  // namespace

TEST_CASE("every problem type injects cleanly into a receptive file") {
  std::string bell = clean_source("bell.py");
  for (ProblemType p : kAllProblems) {
    for (std::uint64_t seed : {0ull, 1ull, 2ull}) {
      INFO("problem " << problem_name(p) << " seed " << seed);
      InjectionResult result = inject(p, bell, seed);
      CHECK(result.problem == p);
      CHECK_FALSE(result.lines.empty());
      CHECK(result.side_effects.empty());
      check_closure(result);
    }
  }
}

TEST_CASE("injection sites follow the seed deterministically") {
  std::string ghz = clean_source("ghz.py");

  InjectionResult again = inject(ProblemType::DoubleMeas, ghz, 0);
  CHECK(inject(ProblemType::DoubleMeas, ghz, 0).text == again.text);
  CHECK(inject(ProblemType::DoubleMeas, ghz, 0).lines == again.lines);

  // ghz.py measures on lines 7..9; the duplicate lands right below its anchor.
  CHECK(inject(ProblemType::DoubleMeas, ghz, 0).lines == std::vector<int>{8});
  CHECK(inject(ProblemType::DoubleMeas, ghz, 1).lines == std::vector<int>{9});
  CHECK(inject(ProblemType::DoubleMeas, ghz, 2).lines == std::vector<int>{10});
  CHECK(inject(ProblemType::DoubleMeas, ghz, 3).lines == std::vector<int>{8});
}

TEST_CASE("capacity faults edit the register literals in place") {
  std::string ghz = clean_source("ghz.py");
  InjectionResult shrunk = inject(ProblemType::InsuffClasReg, ghz, 0);
  CHECK(shrunk.text.find("QuantumCircuit(3, 2)") != std::string::npos);
  CHECK(shrunk.lines == std::vector<int>{7, 8, 9});
  check_closure(shrunk);

  InjectionResult grown = inject(ProblemType::OversizedCircuit, ghz, 0);
  CHECK(grown.text.find("QuantumCircuit(4, 3)") != std::string::npos);
  CHECK(grown.lines == std::vector<int>{3});
  check_closure(grown);

  std::string whole = clean_source("whole_reg.py");
  InjectionResult starved = inject(ProblemType::InsuffClasReg, whole, 0);
  CHECK(starved.text.find("ClassicalRegister(2)") != std::string::npos);
  CHECK(starved.lines == std::vector<int>{9});
  check_closure(starved);

  std::string bell = clean_source("bell.py");
  InjectionResult wider = inject(ProblemType::OversizedCircuit, bell, 0);
  CHECK(wider.text.find("QuantumRegister(3)") != std::string::npos);
  CHECK(wider.lines == std::vector<int>{5});
  check_closure(wider);
}

TEST_CASE("transpile injection adds the import when missing") {
  std::string ghz = clean_source("ghz.py");
  InjectionResult result = inject(ProblemType::OpAfterTransp, ghz, 0);
  CHECK(result.text.rfind("from qiskit import transpile\n", 0) == 0);
  CHECK(result.text.find(" = transpile(qc)") != std::string::npos);
  CHECK(result.lines == std::vector<int>{12});
  check_closure(result);
}

TEST_CASE("compose injection prefers a second circuit when one exists") {
  std::string two = clean_source("two_circuits.py");
  bool saw_cross = false;
  for (std::uint64_t seed : {0ull, 1ull}) {
    InjectionResult result = inject(ProblemType::GhostCompose, two, seed);
    check_closure(result);
    if (result.text.find("second.compose(first)") != std::string::npos)
      saw_cross = true;
  }
  CHECK(saw_cross);
}

TEST_CASE("files without the needed structure are rejected") {
  std::string ghz = clean_source("ghz.py");

  CHECK_THROWS_WITH(inject(ProblemType::MeasAllAbuse, ghz, 0),
                    Catch::Matchers::ContainsSubstring("lacks the structure"));
  CHECK_THROWS_WITH(inject(ProblemType::CondWoMeas, ghz, 0),
                    Catch::Matchers::ContainsSubstring("lacks the structure"));
  CHECK_THROWS_WITH(
      inject(ProblemType::OversizedCircuit, clean_source("whole_reg.py"), 0),
      Catch::Matchers::ContainsSubstring("lacks the structure"));
  CHECK_THROWS_WITH(inject(ProblemType::DoubleMeas, clean_source("no_circuit.py"), 0),
                    Catch::Matchers::ContainsSubstring("no quantum circuits"));

  std::string dirty =
      "from qiskit import QuantumCircuit\n"
      "\n"
      "qc = QuantumCircuit(1, 1)\n"
      "qc.h(0)\n"
      "qc.measure(0, 0)\n"
      "qc.measure(0, 0)\n";
  CHECK_THROWS_WITH(inject(ProblemType::DoubleMeas, dirty, 0),
                    Catch::Matchers::ContainsSubstring("already exhibits"));
}

TEST_CASE("unparsable input propagates as a syntax error") {
  CHECK_THROWS_AS(inject(ProblemType::DoubleMeas, "def broken(:\n", 0),
                  SyntaxError);
}

TEST_CASE("ground truth lines always cite the planted fault") {
  std::string bell = clean_source("bell.py");

  CHECK(inject(ProblemType::CondWoMeas, bell, 0).lines == std::vector<int>{6});
  CHECK(inject(ProblemType::ConstClasBit, bell, 0).lines == std::vector<int>{6});
  CHECK(inject(ProblemType::MeasAllAbuse, bell, 0).lines == std::vector<int>{10});
  CHECK(inject(ProblemType::OldIdenGate, bell, 0).lines == std::vector<int>{10});
  CHECK(inject(ProblemType::GhostCompose, bell, 0).lines == std::vector<int>{10});
  CHECK(inject(ProblemType::InsuffClasReg, bell, 0).lines ==
        std::vector<int>{8, 9});
}
