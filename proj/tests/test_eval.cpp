#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "qlint/eval.hpp"
#include "support/table_fixtures.hpp"

using namespace qlint;

namespace {

Warning pred(const std::string& file, ProblemType p, std::vector<int> lines) {
  Warning w;
  w.file = file;
  w.problem = p;
  canonicalize_lines(lines);
  w.lines = std::move(lines);
  return w;
}

GroundTruthEntry truth(const std::string& file, ProblemType p,
                       std::vector<int> lines) {
  GroundTruthEntry e;
  e.file = file;
  e.problem = p;
  canonicalize_lines(lines);
  e.lines = std::move(lines);
  return e;
}

}  // namespace

TEST_CASE("metric identities reproduce the recorded overall rows") {
  for (const auto& row : testfix::overall_rows()) {
    Metrics m = compute_metrics({row.tp, row.fp, row.fn});
    REQUIRE(m.precision_defined);
    REQUIRE(m.recall_defined);
    REQUIRE(m.f1_defined);
    CHECK(format2(m.precision) == row.precision);
    CHECK(format2(m.recall) == row.recall);
    CHECK(format2(m.f1) == row.f1);
  }
}

TEST_CASE("undefined metrics stay undefined instead of collapsing to 0 or 1") {
  Metrics empty = compute_metrics({0, 0, 0});
  CHECK_FALSE(empty.precision_defined);
  CHECK_FALSE(empty.recall_defined);
  CHECK_FALSE(empty.f1_defined);
  CHECK(format_metric(empty.f1_defined, empty.f1) == "n/a");

  Metrics no_truth = compute_metrics({0, 5, 0});
  CHECK(no_truth.precision_defined);
  CHECK(format2(no_truth.precision) == "0.00");
  CHECK_FALSE(no_truth.recall_defined);
  CHECK_FALSE(no_truth.f1_defined);

  Metrics no_preds = compute_metrics({0, 0, 5});
  CHECK_FALSE(no_preds.precision_defined);
  CHECK(no_preds.recall_defined);
  CHECK(format2(no_preds.recall) == "0.00");
  CHECK_FALSE(no_preds.f1_defined);

  // Both defined but zero: harmonic mean has no value either.
  Metrics all_wrong = compute_metrics({0, 5, 5});
  CHECK(all_wrong.precision_defined);
  CHECK(all_wrong.recall_defined);
  CHECK_FALSE(all_wrong.f1_defined);
}

TEST_CASE("matching follows the one-to-one line-intersection rule") {
  SECTION("exact match") {
    MatchResult r = match_warnings({pred("a.py", ProblemType::DoubleMeas, {7})},
                                   {truth("a.py", ProblemType::DoubleMeas, {7})});
    CHECK(r.overall.tp == 1);
    CHECK(r.overall.fp == 0);
    CHECK(r.overall.fn == 0);
  }
  SECTION("intersection suffices") {
    MatchResult r =
        match_warnings({pred("a.py", ProblemType::DoubleMeas, {7, 8})},
                       {truth("a.py", ProblemType::DoubleMeas, {8})});
    CHECK(r.overall.tp == 1);
    CHECK(r.overall.fp == 0);
    CHECK(r.overall.fn == 0);
  }
  SECTION("two predictions cannot share one truth entry") {
    MatchResult r =
        match_warnings({pred("a.py", ProblemType::DoubleMeas, {7}),
                        pred("a.py", ProblemType::DoubleMeas, {7})},
                       {truth("a.py", ProblemType::DoubleMeas, {7})});
    CHECK(r.overall.tp == 1);
    CHECK(r.overall.fp == 1);
    CHECK(r.overall.fn == 0);
  }
  SECTION("problem type must agree") {
    MatchResult r =
        match_warnings({pred("a.py", ProblemType::OpAfterMeas, {7})},
                       {truth("a.py", ProblemType::DoubleMeas, {7})});
    CHECK(r.overall.tp == 0);
    CHECK(r.overall.fp == 1);
    CHECK(r.overall.fn == 1);
  }
  SECTION("file must agree") {
    MatchResult r = match_warnings({pred("a.py", ProblemType::DoubleMeas, {7})},
                                   {truth("b.py", ProblemType::DoubleMeas, {7})});
    CHECK(r.overall.tp == 0);
    CHECK(r.overall.fp == 1);
    CHECK(r.overall.fn == 1);
  }
}

TEST_CASE("predictions are consumed in (file, min-line) order") {
  // The later-listed prediction starts at an earlier line, so it gets first
  // claim on the only truth entry covering both.
  std::vector<Warning> preds = {pred("a.py", ProblemType::DoubleMeas, {5}),
                                pred("a.py", ProblemType::DoubleMeas, {3})};
  std::vector<GroundTruthEntry> truths = {
      truth("a.py", ProblemType::DoubleMeas, {3, 5})};
  MatchResult r = match_warnings(preds, truths);
  CHECK(r.overall.tp == 1);
  CHECK(r.overall.fp == 1);
  REQUIRE_FALSE(r.ledger.empty());
  CHECK(r.ledger.front().rfind("TP DoubleMeas a.py [3]", 0) == 0);
}

TEST_CASE("matching is invariant under truth-list permutation") {
  std::vector<Warning> preds = {pred("a.py", ProblemType::DoubleMeas, {1, 2}),
                                pred("a.py", ProblemType::DoubleMeas, {2})};
  std::vector<GroundTruthEntry> order_a = {
      truth("a.py", ProblemType::DoubleMeas, {1}),
      truth("a.py", ProblemType::DoubleMeas, {2})};
  std::vector<GroundTruthEntry> order_b = {order_a[1], order_a[0]};

  MatchResult ra = match_warnings(preds, order_a);
  MatchResult rb = match_warnings(preds, order_b);
  CHECK(ra.overall.tp == 2);
  CHECK(ra.overall.tp == rb.overall.tp);
  CHECK(ra.overall.fp == rb.overall.fp);
  CHECK(ra.overall.fn == rb.overall.fn);
  CHECK(ra.ledger == rb.ledger);
}

TEST_CASE("count identities hold and per-problem rows sum to overall") {
  std::vector<Warning> preds = {
      pred("a.py", ProblemType::DoubleMeas, {3}),
      pred("a.py", ProblemType::OpAfterMeas, {4}),
      pred("b.py", ProblemType::DoubleMeas, {9}),
      pred("b.py", ProblemType::OldIdenGate, {2}),
  };
  std::vector<GroundTruthEntry> truths = {
      truth("a.py", ProblemType::DoubleMeas, {3}),
      truth("b.py", ProblemType::DoubleMeas, {10}),
      truth("b.py", ProblemType::OldIdenGate, {2}),
  };
  MatchResult r = match_warnings(preds, truths);
  CHECK(r.overall.tp == 2);
  CHECK(r.overall.fp == static_cast<long>(preds.size()) - r.overall.tp);
  CHECK(r.overall.fn == static_cast<long>(truths.size()) - r.overall.tp);

  long tp = 0, fp = 0, fn = 0;
  for (const auto& [p, counts] : r.per_problem) {
    tp += counts.tp;
    fp += counts.fp;
    fn += counts.fn;
  }
  CHECK(tp == r.overall.tp);
  CHECK(fp == r.overall.fp);
  CHECK(fn == r.overall.fn);
  CHECK(r.ledger.size() == 5);  // 2 TP + 2 FP + 1 FN: one line per decision
}

TEST_CASE("truth files round-trip and reject duplicates and empty lines") {
  std::vector<GroundTruthEntry> entries = {
      truth("a.py", ProblemType::DoubleMeas, {3, 7}),
      truth("b.py", ProblemType::OldIdenGate, {2}),
  };
  std::string text = truth_to_jsonl(entries);
  std::vector<GroundTruthEntry> back = truth_from_jsonl(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].file == "a.py");
  CHECK(back[0].problem == ProblemType::DoubleMeas);
  CHECK(back[0].lines == std::vector<int>{3, 7});

  // A prediction file is a valid truth file: extra fields are ignored.
  std::string pred_line =
      R"({"file":"c.py","problem":"DoubleMeas","lines":[4],"snippet":"x",)"
      R"("explanation":"e","source":"rule"})" "\n";
  std::vector<GroundTruthEntry> from_pred = truth_from_jsonl(pred_line);
  REQUIRE(from_pred.size() == 1);
  CHECK(from_pred[0].lines == std::vector<int>{4});

  CHECK_THROWS_AS(truth_from_jsonl(text + text), MalformedResponse);
  CHECK_THROWS_AS(
      truth_from_jsonl(R"({"file":"a.py","problem":"DoubleMeas","lines":[]})"),
      OutOfRange);
  CHECK_THROWS_AS(truth_from_jsonl("not json\n"), MalformedResponse);
}

TEST_CASE("report rendering keeps the published column order and rounding") {
  MatchResult match;
  match.overall = {30, 47, 40};
  MetricsReport report = build_report(match);
  std::string text = render_report(report, ReportFormat::text);
  REQUIRE(text.rfind("Scope", 0) == 0);
  std::size_t header_end = text.find('\n');
  std::string header = text.substr(0, header_end);
  CHECK(header.find("TP") < header.find("FP"));
  CHECK(header.find("FP") < header.find("FN"));
  CHECK(header.find("FN") < header.find("Precision"));
  CHECK(header.find("Precision") < header.find("Recall"));
  CHECK(header.find("Recall") < header.find("F1"));
  std::string row = text.substr(header_end + 1);
  CHECK(row.find("30") != std::string::npos);
  CHECK(row.find("0.39") != std::string::npos);
  CHECK(row.find("0.43") != std::string::npos);
  CHECK(row.find("0.41") != std::string::npos);

  std::string empty_text = render_report(MetricsReport{}, ReportFormat::text);
  CHECK(empty_text.find('\n') == empty_text.size() - 1);  // header only

  std::string structured = render_report(report, ReportFormat::structured);
  auto j = nlohmann::json::parse(structured);
  CHECK(j["overall"]["tp"] == 30);
  CHECK(j["overall"]["precision"] == 0.39);
  CHECK(j["overall"]["f1"] == 0.41);
}

TEST_CASE("per-problem comparison reproduces the recorded table") {
  MatchResult cot_match;
  MatchResult rag_match;
  for (const auto& row : testfix::per_problem_rows()) {
    cot_match.per_problem[row.problem] = {row.cot_tp, row.cot_fp, row.cot_fn};
    rag_match.per_problem[row.problem] = {row.rag_tp, row.rag_fp, row.rag_fn};
  }
  MetricsReport cot = build_report(cot_match);
  MetricsReport rag = build_report(rag_match);

  for (const auto& row : testfix::per_problem_rows()) {
    const Metrics& mc = cot.per_problem.at(row.problem);
    const Metrics& mr = rag.per_problem.at(row.problem);
    INFO("problem " << problem_name(row.problem));
    CHECK(format_metric(mc.precision_defined, mc.precision) == row.expected[0]);
    CHECK(format_metric(mc.recall_defined, mc.recall) == row.expected[1]);
    CHECK(format_metric(mc.f1_defined, mc.f1) == row.expected[2]);
    CHECK(format_metric(mr.precision_defined, mr.precision) == row.expected[3]);
    CHECK(format_metric(mr.recall_defined, mr.recall) == row.expected[4]);
    CHECK(format_metric(mr.f1_defined, mr.f1) == row.expected[5]);
    CHECK(format2(mr.precision - mc.precision) == row.expected[6]);
    CHECK(format2(mr.recall - mc.recall) == row.expected[7]);
    CHECK(format2(mr.f1 - mc.f1) == row.expected[8]);
  }

  std::string table = render_comparison(cot, rag);
  CHECK(table.find("OpAfterTransp") != std::string::npos);
  CHECK(table.find("-0.28") != std::string::npos);  // OpAfterMeas recall delta
  CHECK(table.find("0.19") != std::string::npos);   // DoubleMeas precision delta
}

TEST_CASE("rounding is half-up at two decimals and never prints -0.00") {
  CHECK(format2(2.0 / 3.0) == "0.67");
  CHECK(format2(0.125) == "0.13");
  CHECK(format2(-0.125) == "-0.12");  // half-up rounds toward +inf
  CHECK(format2(18.0 / 26.0 - 25.0 / 36.0) == "0.00");
  CHECK(format2(0.0) == "0.00");
  CHECK(format2(1.0) == "1.00");
  CHECK(format2(0.004999) == "0.00");
}
