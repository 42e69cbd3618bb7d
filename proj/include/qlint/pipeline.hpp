#pragma once

// Chain-of-thought analysis pipeline: one conversation per problem type.
//
// Each conversation is system + user (task definition, example, reasoning
// steps) -> assistant strategy, then user (line-numbered code) -> assistant
// findings. Findings referencing lines outside the file are dropped and
// counted in diagnostics, never converted to warnings. Per-problem failures
// are aggregated: the pipeline returns partial results plus an error ledger.

#include <atomic>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "qlint/errors.hpp"
#include "qlint/prompts.hpp"
#include "qlint/providers.hpp"
#include "qlint/rag.hpp"
#include "qlint/response.hpp"
#include "qlint/source_file.hpp"
#include "qlint/warning.hpp"

namespace qlint {

enum class AnalysisMode { cot, rag };

inline std::string_view analysis_source_tag(AnalysisMode mode) {
  return mode == AnalysisMode::cot ? "llm_cot" : "llm_rag";
}

struct PipelineConfig {
  int context_limit = 128000;  // tokens under the configured counter
  int max_concurrency = 4;
};

/// Raw record of one conversation, for the optional artifact archive.
struct Exchange {
  PromptBundle bundle;
  std::string reply_strategy;
  std::string reply_findings;
};

struct PipelineResult {
  std::vector<Warning> warnings;
  std::vector<std::string> errors;       // one per failed problem analysis
  std::vector<std::string> diagnostics;  // dropped findings, RAG fallbacks
};

/// Run the two-turn conversation for one problem against one file.
inline std::vector<Warning> run_problem_analysis(
    ChatProvider& provider, const ProblemCatalogEntry& entry,
    const SourceFile& source, std::string_view example,
    std::string_view source_tag, int context_limit,
    std::vector<std::string>* diagnostics = nullptr,
    Exchange* exchange = nullptr) {
  PromptBundle bundle =
      build_prompts(entry, example, number_lines(source.text));
  check_context_budget(bundle, context_limit);

  std::vector<ChatMessage> messages = {
      {"system", bundle.system},
      {"user", bundle.user_strategy},
  };
  std::string strategy_reply = provider.chat_complete(messages);
  messages.push_back({"assistant", strategy_reply});
  messages.push_back({"user", bundle.user_code});
  std::string findings_reply = provider.chat_complete(messages);

  if (exchange) {
    exchange->bundle = bundle;
    exchange->reply_strategy = strategy_reply;
    exchange->reply_findings = findings_reply;
  }

  std::vector<RawFinding> findings = parse_response(findings_reply);
  std::vector<Warning> warnings;
  for (const RawFinding& f : findings) {
    bool in_range = true;
    for (int line : f.lines) {
      if (line < 1 || line > source.line_count()) {
        in_range = false;
        if (diagnostics) {
          diagnostics->push_back(
              std::string(problem_name(entry.problem)) + " on " + source.path +
              ": dropped finding citing line " + std::to_string(line) +
              " outside 1.." + std::to_string(source.line_count()));
        }
        break;
      }
    }
    if (!in_range) continue;
    Warning w;
    w.file = source.path;
    w.problem = entry.problem;
    w.lines = f.lines;
    canonicalize_lines(w.lines);
    w.snippet = f.snippet;
    w.explanation = f.explanation;
    w.source = std::string(source_tag);
    warnings.push_back(std::move(w));
  }
  return warnings;
}

/// Analyze one file for all ten problems; conversations are independent and
/// run concurrently up to config.max_concurrency. Output ordering, errors and
/// diagnostics are deterministic regardless of scheduling.
inline PipelineResult run_all_problems(ChatProvider& provider,
                                       const SourceFile& source,
                                       AnalysisMode mode,
                                       const RagStore* store = nullptr,
                                       Embedder* embedder = nullptr,
                                       const PipelineConfig& config = {},
                                       std::vector<Exchange>* exchanges = nullptr) {
  if (mode == AnalysisMode::rag && (!store || !embedder)) {
    throw std::invalid_argument(
        "rag mode requires a built knowledge base and an embedder");
  }

  struct Slot {
    std::vector<Warning> warnings;
    std::vector<std::string> errors;
    std::vector<std::string> diagnostics;
    Exchange exchange;
  };
  const int n = static_cast<int>(kAllProblems.size());
  std::vector<Slot> slots(static_cast<std::size_t>(n));

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      ProblemType problem = kAllProblems[static_cast<std::size_t>(i)];
      Slot& slot = slots[static_cast<std::size_t>(i)];
      ProblemCatalogEntry entry = catalog_entry(problem);
      try {
        std::string example =
            mode == AnalysisMode::rag
                ? retrieve_example_for(problem, source.text, *embedder, *store,
                                       &slot.diagnostics)
                : entry.static_example;
        slot.warnings = run_problem_analysis(
            provider, entry, source, example, analysis_source_tag(mode),
            config.context_limit, &slot.diagnostics,
            exchanges ? &slot.exchange : nullptr);
      } catch (const std::exception& e) {
        slot.errors.push_back(std::string(problem_name(problem)) + " on " +
                              source.path + ": " + e.what());
      }
    }
  };

  int threads = std::min(config.max_concurrency, n);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  PipelineResult result;
  for (Slot& slot : slots) {
    for (auto& w : slot.warnings) result.warnings.push_back(std::move(w));
    for (auto& e : slot.errors) result.errors.push_back(std::move(e));
    for (auto& d : slot.diagnostics) result.diagnostics.push_back(std::move(d));
    if (exchanges) exchanges->push_back(std::move(slot.exchange));
  }
  std::stable_sort(result.warnings.begin(), result.warnings.end(),
                   warning_order);
  return result;
}

}  // namespace qlint
