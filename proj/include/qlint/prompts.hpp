#pragma once

// Prompt construction for the multi-prompt chain-of-thought analysis.
//
// Each conversation targets exactly one problem type and consists of one
// system prompt plus two user prompts: the first defines the task (problem
// name, description, concrete example, four labeled reasoning steps), the
// second delivers the line-numbered source code. The templates below are
// frozen by golden files under tests/fixtures/prompts/.

#include <string>
#include <string_view>

#include "qlint/errors.hpp"
#include "qlint/problems.hpp"
#include "qlint/source_file.hpp"
#include "qlint/tokencount.hpp"

namespace qlint {

struct PromptBundle {
  std::string system;
  std::string user_strategy;
  std::string user_code;
};

/// Everything the prompt builder needs to know about one problem type.
struct ProblemCatalogEntry {
  ProblemType problem;
  std::string description;     // one-sentence problem description
  std::string static_example;  // generic snippet used when retrieval is off
};

inline ProblemCatalogEntry catalog_entry(ProblemType p) {
  return ProblemCatalogEntry{p, std::string(problem_description(p)),
                             std::string(problem_static_example(p))};
}

/// Prefix every line with its 1-based number ("<i>: <line>"). A trailing
/// newline in the input does not produce a phantom numbered empty line.
inline std::string number_lines(std::string_view source) {
  std::string out;
  out.reserve(source.size() + source.size() / 8 + 16);
  int lineno = 0;
  std::size_t pos = 0;
  while (pos < source.size()) {
    std::size_t nl = source.find('\n', pos);
    std::string_view line = (nl == std::string_view::npos)
                                ? source.substr(pos)
                                : source.substr(pos, nl - pos);
    ++lineno;
    if (lineno > 1) out += '\n';
    out += std::to_string(lineno);
    out += ": ";
    out += line;
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

inline std::string build_system_prompt() {
  return
      "You are a source code linter with expert knowledge in quantum software "
      "and the Qiskit framework. You analyze Python source code for one "
      "specific quantum programming problem at a time. Your final response "
      "must be a single JSON object and nothing else: either "
      "{\"findings\": [...]} when instances of the problem are present, or {} "
      "when the code is free of the problem.";
}

inline std::string build_strategy_prompt(const ProblemCatalogEntry& entry,
                                         std::string_view example) {
  std::string name(problem_name(entry.problem));
  std::string ex(example);
  if (!ex.empty() && ex.back() == '\n') ex.pop_back();
  std::string p;
  p += "Your task is to detect every instance of the quantum programming "
       "problem \"" + name + "\" in the source code that will be provided "
       "in the next message.\n"
       "\n"
       "Problem name: " + name + "\n"
       "Problem description: " + entry.description + "\n"
       "\n"
       "Example of the problem:\n"
       "```python\n" + ex + "\n```\n"
       "\n"
       "Work through the following four steps:\n"
       "1. Strategic Planning: formulate a \"Detection Strategy\" outlining "
       "the conceptual plan to identify the problem, including the primary "
       "API elements and logical checks involved.\n"
       "2. Code Understanding: create a \"Code Summary\" briefly describing "
       "the essential components and operations within the source code.\n"
       "3. Problem Detection Logic: apply the strategy to inspect the code "
       "and identify all instances of the problem.\n"
       "4. Report Results: for each detected case, produce a JSON object "
       "containing the exact code \"snippet\", an array of \"lines\" "
       "numbers, and a detailed \"explanation\". Return the objects in a "
       "JSON array under the key \"findings\", as {\"findings\": [...]}. If "
       "no problems are found, return an empty JSON object {}.";
  return p;
}

inline std::string build_code_prompt(std::string_view numbered_source) {
  std::string p;
  p += "Here is the line-numbered source code to analyze:\n"
       "\n";
  p += numbered_source;
  p += "\n"
       "\n"
       "Analyze the code per the strategy established above and report the "
       "results as specified.";
  return p;
}

inline PromptBundle build_prompts(const ProblemCatalogEntry& entry,
                                  std::string_view example,
                                  std::string_view numbered_source) {
  PromptBundle b;
  b.system = build_system_prompt();
  b.user_strategy = build_strategy_prompt(entry, example);
  b.user_code = build_code_prompt(numbered_source);
  return b;
}

/// Canonical on-disk rendering of a bundle, shared by the golden files and
/// the artifact archive so both diff cleanly.
inline std::string render_bundle(const PromptBundle& b) {
  std::string out;
  out += "=== SYSTEM ===\n";
  out += b.system;
  out += "\n=== USER 1 ===\n";
  out += b.user_strategy;
  out += "\n=== USER 2 ===\n";
  out += b.user_code;
  out += "\n";
  return out;
}

inline int bundle_token_count(const PromptBundle& b) {
  return count_tokens(b.system) + count_tokens(b.user_strategy) +
         count_tokens(b.user_code);
}

/// Fail loudly when the assembled conversation cannot fit the model context;
/// the pipeline never truncates silently.
inline void check_context_budget(const PromptBundle& b, int context_limit) {
  int used = bundle_token_count(b);
  if (used > context_limit) {
    throw ContextOverflow("prompt bundle needs " + std::to_string(used) +
                          " tokens but the model context is " +
                          std::to_string(context_limit));
  }
}

}  // namespace qlint
