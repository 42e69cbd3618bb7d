#pragma once

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qlint/errors.hpp"
#include "qlint/problems.hpp"

namespace qlint {

struct Warning {
  std::string file;
  ProblemType problem = ProblemType::DoubleMeas;
  std::vector<int> lines;  // sorted, unique, non-empty
  std::string snippet;
  std::string explanation;
  std::string source = "rule";  // rule | llm_cot | llm_rag
};

inline void canonicalize_lines(std::vector<int>& lines) {
  std::sort(lines.begin(), lines.end());
  lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
}

inline bool warning_order(const Warning& a, const Warning& b) {
  int la = a.lines.empty() ? 0 : a.lines.front();
  int lb = b.lines.empty() ? 0 : b.lines.front();
  if (la != lb) return la < lb;
  return std::string(problem_name(a.problem)) < problem_name(b.problem);
}

inline nlohmann::ordered_json warning_to_json(const Warning& w) {
  nlohmann::ordered_json j;
  j["file"] = w.file;
  j["problem"] = problem_name(w.problem);
  j["lines"] = w.lines;
  j["snippet"] = w.snippet;
  j["explanation"] = w.explanation;
  j["source"] = w.source;
  return j;
}

inline Warning warning_from_json(const nlohmann::json& j) {
  Warning w;
  w.file = j.at("file").get<std::string>();
  w.problem = require_problem(j.at("problem").get<std::string>());
  w.lines = j.at("lines").get<std::vector<int>>();
  canonicalize_lines(w.lines);
  if (w.lines.empty()) throw OutOfRange("warning record has empty lines");
  if (j.contains("snippet")) w.snippet = j["snippet"].get<std::string>();
  if (j.contains("explanation")) w.explanation = j["explanation"].get<std::string>();
  if (j.contains("source")) w.source = j["source"].get<std::string>();
  return w;
}

inline std::string warnings_to_jsonl(const std::vector<Warning>& warnings) {
  std::string out;
  for (const Warning& w : warnings) {
    out += warning_to_json(w).dump();
    out += '\n';
  }
  return out;
}

inline std::vector<Warning> warnings_from_jsonl(const std::string& text) {
  std::vector<Warning> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw MalformedResponse("bad warning record at line " +
                                  std::to_string(lineno) + ": " + e.what(),
                              line);
    }
    out.push_back(warning_from_json(j));
  }
  return out;
}

inline std::vector<Warning> load_warnings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw OutOfRange("cannot open warning file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return warnings_from_jsonl(buf.str());
}

inline void save_warnings(const std::string& path, const std::vector<Warning>& ws) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw OutOfRange("cannot write warning file: " + path);
  out << warnings_to_jsonl(ws);
}

}  // namespace qlint
