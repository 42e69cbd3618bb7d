#pragma once

// Structured-response parsing: assistant text -> raw findings.
//
// Accepted shapes, in order of preference:
//   {}                          -> no findings
//   {"findings": [ ... ]}       -> one finding per element
//   [ ... ]                     -> lenient alias for the findings array
// A Markdown code fence around the JSON is tolerated. Every finding must
// carry a string "snippet" and a non-empty integer array "lines";
// "explanation" is optional and defaults to empty. Anything else raises
// MalformedResponse with the offending body attached.

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qlint/errors.hpp"

namespace qlint {

struct RawFinding {
  std::string snippet;
  std::vector<int> lines;
  std::string explanation;
};

namespace detail {

inline std::string_view strip_ws(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// Remove a surrounding Markdown code fence (``` or ```json ... ```).
inline std::string_view strip_code_fence(std::string_view s) {
  if (s.size() < 6 || s.substr(0, 3) != "```") return s;
  std::size_t nl = s.find('\n');
  if (nl == std::string_view::npos) return s;
  std::size_t close = s.rfind("```");
  if (close <= nl) return s;
  return strip_ws(s.substr(nl + 1, close - nl - 1));
}

}  // namespace detail

inline std::vector<RawFinding> parse_response(std::string_view body) {
  std::string_view text = detail::strip_ws(body);
  text = detail::strip_code_fence(text);
  if (text.empty()) {
    throw MalformedResponse("response body contains no JSON object",
                            std::string(body));
  }

  nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    throw MalformedResponse("response body is not valid JSON",
                            std::string(body));
  }

  const nlohmann::json* findings = nullptr;
  if (doc.is_object()) {
    if (doc.empty()) return {};
    auto it = doc.find("findings");
    if (it == doc.end() || !it->is_array()) {
      throw MalformedResponse(
          "response object lacks a \"findings\" array", std::string(body));
    }
    findings = &*it;
  } else if (doc.is_array()) {
    findings = &doc;  // lenient alias: bare findings array
  } else {
    throw MalformedResponse("response JSON is neither object nor array",
                            std::string(body));
  }

  std::vector<RawFinding> out;
  out.reserve(findings->size());
  for (const auto& item : *findings) {
    if (!item.is_object()) {
      throw MalformedResponse("finding is not a JSON object",
                              std::string(body));
    }
    auto snip = item.find("snippet");
    if (snip == item.end() || !snip->is_string()) {
      throw MalformedResponse("finding lacks a string \"snippet\"",
                              std::string(body));
    }
    auto lines_it = item.find("lines");
    if (lines_it == item.end() || !lines_it->is_array() ||
        lines_it->empty()) {
      throw MalformedResponse(
          "finding lacks a non-empty \"lines\" array", std::string(body));
    }
    RawFinding f;
    f.snippet = snip->get<std::string>();
    for (const auto& ln : *lines_it) {
      if (!ln.is_number_integer()) {
        throw MalformedResponse("\"lines\" contains a non-integer",
                                std::string(body));
      }
      f.lines.push_back(ln.get<int>());
    }
    if (auto expl = item.find("explanation");
        expl != item.end() && expl->is_string()) {
      f.explanation = expl->get<std::string>();
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace qlint
