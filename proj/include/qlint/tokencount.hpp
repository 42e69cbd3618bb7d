#pragma once

// Token counting for context budgeting and knowledge-base filtering.
//
// The real tokenizer is a provider detail; offline we use a byte-based
// heuristic (four bytes per token, rounded up). Everything that persists a
// token count also records which counter produced it so downstream readers
// can tell heuristic numbers from provider-exact ones.

#include <cstddef>
#include <string_view>

namespace qlint {

/// Name recorded in manifests next to any count produced by count_tokens.
inline constexpr std::string_view kTokenCounterName = "bytes/4-heuristic";

/// Token limit applied both to knowledge-base entries and to query files.
inline constexpr int kTokenLimit = 8192;

/// Heuristic token count: ceil(bytes / 4). Zero for empty text, monotone
/// non-decreasing under append.
inline int count_tokens(std::string_view text) {
  return static_cast<int>((text.size() + 3) / 4);
}

}  // namespace qlint
