#pragma once

// Source-to-source identifier obfuscation.
//
// Only user-defined bindings (variables, functions, parameters, classes,
// exception aliases) are renamed. Keywords, builtins, every name introduced
// by an import, attribute/method names, keyword-argument names, and
// string/number literals are preserved, which keeps every quantum-API
// interaction intact. Rewrites go through the byte spans the parser recorded,
// so layout, comments and literals survive untouched.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qlint/ast.hpp"
#include "qlint/lexer.hpp"
#include "qlint/parser.hpp"

namespace qlint {

struct ObfuscationMap {
  std::uint64_t seed = 0;
  std::map<std::string, std::string> renames;
};

namespace obf_detail {

/// One identifier occurrence that can be rewritten in place.
struct Occurrence {
  std::size_t offset = 0;
  std::size_t length = 0;
  std::string name;
};

struct Collector {
  std::set<std::string> bound;       // names introduced by user bindings
  std::set<std::string> preserved;   // never renamed
  std::set<std::string> all_names;   // every identifier spelled anywhere
  std::vector<Occurrence> occurrences;  // rewritable spans

  void note_occurrence(std::size_t offset, const std::string& name) {
    occurrences.push_back({offset, name.size(), name});
    all_names.insert(name);
  }

  /// Collect binding names from an assignment-target pattern.
  void bind_target(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Name:
        bound.insert(e.text);
        break;
      case ExprKind::TupleLit:
      case ExprKind::ListLit:
      case ExprKind::Starred:
        for (const Expr& c : e.children) bind_target(c);
        break;
      default:
        break;  // attribute/subscript targets mutate, they do not bind
    }
  }

  void walk_expr(const Expr& e) {
    if (e.kind == ExprKind::Name) {
      note_occurrence(e.offset, e.text);
    } else if (e.kind == ExprKind::Attribute) {
      preserved.insert(e.text);  // attribute names stay, API calls intact
      all_names.insert(e.text);
    } else if (e.kind == ExprKind::Binary && e.text == ":=" &&
               !e.children.empty() && e.children[0].kind == ExprKind::Name) {
      bound.insert(e.children[0].text);
    } else if (e.kind == ExprKind::Lambda) {
      for (const Param& p : e.lambda_params) {
        bound.insert(p.name);
        note_occurrence(p.offset, p.name);
        if (p.has_default) walk_expr(p.default_value);
      }
    } else if (e.kind == ExprKind::Comprehension) {
      for (const CompClause& c : e.comp_clauses) {
        if (c.target) {
          bind_target(*c.target);
          walk_expr(*c.target);
        }
        if (c.iter) walk_expr(*c.iter);
        for (const Expr& cond : c.conditions) walk_expr(cond);
      }
    }
    for (const Expr& c : e.children) walk_expr(c);
    for (const Kwarg& k : e.kwargs) {
      if (!k.name.empty()) {
        preserved.insert(k.name);  // call-site keyword names stay
        all_names.insert(k.name);
      }
      if (k.value) walk_expr(*k.value);
    }
  }

  void walk_params(const std::vector<Param>& params) {
    for (const Param& p : params) {
      bound.insert(p.name);
      note_occurrence(p.offset, p.name);
      if (p.has_default) walk_expr(p.default_value);
    }
  }

  void walk_stmt(const Stmt& s) {
    switch (s.kind) {
      case StmtKind::Assign:
        for (std::size_t i = 0; i + 1 < s.exprs.size(); ++i) {
          bind_target(s.exprs[i]);
        }
        break;
      case StmtKind::AugAssign:
      case StmtKind::AnnAssign:
      case StmtKind::For:
        if (!s.exprs.empty()) bind_target(s.exprs[0]);
        break;
      case StmtKind::FunctionDef:
      case StmtKind::ClassDef:
        bound.insert(s.name);
        note_occurrence(s.name_offset, s.name);
        walk_params(s.params);
        break;
      case StmtKind::Import:
      case StmtKind::ImportFrom:
        // Everything an import introduces or references is preserved.
        for (const ImportAlias& a : s.aliases) {
          if (!a.asname.empty()) {
            preserved.insert(a.asname);
            all_names.insert(a.asname);
          }
          std::string_view path = a.module;
          while (!path.empty()) {
            std::size_t dot = path.find('.');
            std::string part(path.substr(0, dot));
            if (!part.empty() && part != "*") {
              preserved.insert(part);
              all_names.insert(part);
            }
            if (dot == std::string_view::npos) break;
            path.remove_prefix(dot + 1);
          }
        }
        break;
      case StmtKind::Global:
      case StmtKind::Nonlocal:
        // Declared without rewritable spans; keep such names stable.
        for (const std::string& n : s.names) {
          preserved.insert(n);
          all_names.insert(n);
        }
        break;
      default:
        break;
    }

    for (const Expr& e : s.exprs) walk_expr(e);
    for (const Expr& d : s.decorators) walk_expr(d);
    for (const Expr& b : s.bases) walk_expr(b);
    for (const WithItem& w : s.with_items) {
      walk_expr(w.context);
      if (w.has_target) {
        bind_target(w.target);
        walk_expr(w.target);
      }
    }
    for (const ExceptHandler& h : s.handlers) {
      if (h.has_type) walk_expr(h.type);
      if (!h.name.empty()) {
        bound.insert(h.name);
        note_occurrence(h.name_offset, h.name);
      }
      for (const Stmt& b : h.body) walk_stmt(b);
    }
    for (const Stmt& b : s.body) walk_stmt(b);
    for (const Stmt& b : s.orelse) walk_stmt(b);
    for (const Stmt& b : s.final_body) walk_stmt(b);
  }
};

inline std::uint64_t splitmix64(std::uint64_t& s) {
  s += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace obf_detail

/// Rewrite every rename-map hit through its recorded byte span. Shared by
/// the forward transform and the reversibility audit (apply the inverse map
/// to an obfuscated file to restore the original).
inline std::string apply_renames(std::string_view source,
                                 const std::map<std::string, std::string>& renames) {
  Module mod = parse_source(source);
  obf_detail::Collector collector;
  for (const Stmt& s : mod.body) collector.walk_stmt(s);

  std::vector<obf_detail::Occurrence> hits;
  for (const auto& occ : collector.occurrences) {
    if (renames.count(occ.name)) hits.push_back(occ);
  }
  std::sort(hits.begin(), hits.end(),
            [](const auto& a, const auto& b) { return a.offset < b.offset; });

  std::string out;
  out.reserve(source.size());
  std::size_t pos = 0;
  for (const auto& occ : hits) {
    if (source.substr(occ.offset, occ.length) != occ.name) {
      throw SyntaxError("identifier span out of sync at byte " +
                            std::to_string(occ.offset),
                        0, 0);
    }
    if (occ.offset < pos) continue;  // duplicate record of the same span
    out += source.substr(pos, occ.offset - pos);
    out += renames.at(occ.name);
    pos = occ.offset + occ.length;
  }
  out += source.substr(pos);
  return out;
}

/// Rename all user-defined bindings to seeded random identifiers.
inline std::pair<std::string, ObfuscationMap> obfuscate(std::string_view source,
                                                        std::uint64_t seed) {
  Module mod = parse_source(source);
  obf_detail::Collector collector;
  for (const Stmt& s : mod.body) collector.walk_stmt(s);

  const auto& keywords = python_keywords();
  const auto& builtins = python_builtins();

  std::set<std::string> to_rename;
  for (const std::string& name : collector.bound) {
    if (collector.preserved.count(name)) continue;
    if (keywords.count(name) || builtins.count(name)) continue;
    to_rename.insert(name);
  }

  ObfuscationMap map;
  map.seed = seed;
  std::uint64_t state = seed ^ 0xa0761d6478bd642full;
  static constexpr char kAlphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789";
  std::set<std::string> taken;
  for (const std::string& name : to_rename) {  // sorted: deterministic
    std::string replacement;
    do {
      replacement = "q";
      for (int i = 0; i < 8; ++i) {
        replacement += kAlphabet[obf_detail::splitmix64(state) % 36];
      }
    } while (taken.count(replacement) || collector.all_names.count(replacement) ||
             keywords.count(replacement) || builtins.count(replacement));
    taken.insert(replacement);
    map.renames[name] = replacement;
  }

  return {apply_renames(source, map.renames), map};
}

/// Swap keys and values; valid because the forward map is injective.
inline std::map<std::string, std::string> invert_map(
    const std::map<std::string, std::string>& renames) {
  std::map<std::string, std::string> inverse;
  for (const auto& [from, to] : renames) inverse[to] = from;
  return inverse;
}

inline nlohmann::ordered_json obfuscation_map_to_json(const ObfuscationMap& m) {
  nlohmann::ordered_json j;
  j["seed"] = m.seed;
  j["renames"] = m.renames;
  return j;
}

inline ObfuscationMap obfuscation_map_from_json(const nlohmann::json& j) {
  ObfuscationMap m;
  m.seed = j.at("seed").get<std::uint64_t>();
  m.renames = j.at("renames").get<std::map<std::string, std::string>>();
  return m;
}

}  // namespace qlint
