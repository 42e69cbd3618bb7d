#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "qlint/ast.hpp"
#include "qlint/parser.hpp"
#include "qlint/source_file.hpp"

namespace qlint {

enum class RegKind { Quantum, Classical };

struct RegisterDecl {
  std::string name;
  RegKind kind = RegKind::Quantum;
  int size = -1;  // -1 = statically unknown
  int line = 0;
};

enum class EventKind {
  GateApp,
  Measure,
  MeasureAll,
  Reset,
  Conditional,
  ComposeCall,
  TranspileCall,
  IdenCall,
};

inline const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::GateApp: return "GateApp";
    case EventKind::Measure: return "Measure";
    case EventKind::MeasureAll: return "MeasureAll";
    case EventKind::Reset: return "Reset";
    case EventKind::Conditional: return "Conditional";
    case EventKind::ComposeCall: return "ComposeCall";
    case EventKind::TranspileCall: return "TranspileCall";
    case EventKind::IdenCall: return "IdenCall";
  }
  return "?";
}

struct CircuitEvent {
  EventKind kind = EventKind::GateApp;
  int line = 0;
  std::string gate_name;       // GateApp; Conditional's underlying instruction
  std::vector<int> qubits;     // resolved flat qubit indices
  bool qubits_symbolic = false;
  std::vector<int> clbits;     // resolved flat clbit indices (Measure)
  bool clbits_symbolic = false;
  bool whole_register = false;  // Measure of an entire qreg into an entire creg
  int wr_qreg_size = 0;
  int wr_creg_size = 0;
  std::string creg_name;       // Conditional
  int creg_attach = -1;        // Conditional: index into owning circuit's cregs
  bool creg_symbolic = false;
  bool result_bound = false;   // ComposeCall
  bool inplace = false;        // ComposeCall
  bool result_used = false;    // ComposeCall: bound variable read later in scope
  std::string arg_var;         // TranspileCall
  std::string result_var;      // TranspileCall / ComposeCall
};

struct Attachment {
  std::shared_ptr<RegisterDecl> decl;
  int offset = 0;
  bool implicit = false;  // created by positional QuantumCircuit(n, m) counts
};

struct CircuitModel {
  std::string var_name;
  int decl_line = 0;
  int qubit_count = -1;  // -1 = statically unknown
  int clbit_count = -1;
  bool derived = false;    // produced by compose/transpile rather than a constructor
  bool transpiled = false; // bound from a transpile() result
  std::vector<Attachment> qregs;
  std::vector<Attachment> cregs;
  std::vector<CircuitEvent> events;

  std::vector<std::shared_ptr<RegisterDecl>> explicit_cregs() const {
    std::vector<std::shared_ptr<RegisterDecl>> out;
    for (const auto& a : cregs)
      if (!a.implicit) out.push_back(a.decl);
    return out;
  }
};

struct ProgramModel {
  SourceFile file;
  std::vector<std::shared_ptr<CircuitModel>> circuits;
  int unresolved_count = 0;
};

// Leading non-qubit (angle/phase) parameter count per recognized gate method.
inline const std::unordered_map<std::string, int>& gate_param_counts() {
  static const std::unordered_map<std::string, int> table = {
      {"h", 0},     {"x", 0},    {"y", 0},    {"z", 0},    {"s", 0},
      {"sdg", 0},   {"t", 0},    {"tdg", 0},  {"sx", 0},   {"sxdg", 0},
      {"i", 0},     {"id", 0},   {"cx", 0},   {"cnot", 0}, {"cy", 0},
      {"cz", 0},    {"ch", 0},   {"csx", 0},  {"swap", 0}, {"cswap", 0},
      {"iswap", 0}, {"dcx", 0},  {"ccx", 0},  {"toffoli", 0}, {"ccz", 0},
      {"ecr", 0},   {"fredkin", 0}, {"mcx", 0},
      {"rx", 1},    {"ry", 1},   {"rz", 1},   {"p", 1},    {"u1", 1},
      {"crx", 1},   {"cry", 1},  {"crz", 1},  {"cp", 1},   {"cu1", 1},
      {"rxx", 1},   {"ryy", 1},  {"rzz", 1},  {"rzx", 1},
      {"u2", 2},    {"r", 2},
      {"u3", 3},    {"u", 3},    {"cu3", 3},
      {"cu", 4},
  };
  return table;
}

// Circuit methods that neither mutate quantum state nor affect any detector.
inline const std::unordered_set<std::string>& ignored_circuit_methods() {
  static const std::unordered_set<std::string> table = {
      "barrier",      "delay",        "draw",          "depth",
      "size",         "width",        "count_ops",     "qasm",
      "decompose",    "copy",         "copy_empty_like", "to_gate",
      "to_instruction", "inverse",    "bind_parameters", "assign_parameters",
      "reverse_bits", "reverse_ops",  "num_connected_components",
      "save_statevector", "snapshot", "remove_final_measurements",
  };
  return table;
}

/// Builds the circuit-event model from a parsed module. Statements are
/// visited in lexical order; if/elif/else branches are appended sequentially
/// (union semantics); loop bodies are appended twice so loop-carried
/// measure-then-gate orderings surface; module top level and every function
/// or class body form independent scopes with no interprocedural analysis.
class ModelBuilder {
 public:
  ProgramModel build(const Module& mod, const SourceFile& file) {
    program_ = ProgramModel{};
    program_.file = file;
    module_aliases_.clear();
    entity_aliases_.clear();
    wildcard_qiskit_ = false;
    prescan_imports(mod.body);
    Scope top;
    process_block(mod.body, top);
    return std::move(program_);
  }

 private:
  struct Binding {
    enum Kind { Circuit, Reg, Other } kind = Other;
    std::shared_ptr<CircuitModel> circ;
    std::shared_ptr<RegisterDecl> reg;
    CircuitModel* pending_owner = nullptr;  // ComposeCall awaiting a use
    size_t pending_idx = 0;
  };

  struct Scope {
    std::map<std::string, Binding> names;
  };

  struct ValueInfo {
    enum Kind {
      None,
      NewCircuit,
      NewReg,
      AliasCircuit,
      AliasReg,
      ComposeResult,
      TranspileResult,
      EmittedEvent,
    } kind = None;
    std::shared_ptr<CircuitModel> circ;      // new/aliased circuit, or event owner
    std::shared_ptr<RegisterDecl> reg;
    CircuitModel* event_owner = nullptr;
    size_t event_idx = 0;
    std::shared_ptr<CircuitModel> transpile_arg;
  };

  struct BitList {
    std::vector<int> idx;
    bool symbolic = false;
  };

  // ---- import handling ----

  static bool is_quantum_module(const std::string& dotted) {
    return dotted == "qiskit" || dotted.rfind("qiskit.", 0) == 0;
  }

  static bool is_known_entity(const std::string& name) {
    return name == "QuantumCircuit" || name == "QuantumRegister" ||
           name == "ClassicalRegister" || name == "transpile";
  }

  void prescan_imports(const std::vector<Stmt>& body) {
    for (const Stmt& s : body) {
      if (s.kind == StmtKind::Import) {
        for (const auto& a : s.aliases) {
          if (!is_quantum_module(a.module)) continue;
          if (a.asname.empty()) {
            // `import qiskit.compiler` binds the top package name.
            std::string top = a.module.substr(0, a.module.find('.'));
            module_aliases_[top] = top;
          } else {
            module_aliases_[a.asname] = a.module;
          }
        }
      } else if (s.kind == StmtKind::ImportFrom) {
        if (is_quantum_module(s.from_module)) {
          for (const auto& a : s.aliases) {
            if (a.module == "*") {
              wildcard_qiskit_ = true;
            } else if (is_known_entity(a.module)) {
              entity_aliases_[a.asname.empty() ? a.module : a.asname] = a.module;
            }
          }
        }
      }
      prescan_imports(s.body);
      prescan_imports(s.orelse);
      prescan_imports(s.final_body);
      for (const auto& h : s.handlers) prescan_imports(h.body);
    }
  }

  // Canonical qiskit entity named by a callee expression, or "" if none.
  std::string classify_callee(const Expr& e) const {
    if (e.kind == ExprKind::Name) {
      auto it = entity_aliases_.find(e.text);
      if (it != entity_aliases_.end()) return it->second;
      if (wildcard_qiskit_ && is_known_entity(e.text)) return e.text;
      return "";
    }
    if (e.kind == ExprKind::Attribute) {
      // Flatten a pure Name/Attribute chain into dotted segments.
      std::vector<std::string> segs;
      const Expr* cur = &e;
      while (cur->kind == ExprKind::Attribute) {
        segs.push_back(cur->text);
        cur = &cur->children[0];
      }
      if (cur->kind != ExprKind::Name) return "";
      auto it = module_aliases_.find(cur->text);
      if (it == module_aliases_.end()) return "";
      if (!is_quantum_module(it->second)) return "";
      const std::string& last = segs.front();  // outermost attribute
      return is_known_entity(last) ? last : "";
    }
    return "";
  }

  // ---- literal helpers ----

  static std::optional<long> int_literal(const Expr& e) {
    const Expr* n = &e;
    long sign = 1;
    while (n->kind == ExprKind::Unary && (n->text == "-" || n->text == "+")) {
      if (n->text == "-") sign = -sign;
      n = &n->children[0];
    }
    if (n->kind != ExprKind::Num) return std::nullopt;
    std::string digits;
    for (char c : n->text)
      if (c != '_') digits += c;
    if (digits.find('.') != std::string::npos ||
        digits.find('j') != std::string::npos ||
        digits.find('J') != std::string::npos)
      return std::nullopt;
    // Hex/oct/bin exponents: 1e3 is a float spelling, reject on 'e' unless hex.
    bool hex = digits.size() > 1 && (digits[1] == 'x' || digits[1] == 'X');
    if (!hex && (digits.find('e') != std::string::npos ||
                 digits.find('E') != std::string::npos))
      return std::nullopt;
    try {
      return sign * std::stol(digits, nullptr, 0);
    } catch (...) {
      return std::nullopt;
    }
  }

  static std::optional<std::string> str_literal(const Expr& e) {
    if (e.kind != ExprKind::Str) return std::nullopt;
    std::string s = e.text;
    size_t i = 0;
    while (i < s.size() && s[i] != '\'' && s[i] != '"') ++i;  // skip prefix
    if (i >= s.size()) return std::nullopt;
    char q = s[i];
    size_t body = i + 1, len = s.size() - i - 2;
    if (s.size() >= i + 6 && s[i + 1] == q && s[i + 2] == q) {
      body = i + 3;
      len = s.size() - i - 6;
    }
    if (body + len > s.size()) return std::nullopt;
    return s.substr(body, len);
  }

  // ---- binding / read tracking ----

  Binding* lookup(Scope& scope, const std::string& name) {
    auto it = scope.names.find(name);
    return it == scope.names.end() ? nullptr : &it->second;
  }

  void log_reads(const Expr& e, Scope& scope) {
    if (e.kind == ExprKind::Name) {
      if (Binding* b = lookup(scope, e.text)) {
        if (b->pending_owner)
          b->pending_owner->events[b->pending_idx].result_used = true;
      }
      return;
    }
    for (const Expr& c : e.children) log_reads(c, scope);
    for (const Kwarg& kw : e.kwargs)
      if (kw.value) log_reads(*kw.value, scope);
    for (const CompClause& cc : e.comp_clauses) {
      if (cc.iter) log_reads(*cc.iter, scope);
      for (const Expr& cond : cc.conditions) log_reads(cond, scope);
    }
    if (e.kind == ExprKind::Lambda)
      for (const Param& p : e.lambda_params)
        if (p.has_default) log_reads(p.default_value, scope);
  }

  // ---- register / bit resolution ----

  std::shared_ptr<RegisterDecl> make_register(const Expr& call, RegKind kind,
                                              const std::string& target_hint) {
    auto decl = std::make_shared<RegisterDecl>();
    decl->kind = kind;
    decl->line = call.line;
    decl->name = target_hint.empty()
                     ? (kind == RegKind::Quantum ? "q" : "c")
                     : target_hint;
    if (call.children.size() > 1) {
      if (auto n = int_literal(call.children[1])) decl->size = int(*n);
    }
    if (call.children.size() > 2) {
      if (auto s = str_literal(call.children[2])) decl->name = *s;
    }
    for (const Kwarg& kw : call.kwargs) {
      if (kw.name == "size" && kw.value) {
        if (auto n = int_literal(*kw.value)) decl->size = int(*n);
      } else if (kw.name == "name" && kw.value) {
        if (auto s = str_literal(*kw.value)) decl->name = *s;
      }
    }
    return decl;
  }

  const Attachment* find_attachment(const std::vector<Attachment>& regs,
                                    const RegisterDecl* decl) const {
    for (const auto& a : regs)
      if (a.decl.get() == decl) return &a;
    return nullptr;
  }

  // Resolves one qubit/clbit argument expression against a circuit: integer
  // literals, whole registers, register elements/slices, literal containers,
  // range() calls and circuit .qubits/.clbits subscripts. Everything else is
  // symbolic.
  BitList resolve_bits(const Expr& e, CircuitModel& circ, RegKind kind,
                       Scope& scope, const RegisterDecl** whole_reg = nullptr) {
    const std::vector<Attachment>& regs =
        kind == RegKind::Quantum ? circ.qregs : circ.cregs;
    int total = kind == RegKind::Quantum ? circ.qubit_count : circ.clbit_count;
    BitList out;

    auto flat = [&](long v) -> std::optional<int> {
      if (v < 0) {
        if (total < 0) return std::nullopt;
        v += total;
      }
      return int(v);
    };

    if (auto n = int_literal(e)) {
      if (auto f = flat(*n))
        out.idx.push_back(*f);
      else
        out.symbolic = true;
      return out;
    }

    if (e.kind == ExprKind::Name) {
      Binding* b = lookup(scope, e.text);
      if (b && b->kind == Binding::Reg && b->reg->kind == kind) {
        const Attachment* a = find_attachment(regs, b->reg.get());
        if (a && a->decl->size >= 0) {
          for (int i = 0; i < a->decl->size; ++i) out.idx.push_back(a->offset + i);
          if (whole_reg) *whole_reg = a->decl.get();
          return out;
        }
      }
      out.symbolic = true;
      return out;
    }

    if (e.kind == ExprKind::Subscript) {
      const Expr& base = e.children[0];
      const Expr& index = e.children[1];
      int offset = -1, span = -1;
      if (base.kind == ExprKind::Name) {
        Binding* b = lookup(scope, base.text);
        if (b && b->kind == Binding::Reg && b->reg->kind == kind) {
          if (const Attachment* a = find_attachment(regs, b->reg.get())) {
            offset = a->offset;
            span = a->decl->size;
          }
        }
      } else if (base.kind == ExprKind::Attribute &&
                 base.text == (kind == RegKind::Quantum ? "qubits" : "clbits") &&
                 base.children[0].kind == ExprKind::Name) {
        Binding* b = lookup(scope, base.children[0].text);
        if (b && b->kind == Binding::Circuit && b->circ.get() == &circ) {
          offset = 0;
          span = total;
        }
      }
      if (offset < 0) {
        out.symbolic = true;
        return out;
      }
      auto local = [&](long v) -> std::optional<int> {
        if (v < 0) {
          if (span < 0) return std::nullopt;
          v += span;
        }
        return int(v);
      };
      if (auto n = int_literal(index)) {
        if (auto l = local(*n))
          out.idx.push_back(offset + *l);
        else
          out.symbolic = true;
        return out;
      }
      if (index.kind == ExprKind::SliceExpr && span >= 0) {
        long lo = 0, hi = span, step = 1;
        const Expr& e_lo = index.children[0];
        const Expr& e_hi = index.children[1];
        const Expr& e_st = index.children[2];
        bool ok = true;
        if (e_lo.kind != ExprKind::Empty) {
          auto v = int_literal(e_lo);
          if (v)
            lo = *v < 0 ? *v + span : *v;
          else
            ok = false;
        }
        if (e_hi.kind != ExprKind::Empty) {
          auto v = int_literal(e_hi);
          if (v)
            hi = *v < 0 ? *v + span : *v;
          else
            ok = false;
        }
        if (e_st.kind != ExprKind::Empty) {
          auto v = int_literal(e_st);
          if (v && *v > 0)
            step = *v;
          else
            ok = false;
        }
        if (ok) {
          lo = std::max(0L, lo);
          hi = std::min(long(span), hi);
          for (long i = lo; i < hi; i += step) out.idx.push_back(offset + int(i));
        } else {
          out.symbolic = true;
        }
        return out;
      }
      out.symbolic = true;
      return out;
    }

    if (e.kind == ExprKind::ListLit || e.kind == ExprKind::TupleLit ||
        e.kind == ExprKind::SetLit) {
      for (const Expr& item : e.children) {
        BitList part = resolve_bits(item, circ, kind, scope);
        out.symbolic = out.symbolic || part.symbolic;
        out.idx.insert(out.idx.end(), part.idx.begin(), part.idx.end());
      }
      return out;
    }

    if (e.kind == ExprKind::Call && e.children[0].kind == ExprKind::Name &&
        e.children[0].text == "range" && e.kwargs.empty()) {
      std::vector<long> vals;
      bool ok = e.children.size() >= 2 && e.children.size() <= 4;
      for (size_t i = 1; ok && i < e.children.size(); ++i) {
        auto v = int_literal(e.children[i]);
        if (v)
          vals.push_back(*v);
        else
          ok = false;
      }
      if (ok) {
        long lo = 0, hi = 0, step = 1;
        if (vals.size() == 1) {
          hi = vals[0];
        } else {
          lo = vals[0];
          hi = vals[1];
          if (vals.size() == 3) step = vals[2];
        }
        if (step > 0) {
          for (long i = lo; i < hi; i += step) out.idx.push_back(int(i));
          return out;
        }
      }
      out.symbolic = true;
      return out;
    }

    out.symbolic = true;
    return out;
  }

  // ---- circuit construction ----

  void attach_register(CircuitModel& circ, std::shared_ptr<RegisterDecl> decl,
                       bool implicit) {
    auto& list = decl->kind == RegKind::Quantum ? circ.qregs : circ.cregs;
    int& total = decl->kind == RegKind::Quantum ? circ.qubit_count : circ.clbit_count;
    Attachment a;
    a.decl = std::move(decl);
    a.implicit = implicit;
    if (total >= 0 && a.decl->size >= 0) {
      a.offset = total;
      total += a.decl->size;
    } else {
      total = -1;
      a.offset = -1;
    }
    list.push_back(std::move(a));
  }

  std::shared_ptr<CircuitModel> construct_circuit(const Expr& call, Scope& scope,
                                                  const std::string& target_hint,
                                                  int line) {
    auto circ = std::make_shared<CircuitModel>();
    circ->var_name = target_hint;
    circ->decl_line = line;
    circ->qubit_count = 0;
    circ->clbit_count = 0;
    int positional_ints = 0;
    for (size_t i = 1; i < call.children.size(); ++i) {
      const Expr& arg = call.children[i];
      if (auto n = int_literal(arg)) {
        ++positional_ints;
        auto decl = std::make_shared<RegisterDecl>();
        decl->size = int(*n);
        decl->line = line;
        if (positional_ints == 1) {
          decl->kind = RegKind::Quantum;
          decl->name = "q";
        } else {
          decl->kind = RegKind::Classical;
          decl->name = "c";
        }
        attach_register(*circ, std::move(decl), /*implicit=*/true);
        continue;
      }
      if (arg.kind == ExprKind::Name) {
        Binding* b = lookup(scope, arg.text);
        if (b && b->kind == Binding::Reg) {
          attach_register(*circ, b->reg, /*implicit=*/false);
          continue;
        }
      }
      if (arg.kind == ExprKind::Call) {
        std::string entity = classify_callee(arg.children[0]);
        if (entity == "QuantumRegister" || entity == "ClassicalRegister") {
          auto decl = make_register(arg, entity == "QuantumRegister"
                                             ? RegKind::Quantum
                                             : RegKind::Classical,
                                    "");
          attach_register(*circ, std::move(decl), /*implicit=*/false);
          continue;
        }
      }
      // Unresolvable constructor argument: sizes become unknown.
      circ->qubit_count = -1;
      circ->clbit_count = -1;
    }
    program_.circuits.push_back(circ);
    return circ;
  }

  std::shared_ptr<CircuitModel> derive_circuit(const CircuitModel* base,
                                               const std::string& target,
                                               int line, bool transpiled) {
    auto circ = std::make_shared<CircuitModel>();
    circ->var_name = target;
    circ->decl_line = line;
    circ->derived = true;
    circ->transpiled = transpiled;
    if (base) {
      circ->qubit_count = base->qubit_count;
      circ->clbit_count = base->clbit_count;
      circ->qregs = base->qregs;
      circ->cregs = base->cregs;
    }
    program_.circuits.push_back(circ);
    return circ;
  }

  // ---- method-call event emission ----

  ValueInfo handle_method_call(const Expr& call, Scope& scope) {
    const Expr& attr = call.children[0];
    const std::string& method = attr.text;
    const Expr& recv = attr.children[0];
    if (recv.kind != ExprKind::Name) return {};
    Binding* b = lookup(scope, recv.text);
    if (!b || b->kind != Binding::Circuit) return {};
    CircuitModel& circ = *b->circ;
    int line = attr.line;
    ValueInfo vi;

    auto push_event = [&](CircuitEvent ev) {
      circ.events.push_back(std::move(ev));
      vi.kind = ValueInfo::EmittedEvent;
      vi.circ = b->circ;
      vi.event_owner = &circ;
      vi.event_idx = circ.events.size() - 1;
    };

    auto gate_it = gate_param_counts().find(method);
    if (gate_it != gate_param_counts().end()) {
      CircuitEvent ev;
      ev.kind = EventKind::GateApp;
      ev.gate_name = method;
      ev.line = line;
      size_t skip = size_t(gate_it->second);
      size_t first_qubit = 1 + skip;
      if (call.children.size() <= first_qubit) {
        ev.qubits_symbolic = true;  // no resolvable operand list
      } else {
        for (size_t i = first_qubit; i < call.children.size(); ++i) {
          BitList part = resolve_bits(call.children[i], circ, RegKind::Quantum, scope);
          ev.qubits_symbolic = ev.qubits_symbolic || part.symbolic;
          ev.qubits.insert(ev.qubits.end(), part.idx.begin(), part.idx.end());
        }
      }
      push_event(std::move(ev));
      return vi;
    }

    if (method == "measure") {
      CircuitEvent ev;
      ev.kind = EventKind::Measure;
      ev.line = line;
      const Expr* qarg = call.children.size() > 1 ? &call.children[1] : nullptr;
      const Expr* carg = call.children.size() > 2 ? &call.children[2] : nullptr;
      for (const Kwarg& kw : call.kwargs) {
        if (!kw.value) continue;
        if (kw.name == "qubit") qarg = kw.value.get();
        if (kw.name == "cbit" || kw.name == "clbit") carg = kw.value.get();
      }
      const RegisterDecl* whole_q = nullptr;
      const RegisterDecl* whole_c = nullptr;
      if (qarg) {
        BitList part = resolve_bits(*qarg, circ, RegKind::Quantum, scope, &whole_q);
        ev.qubits = std::move(part.idx);
        ev.qubits_symbolic = part.symbolic;
      } else {
        ev.qubits_symbolic = true;
      }
      if (carg) {
        BitList part = resolve_bits(*carg, circ, RegKind::Classical, scope, &whole_c);
        ev.clbits = std::move(part.idx);
        ev.clbits_symbolic = part.symbolic;
      } else {
        ev.clbits_symbolic = true;
      }
      if (whole_q && whole_c) {
        ev.whole_register = true;
        ev.wr_qreg_size = whole_q->size;
        ev.wr_creg_size = whole_c->size;
      }
      push_event(std::move(ev));
      return vi;
    }

    if (method == "measure_all") {
      CircuitEvent ev;
      ev.kind = EventKind::MeasureAll;
      ev.line = line;
      push_event(std::move(ev));
      return vi;
    }

    if (method == "reset") {
      CircuitEvent ev;
      ev.kind = EventKind::Reset;
      ev.line = line;
      if (call.children.size() > 1) {
        BitList part = resolve_bits(call.children[1], circ, RegKind::Quantum, scope);
        ev.qubits = std::move(part.idx);
        ev.qubits_symbolic = part.symbolic;
      } else {
        ev.qubits_symbolic = true;
      }
      push_event(std::move(ev));
      return vi;
    }

    if (method == "iden") {
      CircuitEvent ev;
      ev.kind = EventKind::IdenCall;
      ev.line = line;
      push_event(std::move(ev));
      return vi;
    }

    if (method == "compose") {
      CircuitEvent ev;
      ev.kind = EventKind::ComposeCall;
      ev.line = line;
      for (const Kwarg& kw : call.kwargs)
        if (kw.name == "inplace" && kw.value &&
            kw.value->kind == ExprKind::BoolLit && kw.value->text == "True")
          ev.inplace = true;
      push_event(std::move(ev));
      vi.kind = ValueInfo::ComposeResult;
      return vi;
    }

    if (method == "append" || method == "initialize" || method == "unitary") {
      // Gate-like mutators: the qubit operand is the second argument
      // (append(instr, qargs), initialize(state, qubits), unitary(m, qubits)).
      CircuitEvent ev;
      ev.kind = EventKind::GateApp;
      ev.gate_name = method;
      ev.line = line;
      const Expr* qarg = call.children.size() > 2 ? &call.children[2] : nullptr;
      for (const Kwarg& kw : call.kwargs)
        if ((kw.name == "qargs" || kw.name == "qubits") && kw.value)
          qarg = kw.value.get();
      if (qarg) {
        BitList part = resolve_bits(*qarg, circ, RegKind::Quantum, scope);
        ev.qubits = std::move(part.idx);
        ev.qubits_symbolic = part.symbolic;
      } else if (method == "initialize" && circ.qubit_count > 0) {
        for (int i = 0; i < circ.qubit_count; ++i) ev.qubits.push_back(i);
      } else {
        ev.qubits_symbolic = true;
      }
      push_event(std::move(ev));
      return vi;
    }

    if (method == "add_register") {
      for (size_t i = 1; i < call.children.size(); ++i) {
        const Expr& arg = call.children[i];
        if (arg.kind == ExprKind::Name) {
          Binding* rb = lookup(scope, arg.text);
          if (rb && rb->kind == Binding::Reg) {
            attach_register(circ, rb->reg, /*implicit=*/false);
            continue;
          }
        }
        if (arg.kind == ExprKind::Call) {
          std::string entity = classify_callee(arg.children[0]);
          if (entity == "QuantumRegister" || entity == "ClassicalRegister") {
            attach_register(circ,
                            make_register(arg, entity == "QuantumRegister"
                                                   ? RegKind::Quantum
                                                   : RegKind::Classical,
                                          ""),
                            /*implicit=*/false);
            continue;
          }
        }
        ++program_.unresolved_count;
      }
      return vi;
    }

    if (method == "c_if") return vi;  // handled by the caller on call chains

    if (ignored_circuit_methods().count(method)) return vi;

    ++program_.unresolved_count;  // circuit method we cannot classify
    return vi;
  }

  // Resolve the first c_if argument to a classical register of the circuit.
  void resolve_creg_ref(const Expr& e, CircuitModel& circ, Scope& scope,
                        CircuitEvent& ev) {
    ev.creg_symbolic = true;
    const RegisterDecl* decl = nullptr;
    if (e.kind == ExprKind::Name) {
      Binding* b = lookup(scope, e.text);
      if (b && b->kind == Binding::Reg && b->reg->kind == RegKind::Classical)
        decl = b->reg.get();
    } else if (e.kind == ExprKind::Subscript &&
               e.children[0].kind == ExprKind::Name) {
      Binding* b = lookup(scope, e.children[0].text);
      if (b && b->kind == Binding::Reg && b->reg->kind == RegKind::Classical)
        decl = b->reg.get();
    } else if (auto n = int_literal(e)) {
      long v = *n;
      if (v < 0 && circ.clbit_count >= 0) v += circ.clbit_count;
      for (size_t i = 0; i < circ.cregs.size(); ++i) {
        const Attachment& a = circ.cregs[i];
        if (a.offset >= 0 && a.decl->size >= 0 && v >= a.offset &&
            v < a.offset + a.decl->size) {
          ev.creg_attach = int(i);
          ev.creg_name = a.decl->name;
          ev.creg_symbolic = false;
          return;
        }
      }
      return;
    }
    if (!decl) return;
    for (size_t i = 0; i < circ.cregs.size(); ++i) {
      if (circ.cregs[i].decl.get() == decl) {
        ev.creg_attach = int(i);
        ev.creg_name = decl->name;
        ev.creg_symbolic = false;
        return;
      }
    }
  }

  // ---- value dispatch ----

  ValueInfo process_value(const Expr& e, Scope& scope,
                          const std::string& target_hint, int line) {
    if (e.kind == ExprKind::Name) {
      Binding* b = lookup(scope, e.text);
      if (b && b->kind == Binding::Circuit) {
        ValueInfo vi;
        vi.kind = ValueInfo::AliasCircuit;
        vi.circ = b->circ;
        return vi;
      }
      if (b && b->kind == Binding::Reg) {
        ValueInfo vi;
        vi.kind = ValueInfo::AliasReg;
        vi.reg = b->reg;
        return vi;
      }
      return {};
    }
    if (e.kind != ExprKind::Call) {
      // Recurse into subexpressions so nested calls still produce events
      // (e.g. a circuit construction inside a list literal).
      for (const Expr& c : e.children) process_value(c, scope, "", line);
      return {};
    }

    const Expr& callee = e.children[0];

    // c_if chain: inner circuit call wrapped by .c_if(creg, val).
    if (callee.kind == ExprKind::Attribute && callee.text == "c_if" &&
        callee.children[0].kind == ExprKind::Call) {
      ValueInfo inner = process_value(callee.children[0], scope, "", line);
      if (inner.kind == ValueInfo::EmittedEvent && inner.event_owner) {
        CircuitEvent& base_ev = inner.event_owner->events[inner.event_idx];
        if (base_ev.kind == EventKind::GateApp ||
            base_ev.kind == EventKind::Measure) {
          CircuitEvent ev;
          ev.kind = EventKind::Conditional;
          ev.line = callee.line;
          ev.gate_name = base_ev.kind == EventKind::Measure ? "measure"
                                                            : base_ev.gate_name;
          if (e.children.size() > 1)
            resolve_creg_ref(e.children[1], *inner.event_owner, scope, ev);
          else
            ev.creg_symbolic = true;
          inner.event_owner->events.push_back(std::move(ev));
        }
      } else {
        ++program_.unresolved_count;  // c_if on something we could not model
      }
      return {};
    }

    std::string entity = classify_callee(callee);
    if (entity == "QuantumCircuit") {
      ValueInfo vi;
      vi.kind = ValueInfo::NewCircuit;
      vi.circ = construct_circuit(e, scope, target_hint, line);
      return vi;
    }
    if (entity == "QuantumRegister" || entity == "ClassicalRegister") {
      ValueInfo vi;
      vi.kind = ValueInfo::NewReg;
      vi.reg = make_register(e, entity == "QuantumRegister" ? RegKind::Quantum
                                                            : RegKind::Classical,
                             target_hint);
      return vi;
    }
    if (entity == "transpile") {
      ValueInfo vi;
      vi.kind = ValueInfo::TranspileResult;
      if (e.children.size() > 1 && e.children[1].kind == ExprKind::Name) {
        Binding* b = lookup(scope, e.children[1].text);
        if (b && b->kind == Binding::Circuit) {
          CircuitEvent ev;
          ev.kind = EventKind::TranspileCall;
          ev.line = e.children[0].line;
          ev.arg_var = e.children[1].text;
          b->circ->events.push_back(std::move(ev));
          vi.transpile_arg = b->circ;
          vi.event_owner = b->circ.get();
          vi.event_idx = b->circ->events.size() - 1;
        }
      }
      return vi;
    }

    if (callee.kind == ExprKind::Attribute &&
        callee.children[0].kind == ExprKind::Name) {
      ValueInfo vi = handle_method_call(e, scope);
      if (vi.kind != ValueInfo::None) return vi;
    }

    // Not a recognized quantum call: still visit arguments for nested events.
    for (size_t i = 1; i < e.children.size(); ++i)
      process_value(e.children[i], scope, "", line);
    for (const Kwarg& kw : e.kwargs)
      if (kw.value) process_value(*kw.value, scope, "", line);
    return {};
  }

  void bind(Scope& scope, const std::string& name, Binding b) {
    scope.names[name] = std::move(b);
  }

  void bind_target(const Expr& target, const ValueInfo& vi, Scope& scope,
                   int line) {
    if (target.kind == ExprKind::Name) {
      Binding b;
      switch (vi.kind) {
        case ValueInfo::NewCircuit:
        case ValueInfo::AliasCircuit:
          b.kind = Binding::Circuit;
          b.circ = vi.circ;
          break;
        case ValueInfo::NewReg:
        case ValueInfo::AliasReg:
          b.kind = Binding::Reg;
          b.reg = vi.reg;
          break;
        case ValueInfo::ComposeResult: {
          CircuitEvent& ev = vi.event_owner->events[vi.event_idx];
          if (ev.inplace) break;  // compose(..., inplace=True) returns None
          ev.result_bound = true;
          ev.result_var = target.text;
          b.kind = Binding::Circuit;
          b.circ = derive_circuit(vi.circ.get(), target.text, line,
                                  /*transpiled=*/false);
          b.pending_owner = vi.event_owner;
          b.pending_idx = vi.event_idx;
          break;
        }
        case ValueInfo::TranspileResult: {
          b.kind = Binding::Circuit;
          b.circ = derive_circuit(vi.transpile_arg.get(), target.text, line,
                                  /*transpiled=*/true);
          if (vi.event_owner) {
            vi.event_owner->events[vi.event_idx].result_var = target.text;
          } else {
            CircuitEvent ev;
            ev.kind = EventKind::TranspileCall;
            ev.line = line;
            ev.result_var = target.text;
            b.circ->events.push_back(std::move(ev));
          }
          break;
        }
        default:
          break;  // Other
      }
      bind(scope, target.text, std::move(b));
      return;
    }
    if (target.kind == ExprKind::TupleLit || target.kind == ExprKind::ListLit) {
      for (const Expr& t : target.children) bind_target(t, ValueInfo{}, scope, line);
      return;
    }
    if (target.kind == ExprKind::Starred && !target.children.empty()) {
      bind_target(target.children[0], ValueInfo{}, scope, line);
      return;
    }
    // Attribute/subscript targets: their bases are reads, not rebindings.
    log_reads(target, scope);
  }

  // ---- statement walk ----

  void process_block(const std::vector<Stmt>& body, Scope& scope) {
    for (const Stmt& s : body) process_stmt(s, scope);
  }

  void process_stmt(const Stmt& s, Scope& scope) {
    switch (s.kind) {
      case StmtKind::Assign: {
        const Expr& value = s.exprs.back();
        log_reads(value, scope);
        std::string hint;
        if (s.exprs.size() == 2 && s.exprs[0].kind == ExprKind::Name)
          hint = s.exprs[0].text;
        ValueInfo vi = process_value(value, scope, hint, s.line);
        for (size_t i = 0; i + 1 < s.exprs.size(); ++i)
          bind_target(s.exprs[i], vi, scope, s.line);
        break;
      }
      case StmtKind::AnnAssign: {
        if (s.has_value) {
          const Expr& value = s.exprs[2];
          log_reads(value, scope);
          std::string hint =
              s.exprs[0].kind == ExprKind::Name ? s.exprs[0].text : "";
          ValueInfo vi = process_value(value, scope, hint, s.line);
          bind_target(s.exprs[0], vi, scope, s.line);
        }
        break;
      }
      case StmtKind::AugAssign: {
        log_reads(s.exprs[0], scope);
        log_reads(s.exprs[1], scope);
        process_value(s.exprs[1], scope, "", s.line);
        break;  // `qc += other` keeps qc's existing binding
      }
      case StmtKind::ExprStmt: {
        log_reads(s.exprs[0], scope);
        ValueInfo vi = process_value(s.exprs[0], scope, "", s.line);
        if (vi.kind == ValueInfo::TranspileResult && !vi.event_owner)
          ++program_.unresolved_count;  // transpile of an unknown, discarded
        break;
      }
      case StmtKind::If: {
        log_reads(s.exprs[0], scope);
        process_block(s.body, scope);   // branches appended sequentially
        process_block(s.orelse, scope);
        break;
      }
      case StmtKind::While: {
        log_reads(s.exprs[0], scope);
        process_block(s.body, scope);  // 2-unrolling
        process_block(s.body, scope);
        process_block(s.orelse, scope);
        break;
      }
      case StmtKind::For: {
        log_reads(s.exprs[1], scope);
        bind_target(s.exprs[0], ValueInfo{}, scope, s.line);
        process_block(s.body, scope);  // 2-unrolling
        process_block(s.body, scope);
        process_block(s.orelse, scope);
        break;
      }
      case StmtKind::FunctionDef:
      case StmtKind::ClassDef: {
        for (const Expr& d : s.decorators) log_reads(d, scope);
        for (const Param& p : s.params)
          if (p.has_default) log_reads(p.default_value, scope);
        for (const Expr& base : s.bases) log_reads(base, scope);
        bind(scope, s.name, Binding{});  // the def/class name itself
        Scope inner;                     // independent scope, no closure capture
        process_block(s.body, inner);
        break;
      }
      case StmtKind::With: {
        for (const WithItem& item : s.with_items) {
          log_reads(item.context, scope);
          process_value(item.context, scope, "", s.line);
          if (item.has_target) bind_target(item.target, ValueInfo{}, scope, s.line);
        }
        process_block(s.body, scope);
        break;
      }
      case StmtKind::Try: {
        process_block(s.body, scope);
        for (const ExceptHandler& h : s.handlers) {
          if (h.has_type) log_reads(h.type, scope);
          if (!h.name.empty()) bind(scope, h.name, Binding{});
          process_block(h.body, scope);
        }
        process_block(s.orelse, scope);
        process_block(s.final_body, scope);
        break;
      }
      case StmtKind::Return:
      case StmtKind::Raise:
      case StmtKind::Assert: {
        for (const Expr& e : s.exprs) {
          log_reads(e, scope);
          process_value(e, scope, "", s.line);
        }
        break;
      }
      case StmtKind::Delete: {
        for (const Expr& e : s.exprs)
          if (e.kind == ExprKind::Name) scope.names.erase(e.text);
        break;
      }
      default:
        break;  // Pass/Break/Continue/Global/Nonlocal/Import*
    }
  }

  ProgramModel program_;
  std::map<std::string, std::string> module_aliases_;
  std::map<std::string, std::string> entity_aliases_;
  bool wildcard_qiskit_ = false;
};

inline ProgramModel build_model(const Module& mod, const SourceFile& file) {
  return ModelBuilder().build(mod, file);
}

inline ProgramModel model_from_file(const SourceFile& file) {
  return build_model(parse_source(file.text), file);
}

}  // namespace qlint
