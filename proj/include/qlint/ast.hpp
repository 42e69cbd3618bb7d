#pragma once

#include <memory>
#include <string>
#include <vector>

namespace qlint {

// Fat-node AST. Every identifier occurrence keeps its byte span so later
// passes (the obfuscator in particular) can rewrite the original text
// in place without a pretty-printer.

enum class ExprKind {
  Name,
  Attribute,   // children[0] = base; text = attribute name
  Call,        // children[0] = callee; children[1..] = positional args
  Subscript,   // children[0] = base; children[1] = index expression
  Num,         // text = literal spelling
  Str,         // text = literal spelling including quotes/prefix
  BoolLit,     // text = "True" | "False"
  NoneLit,
  EllipsisLit,
  TupleLit,
  ListLit,
  SetLit,
  DictLit,     // children alternate key, value; ** entries use DoubleStarred key
  SliceExpr,   // children = [lower, upper, step]; absent bounds are Empty
  Empty,       // placeholder for an omitted slice bound
  Unary,       // text = operator
  Binary,      // text = operator; children = [lhs, rhs]
  BoolOp,      // text = "and" | "or"; children = operands
  Compare,     // children = [lhs, rhs1, rhs2...]; text holds space-joined ops
  IfExp,       // children = [body, condition, orelse]
  Lambda,      // params + children[0] = body
  Starred,     // children[0]
  DoubleStarred,
  Comprehension, // text = "list"|"set"|"dict"|"generator"
  FStringExpr,   // an expression embedded in an f-string (tracked for bindings)
  Await,
  YieldExpr,
};

struct Expr;

struct Kwarg {
  std::string name;  // empty for **expr
  int line = 0;
  int col = 0;
  size_t offset = 0;
  std::unique_ptr<Expr> value;
};

struct CompClause {
  std::unique_ptr<Expr> target;
  std::unique_ptr<Expr> iter;
  std::vector<Expr> conditions;
};

struct Expr {
  ExprKind kind = ExprKind::Empty;
  std::string text;
  int line = 0;
  int col = 0;
  size_t offset = 0;
  size_t length = 0;  // byte length of the identifier for Name nodes
  std::vector<Expr> children;
  std::vector<Kwarg> kwargs;
  std::vector<CompClause> comp_clauses;
  std::vector<struct Param> lambda_params;

  Expr() = default;
  Expr(ExprKind k) : kind(k) {}
};

struct Param {
  std::string name;
  int line = 0;
  int col = 0;
  size_t offset = 0;
  bool has_default = false;
  Expr default_value;
  bool is_star = false;       // *args
  bool is_double_star = false;  // **kwargs
};

enum class StmtKind {
  ExprStmt,   // exprs = [value]
  Assign,     // exprs = [target1, ..., targetN, value]
  AugAssign,  // text = operator; exprs = [target, value]
  AnnAssign,  // exprs = [target, annotation, value?]; flag has_value
  If,         // exprs = [condition]; body / orelse (elif chains nest in orelse)
  While,      // exprs = [condition]; body / orelse
  For,        // exprs = [target, iter]; body / orelse
  FunctionDef,
  ClassDef,
  Import,
  ImportFrom,
  With,
  Try,
  Return,     // exprs = [value] when present
  Pass,
  Break,
  Continue,
  Global,     // names
  Nonlocal,   // names
  Raise,      // exprs = value (+ cause) when present
  Assert,     // exprs = [test, message?]
  Delete,     // exprs = targets
};

struct Stmt;

struct ImportAlias {
  std::string module;  // dotted path for `import`, bare name for `from ... import`
  std::string asname;  // empty when no alias
  int line = 0;
};

struct WithItem {
  Expr context;
  bool has_target = false;
  Expr target;
};

struct ExceptHandler {
  bool has_type = false;
  Expr type;
  std::string name;  // `except E as name`
  int name_line = 0;
  int name_col = 0;
  size_t name_offset = 0;
  std::vector<Stmt> body;
};

struct Stmt {
  StmtKind kind = StmtKind::Pass;
  int line = 0;
  int col = 0;
  std::string text;          // operator for AugAssign
  std::vector<Expr> exprs;
  std::vector<Stmt> body;
  std::vector<Stmt> orelse;
  std::vector<Stmt> final_body;  // Try only

  // FunctionDef / ClassDef
  std::string name;
  int name_line = 0;
  int name_col = 0;
  size_t name_offset = 0;
  std::vector<Param> params;
  std::vector<Expr> decorators;
  std::vector<Expr> bases;  // ClassDef bases
  bool is_async = false;

  // Import / ImportFrom
  std::string from_module;  // ImportFrom; "*" captured as a lone alias
  std::vector<ImportAlias> aliases;

  std::vector<WithItem> with_items;
  std::vector<ExceptHandler> handlers;
  std::vector<std::string> names;  // Global / Nonlocal
  bool has_value = false;          // AnnAssign

  Stmt() = default;
  Stmt(StmtKind k) : kind(k) {}
};

struct Module {
  std::vector<Stmt> body;
};

}  // namespace qlint
