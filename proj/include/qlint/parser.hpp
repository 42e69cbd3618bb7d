#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qlint/ast.hpp"
#include "qlint/errors.hpp"
#include "qlint/lexer.hpp"

namespace qlint {

/// Recursive-descent parser over the lexer's token stream. Covers the
/// statement and expression forms that occur in real Qiskit scripts;
/// anything outside the subset raises SyntaxError with a 1-based position.
class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Module parse_module() {
    Module mod;
    skip_newlines();
    while (!at_end()) {
      parse_statement(mod.body);
      skip_newlines();
    }
    return mod;
  }

 private:
  // ---- token helpers ----

  const Token& cur() const { return toks_[i_]; }
  const Token& peek(size_t ahead = 1) const {
    size_t j = i_ + ahead;
    return j < toks_.size() ? toks_[j] : toks_.back();
  }
  bool at_end() const { return cur().kind == TokenKind::EndOfFile; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg, cur().line, cur().col);
  }

  const Token& advance() { return toks_[i_++]; }

  bool at_op(const char* text) const {
    return cur().kind == TokenKind::Op && cur().text == text;
  }
  bool at_kw(const char* text) const {
    return cur().kind == TokenKind::Keyword && cur().text == text;
  }
  bool accept_op(const char* text) {
    if (!at_op(text)) return false;
    ++i_;
    return true;
  }
  bool accept_kw(const char* text) {
    if (!at_kw(text)) return false;
    ++i_;
    return true;
  }
  void expect_op(const char* text) {
    if (!accept_op(text)) fail(std::string("expected '") + text + "'");
  }
  void expect_kw(const char* text) {
    if (!accept_kw(text)) fail(std::string("expected '") + text + "'");
  }
  void expect_newline() {
    if (cur().kind == TokenKind::Newline) {
      ++i_;
    } else if (cur().kind != TokenKind::EndOfFile &&
               cur().kind != TokenKind::Dedent) {
      fail("invalid syntax");
    }
  }
  void skip_newlines() {
    while (cur().kind == TokenKind::Newline) ++i_;
  }

  Token expect_name() {
    if (cur().kind != TokenKind::Name) fail("expected identifier");
    return advance();
  }

  static Expr name_expr(const Token& t) {
    Expr e(ExprKind::Name);
    e.text = t.text;
    e.line = t.line;
    e.col = t.col;
    e.offset = t.offset;
    e.length = t.text.size();
    return e;
  }

  // ---- statements ----

  void parse_statement(std::vector<Stmt>& out) {
    if (at_op("@")) {
      parse_decorated(out);
      return;
    }
    if (cur().kind == TokenKind::Keyword) {
      const std::string& kw = cur().text;
      if (kw == "if") { out.push_back(parse_if()); return; }
      if (kw == "while") { out.push_back(parse_while()); return; }
      if (kw == "for") { out.push_back(parse_for(false)); return; }
      if (kw == "def") { out.push_back(parse_def(false, {})); return; }
      if (kw == "class") { out.push_back(parse_class({})); return; }
      if (kw == "with") { out.push_back(parse_with(false)); return; }
      if (kw == "try") { out.push_back(parse_try()); return; }
      if (kw == "async") {
        advance();
        if (at_kw("def")) { out.push_back(parse_def(true, {})); return; }
        if (at_kw("for")) { out.push_back(parse_for(true)); return; }
        if (at_kw("with")) { out.push_back(parse_with(true)); return; }
        fail("expected 'def', 'for' or 'with' after 'async'");
      }
    }
    parse_simple_line(out);
  }

  void parse_decorated(std::vector<Stmt>& out) {
    std::vector<Expr> decorators;
    while (at_op("@")) {
      advance();
      decorators.push_back(parse_test());
      expect_newline();
      skip_newlines();
    }
    bool is_async = accept_kw("async");
    if (at_kw("def")) {
      out.push_back(parse_def(is_async, std::move(decorators)));
    } else if (!is_async && at_kw("class")) {
      out.push_back(parse_class(std::move(decorators)));
    } else {
      fail("expected function or class after decorators");
    }
  }

  // One physical line of semicolon-separated simple statements.
  void parse_simple_line(std::vector<Stmt>& out) {
    while (true) {
      out.push_back(parse_simple_statement());
      if (!accept_op(";")) break;
      if (cur().kind == TokenKind::Newline || at_end()) break;
    }
    expect_newline();
  }

  Stmt parse_simple_statement() {
    int line = cur().line, col = cur().col;
    auto stamped = [&](Stmt s) {
      s.line = line;
      s.col = col;
      return s;
    };
    if (accept_kw("pass")) return stamped(Stmt(StmtKind::Pass));
    if (accept_kw("break")) return stamped(Stmt(StmtKind::Break));
    if (accept_kw("continue")) return stamped(Stmt(StmtKind::Continue));
    if (accept_kw("return")) {
      Stmt s(StmtKind::Return);
      if (!at_line_end()) s.exprs.push_back(parse_testlist());
      return stamped(std::move(s));
    }
    if (accept_kw("raise")) {
      Stmt s(StmtKind::Raise);
      if (!at_line_end()) {
        s.exprs.push_back(parse_test());
        if (accept_kw("from")) s.exprs.push_back(parse_test());
      }
      return stamped(std::move(s));
    }
    if (accept_kw("assert")) {
      Stmt s(StmtKind::Assert);
      s.exprs.push_back(parse_test());
      if (accept_op(",")) s.exprs.push_back(parse_test());
      return stamped(std::move(s));
    }
    if (accept_kw("del")) {
      Stmt s(StmtKind::Delete);
      s.exprs.push_back(parse_target());
      while (accept_op(",")) {
        if (at_line_end()) break;
        s.exprs.push_back(parse_target());
      }
      return stamped(std::move(s));
    }
    if (at_kw("global") || at_kw("nonlocal")) {
      Stmt s(cur().text == "global" ? StmtKind::Global : StmtKind::Nonlocal);
      advance();
      s.names.push_back(expect_name().text);
      while (accept_op(",")) s.names.push_back(expect_name().text);
      return stamped(std::move(s));
    }
    if (at_kw("import")) return stamped(parse_import());
    if (at_kw("from")) return stamped(parse_import_from());

    // Expression statement, assignment, augmented or annotated assignment.
    Expr first = parse_testlist_star();
    if (at_op(":") && first.kind == ExprKind::Name) {
      advance();
      Stmt s(StmtKind::AnnAssign);
      s.exprs.push_back(std::move(first));
      s.exprs.push_back(parse_test());  // annotation
      if (accept_op("=")) {
        s.exprs.push_back(parse_testlist_star());
        s.has_value = true;
      }
      return stamped(std::move(s));
    }
    static const char* aug_ops[] = {"+=", "-=", "*=", "/=", "//=", "%=",
                                    "**=", ">>=", "<<=", "&=", "|=", "^=",
                                    "@="};
    for (const char* op : aug_ops) {
      if (at_op(op)) {
        advance();
        Stmt s(StmtKind::AugAssign);
        s.text = op;
        s.exprs.push_back(std::move(first));
        s.exprs.push_back(parse_testlist_star());
        return stamped(std::move(s));
      }
    }
    if (at_op("=")) {
      Stmt s(StmtKind::Assign);
      s.exprs.push_back(std::move(first));
      while (accept_op("=")) s.exprs.push_back(parse_testlist_star());
      // exprs = [target1 ... targetN, value]
      return stamped(std::move(s));
    }
    Stmt s(StmtKind::ExprStmt);
    s.exprs.push_back(std::move(first));
    return stamped(std::move(s));
  }

  bool at_line_end() const {
    return cur().kind == TokenKind::Newline || at_op(";") || at_end() ||
           cur().kind == TokenKind::Dedent;
  }

  Stmt parse_import() {
    expect_kw("import");
    Stmt s(StmtKind::Import);
    do {
      ImportAlias alias;
      alias.line = cur().line;
      alias.module = expect_name().text;
      while (accept_op(".")) alias.module += "." + expect_name().text;
      if (accept_kw("as")) alias.asname = expect_name().text;
      s.aliases.push_back(std::move(alias));
    } while (accept_op(","));
    return s;
  }

  Stmt parse_import_from() {
    expect_kw("from");
    Stmt s(StmtKind::ImportFrom);
    while (at_op(".") || at_op("...")) s.from_module += advance().text;
    if (cur().kind == TokenKind::Name) {
      s.from_module += expect_name().text;
      while (accept_op(".")) s.from_module += "." + expect_name().text;
    }
    expect_kw("import");
    if (accept_op("*")) {
      ImportAlias alias;
      alias.module = "*";
      alias.line = cur().line;
      s.aliases.push_back(std::move(alias));
      return s;
    }
    bool parens = accept_op("(");
    do {
      if (parens && at_op(")")) break;  // tolerate trailing comma
      ImportAlias alias;
      alias.line = cur().line;
      alias.module = expect_name().text;
      if (accept_kw("as")) alias.asname = expect_name().text;
      s.aliases.push_back(std::move(alias));
    } while (accept_op(","));
    if (parens) expect_op(")");
    return s;
  }

  std::vector<Stmt> parse_suite() {
    expect_op(":");
    std::vector<Stmt> body;
    if (cur().kind == TokenKind::Newline) {
      advance();
      skip_newlines();
      if (cur().kind != TokenKind::Indent) fail("expected an indented block");
      advance();
      skip_newlines();
      while (cur().kind != TokenKind::Dedent && !at_end()) {
        parse_statement(body);
        skip_newlines();
      }
      if (cur().kind == TokenKind::Dedent) advance();
    } else {
      parse_simple_line(body);
    }
    return body;
  }

  Stmt parse_if() {
    Stmt s(StmtKind::If);
    s.line = cur().line;
    s.col = cur().col;
    expect_kw("if");
    s.exprs.push_back(parse_namedexpr());
    s.body = parse_suite();
    skip_newlines();
    if (at_kw("elif")) {
      Stmt nested = parse_elif_chain();
      s.orelse.push_back(std::move(nested));
    } else if (accept_kw("else")) {
      s.orelse = parse_suite();
    }
    return s;
  }

  Stmt parse_elif_chain() {
    Stmt s(StmtKind::If);
    s.line = cur().line;
    s.col = cur().col;
    expect_kw("elif");
    s.exprs.push_back(parse_namedexpr());
    s.body = parse_suite();
    skip_newlines();
    if (at_kw("elif")) {
      s.orelse.push_back(parse_elif_chain());
    } else if (accept_kw("else")) {
      s.orelse = parse_suite();
    }
    return s;
  }

  Stmt parse_while() {
    Stmt s(StmtKind::While);
    s.line = cur().line;
    s.col = cur().col;
    expect_kw("while");
    s.exprs.push_back(parse_namedexpr());
    s.body = parse_suite();
    skip_newlines();
    if (accept_kw("else")) s.orelse = parse_suite();
    return s;
  }

  Stmt parse_for(bool is_async) {
    Stmt s(StmtKind::For);
    s.is_async = is_async;
    s.line = cur().line;
    s.col = cur().col;
    expect_kw("for");
    s.exprs.push_back(parse_target_list());
    expect_kw("in");
    s.exprs.push_back(parse_testlist());
    s.body = parse_suite();
    skip_newlines();
    if (accept_kw("else")) s.orelse = parse_suite();
    return s;
  }

  Stmt parse_def(bool is_async, std::vector<Expr> decorators) {
    Stmt s(StmtKind::FunctionDef);
    s.is_async = is_async;
    s.decorators = std::move(decorators);
    s.line = cur().line;
    s.col = cur().col;
    expect_kw("def");
    Token name = expect_name();
    s.name = name.text;
    s.name_line = name.line;
    s.name_col = name.col;
    s.name_offset = name.offset;
    expect_op("(");
    s.params = parse_params();
    expect_op(")");
    if (accept_op("->")) parse_test();  // return annotation, discarded
    s.body = parse_suite();
    return s;
  }

  std::vector<Param> parse_params() {
    std::vector<Param> params;
    while (!at_op(")")) {
      Param p;
      if (accept_op("*")) {
        if (at_op(",") || at_op(")")) {  // bare * keyword-only marker
          if (!accept_op(",")) break;
          continue;
        }
        p.is_star = true;
      } else if (accept_op("**")) {
        p.is_double_star = true;
      } else if (accept_op("/")) {  // positional-only marker
        if (!accept_op(",")) break;
        continue;
      }
      Token name = expect_name();
      p.name = name.text;
      p.line = name.line;
      p.col = name.col;
      p.offset = name.offset;
      if (accept_op(":")) parse_test();  // annotation, discarded
      if (accept_op("=")) {
        p.has_default = true;
        p.default_value = parse_test();
      }
      params.push_back(std::move(p));
      if (!accept_op(",")) break;
    }
    return params;
  }

  Stmt parse_class(std::vector<Expr> decorators) {
    Stmt s(StmtKind::ClassDef);
    s.decorators = std::move(decorators);
    s.line = cur().line;
    s.col = cur().col;
    expect_kw("class");
    Token name = expect_name();
    s.name = name.text;
    s.name_line = name.line;
    s.name_col = name.col;
    s.name_offset = name.offset;
    if (accept_op("(")) {
      while (!at_op(")")) {
        if (cur().kind == TokenKind::Name && peek().kind == TokenKind::Op &&
            peek().text == "=") {
          advance();  // keyword argument (e.g. metaclass=...), discarded
          advance();
          parse_test();
        } else {
          s.bases.push_back(parse_test());
        }
        if (!accept_op(",")) break;
      }
      expect_op(")");
    }
    s.body = parse_suite();
    return s;
  }

  Stmt parse_with(bool is_async) {
    Stmt s(StmtKind::With);
    s.is_async = is_async;
    s.line = cur().line;
    s.col = cur().col;
    expect_kw("with");
    do {
      WithItem item;
      item.context = parse_test();
      if (accept_kw("as")) {
        item.has_target = true;
        item.target = parse_target();
      }
      s.with_items.push_back(std::move(item));
    } while (accept_op(","));
    s.body = parse_suite();
    return s;
  }

  Stmt parse_try() {
    Stmt s(StmtKind::Try);
    s.line = cur().line;
    s.col = cur().col;
    expect_kw("try");
    s.body = parse_suite();
    skip_newlines();
    while (at_kw("except")) {
      advance();
      ExceptHandler h;
      if (!at_op(":")) {
        h.has_type = true;
        h.type = parse_test();
        if (accept_kw("as")) {
          Token name = expect_name();
          h.name = name.text;
          h.name_line = name.line;
          h.name_col = name.col;
          h.name_offset = name.offset;
        }
      }
      h.body = parse_suite();
      s.handlers.push_back(std::move(h));
      skip_newlines();
    }
    if (accept_kw("else")) {
      s.orelse = parse_suite();
      skip_newlines();
    }
    if (accept_kw("finally")) s.final_body = parse_suite();
    if (s.handlers.empty() && s.final_body.empty())
      fail("expected 'except' or 'finally' block");
    return s;
  }

  // ---- targets ----

  Expr parse_target() {
    // A target is syntactically a postfix expression (name, attribute,
    // subscript), a starred target, or a parenthesized/bracketed list.
    if (at_op("*")) {
      Expr star(ExprKind::Starred);
      star.line = cur().line;
      star.col = cur().col;
      advance();
      star.children.push_back(parse_target());
      return star;
    }
    return parse_postfix();
  }

  Expr parse_target_list() {
    Expr first = parse_target();
    if (!at_op(",")) return first;
    Expr tup(ExprKind::TupleLit);
    tup.line = first.line;
    tup.col = first.col;
    tup.children.push_back(std::move(first));
    while (accept_op(",")) {
      if (at_kw("in") || at_op("=") || at_line_end()) break;
      tup.children.push_back(parse_target());
    }
    return tup;
  }

  // ---- expressions ----

  Expr parse_testlist() {
    Expr first = parse_test();
    if (!at_op(",")) return first;
    Expr tup(ExprKind::TupleLit);
    tup.line = first.line;
    tup.col = first.col;
    tup.children.push_back(std::move(first));
    while (accept_op(",")) {
      if (at_line_end() || at_op("=") || at_op(")") || at_op("]") || at_op("}") ||
          at_op(":"))
        break;
      tup.children.push_back(parse_test());
    }
    return tup;
  }

  Expr parse_testlist_star() {
    Expr first = at_op("*") ? parse_star_item() : parse_test();
    if (!at_op(",")) return first;
    Expr tup(ExprKind::TupleLit);
    tup.line = first.line;
    tup.col = first.col;
    tup.children.push_back(std::move(first));
    while (accept_op(",")) {
      if (at_line_end() || at_op("=") || at_op(")") || at_op("]") || at_op("}") ||
          at_op(":"))
        break;
      tup.children.push_back(at_op("*") ? parse_star_item() : parse_test());
    }
    return tup;
  }

  Expr parse_star_item() {
    Expr star(ExprKind::Starred);
    star.line = cur().line;
    star.col = cur().col;
    expect_op("*");
    star.children.push_back(parse_or());
    return star;
  }

  Expr parse_namedexpr() {
    Expr e = parse_test();
    if (at_op(":=")) {
      advance();
      Expr walrus(ExprKind::Binary);
      walrus.text = ":=";
      walrus.line = e.line;
      walrus.col = e.col;
      walrus.children.push_back(std::move(e));
      walrus.children.push_back(parse_test());
      return walrus;
    }
    return e;
  }

  Expr parse_test() {
    if (at_kw("lambda")) return parse_lambda();
    Expr body = parse_or();
    if (at_kw("if")) {
      advance();
      Expr cond = parse_or();
      expect_kw("else");
      Expr orelse = parse_test();
      Expr e(ExprKind::IfExp);
      e.line = body.line;
      e.col = body.col;
      e.children.push_back(std::move(body));
      e.children.push_back(std::move(cond));
      e.children.push_back(std::move(orelse));
      return e;
    }
    return body;
  }

  Expr parse_lambda() {
    Expr e(ExprKind::Lambda);
    e.line = cur().line;
    e.col = cur().col;
    expect_kw("lambda");
    while (!at_op(":")) {
      Param p;
      if (accept_op("*")) {
        p.is_star = true;
      } else if (accept_op("**")) {
        p.is_double_star = true;
      }
      Token name = expect_name();
      p.name = name.text;
      p.line = name.line;
      p.col = name.col;
      p.offset = name.offset;
      if (accept_op("=")) {
        p.has_default = true;
        p.default_value = parse_test();
      }
      e.lambda_params.push_back(std::move(p));
      if (!accept_op(",")) break;
    }
    expect_op(":");
    e.children.push_back(parse_test());
    return e;
  }

  Expr parse_or() {
    Expr lhs = parse_and();
    while (at_kw("or")) {
      advance();
      Expr rhs = parse_and();
      lhs = make_binary(ExprKind::BoolOp, "or", std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr parse_and() {
    Expr lhs = parse_not();
    while (at_kw("and")) {
      advance();
      Expr rhs = parse_not();
      lhs = make_binary(ExprKind::BoolOp, "and", std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr parse_not() {
    if (at_kw("not")) {
      Expr e(ExprKind::Unary);
      e.text = "not";
      e.line = cur().line;
      e.col = cur().col;
      advance();
      e.children.push_back(parse_not());
      return e;
    }
    return parse_comparison();
  }

  Expr parse_comparison() {
    Expr lhs = parse_bitor();
    Expr cmp(ExprKind::Compare);
    bool any = false;
    while (true) {
      std::string op;
      if (at_op("<") || at_op(">") || at_op("<=") || at_op(">=") || at_op("==") ||
          at_op("!=")) {
        op = advance().text;
      } else if (at_kw("in")) {
        advance();
        op = "in";
      } else if (at_kw("not") && peek().kind == TokenKind::Keyword &&
                 peek().text == "in") {
        advance();
        advance();
        op = "not in";
      } else if (at_kw("is")) {
        advance();
        op = "is";
        if (accept_kw("not")) op = "is not";
      } else {
        break;
      }
      if (!any) {
        cmp.line = lhs.line;
        cmp.col = lhs.col;
        cmp.children.push_back(std::move(lhs));
        any = true;
      }
      if (!cmp.text.empty()) cmp.text += " ";
      cmp.text += op;
      cmp.children.push_back(parse_bitor());
    }
    return any ? std::move(cmp) : std::move(lhs);
  }

  Expr parse_bitor() {
    Expr lhs = parse_bitxor();
    while (at_op("|")) {
      advance();
      lhs = make_binary(ExprKind::Binary, "|", std::move(lhs), parse_bitxor());
    }
    return lhs;
  }

  Expr parse_bitxor() {
    Expr lhs = parse_bitand();
    while (at_op("^")) {
      advance();
      lhs = make_binary(ExprKind::Binary, "^", std::move(lhs), parse_bitand());
    }
    return lhs;
  }

  Expr parse_bitand() {
    Expr lhs = parse_shift();
    while (at_op("&")) {
      advance();
      lhs = make_binary(ExprKind::Binary, "&", std::move(lhs), parse_shift());
    }
    return lhs;
  }

  Expr parse_shift() {
    Expr lhs = parse_arith();
    while (at_op("<<") || at_op(">>")) {
      std::string op = advance().text;
      lhs = make_binary(ExprKind::Binary, op, std::move(lhs), parse_arith());
    }
    return lhs;
  }

  Expr parse_arith() {
    Expr lhs = parse_term();
    while (at_op("+") || at_op("-")) {
      std::string op = advance().text;
      lhs = make_binary(ExprKind::Binary, op, std::move(lhs), parse_term());
    }
    return lhs;
  }

  Expr parse_term() {
    Expr lhs = parse_factor();
    while (at_op("*") || at_op("/") || at_op("//") || at_op("%") || at_op("@")) {
      std::string op = advance().text;
      lhs = make_binary(ExprKind::Binary, op, std::move(lhs), parse_factor());
    }
    return lhs;
  }

  Expr parse_factor() {
    if (at_op("+") || at_op("-") || at_op("~")) {
      Expr e(ExprKind::Unary);
      e.text = cur().text;
      e.line = cur().line;
      e.col = cur().col;
      advance();
      e.children.push_back(parse_factor());
      return e;
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_postfix();
    if (at_op("**")) {
      advance();
      return make_binary(ExprKind::Binary, "**", std::move(base), parse_factor());
    }
    return base;
  }

  Expr parse_postfix() {
    Expr e = parse_atom();
    while (true) {
      if (at_op("(")) {
        advance();
        Expr call(ExprKind::Call);
        call.line = e.line;
        call.col = e.col;
        call.children.push_back(std::move(e));
        parse_call_args(call);
        expect_op(")");
        e = std::move(call);
      } else if (at_op("[")) {
        advance();
        Expr sub(ExprKind::Subscript);
        sub.line = e.line;
        sub.col = e.col;
        sub.children.push_back(std::move(e));
        sub.children.push_back(parse_subscript_index());
        expect_op("]");
        e = std::move(sub);
      } else if (at_op(".")) {
        advance();
        Token name = expect_name();
        Expr attr(ExprKind::Attribute);
        attr.text = name.text;
        attr.line = name.line;
        attr.col = name.col;
        attr.offset = name.offset;
        attr.length = name.text.size();
        attr.children.push_back(std::move(e));
        e = std::move(attr);
      } else {
        break;
      }
    }
    return e;
  }

  void parse_call_args(Expr& call) {
    while (!at_op(")")) {
      if (at_op("*")) {
        advance();
        Expr star(ExprKind::Starred);
        star.line = cur().line;
        star.col = cur().col;
        star.children.push_back(parse_test());
        call.children.push_back(std::move(star));
      } else if (at_op("**")) {
        advance();
        Kwarg kw;
        kw.line = cur().line;
        kw.col = cur().col;
        kw.value = std::make_unique<Expr>(parse_test());
        call.kwargs.push_back(std::move(kw));
      } else if (cur().kind == TokenKind::Name && peek().kind == TokenKind::Op &&
                 peek().text == "=") {
        Token name = advance();
        advance();  // '='
        Kwarg kw;
        kw.name = name.text;
        kw.line = name.line;
        kw.col = name.col;
        kw.offset = name.offset;
        kw.value = std::make_unique<Expr>(parse_test());
        call.kwargs.push_back(std::move(kw));
      } else {
        Expr arg = parse_namedexpr();
        if (at_kw("for") || at_kw("async")) {
          // Bare generator expression as the sole argument.
          Expr comp(ExprKind::Comprehension);
          comp.text = "generator";
          comp.line = arg.line;
          comp.col = arg.col;
          comp.children.push_back(std::move(arg));
          parse_comp_clauses(comp);
          call.children.push_back(std::move(comp));
          break;
        }
        call.children.push_back(std::move(arg));
      }
      if (!accept_op(",")) break;
    }
  }

  Expr parse_subscript_index() {
    Expr first = parse_slice_item();
    if (!at_op(",")) return first;
    Expr tup(ExprKind::TupleLit);
    tup.line = first.line;
    tup.col = first.col;
    tup.children.push_back(std::move(first));
    while (accept_op(",")) {
      if (at_op("]")) break;
      tup.children.push_back(parse_slice_item());
    }
    return tup;
  }

  Expr parse_slice_item() {
    Expr lower(ExprKind::Empty);
    lower.line = cur().line;
    lower.col = cur().col;
    if (!at_op(":")) lower = parse_test();
    if (!at_op(":")) return lower;

    Expr slice(ExprKind::SliceExpr);
    slice.line = lower.line;
    slice.col = lower.col;
    slice.children.push_back(std::move(lower));
    advance();  // first ':'
    Expr upper(ExprKind::Empty);
    if (!at_op(":") && !at_op("]") && !at_op(",")) upper = parse_test();
    slice.children.push_back(std::move(upper));
    Expr step(ExprKind::Empty);
    if (accept_op(":")) {
      if (!at_op("]") && !at_op(",")) step = parse_test();
    }
    slice.children.push_back(std::move(step));
    return slice;
  }

  void parse_comp_clauses(Expr& comp) {
    while (true) {
      if (accept_kw("async")) {
        // fallthrough to the 'for' below
      }
      if (!accept_kw("for")) break;
      CompClause clause;
      clause.target = std::make_unique<Expr>(parse_target_list());
      expect_kw("in");
      clause.iter = std::make_unique<Expr>(parse_or());
      while (at_kw("if")) {
        advance();
        clause.conditions.push_back(parse_or());
      }
      comp.comp_clauses.push_back(std::move(clause));
      if (!at_kw("for") && !at_kw("async")) break;
    }
  }

  Expr parse_atom() {
    const Token& t = cur();
    switch (t.kind) {
      case TokenKind::Name:
        return name_expr(advance());
      case TokenKind::Number: {
        Expr e(ExprKind::Num);
        e.text = t.text;
        e.line = t.line;
        e.col = t.col;
        e.offset = t.offset;
        advance();
        return e;
      }
      case TokenKind::String: {
        Expr e(ExprKind::Str);
        e.text = t.text;
        e.line = t.line;
        e.col = t.col;
        e.offset = t.offset;
        advance();
        while (cur().kind == TokenKind::String) {
          e.text += cur().text;  // adjacent literal concatenation
          advance();
        }
        return e;
      }
      case TokenKind::Keyword: {
        if (t.text == "True" || t.text == "False") {
          Expr e(ExprKind::BoolLit);
          e.text = t.text;
          e.line = t.line;
          e.col = t.col;
          advance();
          return e;
        }
        if (t.text == "None") {
          Expr e(ExprKind::NoneLit);
          e.line = t.line;
          e.col = t.col;
          advance();
          return e;
        }
        if (t.text == "lambda") return parse_lambda();
        if (t.text == "await") {
          Expr e(ExprKind::Await);
          e.line = t.line;
          e.col = t.col;
          advance();
          e.children.push_back(parse_postfix());
          return e;
        }
        if (t.text == "yield") {
          Expr e(ExprKind::YieldExpr);
          e.line = t.line;
          e.col = t.col;
          advance();
          if (accept_kw("from")) {
            e.text = "from";
            e.children.push_back(parse_test());
          } else if (!at_line_end() && !at_op(")") && !at_op("]") && !at_op("}")) {
            e.children.push_back(parse_testlist());
          }
          return e;
        }
        if (t.text == "not") return parse_not();
        fail("unexpected keyword '" + t.text + "'");
      }
      case TokenKind::Op:
        if (t.text == "(") return parse_paren_atom();
        if (t.text == "[") return parse_list_atom();
        if (t.text == "{") return parse_brace_atom();
        if (t.text == "...") {
          Expr e(ExprKind::EllipsisLit);
          e.line = t.line;
          e.col = t.col;
          advance();
          return e;
        }
        fail("unexpected token '" + t.text + "'");
      default:
        fail("unexpected token");
    }
  }

  Expr parse_paren_atom() {
    int line = cur().line, col = cur().col;
    expect_op("(");
    if (accept_op(")")) {
      Expr e(ExprKind::TupleLit);
      e.line = line;
      e.col = col;
      return e;
    }
    Expr first = at_op("*") ? parse_star_item() : parse_namedexpr();
    if (at_kw("for") || at_kw("async")) {
      Expr comp(ExprKind::Comprehension);
      comp.text = "generator";
      comp.line = line;
      comp.col = col;
      comp.children.push_back(std::move(first));
      parse_comp_clauses(comp);
      expect_op(")");
      return comp;
    }
    if (at_op(",")) {
      Expr tup(ExprKind::TupleLit);
      tup.line = line;
      tup.col = col;
      tup.children.push_back(std::move(first));
      while (accept_op(",")) {
        if (at_op(")")) break;
        tup.children.push_back(at_op("*") ? parse_star_item() : parse_test());
      }
      expect_op(")");
      return tup;
    }
    expect_op(")");
    return first;  // plain grouping
  }

  Expr parse_list_atom() {
    int line = cur().line, col = cur().col;
    expect_op("[");
    Expr list(ExprKind::ListLit);
    list.line = line;
    list.col = col;
    if (accept_op("]")) return list;
    Expr first = at_op("*") ? parse_star_item() : parse_namedexpr();
    if (at_kw("for") || at_kw("async")) {
      Expr comp(ExprKind::Comprehension);
      comp.text = "list";
      comp.line = line;
      comp.col = col;
      comp.children.push_back(std::move(first));
      parse_comp_clauses(comp);
      expect_op("]");
      return comp;
    }
    list.children.push_back(std::move(first));
    while (accept_op(",")) {
      if (at_op("]")) break;
      list.children.push_back(at_op("*") ? parse_star_item() : parse_test());
    }
    expect_op("]");
    return list;
  }

  Expr parse_brace_atom() {
    int line = cur().line, col = cur().col;
    expect_op("{");
    if (accept_op("}")) {
      Expr e(ExprKind::DictLit);
      e.line = line;
      e.col = col;
      return e;
    }
    if (at_op("**")) {
      Expr dict(ExprKind::DictLit);
      dict.line = line;
      dict.col = col;
      parse_dict_rest(dict, /*have_first=*/false);
      expect_op("}");
      return dict;
    }
    Expr first = at_op("*") ? parse_star_item() : parse_test();
    if (at_op(":")) {
      advance();
      Expr value = parse_test();
      if (at_kw("for") || at_kw("async")) {
        Expr comp(ExprKind::Comprehension);
        comp.text = "dict";
        comp.line = line;
        comp.col = col;
        comp.children.push_back(std::move(first));
        comp.children.push_back(std::move(value));
        parse_comp_clauses(comp);
        expect_op("}");
        return comp;
      }
      Expr dict(ExprKind::DictLit);
      dict.line = line;
      dict.col = col;
      dict.children.push_back(std::move(first));
      dict.children.push_back(std::move(value));
      if (accept_op(",")) parse_dict_rest(dict, /*have_first=*/true);
      expect_op("}");
      return dict;
    }
    if (at_kw("for") || at_kw("async")) {
      Expr comp(ExprKind::Comprehension);
      comp.text = "set";
      comp.line = line;
      comp.col = col;
      comp.children.push_back(std::move(first));
      parse_comp_clauses(comp);
      expect_op("}");
      return comp;
    }
    Expr set(ExprKind::SetLit);
    set.line = line;
    set.col = col;
    set.children.push_back(std::move(first));
    while (accept_op(",")) {
      if (at_op("}")) break;
      set.children.push_back(at_op("*") ? parse_star_item() : parse_test());
    }
    expect_op("}");
    return set;
  }

  void parse_dict_rest(Expr& dict, bool have_first) {
    (void)have_first;
    while (!at_op("}")) {
      if (accept_op("**")) {
        Expr key(ExprKind::DoubleStarred);
        key.line = cur().line;
        key.col = cur().col;
        key.children.push_back(parse_or());
        Expr empty(ExprKind::Empty);
        dict.children.push_back(std::move(key));
        dict.children.push_back(std::move(empty));
      } else {
        Expr key = parse_test();
        expect_op(":");
        Expr value = parse_test();
        dict.children.push_back(std::move(key));
        dict.children.push_back(std::move(value));
      }
      if (!accept_op(",")) break;
    }
  }

  static Expr make_binary(ExprKind kind, std::string op, Expr lhs, Expr rhs) {
    Expr e(kind);
    e.text = std::move(op);
    e.line = lhs.line;
    e.col = lhs.col;
    e.children.push_back(std::move(lhs));
    e.children.push_back(std::move(rhs));
    return e;
  }

  std::vector<Token> toks_;
  size_t i_ = 0;
};

/// Tokenize + parse in one step.
inline Module parse_source(std::string_view text) {
  Lexer lex(text);
  return Parser(lex.tokenize()).parse_module();
}

}  // namespace qlint
