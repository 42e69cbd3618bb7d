#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "qlint/errors.hpp"
#include "qlint/parser.hpp"

using namespace qlint;

TEST_CASE("parses a small circuit script into statements") {
  Module mod = parse_source(
      "from qiskit import QuantumCircuit\n"
      "qc = QuantumCircuit(2, 2)\n"
      "qc.h(0)\n"
      "qc.cx(0, 1)\n"
      "qc.measure(0, 0)\n");
  REQUIRE(mod.body.size() == 5);
  CHECK(mod.body[0].kind == StmtKind::ImportFrom);
  CHECK(mod.body[0].from_module == "qiskit");
  REQUIRE(mod.body[0].aliases.size() == 1);
  CHECK(mod.body[0].aliases[0].module == "QuantumCircuit");

  const Stmt& assign = mod.body[1];
  REQUIRE(assign.kind == StmtKind::Assign);
  REQUIRE(assign.exprs.size() == 2);
  CHECK(assign.exprs[0].kind == ExprKind::Name);
  CHECK(assign.exprs[0].text == "qc");
  const Expr& ctor = assign.exprs[1];
  REQUIRE(ctor.kind == ExprKind::Call);
  CHECK(ctor.children[0].text == "QuantumCircuit");
  REQUIRE(ctor.children.size() == 3);  // callee + two args
  CHECK(ctor.children[1].text == "2");

  const Stmt& h = mod.body[2];
  REQUIRE(h.kind == StmtKind::ExprStmt);
  const Expr& call = h.exprs[0];
  REQUIRE(call.kind == ExprKind::Call);
  REQUIRE(call.children[0].kind == ExprKind::Attribute);
  CHECK(call.children[0].text == "h");
  CHECK(call.children[0].children[0].text == "qc");
  CHECK(h.line == 3);
}

TEST_CASE("method chains nest calls left to right") {
  Module mod = parse_source("qc.x(0).c_if(creg, 1)\n");
  const Expr& outer = mod.body[0].exprs[0];
  REQUIRE(outer.kind == ExprKind::Call);
  const Expr& cif_attr = outer.children[0];
  REQUIRE(cif_attr.kind == ExprKind::Attribute);
  CHECK(cif_attr.text == "c_if");
  const Expr& inner = cif_attr.children[0];
  REQUIRE(inner.kind == ExprKind::Call);
  CHECK(inner.children[0].text == "x");
  REQUIRE(outer.children.size() == 3);
  CHECK(outer.children[1].text == "creg");
  CHECK(outer.children[2].text == "1");
}

TEST_CASE("call keyword arguments record their names") {
  Module mod = parse_source("qc = QuantumCircuit(3, name='bell', global_phase=0.5)\n");
  const Expr& ctor = mod.body[0].exprs[1];
  REQUIRE(ctor.kwargs.size() == 2);
  CHECK(ctor.kwargs[0].name == "name");
  CHECK(ctor.kwargs[0].value->kind == ExprKind::Str);
  CHECK(ctor.kwargs[1].name == "global_phase");
}

TEST_CASE("elif chains nest inside orelse") {
  Module mod = parse_source(
      "if a:\n"
      "    x = 1\n"
      "elif b:\n"
      "    x = 2\n"
      "else:\n"
      "    x = 3\n");
  const Stmt& top = mod.body[0];
  REQUIRE(top.kind == StmtKind::If);
  REQUIRE(top.orelse.size() == 1);
  const Stmt& elif = top.orelse[0];
  REQUIRE(elif.kind == StmtKind::If);
  CHECK(elif.exprs[0].text == "b");
  REQUIRE(elif.orelse.size() == 1);
  CHECK(elif.orelse[0].kind == StmtKind::Assign);
}

TEST_CASE("for loops carry target, iterable and body") {
  Module mod = parse_source(
      "for i in range(2):\n"
      "    qc.h(i)\n"
      "for a, b in pairs:\n"
      "    pass\n");
  const Stmt& loop = mod.body[0];
  REQUIRE(loop.kind == StmtKind::For);
  CHECK(loop.exprs[0].text == "i");
  CHECK(loop.exprs[1].kind == ExprKind::Call);
  REQUIRE(loop.body.size() == 1);

  const Stmt& tup_loop = mod.body[1];
  REQUIRE(tup_loop.exprs[0].kind == ExprKind::TupleLit);
  CHECK(tup_loop.exprs[0].children.size() == 2);
}

TEST_CASE("function definitions capture parameters and defaults") {
  Module mod = parse_source(
      "def build(n, depth=2, *args, **kwargs):\n"
      "    return n\n");
  const Stmt& def = mod.body[0];
  REQUIRE(def.kind == StmtKind::FunctionDef);
  CHECK(def.name == "build");
  REQUIRE(def.params.size() == 4);
  CHECK(def.params[0].name == "n");
  CHECK_FALSE(def.params[0].has_default);
  CHECK(def.params[1].has_default);
  CHECK(def.params[2].is_star);
  CHECK(def.params[3].is_double_star);
  REQUIRE(def.body.size() == 1);
  CHECK(def.body[0].kind == StmtKind::Return);
}

TEST_CASE("class definitions capture bases and body") {
  Module mod = parse_source(
      "class MyCircuit(QuantumCircuit):\n"
      "    def run(self):\n"
      "        pass\n");
  const Stmt& cls = mod.body[0];
  REQUIRE(cls.kind == StmtKind::ClassDef);
  CHECK(cls.name == "MyCircuit");
  REQUIRE(cls.bases.size() == 1);
  CHECK(cls.bases[0].text == "QuantumCircuit");
  REQUIRE(cls.body.size() == 1);
  CHECK(cls.body[0].kind == StmtKind::FunctionDef);
}

TEST_CASE("assignments support chains, augmented and annotated forms") {
  Module mod = parse_source("a = b = 1\nx += 2\nn: int = 5\ny: float\n");
  REQUIRE(mod.body[0].exprs.size() == 3);  // two targets plus value
  CHECK(mod.body[1].kind == StmtKind::AugAssign);
  CHECK(mod.body[1].text == "+=");
  CHECK(mod.body[2].kind == StmtKind::AnnAssign);
  CHECK(mod.body[2].has_value);
  CHECK(mod.body[3].kind == StmtKind::AnnAssign);
  CHECK_FALSE(mod.body[3].has_value);
}

TEST_CASE("subscripts cover indices, slices and open bounds") {
  Module mod = parse_source("a = q[0]\nb = q[1:3]\nc = q[:2]\nd = q[::2]\n");
  const Expr& idx = mod.body[0].exprs[1];
  REQUIRE(idx.kind == ExprKind::Subscript);
  CHECK(idx.children[1].kind == ExprKind::Num);

  const Expr& slice = mod.body[1].exprs[1].children[1];
  REQUIRE(slice.kind == ExprKind::SliceExpr);
  CHECK(slice.children[0].text == "1");
  CHECK(slice.children[1].text == "3");
  CHECK(slice.children[2].kind == ExprKind::Empty);

  const Expr& open_low = mod.body[2].exprs[1].children[1];
  CHECK(open_low.children[0].kind == ExprKind::Empty);
  CHECK(open_low.children[1].text == "2");

  const Expr& step_only = mod.body[3].exprs[1].children[1];
  CHECK(step_only.children[0].kind == ExprKind::Empty);
  CHECK(step_only.children[1].kind == ExprKind::Empty);
  CHECK(step_only.children[2].text == "2");
}

TEST_CASE("container displays and comprehensions parse") {
  Module mod = parse_source(
      "xs = [1, 2, 3]\n"
      "d = {'a': 1, 'b': 2}\n"
      "s = {1, 2}\n"
      "ys = [f(i) for i in range(3) if i]\n"
      "g = sum(x * x for x in xs)\n");
  CHECK(mod.body[0].exprs[1].kind == ExprKind::ListLit);
  CHECK(mod.body[1].exprs[1].kind == ExprKind::DictLit);
  CHECK(mod.body[1].exprs[1].children.size() == 4);  // key/value pairs flattened
  CHECK(mod.body[2].exprs[1].kind == ExprKind::SetLit);
  const Expr& comp = mod.body[3].exprs[1];
  REQUIRE(comp.kind == ExprKind::Comprehension);
  CHECK(comp.text == "list");
  REQUIRE(comp.comp_clauses.size() == 1);
  CHECK(comp.comp_clauses[0].target->text == "i");
  CHECK(comp.comp_clauses[0].conditions.size() == 1);
  const Expr& gen_call = mod.body[4].exprs[1];
  REQUIRE(gen_call.kind == ExprKind::Call);
  CHECK(gen_call.children[1].kind == ExprKind::Comprehension);
}

TEST_CASE("imports record dotted paths and aliases") {
  Module mod = parse_source(
      "import qiskit\n"
      "import numpy as np, math\n"
      "from qiskit.circuit import QuantumRegister as QR, ClassicalRegister\n"
      "from qiskit import *\n");
  CHECK(mod.body[0].aliases[0].module == "qiskit");
  REQUIRE(mod.body[1].aliases.size() == 2);
  CHECK(mod.body[1].aliases[0].asname == "np");
  CHECK(mod.body[2].from_module == "qiskit.circuit");
  CHECK(mod.body[2].aliases[0].asname == "QR");
  CHECK(mod.body[3].aliases[0].module == "*");
}

TEST_CASE("with and try statements bind their targets") {
  Module mod = parse_source(
      "with open('f') as fh:\n"
      "    data = fh.read()\n"
      "try:\n"
      "    risky()\n"
      "except ValueError as err:\n"
      "    handle(err)\n"
      "finally:\n"
      "    done()\n");
  const Stmt& with_stmt = mod.body[0];
  REQUIRE(with_stmt.with_items.size() == 1);
  CHECK(with_stmt.with_items[0].has_target);
  CHECK(with_stmt.with_items[0].target.text == "fh");

  const Stmt& try_stmt = mod.body[1];
  REQUIRE(try_stmt.handlers.size() == 1);
  CHECK(try_stmt.handlers[0].name == "err");
  CHECK(try_stmt.final_body.size() == 1);
}

TEST_CASE("operator precedence binds multiplication before addition") {
  Module mod = parse_source("x = 1 + 2 * 3\n");
  const Expr& add = mod.body[0].exprs[1];
  REQUIRE(add.kind == ExprKind::Binary);
  CHECK(add.text == "+");
  CHECK(add.children[1].text == "*");
}

TEST_CASE("unary minus wraps numeric literals") {
  Module mod = parse_source("qc.measure(-1, 0)\n");
  const Expr& call = mod.body[0].exprs[0];
  const Expr& arg = call.children[1];
  REQUIRE(arg.kind == ExprKind::Unary);
  CHECK(arg.text == "-");
  CHECK(arg.children[0].text == "1");
}

TEST_CASE("lambda expressions capture parameters") {
  Module mod = parse_source("f = lambda a, b=1: a + b\n");
  const Expr& lam = mod.body[0].exprs[1];
  REQUIRE(lam.kind == ExprKind::Lambda);
  REQUIRE(lam.lambda_params.size() == 2);
  CHECK(lam.lambda_params[1].has_default);
}

TEST_CASE("semicolons separate simple statements") {
  Module mod = parse_source("a = 1; b = 2; c = 3\n");
  CHECK(mod.body.size() == 3);
}

TEST_CASE("decorators attach to the following definition") {
  Module mod = parse_source(
      "@cached\n"
      "@register(name='x')\n"
      "def f():\n"
      "    pass\n");
  REQUIRE(mod.body.size() == 1);
  CHECK(mod.body[0].decorators.size() == 2);
}

TEST_CASE("conditional expressions parse as IfExp") {
  Module mod = parse_source("v = a if cond else b\n");
  CHECK(mod.body[0].exprs[1].kind == ExprKind::IfExp);
}

TEST_CASE("malformed input raises SyntaxError") {
  CHECK_THROWS_AS(parse_source("def f(:\n    pass\n"), SyntaxError);
  CHECK_THROWS_AS(parse_source("x = = 2\n"), SyntaxError);
  CHECK_THROWS_AS(parse_source("if x\n    pass\n"), SyntaxError);
  CHECK_THROWS_AS(parse_source("qc = QuantumCircuit(2,\n"), SyntaxError);
}

TEST_CASE("statement lines are 1-based and stable") {
  Module mod = parse_source("\n\nqc.h(0)\n");
  REQUIRE(mod.body.size() == 1);
  CHECK(mod.body[0].line == 3);
}
