#include <gtest/gtest.h>

#include "holicheck/surface.hpp"
#include "oracles.hpp"

using namespace holi;
using namespace holi::surface;

namespace {

const char* kSamples[] = {"dao.holi",       "filelock.holi", "doublefree.holi",     "flatcombiner.holi",
                          "safe.holi",      "micro.holi",    "recursive.holi",      "linked_dao_atk.holi",
                          "trivial_main.holi", "dao_atk_client.holi"};

TEST(Surface, PrintThenParseIsIdentity) {
  for (const char* name : kSamples) {
    SCOPED_TRACE(name);
    SourceLibrary lib = parse_any(oracle::read_sample(name));
    std::string printed = print(lib);
    SourceLibrary again = parse_any(printed);
    EXPECT_TRUE(same(lib, again)) << printed;
    EXPECT_EQ(print(again), printed);
  }
}

TEST(Surface, PrecedenceAndAssociativity) {
  auto e = [](const std::string& src) {
    return parse("main = assert(" + src + ")", FileKind::Client).main->a;
  };
  ExprPtr m = e("1 + 2 * 3");
  ASSERT_EQ(m->kind, Expr::Kind::BinOp);
  EXPECT_EQ(m->op, Op::Add);
  EXPECT_EQ(m->b->op, Op::Mul);
  ExprPtr s = e("10 - 3 - 2");
  EXPECT_EQ(s->op, Op::Sub);
  EXPECT_EQ(s->a->kind, Expr::Kind::BinOp);
  ExprPtr c = e("1 < 2 && 3 >= 4 || 0");
  EXPECT_EQ(c->op, Op::Or);
  EXPECT_EQ(c->a->op, Op::And);
}

TEST(Surface, BothGuardStylesParse) {
  const char* a = "int balance := 1; public w (m:int) :(unit) = if not(!balance < m) then () else ();";
  const char* b = "int bal := 1; public w (x:int) :(unit) = if (!bal >= x) then () else ();";
  EXPECT_NO_THROW(parse(a, FileKind::Library));
  EXPECT_NO_THROW(parse(b, FileKind::Library));
}

TEST(Surface, ErrorsCarryPositionAndExpectation) {
  try {
    parse("int x := 0;\npublic f (y:int) :(unit) = ;", FileKind::Library);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.pos().line, 2);
    EXPECT_GT(e.pos().column, 1);
    EXPECT_FALSE(e.expected().empty());
  }
  EXPECT_THROW(parse("public f (y:int) :(unit) = ()", FileKind::Client), ParseError);
  EXPECT_THROW(parse("main = ()", FileKind::Library), ParseError);
  EXPECT_THROW(parse("int x := 0; int x := 1;", FileKind::Library), Error);
}

TEST(Surface, CommentsAreSkipped) {
  SourceLibrary lib = parse("# hash\n// slashes\nint x := 3; // trailing\n", FileKind::Library);
  ASSERT_EQ(lib.decls.size(), 1u);
  EXPECT_EQ(lib.decls[0].init, 3);
}

TEST(Surface, DesugarRemovesSequencingNotAndNegation) {
  SourceLibrary lib = parse("main = (assert(not 0); assert(-(1) < 0))", FileKind::Client);
  ExprPtr e = desugar(lib.main);
  ASSERT_EQ(e->kind, Expr::Kind::Let);
  EXPECT_EQ(e->name, "_");
  ExprPtr first = e->a->a;
  EXPECT_EQ(first->kind, Expr::Kind::BinOp);
  EXPECT_EQ(first->op, Op::Eq);
  ExprPtr second = e->b->a;
  EXPECT_EQ(second->a->kind, Expr::Kind::BinOp);
  EXPECT_EQ(second->a->op, Op::Sub);
  std::function<bool(const ExprPtr&)> sugar_free = [&](const ExprPtr& x) -> bool {
    if (!x) return true;
    if (x->kind == Expr::Kind::Seq || x->kind == Expr::Kind::Not || x->kind == Expr::Kind::Neg) return false;
    return sugar_free(x->a) && sugar_free(x->b) && sugar_free(x->c);
  };
  EXPECT_TRUE(sugar_free(e));
}

TEST(Surface, OperatorsWrapOnOverflow) {
  EXPECT_EQ(apply_op(Op::Add, INT64_MAX, 1), INT64_MIN);
  EXPECT_EQ(apply_op(Op::Lt, 1, 2), 1);
  EXPECT_EQ(apply_op(Op::And, 2, 0), 0);
  EXPECT_EQ(apply_op(Op::Or, 0, -3), 1);
}

}  // namespace
