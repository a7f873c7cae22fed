#include <gtest/gtest.h>

#include "holicheck/concrete.hpp"
#include "oracles.hpp"

using namespace holi;

namespace {

RunResult run(const std::string& src, int k = 100, RunOptions opts = {}) { return run_client(load(src), k, opts); }

TEST(Concrete, ArithmeticAndLet) {
  EXPECT_EQ(run("main = assert(1 + 2 * 3 == 7)").kind, RunResult::Kind::Terminated);
  EXPECT_EQ(run("main = assert(1 + 2 * 3 == 9)").kind, RunResult::Kind::Failed);
  EXPECT_EQ(run("main = let p = (4, 5) in assert(snd p - fst p == 1)").kind, RunResult::Kind::Terminated);
}

TEST(Concrete, StoreUpdates) {
  RunResult r = run("int a := 1; main = (a := !a + 41; assert(!a == 42))");
  EXPECT_EQ(r.kind, RunResult::Kind::Terminated);
}

TEST(Concrete, LambdaAllocatesAMethodAndCallsAreBoxed) {
  RunResult r = run("main = let f = fun(x:int):(int) -> x + 1 in assert(f(1) == 2)", 10, {.record_history = true});
  ASSERT_EQ(r.kind, RunResult::Kind::Terminated);
  int max_k = 0;
  bool saw_box = false;
  for (const TermConfig& c : r.history) {
    max_k = std::max(max_k, c.k);
    saw_box = saw_box || contains_kind(c.term, Term::Kind::Box);
  }
  EXPECT_EQ(max_k, 1);
  EXPECT_TRUE(saw_box);
  EXPECT_EQ(r.final.k, 0);
  EXPECT_EQ(r.final.R.size(), 1u);
}

TEST(Concrete, SingleSteps) {
  TypedLibrary l = load("main = ()");
  NameSupply supply = l.supply;
  TermConfig c{mk_binop(Op::Add, mk_int(2), mk_int(3)), {}, {}, 0};
  StepResult s = step(c, supply);
  EXPECT_EQ(s.kind, StepResult::Kind::Stepped);
  EXPECT_EQ(s.rule, Term::Kind::BinOp);
  EXPECT_TRUE(equal(c.term, mk_int(5)));
  EXPECT_EQ(step(c, supply).kind, StepResult::Kind::Value);

  TermConfig f{mk_assert(mk_int(0)), {}, {}, 0};
  EXPECT_EQ(step(f, supply).kind, StepResult::Kind::Failed);

  Name x = supply.fresh(Sort::Variable, Type::integer());
  TermConfig app{mk_app(mk_lambda(x, Type::arrow(Type::integer(), Type::integer()), mk_var(x)), mk_int(7)), {}, {}, 0};
  EXPECT_EQ(step(app, supply).rule, Term::Kind::Lambda);
  ASSERT_EQ(app.R.size(), 1u);
  StepResult call = step(app, supply);
  EXPECT_EQ(call.rule, Term::Kind::App);
  EXPECT_EQ(app.k, 1);
  EXPECT_EQ(app.term->kind, Term::Kind::Box);
  step(app, supply);
  EXPECT_EQ(app.k, 0);
  EXPECT_TRUE(equal(app.term, mk_int(7)));
}

TEST(Concrete, LetrecRecursion) {
  const char* fact =
      "main = letrec f = fun(n:int):(int) -> if (n <= 1) then 1 else n * f(n - 1) in assert(f(5) == 120)";
  EXPECT_EQ(run(fact).kind, RunResult::Kind::Terminated);
  EXPECT_EQ(run(fact, 3).kind, RunResult::Kind::BoundExhausted);
}

TEST(Concrete, FunctionReferenceHoldsAMethodName) {
  EXPECT_EQ(run("private inc (x:int) :(int) = x + 1; fun h := inc; main = assert((!h)(1) == 2)").kind,
            RunResult::Kind::Terminated);
}

TEST(Concrete, LinkedDaoAttackFails) {
  RunResult r = run_client(oracle::sample("linked_dao_atk.holi"), 200);
  EXPECT_EQ(r.kind, RunResult::Kind::Failed);
}

TEST(Concrete, LinkChecksCompatibility) {
  TypedLibrary dao = oracle::sample("dao.holi");
  TypedLibrary good = oracle::sample("dao_atk_client.holi");
  TypedLibrary linked = link(dao, good);
  EXPECT_TRUE(linked.is_client());
  RunResult r = run_client(linked, 300, {.record_history = false, .record_boundary = true});
  EXPECT_EQ(r.kind, RunResult::Kind::Terminated);
  ASSERT_FALSE(r.boundary.empty());
  EXPECT_EQ(r.boundary.front().str(), "wdraw(1)?");

  EXPECT_THROW(link(dao, load("import nothere :(int -> unit) public send (x:int) :(unit) = (); main = ()")),
               IncompatibleError);
  EXPECT_THROW(link(dao, load("import wdraw :(int -> unit) main = ()")), IncompatibleError);
  EXPECT_THROW(link(dao, load("import wdraw :(int -> unit) int bal := 0; public send (x:int) :(unit) = (); main = ()")),
               IncompatibleError);
  EXPECT_THROW(link(dao, load("import wdraw :(int -> int) public send (x:int) :(unit) = (); main = ()")),
               IncompatibleError);
}

Trace dao_trace(const TypedLibrary& l, std::int64_t x1, std::int64_t x2) {
  Name w = *l.global("wdraw"), s = *l.global("send");
  auto call = [](const Name& m, TermPtr v, Polarity p) { return Move{Move::Kind::Call, m, v, p}; };
  auto ret = [](const Name& m, Polarity p) { return Move{Move::Kind::Ret, m, mk_unit(), p}; };
  return {call(w, mk_int(x1), Polarity::O), call(s, mk_int(x1), Polarity::P), call(w, mk_int(x2), Polarity::O),
          call(s, mk_int(x2), Polarity::P), ret(s, Polarity::O),           ret(w, Polarity::P),
          ret(s, Polarity::O)};
}

TEST(Concrete, ReplayDaoReachesTheAssertion) {
  TypedLibrary l = oracle::sample("dao.holi");
  ReplayResult r = replay(l, dao_trace(l, 100, 1), {2, 1});
  ASSERT_TRUE(std::holds_alternative<Reaches>(r)) << std::get<Diverges>(r).reason;
  const Reaches& reach = std::get<Reaches>(r);
  EXPECT_EQ(reach.status, GameStep::Kind::Failed);
  EXPECT_EQ(str(reach.played), str(dao_trace(l, 100, 1)));
}

TEST(Concrete, ReplayWithHarmlessValuesDoesNotFail) {
  TypedLibrary l = oracle::sample("dao.holi");
  ReplayResult r = replay(l, dao_trace(l, 10, 10), {2, 1});
  ASSERT_TRUE(std::holds_alternative<Reaches>(r));
  EXPECT_NE(std::get<Reaches>(r).status, GameStep::Kind::Failed);
}

TEST(Concrete, ReplayDetectsDivergence) {
  TypedLibrary l = oracle::sample("dao.holi");
  Trace t = dao_trace(l, 100, 1);
  t[1].value = mk_int(99);
  ReplayResult r = replay(l, t, {2, 1});
  ASSERT_TRUE(std::holds_alternative<Diverges>(r));
  EXPECT_EQ(std::get<Diverges>(r).index, 1u);
  // wdraw(1000) skips the send: P answers with a return instead of the call.
  Trace u = dao_trace(l, 1000, 1);
  ASSERT_TRUE(std::holds_alternative<Diverges>(replay(l, u, {2, 1})));
}

TEST(Concrete, OpponentMovesAreValidated) {
  TypedLibrary l = oracle::sample("dao.holi");
  GameConfig g = initial_config(build(l));
  Name w = *l.global("wdraw"), s = *l.global("send");
  EXPECT_THROW(apply_o_move(g, {Move::Kind::Call, s, mk_int(1), Polarity::O}, {2, 1}), IllegalMove);
  EXPECT_THROW(apply_o_move(g, {Move::Kind::Call, w, mk_unit(), Polarity::O}, {2, 1}), IllegalMove);
  EXPECT_THROW(apply_o_move(g, {Move::Kind::Ret, w, mk_unit(), Polarity::O}, {2, 1}), IllegalMove);
  EXPECT_THROW(apply_o_move(g, {Move::Kind::Call, w, mk_int(1), Polarity::O}, {2, 0}), IllegalMove);
  GameConfig p = apply_o_move(g, {Move::Kind::Call, w, mk_int(1), Polarity::O}, {2, 1});
  EXPECT_EQ(p.polarity, Polarity::P);
  EXPECT_EQ(p.stack.size(), 1u);
}

TEST(Concrete, BuildSeparatesPublicAndAbstract) {
  BuildResult b = build(oracle::sample("filelock.holi"));
  ASSERT_EQ(b.pub.size(), 1u);
  ASSERT_EQ(b.abs.size(), 1u);
  EXPECT_EQ(b.pub.items()[0].str(), "openFile");
  EXPECT_EQ(b.abs.items()[0].str(), "userExec");
  EXPECT_EQ(b.R.size(), 2u);
  EXPECT_EQ(b.S.size(), 1u);
}

}  // namespace
