#include <gtest/gtest.h>

#include "holicheck/typecheck.hpp"
#include "oracles.hpp"

using namespace holi;

namespace {

TypedLibrary lib(const std::string& src) { return load(src); }

TEST(Typecheck, AcceptsEverySample) {
  for (const char* name : {"dao.holi", "filelock.holi", "doublefree.holi", "flatcombiner.holi", "safe.holi",
                           "micro.holi", "recursive.holi", "linked_dao_atk.holi", "trivial_main.holi",
                           "dao_atk_client.holi"}) {
    SCOPED_TRACE(name);
    EXPECT_NO_THROW(oracle::sample(name));
  }
}

TEST(Typecheck, DeclaredNamesAreResolved) {
  TypedLibrary l = oracle::sample("dao.holi");
  const Name* wdraw = l.global("wdraw");
  const Name* send = l.global("send");
  const Name* bal = l.global("bal");
  ASSERT_TRUE(wdraw && send && bal);
  EXPECT_EQ(wdraw->sort, Sort::Method);
  EXPECT_EQ(bal->sort, Sort::Reference);
  EXPECT_EQ(wdraw->type, Type::arrow(Type::integer(), Type::unit()));
  EXPECT_EQ(send->str(), "send");
}

TEST(Typecheck, AcceptsPerRule) {
  EXPECT_NO_THROW(lib("main = let x = 1 in assert(x + 1 == 2)"));
  EXPECT_NO_THROW(lib("main = let p = (1, ()) in assert(fst p)"));
  EXPECT_NO_THROW(lib("main = assert((fun(x:int):(int) -> x * 2)(3) == 6)"));
  EXPECT_NO_THROW(lib("main = letrec f = fun(n:int):(int) -> if (n <= 0) then 0 else f(n - 1) in assert(f(3) == 0)"));
  EXPECT_NO_THROW(lib("int r := 0; main = (r := !r + 1; assert(!r))"));
  EXPECT_NO_THROW(lib("private id (x:int) :(int) = x; fun h := id; main = assert((!h)(1))"));
  EXPECT_NO_THROW(lib("fun h := fun(x:int):(int) -> x; main = (h := (fun(y:int):(int) -> y + 1); ())"));
  EXPECT_NO_THROW(lib("import cb :((int -> int) -> unit) public f (x:int) :(unit) = cb(fun(y:int):(int) -> y + x);"));
}

TEST(Typecheck, RejectsPerRule) {
  EXPECT_THROW(lib("main = assert(())"), TypeError);                                  // assert needs int
  EXPECT_THROW(lib("main = if () then () else ()"), TypeError);                       // condition needs int
  EXPECT_THROW(lib("main = if 1 then 1 else ()"), TypeError);                         // branches disagree
  EXPECT_THROW(lib("main = (1 + ())"), TypeError);                                     // arithmetic on unit
  EXPECT_THROW(lib("main = 1(2)"), TypeError);                                         // applying an int
  EXPECT_THROW(lib("main = y"), TypeError);                                            // unbound
  EXPECT_THROW(lib("int r := 0; main = (r; ())"), TypeError);                          // bare reference
  EXPECT_THROW(lib("main = !nope"), TypeError);                                        // unknown reference
  EXPECT_THROW(lib("int r := 0; main = r := ()"), TypeError);                          // int ref gets unit
  EXPECT_THROW(lib("main = 1"), TypeError);                                            // main must be unit
  EXPECT_THROW(lib("main = fst 1"), TypeError);                                        // projection of int
  EXPECT_THROW(lib("main = letrec f = 1 in ()"), Error);                               // letrec needs a lambda
  EXPECT_THROW(lib("import x :(int) main = ()"), TypeError);                           // import needs arrow
  EXPECT_THROW(lib("private f (x:int) :(unit) = x;"), TypeError);                      // body vs result type
  EXPECT_THROW(lib("fun h := 3;"), Error);                                             // fun ref initialiser
  EXPECT_THROW(lib("private f (x:int) :(int) = x; private f (y:int) :(int) = y;"), Error);  // duplicate
}

TEST(Typecheck, VariablesShadowMethods) {
  EXPECT_NO_THROW(lib("private f (x:int) :(int) = x; main = let f = 2 in assert(f == 2)"));
}

TEST(Typecheck, SeedOffsetsDeclaredUids) {
  auto a = typecheck(surface::parse_any(oracle::read_sample("dao.holi")), 0);
  auto b = typecheck(surface::parse_any(oracle::read_sample("dao.holi")), 50);
  EXPECT_NE(a.global("wdraw")->uid, b.global("wdraw")->uid);
  EXPECT_EQ(a.global("wdraw")->str(), b.global("wdraw")->str());
}

}  // namespace
