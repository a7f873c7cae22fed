#include <gtest/gtest.h>

#include <algorithm>

#include "oracles.hpp"

using namespace holi;

namespace {

const std::vector<std::int64_t> kInts{-2, -1, 0, 1, 2};

std::set<std::string> symbolic_instances(const Exploration& e) {
  std::set<std::string> out;
  for (const Finding& f : e.findings)
    if (f.failed()) oracle::instances(f, kInts, out);
  return out;
}

void expect_same_failures(const std::string& name, Bounds b) {
  TypedLibrary l = oracle::sample(name);
  ExploreOptions o;
  o.bounds = b;
  Exploration e = explore(l, o);
  std::set<std::string> sym = symbolic_instances(e);
  oracle::BruteForce bf(l, b, kInts);
  std::set<std::string> conc = bf.failures();
  EXPECT_GT(bf.plays(), 0u);
  std::vector<std::string> missed, spurious;
  std::set_difference(conc.begin(), conc.end(), sym.begin(), sym.end(), std::back_inserter(missed));
  std::set_difference(sym.begin(), sym.end(), conc.begin(), conc.end(), std::back_inserter(spurious));
  EXPECT_TRUE(missed.empty()) << name << " misses " << missed.size() << ", e.g. " << (missed.empty() ? "" : missed[0]);
  EXPECT_TRUE(spurious.empty()) << name << " over-reports " << spurious.size() << ", e.g. "
                                << (spurious.empty() ? "" : spurious[0]);
  EXPECT_FALSE(conc.empty()) << name;
}

TEST(Properties, MicroMatchesConcreteEnumeration) { expect_same_failures("micro.holi", {2, 2}); }
TEST(Properties, DaoMatchesConcreteEnumerationOnSmallInts) {
  // With inputs in -2..2 the balance never goes negative.
  TypedLibrary l = oracle::sample("dao.holi");
  oracle::BruteForce bf(l, {2, 1}, kInts);
  EXPECT_TRUE(bf.failures().empty());
}
TEST(Properties, FilelockMatchesConcreteEnumeration) { expect_same_failures("filelock.holi", {2, 2}); }
TEST(Properties, DoublefreeMatchesConcreteEnumeration) { expect_same_failures("doublefree.holi", {3, 2}); }

TEST(Properties, FailuresGrowWithTheBounds) {
  for (const char* name : {"dao.holi", "filelock.holi", "micro.holi", "doublefree.holi"}) {
    TypedLibrary l = oracle::sample(name);
    std::map<std::pair<int, int>, std::set<std::string>> grid;
    for (int k = 1; k <= 3; ++k)
      for (int l0 = 1; l0 <= 2; ++l0) {
        ExploreOptions o;
        o.bounds = {k, l0};
        Exploration e = explore(l, o);
        EXPECT_FALSE(e.stats.timed_out);
        grid[{k, l0}] = oracle::failure_set(e);
      }
    for (auto& [kl, s] : grid) {
      auto up = grid.find({kl.first + 1, kl.second});
      auto right = grid.find({kl.first, kl.second + 1});
      if (up != grid.end()) EXPECT_TRUE(std::includes(up->second.begin(), up->second.end(), s.begin(), s.end())) << name;
      if (right != grid.end())
        EXPECT_TRUE(std::includes(right->second.begin(), right->second.end(), s.begin(), s.end())) << name;
    }
  }
}

TEST(Properties, LeavesAreClassified) {
  ExploreOptions o;
  o.bounds = {2, 2};
  o.keep_all_leaves = true;
  Exploration e = explore(oracle::sample("filelock.holi"), o);
  std::size_t failed = 0, bound = 0, term = 0;
  for (const Finding& f : e.findings) {
    switch (f.classification) {
      case Finding::Classification::Failed: ++failed; break;
      case Finding::Classification::BoundExhausted: ++bound; break;
      case Finding::Classification::Terminated: ++term; break;
    }
  }
  EXPECT_EQ(failed, e.stats.failed);
  EXPECT_EQ(bound, e.stats.bound_exhausted);
  EXPECT_EQ(failed + bound + term, e.stats.leaves);
}

}  // namespace
