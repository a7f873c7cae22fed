#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "holicheck/concrete.hpp"
#include "holicheck/solver.hpp"
#include "holicheck/symbolic.hpp"
#include "holicheck/typecheck.hpp"

namespace holi {

struct ExploreOptions {
  enum class Policy { Lazy, Eager };
  enum class Mode { Exhaustive, FirstFailure };

  Bounds bounds;
  /// Lazy: solve at Failed leaves only. Eager: also prune each symbolic branch.
  Policy policy = Policy::Lazy;
  Mode mode = Mode::Exhaustive;
  SolverConfig solver;
  /// Offsets every fresh-name counter; canonical results do not depend on it.
  std::uint32_t seed = 0;
  std::optional<std::chrono::milliseconds> timeout;
  /// Also report Terminated and BoundExhausted leaves.
  bool keep_all_leaves = false;
};

struct Finding {
  enum class Verdict { Confirmed, UnconfirmedSat };
  enum class Classification { Failed, Terminated, BoundExhausted };

  Trace trace;
  PathCondition pc;
  SymEnv sigma;
  Verdict verdict = Verdict::UnconfirmedSat;
  /// Set when Confirmed.
  Model model;
  Classification classification = Classification::Failed;
  /// Why the verdict is not Confirmed (solver reason), if any.
  std::string note;

  bool confirmed() const { return verdict == Verdict::Confirmed; }
  bool failed() const { return classification == Classification::Failed; }
  /// pc /\ sigma°, over every symbolic integer of the trace and environment.
  Formula formula() const;
};

struct ExploreStats {
  std::size_t leaves = 0;
  std::size_t failed = 0;
  std::size_t bound_exhausted = 0;
  std::size_t solver_calls = 0;
  std::int64_t millis = 0;
  bool timed_out = false;
};

struct Exploration {
  std::vector<Finding> findings;
  ExploreStats stats;
  /// Pub and Abs of the initial configuration.
  NameSet pub;
  NameSet abs;
};

Exploration explore(const TypedLibrary& lib, const ExploreOptions& opts = {});

/// Renames introduced (unlabelled) names to m1, m2, ... and k1, k2, ... in
/// order of first occurrence. Reusable across terms so that a trace, its path
/// condition and its model stay consistent.
class Canonicalizer {
 public:
  Name operator()(const Name& n);
  TermPtr operator()(const TermPtr& t);
  Move operator()(const Move& m);
  Trace operator()(const Trace& t);
  Atom operator()(const Atom& a);

 private:
  std::map<Name, Name> map_;
  std::uint32_t methods_ = 0;
  std::uint32_t symints_ = 0;
  std::uint32_t others_ = 0;
};

Trace canonicalize(const Trace& tau);

/// The finding's trace with every symbolic integer replaced through its model.
Trace concretize(const Finding& f);

/// Findings in report order: canonical trace text, then length.
std::vector<const Finding*> report_order(const std::vector<Finding>& findings);

enum class ReportFormat { Text, Json };

struct ReportContext {
  std::string library;
  Bounds bounds;
  /// Per-finding round-trip verdicts, in report order, when requested.
  std::vector<std::string> roundtrip;
};

std::string report(const Exploration& e, ReportFormat format, const ReportContext& ctx);

}  // namespace holi
