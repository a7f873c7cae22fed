#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "holicheck/concrete.hpp"
#include "holicheck/name.hpp"
#include "holicheck/persistent.hpp"
#include "holicheck/solver.hpp"
#include "holicheck/term.hpp"

namespace holi {

/// One layer of evaluation context: `parent` with a hole at child `slot`.
struct SymFrame {
  TermPtr parent;
  int slot = 0;
};
using Context = PList<SymFrame>;

/// Rebuilds E[t] from a context (innermost frame first).
TermPtr plug(const Context& ctx, TermPtr t);

/// (M, R, sigma, pc, k), with M split into the focused subterm and its context.
struct SymTermConfig {
  TermPtr focus;
  Context ctx;
  CowMap<Name, TermPtr> R;
  SymEnv sigma;
  PathCondition pc;
  int k = 0;
  NameSupply supply;

  TermPtr term() const { return plug(ctx, focus); }
};

struct SymStep {
  enum class Kind {
    Stepped,        // `next` holds one successor, or two after a symbolic branch
    Value,          // the whole term is a value
    Failed,         // E[assert(0)]
    External,       // E[m v] with m outside dom(R)
    BoundExceeded,  // a call would exceed k0
  };
  Kind kind = Kind::Stepped;
  std::vector<SymTermConfig> next;
  // External: the call, with `ctx` as E.
  Name method;
  TermPtr arg;
};

/// One rule of the symbolic term semantics. `k0 < 0` disables the bound.
/// Branches come out as (then, else) for `if` and (fail, pass) for `assert`.
SymStep sym_step(const SymTermConfig& c, int k0 = -1);

/// A fresh symbolic value of type `t`, every name in it new and added to `abs`.
TermPtr symval(const Type& t, NameSet& abs, NameSupply& supply);

struct SymGameFrame {
  Name method;
  /// (m, E) frames hold P's suspended context.
  bool is_context = false;
  Context ctx;
  /// (m, l) frames hold O's counter.
  int l = 0;
};

struct SymGameConfig {
  Polarity polarity = Polarity::O;
  PList<SymGameFrame> stack;
  /// P: focus/ctx hold the term. Both polarities: R, sigma, pc, k, supply.
  SymTermConfig t;
  int l = 0;
  NameSet pub;
  NameSet abs;
  PList<Move> trace;
};

SymGameConfig initial_sym_config(const BuildResult& b);

struct SymGameStep {
  enum class Leaf { None, Failed, BoundExhausted, Terminated };
  /// Successors in exploration order; internal steps carry no move.
  std::vector<std::pair<std::optional<Move>, SymGameConfig>> next;
  Leaf leaf = Leaf::None;
  /// Internal symbolic branch: the successors differ in one complementary pc atom.
  bool branch = false;
};

SymGameStep sym_game_step(const SymGameConfig& g, const Bounds& bounds);

}  // namespace holi
