#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "holicheck/name.hpp"
#include "holicheck/term.hpp"
#include "holicheck/typecheck.hpp"

namespace holi {

/// Method repository R: method name to its lambda.
using Repo = std::map<Name, TermPtr>;
/// Store S: reference name to value.
using Store = std::map<Name, TermPtr>;

struct Bounds {
  int k = 2;
  int l = 1;
};

struct BuildResult {
  Repo R;
  Store S;
  NameSet pub;
  NameSet abs;
  /// Which component declared each method in R (lambdas inherit from their declaration).
  std::map<Name, Origin> owner;
  NameSupply supply;
};

BuildResult build(const TypedLibrary& lib);

struct TermConfig {
  TermPtr term;
  Repo R;
  Store S;
  int k = 0;
};

struct StepResult {
  enum class Kind {
    Stepped,
    Value,          // term is a value
    Failed,         // E[assert(0)]
    External,       // E[m v] with m outside dom(R)
    BoundExceeded,  // a call would exceed k0
  };
  Kind kind = Kind::Stepped;
  /// The redex that fired (or would have fired).
  Term::Kind rule = Term::Kind::Unit;
  // App: the called method and its argument. Box: the returning method and its
  // value. Lambda/Letrec: the method just allocated.
  Name method;
  TermPtr arg;
  // External: the context around the call.
  TermPtr context;
  /// Method of the innermost evaluation box around the redex.
  std::optional<Name> enclosing;
};

/// One reduction of the operational semantics, in place. `k0 < 0` disables the bound.
StepResult step(TermConfig& c, NameSupply& supply, int k0 = -1);

/// Syntactic linking: checks compatibility, strips imports and `public`,
/// concatenates and re-typechecks. Declarations keep their component of origin.
TypedLibrary link(const TypedLibrary& lib, const TypedLibrary& client);
surface::SourceLibrary link_source(const surface::SourceLibrary& lib, const surface::SourceLibrary& client);

struct RunResult {
  enum class Kind { Terminated, Failed, BoundExhausted };
  Kind kind = Kind::Terminated;
  TermPtr value;
  TermConfig final;
  std::size_t steps = 0;
  /// Every configuration visited, when requested.
  std::vector<TermConfig> history;
  /// Calls and returns that cross between Library- and Client-owned methods.
  Trace boundary;
};

struct RunOptions {
  bool record_history = false;
  /// Observe crossings using the declaration origins of the linked program.
  bool record_boundary = false;
};

RunResult run_client(const TypedLibrary& client, int k0, const RunOptions& opts = {});

// ---------------------------------------------------------------------------
// Game LTS

struct GameFrame {
  Name method;
  /// Set for (m, E) frames: P's context waiting for O's answer.
  TermPtr context;
  /// (m, l) frames: O's counter to restore on P's answer.
  int l = 0;
  bool is_context() const { return context != nullptr; }
};

struct GameConfig {
  Polarity polarity = Polarity::O;
  std::vector<GameFrame> stack;  // top is back()
  TermPtr term;                  // P only
  int l = 0;                     // O only
  Repo R;
  Store S;
  NameSet pub;
  NameSet abs;
  int k = 0;
  NameSupply supply;
};

GameConfig initial_config(const BuildResult& b);

/// Supplies Opponent moves for concrete play.
class ODriver {
 public:
  virtual ~ODriver() = default;
  /// The next O-move, or nothing to stop. Fresh names in the payload must be
  /// taken from `g.supply` through `mint`.
  virtual std::optional<Move> next(const GameConfig& g, NameSupply& mint) = 0;
};

struct GameStep {
  enum class Kind {
    Moved,           // `move` was played, `config` is the target
    Failed,          // P reached E[assert(0)]
    BoundExhausted,  // a call or an O-call pruned by the bounds
    Stopped,         // O has nothing to play
  };
  Kind kind = Kind::Moved;
  std::optional<Move> move;
  GameConfig config;
};

/// P-configs run internal steps to quiescence and then play PQ or PA.
/// O-configs ask the driver and validate the proposal (IllegalMove otherwise).
GameStep game_step(const GameConfig& g, ODriver& driver, const Bounds& bounds);

/// Checks a proposed O-move against the rules and returns the target P-config.
GameConfig apply_o_move(const GameConfig& g, const Move& mv, const Bounds& bounds);

struct Reaches {
  GameConfig config;
  /// Failed when P reached E[assert(0)] after the last move.
  GameStep::Kind status = GameStep::Kind::Stopped;
  /// The concrete trace actually played (fresh names as minted during replay).
  Trace played;
};

struct Diverges {
  std::size_t index = 0;
  std::string reason;
};

using ReplayResult = std::variant<Reaches, Diverges>;

/// Plays `tau`'s O-moves against the library and checks P's answers match,
/// up to a bijective renaming of the names introduced along the way.
ReplayResult replay(const TypedLibrary& lib, const Trace& tau, const Bounds& bounds);

}  // namespace holi
