#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "holicheck/name.hpp"
#include "holicheck/persistent.hpp"
#include "holicheck/term.hpp"

namespace holi {

/// lhs = rhs or lhs != rhs over integer expressions built from literals,
/// symbolic integers and binary operators.
struct Atom {
  enum class Rel { Eq, Ne };
  Rel rel = Rel::Eq;
  TermPtr lhs;
  TermPtr rhs;
};

std::string str(const Atom& a);

/// Conjunction of atoms over the declared symbolic integers.
struct Formula {
  std::vector<Name> declared;
  std::vector<Atom> atoms;
};

using Model = std::map<Name, std::int64_t>;

/// Symbolic environment: references and defined symbolic integers to symbolic values.
using SymEnv = CowMap<Name, TermPtr>;
using PathCondition = PList<Atom>;

/// sigma°: one equality per symbolic-integer binding; references contribute nothing.
std::vector<Atom> sigma_formula(const SymEnv& sigma);

/// pc /\ sigma°, declaring every symbolic integer of `declared` and of the atoms.
Formula path_formula(const PathCondition& pc, const SymEnv& sigma, const std::vector<Name>& declared = {});

struct Sat {
  Model model;
};
struct Unsat {};
struct Unknown {
  std::string reason;
};
using SatResult = std::variant<Sat, Unsat, Unknown>;

struct SolverConfig {
  enum class Backend { Builtin, External };
  Backend backend = Backend::Builtin;
  /// Builtin: free variables range over [-box, box].
  std::int64_t box = 1024;
  /// External: command line, split on whitespace (e.g. "z3 -in").
  std::string command;
};

SatResult check_sat(const Formula& phi, const SolverConfig& cfg = {});
SatResult check_sat_builtin(const Formula& phi, std::int64_t box = 1024);
SatResult check_sat_external(const Formula& phi, const std::string& command);

/// Value of an integer expression (UnboundSymbol if a symbol is missing).
std::int64_t eval_model(const Model& m, const TermPtr& e);
bool eval_model(const Model& m, const Atom& a);
bool eval_model(const Model& m, const Formula& phi);
/// M{M}: every symbolic integer replaced by its value.
TermPtr concretize(const Model& m, const TermPtr& t);
Trace concretize(const Model& m, const Trace& t);

/// SMT-LIB term for an integer expression.
std::string smt_term(const TermPtr& e);
/// SMT-LIB term for a whole formula (a conjunction).
std::string smt_formula(const std::vector<Atom>& atoms);
std::string emit_smtlib(const Formula& phi);

/// Minimal S-expression reader, used for solver replies.
struct SExpr {
  std::string atom;
  std::vector<SExpr> list;
  bool is_atom() const { return list.empty() && !atom.empty(); }
};
std::vector<SExpr> parse_sexprs(const std::string& text);

/// Parses a check-sat / get-model reply; symbols are resolved through `declared`.
SatResult parse_reply(const std::string& reply, const std::vector<Name>& declared);

}  // namespace holi
