#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "holicheck/name.hpp"
#include "holicheck/surface.hpp"
#include "holicheck/type.hpp"

namespace holi {

struct Term;
using TermPtr = std::shared_ptr<const Term>;

/// Resolved core term. Variables, methods, references and symbolic integers
/// are Names; evaluation boxes and holes exist only in machine states.
struct Term {
  enum class Kind {
    Unit, Int, Sym, Meth, Var, Lambda, Assign, Deref, BinOp,
    Pair, Proj, App, If, Let, Letrec, Assert, Box, Hole,
  };

  Kind kind = Kind::Unit;
  // Int: literal. Proj: 1 or 2. Box: the call counter before entry.
  std::int64_t value = 0;
  Op op = Op::Add;
  // Sym/Meth/Var: the name. Lambda: parameter. Assign/Deref: reference.
  // Let/Letrec: binder. Box: the called method.
  Name name;
  // Lambda: its arrow type.
  Type type;
  TermPtr a, b, c;
};

TermPtr mk_unit();
TermPtr mk_int(std::int64_t v);
TermPtr mk_sym(const Name& k);
TermPtr mk_meth(const Name& m);
TermPtr mk_var(const Name& x);
TermPtr mk_lambda(const Name& param, Type arrow, TermPtr body);
TermPtr mk_assign(const Name& r, TermPtr v);
TermPtr mk_deref(const Name& r);
TermPtr mk_binop(Op op, TermPtr l, TermPtr r);
TermPtr mk_pair(TermPtr l, TermPtr r);
TermPtr mk_proj(int j, TermPtr e);
TermPtr mk_app(TermPtr f, TermPtr arg);
TermPtr mk_if(TermPtr c, TermPtr t, TermPtr e);
TermPtr mk_let(const Name& x, TermPtr bound, TermPtr body);
TermPtr mk_letrec(const Name& f, TermPtr fn, TermPtr body);
TermPtr mk_assert(TermPtr e);
TermPtr mk_box(const Name& m, std::int64_t k, TermPtr e);
TermPtr mk_hole();

/// m | i | () | kappa | <v,v>
bool is_value(const TermPtr& t);
bool equal(const TermPtr& a, const TermPtr& b);
/// Typing of (symbolic) values: kappa is an int, m has its name's type.
bool value_has_type(const TermPtr& v, const Type& t);

/// Capture-free substitution of `v` for the variable `x` (values are closed).
TermPtr subst(const TermPtr& t, const Name& x, const TermPtr& v);
/// Replaces the unique hole of `ctx` by `t`.
TermPtr plug(const TermPtr& ctx, const TermPtr& t);

/// Meths(v): method names occurring in a value, left to right.
std::vector<Name> methods_of(const TermPtr& v);
/// Symbolic integers occurring anywhere in a term, left to right, no duplicates.
std::vector<Name> symints_of(const TermPtr& t);
bool contains_kind(const TermPtr& t, Term::Kind kind);
/// Bottom-up rebuild; `f` sees each node after its children were rebuilt.
TermPtr map_names(const TermPtr& t, const std::function<Name(const Name&)>& f);

std::string str(const TermPtr& t);

enum class Polarity { O, P };

/// A call or return crossing the library boundary.
struct Move {
  enum class Kind { Call, Ret };
  Kind kind = Kind::Call;
  Name method;
  TermPtr value;
  Polarity polarity = Polarity::O;

  /// m(v)? for calls, m(v)! for returns.
  std::string str() const;
};

using Trace = std::vector<Move>;

bool equal(const Move& a, const Move& b);
bool equal(const Trace& a, const Trace& b);
std::string str(const Trace& t);

}  // namespace holi
