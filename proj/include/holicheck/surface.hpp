#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "holicheck/error.hpp"
#include "holicheck/type.hpp"

namespace holi {

/// Binary integer operators. Comparisons and the logical connectives are
/// int-valued: 0 is false, anything else true, results are 0 or 1.
enum class Op { Add, Sub, Mul, Lt, Gt, Le, Ge, Eq, Ne, And, Or };

std::string_view op_symbol(Op op);
/// SMT-free reference semantics of an operator (wrapping on overflow).
std::int64_t apply_op(Op op, std::int64_t a, std::int64_t b);

namespace surface {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Untyped, unresolved syntax tree as written in a .holi file.
struct Expr {
  enum class Kind {
    Unit, Int, Ident, Lambda, Assign, Deref, BinOp, Not, Neg,
    Pair, Fst, Snd, App, If, Let, Letrec, Assert, Seq,
  };

  Kind kind = Kind::Unit;
  SourcePos pos;
  std::int64_t value = 0;
  Op op = Op::Add;
  // Identifier, reference, lambda parameter or let/letrec binder.
  std::string name;
  // Lambda: parameter and result type. Let/Letrec: optional binder annotation.
  std::optional<Type> type;
  std::optional<Type> result_type;
  ExprPtr a, b, c;
};

ExprPtr make(Expr::Kind kind, SourcePos pos = {});
ExprPtr unit_lit(SourcePos pos = {});
ExprPtr int_lit(std::int64_t v, SourcePos pos = {});
ExprPtr ident(std::string name, SourcePos pos = {});
ExprPtr lambda(std::string param, Type param_type, Type result_type, ExprPtr body, SourcePos pos = {});
ExprPtr assign(std::string ref, ExprPtr value, SourcePos pos = {});
ExprPtr deref(std::string ref, SourcePos pos = {});
ExprPtr binop(Op op, ExprPtr l, ExprPtr r, SourcePos pos = {});
ExprPtr not_(ExprPtr e, SourcePos pos = {});
ExprPtr neg(ExprPtr e, SourcePos pos = {});
ExprPtr pair(ExprPtr l, ExprPtr r, SourcePos pos = {});
ExprPtr fst(ExprPtr e, SourcePos pos = {});
ExprPtr snd(ExprPtr e, SourcePos pos = {});
ExprPtr app(ExprPtr f, ExprPtr arg, SourcePos pos = {});
ExprPtr if_(ExprPtr c, ExprPtr t, ExprPtr e, SourcePos pos = {});
ExprPtr let(std::string x, ExprPtr bound, ExprPtr body, std::optional<Type> annot = {}, SourcePos pos = {});
ExprPtr letrec(std::string f, ExprPtr fn, ExprPtr body, std::optional<Type> annot = {}, SourcePos pos = {});
ExprPtr assert_(ExprPtr e, SourcePos pos = {});
ExprPtr seq(ExprPtr first, ExprPtr second, SourcePos pos = {});

/// Structural equality, ignoring source positions.
bool same(const ExprPtr& a, const ExprPtr& b);

enum class DeclKind { Abstract, Public, Private, RefInt, RefFun };

struct Decl {
  DeclKind kind = DeclKind::Private;
  std::string name;
  SourcePos pos;
  // Abstract: the imported method type.
  Type type;
  // Public / Private methods.
  std::string param;
  Type param_type;
  Type result_type;
  ExprPtr body;
  // RefInt initial value.
  std::int64_t init = 0;
  // RefFun initialiser: a lambda or the name of a declared method.
  ExprPtr fun_init;
};

bool same(const Decl& a, const Decl& b);

/// A library, or a client when `main` is set.
struct SourceLibrary {
  std::vector<Decl> decls;
  ExprPtr main;

  bool is_client() const { return main != nullptr; }
  const Decl* find(std::string_view name) const;
};

bool same(const SourceLibrary& a, const SourceLibrary& b);

enum class FileKind { Library, Client };

/// Parses .holi text. Throws ParseError (with position and the expected-token
/// set) on malformed input, on duplicate declaration names, and when a client
/// lacks `main` or a library has one.
SourceLibrary parse(std::string_view text, FileKind kind);
/// Parses either kind, deciding by the presence of `main`.
SourceLibrary parse_any(std::string_view text);

std::string print(const ExprPtr& e);
std::string print(const SourceLibrary& lib);

/// Expands sequencing, `not` and unary minus into core constructs:
///   a; b   => let _ = a in b
///   not e  => e == 0
///   -e     => 0 - e
SourceLibrary desugar(const SourceLibrary& lib);
ExprPtr desugar(const ExprPtr& e);

}  // namespace surface
}  // namespace holi
