#include "holicheck/typecheck.hpp"

#include <set>
#include <tuple>

namespace holi {

const Name* TypedLibrary::global(std::string_view spelling) const {
  auto it = globals.find(spelling);
  return it == globals.end() ? nullptr : &it->second;
}

namespace {

using surface::DeclKind;
using surface::Expr;
using surface::ExprPtr;
using EK = Expr::Kind;

class Checker {
 public:
  explicit Checker(std::uint32_t seed) : supply_(seed) {}

  TypedLibrary run(const surface::SourceLibrary& src) {
    TypedLibrary out;
    out.source = src;
    surface::SourceLibrary lib = surface::desugar(src);

    std::set<std::string> seen;
    for (const auto& d : lib.decls) {
      if (!seen.insert(d.name).second) throw TypeError(d.pos, "'" + d.name + "' is declared more than once");
      switch (d.kind) {
        case DeclKind::Abstract:
          if (!d.type.is_arrow())
            throw TypeError(d.pos, "imported method '" + d.name + "' needs an arrow type, got " + d.type.str());
          declare(d.name, Sort::Method, d.type);
          break;
        case DeclKind::Public:
        case DeclKind::Private:
          declare(d.name, Sort::Method, Type::arrow(d.param_type, d.result_type));
          break;
        case DeclKind::RefInt:
          declare(d.name, Sort::Reference, Type::integer());
          break;
        case DeclKind::RefFun:
          break;
      }
    }
    // Function references: typed by their initialiser, which may name a method
    // declared anywhere in the file.
    for (const auto& d : lib.decls) {
      if (d.kind != DeclKind::RefFun) continue;
      Type t;
      const ExprPtr& init = d.fun_init;
      if (init->kind == EK::Lambda) {
        t = Type::arrow(*init->type, *init->result_type);
      } else if (init->kind == EK::Ident) {
        auto it = globals_.find(init->name);
        if (it == globals_.end() || it->second.sort != Sort::Method)
          throw TypeError(init->pos, "'" + init->name + "' is not a declared method");
        t = it->second.type;
      } else {
        throw TypeError(init->pos, "a function reference must be initialised with a lambda or a method name");
      }
      declare(d.name, Sort::Reference, t);
    }

    for (const auto& d : lib.decls) {
      TypedDecl td;
      td.kind = d.kind;
      td.name = globals_.at(d.name);
      switch (d.kind) {
        case DeclKind::Abstract:
          break;
        case DeclKind::Public:
        case DeclKind::Private: {
          Scope scope;
          Name x = bind(scope, d.param, d.param_type);
          TermPtr body = check(d.body, scope, d.result_type);
          td.fn = mk_lambda(x, td.name.type, body);
          break;
        }
        case DeclKind::RefInt:
          td.init = d.init;
          break;
        case DeclKind::RefFun: {
          Scope scope;
          auto [t, ty] = infer(d.fun_init, scope);
          td.fn = t;
          break;
        }
      }
      out.decls.push_back(std::move(td));
    }
    if (lib.main) {
      Scope scope;
      out.main = check(lib.main, scope, Type::unit());
    }
    out.globals = std::move(globals_);
    out.supply = supply_;
    return out;
  }

 private:
  using Scope = std::map<std::string, Name>;

  void declare(const std::string& spelling, Sort sort, Type type) {
    globals_.emplace(spelling, supply_.fresh_labelled(sort, std::move(type), spelling));
  }

  Name bind(Scope& scope, const std::string& spelling, Type type) {
    Name x = supply_.fresh_labelled(Sort::Variable, std::move(type), spelling);
    if (spelling != "_") scope[spelling] = x;
    return x;
  }

  static std::string show(const ExprPtr& e) {
    std::string s = surface::print(e);
    if (s.size() > 60) s = s.substr(0, 57) + "...";
    return s;
  }

  [[noreturn]] static void mismatch(const ExprPtr& e, const Type& expected, const Type& actual) {
    throw TypeError(e->pos, "'" + show(e) + "' has type " + actual.str() + " but " + expected.str() + " was expected");
  }

  TermPtr check(const ExprPtr& e, const Scope& scope, const Type& expected) {
    auto [t, ty] = infer(e, scope);
    if (ty != expected) mismatch(e, expected, ty);
    return t;
  }

  const Name& reference(const ExprPtr& e) {
    auto it = globals_.find(e->name);
    if (it == globals_.end() || it->second.sort != Sort::Reference)
      throw TypeError(e->pos, "'" + e->name + "' is not a declared reference");
    return it->second;
  }

  std::pair<TermPtr, Type> infer(const ExprPtr& e, const Scope& scope) {
    switch (e->kind) {
      case EK::Unit:
        return {mk_unit(), Type::unit()};
      case EK::Int:
        return {mk_int(e->value), Type::integer()};
      case EK::Ident: {
        if (auto it = scope.find(e->name); it != scope.end()) return {mk_var(it->second), it->second.type};
        auto it = globals_.find(e->name);
        if (it == globals_.end()) throw TypeError(e->pos, "unbound name '" + e->name + "'");
        if (it->second.sort == Sort::Reference)
          throw TypeError(e->pos, "reference '" + e->name + "' can only be used under '!' or ':='");
        return {mk_meth(it->second), it->second.type};
      }
      case EK::Lambda: {
        Scope inner = scope;
        Name x = bind(inner, e->name, *e->type);
        TermPtr body = check(e->a, inner, *e->result_type);
        Type arrow = Type::arrow(*e->type, *e->result_type);
        return {mk_lambda(x, arrow, body), arrow};
      }
      case EK::Assign: {
        Name r = reference(e);
        TermPtr v = check(e->a, scope, r.type);
        return {mk_assign(r, v), Type::unit()};
      }
      case EK::Deref: {
        Name r = reference(e);
        return {mk_deref(r), r.type};
      }
      case EK::BinOp: {
        TermPtr l = check(e->a, scope, Type::integer());
        TermPtr r = check(e->b, scope, Type::integer());
        return {mk_binop(e->op, l, r), Type::integer()};
      }
      case EK::Not:
        return {mk_binop(Op::Eq, check(e->a, scope, Type::integer()), mk_int(0)), Type::integer()};
      case EK::Neg:
        return {mk_binop(Op::Sub, mk_int(0), check(e->a, scope, Type::integer())), Type::integer()};
      case EK::Pair: {
        auto [l, lt] = infer(e->a, scope);
        auto [r, rt] = infer(e->b, scope);
        return {mk_pair(l, r), Type::prod(lt, rt)};
      }
      case EK::Fst:
      case EK::Snd: {
        auto [p, pt] = infer(e->a, scope);
        if (!pt.is_prod())
          throw TypeError(e->a->pos, "'" + show(e->a) + "' has type " + pt.str() + " but a product was expected");
        bool first = e->kind == EK::Fst;
        return {mk_proj(first ? 1 : 2, p), first ? pt.left() : pt.right()};
      }
      case EK::App: {
        auto [f, ft] = infer(e->a, scope);
        if (!ft.is_arrow())
          throw TypeError(e->a->pos, "'" + show(e->a) + "' has type " + ft.str() + " and cannot be applied");
        TermPtr arg = check(e->b, scope, ft.left());
        return {mk_app(f, arg), ft.right()};
      }
      case EK::If: {
        TermPtr c = check(e->a, scope, Type::integer());
        auto [t, tt] = infer(e->b, scope);
        TermPtr f = check(e->c, scope, tt);
        return {mk_if(c, t, f), tt};
      }
      case EK::Let: {
        TermPtr bound;
        Type bt;
        if (e->type) {
          bound = check(e->a, scope, *e->type);
          bt = *e->type;
        } else {
          std::tie(bound, bt) = infer(e->a, scope);
        }
        Scope inner = scope;
        Name x = bind(inner, e->name, bt);
        auto [body, ty] = infer(e->b, inner);
        return {mk_let(x, bound, body), ty};
      }
      case EK::Letrec: {
        const ExprPtr& fn = e->a;
        Type ft = Type::arrow(*fn->type, *fn->result_type);
        if (e->type) {
          if (!e->type->is_arrow())
            throw TypeError(e->pos, "letrec binder '" + e->name + "' needs an arrow type, got " + e->type->str());
          if (*e->type != ft) mismatch(fn, *e->type, ft);
        }
        Scope inner = scope;
        Name f = bind(inner, e->name, ft);
        auto [lam, lt] = infer(fn, inner);
        auto [body, ty] = infer(e->b, inner);
        return {mk_letrec(f, lam, body), ty};
      }
      case EK::Assert:
        return {mk_assert(check(e->a, scope, Type::integer())), Type::unit()};
      case EK::Seq: {
        auto [first, ft] = infer(e->a, scope);
        Name x = supply_.fresh_labelled(Sort::Variable, ft, "_");
        auto [second, ty] = infer(e->b, scope);
        return {mk_let(x, first, second), ty};
      }
    }
    throw TypeError(e->pos, "unsupported expression");
  }

  NameSupply supply_;
  std::map<std::string, Name, std::less<>> globals_;
};

}  // namespace

TypedLibrary typecheck(const surface::SourceLibrary& lib, std::uint32_t seed) {
  return Checker(seed).run(lib);
}

TypedLibrary load(std::string_view text) { return typecheck(surface::parse_any(text)); }

}  // namespace holi
