#include "holicheck/term.hpp"

#include <algorithm>

namespace holi {

namespace {
using K = Term::Kind;

std::shared_ptr<Term> node(K kind) {
  auto t = std::make_shared<Term>();
  t->kind = kind;
  return t;
}
}  // namespace

TermPtr mk_unit() {
  static const TermPtr u = node(K::Unit);
  return u;
}

TermPtr mk_int(std::int64_t v) {
  auto t = node(K::Int);
  t->value = v;
  return t;
}

TermPtr mk_sym(const Name& k) {
  auto t = node(K::Sym);
  t->name = k;
  return t;
}

TermPtr mk_meth(const Name& m) {
  auto t = node(K::Meth);
  t->name = m;
  return t;
}

TermPtr mk_var(const Name& x) {
  auto t = node(K::Var);
  t->name = x;
  return t;
}

TermPtr mk_lambda(const Name& param, Type arrow, TermPtr body) {
  auto t = node(K::Lambda);
  t->name = param;
  t->type = std::move(arrow);
  t->a = std::move(body);
  return t;
}

TermPtr mk_assign(const Name& r, TermPtr v) {
  auto t = node(K::Assign);
  t->name = r;
  t->a = std::move(v);
  return t;
}

TermPtr mk_deref(const Name& r) {
  auto t = node(K::Deref);
  t->name = r;
  return t;
}

TermPtr mk_binop(Op op, TermPtr l, TermPtr r) {
  auto t = node(K::BinOp);
  t->op = op;
  t->a = std::move(l);
  t->b = std::move(r);
  return t;
}

TermPtr mk_pair(TermPtr l, TermPtr r) {
  auto t = node(K::Pair);
  t->a = std::move(l);
  t->b = std::move(r);
  return t;
}

TermPtr mk_proj(int j, TermPtr e) {
  auto t = node(K::Proj);
  t->value = j;
  t->a = std::move(e);
  return t;
}

TermPtr mk_app(TermPtr f, TermPtr arg) {
  auto t = node(K::App);
  t->a = std::move(f);
  t->b = std::move(arg);
  return t;
}

TermPtr mk_if(TermPtr c, TermPtr th, TermPtr el) {
  auto t = node(K::If);
  t->a = std::move(c);
  t->b = std::move(th);
  t->c = std::move(el);
  return t;
}

TermPtr mk_let(const Name& x, TermPtr bound, TermPtr body) {
  auto t = node(K::Let);
  t->name = x;
  t->a = std::move(bound);
  t->b = std::move(body);
  return t;
}

TermPtr mk_letrec(const Name& f, TermPtr fn, TermPtr body) {
  auto t = node(K::Letrec);
  t->name = f;
  t->a = std::move(fn);
  t->b = std::move(body);
  return t;
}

TermPtr mk_assert(TermPtr e) {
  auto t = node(K::Assert);
  t->a = std::move(e);
  return t;
}

TermPtr mk_box(const Name& m, std::int64_t k, TermPtr e) {
  auto t = node(K::Box);
  t->name = m;
  t->value = k;
  t->a = std::move(e);
  return t;
}

TermPtr mk_hole() {
  static const TermPtr h = node(K::Hole);
  return h;
}

bool is_value(const TermPtr& t) {
  switch (t->kind) {
    case K::Unit:
    case K::Int:
    case K::Sym:
    case K::Meth:
      return true;
    case K::Pair:
      return is_value(t->a) && is_value(t->b);
    default:
      return false;
  }
}

bool value_has_type(const TermPtr& v, const Type& t) {
  switch (v->kind) {
    case K::Unit: return t.is_unit();
    case K::Int:
    case K::Sym: return t.is_int();
    case K::Meth: return v->name.type == t;
    case K::Pair: return t.is_prod() && value_has_type(v->a, t.left()) && value_has_type(v->b, t.right());
    default: return false;
  }
}

bool equal(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->value != b->value) return false;
  switch (a->kind) {
    case K::BinOp:
      if (a->op != b->op) return false;
      break;
    case K::Sym:
    case K::Meth:
    case K::Var:
    case K::Assign:
    case K::Deref:
    case K::Let:
    case K::Letrec:
    case K::Box:
      if (a->name != b->name) return false;
      break;
    case K::Lambda:
      if (a->name != b->name || a->type != b->type) return false;
      break;
    default:
      break;
  }
  return equal(a->a, b->a) && equal(a->b, b->b) && equal(a->c, b->c);
}

namespace {

TermPtr with_children(const TermPtr& t, TermPtr a, TermPtr b, TermPtr c) {
  if (a == t->a && b == t->b && c == t->c) return t;
  auto copy = std::make_shared<Term>(*t);
  copy->a = std::move(a);
  copy->b = std::move(b);
  copy->c = std::move(c);
  return copy;
}

}  // namespace

TermPtr subst(const TermPtr& t, const Name& x, const TermPtr& v) {
  if (!t) return t;
  switch (t->kind) {
    case K::Var:
      return t->name == x ? v : t;
    case K::Unit:
    case K::Int:
    case K::Sym:
    case K::Meth:
    case K::Deref:
    case K::Hole:
      return t;
    case K::Lambda:
      if (t->name == x) return t;
      return with_children(t, subst(t->a, x, v), nullptr, nullptr);
    case K::Let:
      return with_children(t, subst(t->a, x, v), t->name == x ? t->b : subst(t->b, x, v), nullptr);
    case K::Letrec:
      if (t->name == x) return t;
      return with_children(t, subst(t->a, x, v), subst(t->b, x, v), nullptr);
    default:
      return with_children(t, subst(t->a, x, v), subst(t->b, x, v), subst(t->c, x, v));
  }
}

TermPtr plug(const TermPtr& ctx, const TermPtr& t) {
  if (!ctx) return ctx;
  if (ctx->kind == K::Hole) return t;
  return with_children(ctx, plug(ctx->a, t), plug(ctx->b, t), plug(ctx->c, t));
}

namespace {

void collect(const TermPtr& t, K kind, std::vector<Name>& out) {
  if (!t) return;
  if (t->kind == kind && std::find(out.begin(), out.end(), t->name) == out.end()) out.push_back(t->name);
  collect(t->a, kind, out);
  collect(t->b, kind, out);
  collect(t->c, kind, out);
}

}  // namespace

std::vector<Name> methods_of(const TermPtr& v) {
  std::vector<Name> out;
  collect(v, K::Meth, out);
  return out;
}

std::vector<Name> symints_of(const TermPtr& t) {
  std::vector<Name> out;
  collect(t, K::Sym, out);
  return out;
}

bool contains_kind(const TermPtr& t, Term::Kind kind) {
  if (!t) return false;
  if (t->kind == kind) return true;
  return contains_kind(t->a, kind) || contains_kind(t->b, kind) || contains_kind(t->c, kind);
}

TermPtr map_names(const TermPtr& t, const std::function<Name(const Name&)>& f) {
  if (!t) return t;
  TermPtr a = map_names(t->a, f), b = map_names(t->b, f), c = map_names(t->c, f);
  switch (t->kind) {
    case K::Sym:
    case K::Meth:
    case K::Var:
    case K::Lambda:
    case K::Assign:
    case K::Deref:
    case K::Let:
    case K::Letrec:
    case K::Box: {
      Name n = f(t->name);
      if (n == t->name && a == t->a && b == t->b && c == t->c) return t;
      auto copy = std::make_shared<Term>(*t);
      copy->name = n;
      copy->a = a;
      copy->b = b;
      copy->c = c;
      return copy;
    }
    default:
      return with_children(t, a, b, c);
  }
}

namespace {

void print(const TermPtr& t, std::string& out) {
  switch (t->kind) {
    case K::Unit: out += "()"; return;
    case K::Int: out += std::to_string(t->value); return;
    case K::Sym:
    case K::Meth:
    case K::Var: out += t->name.str(); return;
    case K::Hole: out += "[]"; return;
    case K::Lambda:
      out += "(fun(" + t->name.str() + ":" + t->type.left().str() + ") -> ";
      print(t->a, out);
      out += ")";
      return;
    case K::Assign:
      out += "(" + t->name.str() + " := ";
      print(t->a, out);
      out += ")";
      return;
    case K::Deref: out += "!" + t->name.str(); return;
    case K::BinOp:
      out += "(";
      print(t->a, out);
      out += " ";
      out += op_symbol(t->op);
      out += " ";
      print(t->b, out);
      out += ")";
      return;
    case K::Pair:
      out += "(";
      print(t->a, out);
      out += ", ";
      print(t->b, out);
      out += ")";
      return;
    case K::Proj:
      out += t->value == 1 ? "fst " : "snd ";
      print(t->a, out);
      return;
    case K::App:
      print(t->a, out);
      out += "(";
      print(t->b, out);
      out += ")";
      return;
    case K::If:
      out += "(if ";
      print(t->a, out);
      out += " then ";
      print(t->b, out);
      out += " else ";
      print(t->c, out);
      out += ")";
      return;
    case K::Let:
    case K::Letrec:
      out += t->kind == K::Let ? "(let " : "(letrec ";
      out += t->name.str() + " = ";
      print(t->a, out);
      out += " in ";
      print(t->b, out);
      out += ")";
      return;
    case K::Assert:
      out += "assert(";
      print(t->a, out);
      out += ")";
      return;
    case K::Box:
      out += "[[";
      print(t->a, out);
      out += "]]";
      return;
  }
}

}  // namespace

std::string str(const TermPtr& t) {
  std::string out;
  if (t) print(t, out);
  return out;
}

std::string Move::str() const {
  std::string v = holi::str(value);
  if (v.empty() || v.front() != '(') v = "(" + v + ")";
  return method.str() + v + (kind == Kind::Call ? "?" : "!");
}

bool equal(const Move& a, const Move& b) {
  return a.kind == b.kind && a.method == b.method && equal(a.value, b.value);
}

bool equal(const Trace& a, const Trace& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!equal(a[i], b[i])) return false;
  return true;
}

std::string str(const Trace& t) {
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += " . ";
    out += t[i].str();
  }
  return out;
}

}  // namespace holi
