#include "holicheck/symbolic.hpp"

#include <stdexcept>

namespace holi {

namespace {

using K = Term::Kind;

TermPtr fill(const SymFrame& f, TermPtr t) {
  auto copy = std::make_shared<Term>(*f.parent);
  (f.slot == 0 ? copy->a : f.slot == 1 ? copy->b : copy->c) = std::move(t);
  return copy;
}

/// Evaluation position of the next unevaluated child, or -1 when `t` is a redex.
int next_slot(const TermPtr& t) {
  switch (t->kind) {
    case K::Assign:
    case K::Proj:
    case K::If:
    case K::Let:
    case K::Assert:
    case K::Box:
      return is_value(t->a) ? -1 : 0;
    case K::BinOp:
    case K::Pair:
    case K::App:
      if (!is_value(t->a)) return 0;
      return is_value(t->b) ? -1 : 1;
    case K::Lambda:
    case K::Deref:
    case K::Letrec:
      return -1;
    default:
      throw std::logic_error("open or malformed term " + str(t));
  }
}

/// Moves the focus to the next redex, or to the final value with an empty context.
void settle(SymTermConfig& c) {
  for (;;) {
    if (is_value(c.focus)) {
      if (c.ctx.empty()) return;
      c.focus = fill(c.ctx.head(), c.focus);
      c.ctx = c.ctx.tail();
      continue;
    }
    int slot = next_slot(c.focus);
    if (slot < 0) return;
    const TermPtr& child = slot == 0 ? c.focus->a : slot == 1 ? c.focus->b : c.focus->c;
    c.ctx = c.ctx.push({c.focus, slot});
    c.focus = child;
  }
}

}  // namespace

TermPtr plug(const Context& ctx, TermPtr t) {
  ctx.for_each_newest_first([&](const SymFrame& f) { t = fill(f, t); });
  return t;
}

SymStep sym_step(const SymTermConfig& in, int k0) {
  SymStep res;
  SymTermConfig c = in;
  settle(c);
  if (is_value(c.focus)) {
    res.kind = SymStep::Kind::Value;
    res.next.push_back(std::move(c));
    return res;
  }
  const TermPtr r = c.focus;
  auto done = [&](TermPtr out) {
    c.focus = std::move(out);
    res.next.push_back(std::move(c));
    return res;
  };
  switch (r->kind) {
    case K::Lambda: {
      Name m = c.supply.fresh(Sort::Method, r->type);
      c.R.set(m, r);
      return done(mk_meth(m));
    }
    case K::Letrec: {
      Name m = c.supply.fresh(Sort::Method, r->a->type);
      TermPtr mt = mk_meth(m);
      c.R.set(m, subst(r->a, r->name, mt));
      return done(subst(r->b, r->name, mt));
    }
    case K::Deref: {
      const TermPtr* v = c.sigma.find(r->name);
      if (!v) throw std::logic_error("unbound reference " + r->name.str());
      return done(*v);
    }
    case K::Assign:
      c.sigma.set(r->name, r->a);
      return done(mk_unit());
    case K::BinOp: {
      if (r->a->kind == K::Int && r->b->kind == K::Int) return done(mk_int(apply_op(r->op, r->a->value, r->b->value)));
      Name kappa = c.supply.fresh(Sort::SymInt, Type::integer());
      c.sigma.set(kappa, r);
      return done(mk_sym(kappa));
    }
    case K::Pair:
      throw std::logic_error("pair of values is not a redex");
    case K::Proj:
      return done(r->value == 1 ? r->a->a : r->a->b);
    case K::Let:
      return done(subst(r->b, r->name, r->a));
    case K::If: {
      if (r->a->kind == K::Int) return done(r->a->value != 0 ? r->b : r->c);
      SymTermConfig t = c, e = c;
      t.pc = t.pc.push({Atom::Rel::Ne, r->a, mk_int(0)});
      t.focus = r->b;
      e.pc = e.pc.push({Atom::Rel::Eq, r->a, mk_int(0)});
      e.focus = r->c;
      res.next.push_back(std::move(t));
      res.next.push_back(std::move(e));
      return res;
    }
    case K::Assert: {
      if (r->a->kind == K::Int) {
        if (r->a->value == 0) {
          res.kind = SymStep::Kind::Failed;
          res.next.push_back(std::move(c));
          return res;
        }
        return done(mk_unit());
      }
      SymTermConfig fail = c, pass = c;
      fail.pc = fail.pc.push({Atom::Rel::Eq, r->a, mk_int(0)});
      fail.focus = mk_assert(mk_int(0));
      pass.pc = pass.pc.push({Atom::Rel::Ne, r->a, mk_int(0)});
      pass.focus = mk_unit();
      res.next.push_back(std::move(fail));
      res.next.push_back(std::move(pass));
      return res;
    }
    case K::App: {
      if (r->a->kind != K::Meth) throw std::logic_error("applying a non-method " + str(r->a));
      const Name& m = r->a->name;
      const TermPtr* lam = c.R.find(m);
      if (!lam) {
        res.kind = SymStep::Kind::External;
        res.method = m;
        res.arg = r->b;
        res.next.push_back(std::move(c));
        return res;
      }
      if (k0 >= 0 && c.k + 1 > k0) {
        res.kind = SymStep::Kind::BoundExceeded;
        res.next.push_back(std::move(c));
        return res;
      }
      TermPtr body = subst((*lam)->a, (*lam)->name, r->b);
      int k = c.k++;
      return done(mk_box(m, k, body));
    }
    case K::Box:
      if (--c.k != r->value) throw std::logic_error("call counter not preserved across " + r->name.str());
      return done(r->a);
    default:
      throw std::logic_error("unexpected redex " + str(r));
  }
}

TermPtr symval(const Type& t, NameSet& abs, NameSupply& supply) {
  switch (t.kind()) {
    case Type::Kind::Unit:
      return mk_unit();
    case Type::Kind::Int: {
      Name k = supply.fresh(Sort::SymInt, Type::integer());
      abs.insert(k);
      return mk_sym(k);
    }
    case Type::Kind::Arrow: {
      Name m = supply.fresh(Sort::Method, t);
      abs.insert(m);
      return mk_meth(m);
    }
    case Type::Kind::Prod: {
      TermPtr l = symval(t.left(), abs, supply);
      TermPtr r = symval(t.right(), abs, supply);
      return mk_pair(l, r);
    }
  }
  return mk_unit();
}

SymGameConfig initial_sym_config(const BuildResult& b) {
  SymGameConfig g;
  g.polarity = Polarity::O;
  g.l = 0;
  g.t.R = CowMap<Name, TermPtr>(b.R);
  g.t.sigma = SymEnv(b.S);
  g.t.k = 0;
  g.t.supply = b.supply;
  g.pub = b.pub;
  g.abs = b.abs;
  return g;
}

SymGameStep sym_game_step(const SymGameConfig& g, const Bounds& bounds) {
  SymGameStep out;
  if (g.polarity == Polarity::P) {
    SymStep s = sym_step(g.t, bounds.k);
    switch (s.kind) {
      case SymStep::Kind::Stepped:
        out.branch = s.next.size() > 1;
        for (auto& t : s.next) {
          SymGameConfig n = g;
          n.t = std::move(t);
          out.next.emplace_back(std::nullopt, std::move(n));
        }
        return out;
      case SymStep::Kind::Failed:
        out.leaf = SymGameStep::Leaf::Failed;
        return out;
      case SymStep::Kind::BoundExceeded:
        out.leaf = SymGameStep::Leaf::BoundExhausted;
        return out;
      case SymStep::Kind::External: {
        if (!g.abs.contains(s.method)) throw std::logic_error("call to unknown method " + s.method.str());
        SymGameConfig n = g;
        const SymTermConfig& t = s.next.front();
        for (const Name& m : methods_of(s.arg))
          if (t.R.contains(m)) n.pub.insert(m);
        n.stack = n.stack.push({s.method, true, t.ctx, 0});
        n.t = t;
        n.t.focus = nullptr;
        n.t.ctx = Context();
        n.polarity = Polarity::O;
        n.l = 0;
        Move mv{Move::Kind::Call, s.method, s.arg, Polarity::P};
        n.trace = n.trace.push(mv);
        out.next.emplace_back(mv, std::move(n));
        return out;
      }
      case SymStep::Kind::Value: {
        if (g.stack.empty() || g.stack.head().is_context)
          throw std::logic_error("Proponent value without a pending Opponent call");
        SymGameConfig n = g;
        const SymTermConfig& t = s.next.front();
        SymGameFrame top = g.stack.head();
        n.stack = g.stack.tail();
        for (const Name& m : methods_of(t.focus))
          if (t.R.contains(m)) n.pub.insert(m);
        Move mv{Move::Kind::Ret, top.method, t.focus, Polarity::P};
        n.t = t;
        n.t.focus = nullptr;
        n.polarity = Polarity::O;
        n.l = top.l;
        n.trace = n.trace.push(mv);
        out.next.emplace_back(mv, std::move(n));
        return out;
      }
    }
    return out;
  }

  // Opponent: answer the pending call first, then every public method.
  if (!g.stack.empty() && g.stack.head().is_context) {
    const SymGameFrame& top = g.stack.head();
    SymGameConfig n = g;
    TermPtr v = symval(top.method.type.right(), n.abs, n.t.supply);
    n.stack = g.stack.tail();
    n.polarity = Polarity::P;
    n.t.focus = v;
    n.t.ctx = top.ctx;
    Move mv{Move::Kind::Ret, top.method, v, Polarity::O};
    n.trace = n.trace.push(mv);
    out.next.emplace_back(mv, std::move(n));
  }
  if (g.l + 1 <= bounds.l) {
    for (const Name& m : g.pub) {
      SymGameConfig n = g;
      TermPtr v = symval(m.type.left(), n.abs, n.t.supply);
      n.stack = g.stack.push({m, false, Context(), g.l + 1});
      n.polarity = Polarity::P;
      n.t.focus = mk_app(mk_meth(m), v);
      n.t.ctx = Context();
      Move mv{Move::Kind::Call, m, v, Polarity::O};
      n.trace = n.trace.push(mv);
      out.next.emplace_back(mv, std::move(n));
    }
  }
  if (out.next.empty())
    out.leaf = g.pub.empty() || g.l + 1 <= bounds.l ? SymGameStep::Leaf::Terminated : SymGameStep::Leaf::BoundExhausted;
  return out;
}

}  // namespace holi
