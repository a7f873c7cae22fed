#include "holicheck/concrete.hpp"

#include <set>
#include <stdexcept>

namespace holi {

namespace {
using K = Term::Kind;
using surface::DeclKind;
}  // namespace

BuildResult build(const TypedLibrary& lib) {
  BuildResult b;
  b.supply = lib.supply;
  for (const auto& d : lib.decls) {
    switch (d.kind) {
      case DeclKind::Abstract:
        b.abs.insert(d.name);
        break;
      case DeclKind::Public:
        b.R[d.name] = d.fn;
        b.pub.insert(d.name);
        b.owner[d.name] = d.origin;
        break;
      case DeclKind::Private:
        b.R[d.name] = d.fn;
        b.owner[d.name] = d.origin;
        break;
      case DeclKind::RefInt:
        b.S[d.name] = mk_int(d.init);
        break;
      case DeclKind::RefFun:
        if (d.fn->kind == K::Lambda) {
          Name m = b.supply.fresh(Sort::Method, d.fn->type);
          b.R[m] = d.fn;
          b.owner[m] = d.origin;
          b.S[d.name] = mk_meth(m);
        } else {
          b.S[d.name] = d.fn;
        }
        break;
    }
  }
  return b;
}

// ---------------------------------------------------------------------------
// Reduction by decomposition into E[redex]

namespace {

struct Decomp {
  TermPtr ctx;
  TermPtr redex;
  std::optional<Name> enclosing;
};

TermPtr replace_child(const TermPtr& t, int slot, TermPtr child) {
  auto copy = std::make_shared<Term>(*t);
  (slot == 0 ? copy->a : slot == 1 ? copy->b : copy->c) = std::move(child);
  return copy;
}

Decomp find_redex(const TermPtr& t) {
  auto descend = [&](int slot) {
    const TermPtr& child = slot == 0 ? t->a : slot == 1 ? t->b : t->c;
    Decomp d = find_redex(child);
    d.ctx = replace_child(t, slot, d.ctx);
    if (t->kind == K::Box && !d.enclosing) d.enclosing = t->name;
    return d;
  };
  switch (t->kind) {
    case K::Lambda:
    case K::Deref:
    case K::Letrec:
      return {mk_hole(), t, std::nullopt};
    case K::Assign:
    case K::Proj:
    case K::If:
    case K::Let:
    case K::Assert:
    case K::Box:
      if (!is_value(t->a)) return descend(0);
      return {mk_hole(), t, std::nullopt};
    case K::BinOp:
    case K::Pair:
    case K::App:
      if (!is_value(t->a)) return descend(0);
      if (!is_value(t->b)) return descend(1);
      return {mk_hole(), t, std::nullopt};
    default:
      throw std::logic_error("no redex in " + str(t));
  }
}

std::int64_t as_int(const TermPtr& v) {
  if (v->kind != K::Int) throw std::logic_error("expected an integer, got " + str(v));
  return v->value;
}

}  // namespace

StepResult step(TermConfig& c, NameSupply& supply, int k0) {
  StepResult res;
  if (is_value(c.term)) {
    res.kind = StepResult::Kind::Value;
    return res;
  }
  Decomp d = find_redex(c.term);
  const TermPtr& r = d.redex;
  res.rule = r->kind;
  res.enclosing = d.enclosing;
  TermPtr out;
  switch (r->kind) {
    case K::Lambda: {
      Name m = supply.fresh(Sort::Method, r->type);
      c.R[m] = r;
      res.method = m;
      out = mk_meth(m);
      break;
    }
    case K::Letrec: {
      Name m = supply.fresh(Sort::Method, r->a->type);
      TermPtr mt = mk_meth(m);
      c.R[m] = subst(r->a, r->name, mt);
      res.method = m;
      out = subst(r->b, r->name, mt);
      break;
    }
    case K::Deref:
      out = c.S.at(r->name);
      break;
    case K::Assign:
      c.S[r->name] = r->a;
      out = mk_unit();
      break;
    case K::BinOp:
      out = mk_int(apply_op(r->op, as_int(r->a), as_int(r->b)));
      break;
    case K::Pair:
      throw std::logic_error("pair of values is not a redex");
    case K::Proj:
      out = r->value == 1 ? r->a->a : r->a->b;
      break;
    case K::If:
      out = as_int(r->a) != 0 ? r->b : r->c;
      break;
    case K::Let:
      out = subst(r->b, r->name, r->a);
      break;
    case K::Assert:
      if (as_int(r->a) == 0) {
        res.kind = StepResult::Kind::Failed;
        return res;
      }
      out = mk_unit();
      break;
    case K::App: {
      if (r->a->kind != K::Meth) throw std::logic_error("applying a non-method " + str(r->a));
      const Name& m = r->a->name;
      res.method = m;
      res.arg = r->b;
      auto it = c.R.find(m);
      if (it == c.R.end()) {
        res.kind = StepResult::Kind::External;
        res.context = d.ctx;
        return res;
      }
      if (k0 >= 0 && c.k + 1 > k0) {
        res.kind = StepResult::Kind::BoundExceeded;
        return res;
      }
      const TermPtr& lam = it->second;
      out = mk_box(m, c.k, subst(lam->a, lam->name, r->b));
      ++c.k;
      break;
    }
    case K::Box:
      --c.k;
      if (c.k != r->value) throw std::logic_error("call counter not preserved across " + r->name.str());
      res.method = r->name;
      res.arg = r->a;
      out = r->a;
      break;
    default:
      throw std::logic_error("unexpected redex " + str(r));
  }
  c.term = plug(d.ctx, out);
  return res;
}

// ---------------------------------------------------------------------------
// Linking

surface::SourceLibrary link_source(const surface::SourceLibrary& lib, const surface::SourceLibrary& client) {
  using surface::Decl;
  auto collect = [](const surface::SourceLibrary& s, DeclKind kind) {
    std::map<std::string, Type> out;
    for (const auto& d : s.decls) {
      if (d.kind != kind) continue;
      out[d.name] = kind == DeclKind::Abstract ? d.type : Type::arrow(d.param_type, d.result_type);
    }
    return out;
  };
  auto pub_l = collect(lib, DeclKind::Public), abs_l = collect(lib, DeclKind::Abstract);
  auto pub_c = collect(client, DeclKind::Public), abs_c = collect(client, DeclKind::Abstract);
  auto complement = [](const std::map<std::string, Type>& pub, const std::map<std::string, Type>& abs,
                       const std::string& what) {
    for (const auto& [n, t] : pub) {
      auto it = abs.find(n);
      if (it == abs.end()) throw IncompatibleError(what + ": public '" + n + "' is not imported by the other side");
      if (it->second != t)
        throw IncompatibleError(what + ": '" + n + "' is exported at " + t.str() + " but imported at " +
                                it->second.str());
    }
    for (const auto& [n, t] : abs)
      if (!pub.count(n)) throw IncompatibleError(what + ": import '" + n + "' is not provided by the other side");
  };
  complement(pub_l, abs_c, "library exports");
  complement(pub_c, abs_l, "client exports");

  std::set<std::string> lib_refs, lib_meths;
  for (const auto& d : lib.decls) {
    if (d.kind == DeclKind::RefInt || d.kind == DeclKind::RefFun) lib_refs.insert(d.name);
    if (d.kind == DeclKind::Public || d.kind == DeclKind::Private) lib_meths.insert(d.name);
  }
  for (const auto& d : client.decls) {
    if ((d.kind == DeclKind::RefInt || d.kind == DeclKind::RefFun) && (lib_refs.count(d.name) || lib_meths.count(d.name)))
      throw IncompatibleError("disjoint state: '" + d.name + "' is declared by both sides");
    if ((d.kind == DeclKind::Public || d.kind == DeclKind::Private) && (lib_meths.count(d.name) || lib_refs.count(d.name)))
      throw IncompatibleError("disjoint methods: '" + d.name + "' is defined by both sides");
  }

  surface::SourceLibrary out;
  for (const auto* side : {&lib, &client}) {
    for (Decl d : side->decls) {
      if (d.kind == DeclKind::Abstract) continue;
      if (d.kind == DeclKind::Public) d.kind = DeclKind::Private;
      out.decls.push_back(std::move(d));
    }
  }
  out.main = client.main ? client.main : lib.main;
  return out;
}

TypedLibrary link(const TypedLibrary& lib, const TypedLibrary& client) {
  TypedLibrary linked = typecheck(link_source(lib.source, client.source));
  for (auto& d : linked.decls) {
    const auto* cd = client.source.find(*d.name.label);
    d.origin = cd && cd->kind != DeclKind::Abstract ? Origin::Client : Origin::Library;
  }
  return linked;
}

// ---------------------------------------------------------------------------
// Whole-program execution

RunResult run_client(const TypedLibrary& client, int k0, const RunOptions& opts) {
  if (!client.is_client()) throw Error("run needs a client with a main body");
  BuildResult b = build(client);
  if (!b.abs.empty()) throw Error("client still imports '" + b.abs.items().front().str() + "'");
  RunResult res;
  TermConfig c{client.main, b.R, b.S, 0};
  NameSupply supply = b.supply;
  auto owner_of = [&](const std::optional<Name>& m) {
    if (!m) return Origin::Client;
    auto it = b.owner.find(*m);
    return it == b.owner.end() ? Origin::Client : it->second;
  };
  for (;;) {
    if (opts.record_history) res.history.push_back(c);
    StepResult s = step(c, supply, k0);
    switch (s.kind) {
      case StepResult::Kind::Stepped:
        ++res.steps;
        break;
      case StepResult::Kind::Value:
        res.kind = RunResult::Kind::Terminated;
        res.value = c.term;
        res.final = std::move(c);
        return res;
      case StepResult::Kind::Failed:
        res.kind = RunResult::Kind::Failed;
        res.final = std::move(c);
        return res;
      case StepResult::Kind::BoundExceeded:
        res.kind = RunResult::Kind::BoundExhausted;
        res.final = std::move(c);
        return res;
      case StepResult::Kind::External:
        throw std::logic_error("closed client called unknown method " + s.method.str());
    }
    if (!opts.record_boundary) continue;
    Origin here = owner_of(s.enclosing);
    switch (s.rule) {
      case K::Lambda:
      case K::Letrec:
        b.owner[s.method] = here;
        break;
      case K::App: {
        Origin callee = owner_of(s.method);
        if (callee != here)
          res.boundary.push_back({Move::Kind::Call, s.method, s.arg,
                                  callee == Origin::Library ? Polarity::O : Polarity::P});
        break;
      }
      case K::Box: {
        Origin callee = owner_of(s.method);
        if (callee != here)
          res.boundary.push_back({Move::Kind::Ret, s.method, s.arg,
                                  callee == Origin::Library ? Polarity::P : Polarity::O});
        break;
      }
      default:
        break;
    }
  }
}

// ---------------------------------------------------------------------------
// Game LTS

GameConfig initial_config(const BuildResult& b) {
  GameConfig g;
  g.polarity = Polarity::O;
  g.l = 0;
  g.R = b.R;
  g.S = b.S;
  g.pub = b.pub;
  g.abs = b.abs;
  g.k = 0;
  g.supply = b.supply;
  return g;
}

GameConfig apply_o_move(const GameConfig& g, const Move& mv, const Bounds& bounds) {
  if (g.polarity != Polarity::O) throw IllegalMove("Opponent move proposed in a Proponent configuration");
  if (!is_value(mv.value)) throw IllegalMove("payload is not a value: " + str(mv.value));
  if (contains_kind(mv.value, K::Sym)) throw IllegalMove("symbolic payload in concrete play");
  GameConfig next = g;
  Type expected;
  if (mv.kind == Move::Kind::Call) {
    if (!g.pub.contains(mv.method)) throw IllegalMove("OC violated: " + mv.method.str() + " is not public");
    if (g.l + 1 > bounds.l) throw IllegalMove("OQ exceeds the bound l <= " + std::to_string(bounds.l));
    expected = mv.method.type.left();
  } else {
    if (g.stack.empty() || !g.stack.back().is_context())
      throw IllegalMove("no pending Proponent call to return to");
    if (g.stack.back().method != mv.method)
      throw IllegalMove("return to " + mv.method.str() + " but the pending call is " + g.stack.back().method.str());
    expected = mv.method.type.right();
  }
  if (!value_has_type(mv.value, expected))
    throw IllegalMove("payload " + str(mv.value) + " does not have type " + expected.str());
  for (const Name& n : methods_of(mv.value)) {
    if (g.R.count(n)) {
      if (!g.pub.contains(n)) throw IllegalMove("OC violated: " + n.str() + " is private to the library");
    } else {
      next.abs.insert(n);
    }
  }
  next.polarity = Polarity::P;
  if (mv.kind == Move::Kind::Call) {
    next.stack.push_back({mv.method, nullptr, g.l + 1});
    next.term = mk_app(mk_meth(mv.method), mv.value);
  } else {
    next.term = plug(g.stack.back().context, mv.value);
    next.stack.pop_back();
  }
  return next;
}

namespace {

GameStep p_step(const GameConfig& g, const Bounds& bounds) {
  GameStep out;
  TermConfig c{g.term, g.R, g.S, g.k};
  NameSupply supply = g.supply;
  for (;;) {
    StepResult s = step(c, supply, bounds.k);
    if (s.kind == StepResult::Kind::Stepped) continue;
    out.config = g;
    out.config.term = c.term;
    out.config.R = c.R;
    out.config.S = c.S;
    out.config.k = c.k;
    out.config.supply = supply;
    GameConfig& n = out.config;
    switch (s.kind) {
      case StepResult::Kind::Failed:
        out.kind = GameStep::Kind::Failed;
        return out;
      case StepResult::Kind::BoundExceeded:
        out.kind = GameStep::Kind::BoundExhausted;
        return out;
      case StepResult::Kind::External: {
        if (!g.abs.contains(s.method)) throw std::logic_error("call to unknown method " + s.method.str());
        for (const Name& m : methods_of(s.arg))
          if (n.R.count(m)) n.pub.insert(m);
        out.move = Move{Move::Kind::Call, s.method, s.arg, Polarity::P};
        n.stack.push_back({s.method, s.context, 0});
        n.polarity = Polarity::O;
        n.term = nullptr;
        n.l = 0;
        out.kind = GameStep::Kind::Moved;
        return out;
      }
      case StepResult::Kind::Value: {
        if (n.stack.empty() || n.stack.back().is_context())
          throw std::logic_error("Proponent value without a pending Opponent call");
        GameFrame top = n.stack.back();
        n.stack.pop_back();
        for (const Name& m : methods_of(c.term))
          if (n.R.count(m)) n.pub.insert(m);
        out.move = Move{Move::Kind::Ret, top.method, c.term, Polarity::P};
        n.polarity = Polarity::O;
        n.term = nullptr;
        n.l = top.l;
        out.kind = GameStep::Kind::Moved;
        return out;
      }
      default:
        break;
    }
  }
}

}  // namespace

GameStep game_step(const GameConfig& g, ODriver& driver, const Bounds& bounds) {
  if (g.polarity == Polarity::P) return p_step(g, bounds);
  GameStep out;
  NameSupply mint = g.supply;
  std::optional<Move> mv = driver.next(g, mint);
  if (!mv) {
    out.kind = GameStep::Kind::Stopped;
    out.config = g;
    return out;
  }
  if (mv->kind == Move::Kind::Call && g.l + 1 > bounds.l) {
    out.kind = GameStep::Kind::BoundExhausted;
    out.config = g;
    return out;
  }
  GameConfig base = g;
  base.supply = mint;
  out.config = apply_o_move(base, *mv, bounds);
  out.move = mv;
  out.move->polarity = Polarity::O;
  out.kind = GameStep::Kind::Moved;
  return out;
}

// ---------------------------------------------------------------------------
// Replay

namespace {

class Renaming {
 public:
  /// Maps a trace name to the concrete one; declared names map to themselves.
  std::optional<Name> get(const Name& n) const {
    if (n.declared()) return n;
    auto it = fwd_.find(n);
    if (it == fwd_.end()) return std::nullopt;
    return it->second;
  }
  bool bind(const Name& from, const Name& to) {
    if (from.declared()) return from == to;
    if (auto it = fwd_.find(from); it != fwd_.end()) return it->second == to;
    if (back_.count(to)) return false;
    fwd_[from] = to;
    back_[to] = from;
    return true;
  }

 private:
  std::map<Name, Name> fwd_, back_;
};

/// Structural match of a trace payload against a played one, extending the renaming.
bool match(const TermPtr& expected, const TermPtr& actual, Renaming& ren) {
  if (expected->kind != actual->kind) return false;
  switch (expected->kind) {
    case K::Unit:
      return true;
    case K::Int:
      return expected->value == actual->value;
    case K::Meth:
      return ren.bind(expected->name, actual->name);
    case K::Pair:
      return match(expected->a, actual->a, ren) && match(expected->b, actual->b, ren);
    default:
      return false;
  }
}

}  // namespace

ReplayResult replay(const TypedLibrary& lib, const Trace& tau, const Bounds& bounds) {
  GameConfig g = initial_config(build(lib));
  Renaming ren;
  Trace played;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const Move& want = tau[i];
    if (g.polarity == Polarity::O) {
      if (contains_kind(want.value, K::Sym)) return Diverges{i, "symbolic payload " + str(want.value)};
      auto method = ren.get(want.method);
      if (!method) return Diverges{i, "Opponent plays unknown name " + want.method.str()};
      // New names in O's payload get fresh concrete counterparts.
      NameSupply& mint = g.supply;
      TermPtr value = map_names(want.value, [&](const Name& n) {
        if (auto known = ren.get(n)) return *known;
        Name fresh = mint.fresh(n.sort, n.type);
        ren.bind(n, fresh);
        return fresh;
      });
      Move mv{want.kind, *method, value, Polarity::O};
      try {
        g = apply_o_move(g, mv, bounds);
      } catch (const IllegalMove& e) {
        return Diverges{i, e.what()};
      }
      played.push_back(mv);
      continue;
    }
    GameStep s = p_step(g, bounds);
    if (s.kind == GameStep::Kind::Failed) return Diverges{i, "library failed before move " + want.str()};
    if (s.kind == GameStep::Kind::BoundExhausted) return Diverges{i, "call bound exhausted before move " + want.str()};
    const Move& got = *s.move;
    if (got.kind != want.kind || !ren.bind(want.method, got.method) || !match(want.value, got.value, ren))
      return Diverges{i, "expected " + want.str() + " but the library played " + got.str()};
    played.push_back(got);
    g = std::move(s.config);
  }
  Reaches out;
  out.played = std::move(played);
  if (g.polarity == Polarity::P) {
    GameStep s = p_step(g, bounds);
    out.status = s.kind;
    out.config = s.kind == GameStep::Kind::Moved ? std::move(g) : std::move(s.config);
  } else {
    out.config = std::move(g);
    out.status = GameStep::Kind::Stopped;
  }
  return out;
}

}  // namespace holi
