#include "holicheck/definability.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "holicheck/error.hpp"

namespace holi {

namespace {

using K = Term::Kind;

std::string paren_type(const Type& t) { return "(" + t.str() + ")"; }

std::string int_lit(std::int64_t v) { return v < 0 ? "(0 - " + std::to_string(-v) + ")" : std::to_string(v); }

std::string seq(const std::vector<std::string>& stmts) {
  if (stmts.empty()) return "()";
  std::string out;
  for (std::size_t i = 0; i < stmts.size(); ++i) out += (i ? "; " : "") + stmts[i];
  return "(" + out + ")";
}

/// One client reference per int or arrow leaf of a value type.
struct Leaf {
  std::string ref;
  Type type;
  std::vector<int> path;  // 1 = fst, 2 = snd
};

class Synth {
 public:
  Synth(const Trace& tau, const NameSet& pub, const NameSet& abs, const std::set<std::string>& reserved)
      : tau_(tau), pub_(pub), abs_(abs) {
    auto clash = [&](const std::string& p) {
      return std::any_of(reserved.begin(), reserved.end(), [&](const std::string& r) { return r.rfind(p, 0) == 0; });
    };
    while (clash(prefix_)) prefix_ = "c" + prefix_;
    classify();
  }

  SynthClient run() {
    std::string out;
    for (const Name& m : pub_) out += "import " + m.str() + " :" + paren_type(m.type) + "\n";
    out += "int " + g("cnt") + " := 0;\n";
    out += "int " + g("meth") + " := 0;\n";
    for (std::size_t i = 0; i < names_.size(); ++i) {
      const Name& m = names_[i];
      if (pub_.contains(m))
        out += "fun " + ref(i) + " := " + m.str() + ";\n";
      else if (pub_new_.contains(m))
        out += "fun " + ref(i) + " := " + default_fun(m.type) + ";\n";
    }
    for (const Name& m : names_) {
      val_leaves(m.type.left());
      val_leaves(m.type.right());
    }
    for (const auto& [key, leaves] : vals_)
      for (const Leaf& l : leaves)
        out += l.type.is_int() ? "int " + l.ref + " := 0;\n" : "fun " + l.ref + " := " + default_fun(l.type) + ";\n";
    for (std::size_t i = 0; i < names_.size(); ++i) {
      const Name& m = names_[i];
      if (!abs_.contains(m) && !abs_new_.contains(m)) continue;
      std::string x = g("x");
      std::vector<std::string> body{g("cnt") + " := !" + g("cnt") + " + 1", g("meth") + " := " + std::to_string(i + 1)};
      for (auto& s : write_var(m.type.left(), x)) body.push_back(s);
      body.push_back(g("oracle") + "()");
      body.push_back(read(m.type.right()));
      out += std::string(abs_.contains(m) ? "public " : "private ") + method_name(m) + " (" + x + ":" +
             paren_type(m.type.left()) + ") :" + paren_type(m.type.right()) + " = " + seq(body) + ";\n";
    }
    out += "private " + g("oracle") + " (" + g("u") + ":unit) :(unit) = " + oracle() + ";\n";
    out += "main = " + g("oracle") + "()\n";
    SynthClient c;
    c.text = out;
    c.source = surface::parse(out, surface::FileKind::Client);
    return c;
  }

 private:
  std::string g(const std::string& s) const { return prefix_ + s; }
  std::string ref(std::size_t i) const { return g("ref" + std::to_string(i + 1)); }

  std::size_t index(const Name& m) const {
    return static_cast<std::size_t>(std::find(names_.begin(), names_.end(), m) - names_.begin());
  }

  std::string method_name(const Name& m) const {
    if (abs_.contains(m)) return m.str();
    return g("w" + std::to_string(index(m) + 1));
  }

  void note(const Name& m, Polarity who) {
    if (std::find(names_.begin(), names_.end(), m) != names_.end()) return;
    names_.push_back(m);
    if (pub_.contains(m) || abs_.contains(m)) return;
    if (who == Polarity::P)
      pub_new_.insert(m);
    else
      abs_new_.insert(m);
  }

  void classify() {
    for (const Name& m : pub_) names_.push_back(m);
    for (const Name& m : abs_) names_.push_back(m);
    for (const Move& mv : tau_) {
      note(mv.method, mv.polarity);
      for (const Name& m : methods_of(mv.value)) note(m, mv.polarity);
    }
  }

  std::string type_key(const Type& t) const { return t.str(); }

  const std::vector<Leaf>& val_leaves(const Type& t) {
    auto it = vals_.find(type_key(t));
    if (it != vals_.end()) return it->second;
    std::vector<Leaf> leaves;
    std::size_t id = vals_.size() + 1;
    std::function<void(const Type&, std::vector<int>)> walk = [&](const Type& u, std::vector<int> path) {
      if (u.is_int() || u.is_arrow()) {
        leaves.push_back({g("val" + std::to_string(id) + "_" + std::to_string(leaves.size() + 1)), u, path});
      } else if (u.is_prod()) {
        auto l = path, r = path;
        l.push_back(1);
        r.push_back(2);
        walk(u.left(), l);
        walk(u.right(), r);
      }
    };
    walk(t, {});
    return vals_.emplace(type_key(t), std::move(leaves)).first->second;
  }

  static std::string project(std::string e, const std::vector<int>& path) {
    for (int step : path) e = std::string(step == 1 ? "fst" : "snd") + " (" + e + ")";
    return e;
  }

  static TermPtr project(TermPtr v, const std::vector<int>& path) {
    for (int step : path) v = step == 1 ? v->a : v->b;
    return v;
  }

  std::vector<std::string> write_var(const Type& t, const std::string& x) {
    std::vector<std::string> out;
    for (const Leaf& l : val_leaves(t)) out.push_back(l.ref + " := " + project(x, l.path));
    return out;
  }

  std::vector<std::string> write_value(const Type& t, const TermPtr& v) {
    std::vector<std::string> out;
    for (const Leaf& l : val_leaves(t)) out.push_back(l.ref + " := " + value_expr(project(v, l.path)));
    return out;
  }

  std::string read(const Type& t) {
    const auto& leaves = val_leaves(t);
    std::size_t next = 0;
    std::function<std::string(const Type&)> go = [&](const Type& u) -> std::string {
      if (u.is_unit()) return "()";
      if (u.is_prod()) {
        std::string l = go(u.left());
        std::string r = go(u.right());
        return "(" + l + ", " + r + ")";
      }
      return "!" + leaves[next++].ref;
    };
    return go(t);
  }

  /// An O-payload: integers, unit, pairs and method names.
  std::string value_expr(const TermPtr& v) {
    switch (v->kind) {
      case K::Unit: return "()";
      case K::Int: return int_lit(v->value);
      case K::Pair: return "(" + value_expr(v->a) + ", " + value_expr(v->b) + ")";
      case K::Meth: {
        const Name& m = v->name;
        if (abs_.contains(m) || abs_new_.contains(m)) return method_name(m);
        return "(!" + ref(index(m)) + ")";
      }
      default: throw IllFormedTrace("payload is not a concrete value: " + str(v));
    }
  }

  std::string diverge(const Type& t) {
    std::string f = g("loop");
    return "(letrec " + f + " = fun(" + g("y") + ":unit):" + paren_type(t) + " -> " + f + "(" + g("y") + ") in " + f +
           "(()))";
  }

  std::string default_fun(const Type& t) {
    return "fun(" + g("z") + ":" + paren_type(t.left()) + "):" + paren_type(t.right()) + " -> " + diverge(t.right());
  }

  std::string oracle() {
    std::vector<std::string> cases;
    auto next_o = [&](std::size_t pos) -> std::string {
      if (pos >= tau_.size()) return "()";
      const Move& o = tau_[pos];
      if (o.kind == Move::Kind::Call) {
        std::string x = g("r");
        std::vector<std::string> after{g("cnt") + " := !" + g("cnt") + " + 1", g("meth") + " := 0"};
        for (auto& s : write_var(o.method.type.right(), x)) after.push_back(s);
        after.push_back(g("oracle") + "()");
        std::string target =
            pub_.contains(o.method) || pub_new_.contains(o.method) ? "(!" + ref(index(o.method)) + ")" : method_name(o.method);
        return "(let " + x + " = " + target + "(" + value_expr(o.value) + ") in " + seq(after) + ")";
      }
      return seq(write_value(o.method.type.right(), o.value));
    };

    cases.push_back(next_o(0));
    for (std::size_t pos = 1; pos < tau_.size(); pos += 2) {
      const Move& p = tau_[pos];
      Type theta = p.kind == Move::Kind::Call ? p.method.type.left() : p.method.type.right();
      std::string d = p.kind == Move::Kind::Call ? std::to_string(index(p.method) + 1) : "0";
      std::string cond = "!" + g("meth") + " == " + d;
      std::vector<std::string> stores;
      const auto& leaves = val_leaves(theta);
      for (const Leaf& l : leaves) {
        TermPtr comp = project(p.value, l.path);
        if (comp->kind == K::Int) cond += " && !" + l.ref + " == " + int_lit(comp->value);
        if (comp->kind == K::Meth && pub_new_.contains(comp->name) && !stored_.count(comp->name)) {
          stored_.insert(comp->name);
          stores.push_back(ref(index(comp->name)) + " := !" + l.ref);
        }
      }
      stores.push_back(next_o(pos + 1));
      cases.push_back("(if (" + cond + ") then " + seq(stores) + " else " + diverge(Type::unit()) + ")");
    }
    std::string out = "()";
    for (std::size_t i = cases.size(); i-- > 0;)
      out = "if (!" + g("cnt") + " == " + std::to_string(i) + ") then " + cases[i] + " else " + out;
    return "{ " + out + " }";
  }

  const Trace& tau_;
  NameSet pub_, abs_, pub_new_, abs_new_;
  std::vector<Name> names_;
  std::map<std::string, std::vector<Leaf>> vals_;
  std::set<Name> stored_;
  std::string prefix_ = "c_";
};

bool has_assert(const surface::ExprPtr& e) {
  if (!e) return false;
  if (e->kind == surface::Expr::Kind::Assert) return true;
  return has_assert(e->a) || has_assert(e->b) || has_assert(e->c);
}

}  // namespace

void validate_trace(const Trace& tau, const NameSet& pub, const NameSet& abs) {
  NameSet p_names = pub, o_names = abs;
  std::vector<const Move*> stack;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    const Move& mv = tau[i];
    std::string at = "move " + std::to_string(i + 1) + " (" + mv.str() + "): ";
    Polarity expect = i % 2 == 0 ? Polarity::O : Polarity::P;
    if (mv.polarity != expect) throw IllFormedTrace(at + "players do not alternate");
    if (!mv.method.type.is_arrow()) throw IllFormedTrace(at + "not a method");
    NameSet& own = mv.polarity == Polarity::O ? o_names : p_names;
    NameSet& other = mv.polarity == Polarity::O ? p_names : o_names;
    if (mv.kind == Move::Kind::Call) {
      if (!other.contains(mv.method)) throw IllFormedTrace(at + "calls a method the caller cannot see");
      if (!value_has_type(mv.value, mv.method.type.left())) throw IllFormedTrace(at + "argument has the wrong type");
      stack.push_back(&mv);
    } else {
      if (stack.empty() || stack.back()->polarity == mv.polarity || !(stack.back()->method == mv.method))
        throw IllFormedTrace(at + "returns to no pending call");
      if (!value_has_type(mv.value, mv.method.type.right())) throw IllFormedTrace(at + "result has the wrong type");
      stack.pop_back();
    }
    if (contains_kind(mv.value, K::Sym)) throw IllFormedTrace(at + "payload is symbolic");
    for (const Name& m : methods_of(mv.value))
      if (!other.contains(m)) own.insert(m);
  }
}

SynthClient synthesize_client(const Trace& tau, const NameSet& pub, const NameSet& abs,
                              const std::set<std::string>& reserved) {
  validate_trace(tau, pub, abs);
  return Synth(tau, pub, abs, reserved).run();
}

bool is_good_client(const surface::SourceLibrary& client) {
  for (const auto& d : client.decls)
    if (has_assert(d.body) || has_assert(d.fun_init)) return false;
  return !has_assert(client.main);
}

int roundtrip_budget(int k0, const Trace& tau) { return k0 * static_cast<int>(tau.size()) + 16; }

std::string trace_shape(const Trace& tau, const std::set<std::string>& keep) {
  std::map<Name, Name> ren;
  std::uint32_t next = 0;
  auto f = [&](const Name& n) {
    if (n.declared() && keep.count(*n.label)) return n;
    if (n.sort != Sort::Method && n.sort != Sort::SymInt) return n;
    auto it = ren.find(n);
    if (it != ren.end()) return it->second;
    Name c{n.sort, kCanonicalBase + ++next, n.type, nullptr};
    ren.emplace(n, c);
    return c;
  };
  Trace out;
  for (const Move& m : tau) {
    Move c = m;
    c.method = f(m.method);
    c.value = map_names(m.value, f);
    out.push_back(c);
  }
  return str(out);
}

RoundTrip verify_roundtrip(const TypedLibrary& lib, const Finding& f, const NameSet& pub, const NameSet& abs,
                           int k_budget) {
  RoundTrip rt;
  if (!f.confirmed()) {
    rt.diagnostic = "finding is not confirmed";
    return rt;
  }
  try {
    Trace tau = concretize(f);
    std::set<std::string> reserved;
    for (const auto& d : lib.source.decls) reserved.insert(d.name);
    rt.client = synthesize_client(tau, pub, abs, reserved);
    if (!is_good_client(rt.client.source)) {
      rt.diagnostic = "synthesized client contains an assertion";
      return rt;
    }
    TypedLibrary linked = link(lib, typecheck(rt.client.source));
    RunResult run = run_client(linked, k_budget, {.record_history = false, .record_boundary = true});
    rt.boundary = run.boundary;
    std::set<std::string> keep;
    for (const Name& m : pub) keep.insert(m.str());
    for (const Name& m : abs) keep.insert(m.str());
    rt.faithful = trace_shape(run.boundary, keep) == trace_shape(tau, keep);
    switch (run.kind) {
      case RunResult::Kind::Failed:
        rt.reproduced = true;
        if (!rt.faithful) rt.diagnostic = "boundary trace differs: " + trace_shape(run.boundary, keep);
        break;
      case RunResult::Kind::Terminated:
        rt.diagnostic = "client run terminated without failure";
        break;
      case RunResult::Kind::BoundExhausted:
        rt.diagnostic = "client run exhausted the budget k=" + std::to_string(k_budget);
        break;
    }
  } catch (const Error& e) {
    rt.diagnostic = e.what();
  }
  return rt;
}

}  // namespace holi
