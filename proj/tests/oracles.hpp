// Independent reference computations shared by the unit suites and the acceptance binary.
#pragma once

#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "holicheck/concrete.hpp"
#include "holicheck/engine.hpp"
#include "holicheck/solver.hpp"
#include "holicheck/typecheck.hpp"

namespace holi::oracle {

inline std::string sample_path(const std::string& name) { return std::string(HOLICHECK_SAMPLES) + "/" + name; }

inline std::string read_sample(const std::string& name) {
  std::ifstream in(sample_path(name));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline TypedLibrary sample(const std::string& name) { return load(read_sample(name)); }

/// Completes a model of the free symbolic integers by evaluating sigma's definitions.
inline Model extend_model(const Finding& f, Model m, const std::vector<Name>& declared) {
  std::function<std::int64_t(const Name&)> value = [&](const Name& k) -> std::int64_t {
    if (auto it = m.find(k); it != m.end()) return it->second;
    const TermPtr* def = f.sigma.find(k);
    if (!def) return m[k] = 0;
    std::function<std::int64_t(const TermPtr&)> ev = [&](const TermPtr& e) -> std::int64_t {
      if (e->kind == Term::Kind::Int) return e->value;
      if (e->kind == Term::Kind::Sym) return value(e->name);
      return apply_op(e->op, ev(e->a), ev(e->b));
    };
    std::int64_t v = ev(*def);
    return m[k] = v;
  };
  for (const Name& n : declared) value(n);
  return m;
}

inline Model extend_model(const Finding& f, Model m) { return extend_model(f, std::move(m), f.formula().declared); }

/// Symbolic integers a finding leaves free: declared in its formula, not defined by sigma.
inline std::vector<Name> free_symints(const Finding& f) {
  std::vector<Name> out;
  for (const Name& n : f.formula().declared)
    if (!f.sigma.contains(n)) out.push_back(n);
  return out;
}

/// Every concrete failing trace a finding stands for, with free integers drawn from `ints`.
inline void instances(const Finding& f, const std::vector<std::int64_t>& ints, std::set<std::string>& out) {
  Formula phi = f.formula();
  std::vector<Name> vars;
  for (const Name& n : phi.declared)
    if (!f.sigma.contains(n)) vars.push_back(n);
  std::vector<std::size_t> idx(vars.size(), 0);
  for (;;) {
    Model base;
    for (std::size_t i = 0; i < vars.size(); ++i) base[vars[i]] = ints[idx[i]];
    Model m = extend_model(f, base, phi.declared);
    if (eval_model(m, phi)) out.insert(str(canonicalize(concretize(m, f.trace))));
    std::size_t i = 0;
    while (i < idx.size() && ++idx[i] == ints.size()) idx[i++] = 0;
    if (i == idx.size()) break;
  }
}

/// Failing traces found by enumerating every concrete Opponent strategy whose
/// integers come from `ints` and whose method arguments are fresh names.
class BruteForce {
 public:
  BruteForce(const TypedLibrary& lib, Bounds bounds, std::vector<std::int64_t> ints)
      : bounds_(bounds), ints_(std::move(ints)) {
    root_ = initial_config(build(lib));
  }

  std::set<std::string> failures() {
    Trace prefix;
    o_turn(root_, prefix);
    return found_;
  }

  std::size_t plays() const { return plays_; }

 private:
  struct NoDriver : ODriver {
    std::optional<Move> next(const GameConfig&, NameSupply&) override { return std::nullopt; }
  };

  void values(const Type& t, const NameSupply& base, std::vector<std::pair<TermPtr, NameSupply>>& out) {
    switch (t.kind()) {
      case Type::Kind::Unit:
        out.emplace_back(mk_unit(), base);
        return;
      case Type::Kind::Int:
        for (auto v : ints_) out.emplace_back(mk_int(v), base);
        return;
      case Type::Kind::Arrow: {
        NameSupply s = base;
        Name m = s.fresh(Sort::Method, t);
        out.emplace_back(mk_meth(m), s);
        return;
      }
      case Type::Kind::Prod: {
        std::vector<std::pair<TermPtr, NameSupply>> left;
        values(t.left(), base, left);
        for (auto& [l, s] : left) {
          std::vector<std::pair<TermPtr, NameSupply>> right;
          values(t.right(), s, right);
          for (auto& [r, s2] : right) out.emplace_back(mk_pair(l, r), s2);
        }
        return;
      }
    }
  }

  void o_turn(const GameConfig& g, Trace& prefix) {
    std::vector<std::pair<Move, NameSupply>> moves;
    auto add = [&](Move::Kind kind, const Name& m, const Type& t) {
      std::vector<std::pair<TermPtr, NameSupply>> vs;
      values(t, g.supply, vs);
      for (auto& [v, s] : vs) moves.push_back({Move{kind, m, v, Polarity::O}, s});
    };
    if (!g.stack.empty() && g.stack.back().is_context())
      add(Move::Kind::Ret, g.stack.back().method, g.stack.back().method.type.right());
    if (g.l + 1 <= bounds_.l)
      for (const Name& m : g.pub) add(Move::Kind::Call, m, m.type.left());
    if (moves.empty()) ++plays_;
    for (auto& [mv, supply] : moves) {
      GameConfig base = g;
      base.supply = supply;
      GameConfig p = apply_o_move(base, mv, bounds_);
      prefix.push_back(mv);
      NoDriver d;
      GameStep s = game_step(p, d, bounds_);
      switch (s.kind) {
        case GameStep::Kind::Moved:
          prefix.push_back(*s.move);
          o_turn(s.config, prefix);
          prefix.pop_back();
          break;
        case GameStep::Kind::Failed:
          ++plays_;
          found_.insert(str(canonicalize(prefix)));
          break;
        default:
          ++plays_;
          break;
      }
      prefix.pop_back();
    }
  }

  Bounds bounds_;
  std::vector<std::int64_t> ints_;
  GameConfig root_;
  std::set<std::string> found_;
  std::size_t plays_ = 0;
};

/// Canonical traces of the Failed findings.
inline std::set<std::string> failure_set(const Exploration& e) {
  std::set<std::string> out;
  for (const Finding& f : e.findings)
    if (f.failed()) out.insert(str(canonicalize(f.trace)));
  return out;
}

}  // namespace holi::oracle
