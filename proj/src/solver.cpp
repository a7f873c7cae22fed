#include "holicheck/solver.hpp"

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <csignal>
#include <cstring>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace holi {

namespace {
using K = Term::Kind;
}

std::string str(const Atom& a) {
  return str(a.lhs) + (a.rel == Atom::Rel::Eq ? " = " : " != ") + str(a.rhs);
}

std::vector<Atom> sigma_formula(const SymEnv& sigma) {
  std::vector<Atom> out;
  for (const auto& [n, v] : sigma)
    if (n.sort == Sort::SymInt) out.push_back({Atom::Rel::Eq, mk_sym(n), v});
  return out;
}

Formula path_formula(const PathCondition& pc, const SymEnv& sigma, const std::vector<Name>& declared) {
  Formula f;
  f.atoms = pc.to_vector();
  for (auto& a : sigma_formula(sigma)) f.atoms.push_back(std::move(a));
  auto add = [&](const Name& n) {
    if (std::find(f.declared.begin(), f.declared.end(), n) == f.declared.end()) f.declared.push_back(n);
  };
  for (const Name& n : declared) add(n);
  for (const auto& [n, v] : sigma)
    if (n.sort == Sort::SymInt) add(n);
  for (const auto& a : f.atoms) {
    for (const Name& n : symints_of(a.lhs)) add(n);
    for (const Name& n : symints_of(a.rhs)) add(n);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Models

std::int64_t eval_model(const Model& m, const TermPtr& e) {
  switch (e->kind) {
    case K::Int:
      return e->value;
    case K::Sym: {
      auto it = m.find(e->name);
      if (it == m.end()) throw UnboundSymbol("no value for " + e->name.str());
      return it->second;
    }
    case K::BinOp:
      return apply_op(e->op, eval_model(m, e->a), eval_model(m, e->b));
    default:
      throw std::logic_error("not an integer expression: " + str(e));
  }
}

bool eval_model(const Model& m, const Atom& a) {
  bool eq = eval_model(m, a.lhs) == eval_model(m, a.rhs);
  return a.rel == Atom::Rel::Eq ? eq : !eq;
}

bool eval_model(const Model& m, const Formula& phi) {
  for (const auto& a : phi.atoms)
    if (!eval_model(m, a)) return false;
  return true;
}

TermPtr concretize(const Model& m, const TermPtr& t) {
  if (!t) return t;
  if (t->kind == K::Sym) return mk_int(eval_model(m, t));
  TermPtr a = concretize(m, t->a), b = concretize(m, t->b), c = concretize(m, t->c);
  if (a == t->a && b == t->b && c == t->c) return t;
  auto copy = std::make_shared<Term>(*t);
  copy->a = a;
  copy->b = b;
  copy->c = c;
  return copy;
}

Trace concretize(const Model& m, const Trace& t) {
  Trace out = t;
  for (auto& mv : out) mv.value = concretize(m, mv.value);
  return out;
}

// ---------------------------------------------------------------------------
// SMT-LIB

namespace {

std::string smt_int(std::int64_t v) {
  if (v == INT64_MIN) return "(- 9223372036854775808)";
  if (v < 0) return "(- " + std::to_string(-v) + ")";
  return std::to_string(v);
}

std::string truthy(const std::string& t) { return "(not (= " + t + " 0))"; }

}  // namespace

std::string smt_term(const TermPtr& e) {
  switch (e->kind) {
    case K::Int:
      return smt_int(e->value);
    case K::Sym:
      return e->name.str();
    case K::BinOp: {
      std::string a = smt_term(e->a), b = smt_term(e->b);
      auto bool01 = [](const std::string& cond) { return "(ite " + cond + " 1 0)"; };
      switch (e->op) {
        case Op::Add: return "(+ " + a + " " + b + ")";
        case Op::Sub: return "(- " + a + " " + b + ")";
        case Op::Mul: return "(* " + a + " " + b + ")";
        case Op::Lt: return bool01("(< " + a + " " + b + ")");
        case Op::Gt: return bool01("(> " + a + " " + b + ")");
        case Op::Le: return bool01("(<= " + a + " " + b + ")");
        case Op::Ge: return bool01("(>= " + a + " " + b + ")");
        case Op::Eq: return bool01("(= " + a + " " + b + ")");
        case Op::Ne: return bool01("(not (= " + a + " " + b + "))");
        case Op::And: return bool01("(and " + truthy(a) + " " + truthy(b) + ")");
        case Op::Or: return bool01("(or " + truthy(a) + " " + truthy(b) + ")");
      }
      break;
    }
    default:
      break;
  }
  throw std::logic_error("not an integer expression: " + str(e));
}

namespace {
std::string smt_atom(const Atom& a) {
  std::string eq = "(= " + smt_term(a.lhs) + " " + smt_term(a.rhs) + ")";
  return a.rel == Atom::Rel::Eq ? eq : "(not " + eq + ")";
}
}  // namespace

std::string smt_formula(const std::vector<Atom>& atoms) {
  if (atoms.empty()) return "true";
  if (atoms.size() == 1) return smt_atom(atoms.front());
  std::string out = "(and";
  for (const auto& a : atoms) out += " " + smt_atom(a);
  return out + ")";
}

std::string emit_smtlib(const Formula& phi) {
  std::string out = "(set-option :produce-models true)\n(set-logic ALL)\n";
  for (const Name& n : phi.declared) out += "(declare-const " + n.str() + " Int)\n";
  for (const auto& a : phi.atoms) out += "(assert " + smt_atom(a) + ")\n";
  out += "(check-sat)\n(get-model)\n";
  return out;
}

std::vector<SExpr> parse_sexprs(const std::string& text) {
  std::vector<std::vector<SExpr>> stack(1);
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == ';') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == '(') {
      stack.emplace_back();
      ++i;
    } else if (c == ')') {
      if (stack.size() < 2) throw BackendError("unbalanced ')' in solver reply");
      SExpr e;
      e.list = std::move(stack.back());
      stack.pop_back();
      if (e.list.empty()) e.atom = "()";
      stack.back().push_back(std::move(e));
      ++i;
    } else if (c == '"') {
      std::size_t j = text.find('"', i + 1);
      if (j == std::string::npos) throw BackendError("unterminated string in solver reply");
      stack.back().push_back(SExpr{text.substr(i, j - i + 1), {}});
      i = j + 1;
    } else if (c == '|') {
      std::size_t j = text.find('|', i + 1);
      if (j == std::string::npos) throw BackendError("unterminated symbol in solver reply");
      stack.back().push_back(SExpr{text.substr(i + 1, j - i - 1), {}});
      i = j + 1;
    } else {
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != '(' && text[j] != ')')
        ++j;
      stack.back().push_back(SExpr{text.substr(i, j - i), {}});
      i = j;
    }
  }
  if (stack.size() != 1) throw BackendError("unbalanced '(' in solver reply");
  return std::move(stack.front());
}

namespace {

std::int64_t sexpr_int(const SExpr& e) {
  if (e.is_atom()) {
    try {
      std::size_t used = 0;
      long long v = std::stoll(e.atom, &used);
      if (used != e.atom.size()) throw BackendError("bad integer '" + e.atom + "'");
      return v;
    } catch (const std::logic_error&) {
      throw BackendError("bad integer '" + e.atom + "'");
    }
  }
  if (e.list.size() == 2 && e.list[0].atom == "-") return -sexpr_int(e.list[1]);
  throw BackendError("unsupported model value");
}

void collect_defines(const SExpr& e, std::map<std::string, std::int64_t>& out) {
  if (e.list.size() == 5 && e.list[0].atom == "define-fun" && e.list[3].atom == "Int") {
    out[e.list[1].atom] = sexpr_int(e.list[4]);
    return;
  }
  for (const auto& c : e.list) collect_defines(c, out);
}

}  // namespace

SatResult parse_reply(const std::string& reply, const std::vector<Name>& declared) {
  std::vector<SExpr> items = parse_sexprs(reply);
  if (items.empty()) throw BackendError("empty solver reply");
  const std::string& verdict = items.front().atom;
  if (verdict == "unsat") return Unsat{};
  if (verdict == "unknown") return Unknown{"solver answered unknown"};
  if (verdict != "sat") throw BackendError("unexpected solver reply: " + reply.substr(0, 200));
  std::map<std::string, std::int64_t> values;
  for (std::size_t i = 1; i < items.size(); ++i) collect_defines(items[i], values);
  Model m;
  for (const Name& n : declared) {
    auto it = values.find(n.str());
    m[n] = it == values.end() ? 0 : it->second;
  }
  return Sat{std::move(m)};
}

namespace {

std::string run_process(const std::string& command, const std::string& input) {
  std::vector<std::string> argv_s;
  std::istringstream in(command);
  for (std::string w; in >> w;) argv_s.push_back(w);
  if (argv_s.empty()) throw BackendError("empty solver command");
  std::vector<char*> argv;
  for (auto& s : argv_s) argv.push_back(s.data());
  argv.push_back(nullptr);

  int to_child[2], from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0) throw BackendError(std::string("pipe: ") + std::strerror(errno));
  pid_t pid = fork();
  if (pid < 0) throw BackendError(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    dup2(to_child[0], 0);
    dup2(from_child[1], 1);
    int devnull = open("/dev/null", O_WRONLY);
    if (devnull >= 0) dup2(devnull, 2);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    execvp(argv[0], argv.data());
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);
  // A solver that exits early must not kill us with SIGPIPE.
  auto old = std::signal(SIGPIPE, SIG_IGN);
  std::size_t off = 0;
  while (off < input.size()) {
    ssize_t n = write(to_child[1], input.data() + off, input.size() - off);
    if (n <= 0) break;
    off += static_cast<std::size_t>(n);
  }
  close(to_child[1]);
  std::string out;
  char buf[4096];
  for (;;) {
    ssize_t n = read(from_child[0], buf, sizeof buf);
    if (n <= 0) break;
    out.append(buf, static_cast<std::size_t>(n));
  }
  close(from_child[0]);
  int status = 0;
  waitpid(pid, &status, 0);
  std::signal(SIGPIPE, old);
  if (WIFEXITED(status) && WEXITSTATUS(status) == 127 && out.empty())
    throw BackendError("could not run solver '" + argv_s[0] + "'");
  return out;
}

}  // namespace

SatResult check_sat_external(const Formula& phi, const std::string& command) {
  std::string reply = run_process(command, emit_smtlib(phi));
  SatResult r = parse_reply(reply, phi.declared);
  if (auto* s = std::get_if<Sat>(&r); s && !eval_model(s->model, phi))
    throw BackendError("solver model does not satisfy the formula");
  return r;
}

// ---------------------------------------------------------------------------
// Builtin backend: interval propagation plus search over a box.

namespace {

constexpr std::int64_t INF = std::int64_t{1} << 62;

std::int64_t clamp(__int128 v) {
  if (v > INF) return INF;
  if (v < -INF) return -INF;
  return static_cast<std::int64_t>(v);
}

struct Interval {
  std::int64_t lo = -INF, hi = INF;
  bool empty() const { return lo > hi; }
  bool point() const { return lo == hi; }
  bool has(std::int64_t v) const { return lo <= v && v <= hi; }
  std::int64_t width() const { return clamp(static_cast<__int128>(hi) - lo); }
};

Interval meet(Interval a, Interval b) { return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }
const Interval kBool{0, 1};
const Interval kTrue{1, 1};
const Interval kFalse{0, 0};

struct Node {
  enum class Tag { Const, Var, Op } tag;
  std::int64_t value = 0;  // Const
  int var = -1;            // Var
  Op op = Op::Add;
  int l = -1, r = -1;
};

class Builtin {
 public:
  Builtin(const Formula& phi, std::int64_t box) : box_(box) {
    for (const auto& a : phi.atoms) {
      int l = compile(a.lhs), r = compile(a.rhs);
      Node n{Node::Tag::Op};
      n.op = a.rel == Atom::Rel::Eq ? Op::Eq : Op::Ne;
      n.l = l;
      n.r = r;
      nodes_.push_back(n);
      roots_.push_back(static_cast<int>(nodes_.size()) - 1);
      if (a.rel == Atom::Rel::Eq && a.lhs->kind == K::Sym) {
        std::vector<Name> deps = symints_of(a.rhs);
        if (std::find(deps.begin(), deps.end(), a.lhs->name) == deps.end()) defined_.push_back(var_index(a.lhs->name));
      }
    }
    for (const Name& n : phi.declared) var_index(n);
    declared_ = phi.declared;
  }

  SatResult solve() {
    std::vector<Interval> dom(vars_.size());
    // Conflicts over unbounded domains, and linear refutations, are proofs.
    if (!propagate(dom)) return Unsat{};
    if (linear_refutes(dom)) return Unsat{};
    bool box_matters = false;
    for (std::size_t v = 0; v < vars_.size(); ++v) {
      if (is_defined(static_cast<int>(v))) continue;
      Interval b = meet(dom[v], {-box_, box_});
      if (b.lo != dom[v].lo || b.hi != dom[v].hi) box_matters = true;
      dom[v] = b;
    }
    if (!propagate(dom)) return box_matters ? SatResult{Unknown{"no witness within the box"}} : SatResult{Unsat{}};
    order_.clear();
    for (std::size_t v = 0; v < vars_.size(); ++v)
      if (!is_defined(static_cast<int>(v))) order_.push_back(static_cast<int>(v));
    for (int v : defined_)
      if (std::find(order_.begin(), order_.end(), v) == order_.end()) order_.push_back(v);
    budget_ = 200000;
    exhausted_budget_ = false;
    if (auto m = search(dom)) return Sat{std::move(*m)};
    if (exhausted_budget_) return Unknown{"search budget exhausted"};
    if (box_matters || unbounded_split_) return Unknown{"no witness within the box"};
    return Unsat{};
  }

 private:
  int var_index(const Name& n) {
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i] == n) return static_cast<int>(i);
    vars_.push_back(n);
    return static_cast<int>(vars_.size()) - 1;
  }

  bool is_defined(int v) const { return std::find(defined_.begin(), defined_.end(), v) != defined_.end(); }

  int compile(const TermPtr& e) {
    Node n{Node::Tag::Const};
    switch (e->kind) {
      case K::Int:
        n.value = e->value;
        break;
      case K::Sym:
        n.tag = Node::Tag::Var;
        n.var = var_index(e->name);
        break;
      case K::BinOp:
        n.tag = Node::Tag::Op;
        n.op = e->op;
        n.l = compile(e->a);
        n.r = compile(e->b);
        break;
      default:
        throw std::logic_error("not an integer expression: " + str(e));
    }
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
  }

  Interval forward(int i, const std::vector<Interval>& dom, std::vector<Interval>& val) const {
    const Node& n = nodes_[i];
    Interval out;
    switch (n.tag) {
      case Node::Tag::Const:
        out = {n.value, n.value};
        break;
      case Node::Tag::Var:
        out = dom[n.var];
        break;
      case Node::Tag::Op: {
        Interval a = forward(n.l, dom, val), b = forward(n.r, dom, val);
        using I = __int128;
        switch (n.op) {
          case Op::Add: out = {clamp(I(a.lo) + b.lo), clamp(I(a.hi) + b.hi)}; break;
          case Op::Sub: out = {clamp(I(a.lo) - b.hi), clamp(I(a.hi) - b.lo)}; break;
          case Op::Mul: {
            I p[4] = {I(a.lo) * b.lo, I(a.lo) * b.hi, I(a.hi) * b.lo, I(a.hi) * b.hi};
            out = {clamp(*std::min_element(p, p + 4)), clamp(*std::max_element(p, p + 4))};
            break;
          }
          case Op::Lt: out = a.hi < b.lo ? kTrue : a.lo >= b.hi ? kFalse : kBool; break;
          case Op::Gt: out = a.lo > b.hi ? kTrue : a.hi <= b.lo ? kFalse : kBool; break;
          case Op::Le: out = a.hi <= b.lo ? kTrue : a.lo > b.hi ? kFalse : kBool; break;
          case Op::Ge: out = a.lo >= b.hi ? kTrue : a.hi < b.lo ? kFalse : kBool; break;
          case Op::Eq:
          case Op::Ne: {
            Interval eq = a.point() && b.point() && a.lo == b.lo ? kTrue : meet(a, b).empty() ? kFalse : kBool;
            out = n.op == Op::Eq ? eq : eq.point() ? Interval{1 - eq.lo, 1 - eq.lo} : kBool;
            break;
          }
          case Op::And:
            out = (a.point() && a.lo == 0) || (b.point() && b.lo == 0) ? kFalse
                  : (!a.has(0) && !b.has(0))                            ? kTrue
                                                                         : kBool;
            break;
          case Op::Or:
            out = (!a.has(0) || !b.has(0))                               ? kTrue
                  : (a.point() && a.lo == 0 && b.point() && b.lo == 0) ? kFalse
                                                                         : kBool;
            break;
        }
        break;
      }
    }
    val[i] = out;
    return out;
  }

  static Interval nonzero_trim(Interval x) {
    if (x.lo == 0) x.lo = 1;
    if (x.hi == 0) x.hi = -1;
    return x;
  }

  // Narrows node `i` to `t`; false on conflict. `val` holds forward intervals.
  bool backward(int i, Interval t, std::vector<Interval>& dom, const std::vector<Interval>& val) {
    const Node& n = nodes_[i];
    t = meet(t, val[i]);
    if (t.empty()) return false;
    using I = __int128;
    switch (n.tag) {
      case Node::Tag::Const:
        return true;
      case Node::Tag::Var: {
        Interval d = meet(dom[n.var], t);
        if (d.empty()) return false;
        dom[n.var] = d;
        return true;
      }
      case Node::Tag::Op:
        break;
    }
    Interval a = val[n.l], b = val[n.r];
    switch (n.op) {
      case Op::Add:
        return backward(n.l, {clamp(I(t.lo) - b.hi), clamp(I(t.hi) - b.lo)}, dom, val) &&
               backward(n.r, {clamp(I(t.lo) - a.hi), clamp(I(t.hi) - a.lo)}, dom, val);
      case Op::Sub:
        return backward(n.l, {clamp(I(t.lo) + b.lo), clamp(I(t.hi) + b.hi)}, dom, val) &&
               backward(n.r, {clamp(I(a.lo) - t.hi), clamp(I(a.hi) - t.lo)}, dom, val);
      case Op::Mul: {
        auto by_const = [&](int child, std::int64_t c) {
          if (c == 0) return true;
          if (t.lo == -INF || t.hi == INF) return true;
          auto fdiv = [](I x, I y) { I q = x / y; return (x % y != 0 && ((x < 0) != (y < 0))) ? q - 1 : q; };
          auto cdiv = [&](I x, I y) { return -fdiv(-x, y); };
          Interval r = c > 0 ? Interval{clamp(cdiv(t.lo, c)), clamp(fdiv(t.hi, c))}
                             : Interval{clamp(cdiv(t.hi, c)), clamp(fdiv(t.lo, c))};
          return backward(child, r, dom, val);
        };
        if (b.point()) return by_const(n.l, b.lo);
        if (a.point()) return by_const(n.r, a.lo);
        return true;
      }
      case Op::Lt:
      case Op::Gt:
      case Op::Le:
      case Op::Ge: {
        if (!t.point()) return true;
        // Normalise to "x < y" or "x <= y".
        Op op = n.op;
        int x = n.l, y = n.r;
        Interval xi = a, yi = b;
        if (op == Op::Gt || op == Op::Ge) {
          std::swap(x, y);
          std::swap(xi, yi);
          op = op == Op::Gt ? Op::Lt : Op::Le;
        }
        if (t.lo == 0) {  // negation: y <= x (for <) or y < x (for <=)
          std::swap(x, y);
          std::swap(xi, yi);
          op = op == Op::Lt ? Op::Le : Op::Lt;
        }
        std::int64_t gap = op == Op::Lt ? 1 : 0;
        return backward(x, {-INF, clamp(I(yi.hi) - gap)}, dom, val) &&
               backward(y, {clamp(I(xi.lo) + gap), INF}, dom, val);
      }
      case Op::Eq:
      case Op::Ne: {
        if (!t.point()) return true;
        bool equal = (n.op == Op::Eq) == (t.lo == 1);
        if (equal) {
          Interval m = meet(a, b);
          return backward(n.l, m, dom, val) && backward(n.r, m, dom, val);
        }
        if (b.point()) {
          Interval x = a;
          if (x.lo == b.lo) ++x.lo;
          if (x.hi == b.lo) --x.hi;
          if (!backward(n.l, x, dom, val)) return false;
        }
        if (a.point()) {
          Interval y = b;
          if (y.lo == a.lo) ++y.lo;
          if (y.hi == a.lo) --y.hi;
          if (!backward(n.r, y, dom, val)) return false;
        }
        return true;
      }
      case Op::And:
        if (!t.point()) return true;
        if (t.lo == 1) return backward(n.l, nonzero_trim(a), dom, val) && backward(n.r, nonzero_trim(b), dom, val);
        if (!a.has(0)) return backward(n.r, Interval{0, 0}, dom, val);
        if (!b.has(0)) return backward(n.l, Interval{0, 0}, dom, val);
        return true;
      case Op::Or:
        if (!t.point()) return true;
        if (t.lo == 0) return backward(n.l, {0, 0}, dom, val) && backward(n.r, {0, 0}, dom, val);
        if (a.point() && a.lo == 0) return backward(n.r, nonzero_trim(b), dom, val);
        if (b.point() && b.lo == 0) return backward(n.l, nonzero_trim(a), dom, val);
        return true;
    }
    return true;
  }

  // Linear relaxation: sum a_i x_i <= b, refuted by Fourier-Motzkin.
  struct Linear {
    std::map<int, __int128> a;
    __int128 c = 0;
  };
  struct Ineq {
    std::map<int, __int128> a;
    __int128 b = 0;
  };

  std::optional<Linear> linear(int i, const std::vector<Interval>& dom) const {
    const Node& n = nodes_[i];
    Linear out;
    switch (n.tag) {
      case Node::Tag::Const:
        out.c = n.value;
        return out;
      case Node::Tag::Var:
        if (dom[n.var].point()) out.c = dom[n.var].lo;
        else out.a[n.var] = 1;
        return out;
      case Node::Tag::Op:
        break;
    }
    if (n.op != Op::Add && n.op != Op::Sub && n.op != Op::Mul) return std::nullopt;
    auto l = linear(n.l, dom), r = linear(n.r, dom);
    if (!l || !r) return std::nullopt;
    if (n.op == Op::Mul) {
      if (!l->a.empty() && !r->a.empty()) return std::nullopt;
      if (!l->a.empty()) std::swap(l, r);
      for (auto& [v, k] : r->a) out.a[v] = k * l->c;
      out.c = r->c * l->c;
      return out;
    }
    __int128 sign = n.op == Op::Add ? 1 : -1;
    out = *l;
    for (auto& [v, k] : r->a) out.a[v] += sign * k;
    out.c += sign * r->c;
    return out;
  }

  /// l - r <= b
  static Ineq diff(const Linear& l, const Linear& r, __int128 b) {
    Ineq q;
    q.a = l.a;
    for (auto& [v, k] : r.a) q.a[v] -= k;
    q.b = b - l.c + r.c;
    return q;
  }

  static bool tighten(Ineq& q) {
    __int128 g = 0;
    for (auto it = q.a.begin(); it != q.a.end();) {
      if (it->second == 0) {
        it = q.a.erase(it);
        continue;
      }
      __int128 x = it->second < 0 ? -it->second : it->second;
      if (x > (static_cast<__int128>(1) << 60)) return false;
      __int128 y = g;
      while (y) {
        __int128 t = x % y;
        x = y;
        y = t;
      }
      g = x;
      ++it;
    }
    if (g > 1) {
      for (auto& [v, k] : q.a) k /= g;
      __int128 fl = q.b / g;
      if (q.b % g != 0 && q.b < 0) --fl;
      q.b = fl;
    }
    return q.b < (static_cast<__int128>(1) << 100) && q.b > -(static_cast<__int128>(1) << 100);
  }

  bool linear_refutes(const std::vector<Interval>& dom) const {
    std::vector<Interval> val(nodes_.size());
    std::vector<Ineq> rows;
    auto add_eq = [&](const Linear& l, const Linear& r) {
      rows.push_back(diff(l, r, 0));
      rows.push_back(diff(r, l, 0));
    };
    auto add_cmp = [&](int cmp, bool holds) {
      const Node& n = nodes_[cmp];
      auto l = linear(n.l, dom), r = linear(n.r, dom);
      if (!l || !r) return;
      switch (n.op) {
        case Op::Lt: holds ? rows.push_back(diff(*l, *r, -1)) : rows.push_back(diff(*r, *l, 0)); break;
        case Op::Le: holds ? rows.push_back(diff(*l, *r, 0)) : rows.push_back(diff(*r, *l, -1)); break;
        case Op::Gt: holds ? rows.push_back(diff(*r, *l, -1)) : rows.push_back(diff(*l, *r, 0)); break;
        case Op::Ge: holds ? rows.push_back(diff(*r, *l, 0)) : rows.push_back(diff(*l, *r, -1)); break;
        case Op::Eq: if (holds) add_eq(*l, *r); break;
        case Op::Ne: if (!holds) add_eq(*l, *r); break;
        default: break;
      }
    };
    auto is_cmp = [&](int i) {
      const Node& n = nodes_[i];
      return n.tag == Node::Tag::Op && n.op != Op::Add && n.op != Op::Sub && n.op != Op::Mul && n.op != Op::And &&
             n.op != Op::Or;
    };
    for (int root : roots_) {
      const Node& n = nodes_[root];
      forward(root, dom, val);
      bool eq = n.op == Op::Eq;
      if (eq) {
        auto l = linear(n.l, dom), r = linear(n.r, dom);
        if (l && r) {
          add_eq(*l, *r);
          continue;
        }
      }
      for (auto [cmp, other] : {std::pair{n.l, n.r}, std::pair{n.r, n.l}}) {
        if (!is_cmp(cmp) || !val[other].point()) continue;
        bool other_true = val[other].lo != 0;
        if (val[other].lo != 0 && val[other].lo != 1) break;
        add_cmp(cmp, eq ? other_true : !other_true);
        break;
      }
    }
    for (auto& q : rows)
      if (!tighten(q)) return false;

    for (;;) {
      for (const Ineq& q : rows)
        if (q.a.empty() && q.b < 0) return true;
      std::map<int, std::pair<int, int>> counts;
      for (const Ineq& q : rows)
        for (auto& [v, k] : q.a) (k > 0 ? counts[v].first : counts[v].second)++;
      if (counts.empty()) return false;
      int pick = -1;
      long best = -1;
      for (auto& [v, pn] : counts) {
        long cost = static_cast<long>(pn.first) * pn.second - pn.first - pn.second;
        if (pick < 0 || cost < best) {
          pick = v;
          best = cost;
        }
      }
      std::vector<Ineq> pos, neg, next;
      for (Ineq& q : rows) {
        auto it = q.a.find(pick);
        if (it == q.a.end()) next.push_back(std::move(q));
        else if (it->second > 0) pos.push_back(std::move(q));
        else neg.push_back(std::move(q));
      }
      if (next.size() + pos.size() * neg.size() > 4000) return false;
      for (const Ineq& p : pos)
        for (const Ineq& q : neg) {
          __int128 kp = p.a.at(pick), kq = -q.a.at(pick);
          Ineq r;
          for (auto& [v, k] : p.a) r.a[v] += k * kq;
          for (auto& [v, k] : q.a) r.a[v] += k * kp;
          r.a.erase(pick);
          r.b = p.b * kq + q.b * kp;
          if (!tighten(r)) return false;
          next.push_back(std::move(r));
        }
      rows = std::move(next);
    }
  }

  bool propagate(std::vector<Interval>& dom) {
    std::vector<Interval> val(nodes_.size());
    for (int round = 0; round < 64; ++round) {
      std::vector<Interval> before = dom;
      for (int root : roots_) {
        forward(root, dom, val);
        if (!backward(root, kTrue, dom, val)) return false;
      }
      bool changed = false;
      for (std::size_t v = 0; v < dom.size(); ++v)
        if (dom[v].lo != before[v].lo || dom[v].hi != before[v].hi) changed = true;
      if (!changed) return true;
    }
    return true;
  }

  std::optional<Model> search(std::vector<Interval> dom) {
    if (--budget_ < 0) {
      exhausted_budget_ = true;
      return std::nullopt;
    }
    if (!propagate(dom)) return std::nullopt;
    int pick = -1;
    for (int v : order_)
      if (!dom[v].point()) {
        pick = v;
        break;
      }
    if (pick < 0) {
      Model m;
      for (std::size_t v = 0; v < vars_.size(); ++v) m[vars_[v]] = dom[v].lo;
      if (verify(m)) return m;
      return std::nullopt;
    }
    Interval d = dom[pick];
    if (d.lo == -INF || d.hi == INF) unbounded_split_ = true;
    std::vector<Interval> parts;
    if (d.width() < 32) {
      std::vector<std::int64_t> values;
      for (std::int64_t x = d.lo; x <= d.hi; ++x) values.push_back(x);
      std::stable_sort(values.begin(), values.end(), [](std::int64_t x, std::int64_t y) {
        auto ax = x < 0 ? -x : x, ay = y < 0 ? -y : y;
        return ax != ay ? ax < ay : x > y;
      });
      for (auto x : values) parts.push_back({x, x});
    } else if (d.has(0)) {
      parts = {{0, 0}, {1, d.hi}, {d.lo, -1}};
    } else if (d.lo > 0) {
      std::int64_t mid = d.lo + (d.hi - d.lo) / 2;
      parts = {{d.lo, mid}, {mid + 1, d.hi}};
    } else {
      std::int64_t mid = d.hi - (d.hi - d.lo) / 2;
      parts = {{mid, d.hi}, {d.lo, mid - 1}};
    }
    for (const Interval& p : parts) {
      if (p.empty()) continue;
      std::vector<Interval> next = dom;
      next[pick] = p;
      if (auto m = search(std::move(next))) return m;
      if (exhausted_budget_) return std::nullopt;
    }
    return std::nullopt;
  }

  bool verify(const Model& m) const {
    // Re-evaluate every root with wrapping arithmetic.
    std::function<std::int64_t(int)> ev = [&](int i) -> std::int64_t {
      const Node& n = nodes_[i];
      switch (n.tag) {
        case Node::Tag::Const: return n.value;
        case Node::Tag::Var: return m.at(vars_[n.var]);
        case Node::Tag::Op: return apply_op(n.op, ev(n.l), ev(n.r));
      }
      return 0;
    };
    for (int root : roots_)
      if (ev(root) == 0) return false;
    return true;
  }

  std::int64_t box_;
  std::vector<Node> nodes_;
  std::vector<int> roots_;
  std::vector<Name> vars_;
  std::vector<Name> declared_;
  std::vector<int> defined_;
  std::vector<int> order_;
  long budget_ = 0;
  bool exhausted_budget_ = false;
  bool unbounded_split_ = false;
};

}  // namespace

SatResult check_sat_builtin(const Formula& phi, std::int64_t box) {
  SatResult r = Builtin(phi, box).solve();
  if (auto* s = std::get_if<Sat>(&r)) {
    Model m;
    for (const Name& n : phi.declared) m[n] = s->model.count(n) ? s->model.at(n) : 0;
    for (const auto& [n, v] : s->model) m[n] = v;
    if (!eval_model(m, phi)) throw std::logic_error("builtin solver produced a non-model");
    s->model = std::move(m);
  }
  return r;
}

SatResult check_sat(const Formula& phi, const SolverConfig& cfg) {
  if (cfg.backend == SolverConfig::Backend::External) return check_sat_external(phi, cfg.command);
  return check_sat_builtin(phi, cfg.box);
}

}  // namespace holi
