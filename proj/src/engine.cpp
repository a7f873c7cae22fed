#include "holicheck/engine.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "holicheck/error.hpp"

namespace holi {

using json = nlohmann::ordered_json;

Formula Finding::formula() const {
  std::vector<Name> declared;
  for (const Move& m : trace)
    for (const Name& n : symints_of(m.value))
      if (std::find(declared.begin(), declared.end(), n) == declared.end()) declared.push_back(n);
  return path_formula(pc, sigma, declared);
}

namespace {

class Explorer {
 public:
  Explorer(const TypedLibrary& lib, const ExploreOptions& opts) : opts_(opts) {
    BuildResult b = build(lib);
    b.supply.skip(opts.seed);
    out_.pub = b.pub;
    out_.abs = b.abs;
    init_ = initial_sym_config(b);
    for (const auto* m : {&b.R, &b.S})
      for (const auto& [n, t] : *m)
        if (contains_kind(t, Term::Kind::Assert)) assert_free_ = false;
  }

  Exploration run() {
    auto start = std::chrono::steady_clock::now();
    std::optional<std::chrono::steady_clock::time_point> deadline;
    if (opts_.timeout) deadline = start + *opts_.timeout;

    // No assert in R or S: no path can fail.
    std::vector<SymGameConfig> work;
    if (!assert_free_ || opts_.keep_all_leaves) work.push_back(init_);
    std::size_t ticks = 0;
    while (!work.empty() && !stop_) {
      SymGameConfig g = std::move(work.back());
      work.pop_back();
      for (;;) {
        if (deadline && (++ticks & 255) == 0 && std::chrono::steady_clock::now() > *deadline) {
          out_.stats.timed_out = true;
          stop_ = true;
          break;
        }
        SymGameStep s = sym_game_step(g, opts_.bounds);
        if (s.leaf != SymGameStep::Leaf::None) {
          leaf(g, s.leaf);
          break;
        }
        if (s.next.size() == 1) {
          g = std::move(s.next.front().second);
          continue;
        }
        std::vector<SymGameConfig> kept;
        for (auto& [mv, n] : s.next) {
          if (s.branch && opts_.policy == ExploreOptions::Policy::Eager) {
            ++out_.stats.solver_calls;
            if (std::holds_alternative<Unsat>(solve(path_formula(n.t.pc, n.t.sigma)))) continue;
          }
          kept.push_back(std::move(n));
        }
        for (auto it = kept.rbegin(); it != kept.rend(); ++it) work.push_back(std::move(*it));
        break;
      }
    }
    out_.stats.millis =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    return std::move(out_);
  }

 private:
  SatResult solve(const Formula& phi) {
    try {
      return check_sat(phi, opts_.solver);
    } catch (const BackendError& e) {
      return Unknown{e.what()};
    }
  }

  void leaf(const SymGameConfig& g, SymGameStep::Leaf kind) {
    ++out_.stats.leaves;
    Finding f;
    f.trace = g.trace.to_vector();
    f.pc = g.t.pc;
    f.sigma = g.t.sigma;
    switch (kind) {
      case SymGameStep::Leaf::Failed: {
        f.classification = Finding::Classification::Failed;
        ++out_.stats.solver_calls;
        SatResult r = solve(f.formula());
        if (std::holds_alternative<Unsat>(r)) return;
        if (auto* s = std::get_if<Sat>(&r)) {
          f.verdict = Finding::Verdict::Confirmed;
          f.model = std::move(s->model);
        } else {
          f.note = std::get<Unknown>(r).reason;
        }
        ++out_.stats.failed;
        out_.findings.push_back(std::move(f));
        if (opts_.mode == ExploreOptions::Mode::FirstFailure && out_.findings.back().confirmed()) stop_ = true;
        return;
      }
      case SymGameStep::Leaf::BoundExhausted:
        ++out_.stats.bound_exhausted;
        f.classification = Finding::Classification::BoundExhausted;
        break;
      case SymGameStep::Leaf::Terminated:
        f.classification = Finding::Classification::Terminated;
        break;
      case SymGameStep::Leaf::None:
        return;
    }
    if (opts_.keep_all_leaves) out_.findings.push_back(std::move(f));
  }

  const ExploreOptions& opts_;
  SymGameConfig init_;
  Exploration out_;
  bool stop_ = false;
  bool assert_free_ = true;
};

}  // namespace

Exploration explore(const TypedLibrary& lib, const ExploreOptions& opts) { return Explorer(lib, opts).run(); }

// ---------------------------------------------------------------------------

Name Canonicalizer::operator()(const Name& n) {
  if (n.declared() || (n.sort != Sort::Method && n.sort != Sort::SymInt)) return n;
  auto it = map_.find(n);
  if (it != map_.end()) return it->second;
  std::uint32_t& counter = n.sort == Sort::Method ? methods_ : symints_;
  Name c{n.sort, kCanonicalBase + ++counter, n.type, nullptr};
  map_.emplace(n, c);
  return c;
}

TermPtr Canonicalizer::operator()(const TermPtr& t) {
  if (!t) return t;
  return map_names(t, [this](const Name& n) { return (*this)(n); });
}

Move Canonicalizer::operator()(const Move& m) {
  Move out = m;
  out.method = (*this)(m.method);
  out.value = (*this)(m.value);
  return out;
}

Trace Canonicalizer::operator()(const Trace& t) {
  Trace out;
  out.reserve(t.size());
  for (const Move& m : t) out.push_back((*this)(m));
  return out;
}

Atom Canonicalizer::operator()(const Atom& a) {
  Atom out = a;
  out.lhs = (*this)(a.lhs);
  out.rhs = (*this)(a.rhs);
  return out;
}

Trace canonicalize(const Trace& tau) { return Canonicalizer()(tau); }

Trace concretize(const Finding& f) { return concretize(f.model, f.trace); }

std::vector<const Finding*> report_order(const std::vector<Finding>& findings) {
  std::vector<std::pair<std::string, const Finding*>> keyed;
  for (const Finding& f : findings) keyed.emplace_back(str(canonicalize(f.trace)), &f);
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second->trace.size() < b.second->trace.size();
  });
  std::vector<const Finding*> out;
  for (auto& [k, f] : keyed) out.push_back(f);
  return out;
}

namespace {

json value_json(const TermPtr& v) {
  switch (v->kind) {
    case Term::Kind::Unit:
      return nullptr;
    case Term::Kind::Int:
      return v->value;
    case Term::Kind::Meth:
      return json{{"method", v->name.str()}};
    case Term::Kind::Sym:
      return json{{"sym", v->name.str()}};
    case Term::Kind::Pair:
      return json::array({value_json(v->a), value_json(v->b)});
    default:
      return str(v);
  }
}

struct Rendered {
  Trace trace;
  std::vector<Atom> atoms;
  std::vector<std::pair<std::string, std::int64_t>> model;
};

Rendered render(const Finding& f) {
  Canonicalizer c;
  Rendered r;
  r.trace = c(f.trace);
  Formula phi = f.formula();
  for (const Atom& a : phi.atoms) r.atoms.push_back(c(a));
  if (f.confirmed()) {
    std::vector<std::pair<Name, std::int64_t>> named;
    for (const Name& n : phi.declared) {
      auto it = f.model.find(n);
      if (it != f.model.end()) named.emplace_back(c(n), it->second);
    }
    std::sort(named.begin(), named.end());
    for (auto& [n, v] : named) r.model.emplace_back(n.str(), v);
  }
  return r;
}

const char* classification_name(Finding::Classification c) {
  switch (c) {
    case Finding::Classification::Failed: return "failed";
    case Finding::Classification::Terminated: return "terminated";
    case Finding::Classification::BoundExhausted: return "bound-exhausted";
  }
  return "?";
}

}  // namespace

std::string report(const Exploration& e, ReportFormat format, const ReportContext& ctx) {
  std::vector<const Finding*> order = report_order(e.findings);
  std::vector<const Finding*> failures;
  for (const Finding* f : order)
    if (f->failed()) failures.push_back(f);
  std::size_t confirmed = std::count_if(failures.begin(), failures.end(), [](const Finding* f) { return f->confirmed(); });

  if (format == ReportFormat::Json) {
    json out;
    out["library"] = ctx.library;
    out["bounds"] = {{"k", ctx.bounds.k}, {"l", ctx.bounds.l}};
    json arr = json::array();
    for (std::size_t i = 0; i < failures.size(); ++i) {
      Rendered r = render(*failures[i]);
      json trace = json::array();
      for (const Move& m : r.trace)
        trace.push_back({{"kind", m.kind == Move::Kind::Call ? "call" : "ret"},
                         {"method", m.method.str()},
                         {"value", value_json(m.value)}});
      json model = json::object();
      for (auto& [n, v] : r.model) model[n] = v;
      json item{{"trace", trace}, {"pc", smt_formula(r.atoms)}, {"model", model}, {"confirmed", failures[i]->confirmed()}};
      if (i < ctx.roundtrip.size()) item["roundtrip"] = ctx.roundtrip[i];
      arr.push_back(std::move(item));
    }
    out["failures"] = std::move(arr);
    out["stats"] = {{"leaves", e.stats.leaves},
                    {"failed", e.stats.failed},
                    {"bound_exhausted", e.stats.bound_exhausted},
                    {"solver_calls", e.stats.solver_calls},
                    {"millis", e.stats.millis}};
    if (e.stats.timed_out) out["stats"]["timed_out"] = true;
    return out.dump(2) + "\n";
  }

  std::ostringstream os;
  os << "library " << ctx.library << " at k=" << ctx.bounds.k << " l=" << ctx.bounds.l << "\n";
  std::size_t i = 0;
  for (const Finding* f : order) {
    Rendered r = render(*f);
    os << "\n";
    if (f->failed()) {
      os << "failure " << ++i << (f->confirmed() ? " (confirmed)" : " (unconfirmed)") << "\n";
    } else {
      os << classification_name(f->classification) << "\n";
    }
    os << "  trace: " << (r.trace.empty() ? "(empty)" : str(r.trace)) << "\n";
    os << "  pc:    " << smt_formula(r.atoms) << "\n";
    if (f->confirmed()) {
      os << "  model:";
      if (r.model.empty()) os << " (none)";
      for (auto& [n, v] : r.model) os << " " << n << "=" << v;
      os << "\n";
    }
    if (!f->note.empty()) os << "  note:  " << f->note << "\n";
    if (f->failed() && i - 1 < ctx.roundtrip.size()) os << "  roundtrip: " << ctx.roundtrip[i - 1] << "\n";
  }
  if (!order.empty()) os << "\n";
  os << failures.size() << (failures.size() == 1 ? " failure" : " failures") << " (" << confirmed
     << " confirmed); " << e.stats.leaves << " leaves, " << e.stats.bound_exhausted << " bound-exhausted, "
     << e.stats.solver_calls << " solver calls, " << e.stats.millis << " ms";
  if (e.stats.timed_out) os << ", timed out";
  os << "\n";
  return os.str();
}

}  // namespace holi
