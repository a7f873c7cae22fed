// holicheck: bounded checker for higher-order libraries.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "holicheck/definability.hpp"
#include "holicheck/engine.hpp"
#include "holicheck/error.hpp"
#include "holicheck/surface.hpp"
#include "holicheck/typecheck.hpp"

using namespace holi;

namespace {

constexpr int kUsage = 2;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CheckOpts {
  std::string input;
  int k = 2, l = 1;
  std::string mode = "exhaustive";
  std::string solver = "builtin";
  std::string solver_cmd;
  std::int64_t box = 1024;
  std::string policy = "lazy";
  std::string format = "text";
  std::string roundtrip = "off";
  std::string emit_client;
  std::uint32_t seed = 0;
  double timeout = 0;
  bool timing = false;
};

ExploreOptions explore_options(const CheckOpts& o) {
  ExploreOptions e;
  e.bounds = {o.k, o.l};
  e.mode = o.mode == "first-failure" ? ExploreOptions::Mode::FirstFailure : ExploreOptions::Mode::Exhaustive;
  e.policy = o.policy == "eager" ? ExploreOptions::Policy::Eager : ExploreOptions::Policy::Lazy;
  e.seed = o.seed;
  e.solver.box = o.box;
  if (o.solver == "external") {
    e.solver.backend = SolverConfig::Backend::External;
    e.solver.command = o.solver_cmd;
    if (e.solver.command.empty())
      if (const char* env = std::getenv("HOLICHECK_SOLVER")) e.solver.command = env;
    if (e.solver.command.empty()) e.solver.command = "z3 -in";
  }
  if (o.timeout > 0) e.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(o.timeout * 1000));
  return e;
}

int cmd_check(const CheckOpts& o) {
  TypedLibrary lib = load(slurp(o.input));
  ExploreOptions eo = explore_options(o);
  Exploration ex = explore(lib, eo);
  if (!o.timing) ex.stats.millis = 0;

  ReportContext ctx{o.input, eo.bounds, {}};
  bool want_rt = o.roundtrip == "on";
  bool emitted = false;
  for (const Finding* f : report_order(ex.findings)) {
    if (!f->failed()) continue;
    if (!want_rt && (o.emit_client.empty() || emitted || !f->confirmed())) continue;
    if (!f->confirmed()) {
      ctx.roundtrip.push_back("skipped (unconfirmed)");
      continue;
    }
    RoundTrip rt = verify_roundtrip(lib, *f, ex.pub, ex.abs, roundtrip_budget(eo.bounds.k, f->trace));
    if (want_rt) ctx.roundtrip.push_back(rt.reproduced ? "reproduced" : "not reproduced: " + rt.diagnostic);
    if (!o.emit_client.empty() && !emitted && !rt.client.text.empty()) {
      std::ofstream out(o.emit_client);
      if (!out) throw Error("cannot write " + o.emit_client);
      out << surface::print(rt.client.source);
      emitted = true;
    }
  }
  std::cout << report(ex, o.format == "json" ? ReportFormat::Json : ReportFormat::Text, ctx);
  bool confirmed = std::any_of(ex.findings.begin(), ex.findings.end(),
                               [](const Finding& f) { return f.failed() && f.confirmed(); });
  return confirmed ? 1 : 0;
}

int cmd_run(const std::string& input, int k) {
  TypedLibrary prog = load(slurp(input));
  if (!prog.is_client()) throw Error(input + " has no main body");
  RunResult r = run_client(prog, k);
  switch (r.kind) {
    case RunResult::Kind::Terminated:
      std::cout << "terminated: " << str(r.value) << " (" << r.steps << " steps)\n";
      return 0;
    case RunResult::Kind::Failed:
      std::cout << "failed: assertion violated after " << r.steps << " steps\n";
      return 1;
    case RunResult::Kind::BoundExhausted:
      std::cout << "bound exhausted: call depth would exceed k=" << k << " after " << r.steps << " steps\n";
      return 3;
  }
  return kUsage;
}

int cmd_sweep(const std::vector<std::string>& inputs, CheckOpts base, int kmin, int kmax, int lmin, int lmax) {
  bool any = false;
  for (const std::string& input : inputs) {
    TypedLibrary lib = load(slurp(input));
    std::cout << input << "\n";
    std::cout << "   k  l  traces  confirmed  time(ms)\n";
    for (int k = kmin; k <= kmax; ++k) {
      for (int l = lmin; l <= lmax; ++l) {
        base.k = k;
        base.l = l;
        Exploration ex = explore(lib, explore_options(base));
        std::size_t traces = 0, confirmed = 0;
        for (const Finding& f : ex.findings) {
          if (!f.failed()) continue;
          ++traces;
          if (f.confirmed()) ++confirmed;
        }
        any = any || confirmed > 0;
        char line[128];
        std::snprintf(line, sizeof line, "  %2d %2d  %6zu  %9zu  %8lld%s\n", k, l, traces, confirmed,
                      static_cast<long long>(ex.stats.millis), ex.stats.timed_out ? "  timeout" : "");
        std::cout << line;
      }
    }
  }
  return any ? 1 : 0;
}

void add_check_flags(CLI::App* cmd, CheckOpts& o) {
  cmd->add_option("--k", o.k, "call-depth bound k0")->check(CLI::NonNegativeNumber);
  cmd->add_option("--l", o.l, "Opponent call bound l0")->check(CLI::NonNegativeNumber);
  cmd->add_option("--mode", o.mode)->check(CLI::IsMember({"exhaustive", "first-failure"}));
  cmd->add_option("--solver", o.solver)->check(CLI::IsMember({"builtin", "external"}));
  cmd->add_option("--solver-cmd", o.solver_cmd, "external solver command (default $HOLICHECK_SOLVER, then 'z3 -in')");
  cmd->add_option("--box", o.box, "builtin solver search box [-B, B]")->check(CLI::PositiveNumber);
  cmd->add_option("--policy", o.policy)->check(CLI::IsMember({"lazy", "eager"}));
  cmd->add_option("--seed", o.seed);
  cmd->add_option("--timeout", o.timeout, "seconds per check (0 = none)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounded symbolic checker for higher-order libraries"};
  app.require_subcommand(1);

  CheckOpts check;
  auto* c = app.add_subcommand("check", "explore a library for assertion violations");
  c->add_option("input", check.input)->required();
  add_check_flags(c, check);
  c->add_option("--format", check.format)->check(CLI::IsMember({"text", "json"}));
  c->add_option("--roundtrip", check.roundtrip, "validate findings with a synthesized client")
      ->check(CLI::IsMember({"on", "off"}));
  c->add_option("--emit-client", check.emit_client, "write the client for the first confirmed failure");
  c->add_flag("--timing", check.timing, "report elapsed time in JSON");

  std::string run_input;
  int run_k = 1000;
  auto* r = app.add_subcommand("run", "execute a closed client");
  r->add_option("input", run_input)->required();
  r->add_option("--k", run_k, "call-depth budget")->check(CLI::NonNegativeNumber);

  CheckOpts sweep;
  sweep.timeout = 300;
  std::vector<std::string> sweep_inputs;
  int kmin = 1, kmax = 3, lmin = 1, lmax = 2;
  auto* s = app.add_subcommand("sweep", "check over a grid of bounds");
  s->add_option("inputs", sweep_inputs)->required();
  add_check_flags(s, sweep);
  s->add_option("--kmin", kmin);
  s->add_option("--kmax", kmax);
  s->add_option("--lmin", lmin);
  s->add_option("--lmax", lmax);

  std::string print_input;
  auto* p = app.add_subcommand("print", "parse and pretty-print a file");
  p->add_option("input", print_input)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*c) return cmd_check(check);
    if (*r) return cmd_run(run_input, run_k);
    if (*s) return cmd_sweep(sweep_inputs, sweep, kmin, kmax, lmin, lmax);
    if (*p) {
      std::cout << surface::print(surface::parse_any(slurp(print_input)));
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "holicheck: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
