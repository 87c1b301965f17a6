// Command-line front end: run, check-hypotheses, gradcheck, audit.
//
// Exit codes: 0 ok, 1 check failed, 2 config error, 3 runtime error.
// Every failure prints "ERROR <code>: <message>" as its first line on stderr.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "mmelas/audit.hpp"
#include "mmelas/config.hpp"
#include "mmelas/gradcheck.hpp"
#include "mmelas/ledger.hpp"
#include "mmelas/run.hpp"

namespace {

enum Exit { ok = 0, check_failed = 1, config_error = 2, runtime_error = 3 };

class Failure : public std::runtime_error {
 public:
  Failure(int code, const std::string& msg) : std::runtime_error(msg), code(code) {}
  int code;
};

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

struct Common {
  std::string config;
  std::string positional;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool quiet = false;

  [[nodiscard]] std::string config_path() const {
    if (!config.empty() && !positional.empty() && config != positional)
      throw Failure(config_error, "config given both positionally and with --config");
    const std::string p = config.empty() ? positional : config;
    if (p.empty()) throw Failure(config_error, "no config file given (use --config FILE)");
    return p;
  }
};

mmelas::RunConfig load(const Common& c) {
  mmelas::RunConfig cfg = mmelas::load_config(c.config_path());
  if (!c.out.empty()) cfg.output.directory = c.out;
  if (c.seed) cfg.initial.seed = *c.seed;
  return cfg;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

int cmd_run(const Common& c) {
  const mmelas::RunConfig cfg = load(c);
  std::ostringstream progress;
  const auto report = [&](const mmelas::DiagnosticsRow& r) {
    progress << "step " << r.step << " t=" << fmt(r.time) << " E=" << fmt(r.energy) << " I=" << fmt(r.objective)
             << " drift_Z=" << fmt(r.drift_Z) << " drift_w=" << fmt(r.drift_w) << " max_K=" << fmt(r.max_K)
             << " el=" << fmt(r.el_residual) << " it=" << r.iterations << '\n';
  };
  const mmelas::Trajectory t = mmelas::execute_run(cfg, report);
  if (!c.quiet) std::cout << progress.str() << "wrote " << cfg.output.directory << " (" << t.ledger.size() - 1
                          << " steps)\n";
  return ok;
}

int cmd_check_hypotheses(const Common& c, std::size_t samples) {
  const mmelas::RunConfig cfg = load(c);
  mmelas::HypothesisReport rep = mmelas::check_hypotheses(cfg.energy);
  const auto probe = mmelas::convexity_probe(mmelas::power_law_energy(cfg.energy), samples, cfg.initial.seed);
  for (auto chk : probe.checks) {
    chk.hypothesis = "H1-probe";
    rep.checks.push_back(chk);
  }
  std::ostringstream body;
  std::string first_fail;
  for (const auto& chk : rep.checks) {
    body << chk.hypothesis << ' ' << mmelas::to_string(chk.verdict);
    if (!chk.failing_term.empty()) body << " term=" << chk.failing_term;
    body << ": " << chk.detail << '\n';
    if (chk.verdict == mmelas::Verdict::fail && first_fail.empty())
      first_fail = chk.hypothesis + (chk.failing_term.empty() ? "" : " (" + chk.failing_term + ")");
  }
  if (!first_fail.empty()) {
    std::cerr << "ERROR 1: hypothesis check failed: " << first_fail << '\n';
    if (!c.quiet) std::cerr << body.str();
    return check_failed;
  }
  if (!c.quiet) std::cout << body.str();
  return ok;
}

int cmd_gradcheck(const Common& c, std::size_t probes) {
  const mmelas::RunConfig cfg = load(c);
  const mmelas::EnergySpec spec = mmelas::power_law_energy(cfg.energy);
  mmelas::GradcheckOptions opt;
  opt.probes = probes;
  opt.seed = cfg.initial.seed;
  std::vector<mmelas::OracleResult> results = mmelas::check_algebra_oracles(1000, opt.seed);
  results.push_back(mmelas::check_dphi(opt));
  results.push_back(mmelas::check_energy_gradient(spec, opt));
  results.push_back(mmelas::check_chain_rule(spec, opt));
  const mmelas::TrajectoryConfig tc = mmelas::to_trajectory_config(cfg);
  const auto init = mmelas::make_initial_data(mmelas::Grid::make(tc.grid), tc.initial, tc.h, tc.gamma,
                                              tc.coefficient);
  results.push_back(mmelas::check_objective_gradient(init, spec, opt));

  std::ostringstream body;
  std::string first_fail;
  for (const auto& r : results) {
    body << (r.pass() ? "PASS " : "FAIL ") << r.name << " probes=" << r.probes << " max_err=" << fmt(r.max_error)
         << " tol=" << fmt(r.tolerance) << '\n';
    if (!r.pass() && first_fail.empty()) first_fail = r.name + " max_err=" + fmt(r.max_error);
  }
  if (!first_fail.empty()) {
    std::cerr << "ERROR 1: gradient check failed: " << first_fail << '\n';
    if (!c.quiet) std::cerr << body.str();
    return check_failed;
  }
  if (!c.quiet) std::cout << body.str();
  return ok;
}

int cmd_audit(const Common& c) {
  std::string dir = c.positional.empty() ? c.out : c.positional;
  if (dir.empty()) throw Failure(config_error, "no run directory given");
  mmelas::AuditReport rep;
  try {
    rep = mmelas::audit_directory(dir);
  } catch (const mmelas::ConfigError& e) {
    throw Failure(config_error, std::string("run.cfg: ") + e.what());
  }
  std::ostringstream body;
  std::string first_fail;
  for (const auto& chk : rep.checks) {
    body << (chk.pass ? "PASS " : "FAIL ") << chk.name << " max_err=" << fmt(chk.max_error)
         << " tol=" << fmt(chk.tolerance);
    if (!chk.detail.empty()) body << " (" << chk.detail << ')';
    body << '\n';
    if (!chk.pass && first_fail.empty()) first_fail = chk.name + ": " + chk.detail;
  }
  body << rep.steps_audited << " steps audited\n";
  if (!first_fail.empty()) {
    std::cerr << "ERROR 1: audit failed: " << first_fail << '\n';
    if (!c.quiet) std::cerr << body.str();
    return check_failed;
  }
  if (!c.quiet) std::cout << body.str();
  return ok;
}

int fail(int code, const std::string& msg) {
  std::cerr << "ERROR " << code << ": " << one_line(msg) << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimizing-movements solver for periodic polyconvex elastodynamics"};
  app.require_subcommand(1);

  Common common;
  std::size_t samples = 10000;
  std::size_t probes = 100;

  auto add_common = [&common](CLI::App* sub, const char* positional_help) {
    sub->add_option("path", common.positional, positional_help);
    sub->add_option("--config", common.config, "Configuration file");
    sub->add_option("--out", common.out, "Output directory (overrides [output] directory)");
    sub->add_option("--seed", common.seed, "Initial-data seed (overrides [initial] seed)");
    sub->add_flag("--quiet", common.quiet, "Print nothing on success");
  };
  auto* run = app.add_subcommand("run", "Run the scheme and write dumps and ledger.csv");
  add_common(run, "Configuration file");
  auto* hyp = app.add_subcommand("check-hypotheses", "Audit the energy against the structural hypotheses");
  add_common(hyp, "Configuration file");
  hyp->add_option("--samples", samples, "Convexity probe samples")->capture_default_str();
  auto* grad = app.add_subcommand("gradcheck", "Finite-difference checks of all analytic derivatives");
  add_common(grad, "Configuration file");
  grad->add_option("--probes", probes, "Random probes per oracle")->capture_default_str();
  auto* aud = app.add_subcommand("audit", "Recompute diagnostics from a run directory");
  add_common(aud, "Run output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(config_error, e.what());
  }

  try {
    if (*run) return cmd_run(common);
    if (*hyp) return cmd_check_hypotheses(common, samples);
    if (*grad) return cmd_gradcheck(common, probes);
    if (*aud) return cmd_audit(common);
    return fail(config_error, "unknown subcommand");
  } catch (const Failure& e) {
    return fail(e.code, e.what());
  } catch (const mmelas::ConfigError& e) {
    return fail(config_error, e.what());
  } catch (const mmelas::InitialDataError& e) {
    return fail(config_error, std::string("initial data: ") + e.what());
  } catch (const mmelas::InadmissibleData& e) {
    return fail(config_error, std::string("initial data: ") + e.what());
  } catch (const std::exception& e) {
    return fail(runtime_error, e.what());
  }
}
