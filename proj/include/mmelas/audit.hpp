#pragma once

/**
 * @file audit.hpp
 *
 * @brief Recomputes a run's diagnostics from its output directory alone
 * (run.cfg, M.mmd, per-step dumps) and compares them with ledger.csv.
 *
 * Missing or unreadable files raise AuditInputError; disagreements are
 * reported as failed checks.
 */

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmelas/config.hpp"
#include "mmelas/constraint.hpp"
#include "mmelas/dump.hpp"
#include "mmelas/ledger.hpp"
#include "mmelas/run.hpp"
#include "mmelas/solver.hpp"
#include "mmelas/stepper.hpp"

namespace mmelas {

class AuditInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AuditCheck {
  std::string name;
  bool pass = true;
  double max_error = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct AuditReport {
  std::vector<AuditCheck> checks;
  std::size_t steps_audited = 0;
  [[nodiscard]] bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const AuditCheck& c) { return c.pass; });
  }
};

struct AuditOptions {
  /// Ledger reproduction: |recomputed - ledger| <= tol * (1 + |ledger|).
  double ledger_tol = 1e-12;
  /// Conserved means: drift from step 0 <= tol * (1 + |step-0 mean|).
  double conservation_tol = 1e-11;
  /// Structure residuals: <= tol * (1 + max |F|).
  double structure_tol = 1e-10;
};

namespace detail {

struct DumpedState {
  VectorField v;
  TensorField F;
  TensorField Z;
  ScalarField w;
};

inline DumpedState load_state(const std::filesystem::path& dir, std::size_t step, const GridPtr& grid) {
  auto load = [&](const char* name) {
    const auto path = dir / dump_file_name(name, step);
    if (!std::filesystem::exists(path)) throw AuditInputError("missing dump " + path.string());
    try {
      return load_dump(path);
    } catch (const DumpError& e) {
      throw AuditInputError(e.what());
    }
  };
  try {
    return {dump_to_field<3>(load("v"), grid), dump_to_field<9>(load("F"), grid), dump_to_field<9>(load("Z"), grid),
            dump_to_field<1>(load("w"), grid)};
  } catch (const DumpError& e) {
    throw AuditInputError(e.what());
  }
}

inline void track(AuditCheck& c, double err, const std::string& where) {
  if (std::isnan(err) || err > c.max_error) {
    if (std::isnan(err) || err > c.tolerance) {
      if (c.pass) c.detail = where;
      c.pass = false;
    }
    c.max_error = std::isnan(err) ? err : std::max(c.max_error, err);
  }
}

inline double rel_diff(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return 0.0;
  return std::abs(a - b) / (1.0 + std::abs(b));
}

}  // namespace detail

inline AuditReport audit_directory(const std::filesystem::path& dir, const AuditOptions& opt = {}) {
  if (!std::filesystem::is_directory(dir)) throw AuditInputError("not a directory: " + dir.string());
  const auto cfg_path = dir / "run.cfg";
  const auto ledger_path = dir / "ledger.csv";
  const auto m_path = dir / "M.mmd";
  for (const auto& p : {cfg_path, ledger_path, m_path})
    if (!std::filesystem::exists(p)) throw AuditInputError("missing " + p.string());

  const RunConfig cfg = load_config(cfg_path);
  if (!(cfg.output.dump_v && cfg.output.dump_F && cfg.output.dump_Z && cfg.output.dump_w))
    throw AuditInputError("audit needs dumps of v, F, Z and w");
  DiagnosticsLedger ledger;
  try {
    ledger = read_ledger(ledger_path.string());
  } catch (const LedgerError& e) {
    throw AuditInputError(e.what());
  }
  if (ledger.empty()) throw AuditInputError("ledger is empty");

  const GridPtr grid = Grid::make(cfg.grid);
  ScalarField m;
  try {
    m = dump_to_field<1>(load_dump(m_path), grid);
  } catch (const DumpError& e) {
    throw AuditInputError(e.what());
  }
  const EnergySpec spec = power_law_energy(cfg.energy);
  const bool constrained = cfg.solver.mode != ConstraintMode::unconstrained;

  AuditReport rep;
  AuditCheck c_ledger{"ledger_state_diagnostics", true, 0.0, opt.ledger_tol, ""};
  AuditCheck c_step{"ledger_step_diagnostics", true, 0.0, opt.ledger_tol, ""};
  AuditCheck c_lift{"lift_consistency", true, 0.0, opt.ledger_tol, ""};
  AuditCheck c_cons{"conservation", true, 0.0, opt.conservation_tol, ""};
  AuditCheck c_struct{"structure", true, 0.0, opt.structure_tol, ""};
  AuditCheck c_adm{"admissibility", true, 0.0, 0.0, constrained ? "" : "skipped (unconstrained mode)"};
  AuditCheck c_energy{"energy_comparison", true, 0.0, 1e-10, ""};

  std::optional<detail::DumpedState> prev;
  std::optional<InitialState> prev_init;
  std::size_t prev_step = 0;
  DiagnosticsRow row0;
  for (const auto& row : ledger) {
    const std::size_t j = row.step;
    const std::string where = "step " + std::to_string(j);
    if (!dump_due(j, cfg.steps, cfg.output.cadence) && j != ledger.back().step) continue;
    detail::DumpedState s = detail::load_state(dir, j, grid);
    ++rep.steps_audited;

    const LiftedState xi{s.F, s.Z, s.w};
    const InitialState self = make_initial_state(s.v, s.F, s.Z, s.w, m, cfg.h, cfg.gamma, cfg.coefficient, false);
    const DiagnosticsRow rc = state_diagnostics(j, static_cast<double>(j) * cfg.h, s.v, xi, m, spec,
                                                self.admissibility_tol());
    for (const char* col : {"time", "energy", "mean_v1", "mean_v2", "mean_v3", "mean_F11", "mean_F12", "mean_F13",
                            "mean_F21", "mean_F22", "mean_F23", "mean_F31", "mean_F32", "mean_F33", "mean_Z11",
                            "mean_Z12", "mean_Z13", "mean_Z21", "mean_Z22", "mean_Z23", "mean_Z31", "mean_Z32",
                            "mean_Z33", "mean_w", "drift_Z", "drift_w", "max_K", "min_w", "min_slack", "curl_F"})
      detail::track(c_ledger, detail::rel_diff(ledger_value(rc, col), ledger_value(row, col)), where + " " + col);

    if (j == ledger.front().step) row0 = rc;
    for (std::size_t i = 0; i < 3; ++i)
      detail::track(c_cons, std::abs(rc.mean_v[i] - row0.mean_v[i]) / (1.0 + std::abs(row0.mean_v[i])),
                    where + " mean v");
    for (std::size_t k = 0; k < 9; ++k) {
      detail::track(c_cons, std::abs(rc.mean_F[k] - row0.mean_F[k]) / (1.0 + std::abs(row0.mean_F[k])),
                    where + " mean F");
      detail::track(c_cons, std::abs(rc.mean_Z[k] - row0.mean_Z[k]) / (1.0 + std::abs(row0.mean_Z[k])),
                    where + " mean Z");
    }
    detail::track(c_cons, std::abs(rc.mean_w - row0.mean_w) / (1.0 + std::abs(row0.mean_w)), where + " mean w");

    if (constrained) {
      const auto adm = check_admissible(s.F, s.w, m, prev_init ? prev_init->admissibility_tol()
                                                               : self.admissibility_tol());
      if (!adm.admissible) {
        if (c_adm.pass) c_adm.detail = where + ": min w " + std::to_string(adm.min_w) + ", min slack " +
                                       std::to_string(adm.min_slack);
        c_adm.pass = false;
      }
    }

    if (prev && prev_step + 1 == j) {
      const InitialState& init = *prev_init;
      const auto sa = structure_audit(s.F, s.Z, init);
      const double scale = 1.0 + max_abs(s.F);
      detail::track(c_struct, sa.curl_change / scale, where + " curl F change");
      detail::track(c_struct, sa.div_change / scale, where + " div Z change");
      detail::track(c_step, detail::rel_diff(sa.curl_change, row.curl_change), where + " curl_change");
      detail::track(c_step, detail::rel_diff(sa.div_change, row.div_Z_change), where + " div_Z_change");
      const double obj = objective(s.v, init, spec, true);
      detail::track(c_step, detail::rel_diff(obj, row.objective), where + " objective");
      const DiagnosticsRow prev_row = *std::find_if(ledger.begin(), ledger.end(),
                                                    [&](const DiagnosticsRow& r) { return r.step == prev_step; });
      detail::track(c_step, detail::rel_diff(prev_row.energy, row.comparison_bound), where + " comparison_bound");
      const double escale = 1.0 + std::abs(row.comparison_bound);
      detail::track(c_energy, std::max(0.0, obj - row.comparison_bound) / escale, where);

      const LiftedState lifted = lift(s.v, init);
      const double lscale = 1.0 + max_abs(s.F) + max_abs(s.Z) + max_abs(s.w);
      detail::track(c_lift, max_abs(lifted.F - s.F) / lscale, where + " F");
      detail::track(c_lift, max_abs(lifted.Z - s.Z) / lscale, where + " Z");
      detail::track(c_lift, max_abs(lifted.w - s.w) / lscale, where + " w");
    }
    prev_init = make_initial_state(s.v, s.F, s.Z, s.w, m, cfg.h, cfg.gamma, cfg.coefficient, false);
    prev = std::move(s);
    prev_step = j;
  }

  if (ledger.back().step != cfg.steps) {
    c_ledger.pass = false;
    c_ledger.detail = "ledger ends at step " + std::to_string(ledger.back().step) + " of " + std::to_string(cfg.steps);
  }
  rep.checks = {c_ledger, c_step, c_lift, c_cons, c_struct, c_adm, c_energy};
  return rep;
}

}  // namespace mmelas
