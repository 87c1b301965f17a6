#pragma once

/**
 * @file stepper.hpp
 *
 * @brief Iterates the step solution operator, keeps the per-step diagnostics
 * ledger, builds initial data from a periodic displacement, and recovers the
 * deformation y with D y = F.
 */

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <string>
#include <vector>

#include "mmelas/constraint.hpp"
#include "mmelas/energy.hpp"
#include "mmelas/fourier.hpp"
#include "mmelas/grid.hpp"
#include "mmelas/solver.hpp"

namespace mmelas {

class InitialDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InitialDataParams {
  double amplitude = 0.05;  // A in F0 = I + A grad(u)
  std::uint64_t seed = 1;
  int modes = 1;
  double velocity_amplitude = 0.0;
  std::uint64_t velocity_seed = 2;
  int velocity_modes = 1;
  double M0 = 10.0;
  /// Overrides M0 when set.
  std::optional<ScalarField> M_field;
};

/// Zero-mean band-limited displacement u used to build F0 = I + A grad(u), scaled so max |grad u| = 1.
inline VectorField make_displacement(const GridPtr& grid, std::uint64_t seed, int modes) {
  VectorField u = random_trig_field<3>(grid, seed, modes, 1.0, true);
  const double g = max_abs(gradient(u));
  if (g > 0.0) u *= 1.0 / g;
  return u;
}

/// F0 = I + A grad(u), Z0 = cof F0, w0 = det F0 pointwise; M = M0 or the given field.
inline InitialState make_initial_data(const GridPtr& grid, const InitialDataParams& prm, double h, double gamma = 0.0,
                                      CofactorCoefficient coef = CofactorCoefficient::piola_projected) {
  const VectorField u = make_displacement(grid, prm.seed, prm.modes);
  TensorField f0 = gradient(u);
  f0 *= prm.amplitude;
  for (std::size_t x = 0; x < grid->cells(); ++x)
    for (std::size_t i = 0; i < 3; ++i) f0(4 * i, x) += 1.0;
  const TensorField z0 = pointwise_cofactor(f0);
  const ScalarField w0 = pointwise_determinant(f0);
  double min_det = std::numeric_limits<double>::infinity();
  double max_k = 0.0;
  for (std::size_t x = 0; x < grid->cells(); ++x) {
    min_det = std::min(min_det, w0(0, x));
    if (w0(0, x) > 0.0) {
      const double nf = frob_norm(mat_at(f0, x));
      max_k = std::max(max_k, nf * nf * nf / w0(0, x));
    }
  }
  if (!(min_det > 0.0))
    throw InitialDataError("Jacobian non-positive: min det F0 = " + std::to_string(min_det));

  ScalarField m(grid, prm.M0);
  if (prm.M_field) {
    if (!prm.M_field->same_grid(grid)) throw ShapeError("M field does not match the grid");
    m = *prm.M_field;
  } else if (prm.M0 < max_k) {
    throw InitialDataError("M0 too small: need M0 >= max |F0|^3 / det F0 = " + std::to_string(max_k));
  }

  VectorField v0(grid);
  if (prm.velocity_amplitude != 0.0)
    v0 = random_trig_field<3>(grid, prm.velocity_seed, prm.velocity_modes, prm.velocity_amplitude);
  return make_initial_state(std::move(v0), std::move(f0), z0, w0, std::move(m), h, gamma, coef);
}

/// Discrete L2 norms of Z - cof F and w - det F.
inline std::pair<double, double> consistency_drift(const TensorField& f, const TensorField& z,
                                                   const ScalarField& w) {
  const TensorField dz = z - pointwise_cofactor(f);
  const ScalarField dw = w - pointwise_determinant(f);
  return {l2_norm(dz), l2_norm(dw)};
}

struct Deformation {
  Mat3 mean_gradient;
  VectorField periodic;  // zero mean

  /// y(x) = mean_gradient x + periodic(x) at grid cell idx.
  [[nodiscard]] std::array<double, 3> at(std::size_t idx) const {
    const auto x = periodic.grid()->coordinates(idx);
    std::array<double, 3> y{};
    for (std::size_t i = 0; i < 3; ++i) {
      y[i] = periodic(i, idx);
      for (std::size_t a = 0; a < 3; ++a) y[i] += mean_gradient(int(i), int(a)) * x[a];
    }
    return y;
  }
};

class DeformationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Recovers y = F_mean x + y_periodic from a curl-free F.
inline Deformation reconstruct_deformation(const TensorField& f) {
  const double scale = 1.0 + max_abs(f);
  const double curl = max_abs(curl_rows(f));
  if (curl > 1e-8 * scale)
    throw DeformationError("F is not a discrete gradient: max |curl F| = " + std::to_string(curl));
  Deformation d;
  const auto m = means(f);
  for (std::size_t c = 0; c < 9; ++c) d.mean_gradient.a[c] = m[c];
  TensorField fluct = f;
  for (std::size_t c = 0; c < 9; ++c)
    for (double& x : fluct.component(c)) x -= m[c];
  d.periodic = invert_gradient(fluct);
  return d;
}

// ---------------------------------------------------------------------------
// Trajectories

struct TrajectoryConfig {
  GridSpec grid;
  PowerLawParams energy;
  SolverConfig solver;
  double h = 0.01;
  std::size_t steps = 1;
  double gamma = 0.0;
  InitialDataParams initial;
  CofactorCoefficient coefficient = CofactorCoefficient::piola_projected;
  std::size_t el_test_fields = 4;
  std::uint64_t el_seed = 17;
};

/// One ledger row. Solver-only quantities are NaN at step 0.
struct DiagnosticsRow {
  std::size_t step = 0;
  double time = 0.0;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double energy = 0.0;  // integral 1/2 |v|^2 + G(Xi)
  double comparison_bound = std::numeric_limits<double>::quiet_NaN();
  std::array<double, 3> mean_v{};
  std::array<double, 9> mean_F{};
  std::array<double, 9> mean_Z{};
  double mean_w = 0.0;
  double drift_Z = 0.0;
  double drift_w = 0.0;
  double max_K = 0.0;
  double min_w = 0.0;
  double min_slack = 0.0;
  double curl_F = 0.0;
  double curl_change = 0.0;
  double div_Z_change = 0.0;
  double el_residual = std::numeric_limits<double>::quiet_NaN();
  int kkt_flag = 0;
  double residual = std::numeric_limits<double>::quiet_NaN();
  std::size_t iterations = 0;
  int converged = 1;
};

using DiagnosticsLedger = std::vector<DiagnosticsRow>;

/// State quantities of a row (everything that does not need the solver).
inline DiagnosticsRow state_diagnostics(std::size_t step, double time, const VectorField& v, const LiftedState& xi,
                                        const ScalarField& m, const EnergySpec& spec, double adm_tol) {
  DiagnosticsRow r;
  r.step = step;
  r.time = time;
  std::vector<double> density(v.cells());
  for (std::size_t x = 0; x < v.cells(); ++x) {
    double kin = 0.0;
    for (std::size_t i = 0; i < 3; ++i) kin += v(i, x) * v(i, x);
    density[x] = 0.5 * kin + spec.value({mat_at(xi.F, x), mat_at(xi.Z, x), xi.w(0, x)}, true);
  }
  r.energy = integrate(density, *v.grid());
  r.mean_v = means(v);
  r.mean_F = means(xi.F);
  r.mean_Z = means(xi.Z);
  r.mean_w = means(xi.w)[0];
  std::tie(r.drift_Z, r.drift_w) = consistency_drift(xi.F, xi.Z, xi.w);
  const auto adm = check_admissible(xi.F, xi.w, m, adm_tol);
  r.max_K = adm.max_distortion;
  r.min_w = adm.min_w;
  r.min_slack = adm.min_slack;
  r.curl_F = max_abs(curl_rows(xi.F));
  return r;
}

/// Next step's data from the current iterate: F0 <- F, coefficient rebuilt from the new F.
inline InitialState rebase(const InitialState& prev, const VectorField& v, const LiftedState& xi, bool validate) {
  return make_initial_state(v, xi.F, xi.Z, xi.w, prev.M, prev.h, prev.gamma, prev.coefficient, validate);
}

struct Trajectory {
  InitialState final_state;  // data of the step that would come next
  DiagnosticsLedger ledger;
  std::vector<StepResult> steps;  // only kept when requested
};

/// Called after every step (and for step 0) with the step index and the state.
using StepObserver = std::function<void(std::size_t step, const InitialState& state)>;

class SchemeError : public std::runtime_error {
 public:
  SchemeError(const std::string& msg, DiagnosticsLedger partial)
      : std::runtime_error(msg), partial_ledger(std::move(partial)) {}
  DiagnosticsLedger partial_ledger;
};

inline Trajectory run_scheme(const TrajectoryConfig& cfg, InitialState init, const StepObserver& observer = {},
                             bool keep_steps = false) {
  if (cfg.steps < 1) throw std::invalid_argument("steps must be >= 1");
  const EnergySpec spec = power_law_energy(cfg.energy);
  Trajectory traj;
  const bool validate = cfg.solver.mode != ConstraintMode::unconstrained;

  {
    LiftedState xi0{init.F0, init.Z0, init.w0};
    traj.ledger.push_back(state_diagnostics(0, 0.0, init.v0, xi0, init.M, spec, init.admissibility_tol()));
    if (observer) observer(0, init);
  }

  for (std::size_t j = 1; j <= cfg.steps; ++j) {
    StepResult res;
    try {
      res = minimize_step(init, spec, cfg.solver);
    } catch (const std::exception& e) {
      throw SchemeError("step " + std::to_string(j) + ": " + e.what(), traj.ledger);
    }
    if (!res.converged)
      throw SchemeError("step " + std::to_string(j) + ": solver did not converge (residual " +
                            std::to_string(res.residual) + ")",
                        traj.ledger);

    DiagnosticsRow row =
        state_diagnostics(j, static_cast<double>(j) * cfg.h, res.v, res.xi, init.M, spec, init.admissibility_tol());
    row.objective = res.objective;
    // I(0) = integral 1/2 |v0|^2 + G(Xi0): the value at the always-admissible candidate v = 0.
    row.comparison_bound = traj.ledger.back().energy;
    const auto audit = structure_audit(res.xi.F, res.xi.Z, init);
    row.curl_change = audit.curl_change;
    row.div_Z_change = audit.div_change;
    const auto el = el_residual(res, init, spec, cfg.el_test_fields, cfg.el_seed);
    row.el_residual = el.value;
    row.kkt_flag = el.kkt_flagged ? 1 : 0;
    row.residual = res.residual;
    row.iterations = res.iterations;
    row.converged = res.converged ? 1 : 0;
    traj.ledger.push_back(row);

    try {
      init = rebase(init, res.v, res.xi, validate);
    } catch (const std::exception& e) {
      throw SchemeError("step " + std::to_string(j) + ": " + e.what(), traj.ledger);
    }
    if (observer) observer(j, init);
    if (keep_steps) traj.steps.push_back(std::move(res));
  }
  traj.final_state = std::move(init);
  return traj;
}

inline Trajectory run_scheme(const TrajectoryConfig& cfg, const StepObserver& observer = {},
                             bool keep_steps = false) {
  const GridPtr grid = Grid::make(cfg.grid);
  InitialState init = make_initial_data(grid, cfg.initial, cfg.h, cfg.gamma, cfg.coefficient);
  return run_scheme(cfg, std::move(init), observer, keep_steps);
}

}  // namespace mmelas
