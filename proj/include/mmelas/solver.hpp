#pragma once

/**
 * @file solver.hpp
 *
 * @brief One minimizing-movements step: minimize
 *
 *     I(v) = integral of 1/2 |v - v0|^2 + G(lift(v))
 *
 * over velocities v, where lift maps v to the admissible (F, Z, w). The
 * pointwise constraints w >= 0 and |F|^3 <= M w are handled by a log-barrier
 * or a quadratic penalty, or dropped entirely.
 *
 * Optimality is certified afterwards through the weak Euler-Lagrange identity
 * and one-sided difference quotients along admissible variations.
 */

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmelas/constraint.hpp"
#include "mmelas/energy.hpp"
#include "mmelas/grid.hpp"

namespace mmelas {

enum class ConstraintMode { unconstrained, barrier, penalty };

inline const char* to_string(ConstraintMode m) {
  switch (m) {
    case ConstraintMode::unconstrained: return "unconstrained";
    case ConstraintMode::barrier: return "barrier";
    case ConstraintMode::penalty: return "penalty";
  }
  return "?";
}

struct SolverConfig {
  ConstraintMode mode = ConstraintMode::barrier;
  /// Exit when max |dI/dv| / dx^3 <= grad_tol * gradient_scale.
  double grad_tol = 1e-9;
  std::size_t max_iterations = 50000;
  std::size_t max_outer = 60;
  /// Initial barrier weight; unset means 1e-2 * (objective at the initial guess) / L^3.
  std::optional<double> mu0;
  double mu_shrink = 0.2;
  double mu_min = 1e-8;
  double penalty0 = 1e2;
  double penalty_growth = 10.0;
  double penalty_max = 1e12;
  double armijo = 1e-4;
  double backtrack = 0.5;
  bool nesterov = true;
  std::uint64_t seed = 0;
  /// Amplitude of a zero-mean band-limited perturbation added to the initial guess v0.
  double init_perturbation = 0.0;
  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

struct StepResult {
  VectorField v;
  LiftedState xi;
  double objective = 0.0;
  /// max |r| of the minimized (possibly barrier/penalty-augmented) functional at exit, r = grad / dx^3.
  double residual = 0.0;
  /// max |r| of the plain functional I at exit.
  double plain_residual = 0.0;
  double gradient_scale = 1.0;
  AdmissibilityReport admissibility;
  std::size_t iterations = 0;
  std::size_t outer_iterations = 0;
  bool converged = false;
  bool extended_energy_used = false;
  /// Barrier/penalty term contributes more than the tolerance to the optimality condition.
  bool constraints_active = false;
  ConstraintMode mode = ConstraintMode::unconstrained;
  double final_weight = 0.0;  // mu (barrier) or rho (penalty) of the last stage
  double wall_seconds = 0.0;
  /// Objective of the minimized functional at every accepted iterate (per stage, concatenated).
  std::vector<double> history;
  std::vector<std::size_t> stage_starts;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

struct Evaluation {
  double value = 0.0;
  VectorField grad;  // dI/dv / dx^3
  std::vector<double> density;
  bool finite = true;
  bool extended = false;
};

/// Objective, constraint term, and gradient of one step for a fixed constraint weight.
class StepFunctional {
 public:
  StepFunctional(const InitialState& init, const EnergySpec& spec, ConstraintMode mode)
      : init_(init), spec_(spec), mode_(mode), allow_ext_(mode != ConstraintMode::barrier) {}
  StepFunctional(const InitialState& init, const EnergySpec& spec, ConstraintMode mode, bool allow_extended)
      : init_(init), spec_(spec), mode_(mode), allow_ext_(allow_extended) {}

  /// `weight` is mu for the barrier and rho for the penalty; ignored when unconstrained.
  /// With `constraint_only` the kinetic and energy terms are omitted.
  Evaluation evaluate(const VectorField& v, double weight, bool with_grad, bool constraint_only = false) const {
    Evaluation ev;
    const LiftedState xi = lift(v, init_);
    const std::size_t cells = init_.grid->cells();
    std::vector<double> density(cells, 0.0);
    TensorField pf;
    TensorField pz;
    ScalarField pw;
    if (with_grad) {
      pf = TensorField(init_.grid);
      pz = TensorField(init_.grid);
      pw = ScalarField(init_.grid);
    }
    const bool allow_ext = allow_ext_;
    for (std::size_t x = 0; x < cells; ++x) {
      const StateTriple s{mat_at(xi.F, x), mat_at(xi.Z, x), xi.w(0, x)};
      if (s.w < 0.0) {
        if (mode_ == ConstraintMode::barrier) {
          ev.finite = false;
          ev.value = std::numeric_limits<double>::infinity();
          return ev;
        }
        ev.extended = true;
      }
      double dens = 0.0;
      if (!constraint_only) {
        double kin = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
          const double d = v(i, x) - init_.v0(i, x);
          kin += d * d;
        }
        dens += 0.5 * kin + spec_.value(s, allow_ext);
        if (with_grad) {
          const EnergyGradient g = spec_.gradient(s, allow_ext);
          set_mat(pf, x, g.dF);
          set_mat(pz, x, g.dZ);
          pw(0, x) = g.dw;
        }
      }
      if (mode_ == ConstraintMode::unconstrained) {
        density[x] = dens;
        continue;
      }
      const double nf = frob_norm(s.F);
      const double nf3 = nf * nf * nf;
      const double m = init_.M(0, x);
      const double slack = m * s.w - nf3;
      if (mode_ == ConstraintMode::barrier) {
        if (!(s.w > 0.0) || !(slack > 0.0)) {
          ev.finite = false;
          ev.value = std::numeric_limits<double>::infinity();
          return ev;
        }
        dens -= weight * (std::log(s.w) + std::log(slack));
        if (with_grad) {
          pw(0, x) += -weight * (1.0 / s.w + m / slack);
          const double cf = weight * 3.0 * nf / slack;
          for (std::size_t c = 0; c < 9; ++c) pf(c, x) += cf * s.F.a[c];
        }
      } else {
        const double a = std::max(0.0, -s.w);
        const double b = std::max(0.0, -slack);
        dens += 0.5 * weight * (a * a + b * b);
        if (with_grad) {
          pw(0, x) += -weight * a - weight * b * m;
          const double cf = weight * b * 3.0 * nf;
          for (std::size_t c = 0; c < 9; ++c) pf(c, x) += cf * s.F.a[c];
        }
      }
      density[x] = dens;
    }
    ev.value = integrate(density, *init_.grid);
    ev.density = std::move(density);
    if (with_grad) {
      ev.grad = adjoint_lift(pf, pz, pw, init_);
      if (!constraint_only) ev.grad += v - init_.v0;
    }
    return ev;
  }

 private:
  const InitialState& init_;
  const EnergySpec& spec_;
  ConstraintMode mode_;
  bool allow_ext_;
};

struct InnerResult {
  VectorField x;
  double value = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool extended = false;
};

/// f(b) - f(a) from per-cell density differences; far less rounding than differencing the totals.
inline double value_difference(const Evaluation& b, const Evaluation& a, const Grid& grid) {
  std::vector<double> diff(a.density.size());
  for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = b.density[k] - a.density[k];
  return integrate(diff, grid);
}

/// Accelerated gradient descent with Armijo backtracking and function-value restart.
///
/// Once objective differences drop to rounding level the Armijo test is replaced by the
/// approximate Wolfe condition phi'(tau) <= 0.8 phi'(0), which certifies decrease for
/// convex objectives from gradients alone. Accepted iterates are non-increasing up to
/// that rounding level.
inline InnerResult descend(const StepFunctional& fn, VectorField x0, double weight, double tol,
                           std::size_t max_iter, const SolverConfig& cfg, std::vector<double>& history) {
  InnerResult res;
  const Grid& grid = *x0.grid();
  const double dv = grid.cell_volume();
  Evaluation ex = fn.evaluate(x0, weight, true);
  if (!ex.finite) throw SolverError("initial guess is outside the barrier domain");
  VectorField x = std::move(x0);
  VectorField x_prev = x;
  res.extended = ex.extended;
  history.push_back(ex.value);

  VectorField y = x;
  Evaluation ey = ex;
  double tau = 1.0;
  std::size_t momentum = 0;
  std::size_t stalls = 0;

  auto noise = [&](const Evaluation& e) {
    double m = 0.0;
    for (double d : e.density) m = std::max(m, std::abs(d));
    return 64.0 * std::numeric_limits<double>::epsilon() * m * std::sqrt(static_cast<double>(e.density.size())) * dv;
  };

  for (std::size_t it = 0; it < max_iter; ++it) {
    res.iterations = it;
    const double ry = max_abs(ey.grad);
    if (ry <= tol) {
      if (momentum == 0) {
        res.residual = ry;
        res.converged = true;
        break;
      }
      const double rx = max_abs(ex.grad);
      if (rx <= tol) {
        res.residual = rx;
        res.converged = true;
        break;
      }
    }
    const double gg = dot(ey.grad, ey.grad);
    const double floor = noise(ey);
    tau = std::min(tau * 2.0, 1e6);
    VectorField trial;
    Evaluation et;
    bool found = false;
    while (tau > 1e-18) {
      trial = y;
      trial.axpy(-tau, ey.grad);
      et = fn.evaluate(trial, weight, false);
      if (et.finite) {
        const double df = value_difference(et, ey, grid);
        if (df <= -cfg.armijo * tau * gg * dv) {
          found = true;
          break;
        }
        if (std::abs(df) <= floor) {
          et = fn.evaluate(trial, weight, true);
          if (dot(et.grad, ey.grad) >= 0.8 * gg) {
            found = true;
            break;
          }
        }
      }
      tau *= cfg.backtrack;
    }
    bool monotone = false;
    if (found) {
      const double dfx = value_difference(et, ex, grid);
      if (dfx <= 0.0) {
        monotone = true;
      } else if (dfx <= noise(ex)) {
        // Convexity: f(t) <= f(x) + <grad f(t), t - x>.
        if (!et.grad.size()) et = fn.evaluate(trial, weight, true);
        monotone = dot(et.grad, trial - x) <= 0.0;
      }
    }
    if (!monotone) {
      if (momentum > 0) {
        // Restart from the last accepted iterate without momentum.
        momentum = 0;
        y = x;
        ey = ex;
        tau = std::max(tau, 1e-6);
        continue;
      }
      if (++stalls > 3) break;
      tau = 1.0;
      continue;
    }
    stalls = 0;
    x_prev = std::move(x);
    x = std::move(trial);
    ex = et.grad.size() ? std::move(et) : fn.evaluate(x, weight, true);
    res.extended = res.extended || ex.extended;
    history.push_back(ex.value);
    if (cfg.nesterov) {
      ++momentum;
      const double beta = static_cast<double>(momentum - 1) / static_cast<double>(momentum + 2);
      y = x;
      if (beta > 0.0) {
        VectorField dx = x - x_prev;
        y.axpy(beta, dx);
        ey = fn.evaluate(y, weight, true);
        if (!ey.finite) {
          momentum = 0;
          y = x;
          ey = ex;
        }
      } else {
        ey = ex;
      }
    } else {
      y = x;
      ey = ex;
    }
  }
  res.value = ex.value;
  if (!res.converged) res.residual = max_abs(ex.grad);
  res.x = std::move(x);
  return res;
}

}  // namespace detail

/// Scale of the optimality residual: 1 + max|v0| + max|dG(Xi0)|.
inline double gradient_scale(const InitialState& init, const EnergySpec& spec) {
  double m = max_abs(init.v0);
  for (std::size_t x = 0; x < init.grid->cells(); ++x) {
    const StateTriple s{mat_at(init.F0, x), mat_at(init.Z0, x), init.w0(0, x)};
    const EnergyGradient g = spec.gradient(s, true);
    for (double e : g.dF.a) m = std::max(m, std::abs(e));
    for (double e : g.dZ.a) m = std::max(m, std::abs(e));
    m = std::max(m, std::abs(g.dw));
  }
  return 1.0 + m;
}

/// I(v) = integral of 1/2 |v - v0|^2 + G(lift(v)). Uses the |w| extension when `extended`.
inline double objective(const VectorField& v, const InitialState& init, const EnergySpec& spec,
                        bool extended = false) {
  const LiftedState xi = lift(v, init);
  std::vector<double> density(init.grid->cells());
  for (std::size_t x = 0; x < density.size(); ++x) {
    double kin = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      const double d = v(i, x) - init.v0(i, x);
      kin += d * d;
    }
    density[x] = 0.5 * kin + spec.value({mat_at(xi.F, x), mat_at(xi.Z, x), xi.w(0, x)}, extended);
  }
  return integrate(density, *init.grid);
}

/// dI/dv with respect to the grid values of v (so it matches finite differences of `objective`).
inline VectorField objective_gradient(const VectorField& v, const InitialState& init, const EnergySpec& spec,
                                      bool extended = false) {
  detail::StepFunctional fn(init, spec, ConstraintMode::unconstrained, extended);
  auto ev = fn.evaluate(v, 0.0, true);
  ev.grad *= init.grid->cell_volume();
  return ev.grad;
}

inline StepResult minimize_step(const InitialState& init, const EnergySpec& spec, const SolverConfig& cfg) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  if (!(cfg.grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be positive");
  if (!(cfg.mu_shrink > 0.0 && cfg.mu_shrink < 1.0)) throw std::invalid_argument("mu_shrink must lie in (0,1)");
  if (!(cfg.backtrack > 0.0 && cfg.backtrack < 1.0)) throw std::invalid_argument("backtrack must lie in (0,1)");

  StepResult out;
  out.mode = cfg.mode;
  out.gradient_scale = gradient_scale(init, spec);
  const double tol = cfg.grad_tol * out.gradient_scale;
  const double volume = std::pow(init.grid->spec().length, 3);

  VectorField guess = init.v0;
  if (cfg.init_perturbation > 0.0) {
    const int modes = std::min<int>(2, static_cast<int>(init.grid->n()) / 2 - 1);
    guess += random_trig_field<3>(init.grid, cfg.seed, modes, cfg.init_perturbation, true);
  }

  detail::StepFunctional fn(init, spec, cfg.mode);
  if (cfg.mode == ConstraintMode::barrier) {
    VectorField zero(init.grid);
    if (!fn.evaluate(zero, 1.0, false).finite)
      throw InadmissibleData("barrier mode needs strictly admissible step data (w0 > 0, |F0|^3 < M w0)");
    // Scale toward v = 0 until lift(v) is strictly admissible.
    int halvings = 0;
    while (!fn.evaluate(guess, 1.0, false).finite) {
      guess *= 0.5;
      if (++halvings > 60) {
        guess = zero;
        break;
      }
    }
  }

  std::size_t total_iters = 0;
  std::size_t outer = 0;
  bool converged = false;
  bool extended = false;
  double weight = 0.0;

  if (cfg.mode == ConstraintMode::unconstrained) {
    out.stage_starts.push_back(out.history.size());
    auto r = detail::descend(fn, std::move(guess), 0.0, tol, cfg.max_iterations, cfg, out.history);
    guess = std::move(r.x);
    total_iters = r.iterations;
    converged = r.converged;
    extended = r.extended;
    outer = 1;
  } else if (cfg.mode == ConstraintMode::barrier) {
    const double obj_scale = std::max(1.0, std::abs(objective(guess, init, spec))) / volume;
    double mu = cfg.mu0.value_or(1e-2 * obj_scale);
    bool last = false;
    while (outer < cfg.max_outer) {
      if (mu <= cfg.mu_min) {
        mu = cfg.mu_min;
        last = true;
      }
      const double stage_tol = last ? tol : std::max(tol, mu * out.gradient_scale);
      out.stage_starts.push_back(out.history.size());
      auto r = detail::descend(fn, std::move(guess), mu, stage_tol, cfg.max_iterations, cfg, out.history);
      guess = std::move(r.x);
      total_iters += r.iterations;
      ++outer;
      weight = mu;
      if (last) {
        converged = r.converged;
        break;
      }
      mu *= cfg.mu_shrink;
    }
  } else {
    double rho = cfg.penalty0;
    while (outer < cfg.max_outer) {
      out.stage_starts.push_back(out.history.size());
      auto r = detail::descend(fn, std::move(guess), rho, tol, cfg.max_iterations, cfg, out.history);
      guess = std::move(r.x);
      total_iters += r.iterations;
      extended = extended || r.extended;
      ++outer;
      weight = rho;
      const LiftedState xi = lift(guess, init);
      const auto rep = check_admissible(xi, init, init.admissibility_tol());
      converged = r.converged;
      if (rep.admissible || rho >= cfg.penalty_max) break;
      rho *= cfg.penalty_growth;
    }
  }

  out.v = std::move(guess);
  out.xi = lift(out.v, init);
  out.objective = objective(out.v, init, spec, true);
  out.iterations = total_iters;
  out.outer_iterations = outer;
  out.converged = converged;
  out.extended_energy_used = extended;
  out.final_weight = weight;
  out.admissibility = check_admissible(out.xi, init, init.admissibility_tol());

  const auto full = fn.evaluate(out.v, weight, true);
  out.residual = max_abs(full.grad);
  detail::StepFunctional plain(init, spec, ConstraintMode::unconstrained, true);
  out.plain_residual = max_abs(plain.evaluate(out.v, 0.0, true).grad);
  if (cfg.mode != ConstraintMode::unconstrained) {
    const auto cons = fn.evaluate(out.v, weight, true, true);
    out.constraints_active = max_abs(cons.grad) > tol;
  }
  out.wall_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  return out;
}

// ---------------------------------------------------------------------------
// Optimality certificates

struct ElResidual {
  /// max over test fields of |weak-form integral| / ||theta||_L2
  double value = 0.0;
  /// Same with the flux written as h d_a theta_i g_{ia}(F, Z, w; F0) (continuum product rule);
  /// differs from `value` by a discretization defect that vanishes under refinement.
  double flux_form_value = 0.0;
  /// Barrier gradient included because constraints were active at exit.
  bool kkt_flagged = false;
  /// min w >= gamma, the regime in which the identity is expected to hold.
  bool valid = true;
};

/// Weak Euler-Lagrange integral for one direction:
///   integral theta . (v - v0) + dG(Xi) : D lift[theta]
/// which is the derivative of I along the admissible variation (theta, lift_linear(theta)).
inline double weak_form(const StepResult& res, const InitialState& init, const EnergySpec& spec,
                        const VectorField& theta, bool include_barrier = false) {
  const LiftedState d = lift_linear(theta, init);
  const std::size_t cells = init.grid->cells();
  std::vector<double> density(cells);
  for (std::size_t x = 0; x < cells; ++x) {
    const StateTriple s{mat_at(res.xi.F, x), mat_at(res.xi.Z, x), res.xi.w(0, x)};
    EnergyGradient g = spec.gradient(s, true);
    if (include_barrier && res.mode == ConstraintMode::barrier) {
      const double mu = res.final_weight;
      const double nf = frob_norm(s.F);
      const double slack = init.M(0, x) * s.w - nf * nf * nf;
      g.dw += -mu * (1.0 / s.w + init.M(0, x) / slack);
      g.dF += (mu * 3.0 * nf / slack) * s.F;
    }
    double t = 0.0;
    for (std::size_t i = 0; i < 3; ++i) t += theta(i, x) * (res.v(i, x) - init.v0(i, x));
    t += frob_dot(g.dF, mat_at(d.F, x)) + frob_dot(g.dZ, mat_at(d.Z, x)) + g.dw * d.w(0, x);
    density[x] = t;
  }
  return integrate(density, *init.grid);
}

/// integral theta . (v - v0) + h d_a theta_i g_{ia}(F, Z, w; F0), with the pointwise cof F0.
inline double flux_form(const StepResult& res, const InitialState& init, const EnergySpec& spec,
                        const VectorField& theta) {
  const TensorField dtheta = gradient(theta);
  const std::size_t cells = init.grid->cells();
  std::vector<double> density(cells);
  for (std::size_t x = 0; x < cells; ++x) {
    const StateTriple s{mat_at(res.xi.F, x), mat_at(res.xi.Z, x), res.xi.w(0, x)};
    const EnergyGradient g = spec.gradient(s, true);
    const Mat3 flux = g_assemble(g.dF, g.dZ, g.dw, mat_at(init.F0, x));
    double t = 0.0;
    for (std::size_t i = 0; i < 3; ++i) t += theta(i, x) * (res.v(i, x) - init.v0(i, x));
    t += init.h * frob_dot(mat_at(dtheta, x), flux);
    density[x] = t;
  }
  return integrate(density, *init.grid);
}

inline ElResidual el_residual(const StepResult& res, const InitialState& init, const EnergySpec& spec,
                              std::size_t num_test_fields, std::uint64_t seed) {
  ElResidual out;
  out.kkt_flagged = res.constraints_active;
  out.valid = res.admissibility.min_w >= init.el_gamma();
  const int modes = std::min<int>(2, static_cast<int>(init.grid->n()) / 2 - 1);
  for (std::size_t t = 0; t < num_test_fields; ++t) {
    const VectorField theta = random_test_field(init.grid, seed + 7919 * t, modes);
    const double norm = l2_norm(theta);
    if (norm == 0.0) continue;
    out.value = std::max(out.value, std::abs(weak_form(res, init, spec, theta, out.kkt_flagged)) / norm);
    out.flux_form_value = std::max(out.flux_form_value, std::abs(flux_form(res, init, spec, theta)) / norm);
  }
  return out;
}

class ProbeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DirectionalProbe {
  double eps0 = 0.0;
  std::vector<double> eps;        // +eps0/2^k, -eps0/2^k for k = 1..6, interleaved
  std::vector<double> quotients;  // (I(v + eps theta) - I(v)) / eps
  double weak_value = 0.0;        // weak_form(theta)
  /// |(q(+e) + q(-e))/2 - weak_value| at the smallest e.
  double central_error = 0.0;
  /// |q(+-e) - weak_value| at the smallest e (first-order accurate).
  double one_sided_error = 0.0;
};

/// Variation (v, F, Z, w) + eps (theta, lift_linear(theta)) with
///   eps0 = gamma / (|| h sum cof F0_{ia} d_a theta_i ||_inf + 1).
/// Throws ProbeError if the variation leaves the admissible set for |eps| <= eps0.
inline DirectionalProbe directional_probe(const StepResult& res, const InitialState& init, const EnergySpec& spec,
                                          const VectorField& theta) {
  DirectionalProbe out;
  const TensorField dtheta = gradient(theta);
  double sup = 0.0;
  for (std::size_t x = 0; x < init.grid->cells(); ++x) {
    double s = 0.0;
    for (std::size_t c = 0; c < 9; ++c) s += init.cofF0(c, x) * dtheta(c, x);
    sup = std::max(sup, std::abs(init.h * s));
  }
  out.eps0 = init.el_gamma() / (sup + 1.0);

  // The admissible set is convex and the variation affine, so the endpoints suffice.
  const LiftedState d = lift_linear(theta, init);
  const double tol = init.admissibility_tol();
  for (double e : {out.eps0, -out.eps0}) {
    TensorField f = res.xi.F;
    f.axpy(e, d.F);
    ScalarField w = res.xi.w;
    w.axpy(e, d.w);
    if (!check_admissible(f, w, init.M, tol).admissible)
      throw ProbeError("variation leaves the admissible set within |eps| <= eps0");
  }

  const bool ext = res.extended_energy_used;
  const double base = objective(res.v, init, spec, ext);
  for (int k = 1; k <= 6; ++k) {
    const double e = out.eps0 / std::pow(2.0, k);
    for (double s : {e, -e}) {
      VectorField v = res.v;
      v.axpy(s, theta);
      out.eps.push_back(s);
      out.quotients.push_back((objective(v, init, spec, ext) - base) / s);
    }
  }
  out.weak_value = weak_form(res, init, spec, theta);
  const double qp = out.quotients[out.quotients.size() - 2];
  const double qm = out.quotients.back();
  out.central_error = std::abs(0.5 * (qp + qm) - out.weak_value);
  out.one_sided_error = std::max(std::abs(qp - out.weak_value), std::abs(qm - out.weak_value));
  return out;
}

}  // namespace mmelas
