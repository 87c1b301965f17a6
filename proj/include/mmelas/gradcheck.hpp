#pragma once

/**
 * @file gradcheck.hpp
 *
 * @brief Independent oracles for the analytic kernels: brute-force
 * determinant and cofactor, and central finite differences for every
 * derivative the scheme uses.
 *
 * Directional comparisons use err = |fd - exact| / max(1, |exact|) with unit
 * directions and central differences of step `fd_step`.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mmelas/constraint.hpp"
#include "mmelas/energy.hpp"
#include "mmelas/random.hpp"
#include "mmelas/solver.hpp"
#include "mmelas/tensor.hpp"

namespace mmelas {

namespace oracle {

/// det F = sum over permutations s of sign(s) prod_i F_{i s(i)}.
inline double leibniz_determinant(const Mat3& f) {
  std::array<int, 3> perm{0, 1, 2};
  double det = 0.0;
  do {
    int inversions = 0;
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b)
        if (perm[a] > perm[b]) ++inversions;
    const double sign = inversions % 2 == 0 ? 1.0 : -1.0;
    det += sign * f(0, perm[0]) * f(1, perm[1]) * f(2, perm[2]);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return det;
}

/// (cof F)_{ia} = (-1)^(i+a) times the 2x2 minor with row i and column a deleted.
inline Mat3 minors_cofactor(const Mat3& f) {
  Mat3 c;
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 3; ++a) {
      int rows[2];
      int cols[2];
      for (int k = 0, r = 0, s = 0; k < 3; ++k) {
        if (k != i) rows[r++] = k;
        if (k != a) cols[s++] = k;
      }
      const double minor = f(rows[0], cols[0]) * f(rows[1], cols[1]) - f(rows[0], cols[1]) * f(rows[1], cols[0]);
      c(i, a) = ((i + a) % 2 == 0 ? 1.0 : -1.0) * minor;
    }
  return c;
}

}  // namespace oracle

struct OracleResult {
  std::string name;
  std::size_t probes = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
  [[nodiscard]] bool pass() const { return max_error <= tolerance; }
};

struct GradcheckOptions {
  std::size_t probes = 100;
  std::uint64_t seed = 7;
  double fd_step = 1e-5;
  double tolerance = 1e-6;
};

namespace detail {

inline Mat3 random_mat(Rng& rng, double lo, double hi) {
  Mat3 m;
  for (auto& e : m.a) e = rng.uniform(lo, hi);
  return m;
}

inline Mat3 unit_direction(Rng& rng) {
  Mat3 h = random_mat(rng, -1.0, 1.0);
  return (1.0 / frob_norm(h)) * h;
}

/// Matrix with det > 0 near the identity, the regime of the scheme.
inline Mat3 random_deformation(Rng& rng) {
  Mat3 f;
  do {
    f = Mat3::identity() + random_mat(rng, -0.6, 0.6);
  } while (determinant(f) < 0.1);
  return f;
}

inline double rel_err(double fd, double exact) { return std::abs(fd - exact) / std::max(1.0, std::abs(exact)); }

}  // namespace detail

/// determinant and cofactor against the permutation-sum and minors oracles (relative, entrywise).
inline std::vector<OracleResult> check_algebra_oracles(std::size_t samples, std::uint64_t seed,
                                                       double tolerance = 1e-12) {
  Rng rng(seed);
  OracleResult det{"determinant_vs_leibniz", samples, 0.0, tolerance};
  OracleResult cof{"cofactor_vs_minors", samples, 0.0, tolerance};
  for (std::size_t s = 0; s < samples; ++s) {
    const Mat3 f = detail::random_mat(rng, -2.0, 2.0);
    const double scale_f = std::max(1e-300, std::pow(frob_norm(f), 3));
    det.max_error = std::max(det.max_error, std::abs(determinant(f) - oracle::leibniz_determinant(f)) / scale_f);
    const Mat3 c = cofactor(f);
    const Mat3 m = oracle::minors_cofactor(f);
    const double scale_c = std::max(1e-300, frob_dot(f, f));
    for (int k = 0; k < 9; ++k) cof.max_error = std::max(cof.max_error, std::abs(c.a[k] - m.a[k]) / scale_c);
  }
  return {det, cof};
}

/// dphi_apply against central differences of Phi.
inline OracleResult check_dphi(const GradcheckOptions& opt) {
  Rng rng(opt.seed);
  OracleResult r{"dphi_apply", opt.probes, 0.0, opt.tolerance};
  const double e = opt.fd_step;
  for (std::size_t s = 0; s < opt.probes; ++s) {
    const Mat3 f = detail::random_mat(rng, -2.0, 2.0);
    const Mat3 h = detail::unit_direction(rng);
    const StateTriple d = dphi_apply(f, h);
    const StateTriple p = phi(f + e * h);
    const StateTriple m = phi(f - e * h);
    for (int k = 0; k < 9; ++k) {
      r.max_error = std::max(r.max_error, detail::rel_err((p.F.a[k] - m.F.a[k]) / (2 * e), d.F.a[k]));
      r.max_error = std::max(r.max_error, detail::rel_err((p.Z.a[k] - m.Z.a[k]) / (2 * e), d.Z.a[k]));
    }
    r.max_error = std::max(r.max_error, detail::rel_err((p.w - m.w) / (2 * e), d.w));
  }
  return r;
}

/// eval_grad_G against central differences of G along random directions in (F, Z, w).
inline OracleResult check_energy_gradient(const EnergySpec& spec, const GradcheckOptions& opt) {
  Rng rng(opt.seed + 1);
  OracleResult r{"eval_grad_G", opt.probes, 0.0, opt.tolerance};
  for (std::size_t s = 0; s < opt.probes; ++s) {
    StateTriple x{detail::random_mat(rng, -1.5, 1.5), detail::random_mat(rng, -1.5, 1.5), rng.uniform(0.2, 2.0)};
    StateTriple dir{detail::random_mat(rng, -1.0, 1.0), detail::random_mat(rng, -1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const double nd = std::sqrt(frob_dot(dir.F, dir.F) + frob_dot(dir.Z, dir.Z) + dir.w * dir.w);
    dir = (1.0 / nd) * dir;
    const double e = opt.fd_step;
    const double fd = (eval_G(spec, x + e * dir) - eval_G(spec, x + (-e) * dir)) / (2 * e);
    const EnergyGradient g = eval_grad_G(spec, x);
    const double exact = frob_dot(g.dF, dir.F) + frob_dot(g.dZ, dir.Z) + g.dw * dir.w;
    r.max_error = std::max(r.max_error, detail::rel_err(fd, exact));
  }
  return r;
}

/// g_assemble(dG(Phi(F)); F0 = F) is dW/dF: compared with central differences of W = G o Phi.
inline OracleResult check_chain_rule(const EnergySpec& spec, const GradcheckOptions& opt) {
  Rng rng(opt.seed + 2);
  OracleResult r{"g_assemble_chain_rule", opt.probes, 0.0, opt.tolerance};
  for (std::size_t s = 0; s < opt.probes; ++s) {
    const Mat3 f = detail::random_deformation(rng);
    const Mat3 h = detail::unit_direction(rng);
    const EnergyGradient g = eval_grad_G(spec, phi(f));
    const Mat3 dw = g_assemble(g.dF, g.dZ, g.dw, f);
    const double e = opt.fd_step;
    const double fd = (eval_W(spec, f + e * h) - eval_W(spec, f - e * h)) / (2 * e);
    r.max_error = std::max(r.max_error, detail::rel_err(fd, frob_dot(dw, h)));
  }
  return r;
}

/// objective_gradient against central differences of the step objective along random grid directions.
///
/// The base points are v0 plus band-limited perturbations of size `perturbation`.
inline OracleResult check_objective_gradient(const InitialState& init, const EnergySpec& spec,
                                             const GradcheckOptions& opt, double perturbation = 0.1) {
  Rng rng(opt.seed + 3);
  OracleResult r{"objective_gradient", opt.probes, 0.0, opt.tolerance};
  const int modes = std::min<int>(2, static_cast<int>(init.grid->n()) / 2 - 1);
  for (std::size_t s = 0; s < opt.probes; ++s) {
    VectorField v = init.v0;
    v += random_trig_field<3>(init.grid, opt.seed + 101 * s, modes, perturbation, true);
    VectorField dir(init.grid);
    for (double& x : dir.values()) x = rng.uniform(-1.0, 1.0);
    dir *= 1.0 / std::sqrt(dot(dir, dir));
    const double e = opt.fd_step;
    VectorField vp = v;
    vp.axpy(e, dir);
    VectorField vm = v;
    vm.axpy(-e, dir);
    const double fd = (objective(vp, init, spec, true) - objective(vm, init, spec, true)) / (2 * e);
    const double exact = dot(objective_gradient(v, init, spec, true), dir);
    r.max_error = std::max(r.max_error, detail::rel_err(fd, exact));
  }
  return r;
}

}  // namespace mmelas
