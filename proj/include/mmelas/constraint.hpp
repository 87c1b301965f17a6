#pragma once

/**
 * @file constraint.hpp
 *
 * @brief The admissible set of one minimizing-movements step: the affine map
 * v -> (F, Z, w) given by the discrete conservation-law updates, its exact
 * adjoint, and the pointwise admissibility checks w >= 0, |F|^3 <= M w.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mmelas/fourier.hpp"
#include "mmelas/grid.hpp"
#include "mmelas/tensor.hpp"

namespace mmelas {

class InadmissibleData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// How the cofactor coefficient of the w-update is formed from F0.
enum class CofactorCoefficient {
  /// Pointwise cof F0 projected onto discretely divergence-free rows.
  piola_projected,
  /// Pointwise cof F0.
  pointwise,
};

inline TensorField pointwise_cofactor(const TensorField& f) {
  TensorField c(f.grid());
  for (std::size_t x = 0; x < f.cells(); ++x) set_mat(c, x, cofactor(mat_at(f, x)));
  return c;
}

inline ScalarField pointwise_determinant(const TensorField& f) {
  ScalarField d(f.grid());
  for (std::size_t x = 0; x < f.cells(); ++x) d(0, x) = determinant(mat_at(f, x));
  return d;
}

inline TensorField cofactor_coefficient(const TensorField& f0, CofactorCoefficient kind) {
  TensorField c = pointwise_cofactor(f0);
  return kind == CofactorCoefficient::piola_projected ? project_divergence_free_rows(c) : c;
}

/// Data of one step: previous iterate (v0, F0, Z0, w0), distortion bound M and step h.
struct InitialState {
  GridPtr grid;
  VectorField v0;
  TensorField F0;
  TensorField Z0;
  ScalarField w0;
  ScalarField M;
  double h = 0.0;
  /// Jacobian floor. 0 means "use 1e-3 * min w0" wherever a positive floor is needed.
  double gamma = 0.0;
  TensorField cofF0;
  CofactorCoefficient coefficient = CofactorCoefficient::piola_projected;

  [[nodiscard]] double min_w0() const {
    double m = std::numeric_limits<double>::infinity();
    for (double x : w0.values()) m = std::min(m, x);
    return m;
  }
  /// Floor used by the Euler-Lagrange validity flag and the variation size.
  [[nodiscard]] double el_gamma() const { return gamma > 0.0 ? gamma : 1e-3 * min_w0(); }
  [[nodiscard]] double admissibility_tol() const {
    double m = 0.0;
    for (std::size_t x = 0; x < grid->cells(); ++x) m = std::max(m, std::abs(M(0, x) * w0(0, x)));
    return 1e-9 * (1.0 + m);
  }
};

struct LiftedState {
  TensorField F;
  TensorField Z;
  ScalarField w;
};

struct AdmissibilityReport {
  double min_w = 0.0;
  double min_slack = 0.0;  // min over cells of M w - |F|^3
  std::size_t violations = 0;
  double max_distortion = 0.0;  // max |F|^3 / w over cells with w > 0
  bool admissible = false;
};

inline AdmissibilityReport check_admissible(const TensorField& f, const ScalarField& w, const ScalarField& m,
                                            double tol) {
  AdmissibilityReport rep;
  rep.min_w = std::numeric_limits<double>::infinity();
  rep.min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < f.cells(); ++x) {
    const double nf = frob_norm(mat_at(f, x));
    const double nf3 = nf * nf * nf;
    const double wx = w(0, x);
    const double slack = m(0, x) * wx - nf3;
    rep.min_w = std::min(rep.min_w, wx);
    rep.min_slack = std::min(rep.min_slack, slack);
    if (wx < 0.0 || slack < -tol) ++rep.violations;
    if (wx > 0.0) rep.max_distortion = std::max(rep.max_distortion, nf3 / wx);
  }
  rep.admissible = rep.min_w >= 0.0 && rep.min_slack >= -tol;
  return rep;
}

inline AdmissibilityReport check_admissible(const LiftedState& xi, const InitialState& init, double tol) {
  return check_admissible(xi.F, xi.w, init.M, tol);
}

/// Builds a step's data and checks the requirements on it (w0 >= 0, |F0|^3 <= M w0, M >= 1, h > 0).
/// With `validate` false only the shape and step-size checks run.
inline InitialState make_initial_state(VectorField v0, TensorField f0, TensorField z0, ScalarField w0, ScalarField m,
                                       double h, double gamma = 0.0,
                                       CofactorCoefficient coef = CofactorCoefficient::piola_projected,
                                       bool validate = true) {
  const GridPtr grid = v0.grid();
  if (!f0.same_grid(grid) || !z0.same_grid(grid) || !w0.same_grid(grid) || !m.same_grid(grid))
    throw ShapeError("initial fields live on different grids");
  if (!(h > 0.0)) throw InadmissibleData("step size h must be positive");
  if (gamma < 0.0) throw InadmissibleData("gamma must be non-negative");
  InitialState s;
  s.grid = grid;
  s.cofF0 = cofactor_coefficient(f0, coef);
  s.v0 = std::move(v0);
  s.F0 = std::move(f0);
  s.Z0 = std::move(z0);
  s.w0 = std::move(w0);
  s.M = std::move(m);
  s.h = h;
  s.gamma = gamma;
  s.coefficient = coef;
  if (validate) {
    for (double x : s.M.values())
      if (!(x >= 1.0) || !std::isfinite(x)) throw InadmissibleData("distortion bound M must satisfy 1 <= M < inf");
    // v = 0 maps to (F0, Z0, w0): the step data itself must be admissible.
    const auto rep = check_admissible(s.F0, s.w0, s.M, s.admissibility_tol());
    if (rep.min_w < 0.0) throw InadmissibleData("initial Jacobian w0 is negative somewhere");
    if (!rep.admissible)
      throw InadmissibleData("initial data violates |F0|^3 <= M w0 (min slack " + std::to_string(rep.min_slack) + ")");
  }
  return s;
}

/// Linear part of the lift: (h grad v, h sum_a d_a(eps eps F0 v), h sum_a d_a(C_{ia} v_i)).
inline LiftedState lift_linear(const VectorField& v, const InitialState& init) {
  if (!v.same_grid(init.grid)) throw ShapeError("velocity field does not match the step grid");
  const Grid& grid = *init.grid;
  const std::size_t cells = grid.cells();
  const double h = init.h;
  LiftedState d{gradient(v), TensorField(init.grid), ScalarField(init.grid)};
  d.F *= h;

  std::vector<double> q(cells);
  std::vector<double> dq(cells);
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t g = 0; g < 3; ++g) {
      auto out = d.Z.component(3 * k + g);
      for (std::size_t a = 0; a < 3; ++a) {
        std::fill(q.begin(), q.end(), 0.0);
        bool any = false;
        for (std::size_t i = 0; i < 3; ++i)
          for (std::size_t j = 0; j < 3; ++j) {
            const int eijk = levi_civita(int(i), int(j), int(k));
            if (eijk == 0) continue;
            for (std::size_t b = 0; b < 3; ++b) {
              const int eabg = levi_civita(int(a), int(b), int(g));
              if (eabg == 0) continue;
              any = true;
              const auto f0 = init.F0.component(3 * j + b);
              const auto vi = v.component(i);
              const double s = eijk * eabg;
              for (std::size_t x = 0; x < cells; ++x) q[x] += s * f0[x] * vi[x];
            }
          }
        if (!any) continue;
        partial(q, a, dq, grid);
        for (std::size_t x = 0; x < cells; ++x) out[x] += h * dq[x];
      }
    }

  auto out_w = d.w.component(0);
  for (std::size_t a = 0; a < 3; ++a) {
    std::fill(q.begin(), q.end(), 0.0);
    for (std::size_t i = 0; i < 3; ++i) {
      const auto c = init.cofF0.component(3 * i + a);
      const auto vi = v.component(i);
      for (std::size_t x = 0; x < cells; ++x) q[x] += c[x] * vi[x];
    }
    partial(q, a, dq, grid);
    for (std::size_t x = 0; x < cells; ++x) out_w[x] += h * dq[x];
  }
  return d;
}

/// (F, Z, w) = (F0, Z0, w0) + lift_linear(v).
inline LiftedState lift(const VectorField& v, const InitialState& init) {
  LiftedState s = lift_linear(v, init);
  s.F += init.F0;
  s.Z += init.Z0;
  s.w += init.w0;
  return s;
}

/// Adjoint of lift_linear for the Euclidean inner product of grid values:
///   a_i = -h sum_a [ d_a P_F{ia} + sum eps_{ijk} eps_{abg} F0_{jb} d_a P_Z{kg} + C_{ia} d_a P_w ].
inline VectorField adjoint_lift(const TensorField& pf, const TensorField& pz, const ScalarField& pw,
                                const InitialState& init) {
  const Grid& grid = *init.grid;
  const std::size_t cells = grid.cells();
  VectorField a(init.grid);
  std::vector<double> tmp(cells);

  for (std::size_t i = 0; i < 3; ++i) {
    auto ai = a.component(i);
    for (std::size_t al = 0; al < 3; ++al) {
      partial(pf.component(3 * i + al), al, tmp, grid);
      for (std::size_t x = 0; x < cells; ++x) ai[x] += tmp[x];
    }
  }

  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t g = 0; g < 3; ++g)
      for (std::size_t al = 0; al < 3; ++al) {
        bool needed = false;
        for (std::size_t b = 0; b < 3 && !needed; ++b) needed = levi_civita(int(al), int(b), int(g)) != 0;
        if (!needed) continue;
        partial(pz.component(3 * k + g), al, tmp, grid);
        for (std::size_t i = 0; i < 3; ++i)
          for (std::size_t j = 0; j < 3; ++j) {
            const int eijk = levi_civita(int(i), int(j), int(k));
            if (eijk == 0) continue;
            for (std::size_t b = 0; b < 3; ++b) {
              const int eabg = levi_civita(int(al), int(b), int(g));
              if (eabg == 0) continue;
              const auto f0 = init.F0.component(3 * j + b);
              auto ai = a.component(i);
              const double s = eijk * eabg;
              for (std::size_t x = 0; x < cells; ++x) ai[x] += s * f0[x] * tmp[x];
            }
          }
      }

  for (std::size_t al = 0; al < 3; ++al) {
    partial(pw.component(0), al, tmp, grid);
    for (std::size_t i = 0; i < 3; ++i) {
      const auto c = init.cofF0.component(3 * i + al);
      auto ai = a.component(i);
      for (std::size_t x = 0; x < cells; ++x) ai[x] += c[x] * tmp[x];
    }
  }
  a *= -init.h;
  return a;
}

struct StructureAudit {
  double curl_change = 0.0;  // max |curl_rows(F) - curl_rows(F0)|
  double div_change = 0.0;   // max |divergence_rows(Z) - divergence_rows(Z0)|
  double curl_abs = 0.0;     // max |curl_rows(F)|
  double div_abs = 0.0;      // max |divergence_rows(Z)|
};

inline StructureAudit structure_audit(const TensorField& f, const TensorField& z, const TensorField& f0,
                                      const TensorField& z0) {
  StructureAudit r;
  const TensorField cf = curl_rows(f);
  const VectorField dz = divergence_rows(z);
  r.curl_abs = max_abs(cf);
  r.div_abs = max_abs(dz);
  r.curl_change = max_abs(cf - curl_rows(f0));
  r.div_change = max_abs(dz - divergence_rows(z0));
  return r;
}

inline StructureAudit structure_audit(const TensorField& f, const TensorField& z, const InitialState& init) {
  return structure_audit(f, z, init.F0, init.Z0);
}

}  // namespace mmelas
