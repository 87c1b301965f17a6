#pragma once

/**
 * @file tensor.hpp
 *
 * @brief Exact 3x3 tensor algebra: determinant, cofactor, the minors map
 * Phi(F) = (F, cof F, det F), its directional derivative, and the flux
 * assembly g(F, Z, w; F0) used by the momentum update.
 *
 * Index convention: F(i, a) with i the spatial row and a the material column.
 */

#include <array>
#include <cmath>
#include <cstddef>

namespace mmelas {

struct Mat3 {
  std::array<double, 9> a{};

  constexpr double& operator()(int i, int al) { return a[3 * i + al]; }
  constexpr double operator()(int i, int al) const { return a[3 * i + al]; }

  static constexpr Mat3 zero() { return {}; }
  static constexpr Mat3 identity() {
    Mat3 m;
    m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
    return m;
  }
  static constexpr Mat3 diag(double x, double y, double z) {
    Mat3 m;
    m(0, 0) = x;
    m(1, 1) = y;
    m(2, 2) = z;
    return m;
  }

  constexpr Mat3& operator+=(const Mat3& o) {
    for (std::size_t k = 0; k < 9; ++k) a[k] += o.a[k];
    return *this;
  }
  constexpr Mat3& operator-=(const Mat3& o) {
    for (std::size_t k = 0; k < 9; ++k) a[k] -= o.a[k];
    return *this;
  }
  constexpr Mat3& operator*=(double s) {
    for (auto& x : a) x *= s;
    return *this;
  }
  friend constexpr Mat3 operator+(Mat3 l, const Mat3& r) { return l += r; }
  friend constexpr Mat3 operator-(Mat3 l, const Mat3& r) { return l -= r; }
  friend constexpr Mat3 operator*(Mat3 l, double s) { return l *= s; }
  friend constexpr Mat3 operator*(double s, Mat3 r) { return r *= s; }
  friend constexpr bool operator==(const Mat3&, const Mat3&) = default;
};

/// F : G (Frobenius inner product)
constexpr double frob_dot(const Mat3& x, const Mat3& y) {
  double s = 0.0;
  for (std::size_t k = 0; k < 9; ++k) s += x.a[k] * y.a[k];
  return s;
}

/// |F| = sqrt(F : F). Every matrix norm in this library is Frobenius.
inline double frob_norm(const Mat3& x) { return std::sqrt(frob_dot(x, x)); }

constexpr Mat3 transpose(const Mat3& x) {
  Mat3 t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t(i, j) = x(j, i);
  return t;
}

constexpr Mat3 matmul(const Mat3& x, const Mat3& y) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += x(i, k) * y(k, j);
      r(i, j) = s;
    }
  return r;
}

namespace detail {
constexpr std::array<int, 27> make_levi_civita() {
  std::array<int, 27> e{};
  e[0 * 9 + 1 * 3 + 2] = 1;
  e[1 * 9 + 2 * 3 + 0] = 1;
  e[2 * 9 + 0 * 3 + 1] = 1;
  e[0 * 9 + 2 * 3 + 1] = -1;
  e[2 * 9 + 1 * 3 + 0] = -1;
  e[1 * 9 + 0 * 3 + 2] = -1;
  return e;
}
inline constexpr std::array<int, 27> levi_civita_table = make_levi_civita();
}  // namespace detail

/// Permutation symbol eps_{ijk}.
constexpr int levi_civita(int i, int j, int k) { return detail::levi_civita_table[9 * i + 3 * j + k]; }

/// Cofactor expansion along the first row.
constexpr double determinant(const Mat3& f) {
  return f(0, 0) * (f(1, 1) * f(2, 2) - f(1, 2) * f(2, 1)) - f(0, 1) * (f(1, 0) * f(2, 2) - f(1, 2) * f(2, 0)) +
         f(0, 2) * (f(1, 0) * f(2, 1) - f(1, 1) * f(2, 0));
}

/// cof F = (adj F)^T, so that F (cof F)^T = det F * I.
constexpr Mat3 cofactor(const Mat3& f) {
  Mat3 c;
  c(0, 0) = f(1, 1) * f(2, 2) - f(1, 2) * f(2, 1);
  c(0, 1) = f(1, 2) * f(2, 0) - f(1, 0) * f(2, 2);
  c(0, 2) = f(1, 0) * f(2, 1) - f(1, 1) * f(2, 0);
  c(1, 0) = f(0, 2) * f(2, 1) - f(0, 1) * f(2, 2);
  c(1, 1) = f(0, 0) * f(2, 2) - f(0, 2) * f(2, 0);
  c(1, 2) = f(0, 1) * f(2, 0) - f(0, 0) * f(2, 1);
  c(2, 0) = f(0, 1) * f(1, 2) - f(0, 2) * f(1, 1);
  c(2, 1) = f(0, 2) * f(1, 0) - f(0, 0) * f(1, 2);
  c(2, 2) = f(0, 0) * f(1, 1) - f(0, 1) * f(1, 0);
  return c;
}

/// The triple Xi = (F, Z, w) on which the convex function G acts.
struct StateTriple {
  Mat3 F;
  Mat3 Z;
  double w = 0.0;

  friend constexpr StateTriple operator+(const StateTriple& l, const StateTriple& r) {
    return {l.F + r.F, l.Z + r.Z, l.w + r.w};
  }
  friend constexpr StateTriple operator*(double s, const StateTriple& x) { return {s * x.F, s * x.Z, s * x.w}; }
};

/// Phi(F) = (F, cof F, det F).
constexpr StateTriple phi(const Mat3& f) { return {f, cofactor(f), determinant(f)}; }

/// Contraction sum_{j,b} eps_{ijk} eps_{abg} A_{jb} B_{ia}, returned as the (k, g) matrix.
/// This is the bilinear form behind d(cof F)[H] with A = F, B = H.
constexpr Mat3 cross_contract(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const int eijk = levi_civita(i, j, k);
        if (eijk == 0) continue;
        for (int al = 0; al < 3; ++al)
          for (int be = 0; be < 3; ++be)
            for (int ga = 0; ga < 3; ++ga) {
              const int eabg = levi_civita(al, be, ga);
              if (eabg == 0) continue;
              r(k, ga) += eijk * eabg * a(j, be) * b(i, al);
            }
      }
  return r;
}

/// Directional derivative of Phi at F in direction H: (H, dcof_F[H], ddet_F[H]).
constexpr StateTriple dphi_apply(const Mat3& f, const Mat3& h) {
  return {h, cross_contract(f, h), frob_dot(cofactor(f), h)};
}

/// g_{ia} = dG_F_{ia} + sum dG_Z_{kg} eps_{ijk} eps_{abg} F0_{jb} + dG_w (cof F0)_{ia}.
///
/// With dG evaluated at Phi(F) and F0 = F this is the chain-rule gradient of W = G o Phi.
constexpr Mat3 g_assemble(const Mat3& dg_f, const Mat3& dg_z, double dg_w, const Mat3& f0) {
  Mat3 g = dg_f;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const int eijk = levi_civita(i, j, k);
        if (eijk == 0) continue;
        for (int al = 0; al < 3; ++al)
          for (int be = 0; be < 3; ++be)
            for (int ga = 0; ga < 3; ++ga) {
              const int eabg = levi_civita(al, be, ga);
              if (eabg == 0) continue;
              g(i, al) += dg_z(k, ga) * eijk * eabg * f0(j, be);
            }
      }
  g += dg_w * cofactor(f0);
  return g;
}

}  // namespace mmelas
