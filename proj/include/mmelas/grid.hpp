#pragma once

/**
 * @file grid.hpp
 *
 * @brief Uniform periodic grid on the 3-torus, component-major grid fields,
 * and discrete partial derivatives.
 *
 * Both derivative flavors are circulant and antisymmetric along each axis, so
 * partials along different axes commute and summation by parts holds exactly
 * up to rounding.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mmelas/random.hpp"
#include "mmelas/tensor.hpp"

namespace mmelas {

enum class Flavor { spectral, central };

inline const char* to_string(Flavor f) { return f == Flavor::spectral ? "spectral" : "central"; }

struct GridSpec {
  std::size_t n = 8;
  double length = 1.0;
  Flavor flavor = Flavor::spectral;

  [[nodiscard]] double spacing() const { return length / static_cast<double>(n); }
  [[nodiscard]] std::size_t cells() const { return n * n * n; }
  [[nodiscard]] double cell_volume() const {
    const double dx = spacing();
    return dx * dx * dx;
  }
  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Immutable grid with its precomputed derivative stencil.
class Grid {
 public:
  struct Tap {
    std::size_t offset;  // in [0, n)
    double weight;
  };

  explicit Grid(GridSpec spec) : spec_(spec) {
    if (spec.n < 4 || spec.n % 2 != 0) throw std::invalid_argument("grid n must be even and >= 4");
    if (!(spec.length > 0.0)) throw std::invalid_argument("grid length must be positive");
    const double dx = spec.spacing();
    if (spec.flavor == Flavor::central) {
      taps_ = {{1, 0.5 / dx}, {spec.n - 1, -0.5 / dx}};
    } else {
      // Periodic sinc interpolant differentiated on the grid (Nyquist mode dropped):
      // (Df)_j = sum_m d_m f_{j+m},  d_m = -(pi/L) (-1)^m cot(pi m / n).
      const int n = static_cast<int>(spec.n);
      for (int m = 1; m < n; ++m) {
        if (2 * m == n) continue;
        const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
        const double w = -(std::numbers::pi / spec.length) * sgn / std::tan(std::numbers::pi * m / n);
        taps_.push_back({static_cast<std::size_t>(m), w});
      }
    }
  }

  static std::shared_ptr<const Grid> make(GridSpec spec) { return std::make_shared<const Grid>(spec); }

  [[nodiscard]] const GridSpec& spec() const { return spec_; }
  [[nodiscard]] std::size_t n() const { return spec_.n; }
  [[nodiscard]] std::size_t cells() const { return spec_.cells(); }
  [[nodiscard]] double spacing() const { return spec_.spacing(); }
  [[nodiscard]] double cell_volume() const { return spec_.cell_volume(); }
  [[nodiscard]] const std::vector<Tap>& taps() const { return taps_; }

  /// Linear index with x1 fastest.
  [[nodiscard]] std::size_t index(std::size_t x1, std::size_t x2, std::size_t x3) const {
    return x1 + spec_.n * (x2 + spec_.n * x3);
  }
  [[nodiscard]] std::array<double, 3> coordinates(std::size_t idx) const {
    const std::size_t n = spec_.n;
    const double dx = spacing();
    return {dx * static_cast<double>(idx % n), dx * static_cast<double>((idx / n) % n),
            dx * static_cast<double>(idx / (n * n))};
  }

  /// Imaginary part of the Fourier symbol of the discrete derivative for integer wavenumber k.
  [[nodiscard]] double symbol(long k) const {
    const long n = static_cast<long>(spec_.n);
    long kk = ((k % n) + n) % n;
    if (kk > n / 2) kk -= n;
    if (spec_.flavor == Flavor::spectral) {
      if (2 * kk == n) return 0.0;
      return 2.0 * std::numbers::pi * static_cast<double>(kk) / spec_.length;
    }
    return std::sin(2.0 * std::numbers::pi * static_cast<double>(kk) / static_cast<double>(n)) / spacing();
  }

 private:
  GridSpec spec_;
  std::vector<Tap> taps_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Grid field with `Components` values per cell, stored component-major, x1 fastest.
///
/// Tensor fields use component index 3*i + a (row i, column a).
template <std::size_t Components>
class Field {
 public:
  static constexpr std::size_t components = Components;

  Field() = default;
  explicit Field(GridPtr grid, double fill = 0.0)
      : grid_(std::move(grid)), data_(Components * grid_->cells(), fill) {}

  [[nodiscard]] const GridPtr& grid() const { return grid_; }
  [[nodiscard]] std::size_t cells() const { return grid_->cells(); }
  [[nodiscard]] std::size_t size() const { return data_.size(); }

  [[nodiscard]] std::span<double> component(std::size_t c) {
    return {data_.data() + c * grid_->cells(), grid_->cells()};
  }
  [[nodiscard]] std::span<const double> component(std::size_t c) const {
    return {data_.data() + c * grid_->cells(), grid_->cells()};
  }
  [[nodiscard]] std::span<double> values() { return data_; }
  [[nodiscard]] std::span<const double> values() const { return data_; }

  double& operator()(std::size_t c, std::size_t idx) { return data_[c * grid_->cells() + idx]; }
  double operator()(std::size_t c, std::size_t idx) const { return data_[c * grid_->cells() + idx]; }

  Field& operator+=(const Field& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Field& operator-=(const Field& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Field& operator*=(double s) {
    for (auto& x : data_) x *= s;
    return *this;
  }
  /// this += s * o
  Field& axpy(double s, const Field& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += s * o.data_[k];
    return *this;
  }
  friend Field operator+(Field l, const Field& r) { return l += r; }
  friend Field operator-(Field l, const Field& r) { return l -= r; }
  friend Field operator*(double s, Field r) { return r *= s; }

  void check_same(const Field<Components>& o) const {
    if (grid_ != o.grid_ && !(grid_ && o.grid_ && grid_->spec() == o.grid_->spec()))
      throw ShapeError("fields live on different grids");
  }

  [[nodiscard]] bool same_grid(const GridPtr& g) const {
    return grid_ == g || (grid_ && g && grid_->spec() == g->spec());
  }

 private:
  GridPtr grid_;
  std::vector<double> data_;
};

using ScalarField = Field<1>;
using VectorField = Field<3>;
using TensorField = Field<9>;

inline Mat3 mat_at(const TensorField& t, std::size_t idx) {
  Mat3 m;
  for (std::size_t c = 0; c < 9; ++c) m.a[c] = t(c, idx);
  return m;
}

inline void set_mat(TensorField& t, std::size_t idx, const Mat3& m) {
  for (std::size_t c = 0; c < 9; ++c) t(c, idx) = m.a[c];
}

template <std::size_t N>
double max_abs(const Field<N>& f) {
  double m = 0.0;
  for (double x : f.values()) m = std::max(m, std::abs(x));
  return m;
}

// ---------------------------------------------------------------------------
// Reductions

/// Neumaier-compensated sum in index order.
inline double compensated_sum(std::span<const double> xs) {
  double s = 0.0;
  double c = 0.0;
  for (double x : xs) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  return s + c;
}

/// Integral over the torus of one component: sum of values times cell volume.
inline double integrate(std::span<const double> values, const Grid& grid) {
  return compensated_sum(values) * grid.cell_volume();
}

inline double integrate(const ScalarField& f) { return integrate(f.component(0), *f.grid()); }

/// Euclidean inner product of all grid values (no cell-volume weight).
template <std::size_t N>
double dot(const Field<N>& a, const Field<N>& b) {
  a.check_same(b);
  std::vector<double> prod(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) prod[k] = a.values()[k] * b.values()[k];
  return compensated_sum(prod);
}

/// Discrete L2 norm: sqrt(sum |f|^2 dx^3).
template <std::size_t N>
double l2_norm(const Field<N>& f) {
  return std::sqrt(dot(f, f) * f.grid()->cell_volume());
}

template <std::size_t N>
std::array<double, N> means(const Field<N>& f) {
  std::array<double, N> out{};
  const double vol = std::pow(f.grid()->spec().length, 3);
  for (std::size_t c = 0; c < N; ++c) out[c] = integrate(f.component(c), *f.grid()) / vol;
  return out;
}

// ---------------------------------------------------------------------------
// Derivatives

/// out = d/dx_axis (in), periodic.
inline void partial(std::span<const double> in, std::size_t axis, std::span<double> out, const Grid& grid) {
  const std::size_t n = grid.n();
  const std::size_t stride = axis == 0 ? 1 : (axis == 1 ? n : n * n);
  const auto& taps = grid.taps();
  std::vector<double> line(2 * n);
  for (std::size_t hi = 0; hi < grid.cells(); hi += n * stride)
    for (std::size_t lo = 0; lo < stride; ++lo) {
      const std::size_t base = hi + lo;
      for (std::size_t p = 0; p < n; ++p) line[p] = line[p + n] = in[base + p * stride];
      for (std::size_t p = 0; p < n; ++p) {
        double s = 0.0;
        for (const auto& t : taps) s += t.weight * line[p + t.offset];
        out[base + p * stride] = s;
      }
    }
}

inline ScalarField partial(const ScalarField& f, std::size_t axis) {
  ScalarField out(f.grid());
  partial(f.component(0), axis, out.component(0), *f.grid());
  return out;
}

/// (grad v)_{ia} = d_a v_i
inline TensorField gradient(const VectorField& v) {
  TensorField out(v.grid());
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t a = 0; a < 3; ++a) partial(v.component(i), a, out.component(3 * i + a), *v.grid());
  return out;
}

/// (div T)_i = sum_a d_a T_{ia}
inline VectorField divergence_rows(const TensorField& t) {
  VectorField out(t.grid());
  std::vector<double> tmp(t.cells());
  for (std::size_t i = 0; i < 3; ++i) {
    auto o = out.component(i);
    for (std::size_t a = 0; a < 3; ++a) {
      partial(t.component(3 * i + a), a, tmp, *t.grid());
      for (std::size_t k = 0; k < tmp.size(); ++k) o[k] += tmp[k];
    }
  }
  return out;
}

/// (curl T)_{ig} = sum_{a,b} eps_{gab} d_a T_{ib}; zero iff every row of T is a discrete gradient.
inline TensorField curl_rows(const TensorField& t) {
  TensorField out(t.grid());
  std::vector<double> tmp(t.cells());
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b) {
        if (a == b) continue;
        partial(t.component(3 * i + b), a, tmp, *t.grid());
        for (std::size_t g = 0; g < 3; ++g) {
          const int e = levi_civita(static_cast<int>(g), static_cast<int>(a), static_cast<int>(b));
          if (e == 0) continue;
          auto o = out.component(3 * i + g);
          for (std::size_t k = 0; k < tmp.size(); ++k) o[k] += e * tmp[k];
        }
      }
  return out;
}

// ---------------------------------------------------------------------------
// Band-limited random fields

/// Real trigonometric polynomial with wavenumbers |k_a| <= modes in every component.
///
/// Coefficients decay like 1/(1+|k|^2) and the field is reproducible from `seed`.
/// With `zero_mean` the constant mode is omitted.
template <std::size_t N = 3>
Field<N> random_trig_field(const GridPtr& grid, std::uint64_t seed, int modes, double amplitude = 1.0,
                           bool zero_mean = false) {
  const int n = static_cast<int>(grid->n());
  if (modes < 0 || modes > n / 2 - 1) throw std::invalid_argument("modes must lie in [0, n/2 - 1]");
  Field<N> f(grid);
  Rng rng(seed);
  const double two_pi_over_l = 2.0 * std::numbers::pi / grid->spec().length;
  for (std::size_t c = 0; c < N; ++c) {
    auto comp = f.component(c);
    for (int k1 = -modes; k1 <= modes; ++k1)
      for (int k2 = -modes; k2 <= modes; ++k2)
        for (int k3 = -modes; k3 <= modes; ++k3) {
          const bool is_zero = k1 == 0 && k2 == 0 && k3 == 0;
          const double ca = rng.uniform(-1.0, 1.0);
          const double sa = rng.uniform(-1.0, 1.0);
          if (is_zero && zero_mean) continue;
          const double decay = amplitude / (1.0 + k1 * k1 + k2 * k2 + k3 * k3);
          for (std::size_t idx = 0; idx < grid->cells(); ++idx) {
            const auto x = grid->coordinates(idx);
            const double ph = two_pi_over_l * (k1 * x[0] + k2 * x[1] + k3 * x[2]);
            comp[idx] += decay * (ca * std::cos(ph) + (is_zero ? 0.0 : sa * std::sin(ph)));
          }
        }
  }
  return f;
}

/// Test directions theta: band-limited vector fields.
inline VectorField random_test_field(const GridPtr& grid, std::uint64_t seed, int modes) {
  return random_trig_field<3>(grid, seed, modes);
}

}  // namespace mmelas
