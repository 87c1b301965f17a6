#pragma once

/**
 * @file fourier.hpp
 *
 * @brief Fourier-space operations on grid fields, backed by FFTW: projection
 * of tensor rows onto discretely divergence-free fields and inversion of the
 * discrete gradient on zero-mean fields.
 *
 * All operators use the exact Fourier symbol of the grid's derivative flavor,
 * so results are consistent with `partial` to rounding.
 */

#include <fftw3.h>

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "mmelas/grid.hpp"

namespace mmelas {

/// Owning wrapper of a pair of FFTW plans for one grid size. Not thread-safe to construct.
class FourierTransform {
 public:
  explicit FourierTransform(std::size_t n) : n_(n), size_(n * n * n), buffer_(size_) {
    auto* buf = reinterpret_cast<fftw_complex*>(buffer_.data());
    const int ni = static_cast<int>(n);
    fwd_ = fftw_plan_dft_3d(ni, ni, ni, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_3d(ni, ni, ni, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;
  ~FourierTransform() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }

  /// Unnormalized forward DFT of a real component. Index layout matches the grid (x1 fastest).
  std::vector<std::complex<double>> forward(std::span<const double> x) {
    for (std::size_t k = 0; k < size_; ++k) buffer_[k] = {x[k], 0.0};
    fftw_execute(fwd_);
    return buffer_;
  }

  /// Inverse DFT normalized by 1/n^3; returns the real part.
  std::vector<double> backward(std::span<const std::complex<double>> xh) {
    for (std::size_t k = 0; k < size_; ++k) buffer_[k] = xh[k];
    fftw_execute(bwd_);
    std::vector<double> out(size_);
    const double scale = 1.0 / static_cast<double>(size_);
    for (std::size_t k = 0; k < size_; ++k) out[k] = buffer_[k].real() * scale;
    return out;
  }

  [[nodiscard]] std::size_t n() const { return n_; }

 private:
  std::size_t n_;
  std::size_t size_;
  std::vector<std::complex<double>> buffer_;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

namespace detail {
/// Per-axis derivative symbols s_a(k) for every flat Fourier index.
inline std::vector<std::array<double, 3>> symbols(const Grid& grid) {
  const std::size_t n = grid.n();
  std::vector<std::array<double, 3>> s(grid.cells());
  for (std::size_t idx = 0; idx < grid.cells(); ++idx) {
    s[idx] = {grid.symbol(static_cast<long>(idx % n)), grid.symbol(static_cast<long>((idx / n) % n)),
              grid.symbol(static_cast<long>(idx / (n * n)))};
  }
  return s;
}
}  // namespace detail

/// Removes the discrete-gradient part of every row of T, keeping row means.
/// The result satisfies divergence_rows(result) = 0 to rounding.
inline TensorField project_divergence_free_rows(const TensorField& t) {
  const Grid& grid = *t.grid();
  FourierTransform fft(grid.n());
  const auto sym = detail::symbols(grid);
  TensorField out(t.grid());
  for (std::size_t i = 0; i < 3; ++i) {
    std::array<std::vector<std::complex<double>>, 3> hat;
    for (std::size_t a = 0; a < 3; ++a) hat[a] = fft.forward(t.component(3 * i + a));
    for (std::size_t k = 0; k < grid.cells(); ++k) {
      const auto& s = sym[k];
      const double s2 = s[0] * s[0] + s[1] * s[1] + s[2] * s[2];
      if (s2 == 0.0) continue;
      const std::complex<double> d = s[0] * hat[0][k] + s[1] * hat[1][k] + s[2] * hat[2][k];
      for (std::size_t a = 0; a < 3; ++a) hat[a][k] -= s[a] * d / s2;
    }
    for (std::size_t a = 0; a < 3; ++a) {
      const auto back = fft.backward(hat[a]);
      std::copy(back.begin(), back.end(), out.component(3 * i + a).begin());
    }
  }
  return out;
}

/// Least-squares inverse of `gradient`: the zero-mean y with gradient(y) closest to T.
/// Exact when T is a discrete gradient of a periodic field.
inline VectorField invert_gradient(const TensorField& t) {
  const Grid& grid = *t.grid();
  FourierTransform fft(grid.n());
  const auto sym = detail::symbols(grid);
  VectorField y(t.grid());
  const std::complex<double> minus_i{0.0, -1.0};
  for (std::size_t i = 0; i < 3; ++i) {
    std::vector<std::complex<double>> yhat(grid.cells());
    for (std::size_t a = 0; a < 3; ++a) {
      const auto hat = fft.forward(t.component(3 * i + a));
      for (std::size_t k = 0; k < grid.cells(); ++k) yhat[k] += minus_i * sym[k][a] * hat[k];
    }
    for (std::size_t k = 0; k < grid.cells(); ++k) {
      const auto& s = sym[k];
      const double s2 = s[0] * s[0] + s[1] * s[1] + s[2] * s[2];
      yhat[k] = s2 == 0.0 ? std::complex<double>{} : yhat[k] / s2;
    }
    const auto back = fft.backward(yhat);
    std::copy(back.begin(), back.end(), y.component(i).begin());
  }
  return y;
}

}  // namespace mmelas
