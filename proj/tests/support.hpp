#pragma once

#include <cmath>

#include "mmelas/mmelas.hpp"

namespace testing_support {

inline mmelas::Mat3 random_mat(mmelas::Rng& rng, double lo = -2.0, double hi = 2.0) {
  mmelas::Mat3 m;
  for (auto& e : m.a) e = rng.uniform(lo, hi);
  return m;
}

inline double max_entry_diff(const mmelas::Mat3& a, const mmelas::Mat3& b) {
  double m = 0.0;
  for (int k = 0; k < 9; ++k) m = std::max(m, std::abs(a.a[k] - b.a[k]));
  return m;
}

/// Relative discrete L2 distance |a - b| / |b|.
template <std::size_t N>
double rel_l2(const mmelas::Field<N>& a, const mmelas::Field<N>& b) {
  return mmelas::l2_norm(a - b) / std::max(1e-300, mmelas::l2_norm(b));
}

inline mmelas::InitialState perturbed_state(std::size_t n, double amplitude, double h, double length = 1.0,
                                            std::uint64_t seed = 1) {
  mmelas::InitialDataParams prm;
  prm.amplitude = amplitude;
  prm.seed = seed;
  return mmelas::make_initial_data(mmelas::Grid::make({n, length, mmelas::Flavor::spectral}), prm, h);
}

}  // namespace testing_support
