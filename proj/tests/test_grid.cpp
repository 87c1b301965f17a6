#include <gtest/gtest.h>

#include <numbers>

#include "support.hpp"

using namespace mmelas;

namespace {

ScalarField sine_field(const GridPtr& g, int k, std::size_t axis) {
  ScalarField f(g);
  const double L = g->spec().length;
  for (std::size_t x = 0; x < g->cells(); ++x) f(0, x) = std::sin(2 * std::numbers::pi * k * g->coordinates(x)[axis] / L);
  return f;
}

double max_error_vs_cos(const ScalarField& d, int k, std::size_t axis, double factor) {
  const GridPtr& g = d.grid();
  const double L = g->spec().length;
  double err = 0.0;
  for (std::size_t x = 0; x < g->cells(); ++x)
    err = std::max(err, std::abs(d(0, x) - factor * std::cos(2 * std::numbers::pi * k * g->coordinates(x)[axis] / L)));
  return err;
}

}  // namespace

TEST(Grid, RejectsBadSizes) {
  EXPECT_THROW(Grid::make({3, 1.0, Flavor::spectral}), std::invalid_argument);
  EXPECT_THROW(Grid::make({7, 1.0, Flavor::spectral}), std::invalid_argument);
  EXPECT_THROW(Grid::make({8, 0.0, Flavor::spectral}), std::invalid_argument);
  EXPECT_NO_THROW(Grid::make({4, 1.0, Flavor::central}));
}

TEST(Grid, IndexIsX1Fastest) {
  const auto g = Grid::make({4, 2.0, Flavor::spectral});
  EXPECT_EQ(g->index(1, 0, 0), 1u);
  EXPECT_EQ(g->index(0, 1, 0), 4u);
  EXPECT_EQ(g->index(0, 0, 1), 16u);
  const auto c = g->coordinates(g->index(1, 2, 3));
  EXPECT_DOUBLE_EQ(c[0], 0.5);
  EXPECT_DOUBLE_EQ(c[1], 1.0);
  EXPECT_DOUBLE_EQ(c[2], 1.5);
}

TEST(SpectralDerivative, ExactOnResolvedModes) {
  for (double L : {1.0, 2.5}) {
    const auto g = Grid::make({8, L, Flavor::spectral});
    for (std::size_t axis = 0; axis < 3; ++axis)
      for (int k = 1; k <= 3; ++k) {
        const ScalarField d = partial(sine_field(g, k, axis), axis);
        EXPECT_LE(max_error_vs_cos(d, k, axis, 2 * std::numbers::pi * k / L), 1e-11 * k / L) << axis << ' ' << k;
      }
  }
}

TEST(CentralDerivative, SincFactor) {
  const auto g = Grid::make({8, 1.0, Flavor::central});
  const double dx = g->spacing();
  for (int k = 1; k <= 3; ++k) {
    const double factor = std::sin(2 * std::numbers::pi * k * dx) / dx;
    EXPECT_LE(max_error_vs_cos(partial(sine_field(g, k, 1), 1), k, 1, factor), 1e-12);
  }
}

TEST(CentralDerivative, SecondOrder) {
  double prev = 0.0;
  for (std::size_t n : {8u, 16u, 32u}) {
    const auto g = Grid::make({n, 1.0, Flavor::central});
    const double err = max_error_vs_cos(partial(sine_field(g, 1, 0), 0), 1, 0, 2 * std::numbers::pi);
    if (prev > 0.0) {
      EXPECT_NEAR(prev / err, 4.0, 0.2);
    }
    prev = err;
  }
}

TEST(Derivatives, SummationByParts) {
  for (Flavor fl : {Flavor::spectral, Flavor::central}) {
    const auto g = Grid::make({8, 1.3, fl});
    const auto f = random_trig_field<1>(g, 1, 3);
    const auto h = random_trig_field<1>(g, 2, 3);
    for (std::size_t a = 0; a < 3; ++a) {
      const double lhs = dot(partial(f, a), h);
      const double rhs = -dot(f, partial(h, a));
      EXPECT_NEAR(lhs, rhs, 1e-11 * (1 + std::abs(lhs)));
    }
  }
}

TEST(Derivatives, Commute) {
  for (Flavor fl : {Flavor::spectral, Flavor::central}) {
    const auto g = Grid::make({8, 1.0, fl});
    const auto f = random_trig_field<1>(g, 5, 3);
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b)
        EXPECT_LE(max_abs(partial(partial(f, a), b) - partial(partial(f, b), a)), 1e-10);
  }
}

TEST(Derivatives, CurlOfGradientVanishes) {
  for (Flavor fl : {Flavor::spectral, Flavor::central}) {
    const auto g = Grid::make({8, 1.0, fl});
    const auto u = random_trig_field<3>(g, 6, 3);
    EXPECT_LE(max_abs(curl_rows(gradient(u))), 1e-11);
  }
}

TEST(Derivatives, ConstantsAreAnnihilated) {
  const auto g = Grid::make({6, 1.0, Flavor::spectral});
  const ScalarField c(g, 3.5);
  for (std::size_t a = 0; a < 3; ++a) EXPECT_LE(max_abs(partial(c, a)), 1e-12);
}

TEST(Fourier, ProjectionIsDivergenceFreeAndKeepsMeans) {
  for (Flavor fl : {Flavor::spectral, Flavor::central}) {
    const auto g = Grid::make({8, 1.0, fl});
    auto t = random_trig_field<9>(g, 7, 3);
    const TensorField p = project_divergence_free_rows(t);
    EXPECT_LE(max_abs(divergence_rows(p)), 1e-11);
    const auto m0 = means(t);
    const auto m1 = means(p);
    for (std::size_t c = 0; c < 9; ++c) EXPECT_NEAR(m0[c], m1[c], 1e-13);
    // idempotent
    EXPECT_LE(max_abs(project_divergence_free_rows(p) - p), 1e-12);
  }
}

TEST(Fourier, InvertGradient) {
  for (Flavor fl : {Flavor::spectral, Flavor::central}) {
    const auto g = Grid::make({8, 2.0, fl});
    const auto u = random_trig_field<3>(g, 8, 3, 1.0, true);
    EXPECT_LE(max_abs(invert_gradient(gradient(u)) - u), 1e-12);
  }
}

TEST(Reductions, IntegralsAndMeans) {
  const auto g = Grid::make({4, 2.0, Flavor::spectral});
  EXPECT_DOUBLE_EQ(integrate(ScalarField(g, 1.5)), 1.5 * 8.0);
  const auto u = random_trig_field<3>(g, 9, 1, 1.0, true);
  for (double m : means(u)) EXPECT_NEAR(m, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(l2_norm(ScalarField(g, 2.0)), 2.0 * std::sqrt(8.0));
}

TEST(Reductions, CompensatedSum) {
  const std::vector<double> xs{1e16, 1.0, -1e16, 1.0};
  EXPECT_EQ(compensated_sum(xs), 2.0);
}

TEST(RandomFields, ReproducibleAndBandLimited) {
  const auto g = Grid::make({8, 1.0, Flavor::spectral});
  const auto a = random_trig_field<3>(g, 42, 2);
  const auto b = random_trig_field<3>(g, 42, 2);
  EXPECT_EQ(max_abs(a - b), 0.0);
  EXPECT_GT(max_abs(a - random_trig_field<3>(g, 43, 2)), 0.0);
  EXPECT_THROW(random_trig_field<3>(g, 1, 4), std::invalid_argument);
}

TEST(Fields, ShapeMismatch) {
  const auto g4 = Grid::make({4, 1.0, Flavor::spectral});
  const auto g6 = Grid::make({6, 1.0, Flavor::spectral});
  ScalarField a(g4);
  const ScalarField b(g6);
  EXPECT_THROW(a += b, ShapeError);
  // distinct grid objects with equal specs are compatible
  EXPECT_NO_THROW(a += ScalarField(Grid::make({4, 1.0, Flavor::spectral})));
}
