#include <gtest/gtest.h>

#include "support.hpp"

using namespace mmelas;

namespace {

TrajectoryConfig small_config(std::size_t n, double amplitude, double h, std::size_t steps) {
  TrajectoryConfig cfg;
  cfg.grid = {n, 1.0, Flavor::spectral};
  cfg.h = h;
  cfg.steps = steps;
  cfg.initial.amplitude = amplitude;
  return cfg;
}

}  // namespace

TEST(InitialData, ZeroAmplitudeIsIdentity) {
  InitialDataParams prm;
  prm.amplitude = 0.0;
  const auto init = make_initial_data(Grid::make({4, 1.0, Flavor::spectral}), prm, 0.01);
  for (std::size_t x = 0; x < init.grid->cells(); ++x) {
    EXPECT_EQ(testing_support::max_entry_diff(mat_at(init.F0, x), Mat3::identity()), 0.0);
    EXPECT_EQ(init.w0(0, x), 1.0);
  }
  EXPECT_EQ(max_abs(init.v0), 0.0);
}

TEST(InitialData, ConsistentAndCurlFree) {
  const auto init = testing_support::perturbed_state(8, 0.05, 0.01);
  const auto [dz, dw] = consistency_drift(init.F0, init.Z0, init.w0);
  EXPECT_EQ(dz, 0.0);
  EXPECT_EQ(dw, 0.0);
  EXPECT_LE(max_abs(curl_rows(init.F0)), 1e-12);
  const auto m = means(init.F0);
  for (std::size_t c = 0; c < 9; ++c) EXPECT_NEAR(m[c], c % 4 == 0 ? 1.0 : 0.0, 1e-14);
  const auto u = make_displacement(init.grid, 1, 1);
  EXPECT_NEAR(max_abs(gradient(u)), 1.0, 1e-14);
}

TEST(InitialData, Reproducible) {
  const auto a = testing_support::perturbed_state(6, 0.05, 0.01, 1.0, 5);
  const auto b = testing_support::perturbed_state(6, 0.05, 0.01, 1.0, 5);
  const auto c = testing_support::perturbed_state(6, 0.05, 0.01, 1.0, 6);
  EXPECT_EQ(max_abs(a.F0 - b.F0), 0.0);
  EXPECT_GT(max_abs(a.F0 - c.F0), 0.0);
}

TEST(InitialData, RejectsBadData) {
  InitialDataParams prm;
  prm.amplitude = 10.0;
  const auto g = Grid::make({6, 1.0, Flavor::spectral});
  EXPECT_THROW(make_initial_data(g, prm, 0.01), InitialDataError);
  prm.amplitude = 0.05;
  prm.M0 = 5.0;
  EXPECT_THROW(make_initial_data(g, prm, 0.01), InitialDataError);
  prm.M0 = 10.0;
  prm.M_field = ScalarField(Grid::make({4, 1.0, Flavor::spectral}), 10.0);
  EXPECT_THROW(make_initial_data(g, prm, 0.01), ShapeError);
  prm.M_field = ScalarField(g, 10.0);
  EXPECT_NO_THROW(make_initial_data(g, prm, 0.01));
}

TEST(ConsistencyDrift, MeasuresDefect) {
  const auto init = testing_support::perturbed_state(4, 0.0, 0.01, 2.0);
  TensorField z = init.Z0;
  for (double& x : z.values()) x += 1.0;
  const auto [dz, dw] = consistency_drift(init.F0, z, init.w0);
  EXPECT_NEAR(dz, 3.0 * std::pow(2.0, 1.5), 1e-12);
  EXPECT_EQ(dw, 0.0);
}

TEST(Deformation, Identity) {
  const auto init = testing_support::perturbed_state(4, 0.0, 0.01);
  const Deformation d = reconstruct_deformation(init.F0);
  EXPECT_EQ(testing_support::max_entry_diff(d.mean_gradient, Mat3::identity()), 0.0);
  EXPECT_LE(max_abs(d.periodic), 1e-15);
  const auto y = d.at(5);
  const auto x = init.grid->coordinates(5);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(y[i], x[i], 1e-15);
}

TEST(Deformation, RecoversDisplacement) {
  for (Flavor fl : {Flavor::spectral, Flavor::central}) {
    const auto g = Grid::make({8, 1.0, fl});
    const VectorField u = random_trig_field<3>(g, 4, 2, 0.1, true);
    TensorField f = gradient(u);
    for (std::size_t x = 0; x < g->cells(); ++x)
      for (std::size_t i = 0; i < 3; ++i) f(4 * i, x) += 1.0;
    const Deformation d = reconstruct_deformation(f);
    EXPECT_LE(max_abs(d.periodic - u), 1e-12);
    EXPECT_LE(testing_support::max_entry_diff(d.mean_gradient, Mat3::identity()), 1e-15);
  }
}

TEST(Deformation, RejectsCurl) {
  const auto init = testing_support::perturbed_state(6, 0.05, 0.01);
  TensorField f = init.F0;
  const auto g = init.grid;
  for (std::size_t x = 0; x < g->cells(); ++x) f(1, x) += 0.01 * std::sin(2 * std::numbers::pi * g->coordinates(x)[2]);
  EXPECT_THROW(reconstruct_deformation(f), DeformationError);
}

TEST(Scheme, RestStateIsStationary) {
  const auto t = run_scheme(small_config(4, 0.0, 0.01, 5));
  ASSERT_EQ(t.ledger.size(), 6u);
  for (const auto& row : t.ledger) {
    EXPECT_NEAR(row.energy, 31.0, 1e-10);
    EXPECT_LE(row.drift_Z, 1e-12);
    EXPECT_LE(row.drift_w, 1e-12);
    for (double m : row.mean_v) EXPECT_LE(std::abs(m), 1e-12);
  }
  EXPECT_LE(max_abs(t.final_state.v0), 1e-9);
}

TEST(Scheme, LedgerAndConservation) {
  auto cfg = small_config(6, 0.05, 0.01, 4);
  cfg.initial.velocity_amplitude = 0.05;
  std::vector<std::size_t> seen;
  const auto t = run_scheme(cfg, [&](std::size_t j, const InitialState&) { seen.push_back(j); });
  EXPECT_EQ(seen, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  ASSERT_EQ(t.ledger.size(), 5u);
  const auto& r0 = t.ledger.front();
  EXPECT_TRUE(std::isnan(r0.objective));
  EXPECT_TRUE(std::isnan(r0.el_residual));
  for (std::size_t j = 1; j < t.ledger.size(); ++j) {
    const auto& r = t.ledger[j];
    EXPECT_EQ(r.step, j);
    EXPECT_DOUBLE_EQ(r.time, 0.01 * double(j));
    EXPECT_EQ(r.converged, 1);
    EXPECT_DOUBLE_EQ(r.comparison_bound, t.ledger[j - 1].energy);
    EXPECT_LE(r.objective, r.comparison_bound * (1 + 1e-12));
    EXPECT_LE(r.curl_change, 1e-12);
    EXPECT_LE(r.div_Z_change, 1e-12);
    EXPECT_GT(r.min_slack, 0.0);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(r.mean_v[i], r0.mean_v[i], 1e-13);
    for (std::size_t k = 0; k < 9; ++k) {
      EXPECT_NEAR(r.mean_F[k], r0.mean_F[k], 1e-13);
      EXPECT_NEAR(r.mean_Z[k], r0.mean_Z[k], 1e-13);
    }
    EXPECT_NEAR(r.mean_w, r0.mean_w, 1e-13);
  }
}

TEST(Scheme, OneStepDriftIsSecondOrder) {
  std::vector<double> dz;
  std::vector<double> dw;
  for (double h : {0.02, 0.01, 0.005}) {
    const auto t = run_scheme(small_config(8, 0.05, h, 1));
    dz.push_back(t.ledger[1].drift_Z);
    dw.push_back(t.ledger[1].drift_w);
  }
  for (std::size_t k = 0; k + 1 < dz.size(); ++k) {
    EXPECT_GE(dz[k] / dz[k + 1], 2.8) << dz[k] << " " << dz[k + 1];
    EXPECT_GE(dw[k] / dw[k + 1], 2.8) << dw[k] << " " << dw[k + 1];
  }
}

TEST(Scheme, FailureCarriesPartialLedger) {
  auto cfg = small_config(6, 0.05, 0.01, 3);
  cfg.solver.max_iterations = 1;
  cfg.solver.max_outer = 1;
  try {
    run_scheme(cfg);
    FAIL() << "expected SchemeError";
  } catch (const SchemeError& e) {
    EXPECT_EQ(e.partial_ledger.size(), 1u);
    EXPECT_NE(std::string(e.what()).find("step 1"), std::string::npos);
  }
}

TEST(Scheme, Deterministic) {
  const auto a = run_scheme(small_config(6, 0.05, 0.01, 2));
  const auto b = run_scheme(small_config(6, 0.05, 0.01, 2));
  EXPECT_EQ(max_abs(a.final_state.v0 - b.final_state.v0), 0.0);
  EXPECT_EQ(a.ledger.back().energy, b.ledger.back().energy);
}
