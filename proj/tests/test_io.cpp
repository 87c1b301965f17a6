#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "support.hpp"

using namespace mmelas;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mmelas_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::size_t error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return 0;
}

std::string error_text(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, MinimalUsesDefaults) {
  const RunConfig cfg = parse_config("[grid]\nn = 8\n[scheme]\nh = 0.01\nsteps = 4\n");
  EXPECT_EQ(cfg.grid.n, 8u);
  EXPECT_EQ(cfg.grid.length, 1.0);
  EXPECT_EQ(cfg.grid.flavor, Flavor::spectral);
  EXPECT_EQ(cfg.h, 0.01);
  EXPECT_EQ(cfg.steps, 4u);
  EXPECT_EQ(cfg.energy, PowerLawParams{});
  EXPECT_EQ(cfg.solver, SolverConfig{});
  EXPECT_EQ(cfg.output.directory, "out");
}

TEST(Config, FullRoundTrip) {
  const std::string text =
      "[grid]\nn = 6\nL = 2.5\nflavor = central\n"
      "[energy]\nc1 = 0.5\np = 3\nq = 2.5\nr = 2\n"
      "[scheme]\nh = 0.005\nsteps = 3\ngamma = 0.01\nM0 = 20\ncoefficient = pointwise\n"
      "[solver]\nmode = penalty\ngrad_tol = 1e-8\nmu0 = 0.001\nnesterov = false\ninit_perturbation = 0.1\n"
      "[initial]\namplitude = 0.1\nseed = 9\nmodes = 2\nvelocity_amplitude = 0.01\n"
      "[diagnostics]\nel_test_fields = 6\n"
      "[output]\ndirectory = somewhere\ncadence = 2\ndump_Z = false\n";
  const RunConfig cfg = parse_config(text);
  EXPECT_EQ(cfg.grid.flavor, Flavor::central);
  EXPECT_EQ(cfg.grid.length, 2.5);
  EXPECT_EQ(cfg.energy.p, 3.0);
  EXPECT_EQ(cfg.coefficient, CofactorCoefficient::pointwise);
  EXPECT_EQ(cfg.solver.mode, ConstraintMode::penalty);
  ASSERT_TRUE(cfg.solver.mu0.has_value());
  EXPECT_EQ(*cfg.solver.mu0, 0.001);
  EXPECT_FALSE(cfg.solver.nesterov);
  EXPECT_EQ(cfg.initial.seed, 9u);
  EXPECT_EQ(cfg.el_test_fields, 6u);
  EXPECT_FALSE(cfg.output.dump_Z);
  const std::string s = serialize_config(cfg);
  const RunConfig again = parse_config(s);
  EXPECT_EQ(again, cfg);
  EXPECT_EQ(serialize_config(again), s);
}

TEST(Config, SerializeIsExactForAwkwardDoubles) {
  RunConfig cfg = parse_config("[grid]\nn = 4\n[scheme]\nh = 0.1\nsteps = 1\n");
  cfg.h = 0.1 + 0.2;
  cfg.energy.c1 = 1.0 / 3.0;
  EXPECT_EQ(parse_config(serialize_config(cfg)), cfg);
}

TEST(Config, ErrorsAreLinePrecise) {
  EXPECT_EQ(error_line("[grid]\nn = 8\nbogus = 1\n[scheme]\nh = 0.01\nsteps = 1\n"), 3u);
  EXPECT_EQ(error_line("[grid]\nn = 8\n[nope]\n"), 3u);
  EXPECT_EQ(error_line("[grid]\nn = 7\n[scheme]\nh = 0.01\nsteps = 1\n"), 2u);
  EXPECT_EQ(error_line("[grid]\nn = 512\n"), 2u);
  EXPECT_EQ(error_line("[grid]\nn = 8\n[scheme]\nh = -1\nsteps = 1\n"), 4u);
  EXPECT_EQ(error_line("[grid]\nn = 8\n[scheme]\nh = abc\nsteps = 1\n"), 4u);
  EXPECT_EQ(error_line("[grid]\nn = 8\nn = 8\n"), 3u);
  EXPECT_EQ(error_line("n = 8\n"), 1u);
  EXPECT_EQ(error_line("[grid\n"), 1u);
  EXPECT_EQ(error_line("[grid]\njunk\n"), 2u);
  EXPECT_EQ(error_line("[grid]\nn = 8\n[scheme]\nh = 0.01\nsteps = 1\n[initial]\nmodes = 4\n"), 7u);
  EXPECT_EQ(error_line("[grid]\nn = 8\n[scheme]\nh = 0.01\nsteps = 1\n[solver]\nmode = fast\n"), 7u);
  EXPECT_EQ(error_line("[grid]\nn = 8\n[scheme]\nh = 0.01\nsteps = 1\n[output]\ndump_v = maybe\n"), 7u);
  EXPECT_EQ(error_line("[grid]\nn = 8\n[scheme]\nh = 0.01\n"), 0u);
  EXPECT_NE(error_text("[grid]\nn = 8\n[scheme]\nh = 0.01\n").find("steps"), std::string::npos);
}

TEST(Config, CoercivityExponentsCiteHypothesis) {
  const std::string text = "[grid]\nn = 8\n[scheme]\nh = 0.01\nsteps = 1\n[energy]\nr = 1.5\n";
  EXPECT_EQ(error_text(text), "line 7: key 'r' = 1.5 violates r >= 2 (H2 coercivity requires q, r >= 2)");
  EXPECT_NE(error_text("[energy]\nq = 1\n").find("H2"), std::string::npos);
  EXPECT_EQ(error_line("[energy]\np = 2\n"), 2u);
}

TEST(Config, MFieldResolvedAgainstBaseDir) {
  const fs::path dir = fresh_dir("mfield");
  const auto g = Grid::make({4, 1.0, Flavor::spectral});
  save_dump(dir / "m.mmd", ScalarField(g, 12.0), "M", 0);
  const std::string text = "[grid]\nn = 4\n[scheme]\nh = 0.01\nsteps = 1\nM_field = m.mmd\n";
  const RunConfig cfg = parse_config(text, dir);
  EXPECT_EQ(fs::path(cfg.M_field), (dir / "m.mmd").lexically_normal());
  const TrajectoryConfig tc = to_trajectory_config(cfg);
  ASSERT_TRUE(tc.initial.M_field.has_value());
  EXPECT_EQ(max_abs(*tc.initial.M_field), 12.0);
  EXPECT_THROW(parse_config(text, dir / "elsewhere"), ConfigError);
  fs::remove_all(dir);
}

TEST(Config, LoadMissingFile) { EXPECT_THROW(load_config("/nonexistent/x.cfg"), ConfigError); }

TEST(Dump, LayoutAndSize) {
  const auto g = Grid::make({4, 1.5, Flavor::central});
  TensorField f(g);
  for (std::size_t k = 0; k < f.size(); ++k) f.values()[k] = double(k);
  const auto bytes = write_dump(f, "F", 3);
  const std::size_t header = 8 + 4 + 1 + 1 + 1 + 8 + 8 + 8 + 8;
  ASSERT_EQ(bytes.size(), header + 9 * 64 * 8);
  EXPECT_EQ(std::string(reinterpret_cast<const char*>(bytes.data()), 7), "MMELAS1");
  EXPECT_EQ(bytes[7], 0);
  EXPECT_EQ(bytes[8], 1);
  EXPECT_EQ(bytes[12], 'F');
  EXPECT_EQ(bytes[13], 2);
  EXPECT_EQ(bytes[14], 1);
  std::uint64_t payload = 0;
  for (int b = 7; b >= 0; --b) payload = (payload << 8) | bytes[header - 8 + b];
  EXPECT_EQ(payload, 9u * 64u * 8u);
  double second = 0.0;
  std::memcpy(&second, bytes.data() + header + 8, 8);
  EXPECT_EQ(second, 1.0);
  const RawDump d = read_dump(bytes);
  EXPECT_EQ(d.header.name, "F");
  EXPECT_EQ(d.header.rank, 2);
  EXPECT_EQ(d.header.n, 4u);
  EXPECT_EQ(d.header.length, 1.5);
  EXPECT_EQ(d.header.flavor, Flavor::central);
  EXPECT_EQ(d.header.step, 3u);
  EXPECT_EQ(d.header.payload_bytes, 9u * 64u * 8u);
  EXPECT_EQ(max_abs(dump_to_field<9>(d) - f), 0.0);
}

TEST(Dump, RoundTripIsBitExact) {
  const auto g = Grid::make({6, 1.0, Flavor::spectral});
  VectorField v = random_trig_field<3>(g, 1, 2);
  v(0, 0) = -0.0;
  v(1, 1) = std::numeric_limits<double>::denorm_min();
  v(2, 2) = std::numeric_limits<double>::quiet_NaN();
  const VectorField back = dump_to_field<3>(read_dump(write_dump(v, "v", 0)), g);
  EXPECT_EQ(std::memcmp(back.values().data(), v.values().data(), v.size() * 8), 0);
}

TEST(Dump, RejectsCorruption) {
  const auto g = Grid::make({4, 1.0, Flavor::spectral});
  auto bytes = write_dump(ScalarField(g, 1.0), "w", 0);
  auto kind_of = [](std::vector<unsigned char> b) {
    try {
      read_dump(b);
    } catch (const DumpError& e) {
      return int(e.kind());
    }
    return -1;
  };
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_EQ(kind_of(bad_magic), int(DumpError::Kind::magic));
  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_EQ(kind_of(truncated), int(DumpError::Kind::truncated));
  EXPECT_EQ(kind_of(std::vector<unsigned char>(bytes.begin(), bytes.begin() + 10)), int(DumpError::Kind::truncated));
  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_EQ(kind_of(trailing), int(DumpError::Kind::shape));
  auto bad_rank = bytes;
  bad_rank[13] = 7;
  EXPECT_EQ(kind_of(bad_rank), int(DumpError::Kind::shape));
  EXPECT_THROW(dump_to_field<3>(read_dump(bytes)), DumpError);
  EXPECT_THROW(dump_to_field<1>(read_dump(bytes), Grid::make({6, 1.0, Flavor::spectral})), DumpError);
  EXPECT_THROW(load_dump("/nonexistent/file.mmd"), DumpError);
}

TEST(Dump, FileNames) {
  EXPECT_EQ(dump_file_name("F", 3), "F_000003.mmd");
  EXPECT_EQ(dump_file_name("w", 123456), "w_123456.mmd");
}

TEST(Ledger, HeaderOrder) {
  const auto names = ledger_column_names();
  ASSERT_EQ(names.size(), 40u);
  EXPECT_EQ(names.front(), "step");
  EXPECT_EQ(names[1], "time");
  EXPECT_EQ(names[5], "mean_v1");
  EXPECT_EQ(names[8], "mean_F11");
  EXPECT_EQ(names[17], "mean_Z11");
  EXPECT_EQ(names.back(), "converged");
  EXPECT_EQ(ledger_header().substr(0, 40), "step,time,objective,energy,comparison_bo");
}

TEST(Ledger, RoundTripIsExact) {
  DiagnosticsRow a;
  a.step = 0;
  a.energy = 1.0 / 3.0;
  a.mean_F[4] = 0.1 + 0.2;
  DiagnosticsRow b;
  b.step = 7;
  b.time = 0.07;
  b.objective = -1e-300;
  b.drift_Z = std::numeric_limits<double>::infinity();
  b.min_slack = -std::numeric_limits<double>::infinity();
  b.iterations = 123;
  b.kkt_flag = 1;
  b.converged = 0;
  const std::string text = format_ledger({a, b});
  const DiagnosticsLedger back = parse_ledger(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(format_ledger(back), text);
  EXPECT_EQ(back[0].energy, a.energy);
  EXPECT_TRUE(std::isnan(back[0].objective));
  EXPECT_EQ(back[1].objective, -1e-300);
  EXPECT_EQ(back[1].iterations, 123u);
  EXPECT_NE(text.find(",nan,"), std::string::npos);
  EXPECT_NE(text.find("0.33333333333333331"), std::string::npos);
}

TEST(Ledger, RejectsMalformed) {
  EXPECT_THROW(parse_ledger("step,time\n1,2\n"), LedgerError);
  const std::string h = ledger_header() + "\n";
  EXPECT_THROW(parse_ledger(h + "1,2,3\n"), LedgerError);
  std::string row = format_ledger_row(DiagnosticsRow{});
  row[0] = 'x';
  EXPECT_THROW(parse_ledger(h + row + "\n"), LedgerError);
  EXPECT_THROW(ledger_value(DiagnosticsRow{}, "nope"), LedgerError);
}

class RunDirectory : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fresh_dir(::testing::UnitTest::GetInstance()->current_test_info()->name());
    cfg_ = parse_config("[grid]\nn = 6\n[scheme]\nh = 0.01\nsteps = 3\n[initial]\nvelocity_amplitude = 0.02\n");
    cfg_.output.directory = dir_.string();
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
  RunConfig cfg_;
};

TEST_F(RunDirectory, WritesEverything) {
  std::size_t rows = 0;
  const Trajectory t = execute_run(cfg_, [&](const DiagnosticsRow&) { ++rows; });
  EXPECT_EQ(rows, 4u);
  for (const char* f : {"run.cfg", "ledger.csv", "M.mmd"}) EXPECT_TRUE(fs::exists(dir_ / f)) << f;
  for (std::size_t j = 0; j <= 3; ++j)
    for (const char* name : {"v", "F", "Z", "w"}) EXPECT_TRUE(fs::exists(dir_ / dump_file_name(name, j)));
  EXPECT_EQ(load_config(dir_ / "run.cfg"), cfg_);
  const auto ledger = read_ledger((dir_ / "ledger.csv").string());
  EXPECT_EQ(format_ledger(ledger), format_ledger(t.ledger));
  const VectorField v3 = dump_to_field<3>(load_dump(dir_ / dump_file_name("v", 3)));
  EXPECT_EQ(max_abs(v3 - t.final_state.v0), 0.0);
}

TEST_F(RunDirectory, Cadence) {
  cfg_.output.cadence = 2;
  cfg_.output.dump_Z = false;
  execute_run(cfg_);
  EXPECT_TRUE(fs::exists(dir_ / "v_000000.mmd"));
  EXPECT_FALSE(fs::exists(dir_ / "v_000001.mmd"));
  EXPECT_TRUE(fs::exists(dir_ / "v_000002.mmd"));
  EXPECT_TRUE(fs::exists(dir_ / "v_000003.mmd"));
  EXPECT_FALSE(fs::exists(dir_ / "Z_000000.mmd"));
  EXPECT_THROW(audit_directory(dir_), AuditInputError);
}

TEST_F(RunDirectory, AuditPasses) {
  execute_run(cfg_);
  const AuditReport rep = audit_directory(dir_);
  EXPECT_TRUE(rep.all_pass());
  EXPECT_EQ(rep.steps_audited, 4u);
  for (const auto& c : rep.checks) EXPECT_TRUE(c.pass) << c.name << ": " << c.detail;
  const auto led = std::find_if(rep.checks.begin(), rep.checks.end(),
                                [](const AuditCheck& c) { return c.name == "ledger_state_diagnostics"; });
  ASSERT_NE(led, rep.checks.end());
  EXPECT_EQ(led->max_error, 0.0);
}

TEST_F(RunDirectory, AuditDetectsTampering) {
  execute_run(cfg_);
  auto ledger = read_ledger((dir_ / "ledger.csv").string());
  ledger[2].energy *= 1.0 + 1e-9;
  write_ledger((dir_ / "ledger.csv").string(), ledger);
  EXPECT_FALSE(audit_directory(dir_).all_pass());

  execute_run(cfg_);
  VectorField v = dump_to_field<3>(load_dump(dir_ / "v_000002.mmd"));
  v(0, 5) += 1e-6;
  save_dump(dir_ / "v_000002.mmd", v, "v", 2);
  EXPECT_FALSE(audit_directory(dir_).all_pass());
}

TEST_F(RunDirectory, AuditMissingInputs) {
  execute_run(cfg_);
  fs::remove(dir_ / "F_000002.mmd");
  EXPECT_THROW(audit_directory(dir_), AuditInputError);
  fs::remove(dir_ / "ledger.csv");
  EXPECT_THROW(audit_directory(dir_), AuditInputError);
  EXPECT_THROW(audit_directory(dir_ / "missing"), AuditInputError);
}

TEST_F(RunDirectory, Deterministic) {
  execute_run(cfg_);
  const auto first = read_file(dir_ / "ledger.csv");
  const auto f3 = read_file(dir_ / "F_000003.mmd");
  execute_run(cfg_);
  EXPECT_EQ(read_file(dir_ / "ledger.csv"), first);
  EXPECT_EQ(read_file(dir_ / "F_000003.mmd"), f3);
}

TEST_F(RunDirectory, FailureWritesPartialLedger) {
  cfg_.solver.max_iterations = 1;
  cfg_.solver.max_outer = 1;
  EXPECT_THROW(execute_run(cfg_), SchemeError);
  const auto ledger = read_ledger((dir_ / "ledger.csv").string());
  EXPECT_EQ(ledger.size(), 1u);
}

TEST(Gradcheck, AllOraclesPass) {
  for (const auto& r : check_algebra_oracles(1000, 3)) EXPECT_TRUE(r.pass()) << r.name << " " << r.max_error;
  const EnergySpec spec = power_law_energy({});
  GradcheckOptions opt;
  EXPECT_TRUE(check_dphi(opt).pass());
  EXPECT_TRUE(check_energy_gradient(spec, opt).pass());
  EXPECT_TRUE(check_chain_rule(spec, opt).pass());
}

TEST(Gradcheck, DetectsWrongGradient) {
  EnergySpec spec = power_law_energy({});
  const auto good = spec.gradient;
  spec.gradient = [good](const StateTriple& s, bool ext) {
    EnergyGradient g = good(s, ext);
    g.dw *= 1.01;
    return g;
  };
  EXPECT_FALSE(check_energy_gradient(spec, {}).pass());
  EXPECT_FALSE(check_chain_rule(spec, {}).pass());
}
