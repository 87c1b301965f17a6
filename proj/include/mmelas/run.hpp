#pragma once

/**
 * @file run.hpp
 *
 * @brief Executes a configured run and writes its output directory:
 *
 *   run.cfg           canonical configuration actually used
 *   ledger.csv        diagnostics, one row per step (step 0 included)
 *   M.mmd             distortion bound field
 *   v_000000.mmd ...  per-step dumps of v, F, Z, w at the output cadence
 */

#include <filesystem>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>

#include "mmelas/config.hpp"
#include "mmelas/dump.hpp"
#include "mmelas/ledger.hpp"
#include "mmelas/stepper.hpp"

namespace mmelas {

inline bool dump_due(std::size_t step, std::size_t steps, std::size_t cadence) {
  return step == 0 || step == steps || step % cadence == 0;
}

inline void write_state_dumps(const std::filesystem::path& dir, const OutputConfig& out, std::size_t step,
                              const InitialState& s) {
  if (out.dump_v) save_dump(dir / dump_file_name("v", step), s.v0, "v", step);
  if (out.dump_F) save_dump(dir / dump_file_name("F", step), s.F0, "F", step);
  if (out.dump_Z) save_dump(dir / dump_file_name("Z", step), s.Z0, "Z", step);
  if (out.dump_w) save_dump(dir / dump_file_name("w", step), s.w0, "w", step);
}

using ProgressFn = std::function<void(const DiagnosticsRow&)>;

/// Runs the scheme and writes the output directory. On failure the partial ledger is still written.
inline Trajectory execute_run(const RunConfig& cfg, const ProgressFn& progress = {}) {
  const std::filesystem::path dir(cfg.output.directory);
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "run.cfg", std::ios::binary | std::ios::trunc);
    f << serialize_config(cfg);
    if (!f) throw std::runtime_error("cannot write " + (dir / "run.cfg").string());
  }
  const TrajectoryConfig tc = to_trajectory_config(cfg);
  const GridPtr grid = Grid::make(tc.grid);
  InitialState init = make_initial_data(grid, tc.initial, tc.h, tc.gamma, tc.coefficient);
  save_dump(dir / "M.mmd", init.M, "M", 0);

  const auto observer = [&](std::size_t step, const InitialState& s) {
    if (dump_due(step, cfg.steps, cfg.output.cadence)) write_state_dumps(dir, cfg.output, step, s);
  };
  try {
    Trajectory t = run_scheme(tc, std::move(init), observer);
    write_ledger((dir / "ledger.csv").string(), t.ledger);
    if (progress)
      for (const auto& row : t.ledger) progress(row);
    return t;
  } catch (const SchemeError& e) {
    write_ledger((dir / "ledger.csv").string(), e.partial_ledger);
    throw;
  }
}

}  // namespace mmelas
