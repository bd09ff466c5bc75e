#pragma once

// Runs a Scenario end to end: engine runs (parallel over sweep points),
// analysis, then data files, fit reports and a metadata sidecar written
// atomically into an output directory.
//
// Data files and report.json depend only on (scenario, seed) and are
// byte-identical across re-runs; wall-clock information lives only in
// metadata.json.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "superrad/analysis.hpp"
#include "superrad/model_core.hpp"
#include "superrad/scenario.hpp"
#include "superrad/trajectory.hpp"

namespace superrad {

struct RunOptions {
  unsigned jobs = 0;  // 0: hardware concurrency
  std::optional<std::uint64_t> seed_override;
};

/// Semiclassical discretisation check: the same run at twice the spectral
/// bins, compared by the peak of the burst signal after drive-off.
struct BinConvergence {
  int bins = 0;
  int doubled_bins = 0;
  double peak = 0.0;
  double doubled_peak = 0.0;
  double relative_change = 0.0;
  bool converged = false;  // relative_change < 1%
};

/// One engine run of a scenario.
struct RunRecord {
  std::string label;
  int multiplicity = 1;
  double amplitude = 0.0;  // rad/s
  double n_spins = 0.0;
  double drive_off_time = 0.0;
  double post_pulse_s_z = 0.0;
  semiclassical::TippingSeed seed;
  Trajectory trajectory;
  analysis::BurstMetrics burst;
  std::optional<analysis::TanhFit> tanh;  // s_z after drive-off, when requested
  std::string tanh_error;                 // non-fatal fit failure
  std::optional<BinConvergence> bin_check;  // semiclassical runs with more than one bin
};

/// Everything a run produces, before anything touches the disk.
struct RunArtifacts {
  Scenario scenario;  // with the seed override applied
  ValidationReport fast_cavity;
  std::vector<RunRecord> runs;
  std::optional<analysis::ScalingFit> scaling;
  std::optional<analysis::PowerMap> power_map;
  /// Data files and report.json: name -> content, in write order.
  std::vector<std::pair<std::string, std::string>> files;
  /// metadata.json content (the only file carrying a timestamp).
  std::string metadata;
};

/// Runs the engines and the analysis. Throws on validation or solver errors
/// (with the scenario name in the message); never writes files.
RunArtifacts execute_scenario(const Scenario& scenario, const RunOptions& options = {});

/// Stages every data file and metadata.json in `out_dir`, then renames them
/// into place. On failure the staged files are removed. Returns the paths
/// written.
std::vector<std::filesystem::path> write_artifacts(const RunArtifacts& artifacts, const std::filesystem::path& out_dir);

/// Observable used for bursts and scaling: |A|^2 for the mean-field engine,
/// the emitted photon rate otherwise.
std::vector<double> burst_signal(EngineKind engine, const Trajectory& trajectory);

}  // namespace superrad
