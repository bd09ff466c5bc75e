#pragma once

// Scenario configuration: a JSON document mapping one-to-one onto the
// physical parameters, pulse, spectrum and sweep axes of a run. All
// frequencies are ordinary frequencies in Hz, durations in seconds. The
// structs below keep the config units so that emit -> parse is exact;
// conversion to rad/s happens in the to_*() helpers.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "superrad/model_core.hpp"
#include "superrad/semiclassical_engine.hpp"
#include "superrad/spectral.hpp"

namespace superrad {

enum class EngineKind { Exact, Dicke, Semiclassical };

EngineKind parse_engine(std::string_view tag);
std::string to_string(EngineKind engine);

struct PhysicsConfig {
  double collective_coupling_hz = 0.0;  // sqrt(N) g / 2pi
  double kappa_hz = 1e6;                // cavity FWHM
  double kappa_out = 1.0;
  double gamma_perp_fwhm_hz = 0.0;      // homogeneous spin linewidth (FWHM)
  double gamma_par_hz = 0.0;
  double delta_c_hz = 0.0;
  std::int64_t n_spins = 1;
  std::optional<double> temperature_k;
  bool operator==(const PhysicsConfig&) const = default;
};

struct SegmentConfig {
  double duration_s = 0.0;
  double eta_hz = 0.0;
  bool operator==(const SegmentConfig&) const = default;
};

struct SpectrumConfig {
  LineShape shape = LineShape::Gaussian;
  double fwhm_hz = 0.0;
  int n_bins = 101;
  // Per-sub-ensemble offset spacing for multiplicity sweeps: k sub-ensembles
  // sit at (i - (k - 1) / 2) * misalignment_hz, i = 0..k-1.
  double misalignment_hz = 0.0;
  bool operator==(const SpectrumConfig&) const = default;
};

struct SeedConfig {
  semiclassical::SeedPolicy policy = semiclassical::SeedPolicy::Deterministic;
  std::optional<std::uint64_t> value;
  bool operator==(const SeedConfig&) const = default;
};

struct SweepConfig {
  std::vector<double> amplitudes_hz;  // rectangular drive amplitude axis
  double drive_duration_s = 0.0;
  double release_duration_s = 0.0;
  std::vector<int> multiplicities;  // ensemble multiplicity axis (1N, 2N, ...)
  bool operator==(const SweepConfig&) const = default;
};

struct AnalysisConfig {
  bool fit_tanh = false;
  double burst_threshold = 5.0;
  double baseline_fraction = 0.1;
  std::string scaling_metric = "peak";  // peak | integral
  double settle_time_s = 0.0;           // burst search starts this long after drive-off
  bool operator==(const AnalysisConfig&) const = default;
};

struct SolverConfig {
  double tolerance = 1e-9;
  int n_fock = 0;  // exact engine; 0 selects the coherent-drive default
  bool single_spin_purcell = true;
  bool require_fast_cavity = false;
  bool displaced_frame = false;  // exact engine, see exact::SolverOptions
  bool operator==(const SolverConfig&) const = default;
};

struct Scenario {
  std::string name;
  std::string description;
  EngineKind engine = EngineKind::Semiclassical;
  PhysicsConfig physics;
  std::vector<SegmentConfig> pulse;
  SpectrumConfig spectrum;
  semiclassical::InitialPole initial = semiclassical::InitialPole::Ground;
  SeedConfig seed;
  std::size_t n_samples = 1001;
  SweepConfig sweep;
  AnalysisConfig analysis;
  SolverConfig solver;
  bool operator==(const Scenario&) const = default;

  bool is_amplitude_sweep() const { return !sweep.amplitudes_hz.empty(); }
  bool is_multiplicity_sweep() const { return !sweep.multiplicities.empty(); }

  /// Engine-compatibility checks (drive forbidden for dicke, seed present for
  /// stochastic policies, ...). Throws ConfigError.
  void validate() const;
};

/// Physical parameters in rad/s for `multiplicity` sub-ensembles: N scales
/// by k and the collective coupling by sqrt(k) (g fixed).
PhysicalParams to_params(const Scenario& s, int multiplicity = 1);
PulseSequence to_pulse(const Scenario& s);
SpectralDistribution to_spectrum(const Scenario& s, int multiplicity = 1);

/// Strict parser: unknown keys, wrong types and malformed JSON raise
/// ConfigError naming the line or the field path.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);
std::string emit_scenario(const Scenario& s);

struct PresetInfo {
  std::string name;
  std::string description;
};

std::vector<PresetInfo> list_presets();
Scenario preset(std::string_view name);

}  // namespace superrad
