#pragma once

// Mean-field (Maxwell-Bloch) dynamics of a spectrally binned spin ensemble
// with the cavity adiabatically eliminated.
//
// Bloch frame: the spin phase is chosen so the eliminated drive reads
// -(2 g eta / kappa) sum sigma_x, which makes the inversion obey
//   dS_z/dt = -(4 g eta / kappa) S_y - gamma_par (S_z + N/2) - (4 g^2 / kappa) <S+S->
// with <S+S-> given by closure_correlation(). In this frame the adiabatic
// field is A = (eta + i g S-) / (kappa/2 + i delta_c).
//
// Per bin k (sigma- = (s_x - i s_y) / 2, Gamma_1 = gamma_par + Gamma_P):
//   d sigma-/dt = -(i Delta_k + gamma_perp + Gamma_1 / 2) sigma- - i g A s_z
//   d s_z/dt    = -4 g Im(A sigma+) - Gamma_1 (s_z + 1)
// The single-spin Purcell channel Gamma_P supplies the excitation part of
// <S+S->, which a factorised mean field does not contain.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "superrad/analysis.hpp"
#include "superrad/model_core.hpp"
#include "superrad/spectral.hpp"
#include "superrad/trajectory.hpp"

namespace superrad::semiclassical {

struct BlochBin {
  double weight = 0.0;
  double detuning = 0.0;  // rad/s
  double s_x = 0.0;
  double s_y = 0.0;
  double s_z = -1.0;

  double norm() const;
};

struct BlochBins {
  std::vector<BlochBin> bins;
  double n_spins = 1.0;
  double g = 0.0;

  /// Collective lowering amplitude S- = sum_k N w_k sigma-_k.
  std::complex<double> collective_lowering() const;
  double s_z() const;
  void validate() const;
};

enum class SeedPolicy { None, Deterministic, Stochastic };

SeedPolicy parse_seed_policy(std::string_view tag);
std::string to_string(SeedPolicy policy);

struct TippingSeed {
  double theta = 0.0;  // polar tilt away from the pole, rad
  double phase = 0.0;  // azimuth, rad
};

/// Initial tilt standing in for vacuum/thermal fluctuations.
///
/// Deterministic: theta = 2 / sqrt(N), phase 0. Stochastic: theta^2 is drawn
/// from an exponential distribution with mean 4 / N and the phase uniformly,
/// from a generator seeded with `seed` (required).
TippingSeed seed_tipping(double n_spins, SeedPolicy policy, std::optional<std::uint64_t> seed = std::nullopt);

enum class InitialPole { Ground, Inverted };

/// Every bin starts at the chosen pole, tilted by `seed`.
BlochBins make_bins(const SpectralDistribution& spectrum, double n_spins, double g, InitialPole pole,
                    const TippingSeed& seed);

/// <S+S-> ~= |S-|^2 + sum_k N w_k (1 + s_z,k) / 2.
struct ClosureSplit {
  double total = 0.0;
  double interference = 0.0;
  double excitation = 0.0;
};
ClosureSplit closure_correlation(const BlochBins& bins);

/// Adiabatic cavity amplitude for drive `eta`.
std::complex<double> adiabatic_field(const BlochBins& bins, double eta, const PhysicalParams& params);

/// Right-hand side of the inversion equation above, evaluated from
/// collective quantities (used to check trajectories).
double inversion_rate(double s_y, double s_z, double spsm, double eta, const PhysicalParams& params);

struct MeanFieldOptions {
  double tolerance = 1e-9;
  bool single_spin_purcell = true;
  double norm_limit = 1.0 + 1e-6;
};

/// Integrates through every segment of `pulse`, sampling on `sample_times`
/// (ascending, from 0 to pulse.total_duration()). `bins` holds the final state on
/// return. Throws ClosureInstabilityError when a Bloch vector exceeds
/// `norm_limit`.
///
/// Trajectory columns: s_x, s_y, s_z collective; spsm = closure value;
/// field = A; photons = |A|^2 + incoherent Purcell photons; intensity =
/// kappa_out (kappa |A|^2 + Gamma_P N_exc).
Trajectory integrate_mean_field(BlochBins& bins, const PulseSequence& pulse, const PhysicalParams& params,
                                std::span<const double> sample_times, const MeanFieldOptions& options = {});

/// Fixed-amplitude sweep of a rectangular pulse followed by free decay.
struct SweepScenario {
  PhysicalParams params;
  SpectralDistribution spectrum;
  double drive_duration = 50e-9;
  double release_duration = 2e-6;
  std::size_t n_samples = 2001;
  TippingSeed seed;
  MeanFieldOptions options;
};

struct SweepRun {
  double amplitude = 0.0;
  double drive_off_time = 0.0;
  double post_pulse_s_z = 0.0;  // <S_z> at drive-off
  Trajectory trajectory;
};

/// Runs one simulation per amplitude; results in amplitude order of the
/// input. `threads` = 0 uses the available hardware concurrency.
std::vector<SweepRun> run_power_sweep(const SweepScenario& scenario, std::span<const double> amplitudes,
                                      unsigned threads = 0);

/// run_power_sweep() merged into a time x amplitude map of |A|^2, annotated
/// with the inversion-maximizing amplitude.
analysis::PowerMap power_sweep(const SweepScenario& scenario, std::span<const double> amplitudes,
                               unsigned threads = 0, const analysis::BurstOptions& burst = {});

}  // namespace superrad::semiclassical
