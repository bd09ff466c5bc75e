#pragma once

// Headline observables extracted from trajectories: burst metrics, power-law
// scaling fits, hyperbolic-tangent inversion fits and power maps.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "superrad/errors.hpp"
#include "superrad/trajectory.hpp"

namespace superrad::analysis {

struct BurstOptions {
  /// A burst must exceed this multiple of the post-burst baseline (mean of
  /// the last `baseline_fraction` of the samples after drive-off).
  double threshold_factor = 5.0;
  double baseline_fraction = 0.1;
  /// Samples in [drive_off, drive_off + settle_time) are skipped by the peak
  /// search (cavity ring-down of the drive field). Delay is still measured
  /// from drive-off.
  double settle_time = 0.0;
};

struct BurstMetrics {
  bool detected = false;
  double peak_intensity = 0.0;
  double peak_time = 0.0;
  double delay = 0.0;  // s, drive-off to peak
  double fwhm = 0.0;   // s
  double emitted_photons = 0.0;
  double baseline = 0.0;
};

/// Burst after `drive_off_time` in the sampled signal.
///
/// The peak is the global maximum at t >= drive_off_time (+ settle_time),
/// earliest on ties.
/// No burst is reported when the peak does not clear the noise floor or
/// when it sits on the first sample after drive-off (a monotone
/// free-induction decay has no delayed maximum). FWHM is measured by linear
/// interpolation of the half-maximum crossings.
BurstMetrics detect_burst(std::span<const double> times, std::span<const double> signal, double drive_off_time,
                          const BurstOptions& options = {});
BurstMetrics detect_burst(const Trajectory& trace, double drive_off_time, const BurstOptions& options = {});

struct ScalingPoint {
  double n = 0.0;
  double value = 0.0;
};

struct ScalingFit {
  double exponent = 0.0;
  double amplitude = 0.0;  // value ~ amplitude * n^exponent
  std::vector<double> residuals;  // log-space
  std::vector<ScalingPoint> points;
};

/// Least-squares line through (ln n, ln value).
ScalingFit fit_scaling(std::span<const ScalingPoint> points);

/// s(t) = offset - amplitude * tanh((t - t_d) / tau)
struct TanhFit {
  double t_d = 0.0;
  double tau = 0.0;
  double amplitude = 0.0;
  double offset = 0.0;
  double residual_rms = 0.0;
  double residual_max = 0.0;
  int iterations = 0;
  std::vector<double> residual_log;  // sum of squares after each accepted step
  double max_rate() const { return amplitude / tau; }
  double operator()(double t) const;
};

class FitFailure : public Error {
 public:
  FitFailure(const std::string& what, TanhFit initializer) : Error(what), initializer_(std::move(initializer)) {}
  const TanhFit& initializer() const noexcept { return initializer_; }

 private:
  TanhFit initializer_;
};

struct TanhOptions {
  int max_iterations = 200;
  double relative_tolerance = 1e-14;  // on the decrease of the squared residual
  double step_tolerance = 1e-12;      // on the scaled parameter step
};

/// Deterministic initial guess: t_d at the steepest descent of a centred
/// moving average (window n/40 samples), tau a quarter of the 10-90 %
/// transition span, offset and amplitude from the end levels.
TanhFit tanh_initializer(std::span<const double> times, std::span<const double> values);

/// Levenberg-Marquardt fit from tanh_initializer().
TanhFit fit_tanh(std::span<const double> times, std::span<const double> values, const TanhOptions& options = {});

/// Decay rate of an exponential, from a log-linear least-squares fit.
double fit_exponential_rate(std::span<const double> times, std::span<const double> values);

/// Rows are time samples, columns amplitudes, values |A|^2 (or the emitted
/// photon rate, see MapSignal).
struct PowerMap {
  std::vector<double> times;
  std::vector<double> amplitudes;
  std::vector<std::vector<double>> columns;  // columns[j][i] = |A|^2(t_i, amplitude_j)
  std::vector<double> post_pulse_s_z;
  std::vector<BurstMetrics> bursts;
  std::optional<double> threshold_amplitude;  // amplitude of maximal post-pulse inversion
  double drive_off_time = 0.0;

  double value(std::size_t time_index, std::size_t amplitude_index) const {
    return columns[amplitude_index][time_index];
  }
};

struct PowerRunInput {
  std::string label;  // used in alignment errors
  double amplitude = 0.0;
  double drive_off_time = 0.0;
  double post_pulse_s_z = 0.0;
  Trajectory trajectory;
};

/// Which trajectory column fills the map: the coherent field |A|^2 (the
/// mean-field picture) or the emitted photon rate (needed when the field
/// expectation vanishes, as for incoherent quantum emission).
enum class MapSignal { FieldIntensity, EmittedIntensity };

/// Merges runs into one grid sorted by amplitude. Throws AlignmentError
/// naming every run whose time grid differs from the first one.
PowerMap assemble_power_map(std::vector<PowerRunInput> runs, const BurstOptions& burst = {},
                            MapSignal signal = MapSignal::FieldIntensity);

void write_power_map_csv(std::ostream& out, const PowerMap& map);
PowerMap read_power_map_csv(std::istream& in);

/// Trapezoidal integral.
double integrate_trapezoid(std::span<const double> times, std::span<const double> values);

}  // namespace superrad::analysis
