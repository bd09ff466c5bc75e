#pragma once

// Physical parameters of the driven spin-ensemble/cavity system, the NV
// level structure and the fast-cavity parameter checks.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "superrad/units.hpp"

namespace superrad {

/// All rates and frequencies of the coupled system, in rad/s.
struct PhysicalParams {
  double g = 0.0;           // single-spin coupling
  double kappa = 1.0;       // cavity energy decay rate (FWHM of the cavity line)
  double kappa_out = 1.0;   // output-port fraction of kappa
  double gamma_perp = 0.0;  // transverse coherence decay rate (half the spin FWHM)
  double gamma_par = 0.0;   // longitudinal (population) relaxation rate
  double delta_c = 0.0;     // cavity - drive detuning
  std::int64_t n_spins = 1;
  std::optional<double> temperature;  // kelvin

  /// Throws ValidationError when an invariant is violated.
  void validate() const;

  double collective_coupling() const;

  bool operator==(const PhysicalParams&) const = default;
};

/// Single-spin coupling that keeps the collective coupling sqrt(N) g fixed
/// for an ensemble of `n_spins`. Used to represent a large ensemble by a
/// small one with the same collective physics.
double coupling_for_collective(double collective_coupling, std::int64_t n_spins);

struct PulseSegment {
  double duration = 0.0;  // s
  double eta = 0.0;       // drive amplitude, rad/s

  bool operator==(const PulseSegment&) const = default;
};

/// Piecewise-constant drive amplitude in the rotating frame.
struct PulseSequence {
  std::vector<PulseSegment> segments;

  static PulseSequence rectangular(double drive_duration, double eta, double release_duration);
  static PulseSequence free_decay(double duration);

  double total_duration() const;
  /// Start time of segment i.
  double segment_start(std::size_t i) const;
  /// End time of the last segment with non-zero drive, 0 if there is none.
  double drive_off_time() const;
  double max_amplitude() const;

  void validate() const;

  bool operator==(const PulseSequence&) const = default;
};

/// Cavity-enhanced single spin emission rate on resonance, 4 g^2 / kappa.
double purcell_rate(double g, double kappa);

/// One inequality kappa > x of the fast-cavity hierarchy.
struct HierarchyCheck {
  std::string name;
  double value = 0.0;   // rad/s
  double margin = 0.0;  // kappa / value, +inf for value == 0
  bool satisfied = false;
};

struct ValidationReport {
  double kappa = 0.0;
  std::vector<HierarchyCheck> checks;
  bool passed = false;

  const HierarchyCheck& tightest() const;
};

/// Compares kappa against the collective coupling, the spin rates and the
/// drive-induced rotation rate. Returns a report; never throws for a valid
/// but violated hierarchy.
ValidationReport validate_fast_cavity(const PhysicalParams& params, double collective_coupling,
                                      double rabi_rate);

// --- NV level structure ---------------------------------------------------

using Vec3 = std::array<double, 3>;

struct NVLevelModel {
  double d_zfs = kTwoPi * 2.878e9;  // zero-field splitting, rad/s
  double mu = kTwoPi * 28e9;        // gyromagnetic ratio, rad/s per tesla
  std::array<Vec3, 4> axes = default_axes();

  static std::array<Vec3, 4> default_axes();
};

/// Projection of the unit field direction on each of the four NV axes,
/// in the order of NVLevelModel::axes.
std::array<double, 4> zeeman_projections(const Vec3& field_direction,
                                         const NVLevelModel& model = {});

struct ResonanceField {
  double field = 0.0;  // tesla
  int count = 0;       // number of sub-ensembles brought into resonance
};

/// Field magnitudes along `direction` that tune the upper NV transition
/// (m_s = 0 <-> +1) into resonance with a cavity at `cavity_freq` (rad/s).
/// Sorted by increasing field.
std::vector<ResonanceField> resonance_fields(const Vec3& direction, double cavity_freq,
                                             const NVLevelModel& model = {});

/// Boltzmann population of m_s = 0 over the {0, D, D} spin-1 manifold.
double thermal_ground_population(double temperature, double d_zfs);

}  // namespace superrad
