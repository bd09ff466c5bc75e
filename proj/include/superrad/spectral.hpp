#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "superrad/units.hpp"

namespace superrad {

enum class LineShape { Gaussian, Lorentzian, HyperfineTriplet };

LineShape parse_line_shape(std::string_view tag);
std::string to_string(LineShape shape);

/// Nitrogen-14 hyperfine splitting of the NV spin line.
inline constexpr double kNitrogenHyperfine = kTwoPi * 2.3e6;

struct SpectralBin {
  double detuning = 0.0;  // rad/s relative to the cavity
  double weight = 0.0;
};

/// Inhomogeneous broadening, discretised into weighted detuning bins.
struct SpectralDistribution {
  LineShape shape = LineShape::Gaussian;
  std::vector<SpectralBin> bins;

  double total_weight() const;
  double mean_detuning() const;
  double detuning_stddev() const;
  /// Gaussian-equivalent FWHM of the binned histogram, 2 sqrt(2 ln 2) sigma.
  double empirical_fwhm() const;
};

/// Equal-weight quantile bins of the given lineshape; `fwhm` in rad/s.
///
/// For the hyperfine triplet `fwhm` is the residual Gaussian width of each of
/// the three sub-lines at {-A, 0, +A}, A = `hyperfine`, and each sub-line gets
/// max(1, n_bins / 3) bins. A zero width collapses the Gaussian and
/// Lorentzian shapes to a single bin at zero detuning.
SpectralDistribution build_spectral_distribution(LineShape shape, double fwhm, int n_bins,
                                                 double hyperfine = kNitrogenHyperfine);

/// Places copies of `base` at each offset (rad/s), equal weight per copy.
/// Models several NV sub-ensembles whose lines do not coincide exactly.
SpectralDistribution superpose_offsets(const SpectralDistribution& base,
                                       const std::vector<double>& offsets);

}  // namespace superrad
