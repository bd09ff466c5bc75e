#include "superrad/spectral.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>

#include "superrad/errors.hpp"

namespace superrad {

namespace {

const double kFwhmPerSigma = 2.0 * std::sqrt(2.0 * std::numbers::ln2);

std::vector<double> unit_quantiles(int n) {
  std::vector<double> u(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) u[static_cast<std::size_t>(k)] = (k + 0.5) / n;
  return u;
}

std::vector<SpectralBin> gaussian_bins(double fwhm, int n, double center) {
  if (fwhm == 0.0) return {{center, 1.0}};
  const boost::math::normal_distribution<double> unit;
  const double sigma = fwhm / kFwhmPerSigma;
  std::vector<SpectralBin> out;
  for (double u : unit_quantiles(n)) out.push_back({center + sigma * boost::math::quantile(unit, u), 1.0 / n});
  return out;
}

std::vector<SpectralBin> lorentzian_bins(double fwhm, int n) {
  if (fwhm == 0.0) return {{0.0, 1.0}};
  std::vector<SpectralBin> out;
  for (double u : unit_quantiles(n))
    out.push_back({0.5 * fwhm * std::tan(std::numbers::pi * (u - 0.5)), 1.0 / n});
  return out;
}

void remove_mean(std::vector<SpectralBin>& bins) {
  double mean = 0.0;
  for (const auto& b : bins) mean += b.weight * b.detuning;
  for (auto& b : bins) b.detuning -= mean;
}

}  // namespace

LineShape parse_line_shape(std::string_view tag) {
  if (tag == "gaussian") return LineShape::Gaussian;
  if (tag == "lorentzian") return LineShape::Lorentzian;
  if (tag == "hyperfine-triplet") return LineShape::HyperfineTriplet;
  throw UnsupportedShapeError("unsupported line shape '" + std::string(tag) + "'");
}

std::string to_string(LineShape shape) {
  switch (shape) {
    case LineShape::Gaussian: return "gaussian";
    case LineShape::Lorentzian: return "lorentzian";
    case LineShape::HyperfineTriplet: return "hyperfine-triplet";
  }
  return "gaussian";
}

double SpectralDistribution::total_weight() const {
  double w = 0.0;
  for (const auto& b : bins) w += b.weight;
  return w;
}

double SpectralDistribution::mean_detuning() const {
  double m = 0.0;
  for (const auto& b : bins) m += b.weight * b.detuning;
  return m / total_weight();
}

double SpectralDistribution::detuning_stddev() const {
  const double m = mean_detuning();
  double v = 0.0;
  for (const auto& b : bins) v += b.weight * (b.detuning - m) * (b.detuning - m);
  return std::sqrt(v / total_weight());
}

double SpectralDistribution::empirical_fwhm() const { return kFwhmPerSigma * detuning_stddev(); }

SpectralDistribution build_spectral_distribution(LineShape shape, double fwhm, int n_bins,
                                                 double hyperfine) {
  if (!(fwhm >= 0.0) || !std::isfinite(fwhm)) throw ValidationError("spectral fwhm must be >= 0");
  if (n_bins < 1) throw ValidationError("spectral n_bins must be >= 1");

  SpectralDistribution d;
  d.shape = shape;
  switch (shape) {
    case LineShape::Gaussian:
      d.bins = gaussian_bins(fwhm, n_bins, 0.0);
      break;
    case LineShape::Lorentzian:
      d.bins = lorentzian_bins(fwhm, n_bins);
      break;
    case LineShape::HyperfineTriplet: {
      const int per_line = std::max(1, n_bins / 3);
      for (double center : {-hyperfine, 0.0, hyperfine}) {
        for (auto b : gaussian_bins(fwhm, per_line, center)) {
          b.weight /= 3.0;
          d.bins.push_back(b);
        }
      }
      break;
    }
  }
  if (d.bins.size() > 1) remove_mean(d.bins);
  return d;
}

SpectralDistribution superpose_offsets(const SpectralDistribution& base,
                                       const std::vector<double>& offsets) {
  if (offsets.empty()) return base;
  SpectralDistribution d;
  d.shape = base.shape;
  const double w = 1.0 / static_cast<double>(offsets.size());
  for (double off : offsets)
    for (const auto& b : base.bins) d.bins.push_back({b.detuning + off, b.weight * w});
  return d;
}

}  // namespace superrad
