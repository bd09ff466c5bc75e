#pragma once

// Permutation-symmetric decay on the maximal Dicke shell j = N/2 with the
// cavity adiabatically eliminated. The collective loss term
// (4 g^2 / kappa) D[S-] reduces on |j, m> to a classical rate equation,
//   dp_m/dt = -G_m p_m + G_{m+1} p_{m+1},  G_m = Gamma_P (j + m)(j - m + 1).
// Only the maximal shell is kept; dephasing that leaks into inner shells is
// handled by the semiclassical engine instead.

#include <cstdint>
#include <span>
#include <vector>

#include "superrad/model_core.hpp"
#include "superrad/trajectory.hpp"

namespace superrad::dicke {

/// Populations on |j, m>, index k = 0..N for m = j - k.
struct LadderState {
  std::int64_t n_spins = 1;
  std::vector<double> populations;

  static LadderState inverted(std::int64_t n_spins);
  static LadderState ground(std::int64_t n_spins);

  double j() const { return 0.5 * static_cast<double>(n_spins); }
  double m(std::size_t k) const { return j() - static_cast<double>(k); }
  double total() const;
  /// Populations >= -1e-8 (integration round-off) and summing to 1 within
  /// 1e-12.
  void validate() const;
};

struct CollectiveGenerator {
  std::int64_t n_spins = 1;
  double purcell = 0.0;    // Gamma_P = 4 g^2 / kappa
  double gamma_par = 0.0;
  /// rates[k]: transition rate out of m = j - k towards m - 1. rates[N] = 0.
  std::vector<double> rates;
};

/// Collective ladder rates. The optional longitudinal term adds gamma_par
/// times the excitation number (j + m) to each downward step, which keeps
/// the total excitation-loss rate of independent relaxation but ignores the
/// leakage out of the symmetric shell.
CollectiveGenerator build_generator(const PhysicalParams& params, std::int64_t n_spins);

struct LadderOptions {
  double tolerance = 1e-9;
};

/// Integrates the ladder over `sample_times` (ascending from 0). Outputs
/// <S_z>, <S+S->, adiabatic photon number (4 g^2/kappa^2)<S+S->, and
/// intensity = kappa_out Gamma_P <S+S->. `state` holds the final populations
/// on return.
Trajectory evolve_ladder(LadderState& state, const CollectiveGenerator& generator,
                         const PhysicalParams& params, std::span<const double> sample_times,
                         const LadderOptions& options = {});

/// <S+S-> on |j, m> split into the excitation sum (number of excited spins,
/// j + m) and the interference sum over i != j pairs.
struct CorrelationSplit {
  double m = 0.0;
  double total = 0.0;
  double excitation = 0.0;
  double interference = 0.0;
};

CorrelationSplit correlation_at(std::int64_t n_spins, double m);

/// Maximum of (j + m)(j - m + 1) over the ladder, with its split.
CorrelationSplit peak_correlation(std::int64_t n_spins);

}  // namespace superrad::dicke
