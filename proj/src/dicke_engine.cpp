#include "superrad/dicke_engine.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>

#include "superrad/errors.hpp"
#include "superrad/ode.hpp"

namespace superrad::dicke {

namespace {

// Numerical positivity bound, the ladder analogue of the density-matrix
// eigenvalue tolerance.
constexpr double kPopulationSlack = 1e-8;

void require_spins(std::int64_t n_spins) {
  if (n_spins < 1) throw ValidationError("dicke engine: n_spins must be >= 1");
  if (n_spins > 10'000'000) throw CapacityError("dicke engine: ladder of " + std::to_string(n_spins) + " spins is too large");
}

}  // namespace

LadderState LadderState::inverted(std::int64_t n_spins) {
  require_spins(n_spins);
  LadderState s;
  s.n_spins = n_spins;
  s.populations.assign(static_cast<std::size_t>(n_spins) + 1, 0.0);
  s.populations.front() = 1.0;
  return s;
}

LadderState LadderState::ground(std::int64_t n_spins) {
  require_spins(n_spins);
  LadderState s;
  s.n_spins = n_spins;
  s.populations.assign(static_cast<std::size_t>(n_spins) + 1, 0.0);
  s.populations.back() = 1.0;
  return s;
}

double LadderState::total() const {
  double t = 0.0;
  for (double p : populations) t += p;
  return t;
}

void LadderState::validate() const {
  require_spins(n_spins);
  if (populations.size() != static_cast<std::size_t>(n_spins) + 1)
    throw ValidationError("ladder state must hold N + 1 populations");
  for (double p : populations)
    if (!(p >= -kPopulationSlack) || !std::isfinite(p))
      throw ValidationError("ladder populations must be non-negative");
  if (std::abs(total() - 1.0) > 1e-12) throw ValidationError("ladder populations must sum to 1");
}

CollectiveGenerator build_generator(const PhysicalParams& params, std::int64_t n_spins) {
  params.validate();
  require_spins(n_spins);
  CollectiveGenerator gen;
  gen.n_spins = n_spins;
  gen.purcell = purcell_rate(params.g, params.kappa);
  gen.gamma_par = params.gamma_par;
  const double j = 0.5 * static_cast<double>(n_spins);
  gen.rates.resize(static_cast<std::size_t>(n_spins) + 1);
  for (std::size_t k = 0; k < gen.rates.size(); ++k) {
    const double m = j - static_cast<double>(k);
    gen.rates[k] = gen.purcell * (j + m) * (j - m + 1.0) + gen.gamma_par * (j + m);
  }
  return gen;
}

Trajectory evolve_ladder(LadderState& state, const CollectiveGenerator& generator, const PhysicalParams& params,
                         std::span<const double> sample_times, const LadderOptions& options) {
  state.validate();
  if (state.n_spins != generator.n_spins) throw ValidationError("ladder state and generator disagree on N");
  if (sample_times.empty() || sample_times.front() != 0.0 || !(sample_times.back() > 0.0))
    throw ValidationError("evolve_ladder: sample grid must span [0, t] with t > 0");

  const auto n = static_cast<Eigen::Index>(state.populations.size());
  const double j = state.j();
  Eigen::VectorXd corr(n), mval(n), rates(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double m = j - static_cast<double>(k);
    mval[k] = m;
    corr[k] = (j + m) * (j - m + 1.0);
    rates[k] = generator.rates[static_cast<std::size_t>(k)];
  }
  const double out_rate = params.kappa_out * generator.purcell;
  const double photon_factor = 4.0 * params.g * params.g / (params.kappa * params.kappa);

  // Last component accumulates emitted photons.
  Eigen::VectorXd y(n + 1);
  y.head(n) = Eigen::Map<const Eigen::VectorXd>(state.populations.data(), n);
  y[n] = 0.0;

  auto rhs = [&](double, const Eigen::VectorXd& p, Eigen::VectorXd& dp) {
    const auto pops = p.head(n);
    auto d = dp.head(n);
    d = -rates.cwiseProduct(pops);
    d.tail(n - 1) += rates.head(n - 1).cwiseProduct(pops.head(n - 1));
    dp[n] = out_rate * corr.dot(pops);
  };

  Trajectory traj;
  traj.n_spins = static_cast<double>(state.n_spins);
  traj.reserve(sample_times.size());
  auto sample = [&](double t, const Eigen::VectorXd& p) {
    const auto pops = p.head(n);
    const double c = corr.dot(pops);
    traj.times.push_back(t);
    traj.s_x.push_back(0.0);
    traj.s_y.push_back(0.0);
    traj.s_z.push_back(mval.dot(pops));
    traj.spsm.push_back(c);
    traj.photons.push_back(photon_factor * c);
    traj.field.emplace_back(0.0, 0.0);
    traj.intensity.push_back(out_rate * c);
    traj.emitted.push_back(p[n]);
    traj.segment.push_back(0);
  };

  OdeOptions opt;
  opt.rtol = options.tolerance;
  opt.atol = options.tolerance;
  integrate_dopri5(rhs, y, 0.0, sample_times.back(), sample_times, opt, sample);

  // The integrator conserves the total exactly; populations may carry
  // tolerance-sized negative values, which LadderState::validate accepts.
  for (Eigen::Index k = 0; k < n; ++k) state.populations[static_cast<std::size_t>(k)] = y[k];
  return traj;
}

CorrelationSplit correlation_at(std::int64_t n_spins, double m) {
  require_spins(n_spins);
  const double j = 0.5 * static_cast<double>(n_spins);
  if (m > j || m < -j) throw DomainError("correlation_at: |m| must not exceed j");
  CorrelationSplit s;
  s.m = m;
  s.total = (j + m) * (j - m + 1.0);
  s.excitation = j + m;
  s.interference = s.total - s.excitation;
  return s;
}

CorrelationSplit peak_correlation(std::int64_t n_spins) {
  require_spins(n_spins);
  // (j + m)(j - m + 1) peaks at m = 1/2: reached exactly for odd N, and for
  // even N at m = 0 and m = 1 alike. Report the half-decayed state m = 0.
  const double m = (n_spins % 2 == 1) ? 0.5 : 0.0;
  return correlation_at(n_spins, m);
}

}  // namespace superrad::dicke
