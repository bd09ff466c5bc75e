#include "superrad/semiclassical_engine.hpp"

#include <Eigen/Core>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "superrad/errors.hpp"
#include "superrad/ode.hpp"

namespace superrad::semiclassical {

namespace {

using Complex = std::complex<double>;
constexpr Complex kI{0.0, 1.0};

double single_spin_purcell(const PhysicalParams& p) {
  return p.g * p.g * p.kappa / (0.25 * p.kappa * p.kappa + p.delta_c * p.delta_c);
}

void check_consistent(const BlochBins& bins, const PhysicalParams& params) {
  if (bins.g != params.g || bins.n_spins != static_cast<double>(params.n_spins))
    throw ValidationError("Bloch bins and physical parameters disagree on g or N");
}

}  // namespace

double BlochBin::norm() const { return std::sqrt(s_x * s_x + s_y * s_y + s_z * s_z); }

Complex BlochBins::collective_lowering() const {
  Complex s = 0.0;
  for (const auto& b : bins) s += n_spins * b.weight * 0.5 * Complex(b.s_x, -b.s_y);
  return s;
}

double BlochBins::s_z() const {
  double s = 0.0;
  for (const auto& b : bins) s += 0.5 * n_spins * b.weight * b.s_z;
  return s;
}

void BlochBins::validate() const {
  if (bins.empty()) throw ValidationError("Bloch bins are empty");
  if (!(n_spins >= 1.0)) throw ValidationError("Bloch bins: N must be >= 1");
  double w = 0.0;
  for (const auto& b : bins) {
    if (!(b.weight >= 0.0) || !std::isfinite(b.detuning)) throw ValidationError("Bloch bins: bad weight or detuning");
    if (b.norm() > 1.0 + 1e-9) throw ValidationError("Bloch bins: vector outside the unit ball");
    w += b.weight;
  }
  if (std::abs(w - 1.0) > 1e-12) throw ValidationError("Bloch bins: weights must sum to 1");
}

SeedPolicy parse_seed_policy(std::string_view tag) {
  if (tag == "none") return SeedPolicy::None;
  if (tag == "deterministic") return SeedPolicy::Deterministic;
  if (tag == "stochastic") return SeedPolicy::Stochastic;
  throw UnknownPolicyError("unknown seed policy '" + std::string(tag) + "'");
}

std::string to_string(SeedPolicy policy) {
  switch (policy) {
    case SeedPolicy::None: return "none";
    case SeedPolicy::Deterministic: return "deterministic";
    case SeedPolicy::Stochastic: return "stochastic";
  }
  return "none";
}

TippingSeed seed_tipping(double n_spins, SeedPolicy policy, std::optional<std::uint64_t> seed) {
  if (!(n_spins >= 1.0)) throw ValidationError("seed_tipping: N must be >= 1");
  switch (policy) {
    case SeedPolicy::None:
      return {};
    case SeedPolicy::Deterministic:
      return {2.0 / std::sqrt(n_spins), 0.0};
    case SeedPolicy::Stochastic: {
      if (!seed) throw ValidationError("seed_tipping: stochastic policy needs a seed");
      std::mt19937_64 rng(*seed);
      // Draw from raw engine output so the sequence does not depend on the
      // standard library's distribution implementations.
      const double u1 = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
      const double u2 = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
      const double theta_sq = -std::log(u1) * 4.0 / n_spins;
      return {std::sqrt(theta_sq), 2.0 * std::numbers::pi * u2};
    }
  }
  throw UnknownPolicyError("unknown seed policy");
}

BlochBins make_bins(const SpectralDistribution& spectrum, double n_spins, double g, InitialPole pole,
                    const TippingSeed& seed) {
  BlochBins out;
  out.n_spins = n_spins;
  out.g = g;
  const double polar = pole == InitialPole::Inverted ? seed.theta : std::numbers::pi - seed.theta;
  const double sx = std::sin(polar) * std::cos(seed.phase);
  const double sy = std::sin(polar) * std::sin(seed.phase);
  const double sz = std::cos(polar);
  for (const auto& b : spectrum.bins) out.bins.push_back({b.weight, b.detuning, sx, sy, sz});
  out.validate();
  return out;
}

ClosureSplit closure_correlation(const BlochBins& bins) {
  ClosureSplit c;
  c.interference = std::norm(bins.collective_lowering());
  for (const auto& b : bins.bins) c.excitation += bins.n_spins * b.weight * 0.5 * (1.0 + b.s_z);
  c.total = c.interference + c.excitation;
  return c;
}

Complex adiabatic_field(const BlochBins& bins, double eta, const PhysicalParams& params) {
  return (eta + kI * params.g * bins.collective_lowering()) / Complex(0.5 * params.kappa, params.delta_c);
}

double inversion_rate(double s_y, double s_z, double spsm, double eta, const PhysicalParams& params) {
  const double n = static_cast<double>(params.n_spins);
  return -(4.0 * params.g * eta / params.kappa) * s_y - params.gamma_par * (s_z + 0.5 * n) -
         purcell_rate(params.g, params.kappa) * spsm;
}

Trajectory integrate_mean_field(BlochBins& bins, const PulseSequence& pulse, const PhysicalParams& params,
                                std::span<const double> sample_times, const MeanFieldOptions& options) {
  params.validate();
  pulse.validate();
  bins.validate();
  check_consistent(bins, params);
  if (sample_times.empty() || sample_times.front() != 0.0)
    throw ValidationError("integrate_mean_field: sample grid must start at t = 0");

  const auto k_bins = static_cast<Eigen::Index>(bins.bins.size());
  Eigen::VectorXd nw(k_bins), det(k_bins);
  for (Eigen::Index k = 0; k < k_bins; ++k) {
    nw[k] = bins.n_spins * bins.bins[static_cast<std::size_t>(k)].weight;
    det[k] = bins.bins[static_cast<std::size_t>(k)].detuning;
  }
  const double g = params.g;
  const double purcell = options.single_spin_purcell ? single_spin_purcell(params) : 0.0;
  const double gamma1 = params.gamma_par + purcell;
  const double coherence_decay = params.gamma_perp + 0.5 * gamma1;
  const Complex cavity_pole(0.5 * params.kappa, params.delta_c);
  const double out_frac = params.kappa_out;

  // Layout: [s_x(0..K), s_y(0..K), s_z(0..K), emitted].
  Eigen::VectorXd y(3 * k_bins + 1);
  for (Eigen::Index k = 0; k < k_bins; ++k) {
    const auto& b = bins.bins[static_cast<std::size_t>(k)];
    y[k] = b.s_x;
    y[k_bins + k] = b.s_y;
    y[2 * k_bins + k] = b.s_z;
  }
  y[3 * k_bins] = 0.0;

  auto lowering = [&](const Eigen::VectorXd& s) {
    // S- = sum N w (s_x - i s_y) / 2
    return Complex(0.5 * nw.dot(s.segment(0, k_bins)), -0.5 * nw.dot(s.segment(k_bins, k_bins)));
  };
  auto excitations = [&](const Eigen::VectorXd& s) {
    return 0.5 * (nw.sum() + nw.dot(s.segment(2 * k_bins, k_bins)));
  };

  double eta = 0.0;
  auto rhs = [&](double, const Eigen::VectorXd& s, Eigen::VectorXd& ds) {
    const Complex a = (eta + kI * g * lowering(s)) / cavity_pole;
    const auto sx = s.segment(0, k_bins);
    const auto sy = s.segment(k_bins, k_bins);
    const auto sz = s.segment(2 * k_bins, k_bins);
    // sigma- = (sx - i sy)/2; d sigma- = -(i Delta + c) sigma- - i g A sz
    // => d sx = 2 Re(.), d sy = -2 Im(.)
    const double ar = a.real(), ai = a.imag();
    // -i g A sz = g sz (ai - i ar)
    ds.segment(0, k_bins) = det.cwiseProduct(-sy) - coherence_decay * sx + 2.0 * g * ai * sz;
    ds.segment(k_bins, k_bins) = det.cwiseProduct(sx) - coherence_decay * sy + 2.0 * g * ar * sz;
    // Im(A sigma+) with sigma+ = (sx + i sy)/2: (ai sx + ar sy)/2
    ds.segment(2 * k_bins, k_bins) =
        -2.0 * g * (ai * sx + ar * sy) - gamma1 * (sz + Eigen::VectorXd::Ones(k_bins));
    ds[3 * k_bins] = out_frac * (params.kappa * std::norm(a) + purcell * excitations(s));
  };

  Trajectory traj;
  traj.n_spins = bins.n_spins;
  traj.reserve(sample_times.size());
  int segment = 0;
  auto sample = [&](double t, const Eigen::VectorXd& s) {
    for (Eigen::Index k = 0; k < k_bins; ++k) {
      const double n2 = s[k] * s[k] + s[k_bins + k] * s[k_bins + k] + s[2 * k_bins + k] * s[2 * k_bins + k];
      if (!(std::sqrt(n2) <= options.norm_limit)) {
        std::ostringstream msg;
        msg << "mean-field closure unstable at t=" << t << ": Bloch norm " << std::sqrt(n2) << " in bin " << k;
        throw ClosureInstabilityError(msg.str());
      }
    }
    const Complex sm = lowering(s);
    const Complex a = (eta + kI * g * sm) / cavity_pole;
    const double n_exc = excitations(s);
    const double coherent = std::norm(sm);
    traj.times.push_back(t);
    traj.s_x.push_back(0.5 * nw.dot(s.segment(0, k_bins)));
    traj.s_y.push_back(0.5 * nw.dot(s.segment(k_bins, k_bins)));
    traj.s_z.push_back(0.5 * nw.dot(s.segment(2 * k_bins, k_bins)));
    traj.spsm.push_back(coherent + n_exc);
    traj.photons.push_back(std::norm(a) + purcell * n_exc / params.kappa);
    traj.field.push_back(a);
    traj.intensity.push_back(out_frac * (params.kappa * std::norm(a) + purcell * n_exc));
    traj.emitted.push_back(s[3 * k_bins]);
    traj.segment.push_back(segment);
  };

  OdeOptions opt;
  opt.rtol = options.tolerance;
  // Seed tilts can be ~1e-8; resolve them relative to the O(1) Bloch components.
  opt.atol = options.tolerance * 1e-3;
  opt.controlled = 3 * k_bins;

  double t0 = 0.0;
  for (std::size_t k = 0; k < pulse.segments.size(); ++k) {
    segment = static_cast<int>(k);
    eta = pulse.segments[k].eta;
    const double t1 = (k + 1 == pulse.segments.size()) ? pulse.total_duration() : t0 + pulse.segments[k].duration;
    std::vector<double> window;
    for (double t : sample_times)
      if ((t > t0 || (k == 0 && t == t0)) && t <= t1) window.push_back(t);
    // Without a step bound the controller may jump across a dormant stretch
    // of an inverted ensemble and miss the onset; a step of 1/20 of the
    // fastest natural rate keeps it honest.
    const double fast = std::max({params.kappa * 1e-3, std::abs(4.0 * g * eta / params.kappa),
                                  purcell * bins.n_spins, coherence_decay, det.cwiseAbs().maxCoeff()});
    opt.max_step = fast > 0.0 ? 0.05 / fast : 0.0;
    integrate_dopri5(rhs, y, t0, t1, window, opt, sample);
    t0 = t1;
  }

  for (Eigen::Index k = 0; k < k_bins; ++k) {
    auto& b = bins.bins[static_cast<std::size_t>(k)];
    b.s_x = y[k];
    b.s_y = y[k_bins + k];
    b.s_z = y[2 * k_bins + k];
  }
  return traj;
}

std::vector<SweepRun> run_power_sweep(const SweepScenario& scenario, std::span<const double> amplitudes,
                                      unsigned threads) {
  if (amplitudes.empty()) throw ValidationError("power sweep needs at least one amplitude");
  std::vector<SweepRun> runs(amplitudes.size());
  std::vector<std::string> errors(amplitudes.size());
  const auto grid = uniform_grid(scenario.drive_duration + scenario.release_duration, scenario.n_samples);

  auto run_one = [&](std::size_t i) {
    try {
      const auto pulse = PulseSequence::rectangular(scenario.drive_duration, amplitudes[i], scenario.release_duration);
      auto bins = make_bins(scenario.spectrum, static_cast<double>(scenario.params.n_spins), scenario.params.g,
                            InitialPole::Ground, scenario.seed);
      SweepRun r;
      r.amplitude = amplitudes[i];
      r.drive_off_time = scenario.drive_duration;
      r.trajectory = integrate_mean_field(bins, pulse, scenario.params, grid, scenario.options);
      for (std::size_t s = 0; s < r.trajectory.size(); ++s)
        if (r.trajectory.times[s] <= r.drive_off_time) r.post_pulse_s_z = r.trajectory.s_z[s];
      runs[i] = std::move(r);
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "amplitude " << amplitudes[i] << " rad/s: " << e.what();
      errors[i] = msg.str();
    }
  };

  unsigned n_threads = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(amplitudes.size()));
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < n_threads; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < amplitudes.size(); i = next++) run_one(i);
      });
  }
  for (const auto& e : errors)
    if (!e.empty()) throw Error("power sweep failed at " + e);
  return runs;
}

analysis::PowerMap power_sweep(const SweepScenario& scenario, std::span<const double> amplitudes, unsigned threads,
                               const analysis::BurstOptions& burst) {
  auto runs = run_power_sweep(scenario, amplitudes, threads);
  std::vector<analysis::PowerRunInput> inputs;
  inputs.reserve(runs.size());
  for (auto& r : runs) {
    std::ostringstream label;
    label << "amplitude " << r.amplitude;
    inputs.push_back({label.str(), r.amplitude, r.drive_off_time, r.post_pulse_s_z, std::move(r.trajectory)});
  }
  return analysis::assemble_power_map(std::move(inputs), burst);
}

}  // namespace superrad::semiclassical
