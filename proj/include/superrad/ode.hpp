#pragma once

// Adaptive Dormand-Prince 5(4) integrator with Hairer's fourth-order dense
// output. Works on any Eigen column vector (real or complex scalar).

#include <algorithm>
#include <cmath>
#include <span>
#include <sstream>
#include <utility>

#include <Eigen/Core>

#include "superrad/errors.hpp"

namespace superrad {

struct OdeOptions {
  double rtol = 1e-9;
  double atol = 1e-9;
  double max_step = 0.0;        // 0: unbounded
  double initial_step = 0.0;    // 0: automatic
  long max_steps = 50'000'000;
  // Number of leading components under error control (0: all). Trailing
  // components are carried along as quadratures.
  long controlled = 0;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;
  double smallest_step = 0.0;
};

namespace detail {

template <typename Vec>
double scaled_rms(const Vec& err, const Vec& y0, const Vec& y1, const OdeOptions& opt) {
  const auto m = opt.controlled > 0 ? std::min<Eigen::Index>(opt.controlled, err.size()) : err.size();
  const auto sc = (opt.atol + opt.rtol * y0.head(m).cwiseAbs().cwiseMax(y1.head(m).cwiseAbs()).array()).eval();
  return std::sqrt((err.head(m).cwiseAbs().array() / sc).square().mean());
}

}  // namespace detail

/// Integrates dy/dt = rhs(t, y) from t0 to t1, overwriting `y` with y(t1).
///
/// `sample(t, y)` is called once for every entry of `sample_times` in
/// [t0, t1] (ascending), using dense output between accepted steps. Sample
/// times outside [t0, t1] are ignored. Throws StiffnessError when the step
/// size underflows or the step budget is exhausted.
///
/// `project(v)` runs on the solution and on the reused first stage after
/// every accepted step. It must be a linear projection that commutes with
/// `rhs` (e.g. onto the Hermitian part of a density matrix), so it removes
/// drift out of an invariant subspace without changing the exact solution.
template <typename Vec, typename Rhs, typename Sampler, typename Project>
OdeStats integrate_dopri5(Rhs&& rhs, Vec& y, double t0, double t1, std::span<const double> sample_times,
                          const OdeOptions& opt, Sampler&& sample, Project&& project) {
  using Scalar = typename Vec::Scalar;
  // Butcher tableau.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                   a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;
  constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                   d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                   d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

  OdeStats stats;
  std::size_t next = 0;
  while (next < sample_times.size() && sample_times[next] < t0) ++next;
  while (next < sample_times.size() && sample_times[next] == t0) {
    sample(t0, static_cast<const Vec&>(y));
    ++next;
  }
  if (t1 <= t0) return stats;

  const auto n = y.size();
  Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n), ydense(n);
  rhs(t0, static_cast<const Vec&>(y), k1);
  ++stats.rhs_evals;

  const double span = t1 - t0;
  double h = opt.initial_step;
  if (h <= 0.0) {
    // Hairer's starting-step heuristic, first stage only.
    const auto m = opt.controlled > 0 ? std::min<Eigen::Index>(opt.controlled, y.size()) : y.size();
    const auto sc = (opt.atol + opt.rtol * y.head(m).cwiseAbs().array()).eval();
    const double dnf = std::sqrt((k1.head(m).cwiseAbs().array() / sc).square().mean());
    const double dny = std::sqrt((y.head(m).cwiseAbs().array() / sc).square().mean());
    h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 * span : 0.01 * dny / dnf;
    h = std::min(h, span);
  }
  if (opt.max_step > 0.0) h = std::min(h, opt.max_step);
  stats.smallest_step = h;

  double t = t0;
  double err_prev = 1e-4;
  bool last_rejected = false;
  while (t < t1) {
    if (stats.accepted + stats.rejected >= opt.max_steps) {
      std::ostringstream msg;
      msg << "integrator step budget exhausted at t=" << t << " (smallest step " << stats.smallest_step << ")";
      throw StiffnessError(msg.str(), t, stats.smallest_step);
    }
    if (t + h > t1 || t1 - (t + h) < 1e-12 * span) h = t1 - t;
    const double step_floor = 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), span);
    if (h < step_floor) {
      std::ostringstream msg;
      msg << "step size underflow at t=" << t << ": smallest achieved step " << stats.smallest_step;
      throw StiffnessError(msg.str(), t, stats.smallest_step);
    }

    const Scalar hs = Scalar(h);
    ytmp = y + hs * Scalar(a21) * k1;
    rhs(t + c2 * h, ytmp, k2);
    ytmp = y + hs * (Scalar(a31) * k1 + Scalar(a32) * k2);
    rhs(t + c3 * h, ytmp, k3);
    ytmp = y + hs * (Scalar(a41) * k1 + Scalar(a42) * k2 + Scalar(a43) * k3);
    rhs(t + c4 * h, ytmp, k4);
    ytmp = y + hs * (Scalar(a51) * k1 + Scalar(a52) * k2 + Scalar(a53) * k3 + Scalar(a54) * k4);
    rhs(t + c5 * h, ytmp, k5);
    ytmp = y + hs * (Scalar(a61) * k1 + Scalar(a62) * k2 + Scalar(a63) * k3 + Scalar(a64) * k4 +
                     Scalar(a65) * k5);
    const double tnew = (h == t1 - t) ? t1 : t + h;
    rhs(tnew, ytmp, k6);
    ynew = y + hs * (Scalar(a71) * k1 + Scalar(a73) * k3 + Scalar(a74) * k4 + Scalar(a75) * k5 +
                     Scalar(a76) * k6);
    rhs(tnew, ynew, k7);
    stats.rhs_evals += 6;

    err = hs * (Scalar(e1) * k1 + Scalar(e3) * k3 + Scalar(e4) * k4 + Scalar(e5) * k5 + Scalar(e6) * k6 +
                Scalar(e7) * k7);
    double e = detail::scaled_rms(err, y, ynew, opt);
    if (!std::isfinite(e)) e = 1e10;

    if (e <= 1.0) {
      // Dense output on [t, tnew].
      while (next < sample_times.size() && sample_times[next] <= tnew) {
        const double theta = (sample_times[next] - t) / h;
        if (sample_times[next] == tnew) {
          sample(tnew, static_cast<const Vec&>(ynew));
        } else {
          const Vec ydiff = ynew - y;
          const Vec bspl = hs * k1 - ydiff;
          const Vec r4 = ydiff - hs * k7 - bspl;
          const Vec r5 = hs * (Scalar(d1) * k1 + Scalar(d3) * k3 + Scalar(d4) * k4 + Scalar(d5) * k5 +
                               Scalar(d6) * k6 + Scalar(d7) * k7);
          const Scalar th(theta), th1(1.0 - theta);
          ydense = y + th * (ydiff + th1 * (bspl + th * (r4 + th1 * r5)));
          sample(sample_times[next], static_cast<const Vec&>(ydense));
        }
        ++next;
      }
      ++stats.accepted;
      stats.smallest_step = std::min(stats.smallest_step, h);
      t = tnew;
      y.swap(ynew);
      k1.swap(k7);
      project(y);
      project(k1);
      // PI step control (Hairer & Wanner, beta = 0.04).
      double fac = 0.9 * std::pow(e, -0.17) * std::pow(err_prev, 0.04);
      fac = std::clamp(fac, 0.2, 10.0);
      if (last_rejected) fac = std::min(fac, 1.0);
      err_prev = std::max(e, 1e-4);
      h *= fac;
      if (opt.max_step > 0.0) h = std::min(h, opt.max_step);
      last_rejected = false;
    } else {
      ++stats.rejected;
      stats.smallest_step = std::min(stats.smallest_step, h);
      h *= std::max(0.2, 0.9 * std::pow(e, -0.2));
      last_rejected = true;
    }
  }
  return stats;
}

template <typename Vec, typename Rhs, typename Sampler>
OdeStats integrate_dopri5(Rhs&& rhs, Vec& y, double t0, double t1, std::span<const double> sample_times,
                          const OdeOptions& opt, Sampler&& sample) {
  return integrate_dopri5(std::forward<Rhs>(rhs), y, t0, t1, sample_times, opt, std::forward<Sampler>(sample),
                          [](Vec&) {});
}

}  // namespace superrad
