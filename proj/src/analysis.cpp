#include "superrad/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace superrad::analysis {

double integrate_trapezoid(std::span<const double> times, std::span<const double> values) {
  double acc = 0.0;
  for (std::size_t i = 1; i < times.size() && i < values.size(); ++i)
    acc += 0.5 * (values[i] + values[i - 1]) * (times[i] - times[i - 1]);
  return acc;
}

BurstMetrics detect_burst(std::span<const double> times, std::span<const double> signal, double drive_off_time,
                          const BurstOptions& options) {
  if (times.size() != signal.size() || times.empty()) throw ValidationError("detect_burst: bad trace");
  if (drive_off_time > times.back()) throw ValidationError("detect_burst: trace ends before drive-off");

  if (!(options.settle_time >= 0.0)) throw ValidationError("detect_burst: settle time must be >= 0");
  const double search_start = drive_off_time + options.settle_time;
  if (search_start > times.back()) throw ValidationError("detect_burst: trace ends before the settle window");
  const auto first = static_cast<std::size_t>(
      std::lower_bound(times.begin(), times.end(), search_start) - times.begin());
  const std::size_t n = times.size() - first;

  BurstMetrics m;
  std::size_t peak = first;
  for (std::size_t i = first; i < times.size(); ++i)
    if (signal[i] > signal[peak]) peak = i;
  m.peak_intensity = signal[peak];
  m.peak_time = times[peak];
  m.delay = times[peak] - drive_off_time;

  const auto tail = std::max<std::size_t>(1, static_cast<std::size_t>(options.baseline_fraction * static_cast<double>(n)));
  double base = 0.0;
  for (std::size_t i = times.size() - tail; i < times.size(); ++i) base += signal[i];
  m.baseline = base / static_cast<double>(tail);

  const double half = 0.5 * m.peak_intensity;
  double left = times[first];
  for (std::size_t i = peak; i > first; --i) {
    if (signal[i - 1] < half) {
      const double f = (half - signal[i - 1]) / (signal[i] - signal[i - 1]);
      left = times[i - 1] + f * (times[i] - times[i - 1]);
      break;
    }
  }
  double right = times.back();
  for (std::size_t i = peak; i + 1 < times.size(); ++i) {
    if (signal[i + 1] < half) {
      const double f = (signal[i] - half) / (signal[i] - signal[i + 1]);
      right = times[i] + f * (times[i + 1] - times[i]);
      break;
    }
  }
  m.fwhm = right - left;
  m.emitted_photons = integrate_trapezoid(times.subspan(first), signal.subspan(first));
  m.detected = m.peak_intensity > 0.0 && m.peak_intensity > options.threshold_factor * m.baseline && peak > first;
  return m;
}

BurstMetrics detect_burst(const Trajectory& trace, double drive_off_time, const BurstOptions& options) {
  return detect_burst(trace.times, trace.intensity, drive_off_time, options);
}

ScalingFit fit_scaling(std::span<const ScalingPoint> points) {
  if (points.size() < 2) throw DomainError("fit_scaling: need at least two points");
  const double n = static_cast<double>(points.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : points) {
    if (!(p.n > 0.0) || !(p.value > 0.0)) throw DomainError("fit_scaling: values must be positive");
    const double x = std::log(p.n), y = std::log(p.value);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw DomainError("fit_scaling: all ensemble sizes are equal");
  ScalingFit fit;
  fit.exponent = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.exponent * sx) / n;
  fit.amplitude = std::exp(intercept);
  fit.points.assign(points.begin(), points.end());
  for (const auto& p : points) fit.residuals.push_back(std::log(p.value) - (intercept + fit.exponent * std::log(p.n)));
  return fit;
}

double TanhFit::operator()(double t) const { return offset - amplitude * std::tanh((t - t_d) / tau); }

TanhFit tanh_initializer(std::span<const double> times, std::span<const double> values) {
  if (times.size() != values.size() || times.size() < 5) throw ValidationError("fit_tanh: need >= 5 samples");
  TanhFit init;
  const double start = values.front();
  const double end = values.back();
  init.offset = 0.5 * (start + end);
  init.amplitude = 0.5 * (start - end);

  // Steepest change in the direction of the transition, taken on a centred
  // moving average so that sample noise does not pick the point.
  const std::size_t half = times.size() / 80;
  std::vector<double> smooth(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t lo = i >= half ? i - half : 0, hi = std::min(values.size() - 1, i + half);
    smooth[i] = std::accumulate(values.begin() + lo, values.begin() + hi + 1, 0.0) / static_cast<double>(hi - lo + 1);
  }
  std::size_t steep = 1;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double slope = (smooth[i] - smooth[i - 1]) / (times[i] - times[i - 1]);
    const double along = (start >= end) ? -slope : slope;
    if (along > best) {
      best = along;
      steep = i;
    }
  }
  init.t_d = 0.5 * (times[steep] + times[steep - 1]);

  const double range = start - end;
  std::optional<double> t10, t90;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double progress = range != 0.0 ? (start - values[i]) / range : 0.0;
    if (!t10 && progress >= 0.1) t10 = times[i];
    if (!t90 && progress >= 0.9) t90 = times[i];
  }
  const double span = (t10 && t90) ? *t90 - *t10 : 0.0;
  init.tau = span > 0.0 ? 0.25 * span : 0.1 * (times.back() - times.front());
  return init;
}

TanhFit fit_tanh(std::span<const double> times, std::span<const double> values, const TanhOptions& options) {
  const TanhFit init = tanh_initializer(times, values);
  const auto n = static_cast<Eigen::Index>(times.size());

  Eigen::Vector4d p(init.t_d, init.tau, init.amplitude, init.offset);
  auto residuals = [&](const Eigen::Vector4d& q, Eigen::VectorXd& r) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = (times[static_cast<std::size_t>(i)] - q[0]) / q[1];
      r[i] = values[static_cast<std::size_t>(i)] - (q[3] - q[2] * std::tanh(x));
    }
    return r.squaredNorm();
  };

  Eigen::VectorXd r(n), r_try(n);
  Eigen::MatrixXd jac(n, 4);
  double sse = residuals(p, r);
  double lambda = 1e-3;
  // Residual level indistinguishable from round-off of the data.
  const double floor_sse = 1e-28 * Eigen::Map<const Eigen::VectorXd>(values.data(), n).squaredNorm();
  TanhFit fit = init;
  bool converged = false;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = (times[static_cast<std::size_t>(i)] - p[0]) / p[1];
      const double th = std::tanh(x);
      const double sech2 = 1.0 - th * th;
      // Jacobian of the model (the residual is data - model).
      jac(i, 0) = p[2] * sech2 / p[1];
      jac(i, 1) = p[2] * sech2 * x / p[1];
      jac(i, 2) = -th;
      jac(i, 3) = 1.0;
    }
    const Eigen::Matrix4d jtj = jac.transpose() * jac;
    const Eigen::Vector4d jtr = jac.transpose() * r;
    bool accepted = false;
    while (lambda < 1e16) {
      Eigen::Matrix4d a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-300);
      const Eigen::Vector4d step = a.colPivHouseholderQr().solve(jtr);
      const Eigen::Vector4d trial = p + step;
      if (!(trial[1] > 0.0) || !trial.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const double sse_try = residuals(trial, r_try);
      if (sse_try < sse) {
        const double gain = sse - sse_try;
        p = trial;
        r.swap(r_try);
        fit.residual_log.push_back(sse_try);
        // Scale-aware step size: times relative to tau, levels relative to
        // the transition height.
        const double level = std::abs(p[2]) + std::abs(p[3]) + 1e-300;
        const double rel_step = std::max({std::abs(step[0]) / p[1], std::abs(step[1]) / p[1],
                                          std::abs(step[2]) / level, std::abs(step[3]) / level});
        const bool small = gain <= options.relative_tolerance * sse || rel_step <= options.step_tolerance ||
                           sse_try <= floor_sse;
        sse = sse_try;
        lambda = std::max(lambda * 0.1, 1e-12);
        accepted = true;
        if (small) converged = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted || converged) {
      // No step reduces the residual any further: at a (numerical) minimum.
      converged = true;
      break;
    }
  }
  if (!converged || !p.allFinite()) throw FitFailure("fit_tanh did not converge", init);

  fit.t_d = p[0];
  fit.tau = p[1];
  fit.amplitude = p[2];
  fit.offset = p[3];
  fit.iterations = it + 1;
  fit.residual_rms = std::sqrt(sse / static_cast<double>(n));
  fit.residual_max = r.cwiseAbs().maxCoeff();
  return fit;
}

double fit_exponential_rate(std::span<const double> times, std::span<const double> values) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
  for (std::size_t i = 0; i < times.size() && i < values.size(); ++i) {
    if (!(values[i] > 0.0)) continue;
    const double x = times[i], y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    n += 1;
  }
  if (n < 2) throw DomainError("fit_exponential_rate: need two positive samples");
  return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

PowerMap assemble_power_map(std::vector<PowerRunInput> runs, const BurstOptions& burst, MapSignal signal) {
  if (runs.empty()) throw ValidationError("assemble_power_map: no runs");
  std::stable_sort(runs.begin(), runs.end(), [](const auto& a, const auto& b) { return a.amplitude < b.amplitude; });

  const auto& ref = runs.front().trajectory.times;
  const double span = ref.empty() ? 0.0 : ref.back() - ref.front();
  std::vector<std::string> offending;
  for (const auto& r : runs) {
    const auto& t = r.trajectory.times;
    bool same = t.size() == ref.size();
    for (std::size_t i = 0; same && i < t.size(); ++i) same = std::abs(t[i] - ref[i]) <= 1e-12 * span;
    if (!same) offending.push_back(r.label.empty() ? "amplitude " + format_double(r.amplitude) : r.label);
  }
  if (!offending.empty()) {
    std::string msg = "power map time grids differ from '" +
                      (runs.front().label.empty() ? "amplitude " + format_double(runs.front().amplitude)
                                                  : runs.front().label) +
                      "' in:";
    for (const auto& o : offending) msg += " " + o;
    throw AlignmentError(msg);
  }

  PowerMap map;
  map.times = ref;
  map.drive_off_time = runs.front().drive_off_time;
  double best = -std::numeric_limits<double>::infinity();
  for (auto& r : runs) {
    map.amplitudes.push_back(r.amplitude);
    map.columns.push_back(signal == MapSignal::FieldIntensity ? r.trajectory.field_intensity()
                                                              : r.trajectory.intensity);
    map.post_pulse_s_z.push_back(r.post_pulse_s_z);
    map.bursts.push_back(detect_burst(map.times, map.columns.back(), r.drive_off_time, burst));
    if (r.post_pulse_s_z > best) {
      best = r.post_pulse_s_z;
      map.threshold_amplitude = r.amplitude;
    }
  }
  return map;
}

void write_power_map_csv(std::ostream& out, const PowerMap& map) {
  out << "time_s";
  for (double a : map.amplitudes) out << ',' << format_double(a);
  out << '\n';
  for (std::size_t i = 0; i < map.times.size(); ++i) {
    out << format_double(map.times[i]);
    for (const auto& col : map.columns) out << ',' << format_double(col[i]);
    out << '\n';
  }
}

PowerMap read_power_map_csv(std::istream& in) {
  auto split = [](const std::string& line) {
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    return v;
  };
  std::string line;
  if (!std::getline(in, line) || line.rfind("time_s", 0) != 0) throw ConfigError("power map: missing header");
  PowerMap map;
  map.amplitudes = split(line.size() > 7 ? line.substr(7) : std::string());
  map.columns.assign(map.amplitudes.size(), {});
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto row = split(line);
    if (row.size() != map.amplitudes.size() + 1) throw ConfigError("power map: ragged row");
    map.times.push_back(row[0]);
    for (std::size_t j = 0; j < map.amplitudes.size(); ++j) map.columns[j].push_back(row[j + 1]);
  }
  return map;
}

}  // namespace superrad::analysis
