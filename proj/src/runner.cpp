#include "superrad/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "superrad/dicke_engine.hpp"
#include "superrad/errors.hpp"
#include "superrad/exact_engine.hpp"
#include "superrad/semiclassical_engine.hpp"

namespace superrad {

namespace {

using Json = nlohmann::ordered_json;

// Re-raises the active exception with `context` prepended, keeping the
// library error type where the CLI distinguishes it.
[[noreturn]] void rethrow_with_context(const std::string& context) {
  try {
    throw;
  } catch (const StiffnessError& e) {
    throw StiffnessError(context + ": " + e.what(), e.time(), e.smallest_step());
  } catch (const ConfigError& e) {
    throw ConfigError(context + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(context + ": " + e.what());
  } catch (const CapacityError& e) {
    throw CapacityError(context + ": " + e.what());
  } catch (const ClosureInstabilityError& e) {
    throw ClosureInstabilityError(context + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(context + ": " + e.what());
  }
}

struct RunPoint {
  std::string label;
  int multiplicity = 1;
  double amplitude = 0.0;  // rad/s, amplitude sweeps only
  PulseSequence pulse;
};

std::vector<RunPoint> plan_runs(const Scenario& s) {
  std::vector<RunPoint> points;
  if (s.is_amplitude_sweep()) {
    for (double hz : s.sweep.amplitudes_hz) {
      const double eta = angular_from_hz(hz);
      points.push_back({"amplitude " + format_double(hz) + " Hz", 1, eta,
                        PulseSequence::rectangular(s.sweep.drive_duration_s, eta, s.sweep.release_duration_s)});
    }
  } else if (s.is_multiplicity_sweep()) {
    for (int k : s.sweep.multiplicities)
      points.push_back({"multiplicity " + std::to_string(k), k, 0.0, to_pulse(s)});
  } else {
    points.push_back({"run", 1, 0.0, to_pulse(s)});
  }
  return points;
}

double value_at_or_before(const Trajectory& t, const std::vector<double>& column, double time) {
  double v = column.empty() ? 0.0 : column.front();
  for (std::size_t i = 0; i < t.size() && t.times[i] <= time; ++i) v = column[i];
  return v;
}

double peak_after(const Trajectory& t, const std::vector<double>& signal, double time) {
  double m = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t.times[i] >= time) m = std::max(m, signal[i]);
  return m;
}

int fock_dimension(const Scenario& s, const PhysicalParams& params, const PulseSequence& pulse) {
  if (s.solver.n_fock > 0) return s.solver.n_fock;
  return exact::HilbertSpec::default_fock(s.solver.displaced_frame ? 0.0 : pulse.max_amplitude(), params.kappa);
}

RunRecord run_point(const Scenario& s, const RunPoint& point) {
  const PhysicalParams params = to_params(s, point.multiplicity);
  const auto grid = uniform_grid(point.pulse.total_duration(), s.n_samples);
  const bool inverted = s.initial == semiclassical::InitialPole::Inverted;

  RunRecord r;
  r.label = point.label;
  r.multiplicity = point.multiplicity;
  r.amplitude = point.amplitude;
  r.n_spins = static_cast<double>(params.n_spins);
  r.drive_off_time = point.pulse.drive_off_time();

  switch (s.engine) {
    case EngineKind::Semiclassical: {
      r.seed = semiclassical::seed_tipping(r.n_spins, s.seed.policy, s.seed.value);
      semiclassical::MeanFieldOptions opt;
      opt.tolerance = s.solver.tolerance;
      opt.single_spin_purcell = s.solver.single_spin_purcell;
      auto integrate = [&](const Scenario& sc) {
        auto bins =
            semiclassical::make_bins(to_spectrum(sc, point.multiplicity), r.n_spins, params.g, s.initial, r.seed);
        return semiclassical::integrate_mean_field(bins, point.pulse, params, grid, opt);
      };
      r.trajectory = integrate(s);
      const auto n_bins = to_spectrum(s, point.multiplicity).bins.size();
      if (n_bins > 1) {
        Scenario doubled = s;
        doubled.spectrum.n_bins *= 2;
        const auto check = integrate(doubled);
        BinConvergence c;
        c.bins = static_cast<int>(n_bins);
        c.doubled_bins = static_cast<int>(to_spectrum(doubled, point.multiplicity).bins.size());
        c.peak = peak_after(r.trajectory, burst_signal(s.engine, r.trajectory), r.drive_off_time);
        c.doubled_peak = peak_after(check, burst_signal(s.engine, check), r.drive_off_time);
        c.relative_change = c.peak > 0.0 ? std::abs(c.doubled_peak - c.peak) / c.peak : 0.0;
        c.converged = c.relative_change < 0.01;
        r.bin_check = c;
      }
      break;
    }
    case EngineKind::Dicke: {
      auto state = inverted ? dicke::LadderState::inverted(params.n_spins) : dicke::LadderState::ground(params.n_spins);
      const auto gen = dicke::build_generator(params, params.n_spins);
      r.trajectory = dicke::evolve_ladder(state, gen, params, grid, {s.solver.tolerance});
      break;
    }
    case EngineKind::Exact: {
      exact::HilbertSpec spec;
      spec.n_spins = static_cast<int>(params.n_spins);
      spec.n_fock = fock_dimension(s, params, point.pulse);
      spec.validate();
      std::vector<double> detunings(static_cast<std::size_t>(spec.n_spins), 0.0);
      if (s.spectrum.fwhm_hz > 0.0) {
        const auto spectrum = to_spectrum(s, point.multiplicity);
        for (std::size_t i = 0; i < detunings.size() && i < spectrum.bins.size(); ++i)
          detunings[i] = spectrum.bins[i].detuning;
      }
      auto state = inverted ? exact::DensityState::inverted(spec) : exact::DensityState::ground(spec);
      exact::SolverOptions opt;
      opt.tolerance = s.solver.tolerance;
      opt.displaced_frame = s.solver.displaced_frame;
      r.trajectory = exact::drive_then_release(spec, params, detunings, point.pulse, state, grid, opt);
      break;
    }
  }

  r.post_pulse_s_z = value_at_or_before(r.trajectory, r.trajectory.s_z, r.drive_off_time);
  const auto signal = burst_signal(s.engine, r.trajectory);
  analysis::BurstOptions bo{s.analysis.burst_threshold, s.analysis.baseline_fraction, s.analysis.settle_time_s};
  r.burst = analysis::detect_burst(r.trajectory.times, signal, r.drive_off_time, bo);

  if (s.analysis.fit_tanh) {
    const auto first = std::lower_bound(r.trajectory.times.begin(), r.trajectory.times.end(), r.drive_off_time) -
                       r.trajectory.times.begin();
    std::span<const double> t(r.trajectory.times.data() + first, r.trajectory.size() - first);
    std::span<const double> z(r.trajectory.s_z.data() + first, r.trajectory.size() - first);
    try {
      r.tanh = analysis::fit_tanh(t, z);
    } catch (const analysis::FitFailure& e) {
      r.tanh_error = e.what();
    } catch (const DomainError& e) {
      r.tanh_error = e.what();
    }
  }
  return r;
}

std::vector<RunRecord> run_parallel(const Scenario& s, const std::vector<RunPoint>& points, unsigned jobs) {
  std::vector<RunRecord> records(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        records[i] = run_point(s, points[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, points.size()));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  // Lowest failing index wins so the reported error does not depend on scheduling.
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (...) {
      rethrow_with_context(points[i].label);
    }
  }
  return records;
}

ValidationReport fast_cavity_report(const Scenario& s, const std::vector<RunPoint>& points) {
  int k_max = 1;
  double eta_max = 0.0;
  for (const auto& p : points) {
    k_max = std::max(k_max, p.multiplicity);
    eta_max = std::max(eta_max, p.pulse.max_amplitude());
  }
  const auto params = to_params(s, k_max);
  const double rabi = 4.0 * params.g * eta_max / params.kappa;
  return validate_fast_cavity(params, params.collective_coupling(), rabi);
}

Json to_json(const analysis::BurstMetrics& b) {
  return Json{{"detected", b.detected},       {"peak_intensity", b.peak_intensity},
              {"peak_time_s", b.peak_time},   {"delay_s", b.delay},
              {"fwhm_s", b.fwhm},             {"emitted_photons", b.emitted_photons},
              {"baseline", b.baseline}};
}

Json to_json(const analysis::TanhFit& f) {
  return Json{{"t_d_s", f.t_d},
              {"tau_s", f.tau},
              {"amplitude", f.amplitude},
              {"offset", f.offset},
              {"max_rate_per_s", f.max_rate()},
              {"residual_rms", f.residual_rms},
              {"residual_max", f.residual_max},
              {"iterations", f.iterations}};
}

Json to_json(const ValidationReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    Json j{{"name", c.name}, {"value_rad_per_s", c.value}, {"satisfied", c.satisfied}};
    j["kappa_over_value"] = std::isfinite(c.margin) ? Json(c.margin) : Json(nullptr);
    checks.push_back(std::move(j));
  }
  return Json{{"passed", r.passed}, {"kappa_rad_per_s", r.kappa}, {"checks", std::move(checks)}};
}

Json to_json(const PhysicalParams& p) {
  Json j{{"g", p.g},
         {"kappa", p.kappa},
         {"kappa_out", p.kappa_out},
         {"gamma_perp", p.gamma_perp},
         {"gamma_par", p.gamma_par},
         {"delta_c", p.delta_c},
         {"n_spins", p.n_spins},
         {"collective_coupling", p.collective_coupling()},
         {"purcell_rate", purcell_rate(p.g, p.kappa)}};
  if (p.temperature) j["temperature_k"] = *p.temperature;
  return j;
}

std::string trajectory_name(const Scenario& s, const RunRecord& r) {
  return s.is_multiplicity_sweep() ? "trajectory_k" + std::to_string(r.multiplicity) + ".csv" : "trajectory.csv";
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void build_files(RunArtifacts& a) {
  const Scenario& s = a.scenario;
  if (a.power_map) {
    std::ostringstream os;
    analysis::write_power_map_csv(os, *a.power_map);
    a.files.emplace_back("power_map.csv", os.str());
  } else {
    for (const auto& r : a.runs) {
      std::ostringstream os;
      write_trajectory_csv(os, r.trajectory);
      a.files.emplace_back(trajectory_name(s, r), os.str());
    }
  }
  if (a.scaling) {
    std::ostringstream os;
    os << "n,value\n";
    for (const auto& p : a.scaling->points) os << format_double(p.n) << ',' << format_double(p.value) << '\n';
    a.files.emplace_back("scaling.csv", os.str());
  }

  Json report;
  report["scenario"] = s.name;
  report["engine"] = to_string(s.engine);
  Json runs = Json::array();
  for (const auto& r : a.runs) {
    Json j{{"label", r.label},
           {"multiplicity", r.multiplicity},
           {"n_spins", r.n_spins},
           {"amplitude_hz", hz_from_angular(r.amplitude)},
           {"drive_off_time_s", r.drive_off_time},
           {"post_pulse_s_z", r.post_pulse_s_z},
           {"burst", to_json(r.burst)}};
    if (!a.power_map) j["file"] = trajectory_name(s, r);
    if (r.trajectory.fock_truncation_flagged)
      j["fock_truncation_warning"] = r.trajectory.max_top_fock_population;
    if (r.tanh) j["tanh_fit"] = to_json(*r.tanh);
    if (!r.tanh_error.empty()) j["tanh_fit_error"] = r.tanh_error;
    if (r.bin_check)
      j["bin_convergence"] = Json{{"bins", r.bin_check->bins},
                                  {"doubled_bins", r.bin_check->doubled_bins},
                                  {"peak", r.bin_check->peak},
                                  {"doubled_peak", r.bin_check->doubled_peak},
                                  {"relative_change", r.bin_check->relative_change},
                                  {"converged", r.bin_check->converged}};
    runs.push_back(std::move(j));
  }
  report["runs"] = std::move(runs);
  if (a.scaling) {
    Json pts = Json::array();
    for (std::size_t i = 0; i < a.scaling->points.size(); ++i)
      pts.push_back({{"n", a.scaling->points[i].n},
                     {"value", a.scaling->points[i].value},
                     {"log_residual", a.scaling->residuals[i]}});
    report["scaling"] = Json{{"metric", s.analysis.scaling_metric},
                             {"exponent", a.scaling->exponent},
                             {"amplitude", a.scaling->amplitude},
                             {"points", std::move(pts)}};
  }
  if (a.power_map) {
    Json pm{{"file", "power_map.csv"},
            {"rows", "time samples"},
            {"columns", "drive amplitudes (rad/s)"},
            {"values", s.engine == EngineKind::Semiclassical ? "|A|^2" : "emitted photon rate (1/s)"},
            {"drive_off_time_s", a.power_map->drive_off_time}};
    pm["threshold_amplitude_hz"] =
        a.power_map->threshold_amplitude ? Json(hz_from_angular(*a.power_map->threshold_amplitude)) : Json(nullptr);
    report["power_map"] = std::move(pm);
  }
  report["fast_cavity"] = to_json(a.fast_cavity);
  a.files.emplace_back("report.json", report.dump(2) + "\n");

  Json meta;
  meta["generated_utc"] = utc_timestamp();
  meta["scenario"] = Json::parse(emit_scenario(s));
  Json derived = Json::array();
  for (const auto& r : a.runs) {
    Json d{{"label", r.label}, {"params_rad_per_s", to_json(to_params(s, r.multiplicity))}};
    if (s.engine == EngineKind::Semiclassical)
      d["tipping_seed"] = Json{{"theta_rad", r.seed.theta}, {"phase_rad", r.seed.phase}};
    derived.push_back(std::move(d));
  }
  meta["derived"] = std::move(derived);
  meta["fast_cavity"] = to_json(a.fast_cavity);
  meta["conventions"] = Json{
      {"units", "internal angular frequencies (rad/s); config frequencies in Hz"},
      {"gamma_perp", "config gives the homogeneous FWHM; coherence decay rate = pi * FWHM"},
      {"kappa", "cavity energy decay rate (FWHM)"},
      {"s_z", "(1/2) sum sigma_z, from -N/2 (ground) to +N/2 (inverted)"},
      {"delay", "drive-off to peak of the burst signal"},
      {"burst_signal", s.engine == EngineKind::Semiclassical ? "|A|^2" : "emitted photon rate"}};
  meta["files"] = Json::array();
  for (const auto& f : a.files) meta["files"].push_back(f.first);
  a.metadata = meta.dump(2) + "\n";
}

}  // namespace

std::vector<double> burst_signal(EngineKind engine, const Trajectory& trajectory) {
  return engine == EngineKind::Semiclassical ? trajectory.field_intensity() : trajectory.intensity;
}

RunArtifacts execute_scenario(const Scenario& scenario, const RunOptions& options) {
  RunArtifacts a;
  a.scenario = scenario;
  if (options.seed_override) a.scenario.seed.value = options.seed_override;
  const Scenario& s = a.scenario;
  const std::string context = "scenario '" + s.name + "'";

  std::vector<RunPoint> points;
  try {
    s.validate();
    points = plan_runs(s);
    for (const auto& p : points) p.pulse.validate();
    a.fast_cavity = fast_cavity_report(s, points);
  } catch (...) {
    rethrow_with_context(context);
  }
  if (s.solver.require_fast_cavity && !a.fast_cavity.passed) {
    const auto& c = a.fast_cavity.tightest();
    throw ValidationError(context + ": fast-cavity condition violated: kappa / " + c.name + " = " +
                          format_double(c.margin));
  }

  try {
    a.runs = run_parallel(s, points, options.jobs);
  } catch (...) {
    rethrow_with_context(context);
  }

  try {
    if (s.is_multiplicity_sweep()) {
      std::vector<analysis::ScalingPoint> pts;
      for (const auto& r : a.runs)
        pts.push_back({r.n_spins, s.analysis.scaling_metric == "integral" ? r.burst.emitted_photons
                                                                          : r.burst.peak_intensity});
      if (pts.size() >= 2) a.scaling = analysis::fit_scaling(pts);
    }
    if (s.is_amplitude_sweep()) {
      std::vector<analysis::PowerRunInput> inputs;
      for (const auto& r : a.runs)
        inputs.push_back({r.label, r.amplitude, r.drive_off_time, r.post_pulse_s_z, r.trajectory});
      analysis::BurstOptions bo{s.analysis.burst_threshold, s.analysis.baseline_fraction, s.analysis.settle_time_s};
      a.power_map = analysis::assemble_power_map(std::move(inputs), bo,
                                                 s.engine == EngineKind::Semiclassical
                                                     ? analysis::MapSignal::FieldIntensity
                                                     : analysis::MapSignal::EmittedIntensity);
    }
    build_files(a);
  } catch (...) {
    rethrow_with_context(context);
  }
  return a;
}

std::vector<std::filesystem::path> write_artifacts(const RunArtifacts& artifacts,
                                                   const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  std::vector<std::pair<fs::path, const std::string*>> targets;
  for (const auto& [name, content] : artifacts.files) targets.emplace_back(out_dir / name, &content);
  targets.emplace_back(out_dir / "metadata.json", &artifacts.metadata);

  std::vector<fs::path> staged;
  auto cleanup = [&] {
    std::error_code ec;
    for (const auto& p : staged) fs::remove(p, ec);
  };
  try {
    for (const auto& [path, content] : targets) {
      fs::path tmp = path;
      tmp += ".partial";
      staged.push_back(tmp);
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << *content;
      out.close();
      if (!out) throw Error("cannot write " + tmp.string());
    }
    std::vector<fs::path> written;
    for (std::size_t i = 0; i < targets.size(); ++i) {
      fs::rename(staged[i], targets[i].first);
      written.push_back(targets[i].first);
    }
    return written;
  } catch (...) {
    cleanup();
    throw;
  }
}

}  // namespace superrad
