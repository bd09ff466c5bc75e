#include "superrad/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "superrad/errors.hpp"
#include "superrad/units.hpp"

namespace superrad {

using Json = nlohmann::ordered_json;

EngineKind parse_engine(std::string_view tag) {
  if (tag == "exact") return EngineKind::Exact;
  if (tag == "dicke") return EngineKind::Dicke;
  if (tag == "semiclassical") return EngineKind::Semiclassical;
  throw ConfigError("unknown engine '" + std::string(tag) + "' (expected exact, dicke or semiclassical)");
}

std::string to_string(EngineKind engine) {
  switch (engine) {
    case EngineKind::Exact: return "exact";
    case EngineKind::Dicke: return "dicke";
    case EngineKind::Semiclassical: return "semiclassical";
  }
  return "semiclassical";
}

namespace {

std::string to_string(semiclassical::InitialPole pole) {
  return pole == semiclassical::InitialPole::Inverted ? "inverted" : "ground";
}

// Field reader that tracks the JSON path for error messages and rejects
// unknown keys.
class Reader {
 public:
  Reader(const Json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail(path_.empty() ? "document" : path_, "expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = node_.begin(); it != node_.end(); ++it)
      if (!ok.count(it.key())) fail(field(it.key()), "unknown key");
  }

  bool has(const char* key) const { return node_.contains(key); }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const auto& v = node_.at(key);
    if (!v.is_number()) fail(field(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(field(key), "must be finite");
    return d;
  }

  std::int64_t integer(const char* key, std::int64_t fallback) const {
    if (!has(key)) return fallback;
    const auto& v = node_.at(key);
    if (v.is_number_unsigned()) {
      const auto u = v.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) fail(field(key), "too large");
      return static_cast<std::int64_t>(u);
    }
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9.2e18) return static_cast<std::int64_t>(d);
    }
    fail(field(key), "expected an integer");
  }

  std::uint64_t unsigned_integer(const char* key) const {
    const auto& v = node_.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    fail(field(key), "expected a non-negative integer");
  }

  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = node_.at(key);
    if (!v.is_boolean()) fail(field(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const auto& v = node_.at(key);
    if (!v.is_string()) fail(field(key), "expected a string");
    return v.get<std::string>();
  }

  Reader object(const char* key) const { return Reader(node_.at(key), field(key)); }

  const Json& array(const char* key) const {
    const auto& v = node_.at(key);
    if (!v.is_array()) fail(field(key), "expected an array");
    return v;
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw ConfigError("config field '" + where + "': " + what);
  }

 private:
  const Json& node_;
  std::string path_;
};

template <typename F>
auto rethrow_as_field(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    Reader::fail(where, e.what());
  }
}

}  // namespace

void Scenario::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError("scenario: " + m); };
  if (n_samples < 2) fail("n_samples must be >= 2");
  if (is_amplitude_sweep() && is_multiplicity_sweep())
    fail("amplitude and multiplicity sweeps cannot be combined");
  for (int k : sweep.multiplicities)
    if (k < 1) fail("multiplicities must be >= 1");
  if (is_amplitude_sweep()) {
    if (!pulse.empty()) fail("an amplitude sweep builds its own pulses; leave 'pulse' empty");
    if (!(sweep.drive_duration_s > 0.0) || !(sweep.release_duration_s > 0.0))
      fail("amplitude sweeps need drive_duration_s > 0 and release_duration_s > 0");
    for (double a : sweep.amplitudes_hz)
      if (!std::isfinite(a)) fail("sweep amplitudes must be finite");
  } else if (pulse.empty()) {
    fail("'pulse' needs at least one segment");
  }
  if (engine == EngineKind::Dicke) {
    if (is_amplitude_sweep()) fail("the dicke engine is decay-only; amplitude sweeps are not supported");
    for (const auto& s : pulse)
      if (s.eta_hz != 0.0) fail("the dicke engine is decay-only; drive amplitudes must be zero");
    if (spectrum.fwhm_hz != 0.0 || spectrum.misalignment_hz != 0.0)
      fail("the dicke engine needs a homogeneous ensemble (spectrum.fwhm_hz = 0)");
  }
  if (engine == EngineKind::Exact && spectrum.fwhm_hz != 0.0 &&
      (is_multiplicity_sweep() || spectrum.n_bins != physics.n_spins))
    fail("the exact engine assigns one detuning per spin: spectrum.n_bins must equal n_spins (no multiplicity sweep)");
  if (engine != EngineKind::Exact && solver.displaced_frame) fail("displaced_frame applies to the exact engine only");
  if (seed.policy == semiclassical::SeedPolicy::Stochastic && !seed.value)
    fail("the stochastic seed policy needs seed.value");
  if (analysis.scaling_metric != "peak" && analysis.scaling_metric != "integral")
    fail("analysis.scaling_metric must be 'peak' or 'integral'");
  if (!(analysis.burst_threshold > 0.0) || !(analysis.baseline_fraction > 0.0) || analysis.baseline_fraction > 1.0)
    fail("analysis.burst_threshold must be > 0 and baseline_fraction in (0, 1]");
  if (!(analysis.settle_time_s >= 0.0)) fail("analysis.settle_time_s must be >= 0");
  if (!(solver.tolerance > 0.0)) fail("solver.tolerance must be > 0");
  if (solver.n_fock != 0 && solver.n_fock < 2) fail("solver.n_fock must be 0 (auto) or >= 2");
  if (spectrum.n_bins < 1) fail("spectrum.n_bins must be >= 1");
  if (!(spectrum.fwhm_hz >= 0.0)) fail("spectrum.fwhm_hz must be >= 0");
  try {
    to_params(*this).validate();
  } catch (const ValidationError& e) {
    fail(std::string("physics: ") + e.what());
  }
  try {
    if (!pulse.empty()) to_pulse(*this).validate();
  } catch (const ValidationError& e) {
    fail(std::string("pulse: ") + e.what());
  }
}

PhysicalParams to_params(const Scenario& s, int multiplicity) {
  if (multiplicity < 1) throw ValidationError("multiplicity must be >= 1");
  const auto& c = s.physics;
  PhysicalParams p;
  if (c.n_spins < 1) throw ValidationError("n_spins must be >= 1");
  p.n_spins = c.n_spins * multiplicity;
  p.g = coupling_for_collective(angular_from_hz(c.collective_coupling_hz), c.n_spins);
  p.kappa = angular_from_hz(c.kappa_hz);
  p.kappa_out = c.kappa_out;
  p.gamma_perp = 0.5 * angular_from_hz(c.gamma_perp_fwhm_hz);
  p.gamma_par = angular_from_hz(c.gamma_par_hz);
  p.delta_c = angular_from_hz(c.delta_c_hz);
  p.temperature = c.temperature_k;
  return p;
}

PulseSequence to_pulse(const Scenario& s) {
  PulseSequence p;
  for (const auto& seg : s.pulse) p.segments.push_back({seg.duration_s, angular_from_hz(seg.eta_hz)});
  return p;
}

SpectralDistribution to_spectrum(const Scenario& s, int multiplicity) {
  const auto base = build_spectral_distribution(s.spectrum.shape, angular_from_hz(s.spectrum.fwhm_hz), s.spectrum.n_bins);
  if (multiplicity <= 1 || s.spectrum.misalignment_hz == 0.0) return base;
  std::vector<double> offsets;
  for (int i = 0; i < multiplicity; ++i)
    offsets.push_back(angular_from_hz(s.spectrum.misalignment_hz) * (i - 0.5 * (multiplicity - 1)));
  return superpose_offsets(base, offsets);
}

Scenario parse_scenario(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    const std::size_t end = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i + 1 < end; ++i)
      if (text[i] == '\n') ++line;
    throw ConfigError("config syntax error at line " + std::to_string(line) + ": " + e.what());
  }

  const Reader root(doc, "");
  root.allow({"name", "description", "engine", "physics", "pulse", "spectrum", "initial", "seed", "n_samples", "sweep",
              "analysis", "solver"});
  Scenario s;
  s.name = root.string("name", "");
  s.description = root.string("description", "");
  if (!root.has("engine")) Reader::fail("engine", "missing");
  s.engine = rethrow_as_field("engine", [&] { return parse_engine(root.string("engine", "")); });

  if (root.has("physics")) {
    const auto r = root.object("physics");
    r.allow({"collective_coupling_hz", "kappa_hz", "kappa_out", "gamma_perp_fwhm_hz", "gamma_par_hz", "delta_c_hz",
             "n_spins", "temperature_k"});
    auto& p = s.physics;
    p.collective_coupling_hz = r.number("collective_coupling_hz", p.collective_coupling_hz);
    p.kappa_hz = r.number("kappa_hz", p.kappa_hz);
    p.kappa_out = r.number("kappa_out", p.kappa_out);
    p.gamma_perp_fwhm_hz = r.number("gamma_perp_fwhm_hz", p.gamma_perp_fwhm_hz);
    p.gamma_par_hz = r.number("gamma_par_hz", p.gamma_par_hz);
    p.delta_c_hz = r.number("delta_c_hz", p.delta_c_hz);
    p.n_spins = r.integer("n_spins", p.n_spins);
    if (r.has("temperature_k")) p.temperature_k = r.number("temperature_k", 0.0);
  }

  if (root.has("pulse")) {
    const auto& arr = root.array("pulse");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const Reader r(arr[i], "pulse[" + std::to_string(i) + "]");
      r.allow({"duration_s", "eta_hz"});
      if (!r.has("duration_s")) Reader::fail(r.field("duration_s"), "missing");
      s.pulse.push_back({r.number("duration_s", 0.0), r.number("eta_hz", 0.0)});
    }
  }

  if (root.has("spectrum")) {
    const auto r = root.object("spectrum");
    r.allow({"shape", "fwhm_hz", "n_bins", "misalignment_hz"});
    auto& sp = s.spectrum;
    sp.shape = rethrow_as_field(r.field("shape"), [&] { return parse_line_shape(r.string("shape", "gaussian")); });
    sp.fwhm_hz = r.number("fwhm_hz", sp.fwhm_hz);
    sp.n_bins = static_cast<int>(r.integer("n_bins", sp.n_bins));
    sp.misalignment_hz = r.number("misalignment_hz", sp.misalignment_hz);
  }

  if (root.has("initial")) {
    const auto tag = root.string("initial", "ground");
    if (tag == "ground") s.initial = semiclassical::InitialPole::Ground;
    else if (tag == "inverted") s.initial = semiclassical::InitialPole::Inverted;
    else Reader::fail("initial", "expected 'ground' or 'inverted'");
  }

  if (root.has("seed")) {
    const auto r = root.object("seed");
    r.allow({"policy", "value"});
    s.seed.policy = rethrow_as_field(r.field("policy"),
                                     [&] { return semiclassical::parse_seed_policy(r.string("policy", "deterministic")); });
    if (r.has("value")) s.seed.value = r.unsigned_integer("value");
  }

  if (root.has("n_samples")) {
    const auto n = root.integer("n_samples", 0);
    if (n < 2) Reader::fail("n_samples", "must be >= 2");
    s.n_samples = static_cast<std::size_t>(n);
  }

  if (root.has("sweep")) {
    const auto r = root.object("sweep");
    r.allow({"amplitudes_hz", "drive_duration_s", "release_duration_s", "multiplicities"});
    if (r.has("amplitudes_hz")) {
      const auto& arr = r.array("amplitudes_hz");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) Reader::fail(r.field("amplitudes_hz[" + std::to_string(i) + "]"), "expected a number");
        s.sweep.amplitudes_hz.push_back(arr[i].get<double>());
      }
    }
    s.sweep.drive_duration_s = r.number("drive_duration_s", 0.0);
    s.sweep.release_duration_s = r.number("release_duration_s", 0.0);
    if (r.has("multiplicities")) {
      const auto& arr = r.array("multiplicities");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number_integer()) Reader::fail(r.field("multiplicities[" + std::to_string(i) + "]"), "expected an integer");
        s.sweep.multiplicities.push_back(arr[i].get<int>());
      }
    }
  }

  if (root.has("analysis")) {
    const auto r = root.object("analysis");
    r.allow({"fit_tanh", "burst_threshold", "baseline_fraction", "scaling_metric", "settle_time_s"});
    auto& a = s.analysis;
    a.fit_tanh = r.boolean("fit_tanh", a.fit_tanh);
    a.burst_threshold = r.number("burst_threshold", a.burst_threshold);
    a.baseline_fraction = r.number("baseline_fraction", a.baseline_fraction);
    a.scaling_metric = r.string("scaling_metric", a.scaling_metric);
    a.settle_time_s = r.number("settle_time_s", a.settle_time_s);
  }

  if (root.has("solver")) {
    const auto r = root.object("solver");
    r.allow({"tolerance", "n_fock", "single_spin_purcell", "require_fast_cavity", "displaced_frame"});
    auto& v = s.solver;
    v.tolerance = r.number("tolerance", v.tolerance);
    v.n_fock = static_cast<int>(r.integer("n_fock", v.n_fock));
    v.single_spin_purcell = r.boolean("single_spin_purcell", v.single_spin_purcell);
    v.require_fast_cavity = r.boolean("require_fast_cavity", v.require_fast_cavity);
    v.displaced_frame = r.boolean("displaced_frame", v.displaced_frame);
  }

  try {
    s.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("config 'physics': ") + e.what());
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scenario(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string emit_scenario(const Scenario& s) {
  Json j;
  j["name"] = s.name;
  j["description"] = s.description;
  j["engine"] = to_string(s.engine);
  Json p;
  p["collective_coupling_hz"] = s.physics.collective_coupling_hz;
  p["kappa_hz"] = s.physics.kappa_hz;
  p["kappa_out"] = s.physics.kappa_out;
  p["gamma_perp_fwhm_hz"] = s.physics.gamma_perp_fwhm_hz;
  p["gamma_par_hz"] = s.physics.gamma_par_hz;
  p["delta_c_hz"] = s.physics.delta_c_hz;
  p["n_spins"] = s.physics.n_spins;
  if (s.physics.temperature_k) p["temperature_k"] = *s.physics.temperature_k;
  j["physics"] = p;
  Json pulse = Json::array();
  for (const auto& seg : s.pulse) pulse.push_back(Json{{"duration_s", seg.duration_s}, {"eta_hz", seg.eta_hz}});
  j["pulse"] = pulse;
  j["spectrum"] = Json{{"shape", to_string(s.spectrum.shape)},
                       {"fwhm_hz", s.spectrum.fwhm_hz},
                       {"n_bins", s.spectrum.n_bins},
                       {"misalignment_hz", s.spectrum.misalignment_hz}};
  j["initial"] = to_string(s.initial);
  Json seed{{"policy", semiclassical::to_string(s.seed.policy)}};
  if (s.seed.value) seed["value"] = *s.seed.value;
  j["seed"] = seed;
  j["n_samples"] = s.n_samples;
  Json sweep;
  sweep["amplitudes_hz"] = s.sweep.amplitudes_hz;
  sweep["drive_duration_s"] = s.sweep.drive_duration_s;
  sweep["release_duration_s"] = s.sweep.release_duration_s;
  sweep["multiplicities"] = s.sweep.multiplicities;
  j["sweep"] = sweep;
  j["analysis"] = Json{{"fit_tanh", s.analysis.fit_tanh},
                       {"burst_threshold", s.analysis.burst_threshold},
                       {"baseline_fraction", s.analysis.baseline_fraction},
                       {"scaling_metric", s.analysis.scaling_metric},
                       {"settle_time_s", s.analysis.settle_time_s}};
  j["solver"] = Json{{"tolerance", s.solver.tolerance},
                     {"n_fock", s.solver.n_fock},
                     {"single_spin_purcell", s.solver.single_spin_purcell},
                     {"require_fast_cavity", s.solver.require_fast_cavity},
                     {"displaced_frame", s.solver.displaced_frame}};
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------- presets

namespace {

// NV ensemble of the experiment: one sub-ensemble of 3.8e15 spins couples
// with sqrt(N) g / 2pi = 3.1 MHz to a 13.8 MHz wide cavity.
constexpr double kSubEnsemble = 3.8e15;
constexpr double kNvCollective = 3.1e6;
constexpr double kNvKappa = 13.8e6;
constexpr double kNvLine = 2.7e6;
constexpr double kNvHomogeneous = 0.5e6;
constexpr double kNvGammaPar = 3e-5;
constexpr double kDrive = 50e-9;

PhysicsConfig nv_physics(int sub_ensembles) {
  PhysicsConfig p;
  p.n_spins = static_cast<std::int64_t>(kSubEnsemble) * sub_ensembles;
  p.collective_coupling_hz = kNvCollective * std::sqrt(static_cast<double>(sub_ensembles));
  p.kappa_hz = kNvKappa;
  p.gamma_perp_fwhm_hz = kNvHomogeneous;
  p.gamma_par_hz = kNvGammaPar;
  return p;
}

SpectrumConfig nv_line() {
  SpectrumConfig s;
  s.shape = LineShape::Gaussian;
  s.fwhm_hz = kNvLine;
  s.n_bins = 101;
  return s;
}

// Drive amplitude (Hz) whose bare rotation 4 g eta / kappa turns the spins
// by `angle` in `duration`.
double amplitude_for_rotation(const PhysicsConfig& p, double angle, double duration) {
  const double g_hz = p.collective_coupling_hz / std::sqrt(static_cast<double>(p.n_spins));
  return angle * p.kappa_hz / (4.0 * kTwoPi * g_hz * duration);
}

Scenario fig2() {
  Scenario s;
  s.name = "fig2";
  s.description = "Power sweep of a 50 ns drive on three NV sub-ensembles: |A|^2 map with burst ridge";
  s.engine = EngineKind::Semiclassical;
  s.physics = nv_physics(3);
  s.spectrum = nv_line();
  s.initial = semiclassical::InitialPole::Ground;
  s.n_samples = 4001;
  for (int i = 1; i <= 16; ++i)
    s.sweep.amplitudes_hz.push_back(amplitude_for_rotation(s.physics, 0.1 * i * std::numbers::pi, kDrive));
  s.sweep.drive_duration_s = kDrive;
  s.sweep.release_duration_s = 2e-6;
  return s;
}

Scenario fig3() {
  Scenario s;
  s.name = "fig3";
  s.description = "Inverting 50 ns pulse on three NV sub-ensembles, superradiant burst and tanh fit of <S_z>";
  s.engine = EngineKind::Semiclassical;
  s.physics = nv_physics(3);
  s.spectrum = nv_line();
  s.initial = semiclassical::InitialPole::Ground;
  s.n_samples = 4001;
  s.pulse = {{kDrive, amplitude_for_rotation(s.physics, 1.3 * std::numbers::pi, kDrive)}, {2e-6, 0.0}};
  s.analysis.fit_tanh = true;
  return s;
}

Scenario fig4() {
  Scenario s;
  s.name = "fig4";
  s.description = "Peak |A|^2 for 1N..4N inverted NV spins with misaligned sub-ensembles: scaling exponent";
  s.engine = EngineKind::Semiclassical;
  s.physics = nv_physics(1);
  s.spectrum = nv_line();
  s.spectrum.misalignment_hz = 4e6;
  s.initial = semiclassical::InitialPole::Inverted;
  s.n_samples = 3001;
  s.pulse = {{15e-6, 0.0}};
  s.sweep.multiplicities = {1, 2, 3, 4};
  return s;
}

Scenario ideal_scaling() {
  Scenario s;
  s.name = "ideal-scaling";
  s.description = "Dicke ladder decay for N = 64..512 without dephasing: ideal N^2 peak scaling";
  s.engine = EngineKind::Dicke;
  s.physics.kappa_hz = 1e6;
  s.physics.n_spins = 64;
  s.physics.collective_coupling_hz = 8e3;  // g / kappa = 1e-3
  s.initial = semiclassical::InitialPole::Inverted;
  s.n_samples = 8001;
  s.pulse = {{0.017, 0.0}};
  s.sweep.multiplicities = {1, 2, 4, 8};
  return s;
}

Scenario oracle(EngineKind engine) {
  Scenario s;
  s.name = engine == EngineKind::Exact ? "oracle-exact" : "oracle-dicke";
  s.description = engine == EngineKind::Exact
                      ? "Full Lindblad decay of N = 4 inverted spins at g / kappa = 1e-2 (reference for oracle-dicke)"
                      : "Dicke ladder decay of N = 4 inverted spins at g / kappa = 1e-2 (compare with oracle-exact)";
  s.engine = engine;
  s.physics.kappa_hz = 10e6;
  s.physics.n_spins = 4;
  s.physics.collective_coupling_hz = 2e5;
  s.initial = semiclassical::InitialPole::Inverted;
  s.n_samples = 601;
  s.pulse = {{1.5e-4, 0.0}};
  s.solver.n_fock = engine == EngineKind::Exact ? 4 : 0;
  return s;
}

Scenario purcell() {
  Scenario s;
  s.name = "purcell";
  s.description = "Single excited spin in the cavity at g / kappa = 1e-3: Purcell decay at 4 g^2 / kappa";
  s.engine = EngineKind::Exact;
  s.physics.kappa_hz = 10e6;
  s.physics.n_spins = 1;
  s.physics.collective_coupling_hz = 1e4;
  s.initial = semiclassical::InitialPole::Inverted;
  s.n_samples = 301;
  s.pulse = {{0.012, 0.0}};
  s.solver.n_fock = 3;
  return s;
}

Scenario exact_sweep() {
  Scenario s;
  s.name = "exact-sweep";
  s.description = "Drive-amplitude sweep on N = 4 spins with the full Lindblad solver: burst delay versus drive";
  s.engine = EngineKind::Exact;
  s.physics.kappa_hz = 10e6;
  s.physics.n_spins = 4;
  s.physics.collective_coupling_hz = 4e5;  // g / kappa = 2e-2
  s.initial = semiclassical::InitialPole::Ground;
  s.n_samples = 801;
  const double collective_rate = 4.0 * 4.0 * kTwoPi * 2e5 * 2e5 / 10e6;  // N Gamma_P, rad/s
  s.sweep.drive_duration_s = 0.3 / collective_rate;
  s.sweep.release_duration_s = 4.0 / collective_rate;
  for (double f : {0.4, 0.7, 1.0, 1.1, 1.25, 1.4, 1.55})
    s.sweep.amplitudes_hz.push_back(amplitude_for_rotation(s.physics, f * std::numbers::pi, s.sweep.drive_duration_s));
  s.analysis.settle_time_s = 15.0 / (kTwoPi * 10e6);
  // Four-spin bursts are broad: the tail at the end of the release window
  // still carries about a third of the peak rate.
  s.analysis.burst_threshold = 2.5;
  s.solver.n_fock = 5;
  s.solver.displaced_frame = true;
  return s;
}

}  // namespace

std::vector<PresetInfo> list_presets() {
  std::vector<PresetInfo> out;
  for (const char* name : {"fig2", "fig3", "fig4", "ideal-scaling", "oracle-exact", "oracle-dicke", "purcell", "exact-sweep"})
    out.push_back({name, preset(name).description});
  return out;
}

Scenario preset(std::string_view name) {
  if (name == "fig2") return fig2();
  if (name == "fig3") return fig3();
  if (name == "fig4") return fig4();
  if (name == "ideal-scaling") return ideal_scaling();
  if (name == "oracle-exact") return oracle(EngineKind::Exact);
  if (name == "oracle-dicke") return oracle(EngineKind::Dicke);
  if (name == "purcell") return purcell();
  if (name == "exact-sweep") return exact_sweep();
  throw ConfigError("unknown preset '" + std::string(name) + "' (see 'superrad presets')");
}

}  // namespace superrad
