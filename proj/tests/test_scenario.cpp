#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "superrad/errors.hpp"
#include "superrad/scenario.hpp"
#include "superrad/units.hpp"

using namespace superrad;
using doctest::Approx;

namespace {

const char* kMinimal = R"({
  "engine": "semiclassical",
  "physics": {"collective_coupling_hz": 1e6, "kappa_hz": 1e7, "n_spins": 1000},
  "pulse": [{"duration_s": 1e-6}]
})";

std::string error_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string with(const std::string& from, const std::string& to) {
  std::string s = kMinimal;
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("minimal config fills defaults") {
  const auto s = parse_scenario(kMinimal);
  CHECK(s.engine == EngineKind::Semiclassical);
  CHECK(s.physics.n_spins == 1000);
  CHECK(s.physics.kappa_out == 1.0);
  CHECK(s.spectrum.n_bins == 101);
  CHECK(s.seed.policy == semiclassical::SeedPolicy::Deterministic);
  CHECK(s.analysis.burst_threshold == 5.0);
  REQUIRE(s.pulse.size() == 1);
  CHECK(s.pulse[0].eta_hz == 0.0);
}

TEST_CASE("presets") {
  const auto list = list_presets();
  CHECK(list.size() >= 4);
  std::set<std::string> names;
  for (const auto& p : list) names.insert(p.name);
  for (const char* required : {"fig2", "fig3", "fig4", "ideal-scaling", "purcell", "oracle-exact", "oracle-dicke"})
    CHECK(names.count(required) == 1);
  CHECK_THROWS_AS(preset("nope"), ConfigError);

  for (const auto& info : list) {
    CAPTURE(info.name);
    const auto s = preset(info.name);
    CHECK(s.name == info.name);
    CHECK(s.description == info.description);
    CHECK_NOTHROW(s.validate());
    const auto text = emit_scenario(s);
    const auto back = parse_scenario(text);
    CHECK(back == s);
    CHECK(emit_scenario(back) == text);
  }
}

TEST_CASE("round trip keeps every field") {
  Scenario s = parse_scenario(kMinimal);
  s.name = "x";
  s.physics.temperature_k = 0.025;
  s.physics.gamma_par_hz = 3.3e-5;
  s.physics.delta_c_hz = -1.25e5;
  s.spectrum.shape = LineShape::HyperfineTriplet;
  s.spectrum.fwhm_hz = 1.1e6;
  s.spectrum.n_bins = 33;
  s.seed = {semiclassical::SeedPolicy::Stochastic, 18446744073709551557ULL};
  s.initial = semiclassical::InitialPole::Inverted;
  s.analysis.fit_tanh = true;
  s.analysis.scaling_metric = "integral";
  s.analysis.settle_time_s = 1.0 / 3.0;
  s.solver.tolerance = 1e-11;
  s.pulse = {{5e-8, 0.1 + 0.2}, {2e-6, 0.0}};
  CHECK(parse_scenario(emit_scenario(s)) == s);
}

TEST_CASE("syntax errors name the line") {
  const std::string bad = "{\n  \"engine\": \"dicke\",\n  \"physics\": {\n    \"n_spins\": 4,,\n  }\n}\n";
  const auto msg = error_of(bad);
  CHECK(msg.find("line 4") != std::string::npos);
}

TEST_CASE("field errors name the field path") {
  SUBCASE("unknown top-level key") { CHECK(error_of(with("\"engine\"", "\"engin\": 1, \"engine\"")).find("engin") != std::string::npos); }
  SUBCASE("unknown nested key") {
    CHECK(error_of(with("\"kappa_hz\"", "\"kapa_hz\": 1, \"kappa_hz\"")).find("physics.kapa_hz") != std::string::npos);
  }
  SUBCASE("wrong type") {
    CHECK(error_of(with("\"n_spins\": 1000", "\"n_spins\": \"many\"")).find("physics.n_spins") != std::string::npos);
  }
  SUBCASE("pulse element") {
    CHECK(error_of(with("{\"duration_s\": 1e-6}", "{\"eta_hz\": 1}")).find("pulse[0].duration_s") != std::string::npos);
  }
  SUBCASE("unknown engine") { CHECK(error_of(with("semiclassical", "classical")).find("engine") != std::string::npos); }
  SUBCASE("unknown line shape") {
    CHECK(error_of(with("\"pulse\"", "\"spectrum\": {\"shape\": \"box\"}, \"pulse\"")).find("spectrum.shape") !=
          std::string::npos);
  }
  SUBCASE("unknown seed policy") {
    CHECK(error_of(with("\"pulse\"", "\"seed\": {\"policy\": \"quantum\"}, \"pulse\"")).find("seed.policy") !=
          std::string::npos);
  }
  SUBCASE("missing engine") { CHECK(error_of(with("\"engine\": \"semiclassical\",", "")).find("engine") != std::string::npos); }
  SUBCASE("non-integer multiplicity") {
    CHECK(error_of(with("\"pulse\"", "\"sweep\": {\"multiplicities\": [1, 1.5]}, \"pulse\""))
              .find("sweep.multiplicities[1]") != std::string::npos);
  }
}

TEST_CASE("engine compatibility rules") {
  auto fails = [](const std::string& text, const char* fragment) {
    const auto msg = error_of(text);
    CAPTURE(msg);
    CHECK(msg.find(fragment) != std::string::npos);
  };
  CHECK_NOTHROW(parse_scenario(with("semiclassical", "dicke")));
  fails(with("semiclassical\",", "dicke\", \"spectrum\": {\"fwhm_hz\": 1e6},"), "homogeneous");
  fails(R"({"engine": "dicke", "physics": {"n_spins": 4}, "pulse": [{"duration_s": 1e-6, "eta_hz": 1e3}]})",
        "decay-only");
  fails(with("\"pulse\"", "\"seed\": {\"policy\": \"stochastic\"}, \"pulse\""), "seed.value");
  CHECK_NOTHROW(parse_scenario(with("\"pulse\"", "\"seed\": {\"policy\": \"stochastic\", \"value\": 9}, \"pulse\"")));
  fails(with("\"pulse\"",
             "\"sweep\": {\"amplitudes_hz\": [1], \"drive_duration_s\": 1e-8, \"release_duration_s\": 1e-6, "
             "\"multiplicities\": [1, 2]}, \"pulse\""),
        "cannot be combined");
  fails(with("\"pulse\"",
             "\"sweep\": {\"amplitudes_hz\": [1], \"drive_duration_s\": 1e-8, \"release_duration_s\": 1e-6}, \"pulse\""),
        "leave 'pulse' empty");
  fails(with("[{\"duration_s\": 1e-6}]", "[]"), "at least one segment");
  fails(with("\"pulse\"", "\"solver\": {\"displaced_frame\": true}, \"pulse\""), "exact engine only");
  fails(with("\"pulse\"", "\"analysis\": {\"scaling_metric\": \"mean\"}, \"pulse\""), "scaling_metric");
  fails(with("\"pulse\"", "\"n_samples\": 1, \"pulse\""), "n_samples");
  fails(with("semiclassical\",", "exact\", \"spectrum\": {\"fwhm_hz\": 1e6, \"n_bins\": 3},"), "one detuning per spin");
  fails(with("\"kappa_hz\": 1e7", "\"kappa_hz\": -1"), "physics");
  fails(with("\"duration_s\": 1e-6", "\"duration_s\": -1e-6"), "pulse");
}

TEST_CASE("conversion to rad/s") {
  const auto s = parse_scenario(with("\"pulse\"",
                                     "\"spectrum\": {\"fwhm_hz\": 2e6, \"n_bins\": 5, \"misalignment_hz\": 4e6}, "
                                     "\"pulse\""));
  Scenario t = s;
  t.physics.gamma_perp_fwhm_hz = 1e6;
  t.physics.gamma_par_hz = 10.0;
  t.pulse = {{1e-8, 2.0}, {1e-6, 0.0}};
  const auto p = to_params(t);
  CHECK(p.kappa == Approx(kTwoPi * 1e7));
  CHECK(p.g * std::sqrt(1000.0) == Approx(kTwoPi * 1e6));
  CHECK(p.gamma_perp == Approx(kTwoPi * 1e6 / 2));
  CHECK(p.gamma_par == Approx(kTwoPi * 10.0));
  CHECK(p.n_spins == 1000);

  const auto p3 = to_params(t, 3);
  CHECK(p3.n_spins == 3000);
  CHECK(p3.g == Approx(p.g));
  CHECK(p3.collective_coupling() == Approx(std::sqrt(3.0) * p.collective_coupling()));
  CHECK_THROWS_AS(to_params(t, 0), ValidationError);

  const auto pulse = to_pulse(t);
  REQUIRE(pulse.segments.size() == 2);
  CHECK(pulse.segments[0].eta == Approx(kTwoPi * 2.0));
  CHECK(pulse.total_duration() == Approx(1.01e-6));

  CHECK(to_spectrum(t).bins.size() == 5);
  const auto three = to_spectrum(t, 3);
  CHECK(three.bins.size() == 15);
  CHECK(three.mean_detuning() == Approx(0.0).epsilon(1e-6));
  CHECK(three.total_weight() == Approx(1.0));
}

TEST_CASE("config files") {
  const auto dir = std::filesystem::temp_directory_path() / "superrad_test_scenario";
  std::filesystem::create_directories(dir);
  const auto path = dir / "c.json";
  {
    std::ofstream out(path);
    out << emit_scenario(preset("fig4"));
  }
  CHECK(load_scenario(path.string()) == preset("fig4"));
  CHECK_THROWS_AS(load_scenario((dir / "missing.json").string()), ConfigError);
  std::filesystem::remove_all(dir);
}
