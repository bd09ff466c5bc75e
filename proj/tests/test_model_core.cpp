#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "superrad/errors.hpp"
#include "superrad/model_core.hpp"
#include "superrad/spectral.hpp"
#include "superrad/units.hpp"

using namespace superrad;
using doctest::Approx;

TEST_CASE("physical params reject broken invariants") {
  PhysicalParams p;
  p.kappa = 1.0;
  CHECK_NOTHROW(p.validate());

  auto bad = p;
  bad.g = -1.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = p;
  bad.kappa = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = p;
  bad.kappa_out = 1.5;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = p;
  bad.n_spins = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = p;
  bad.gamma_perp = std::nan("");
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = p;
  bad.temperature = -1.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("collective coupling rescaling keeps sqrt(N) g") {
  const double G = kTwoPi * 3.1e6;
  for (std::int64_t n : {1LL, 4LL, 1000LL, 3'800'000'000'000'000LL}) {
    PhysicalParams p;
    p.n_spins = n;
    p.g = coupling_for_collective(G, n);
    CHECK(p.collective_coupling() == Approx(G).epsilon(1e-12));
  }
}

TEST_CASE("purcell rate") {
  SUBCASE("NV numbers give 1.5e-9 Hz with the FWHM convention") {
    const double rate = purcell_rate(kTwoPi * 0.072, kTwoPi * 13.8e6);
    CHECK(hz_from_angular(rate) == Approx(4 * 0.072 * 0.072 / 13.8e6).epsilon(1e-12));
    CHECK(hz_from_angular(rate) == Approx(1.50e-9).epsilon(0.01));
  }
  SUBCASE("zero coupling") { CHECK(purcell_rate(0.0, 1.0) == 0.0); }
  SUBCASE("homogeneity") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int i = 0; i < 50; ++i) {
      const double g = u(rng), k = u(rng), l = u(rng);
      CHECK(purcell_rate(l * g, k) == Approx(l * l * purcell_rate(g, k)).epsilon(1e-12));
      CHECK(purcell_rate(g, l * k) == Approx(purcell_rate(g, k) / l).epsilon(1e-12));
    }
    CHECK(purcell_rate(2.0, 3.0) == Approx(4.0 * purcell_rate(1.0, 3.0)));
  }
  SUBCASE("kappa = 0 is singular") { CHECK_THROWS_AS(purcell_rate(1.0, 0.0), SingularParameterError); }
}

TEST_CASE("fast-cavity hierarchy report") {
  PhysicalParams p;
  p.kappa = kTwoPi * 13.8e6;
  p.gamma_perp = kTwoPi * 2.7e6;

  SUBCASE("experiment-scale numbers pass with margin 13.8 / 6.2") {
    const auto r = validate_fast_cavity(p, kTwoPi * 6.2e6, 0.0);
    CHECK(r.passed);
    CHECK(r.tightest().name == "collective_coupling");
    CHECK(r.tightest().margin == Approx(13.8 / 6.2).epsilon(1e-12));
  }
  SUBCASE("zero coupling passes trivially") {
    const auto r = validate_fast_cavity(p, 0.0, 0.0);
    CHECK(r.passed);
    CHECK(std::isinf(r.checks.front().margin));
  }
  SUBCASE("inverted hierarchy fails on the coupling") {
    p.kappa = kTwoPi * 1e6;
    p.gamma_perp = 0.0;
    const auto r = validate_fast_cavity(p, kTwoPi * 6.2e6, 0.0);
    CHECK_FALSE(r.passed);
    CHECK(r.tightest().name == "collective_coupling");
    CHECK_FALSE(r.tightest().satisfied);
  }
  SUBCASE("drive rotation rate is one of the checks") {
    const auto r = validate_fast_cavity(p, 0.0, 2.0 * p.kappa);
    CHECK_FALSE(r.passed);
    CHECK(r.tightest().name == "rabi_rate");
  }
  SUBCASE("non-finite input") {
    CHECK_THROWS_AS(validate_fast_cavity(p, std::nan(""), 0.0), ValidationError);
  }
}

TEST_CASE("pulse sequences") {
  const auto p = PulseSequence::rectangular(50e-9, 3.0, 2e-6);
  CHECK(p.segments.size() == 2);
  CHECK(p.total_duration() == Approx(2.05e-6));
  CHECK(p.drive_off_time() == Approx(50e-9));
  CHECK(p.segment_start(1) == Approx(50e-9));
  CHECK(p.max_amplitude() == 3.0);
  CHECK_NOTHROW(p.validate());
  CHECK(PulseSequence::free_decay(1.0).drive_off_time() == 0.0);
  CHECK_THROWS_AS(PulseSequence{}.validate(), ValidationError);
  CHECK_THROWS_AS((PulseSequence{{{0.0, 1.0}}}.validate()), ValidationError);
}

TEST_CASE("zeeman projections") {
  SUBCASE("[1,0,0]") {
    for (double v : zeeman_projections({1, 0, 0})) CHECK(std::abs(v) == Approx(1 / std::sqrt(3.0)));
  }
  SUBCASE("[1,1,1]") {
    const auto p = zeeman_projections({1, 1, 1});
    CHECK(p[0] == Approx(1.0));
    for (int i = 1; i < 4; ++i) CHECK(p[i] == Approx(-1.0 / 3));
  }
  SUBCASE("[1,1,0]") {
    const auto p = zeeman_projections({1, 1, 0});
    CHECK(p[0] == Approx(2 / std::sqrt(6.0)));
    CHECK(p[1] == Approx(0.0));
    CHECK(p[2] == Approx(0.0));
    CHECK(p[3] == Approx(-2 / std::sqrt(6.0)));
  }
  SUBCASE("zero direction") { CHECK_THROWS_AS(zeeman_projections({0, 0, 0}), InvalidDirectionError); }
}

TEST_CASE("zeeman projection properties over random directions") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const Vec3 b{n(rng), n(rng), n(rng)};
    const auto p = zeeman_projections(b);
    double sq = 0;
    for (double v : p) sq += v * v;
    CHECK(sq == Approx(4.0 / 3.0).epsilon(1e-12));

    auto mags = [](std::array<double, 4> a) {
      for (double& v : a) v = std::abs(v);
      std::sort(a.begin(), a.end());
      return a;
    };
    const auto ref = mags(p);
    const auto flipped = mags(zeeman_projections({-b[0], -b[1], -b[2]}));
    const auto permuted = mags(zeeman_projections({b[2], b[0], b[1]}));
    for (int k = 0; k < 4; ++k) {
      CHECK(flipped[k] == Approx(ref[k]).epsilon(1e-12));
      CHECK(permuted[k] == Approx(ref[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("NV axes are unit vectors at the tetrahedral angle") {
  const NVLevelModel m;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& a = m.axes[i];
    CHECK(a[0] * a[0] + a[1] * a[1] + a[2] * a[2] == Approx(1.0));
    for (std::size_t j = i + 1; j < 4; ++j) {
      const auto& b = m.axes[j];
      CHECK(std::abs(a[0] * b[0] + a[1] * b[1] + a[2] * b[2]) == Approx(1.0 / 3));
    }
  }
}

TEST_CASE("resonance fields") {
  const double wc = kTwoPi * 3.18e9;
  SUBCASE("[1,1,1]") {
    const auto r = resonance_fields({1, 1, 1}, wc);
    REQUIRE(r.size() == 2);
    CHECK(millitesla_from_tesla(r[0].field) == Approx(10.79).epsilon(1e-3));
    CHECK(r[0].count == 1);
    CHECK(millitesla_from_tesla(r[1].field) == Approx(32.36).epsilon(1e-3));
    CHECK(r[1].count == 3);
  }
  SUBCASE("[1,0,0]") {
    const auto r = resonance_fields({1, 0, 0}, wc);
    REQUIRE(r.size() == 1);
    CHECK(millitesla_from_tesla(r[0].field) == Approx(18.68).epsilon(1e-3));
    CHECK(r[0].count == 4);
  }
  SUBCASE("multiplicities never exceed four") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
      int total = 0;
      for (const auto& f : resonance_fields({n(rng), n(rng), n(rng)}, wc)) total += f.count;
      CHECK(total <= 4);
      CHECK(total >= 1);
    }
  }
}

TEST_CASE("thermal ground population") {
  const double d = kBoltzmann * 0.138 / kHbar;  // splitting equivalent to 138 mK
  CHECK(thermal_ground_population(0.025, d) == Approx(1.0 / (1.0 + 2.0 * std::exp(-0.138 / 0.025))).epsilon(1e-12));
  CHECK(thermal_ground_population(0.025, d) > 0.99);
  CHECK(thermal_ground_population(1e-4, d) == Approx(1.0));
  CHECK(thermal_ground_population(1e6, d) == Approx(1.0 / 3).epsilon(1e-6));
  double prev = 1.1;
  for (double t = 0.005; t < 10.0; t *= 1.5) {
    const double p = thermal_ground_population(t, d);
    CHECK(p < prev);
    CHECK(p > 1.0 / 3);
    prev = p;
  }
  CHECK_THROWS_AS(thermal_ground_population(0.0, d), DomainError);
}

TEST_CASE("spectral distributions") {
  SUBCASE("zero width collapses to one bin") {
    const auto d = build_spectral_distribution(LineShape::Gaussian, 0.0, 101);
    REQUIRE(d.bins.size() == 1);
    CHECK(d.bins[0].detuning == 0.0);
    CHECK(d.bins[0].weight == 1.0);
  }
  SUBCASE("Gaussian 2.7 MHz, 101 bins") {
    const auto d = build_spectral_distribution(LineShape::Gaussian, kTwoPi * 2.7e6, 101);
    CHECK(d.bins.size() == 101);
    CHECK(d.total_weight() == Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(d.mean_detuning()) < 1e-6 * kTwoPi * 2.7e6);
    CHECK(d.empirical_fwhm() == Approx(kTwoPi * 2.7e6).epsilon(0.02));
  }
  SUBCASE("Lorentzian weights sum to one") {
    const auto d = build_spectral_distribution(LineShape::Lorentzian, kTwoPi * 1e6, 51);
    CHECK(d.total_weight() == Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(d.mean_detuning()) < 1e-6 * kTwoPi * 1e6);
  }
  SUBCASE("hyperfine triplet") {
    const auto d = build_spectral_distribution(LineShape::HyperfineTriplet, kTwoPi * 0.2e6, 3);
    REQUIRE(d.bins.size() == 3);
    CHECK(d.bins[0].detuning == Approx(-kNitrogenHyperfine));
    CHECK(d.bins[1].detuning == Approx(0.0));
    CHECK(d.bins[2].detuning == Approx(kNitrogenHyperfine));
  }
  SUBCASE("unsupported tag") { CHECK_THROWS_AS(parse_line_shape("voigt"), UnsupportedShapeError); }
  SUBCASE("offsets") {
    const auto base = build_spectral_distribution(LineShape::Gaussian, 0.0, 1);
    const auto d = superpose_offsets(base, {-1.0, 1.0});
    REQUIRE(d.bins.size() == 2);
    CHECK(d.total_weight() == Approx(1.0));
    CHECK(d.mean_detuning() == Approx(0.0));
  }
}
