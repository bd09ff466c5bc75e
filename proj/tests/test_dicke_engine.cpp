#include <doctest.h>

#include <cmath>

#include "superrad/analysis.hpp"
#include "superrad/dicke_engine.hpp"
#include "superrad/errors.hpp"
#include "superrad/exact_engine.hpp"
#include "superrad/units.hpp"

using namespace superrad;
using namespace superrad::dicke;
using doctest::Approx;

namespace {

PhysicalParams params(std::int64_t n, double g = 1e-3, double kappa = 1.0) {
  PhysicalParams p;
  p.kappa = kappa;
  p.g = g;
  p.n_spins = n;
  return p;
}

}  // namespace

TEST_CASE("ladder rates") {
  for (std::int64_t n : {1, 2, 5, 10, 64}) {
    const auto p = params(n);
    const auto gen = build_generator(p, n);
    const double gp = purcell_rate(p.g, p.kappa);
    REQUIRE(gen.rates.size() == static_cast<std::size_t>(n) + 1);
    CHECK(gen.purcell == Approx(gp));
    CHECK(gen.rates.front() == Approx(gp * static_cast<double>(n)));
    CHECK(gen.rates.back() == 0.0);
    if (n % 2 == 0) {
      const double j = 0.5 * static_cast<double>(n);
      CHECK(gen.rates[static_cast<std::size_t>(n / 2)] == Approx(gp * j * (j + 1)));
    }
    for (double r : gen.rates) CHECK(r >= 0.0);
  }
}

TEST_CASE("longitudinal relaxation adds gamma_par per excitation") {
  auto p = params(4);
  p.gamma_par = 0.01;
  const auto gen = build_generator(p, 4);
  const double gp = purcell_rate(p.g, p.kappa);
  for (std::size_t k = 0; k <= 4; ++k) {
    const double j = 2.0, m = j - static_cast<double>(k);
    CHECK(gen.rates[k] == Approx(gp * (j + m) * (j - m + 1) + p.gamma_par * (j + m)));
  }
}

TEST_CASE("ladder state invariants") {
  auto s = LadderState::inverted(3);
  CHECK(s.total() == 1.0);
  CHECK_NOTHROW(s.validate());
  s.populations[1] = -0.1;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  LadderState short_state{3, {1.0, 0.0}};
  CHECK_THROWS_AS(short_state.validate(), ValidationError);
  CHECK_THROWS_AS(LadderState::inverted(0), ValidationError);
}

TEST_CASE("ground ladder is a fixed point") {
  const auto p = params(8);
  auto s = LadderState::ground(8);
  const auto tr = evolve_ladder(s, build_generator(p, 8), p, uniform_grid(1e6, 11));
  for (std::size_t i = 0; i < tr.size(); ++i) {
    CHECK(tr.s_z[i] == -4.0);
    CHECK(tr.spsm[i] == 0.0);
    CHECK(tr.intensity[i] == 0.0);
  }
}

TEST_CASE("probability conservation and monotone inversion") {
  const std::int64_t n = 40;
  const auto p = params(n);
  const auto gen = build_generator(p, n);
  const double gp = purcell_rate(p.g, p.kappa);
  auto s = LadderState::inverted(n);
  const double t_end = 10 * std::log(40.0) / (gp * 40.0);
  // Evolve in short windows so the total is checked along the way.
  double prev_sz = 20.0;
  for (int w = 0; w < 20; ++w) {
    const auto tr = evolve_ladder(s, gen, p, uniform_grid(t_end / 20, 21));
    CHECK(std::abs(s.total() - 1.0) < 1e-10);
    for (double pop : s.populations) CHECK(pop >= -1e-8);  // documented numerical slack
    for (double z : tr.s_z) {
      CHECK(z <= prev_sz + 1e-9 * static_cast<double>(n));  // solver tolerance
      prev_sz = z;
    }
  }
}

TEST_CASE("intensity and photon number follow the correlation") {
  const std::int64_t n = 10;
  auto p = params(n, 2e-3);
  p.kappa_out = 0.7;
  const auto gen = build_generator(p, n);
  auto s = LadderState::inverted(n);
  const double gp = purcell_rate(p.g, p.kappa);
  const auto tr = evolve_ladder(s, gen, p, uniform_grid(3.0 / gp, 101));
  for (std::size_t i = 0; i < tr.size(); ++i) {
    CHECK(tr.intensity[i] == Approx(0.7 * gp * tr.spsm[i]));
    CHECK(tr.photons[i] == Approx(4 * p.g * p.g / (p.kappa * p.kappa) * tr.spsm[i]));
  }
  CHECK(tr.emitted.back() == Approx(0.7 * 10.0).epsilon(1e-3));
}

TEST_CASE("Dicke delay estimate ln(N) / (N Gamma_P)") {
  for (std::int64_t n : {100, 1000}) {
    const auto p = params(n);
    const double gp = purcell_rate(p.g, p.kappa);
    const double estimate = std::log(static_cast<double>(n)) / (gp * static_cast<double>(n));
    auto s = LadderState::inverted(n);
    const auto tr = evolve_ladder(s, build_generator(p, n), p, uniform_grid(4 * estimate, 4001));
    const auto b = analysis::detect_burst(tr, 0.0);
    CHECK(b.detected);
    CHECK(b.delay == Approx(estimate).epsilon(0.25));
  }
}

TEST_CASE("N = 2 ladder matches the full Lindblad solution") {
  PhysicalParams p;
  p.kappa = kTwoPi * 10e6;
  p.g = 1e-2 * p.kappa;
  p.n_spins = 2;
  const double gp = purcell_rate(p.g, p.kappa);
  const auto grid = uniform_grid(8.0 / gp, 401);
  auto ladder = LadderState::inverted(2);
  const auto a = evolve_ladder(ladder, build_generator(p, 2), p, grid);
  const exact::HilbertSpec spec{2, 4, 1024};
  auto rho = exact::DensityState::inverted(spec);
  const auto b = exact::evolve(rho, exact::build_liouvillian(p, spec, std::vector<double>(2, 0.0), 0.0), grid);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) worst = std::max(worst, std::abs(a.s_z[i] - b.s_z[i]));
  CHECK(worst <= 1e-3 * 2);
}

TEST_CASE("correlation split") {
  SUBCASE("fully inverted: N excitations, no interference") {
    const auto s = correlation_at(6, 3.0);
    CHECK(s.total == 6.0);
    CHECK(s.excitation == 6.0);
    CHECK(s.interference == 0.0);
  }
  SUBCASE("half decayed: interference N^2 / 4") {
    const auto s = correlation_at(8, 0.0);
    CHECK(s.total == Approx(4.0 * 5.0));
    CHECK(s.excitation == Approx(4.0));
    CHECK(s.interference == Approx(16.0));
  }
  SUBCASE("ground: nothing") {
    const auto s = correlation_at(5, -2.5);
    CHECK(s.total == 0.0);
    CHECK(s.excitation == 0.0);
    CHECK(s.interference == 0.0);
  }
  SUBCASE("single spin has no enhancement") {
    const auto s = peak_correlation(1);
    CHECK(s.total == 1.0);
    CHECK(s.interference == 0.0);
  }
  SUBCASE("peak equals j(j+1) and is the maximum over the ladder") {
    for (std::int64_t n : {2, 3, 7, 10, 33}) {
      const double j = 0.5 * static_cast<double>(n);
      const auto peak = peak_correlation(n);
      CHECK(peak.total == Approx(n % 2 ? (j + 0.5) * (j + 0.5) : j * (j + 1)));
      for (std::int64_t k = 0; k <= n; ++k) CHECK(correlation_at(n, j - static_cast<double>(k)).total <= peak.total + 1e-12);
      CHECK(peak.excitation + peak.interference == Approx(peak.total));
    }
  }
  SUBCASE("out of range m") { CHECK_THROWS_AS(correlation_at(4, 2.5), DomainError); }
}
