// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "superrad/analysis.hpp"
#include "superrad/dicke_engine.hpp"
#include "superrad/exact_engine.hpp"
#include "superrad/model_core.hpp"
#include "superrad/runner.hpp"
#include "superrad/scenario.hpp"
#include "superrad/semiclassical_engine.hpp"
#include "superrad/units.hpp"

using namespace superrad;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double peak(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

PhysicalParams oracle_params(std::int64_t n, double g_over_kappa) {
  PhysicalParams p;
  p.kappa = kTwoPi * 10e6;
  p.g = g_over_kappa * p.kappa;
  p.n_spins = n;
  return p;
}

Outcome oracle_equivalence() {
  double worst_ratio = 0.0;
  std::string detail;
  for (int n : {2, 3, 4}) {
    const auto p = oracle_params(n, 1e-2);
    const double gp = purcell_rate(p.g, p.kappa);
    const auto grid = uniform_grid(8.0 / gp, 401);
    auto ladder = dicke::LadderState::inverted(n);
    const auto a = dicke::evolve_ladder(ladder, dicke::build_generator(p, n), p, grid);
    const exact::HilbertSpec spec{n, 3, 4096};
    auto rho = exact::DensityState::inverted(spec);
    const auto b = exact::evolve(rho, exact::build_liouvillian(p, spec, std::vector<double>(n, 0.0), 0.0), grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) worst = std::max(worst, std::abs(a.s_z[i] - b.s_z[i]));
    worst_ratio = std::max(worst_ratio, worst / (1e-2 * n));
    detail += "N=" + std::to_string(n) + fmt(" dev %.2e; ", worst);
  }
  return {worst_ratio <= 1.0, detail + "limit 1e-2*N"};
}

Outcome purcell_limit() {
  const auto p = oracle_params(1, 1e-3);
  const double gp = purcell_rate(p.g, p.kappa);
  const exact::HilbertSpec spec{1, 3, 4096};
  auto rho = exact::DensityState::inverted(spec);
  const auto tr = exact::evolve(rho, exact::build_liouvillian(p, spec, std::vector<double>{0.0}, 0.0), uniform_grid(3.0 / gp, 301));
  std::vector<double> excited;
  for (double z : tr.s_z) excited.push_back(z + 0.5);
  const double rate = analysis::fit_exponential_rate(tr.times, excited);
  const double rel = std::abs(rate / gp - 1.0);
  return {rel <= 0.01, fmt("fitted %.6e rad/s vs 4g^2/kappa %.6e rad/s", rate, gp) + fmt(", rel. error %.2e", rel)};
}

Outcome ideal_scaling() {
  std::vector<analysis::ScalingPoint> pts;
  for (std::int64_t n : {64, 128, 256, 512}) {
    PhysicalParams p;
    p.kappa = 1.0;
    p.g = 1e-3;
    p.n_spins = n;
    const double gp = purcell_rate(p.g, p.kappa);
    const double t_end = 4.0 * std::log(static_cast<double>(n)) / (gp * static_cast<double>(n));
    auto s = dicke::LadderState::inverted(n);
    const auto tr = dicke::evolve_ladder(s, dicke::build_generator(p, n), p, uniform_grid(t_end, 4001));
    pts.push_back({static_cast<double>(n), peak(tr.intensity)});
  }
  const auto fit = analysis::fit_scaling(pts);
  return {std::abs(fit.exponent - 2.0) <= 0.05, fmt("alpha = %.4f (target 2 +/- 0.05)", fit.exponent)};
}

Outcome dephased_scaling() {
  RunOptions opt;
  const auto art = execute_scenario(preset("fig4"), opt);
  if (!art.scaling) return {false, "no scaling fit produced"};
  const double a = art.scaling->exponent;
  return {a > 1.0 && a < 2.0, fmt("fig4 preset alpha = %.4f (required 1 < alpha < 2)", a)};
}

Outcome burst_phenomenology() {
  const auto art = execute_scenario(preset("fig2"));
  if (!art.power_map || !art.power_map->threshold_amplitude) return {false, "no power map or threshold"};
  const auto& m = *art.power_map;
  const std::size_t k = static_cast<std::size_t>(
      std::find(m.amplitudes.begin(), m.amplitudes.end(), *m.threshold_amplitude) - m.amplitudes.begin());
  // (a) amplitudes that leave the ensemble uninverted emit no burst
  bool a = true;
  int uninverted = 0;
  for (std::size_t j = 0; j < k; ++j)
    if (m.post_pulse_s_z[j] < 0.0) {
      ++uninverted;
      a = a && !m.bursts[j].detected;
    }
  a = a && uninverted > 0;
  // (b) the longest delay sits at the inversion-maximizing amplitude
  bool b = m.bursts[k].detected;
  for (std::size_t j = 0; j < m.amplitudes.size(); ++j)
    if (m.bursts[j].detected && j != k) b = b && m.bursts[j].delay < m.bursts[k].delay;
  // (c) delays shrink monotonically above it
  bool c = k + 1 < m.amplitudes.size();
  for (std::size_t j = k + 1; j < m.amplitudes.size(); ++j)
    c = c && m.bursts[j].detected && m.bursts[j].delay < m.bursts[j - 1].delay;
  std::string d = std::string("(a) ") + (a ? "ok" : "violated") + ", (b) " + (b ? "ok" : "violated") + ", (c) " +
                  (c ? "ok" : "violated") + fmt("; threshold %.4e Hz", hz_from_angular(*m.threshold_amplitude)) +
                  fmt(", max delay %.3e s", m.bursts[k].delay);
  return {a && b && c, d};
}

Outcome eq1_transcription() {
  const auto s = preset("fig3");
  const auto art = execute_scenario(s);
  const auto& tr = art.runs.at(0).trajectory;
  const auto p = to_params(s);
  const auto pulse = to_pulse(s);
  std::vector<double> deriv, resid;
  for (std::size_t i = 1; i + 1 < tr.size(); ++i) {
    if (tr.segment[i - 1] != tr.segment[i + 1]) continue;
    const double d = (tr.s_z[i + 1] - tr.s_z[i - 1]) / (tr.times[i + 1] - tr.times[i - 1]);
    const double eta = pulse.segments[static_cast<std::size_t>(tr.segment[i])].eta;
    deriv.push_back(std::abs(d));
    resid.push_back(std::abs(d - semiclassical::inversion_rate(tr.s_y[i], tr.s_z[i], tr.spsm[i], eta, p)));
  }
  const double ratio = peak(resid) / peak(deriv);
  return {ratio <= 0.01, fmt("max residual / max|dS_z/dt| = %.2e on the fig3 trajectory", ratio)};
}

Outcome tanh_decay() {
  const std::int64_t n = 512;
  PhysicalParams p;
  p.kappa = 1.0;
  p.g = 1e-3;
  p.n_spins = n;
  const double gp = purcell_rate(p.g, p.kappa);
  const double t_end = 3.0 * std::log(512.0) / (gp * 512.0);
  auto s = dicke::LadderState::inverted(n);
  const auto tr = dicke::evolve_ladder(s, dicke::build_generator(p, n), p, uniform_grid(t_end, 2001));
  const auto fit = analysis::fit_tanh(tr.times, tr.s_z);
  const double rel = fit.residual_max / 512.0;
  return {rel <= 0.02, fmt("max residual %.3f = %.3f%% of N", fit.residual_max, 100 * rel)};
}

Outcome level_structure() {
  const double wc = kTwoPi * 3.18e9;
  struct Expect {
    Vec3 dir;
    std::vector<std::pair<double, int>> fields;
  };
  const std::vector<Expect> cases{{{1, 1, 1}, {{10.79, 1}, {32.36, 3}}},
                                  {{1, 1, 0}, {{13.21, 2}}},
                                  {{1, 0, 0}, {{18.68, 4}}}};
  bool ok = true;
  std::string d;
  double worst = 0.0;
  for (const auto& c : cases) {
    const auto got = resonance_fields(c.dir, wc);
    if (got.size() != c.fields.size()) {
      ok = false;
      continue;
    }
    for (std::size_t i = 0; i < got.size(); ++i) {
      const double mt = millitesla_from_tesla(got[i].field);
      worst = std::max(worst, std::abs(mt - c.fields[i].first));
      ok = ok && got[i].count == c.fields[i].second && std::abs(mt - c.fields[i].first) <= 0.01;
      d += fmt("%.2f mT", mt) + " x" + std::to_string(got[i].count) + "; ";
    }
  }
  return {ok, d + fmt("worst deviation %.4f mT", worst)};
}

Outcome thermal() {
  const double d = kBoltzmann * 0.138 / kHbar;
  const double pop = thermal_ground_population(0.025, d);
  return {pop >= 0.99, fmt("ground population %.5f at 25 mK", pop)};
}

Eigen::MatrixXcd random_density(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXcd x(d, d);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = {n(rng), n(rng)};
  Eigen::MatrixXcd rho = x * x.adjoint();
  return rho / rho.trace();
}

Outcome conservation_suite() {
  std::mt19937_64 rng(20241015);
  std::uniform_int_distribution<int> spins(1, 3), fock(2, 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int failures = 0;
  double worst_trace = 0.0, worst_eig = 0.0, worst_book = 0.0, worst_herm = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const int n = spins(rng);
    const exact::HilbertSpec spec{n, fock(rng), 4096};
    PhysicalParams p;
    p.kappa = kTwoPi * 1e6 * (1.0 + 9.0 * u(rng));
    p.g = p.kappa * 0.1 * u(rng);
    p.gamma_perp = p.kappa * 0.05 * u(rng);
    p.delta_c = p.kappa * (u(rng) - 0.5) * 0.2;
    p.n_spins = n;
    std::vector<double> det;
    for (int j = 0; j < n; ++j) det.push_back(p.kappa * (u(rng) - 0.5) * 0.1);
    const auto grid = uniform_grid(20.0 / p.kappa, 41);
    exact::SolverOptions opt;

    // Trace and positivity with every channel and a drive switched on.
    auto q = p;
    q.gamma_par = p.kappa * 0.05 * u(rng);
    auto rho = exact::DensityState(random_density(spec.dimension(), rng));
    const auto driven = exact::build_liouvillian(q, spec, det, p.kappa * 0.2 * u(rng));
    for (int w = 0; w < 3; ++w) {
      exact::evolve(rho, driven, grid, opt);
      const auto c = rho.check();
      worst_trace = std::max(worst_trace, c.trace_error);
      worst_herm = std::max(worst_herm, c.hermiticity_error);
      worst_eig = std::min(worst_eig, c.min_eigenvalue);
      if (!c.valid(1e-10, 1e-10, 1e-8)) ++failures;
    }

    // Excitation bookkeeping: undriven, no population relaxation.
    auto book = exact::DensityState(random_density(spec.dimension(), rng));
    const auto tr = exact::evolve(book, exact::build_liouvillian(p, spec, det, 0.0), grid, opt);
    const double half_n = 0.5 * n;
    const double total0 = tr.s_z[0] + half_n + tr.photons[0] + tr.emitted[0];
    for (std::size_t i = 0; i < tr.size(); ++i) {
      const double drift = std::abs(tr.s_z[i] + half_n + tr.photons[i] + tr.emitted[i] - total0);
      worst_book = std::max(worst_book, drift / std::max(1.0, total0));
      if (drift > 10 * opt.tolerance * std::max(1.0, total0)) ++failures;
    }
  }
  return {failures == 0, std::to_string(failures) + " violations; worst trace error " + fmt("%.2e", worst_trace) + fmt(", hermiticity error %.2e", worst_herm) +
                             fmt(", min eigenvalue %.2e", worst_eig) + fmt(", bookkeeping drift %.2e", worst_book)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"oracle equivalence (dicke vs exact, N = 2, 3, 4)", oracle_equivalence},
      {"Purcell limit (exact N = 1 decay at 4 g^2 / kappa)", purcell_limit},
      {"ideal scaling (dicke N = 64..512, alpha = 2)", ideal_scaling},
      {"dephased scaling (fig4 preset, 1 < alpha < 2)", dephased_scaling},
      {"burst phenomenology (fig2 power map)", burst_phenomenology},
      {"inversion equation transcription", eq1_transcription},
      {"tanh decay fit (dicke N = 512)", tanh_decay},
      {"NV resonance fields", level_structure},
      {"thermal polarization at 25 mK", thermal},
      {"exact-engine conservation suite (100 random instances)", conservation_suite},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %zu: %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(),
                secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
