#include "superrad/model_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "superrad/errors.hpp"

namespace superrad {

namespace {

void require_finite_nonneg(double v, const char* name) {
  if (!std::isfinite(v)) throw ValidationError(std::string(name) + " is not finite");
  if (v < 0.0) throw ValidationError(std::string(name) + " must be >= 0");
}

double norm3(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

}  // namespace

void PhysicalParams::validate() const {
  require_finite_nonneg(g, "g");
  require_finite_nonneg(kappa, "kappa");
  require_finite_nonneg(gamma_perp, "gamma_perp");
  require_finite_nonneg(gamma_par, "gamma_par");
  if (!std::isfinite(delta_c)) throw ValidationError("delta_c is not finite");
  if (!(kappa > 0.0)) throw ValidationError("kappa must be > 0");
  if (!(kappa_out >= 0.0 && kappa_out <= 1.0)) throw ValidationError("kappa_out must lie in [0, 1]");
  if (n_spins < 1) throw ValidationError("n_spins must be >= 1");
  if (temperature && !(std::isfinite(*temperature) && *temperature > 0.0))
    throw ValidationError("temperature must be > 0");
}

double PhysicalParams::collective_coupling() const {
  return g * std::sqrt(static_cast<double>(n_spins));
}

double coupling_for_collective(double collective_coupling, std::int64_t n_spins) {
  if (n_spins < 1) throw ValidationError("n_spins must be >= 1");
  return collective_coupling / std::sqrt(static_cast<double>(n_spins));
}

PulseSequence PulseSequence::rectangular(double drive_duration, double eta,
                                         double release_duration) {
  PulseSequence p;
  p.segments.push_back({drive_duration, eta});
  if (release_duration > 0.0) p.segments.push_back({release_duration, 0.0});
  return p;
}

PulseSequence PulseSequence::free_decay(double duration) {
  return PulseSequence{{{duration, 0.0}}};
}

double PulseSequence::total_duration() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration;
  return t;
}

double PulseSequence::segment_start(std::size_t i) const {
  double t = 0.0;
  for (std::size_t k = 0; k < i && k < segments.size(); ++k) t += segments[k].duration;
  return t;
}

double PulseSequence::drive_off_time() const {
  double t = 0.0;
  double off = 0.0;
  for (const auto& s : segments) {
    t += s.duration;
    if (s.eta != 0.0) off = t;
  }
  return off;
}

double PulseSequence::max_amplitude() const {
  double m = 0.0;
  for (const auto& s : segments) m = std::max(m, std::abs(s.eta));
  return m;
}

void PulseSequence::validate() const {
  if (segments.empty()) throw ValidationError("pulse sequence has no segments");
  for (const auto& s : segments) {
    if (!(std::isfinite(s.duration) && s.duration > 0.0))
      throw ValidationError("pulse segment durations must be > 0");
    if (!std::isfinite(s.eta)) throw ValidationError("pulse amplitude is not finite");
  }
}

double purcell_rate(double g, double kappa) {
  if (kappa == 0.0) throw SingularParameterError("purcell_rate: kappa = 0");
  return 4.0 * g * g / kappa;
}

const HierarchyCheck& ValidationReport::tightest() const {
  return *std::min_element(checks.begin(), checks.end(),
                           [](const auto& a, const auto& b) { return a.margin < b.margin; });
}

ValidationReport validate_fast_cavity(const PhysicalParams& params, double collective_coupling,
                                      double rabi_rate) {
  for (double v : {params.kappa, params.gamma_perp, params.gamma_par, collective_coupling, rabi_rate})
    if (!std::isfinite(v)) throw ValidationError("validate_fast_cavity: non-finite input");
  params.validate();

  ValidationReport report;
  report.kappa = params.kappa;
  auto add = [&](std::string name, double value) {
    HierarchyCheck c{std::move(name), std::abs(value), 0.0, false};
    c.margin = c.value == 0.0 ? std::numeric_limits<double>::infinity() : params.kappa / c.value;
    c.satisfied = c.margin > 1.0;
    report.checks.push_back(std::move(c));
  };
  add("collective_coupling", collective_coupling);
  add("gamma_perp", params.gamma_perp);
  add("gamma_par", params.gamma_par);
  add("rabi_rate", rabi_rate);

  report.passed = std::all_of(report.checks.begin(), report.checks.end(),
                              [](const auto& c) { return c.satisfied; });
  return report;
}

std::array<Vec3, 4> NVLevelModel::default_axes() {
  const double s = 1.0 / std::sqrt(3.0);
  return {{{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}}};
}

std::array<double, 4> zeeman_projections(const Vec3& field_direction, const NVLevelModel& model) {
  const double n = norm3(field_direction);
  if (!(n > 0.0) || !std::isfinite(n))
    throw InvalidDirectionError("zeeman_projections: field direction must be non-zero");
  std::array<double, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& a = model.axes[i];
    out[i] = (a[0] * field_direction[0] + a[1] * field_direction[1] + a[2] * field_direction[2]) / n;
  }
  return out;
}

std::vector<ResonanceField> resonance_fields(const Vec3& direction, double cavity_freq,
                                             const NVLevelModel& model) {
  if (!(cavity_freq > model.d_zfs))
    throw DomainError("resonance_fields: cavity frequency must exceed the zero-field splitting");
  const auto proj = zeeman_projections(direction, model);

  constexpr double kSameProjection = 1e-9;
  std::vector<std::pair<double, int>> groups;  // |p|, multiplicity
  for (double p : proj) {
    const double a = std::abs(p);
    if (a < kSameProjection) continue;
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& gp) { return std::abs(gp.first - a) < kSameProjection; });
    if (it == groups.end())
      groups.emplace_back(a, 1);
    else
      ++it->second;
  }
  if (groups.empty()) throw NoResonanceError("resonance_fields: field is perpendicular to every NV axis");

  std::vector<ResonanceField> out;
  for (const auto& [p, count] : groups) out.push_back({(cavity_freq - model.d_zfs) / (model.mu * p), count});
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.field < b.field; });
  return out;
}

double thermal_ground_population(double temperature, double d_zfs) {
  if (!(temperature > 0.0)) throw DomainError("thermal_ground_population: temperature must be > 0");
  const double x = kHbar * d_zfs / (kBoltzmann * temperature);
  return 1.0 / (1.0 + 2.0 * std::exp(-x));
}

}  // namespace superrad
