#include "superrad/exact_engine.hpp"

#include <cmath>
#include <string>

#include "superrad/errors.hpp"
#include "superrad/ode.hpp"

namespace superrad::exact {

namespace {

using Complex = std::complex<double>;
using Triplet = Eigen::Triplet<Complex>;
constexpr Complex kI{0.0, 1.0};

SparseMatrixC from_triplets(std::size_t d, const std::vector<Triplet>& t) {
  SparseMatrixC m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrixC identity(std::size_t d) {
  SparseMatrixC m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  m.setIdentity();
  return m;
}

SparseMatrixC kron(const SparseMatrixC& a, const SparseMatrixC& b) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (int ka = 0; ka < a.outerSize(); ++ka)
    for (SparseMatrixC::InnerIterator ia(a, ka); ia; ++ia)
      for (int kb = 0; kb < b.outerSize(); ++kb)
        for (SparseMatrixC::InnerIterator ib(b, kb); ib; ++ib)
          t.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                         ia.value() * ib.value());
  SparseMatrixC m(a.rows() * b.rows(), a.cols() * b.cols());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

void check_detunings(const HilbertSpec& spec, std::span<const double> detunings) {
  if (detunings.size() != static_cast<std::size_t>(spec.n_spins))
    throw ValidationError("exact engine: expected " + std::to_string(spec.n_spins) + " detunings, got " +
                          std::to_string(detunings.size()));
}

}  // namespace

std::size_t HilbertSpec::dimension() const {
  return (std::size_t{1} << n_spins) * static_cast<std::size_t>(n_fock);
}

void HilbertSpec::validate() const {
  if (n_spins < 1) throw ValidationError("HilbertSpec: n_spins must be >= 1");
  if (n_fock < 2) throw ValidationError("HilbertSpec: n_fock must be >= 2");
  if (n_spins > 20 || dimension() > max_dimension)
    throw CapacityError("HilbertSpec: dimension 2^" + std::to_string(n_spins) + " x " +
                        std::to_string(n_fock) + " exceeds the bound " + std::to_string(max_dimension));
}

int HilbertSpec::default_fock(double eta, double kappa) {
  const double amp = 2.0 * eta / kappa;
  return static_cast<int>(std::ceil(amp * amp)) + 8;
}

SparseMatrixC annihilation(const HilbertSpec& spec) {
  std::vector<Triplet> t;
  const std::size_t masks = std::size_t{1} << spec.n_spins;
  for (std::size_t s = 0; s < masks; ++s)
    for (int n = 1; n < spec.n_fock; ++n)
      t.emplace_back(s * spec.n_fock + n - 1, s * spec.n_fock + n, std::sqrt(static_cast<double>(n)));
  return from_triplets(spec.dimension(), t);
}

SparseMatrixC spin_lowering(const HilbertSpec& spec, int j) {
  std::vector<Triplet> t;
  const std::size_t masks = std::size_t{1} << spec.n_spins;
  const std::size_t bit = std::size_t{1} << j;
  for (std::size_t s = 0; s < masks; ++s) {
    if (!(s & bit)) continue;
    for (int n = 0; n < spec.n_fock; ++n) t.emplace_back((s & ~bit) * spec.n_fock + n, s * spec.n_fock + n, 1.0);
  }
  return from_triplets(spec.dimension(), t);
}

SparseMatrixC spin_z(const HilbertSpec& spec, int j) {
  std::vector<Triplet> t;
  const std::size_t masks = std::size_t{1} << spec.n_spins;
  const std::size_t bit = std::size_t{1} << j;
  for (std::size_t s = 0; s < masks; ++s)
    for (int n = 0; n < spec.n_fock; ++n) {
      const std::size_t i = s * spec.n_fock + n;
      t.emplace_back(i, i, (s & bit) ? 1.0 : -1.0);
    }
  return from_triplets(spec.dimension(), t);
}

DensityState::DensityState(Eigen::MatrixXcd rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() == 0) throw ValidationError("density matrix must be square");
}

DensityState DensityState::basis(const HilbertSpec& spec, std::uint32_t spin_mask, int photons) {
  spec.validate();
  if (photons < 0 || photons >= spec.n_fock || spin_mask >= (1u << spec.n_spins))
    throw ValidationError("basis state outside the Hilbert space");
  const auto d = static_cast<Eigen::Index>(spec.dimension());
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
  const auto i = static_cast<Eigen::Index>(spin_mask) * spec.n_fock + photons;
  rho(i, i) = 1.0;
  return DensityState(std::move(rho));
}

DensityState DensityState::ground(const HilbertSpec& spec) { return basis(spec, 0, 0); }

DensityState DensityState::inverted(const HilbertSpec& spec) {
  return basis(spec, (1u << spec.n_spins) - 1u, 0);
}

DensityState::Check DensityState::check() const {
  Check c;
  c.hermiticity_error = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
  c.trace_error = std::abs(rho_.trace() - 1.0);
  const Eigen::MatrixXcd herm = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  c.min_eigenvalue = es.eigenvalues().minCoeff();
  return c;
}

Liouvillian::Liouvillian(const PhysicalParams& params, const HilbertSpec& spec, std::vector<double> detunings,
                         double eta)
    : params_(params), spec_(spec), detunings_(std::move(detunings)), eta_(eta) {
  params_.validate();
  spec_.validate();
  check_detunings(spec_, detunings_);
  if (!std::isfinite(eta_)) throw ValidationError("drive amplitude is not finite");

  const SparseMatrixC a = annihilation(spec_);
  const SparseMatrixC ad = a.adjoint();

  SparseMatrixC h = params_.delta_c * SparseMatrixC(ad * a);
  h += Complex(eta_) * kI * SparseMatrixC(ad - a);
  for (int j = 0; j < spec_.n_spins; ++j) {
    const SparseMatrixC sm = spin_lowering(spec_, j);
    const SparseMatrixC sp = sm.adjoint();
    h += (0.5 * detunings_[static_cast<std::size_t>(j)]) * spin_z(spec_, j);
    h += Complex(params_.g) * kI * SparseMatrixC(ad * sm - sp * a);
  }
  h.prune(Complex(0.0));
  hamiltonian_ = h;

  auto add_jump = [&](double rate, const SparseMatrixC& op) {
    if (rate <= 0.0) return;
    jumps_.push_back(std::sqrt(rate) * op);
  };
  add_jump(params_.kappa, a);
  for (int j = 0; j < spec_.n_spins; ++j) add_jump(params_.gamma_par, spin_lowering(spec_, j));
  for (int j = 0; j < spec_.n_spins; ++j) add_jump(0.5 * params_.gamma_perp, spin_z(spec_, j));

  h_eff_ = hamiltonian_;
  for (const auto& c : jumps_) {
    jumps_adj_.push_back(c.adjoint());
    h_eff_ -= Complex(0.0, 0.5) * SparseMatrixC(jumps_adj_.back() * c);
  }
  h_eff_.makeCompressed();
}

void Liouvillian::apply(Eigen::Ref<const Eigen::MatrixXcd> rho, Eigen::Ref<Eigen::MatrixXcd> out) const {
  // -i (H_eff rho - rho H_eff') + sum c rho c'. Valid for any rho: round-off
  // in the anti-Hermitian part must see the true generator, otherwise it can
  // grow without bound over long runs.
  const Eigen::MatrixXcd rho_adj = rho.adjoint();
  const Eigen::MatrixXcd t = h_eff_ * rho;
  const Eigen::MatrixXcd u = h_eff_ * rho_adj;
  out = -kI * t + kI * u.adjoint();
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    // c rho c' = (c (c rho)')'
    const Eigen::MatrixXcd x = jumps_[k] * rho;
    const Eigen::MatrixXcd y = jumps_[k] * x.adjoint();
    out += y.adjoint();
  }
}

SparseMatrixC Liouvillian::superoperator() const {
  const std::size_t d = spec_.dimension();
  const SparseMatrixC id = identity(d);
  // vec(A rho B) = (B^T kron A) vec(rho).
  SparseMatrixC l = kron(id, SparseMatrixC(-kI * h_eff_));
  l += kron(SparseMatrixC(kI * SparseMatrixC(h_eff_.conjugate())), id);
  for (const auto& c : jumps_) l += kron(SparseMatrixC(c.conjugate()), c);
  l.prune(Complex(0.0));
  return l;
}

Liouvillian build_liouvillian(const PhysicalParams& params, const HilbertSpec& spec,
                              std::span<const double> detunings, double eta) {
  return Liouvillian(params, spec, std::vector<double>(detunings.begin(), detunings.end()), eta);
}

Observables::Observables(const HilbertSpec& spec) {
  const std::size_t d = spec.dimension();
  a = annihilation(spec);
  photons = a.adjoint() * a;
  SparseMatrixC sm(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  s_z = SparseMatrixC(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (int j = 0; j < spec.n_spins; ++j) {
    sm += spin_lowering(spec, j);
    s_z += 0.5 * spin_z(spec, j);
  }
  const SparseMatrixC sp = sm.adjoint();
  spsm = sp * sm;
  s_x = 0.5 * SparseMatrixC(sp + sm);
  s_y = Complex(0.0, -0.5) * SparseMatrixC(sp - sm);

  std::vector<Triplet> t;
  const std::size_t masks = std::size_t{1} << spec.n_spins;
  for (std::size_t s = 0; s < masks; ++s) {
    const std::size_t i = s * spec.n_fock + spec.n_fock - 1;
    t.emplace_back(i, i, 1.0);
  }
  top_fock = from_triplets(d, t);
}

std::complex<double> Observables::expect(const SparseMatrixC& op, Eigen::Ref<const Eigen::MatrixXcd> rho) {
  Complex acc = 0.0;
  for (int k = 0; k < op.outerSize(); ++k)
    for (SparseMatrixC::InnerIterator it(op, k); it; ++it) acc += it.value() * rho(it.col(), it.row());
  return acc;
}

namespace {

struct Window {
  double t0;
  double t1;
  int segment;
  bool include_start;
};

// Classical cavity field alpha(t) = ss + (alpha(t0) - ss) exp(-(kappa/2 + i delta_c)(t - t0)).
struct ClassicalField {
  Complex start = 0.0;
  Complex steady = 0.0;
  Complex pole = 0.0;
  double t0 = 0.0;
  Complex at(double t) const { return steady + (start - steady) * std::exp(-pole * (t - t0)); }
};

// Integrates one constant-generator window; the last component of the state
// vector accumulates emitted photons. With `field` set, the state lives in
// the frame displaced by the classical field.
void evolve_window(Eigen::VectorXcd& y, const Liouvillian& l, const Observables& obs,
                   std::span<const double> sample_times, const Window& w, const SolverOptions& options,
                   Trajectory& traj, const ClassicalField* field = nullptr, const SparseMatrixC* lowering = nullptr) {
  const auto d = static_cast<Eigen::Index>(l.spec().dimension());
  const double out_rate = l.params().kappa_out * l.params().kappa;
  const double g = l.params().g;

  auto lab_photons = [&](Eigen::Map<const Eigen::MatrixXcd>& rho, double t, Complex& a_lab) {
    const Complex b = Observables::expect(obs.a, rho);
    double n = Observables::expect(obs.photons, rho).real();
    a_lab = b;
    if (field) {
      const Complex alpha = field->at(t);
      a_lab += alpha;
      n += 2.0 * std::real(std::conj(alpha) * b) + std::norm(alpha);
    }
    return n;
  };

  Eigen::MatrixXcd x;
  const SparseMatrixC raising_storage = lowering ? SparseMatrixC(lowering->adjoint()) : SparseMatrixC();
  const SparseMatrixC* raising = &raising_storage;
  auto rhs = [&](double t, const Eigen::VectorXcd& state, Eigen::VectorXcd& dstate) {
    Eigen::Map<const Eigen::MatrixXcd> rho(state.data(), d, d);
    Eigen::Map<Eigen::MatrixXcd> drho(dstate.data(), d, d);
    l.apply(rho, drho);
    if (field) {
      // H_d = i g Y with Y = alpha* S- - alpha S+ (anti-Hermitian):
      // -i [H_d, rho] = Y rho - rho Y = Y rho + (Y rho')'.
      const Complex alpha = field->at(t);
      x = (g * std::conj(alpha)) * (*lowering * rho);
      x.noalias() -= (g * alpha) * (*raising * rho);
      drho += x;
      const Eigen::MatrixXcd rho_adj = rho.adjoint();
      x = (g * std::conj(alpha)) * (*lowering * rho_adj);
      x.noalias() -= (g * alpha) * (*raising * rho_adj);
      drho += x.adjoint();
    }
    Complex a_lab;
    dstate[d * d] = out_rate * lab_photons(rho, t, a_lab);
  };

  auto sample = [&](double t, const Eigen::VectorXcd& state) {
    Eigen::Map<const Eigen::MatrixXcd> rho(state.data(), d, d);
    Complex a_lab;
    const double n = lab_photons(rho, t, a_lab);
    traj.times.push_back(t);
    traj.s_x.push_back(Observables::expect(obs.s_x, rho).real());
    traj.s_y.push_back(Observables::expect(obs.s_y, rho).real());
    traj.s_z.push_back(Observables::expect(obs.s_z, rho).real());
    traj.spsm.push_back(Observables::expect(obs.spsm, rho).real());
    traj.photons.push_back(n);
    traj.field.push_back(a_lab);
    traj.intensity.push_back(out_rate * n);
    traj.emitted.push_back(state[d * d].real());
    traj.segment.push_back(w.segment);
    const double top = Observables::expect(obs.top_fock, rho).real();
    traj.max_top_fock_population = std::max(traj.max_top_fock_population, top);
    if (top > options.top_fock_threshold) traj.fock_truncation_flagged = true;
  };

  std::vector<double> window_samples;
  for (double t : sample_times)
    if ((t > w.t0 || (w.include_start && t == w.t0)) && t <= w.t1) window_samples.push_back(t);

  OdeOptions opt;
  opt.rtol = options.tolerance;
  opt.atol = options.tolerance;
  // The generator maps Hermitian to Hermitian, but explicit steps near the
  // stability edge let round-off in the anti-Hermitian part grow to the
  // error tolerance. Projecting it out after each step is exact.
  Eigen::MatrixXcd herm;
  auto project = [&](Eigen::VectorXcd& v) {
    Eigen::Map<Eigen::MatrixXcd> m(v.data(), d, d);
    herm = 0.5 * (m + m.adjoint());
    m = herm;
  };
  integrate_dopri5(rhs, y, w.t0, w.t1, window_samples, opt, sample, project);
}

Eigen::VectorXcd pack(const DensityState& state, double emitted) {
  const auto& rho = state.matrix();
  const auto n = rho.size();
  Eigen::VectorXcd y(n + 1);
  y.head(n) = Eigen::Map<const Eigen::VectorXcd>(rho.data(), n);
  y[n] = emitted;
  return y;
}

void unpack(const Eigen::VectorXcd& y, DensityState& state) {
  auto& rho = state.matrix();
  rho = Eigen::Map<const Eigen::MatrixXcd>(y.data(), rho.rows(), rho.cols());
}

void check_state(const DensityState& state, const HilbertSpec& spec) {
  if (static_cast<std::size_t>(state.matrix().rows()) != spec.dimension())
    throw ValidationError("density matrix dimension does not match the Hilbert space");
}

void check_grid(std::span<const double> sample_times) {
  if (sample_times.empty() || sample_times.front() != 0.0)
    throw ValidationError("sample grid must start at t = 0");
  for (std::size_t i = 1; i < sample_times.size(); ++i)
    if (!(sample_times[i] > sample_times[i - 1])) throw ValidationError("sample times must increase strictly");
}

}  // namespace

Trajectory evolve(DensityState& state, const Liouvillian& liouvillian, std::span<const double> sample_times,
                  const SolverOptions& options) {
  check_state(state, liouvillian.spec());
  check_grid(sample_times);
  if (!(sample_times.back() > 0.0)) throw ValidationError("evolve: time span must be > 0");
  const Observables obs(liouvillian.spec());
  Trajectory traj;
  traj.n_spins = liouvillian.spec().n_spins;
  traj.reserve(sample_times.size());
  Eigen::VectorXcd y = pack(state, 0.0);
  evolve_window(y, liouvillian, obs, sample_times, {0.0, sample_times.back(), 0, true}, options, traj);
  unpack(y, state);
  return traj;
}

Trajectory drive_then_release(const HilbertSpec& spec, const PhysicalParams& params,
                              std::span<const double> detunings, const PulseSequence& pulse, DensityState& state,
                              std::span<const double> sample_times, const SolverOptions& options) {
  pulse.validate();
  check_state(state, spec);
  check_grid(sample_times);
  const Observables obs(spec);
  Trajectory traj;
  traj.n_spins = spec.n_spins;
  traj.reserve(sample_times.size());
  Eigen::VectorXcd y = pack(state, 0.0);
  SparseMatrixC lowering(static_cast<Eigen::Index>(spec.dimension()), static_cast<Eigen::Index>(spec.dimension()));
  if (options.displaced_frame)
    for (int j = 0; j < spec.n_spins; ++j) lowering += spin_lowering(spec, j);
  ClassicalField field;
  field.pole = Complex(0.5 * params.kappa, params.delta_c);
  double t0 = 0.0;
  for (std::size_t k = 0; k < pulse.segments.size(); ++k) {
    const auto& seg = pulse.segments[k];
    const double t1 = (k + 1 == pulse.segments.size()) ? pulse.total_duration() : t0 + seg.duration;
    const Window w{t0, t1, static_cast<int>(k), k == 0};
    if (options.displaced_frame) {
      field.start = field.at(t0);
      field.t0 = t0;
      field.steady = seg.eta / field.pole;
      const Liouvillian l = build_liouvillian(params, spec, detunings, 0.0);
      evolve_window(y, l, obs, sample_times, w, options, traj, &field, &lowering);
    } else {
      const Liouvillian l = build_liouvillian(params, spec, detunings, seg.eta);
      evolve_window(y, l, obs, sample_times, w, options, traj);
    }
    t0 = t1;
  }
  unpack(y, state);
  return traj;
}

}  // namespace superrad::exact
