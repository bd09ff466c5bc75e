#pragma once

// Exact Lindblad evolution of N two-level spins coupled to one truncated
// cavity mode (driven Tavis-Cummings model with cavity loss, spin
// relaxation and spin dephasing).
//
// Basis index = spin_mask * n_fock + n, where bit j of spin_mask set means
// spin j is excited. hbar = 1, all rates in rad/s.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "superrad/model_core.hpp"
#include "superrad/trajectory.hpp"

namespace superrad::exact {

using SparseMatrixC = Eigen::SparseMatrix<std::complex<double>>;

struct HilbertSpec {
  int n_spins = 1;
  int n_fock = 2;
  std::size_t max_dimension = 1024;

  std::size_t dimension() const;
  /// Throws ValidationError / CapacityError.
  void validate() const;

  /// ceil((2 eta / kappa)^2) + 8: coherent-drive photon estimate plus margin.
  static int default_fock(double eta, double kappa);
};

/// Density matrix on the composite space.
class DensityState {
 public:
  explicit DensityState(Eigen::MatrixXcd rho);

  /// All spins in the ground state, cavity in vacuum.
  static DensityState ground(const HilbertSpec& spec);
  /// All spins excited, cavity in vacuum.
  static DensityState inverted(const HilbertSpec& spec);
  static DensityState basis(const HilbertSpec& spec, std::uint32_t spin_mask, int photons);

  const Eigen::MatrixXcd& matrix() const { return rho_; }
  Eigen::MatrixXcd& matrix() { return rho_; }

  struct Check {
    double hermiticity_error = 0.0;
    double trace_error = 0.0;
    double min_eigenvalue = 0.0;

    bool valid(double herm_tol = 1e-10, double trace_tol = 1e-10, double pos_tol = 1e-8) const {
      return hermiticity_error <= herm_tol && trace_error <= trace_tol && min_eigenvalue >= -pos_tol;
    }
  };
  Check check() const;

 private:
  Eigen::MatrixXcd rho_;
};

/// Lindblad generator L(rho) = -i[H, rho] + sum_k D[c_k] rho with
///   H = delta_c a'a + 1/2 sum_j Delta_j sz_j + i g sum_j (a' sm_j - sp_j a) + i eta (a' - a)
///   c = sqrt(kappa) a, sqrt(gamma_par) sm_j, sqrt(gamma_perp / 2) sz_j.
/// The dephasing coefficient is chosen so spin coherences decay at gamma_perp.
class Liouvillian {
 public:
  Liouvillian(const PhysicalParams& params, const HilbertSpec& spec, std::vector<double> detunings,
              double eta);

  const HilbertSpec& spec() const { return spec_; }
  const PhysicalParams& params() const { return params_; }
  const std::vector<double>& detunings() const { return detunings_; }
  double eta() const { return eta_; }

  const SparseMatrixC& hamiltonian() const { return hamiltonian_; }
  const std::vector<SparseMatrixC>& jump_operators() const { return jumps_; }

  /// out = L(rho) for Hermitian rho.
  void apply(Eigen::Ref<const Eigen::MatrixXcd> rho, Eigen::Ref<Eigen::MatrixXcd> out) const;

  /// Explicit d^2 x d^2 matrix acting on column-stacked vec(rho).
  SparseMatrixC superoperator() const;

 private:
  PhysicalParams params_;
  HilbertSpec spec_;
  std::vector<double> detunings_;
  double eta_;
  SparseMatrixC hamiltonian_;
  SparseMatrixC h_eff_;  // H - i/2 sum c'c
  std::vector<SparseMatrixC> jumps_;
  std::vector<SparseMatrixC> jumps_adj_;
};

Liouvillian build_liouvillian(const PhysicalParams& params, const HilbertSpec& spec,
                              std::span<const double> detunings, double eta);

/// Collective observables as sparse operators on the composite space.
struct Observables {
  explicit Observables(const HilbertSpec& spec);

  SparseMatrixC s_x, s_y, s_z, spsm, photons, a, top_fock;

  /// tr(op rho).
  static std::complex<double> expect(const SparseMatrixC& op, Eigen::Ref<const Eigen::MatrixXcd> rho);
};

// Single-site operators, exposed for tests.
SparseMatrixC annihilation(const HilbertSpec& spec);
SparseMatrixC spin_lowering(const HilbertSpec& spec, int j);
SparseMatrixC spin_z(const HilbertSpec& spec, int j);

struct SolverOptions {
  double tolerance = 1e-9;  // local error bound (relative and absolute)
  double top_fock_threshold = 1e-6;
  /// drive_then_release only: evolve the cavity displaced by the classical
  /// driven field alpha(t), so the Fock space holds only the spin-radiated
  /// part of the field and the spins see the drive as a classical field
  /// i g (alpha* S- - alpha S+). Observables are reported in the lab frame;
  /// the top-Fock check then refers to the displaced field.
  bool displaced_frame = false;
};

/// Evolves `state` under `liouvillian` over [0, sample_times.back()], sampling
/// on `sample_times` (ascending, starting at 0). On return `state` holds the
/// final density matrix.
Trajectory evolve(DensityState& state, const Liouvillian& liouvillian,
                  std::span<const double> sample_times, const SolverOptions& options = {});

/// Piecewise evolution through the segments of `pulse`, one Liouvillian per
/// segment, with continuous state across boundaries. Samples on
/// `sample_times` spanning [0, pulse.total_duration()].
Trajectory drive_then_release(const HilbertSpec& spec, const PhysicalParams& params,
                              std::span<const double> detunings, const PulseSequence& pulse,
                              DensityState& state, std::span<const double> sample_times,
                              const SolverOptions& options = {});

}  // namespace superrad::exact
