#pragma once

#include <complex>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace superrad {

/// Observables of one run sampled on a fixed time grid.
///
/// Collective operators follow S_z = (1/2) sum sigma_z, S_+- = sum sigma_+-.
/// `intensity` is the photon rate leaving the output port and `emitted` its
/// running time-integral.
struct Trajectory {
  std::vector<double> times;
  std::vector<double> s_x;
  std::vector<double> s_y;
  std::vector<double> s_z;
  std::vector<double> spsm;
  std::vector<double> photons;
  std::vector<std::complex<double>> field;
  std::vector<double> intensity;
  std::vector<double> emitted;
  std::vector<int> segment;  // index of the pulse segment each sample belongs to

  double n_spins = 0.0;
  double max_top_fock_population = 0.0;  // exact engine only
  bool fock_truncation_flagged = false;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  void reserve(std::size_t n);

  /// |A|^2 per sample.
  std::vector<double> field_intensity() const;
  /// Time of the first sample of each segment.
  std::vector<double> segment_start_times() const;
};

/// Uniform sample grid 0, dt, ..., t_end with `n_samples` points.
std::vector<double> uniform_grid(double t_end, std::size_t n_samples);

/// Columns: time_s,s_x,s_y,s_z,spsm,photons,field_re,field_im,intensity,emitted,segment
/// Doubles use the shortest representation that round-trips exactly.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& in);
Trajectory read_trajectory_file(const std::filesystem::path& path);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

/// Writes `content` to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace superrad
