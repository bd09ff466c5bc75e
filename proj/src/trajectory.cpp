#include "superrad/trajectory.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "superrad/errors.hpp"

namespace superrad {

namespace {

constexpr const char* kHeader =
    "time_s,s_x,s_y,s_z,spsm,photons,field_re,field_im,intensity,emitted,segment";

double parse_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    // from_chars rejects "inf"/"nan" spellings produced by to_chars on some
    // platforms only when signed; fall back to strtod for those.
    std::string tmp(s);
    char* end = nullptr;
    v = std::strtod(tmp.c_str(), &end);
    if (end != tmp.c_str() + tmp.size())
      throw ConfigError("trajectory line " + std::to_string(line) + ": bad number '" + tmp + "'");
  }
  return v;
}

}  // namespace

void Trajectory::reserve(std::size_t n) {
  times.reserve(n);
  s_x.reserve(n);
  s_y.reserve(n);
  s_z.reserve(n);
  spsm.reserve(n);
  photons.reserve(n);
  field.reserve(n);
  intensity.reserve(n);
  emitted.reserve(n);
  segment.reserve(n);
}

std::vector<double> Trajectory::field_intensity() const {
  std::vector<double> out(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) out[i] = std::norm(field[i]);
  return out;
}

std::vector<double> Trajectory::segment_start_times() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < segment.size(); ++i)
    if (i == 0 || segment[i] != segment[i - 1]) out.push_back(times[i]);
  return out;
}

std::vector<double> uniform_grid(double t_end, std::size_t n_samples) {
  if (n_samples < 2) return {0.0};
  std::vector<double> t(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i)
    t[i] = t_end * static_cast<double>(i) / static_cast<double>(n_samples - 1);
  t.back() = t_end;
  return t;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << kHeader << '\n';
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out << format_double(traj.times[i]) << ',' << format_double(traj.s_x[i]) << ','
        << format_double(traj.s_y[i]) << ',' << format_double(traj.s_z[i]) << ','
        << format_double(traj.spsm[i]) << ',' << format_double(traj.photons[i]) << ','
        << format_double(traj.field[i].real()) << ',' << format_double(traj.field[i].imag()) << ','
        << format_double(traj.intensity[i]) << ',' << format_double(traj.emitted[i]) << ','
        << traj.segment[i] << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw ConfigError("trajectory: missing or unexpected header");
  Trajectory t;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string_view> cols;
    std::string_view rest(line);
    while (true) {
      const auto pos = rest.find(',');
      cols.push_back(rest.substr(0, pos));
      if (pos == std::string_view::npos) break;
      rest.remove_prefix(pos + 1);
    }
    if (cols.size() != 11)
      throw ConfigError("trajectory line " + std::to_string(lineno) + ": expected 11 columns");
    t.times.push_back(parse_double(cols[0], lineno));
    t.s_x.push_back(parse_double(cols[1], lineno));
    t.s_y.push_back(parse_double(cols[2], lineno));
    t.s_z.push_back(parse_double(cols[3], lineno));
    t.spsm.push_back(parse_double(cols[4], lineno));
    t.photons.push_back(parse_double(cols[5], lineno));
    t.field.emplace_back(parse_double(cols[6], lineno), parse_double(cols[7], lineno));
    t.intensity.push_back(parse_double(cols[8], lineno));
    t.emitted.push_back(parse_double(cols[9], lineno));
    t.segment.push_back(static_cast<int>(parse_double(cols[10], lineno)));
  }
  return t;
}

Trajectory read_trajectory_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trajectory file " + path.string());
  return read_trajectory_csv(in);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error("failed writing " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace superrad
