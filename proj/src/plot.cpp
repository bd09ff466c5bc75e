#include "superrad/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "superrad/analysis.hpp"
#include "superrad/errors.hpp"
#include "superrad/trajectory.hpp"

namespace superrad::plot {

namespace fs = std::filesystem;

namespace {

constexpr double kWidth = 640.0;
constexpr double kPanelHeight = 260.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 30.0, kBottom = 45.0;

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (hi == lo) {
      const double pad = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
      lo -= pad;
      hi += pad;
    }
  }
};

// One axes box at vertical offset `y0`, mapping data to pixels.
class Panel {
 public:
  Panel(double y0, Range x, Range y) : y0_(y0), x_(x), y_(y) {
    x_.finish();
    y_.finish();
  }

  double px(double x) const { return kLeft + (x - x_.lo) / (x_.hi - x_.lo) * (kWidth - kLeft - kRight); }
  double py(double y) const {
    return y0_ + kTop + (y_.hi - y) / (y_.hi - y_.lo) * (kPanelHeight - kTop - kBottom);
  }

  void frame(std::ostream& os, const std::string& xlabel, const std::string& ylabel, const std::string& title) const {
    const double x0 = kLeft, x1 = kWidth - kRight, top = y0_ + kTop, bottom = y0_ + kPanelHeight - kBottom;
    os << "<rect x='" << x0 << "' y='" << top << "' width='" << x1 - x0 << "' height='" << bottom - top
       << "' fill='none' stroke='black'/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double fx = x_.lo + i * (x_.hi - x_.lo) / 4, fy = y_.lo + i * (y_.hi - y_.lo) / 4;
      os << "<text x='" << px(fx) << "' y='" << bottom + 15 << "' font-size='10' text-anchor='middle'>" << num(fx)
         << "</text>\n";
      os << "<text x='" << x0 - 4 << "' y='" << py(fy) + 3 << "' font-size='10' text-anchor='end'>" << num(fy)
         << "</text>\n";
    }
    os << "<text x='" << (x0 + x1) / 2 << "' y='" << bottom + 32 << "' font-size='12' text-anchor='middle'>" << xlabel
       << "</text>\n";
    os << "<text x='14' y='" << (top + bottom) / 2 << "' font-size='12' text-anchor='middle' transform='rotate(-90 14 "
       << (top + bottom) / 2 << ")'>" << ylabel << "</text>\n";
    os << "<text x='" << (x0 + x1) / 2 << "' y='" << top - 10 << "' font-size='13' text-anchor='middle'>" << title
       << "</text>\n";
  }

  void line(std::ostream& os, const std::vector<double>& xs, const std::vector<double>& ys, const std::string& style) const {
    os << "<polyline fill='none' " << style << " points='";
    for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i)
      if (std::isfinite(xs[i]) && std::isfinite(ys[i])) os << px(xs[i]) << ',' << py(ys[i]) << ' ';
    os << "'/>\n";
  }

 private:
  double y0_;
  Range x_, y_;
};

std::string open_svg(double height) {
  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << height << "' viewBox='0 0 "
     << kWidth << ' ' << height << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
  return os.str();
}

Range range_of(const std::vector<double>& v) {
  Range r;
  for (double x : v) r.add(x);
  return r;
}

std::vector<double> scaled(const std::vector<double>& v, double f) {
  std::vector<double> out(v);
  for (double& x : out) x *= f;
  return out;
}

// Perceptually ordered ramp (dark blue -> yellow).
std::string colour(double f) {
  f = std::clamp(f, 0.0, 1.0);
  const double r = 255 * std::clamp(1.6 * f - 0.3, 0.0, 1.0);
  const double g = 255 * std::clamp(1.2 * f, 0.0, 1.0) * (0.4 + 0.6 * f);
  const double b = 255 * std::clamp(0.55 - 0.55 * f + 0.25 * std::sin(3.14159 * f), 0.0, 1.0);
  std::ostringstream os;
  os << "rgb(" << static_cast<int>(r) << ',' << static_cast<int>(g) << ',' << static_cast<int>(b) << ')';
  return os.str();
}

}  // namespace

std::string trajectory_svg(const fs::path& csv) {
  const Trajectory t = read_trajectory_file(csv);
  const auto time_us = scaled(t.times, 1e6);
  std::ostringstream os;
  os << open_svg(2 * kPanelHeight);
  Panel top(0, range_of(time_us), range_of(t.s_z));
  top.frame(os, "time (us)", "&lt;S_z&gt;", csv.filename().string());
  top.line(os, time_us, t.s_z, "stroke='steelblue' stroke-width='1.5'");
  Panel bottom(kPanelHeight, range_of(time_us), range_of(t.intensity));
  bottom.frame(os, "time (us)", "emitted photons / s", "");
  bottom.line(os, time_us, t.intensity, "stroke='firebrick' stroke-width='1.5'");
  os << "</svg>\n";
  return os.str();
}

std::string scaling_svg(const fs::path& csv) {
  std::ifstream in(csv);
  if (!in) throw Error("cannot read " + csv.string());
  std::string line;
  std::getline(in, line);
  if (line != "n,value") throw ConfigError(csv.string() + ": expected header n,value");
  std::vector<double> ln_n, ln_v;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError(csv.string() + ": malformed row");
    const double n = std::stod(line.substr(0, comma)), v = std::stod(line.substr(comma + 1));
    if (n <= 0 || v <= 0) continue;
    ln_n.push_back(std::log10(n));
    ln_v.push_back(std::log10(v));
  }
  if (ln_n.empty()) throw ConfigError(csv.string() + ": no positive points");

  // N and N^2 guides anchored at the first point.
  std::vector<double> guide_x{ln_n.front(), *std::max_element(ln_n.begin(), ln_n.end())};
  std::vector<double> lin{ln_v.front(), ln_v.front() + (guide_x[1] - guide_x[0])};
  std::vector<double> quad{ln_v.front(), ln_v.front() + 2 * (guide_x[1] - guide_x[0])};
  Range yr = range_of(ln_v);
  for (double v : quad) yr.add(v);
  for (double v : lin) yr.add(v);

  std::ostringstream os;
  os << open_svg(kPanelHeight + 20);
  Panel p(0, range_of(ln_n), yr);
  p.frame(os, "log10 N", "log10 peak", "scaling");
  p.line(os, guide_x, lin, "stroke='grey' stroke-dasharray='5,4'");
  p.line(os, guide_x, quad, "stroke='grey' stroke-dasharray='5,4'");
  p.line(os, ln_n, ln_v, "stroke='black'");
  for (std::size_t i = 0; i < ln_n.size(); ++i)
    os << "<circle cx='" << p.px(ln_n[i]) << "' cy='" << p.py(ln_v[i]) << "' r='4' fill='firebrick'/>\n";
  os << "</svg>\n";
  return os.str();
}

std::string power_map_svg(const fs::path& csv) {
  std::ifstream in(csv);
  if (!in) throw Error("cannot read " + csv.string());
  const auto map = analysis::read_power_map_csv(in);
  if (map.amplitudes.empty() || map.times.empty()) throw ConfigError(csv.string() + ": empty power map");

  double vmax = 0.0;
  for (const auto& col : map.columns)
    for (double v : col) vmax = std::max(vmax, v);
  if (vmax <= 0.0) vmax = 1.0;

  const auto time_us = scaled(map.times, 1e6);
  Range xr;
  xr.add(-0.5);
  xr.add(static_cast<double>(map.amplitudes.size()) - 0.5);
  Panel p(0, xr, range_of(time_us));
  std::ostringstream os;
  os << open_svg(kPanelHeight * 1.6);
  const std::size_t stride = std::max<std::size_t>(1, map.times.size() / 200);
  for (std::size_t j = 0; j < map.amplitudes.size(); ++j) {
    const double x0 = p.px(j - 0.5), x1 = p.px(j + 0.5);
    for (std::size_t i = 0; i + stride < map.times.size() + stride; i += stride) {
      const std::size_t i1 = std::min(i + stride, map.times.size() - 1);
      const double y0 = p.py(time_us[i1]), y1 = p.py(time_us[i]);
      os << "<rect x='" << x0 << "' y='" << y0 << "' width='" << x1 - x0 << "' height='" << std::max(0.5, y1 - y0)
         << "' fill='" << colour(map.columns[j][i] / vmax) << "'/>\n";
      if (i1 == map.times.size() - 1) break;
    }
  }
  p.frame(os, "amplitude index (column order of the CSV)", "time (us)", "power map");
  os << "</svg>\n";
  return os.str();
}

std::vector<fs::path> render_directory(const fs::path& dir) {
  std::vector<fs::path> sources;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv") sources.push_back(entry.path());
  std::sort(sources.begin(), sources.end());

  std::vector<fs::path> written;
  for (const auto& src : sources) {
    const std::string name = src.stem().string();
    std::string svg;
    if (name.rfind("trajectory", 0) == 0)
      svg = trajectory_svg(src);
    else if (name == "scaling")
      svg = scaling_svg(src);
    else if (name == "power_map")
      svg = power_map_svg(src);
    else
      continue;
    auto out = src;
    out.replace_extension(".svg");
    write_file_atomic(out, svg);
    written.push_back(out);
  }
  return written;
}

}  // namespace superrad::plot
