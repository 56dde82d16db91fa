#pragma once

// Flat-file output: CSV tables with lossless doubles, two-panel SVG phase
// projections, and whole-file atomic writes.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "mbloch/core.hpp"
#include "mbloch/integrate.hpp"

#if defined(__unix__) || defined(__APPLE__)
#include <unistd.h>
#endif

namespace mbloch::io {

/// 17 significant digits: every double survives a print/parse round trip.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec == std::errc::invalid_argument || ptr == s.data()) {
    throw Error(ErrorCode::InvalidParameter, "not a number: '" + s + "'");
  }
  if (ptr != end) {
    throw Error(ErrorCode::InvalidParameter, "trailing characters in number: '" + s + "'");
  }
  return v;
}

/// Writes `content` to a sibling temp file, then renames it over `path`.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
#if defined(__unix__) || defined(__APPLE__)
  const long pid = static_cast<long>(::getpid());
#else
  const long pid = 0;
#endif
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(pid);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename into " + path.string() + ": " + ec.message());
  }
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(ErrorCode::InvalidParameter, "no column " + name);
    return static_cast<std::size_t>(it - header.begin());
  }

  std::vector<double> numeric_column(const std::string& name) const {
    const std::size_t j = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(parse_double(r.at(j)));
    return out;
  }
};

inline std::string to_csv(const CsvTable& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return out;
}

inline CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      if (cells.size() != t.header.size()) {
        throw Error(ErrorCode::InvalidParameter, "ragged CSV row");
      }
      t.rows.push_back(std::move(cells));
    }
  }
  return t;
}

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

/// Columns t,x,y,z,dH,dC with drift measured against the first sample.
inline CsvTable trajectory_table(const SystemParams& params, const Trajectory3& traj) {
  CsvTable t{{"t", "x", "y", "z", "dH", "dC"}, {}};
  const double h0 = hamiltonian(params, traj.state(0));
  const double c0 = casimir(traj.state(0));
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const State3 s = traj.state(i);
    t.rows.push_back({format_double(traj.time(i)), format_double(s.x()), format_double(s.y()),
                      format_double(s.z()), format_double(hamiltonian(params, s) - h0),
                      format_double(casimir(s) - c0)});
  }
  return t;
}

/// Columns t,q1,q2,p1,p2,x,y,z,dH,dC: the image under the realization map,
/// then drift of the 4D Hamiltonian and of p2.
inline CsvTable trajectory4_table(const SystemParams& params, const Trajectory4& traj) {
  CsvTable t{{"t", "q1", "q2", "p1", "p2", "x", "y", "z", "dH", "dC"}, {}};
  const double h0 = hamiltonian4(params, traj.state(0));
  const double c0 = momentum_integral(traj.state(0));
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const State4 s = traj.state(i);
    const State3 r = realization_map(s);
    t.rows.push_back({format_double(traj.time(i)), format_double(s.q1()), format_double(s.q2()),
                      format_double(s.p1()), format_double(s.p2()), format_double(r.x()),
                      format_double(r.y()), format_double(r.z()),
                      format_double(hamiltonian4(params, s) - h0),
                      format_double(momentum_integral(s) - c0)});
  }
  return t;
}

struct PlotSeries {
  std::string label;
  std::vector<State3> points;
  bool as_marker = false;
};

namespace detail {

inline std::string svg_color(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};
  return palette[i % (sizeof palette / sizeof palette[0])];
}

}  // namespace detail

/// Two panels side by side: (x, z) on the left, (y, z) on the right.
inline std::string phase_portrait_svg(const std::string& title,
                                      const std::vector<PlotSeries>& series) {
  constexpr double W = 420.0, H = 420.0, pad = 40.0;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300, zmin = 1e300, zmax = -1e300;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      xmin = std::min(xmin, p.x());
      xmax = std::max(xmax, p.x());
      ymin = std::min(ymin, p.y());
      ymax = std::max(ymax, p.y());
      zmin = std::min(zmin, p.z());
      zmax = std::max(zmax, p.z());
    }
  }
  auto widen = [](double& lo, double& hi) {
    if (!(lo <= hi)) {
      lo = -1.0;
      hi = 1.0;
    }
    const double m = std::max(1e-9, 0.05 * (hi - lo));
    lo -= m;
    hi += m;
  };
  widen(xmin, xmax);
  widen(ymin, ymax);
  widen(zmin, zmax);

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 2 * W << "\" height=\"" << H + 30
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<text x=\"" << W << "\" y=\"18\" text-anchor=\"middle\">" << title << "</text>\n";

  auto panel = [&](double ox, const char* hname, double hlo, double hhi, auto hsel) {
    auto px = [&](double v) { return ox + pad + (v - hlo) / (hhi - hlo) * (W - 2 * pad); };
    auto py = [&](double v) { return 30 + H - pad - (v - zmin) / (zmax - zmin) * (H - 2 * pad); };
    o << "<g>\n<rect x=\"" << ox + pad << "\" y=\"" << 30 + pad << "\" width=\"" << W - 2 * pad
      << "\" height=\"" << H - 2 * pad << "\" fill=\"none\" stroke=\"#888\"/>\n";
    o << "<text x=\"" << ox + W / 2 << "\" y=\"" << 30 + H - 8 << "\" text-anchor=\"middle\">"
      << hname << "</text>\n";
    o << "<text x=\"" << ox + 12 << "\" y=\"" << 30 + H / 2 << "\">z</text>\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
      const auto& s = series[i];
      const std::string col = detail::svg_color(i);
      if (s.as_marker || s.points.size() == 1) {
        for (const auto& p : s.points) {
          o << "<circle cx=\"" << px(hsel(p)) << "\" cy=\"" << py(p.z()) << "\" r=\"4\" fill=\""
            << col << "\"><title>" << s.label << "</title></circle>\n";
        }
        continue;
      }
      o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& p : s.points) o << px(hsel(p)) << ',' << py(p.z()) << ' ';
      o << "\"><title>" << s.label << "</title></polyline>\n";
    }
    o << "</g>\n";
  };
  panel(0.0, "x", xmin, xmax, [](const State3& p) { return p.x(); });
  panel(W, "y", ymin, ymax, [](const State3& p) { return p.y(); });
  o << "</svg>\n";
  return o.str();
}

}  // namespace mbloch::io
