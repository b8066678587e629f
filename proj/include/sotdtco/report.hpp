#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"

namespace sotdtco {

inline std::string fmt_num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Column-stable CSV table; cells are pre-formatted strings.
class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  Table& row() {
    rows_.emplace_back();
    return *this;
  }
  Table& operator<<(const std::string& s) {
    rows_.back().push_back(s);
    return *this;
  }
  Table& operator<<(const char* s) { return *this << std::string(s); }
  Table& operator<<(double v) { return *this << fmt_num(v); }
  Table& operator<<(int v) { return *this << std::to_string(v); }
  Table& operator<<(long v) { return *this << std::to_string(v); }
  Table& operator<<(bool v) { return *this << std::string(v ? "1" : "0"); }

  std::string csv() const {
    std::ostringstream o;
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) o << (i ? "," : "") << quote(r[i]);
      o << "\n";
    };
    line(header_);
    for (const auto& r : rows_) {
      require(r.size() == header_.size(), "internal", "table row width mismatch");
      line(r);
    }
    return o.str();
  }
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

 private:
  static std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Buffers every artifact and writes them only once the whole run succeeded.
class OutputSet {
 public:
  void add(const std::string& name, std::string content) { files_[name] = std::move(content); }
  const std::map<std::string, std::string>& files() const { return files_; }

  void commit(const std::filesystem::path& dir) const {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("io", "cannot create output directory '" + dir.string() + "'");
    for (const auto& [name, body] : files_) {
      auto tmp = dir / (name + ".tmp");
      {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw Error("io", "cannot write '" + tmp.string() + "'");
        f << body;
      }
      std::filesystem::rename(tmp, dir / name, ec);
      if (ec) throw Error("io", "cannot move '" + tmp.string() + "' into place");
    }
  }

 private:
  std::map<std::string, std::string> files_;
};

// ---------------------------------------------------------------------------
// SVG charts

struct Series {
  std::string label;
  std::vector<double> x, y;
  bool markers_only = false;
};

struct ChartStyle {
  int width = 640, height = 420;
  std::string title, x_label, y_label;
  bool log_y = false;
};

namespace detail {

inline const char* palette(std::size_t i) {
  static const char* c[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
  return c[i % 8];
}

inline std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

struct Frame {
  double x0, x1, y0, y1;
  double left = 70, right = 150, top = 40, bottom = 50;
  int w, h;
  bool log_y;
  double px(double x) const { return left + (x - x0) / (x1 - x0) * (w - left - right); }
  double py(double y) const {
    double t = log_y ? (std::log10(y) - std::log10(y0)) / (std::log10(y1) - std::log10(y0)) : (y - y0) / (y1 - y0);
    return h - bottom - t * (h - top - bottom);
  }
};

inline void pad_range(double& lo, double& hi, bool log) {
  if (log) {
    lo = std::pow(10, std::floor(std::log10(lo)));
    hi = std::pow(10, std::ceil(std::log10(hi)));
    if (lo == hi) hi = lo * 10;
    return;
  }
  if (lo == hi) lo -= 1, hi += 1;
  double d = 0.05 * (hi - lo);
  lo -= d, hi += d;
}

inline void axes(std::ostringstream& o, const Frame& f, const ChartStyle& st) {
  o << "<rect x='" << f.left << "' y='" << f.top << "' width='" << (f.w - f.left - f.right) << "' height='"
    << (f.h - f.top - f.bottom) << "' fill='none' stroke='black'/>\n";
  for (int k = 0; k <= 4; ++k) {
    double xv = f.x0 + k * (f.x1 - f.x0) / 4;
    o << "<text x='" << f.px(xv) << "' y='" << f.h - f.bottom + 16 << "' font-size='11' text-anchor='middle'>"
      << fmt_num(xv) << "</text>\n";
    double yv = f.log_y ? std::pow(10, std::log10(f.y0) + k * (std::log10(f.y1) - std::log10(f.y0)) / 4)
                        : f.y0 + k * (f.y1 - f.y0) / 4;
    o << "<text x='" << f.left - 6 << "' y='" << f.py(yv) + 4 << "' font-size='11' text-anchor='end'>"
      << fmt_num(yv) << "</text>\n";
  }
  o << "<text x='" << f.w / 2 << "' y='20' font-size='14' text-anchor='middle'>" << esc(st.title) << "</text>\n";
  o << "<text x='" << (f.left + f.w - f.right) / 2 << "' y='" << f.h - 12
    << "' font-size='12' text-anchor='middle'>" << esc(st.x_label) << "</text>\n";
  o << "<text transform='translate(16," << f.h / 2 << ") rotate(-90)' font-size='12' text-anchor='middle'>"
    << esc(st.y_label) << "</text>\n";
}

}  // namespace detail

inline std::string svg_lines(const std::vector<Series>& series, const ChartStyle& st) {
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (st.log_y && !(s.y[i] > 0)) continue;
      x0 = std::min(x0, s.x[i]), x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]), y1 = std::max(y1, s.y[i]);
    }
  if (x0 > x1) x0 = 0, x1 = 1, y0 = st.log_y ? 1 : 0, y1 = st.log_y ? 10 : 1;
  if (x0 == x1) x0 -= 1, x1 += 1;
  detail::pad_range(y0, y1, st.log_y);
  detail::Frame f{x0, x1, y0, y1};
  f.w = st.width, f.h = st.height, f.log_y = st.log_y;
  std::ostringstream o;
  o << "<svg xmlns='http://www.w3.org/2000/svg' width='" << f.w << "' height='" << f.h << "'>\n";
  o << "<rect width='100%' height='100%' fill='white'/>\n";
  detail::axes(o, f, st);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* col = detail::palette(k);
    if (!s.markers_only) {
      o << "<polyline fill='none' stroke='" << col << "' stroke-width='1.5' points='";
      for (std::size_t i = 0; i < s.x.size(); ++i)
        if (!st.log_y || s.y[i] > 0) o << fmt_num(f.px(s.x[i])) << "," << fmt_num(f.py(s.y[i])) << " ";
      o << "'/>\n";
    } else {
      for (std::size_t i = 0; i < s.x.size(); ++i)
        if (!st.log_y || s.y[i] > 0)
          o << "<circle cx='" << fmt_num(f.px(s.x[i])) << "' cy='" << fmt_num(f.py(s.y[i])) << "' r='4' fill='"
            << col << "'/>\n";
    }
    double ly = f.top + 14 + 16 * k;
    o << "<rect x='" << f.w - f.right + 10 << "' y='" << ly - 8 << "' width='10' height='10' fill='" << col << "'/>";
    o << "<text x='" << f.w - f.right + 24 << "' y='" << ly + 1 << "' font-size='11'>" << detail::esc(s.label)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

/// One stacked bar per category; stacks[j][i] is part j of bar i.
inline std::string svg_stacked_bars(const std::vector<std::string>& categories,
                                    const std::vector<std::string>& parts,
                                    const std::vector<std::vector<double>>& stacks, const ChartStyle& st) {
  double top = 0;
  for (std::size_t i = 0; i < categories.size(); ++i) {
    double s = 0;
    for (const auto& p : stacks) s += std::max(0.0, p[i]);
    top = std::max(top, s);
  }
  if (top <= 0) top = 1;
  detail::Frame f{0, static_cast<double>(categories.size()), 0, top * 1.05};
  f.w = st.width, f.h = st.height, f.log_y = false;
  std::ostringstream o;
  o << "<svg xmlns='http://www.w3.org/2000/svg' width='" << f.w << "' height='" << f.h << "'>\n";
  o << "<rect width='100%' height='100%' fill='white'/>\n";
  o << "<rect x='" << f.left << "' y='" << f.top << "' width='" << (f.w - f.left - f.right) << "' height='"
    << (f.h - f.top - f.bottom) << "' fill='none' stroke='black'/>\n";
  for (int k = 0; k <= 4; ++k) {
    double yv = k * f.y1 / 4;
    o << "<text x='" << f.left - 6 << "' y='" << f.py(yv) + 4 << "' font-size='11' text-anchor='end'>"
      << fmt_num(yv) << "</text>\n";
  }
  o << "<text x='" << f.w / 2 << "' y='20' font-size='14' text-anchor='middle'>" << detail::esc(st.title)
    << "</text>\n";
  o << "<text transform='translate(16," << f.h / 2 << ") rotate(-90)' font-size='12' text-anchor='middle'>"
    << detail::esc(st.y_label) << "</text>\n";
  for (std::size_t i = 0; i < categories.size(); ++i) {
    double base = 0;
    double x = f.px(i + 0.2), w = f.px(i + 0.8) - x;
    for (std::size_t j = 0; j < stacks.size(); ++j) {
      double v = std::max(0.0, stacks[j][i]);
      o << "<rect x='" << fmt_num(x) << "' y='" << fmt_num(f.py(base + v)) << "' width='" << fmt_num(w)
        << "' height='" << fmt_num(f.py(base) - f.py(base + v)) << "' fill='" << detail::palette(j) << "'/>\n";
      base += v;
    }
    o << "<text x='" << fmt_num(f.px(i + 0.5)) << "' y='" << f.h - f.bottom + 16
      << "' font-size='10' text-anchor='middle'>" << detail::esc(categories[i]) << "</text>\n";
  }
  for (std::size_t j = 0; j < parts.size(); ++j) {
    double ly = f.top + 14 + 16 * j;
    o << "<rect x='" << f.w - f.right + 10 << "' y='" << ly - 8 << "' width='10' height='10' fill='"
      << detail::palette(j) << "'/>";
    o << "<text x='" << f.w - f.right + 24 << "' y='" << ly + 1 << "' font-size='11'>" << detail::esc(parts[j])
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace sotdtco
