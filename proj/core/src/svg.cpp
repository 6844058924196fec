#include "descentlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace descentlab::svg {

namespace {

std::string escape_xml(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// Round tick positions at a 1/2/5 mantissa step.
std::vector<double> linear_ticks(double lo, double hi, int target = 6) {
  std::vector<double> ticks;
  const double span = hi - lo;
  if (span <= 0.0) return {lo};
  const double raw_step = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw_step)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * m >= raw_step) {
      step = mag * m;
      break;
    }
  }
  for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
    ticks.push_back(t);
  }
  return ticks;
}

std::vector<double> log_ticks(double lo, double hi) {
  std::vector<double> ticks;
  for (int e = static_cast<int>(std::floor(std::log10(lo)));
       e <= static_cast<int>(std::ceil(std::log10(hi))); ++e) {
    const double t = std::pow(10.0, e);
    if (t >= lo / 1.0001 && t <= hi * 1.0001) ticks.push_back(t);
  }
  if (ticks.empty()) ticks = {lo, hi};
  return ticks;
}

}  // namespace

std::string render_chart(const std::vector<Series>& series, const ChartOptions& opts) {
  if (series.empty()) throw std::invalid_argument("render_chart requires at least one series");
  for (const Series& s : series) {
    if (s.points.size() < 2) {
      throw std::invalid_argument("series '" + s.name + "' needs at least 2 points");
    }
  }

  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = std::numeric_limits<double>::infinity(), y_hi = -y_lo;
  for (const Series& s : series) {
    for (const SeriesPoint& p : s.points) {
      x_lo = std::min(x_lo, p.x);
      x_hi = std::max(x_hi, p.x);
      y_lo = std::min(y_lo, p.mean - p.stderr_band);
      y_hi = std::max(y_hi, p.mean + p.stderr_band);
    }
  }
  if (opts.log_y && y_lo <= 0.0) {
    throw std::invalid_argument("log-scale y requires strictly positive values");
  }
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  if (y_hi == y_lo) {
    y_hi += 0.5;
    y_lo -= 0.5;
  }
  if (!opts.log_y) {
    const double pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;
  }

  const double ml = 80.0, mr = 30.0, mt = opts.title.empty() ? 25.0 : 45.0, mb = 60.0;
  const double pw = opts.width - ml - mr;
  const double ph = opts.height - mt - mb;

  const auto to_x = [&](double x) { return ml + pw * (x - x_lo) / (x_hi - x_lo); };
  const auto to_y = [&](double y) {
    if (opts.log_y) {
      return mt + ph * (1.0 - (std::log10(y) - std::log10(y_lo)) /
                                  (std::log10(y_hi) - std::log10(y_lo)));
    }
    return mt + ph * (1.0 - (y - y_lo) / (y_hi - y_lo));
  };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(opts.width) << "\" height=\""
      << num(opts.height) << "\" viewBox=\"0 0 " << num(opts.width) << " " << num(opts.height)
      << "\">\n";
  out << "<rect width=\"" << num(opts.width) << "\" height=\"" << num(opts.height)
      << "\" fill=\"white\"/>\n";
  if (!opts.title.empty()) {
    out << "<text x=\"" << num(opts.width / 2)
        << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
        << escape_xml(opts.title) << "</text>\n";
  }

  // axes frame
  out << "<rect x=\"" << num(ml) << "\" y=\"" << num(mt) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"#333\"/>\n";

  const std::vector<double> xticks = linear_ticks(x_lo, x_hi);
  for (double t : xticks) {
    const double px = to_x(t);
    out << "<line x1=\"" << num(px) << "\" y1=\"" << num(mt + ph) << "\" x2=\"" << num(px)
        << "\" y2=\"" << num(mt + ph + 5) << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << num(px) << "\" y=\"" << num(mt + ph + 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << tick_label(t) << "</text>\n";
  }
  const std::vector<double> yticks = opts.log_y ? log_ticks(y_lo, y_hi) : linear_ticks(y_lo, y_hi);
  for (double t : yticks) {
    const double py = to_y(t);
    out << "<line x1=\"" << num(ml - 5) << "\" y1=\"" << num(py) << "\" x2=\"" << num(ml)
        << "\" y2=\"" << num(py) << "\" stroke=\"#333\"/>\n";
    out << "<line x1=\"" << num(ml) << "\" y1=\"" << num(py) << "\" x2=\"" << num(ml + pw)
        << "\" y2=\"" << num(py) << "\" stroke=\"#ddd\" stroke-dasharray=\"3,3\"/>\n";
    out << "<text x=\"" << num(ml - 9) << "\" y=\"" << num(py + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << tick_label(t)
        << "</text>\n";
  }
  out << "<text x=\"" << num(ml + pw / 2) << "\" y=\"" << num(opts.height - 12)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << escape_xml(opts.x_label) << "</text>\n";
  out << "<text x=\"18\" y=\"" << num(mt + ph / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 "
      << num(mt + ph / 2) << ")\">" << escape_xml(opts.y_label) << "</text>\n";

  // shaded ±1 stderr bands first so mean lines stay on top
  for (const Series& s : series) {
    bool has_band = false;
    for (const SeriesPoint& p : s.points) has_band |= p.stderr_band > 0.0;
    if (!has_band) continue;
    out << "<path fill=\"" << s.color << "\" fill-opacity=\"0.18\" stroke=\"none\" d=\"";
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      const SeriesPoint& p = s.points[i];
      out << (i == 0 ? "M" : "L") << num(to_x(p.x)) << " " << num(to_y(p.mean + p.stderr_band))
          << " ";
    }
    for (std::size_t i = s.points.size(); i-- > 0;) {
      const SeriesPoint& p = s.points[i];
      out << "L" << num(to_x(p.x)) << " " << num(to_y(p.mean - p.stderr_band)) << " ";
    }
    out << "Z\"/>\n";
  }

  for (const Series& s : series) {
    out << "<path fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.8\" d=\"";
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      const SeriesPoint& p = s.points[i];
      out << (i == 0 ? "M" : "L") << num(to_x(p.x)) << " " << num(to_y(p.mean)) << " ";
    }
    out << "\"/>\n";
  }

  // legend
  double ly = mt + 14.0;
  for (const Series& s : series) {
    out << "<line x1=\"" << num(ml + pw - 150) << "\" y1=\"" << num(ly) << "\" x2=\""
        << num(ml + pw - 120) << "\" y2=\"" << num(ly) << "\" stroke=\"" << s.color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << num(ml + pw - 113) << "\" y=\"" << num(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape_xml(s.name) << "</text>\n";
    ly += 18.0;
  }

  out << "</svg>\n";
  return out.str();
}

void write_chart(const std::string& path, const std::vector<Series>& series,
                 const ChartOptions& opts) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << render_chart(series, opts);
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace descentlab::svg
