#include "symcomp/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace symcomp::svg {

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string line_chart(const std::vector<Series>& series, const ChartOptions& opt) {
  auto tx = [&](double v) { return opt.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return opt.log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!opt.log_x || x > 0.0) && (!opt.log_y || y > 0.0);
  };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!(x0 <= x1)) x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  if (x1 - x0 < 1e-300) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-300) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.04 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const double left = 70, right = 20, top = 40, bottom = 50;
  const double pw = opt.width - left - right, ph = opt.height - top - bottom;
  auto px = [&](double v) { return left + (v - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return top + (y1 - v) / (y1 - y0) * ph; };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\"" << opt.height
    << "\" viewBox=\"0 0 " << opt.width << ' ' << opt.height << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << opt.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(opt.title)
    << "</text>\n"
    << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
    << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int k = 0; k <= 4; ++k) {
    const double vx = x0 + (x1 - x0) * k / 4, vy = y0 + (y1 - y0) * k / 4;
    const double lx = opt.log_x ? std::pow(10.0, vx) : vx, ly = opt.log_y ? std::pow(10.0, vy) : vy;
    o << "<line x1=\"" << fmt(px(vx)) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(px(vx)) << "\" y2=\""
      << fmt(top + ph + 5) << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << fmt(px(vx)) << "\" y=\"" << fmt(top + ph + 18) << "\" text-anchor=\"middle\">"
      << tick_label(lx) << "</text>\n"
      << "<line x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(py(vy)) << "\" x2=\"" << fmt(left) << "\" y2=\""
      << fmt(py(vy)) << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(py(vy) + 4) << "\" text-anchor=\"end\">" << tick_label(ly)
      << "</text>\n";
  }
  o << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << opt.height - 10 << "\" text-anchor=\"middle\">"
    << escape(opt.x_label) << "</text>\n"
    << "<text x=\"16\" y=\"" << fmt(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << fmt(top + ph / 2) << ")\">" << escape(opt.y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % std::size(kColors)];
    std::ostringstream pts;
    std::size_t count = 0;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      pts << (count++ ? " " : "") << fmt(px(tx(s.x[i]))) << ',' << fmt(py(ty(s.y[i])));
    }
    if (count)
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
        << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"" << pts.str() << "\"/>\n";
    if (s.markers)
      for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
        if (usable(s.x[i], s.y[i]))
          o << "<circle cx=\"" << fmt(px(tx(s.x[i]))) << "\" cy=\"" << fmt(py(ty(s.y[i]))) << "\" r=\"3\" fill=\""
            << color << "\"/>\n";
    const double ly = top + 14 + 16 * static_cast<double>(k);
    o << "<line x1=\"" << fmt(left + pw - 150) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(left + pw - 125)
      << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\""
      << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n"
      << "<text x=\"" << fmt(left + pw - 120) << "\" y=\"" << fmt(ly + 4) << "\">" << escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace symcomp::svg
