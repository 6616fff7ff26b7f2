#ifndef NETFRAK_SVG_HPP
#define NETFRAK_SVG_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "netfrak/envelope.hpp"
#include "netfrak/error.hpp"
#include "netfrak/summaries.hpp"

namespace netfrak {

struct SvgSeries {
  std::vector<double> x;
  std::vector<std::optional<double>> y;
};

/// A summary-function plot: optional grey band, a solid estimate and a dashed reference.
struct SvgPlot {
  std::string ylabel;
  std::optional<SvgSeries> solid;
  std::optional<SvgSeries> dashed;
  std::optional<SvgSeries> band_lo;
  std::optional<SvgSeries> band_hi;
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace detail

/// Standalone SVG, 800x600 viewBox.
inline std::string render_svg(const SvgPlot& plot) {
  constexpr double W = 800, H = 600, left = 80, right = 30, top = 30, bottom = 70;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  bool any = false;
  auto scan = [&](const std::optional<SvgSeries>& s) {
    if (!s) return;
    for (std::size_t i = 0; i < s->x.size(); ++i) {
      if (!s->y[i] || !std::isfinite(*s->y[i])) continue;
      any = true;
      xmin = std::min(xmin, s->x[i]);
      xmax = std::max(xmax, s->x[i]);
      ymin = std::min(ymin, *s->y[i]);
      ymax = std::max(ymax, *s->y[i]);
    }
  };
  scan(plot.solid);
  scan(plot.band_lo);
  scan(plot.band_hi);
  const bool data = any;
  scan(plot.dashed);
  if (!data) throw Error(ErrorCode::AllUndefined, "nothing to plot: every value is undefined");
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (W - left - right); };
  auto py = [&](double y) { return H - bottom - (y - ymin) / (ymax - ymin) * (H - top - bottom); };

  auto path_data = [&](const SvgSeries& s) {
    std::string d;
    bool pen = false;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!s.y[i] || !std::isfinite(*s.y[i])) {
        pen = false;
        continue;
      }
      d += (pen ? " L" : (d.empty() ? "M" : " M")) + detail::num(px(s.x[i])) + "," + detail::num(py(*s.y[i]));
      pen = true;
    }
    return d;
  };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" width=\"800\" height=\"600\">\n";
  o << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"none\" stroke=\"none\"/>\n";
  if (plot.band_lo && plot.band_hi) {
    std::string pts;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < plot.band_lo->x.size(); ++i)
      if (plot.band_lo->y[i] && plot.band_hi->y[i]) idx.push_back(i);
    for (auto i : idx) pts += detail::num(px(plot.band_lo->x[i])) + "," + detail::num(py(*plot.band_lo->y[i])) + " ";
    for (auto it = idx.rbegin(); it != idx.rend(); ++it)
      pts += detail::num(px(plot.band_hi->x[*it])) + "," + detail::num(py(*plot.band_hi->y[*it])) + " ";
    if (!idx.empty()) o << "<polygon class=\"band\" points=\"" << pts << "\" fill=\"#c8c8c8\" stroke=\"none\"/>\n";
  }
  // axes
  o << "<line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << W - right << "\" y2=\"" << H - bottom
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << H - bottom
    << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4.0;
    const double yv = ymin + (ymax - ymin) * i / 4.0;
    o << "<text x=\"" << detail::num(px(xv)) << "\" y=\"" << H - bottom + 20
      << "\" font-size=\"12\" text-anchor=\"middle\">" << detail::tick(xv) << "</text>\n";
    o << "<text x=\"" << left - 8 << "\" y=\"" << detail::num(py(yv) + 4)
      << "\" font-size=\"12\" text-anchor=\"end\">" << detail::tick(yv) << "</text>\n";
  }
  o << "<text x=\"" << (left + W - right) / 2 << "\" y=\"" << H - 20
    << "\" font-size=\"16\" text-anchor=\"middle\">r</text>\n";
  o << "<text x=\"20\" y=\"" << (top + H - bottom) / 2 << "\" font-size=\"16\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
    << (top + H - bottom) / 2 << ")\">" << plot.ylabel << "</text>\n";
  if (plot.dashed) {
    const auto d = path_data(*plot.dashed);
    if (!d.empty())
      o << "<path class=\"reference\" d=\"" << d << "\" fill=\"none\" stroke=\"black\" stroke-dasharray=\"8,6\"/>\n";
  }
  if (plot.solid) {
    const auto d = path_data(*plot.solid);
    if (!d.empty()) o << "<path class=\"estimate\" d=\"" << d << "\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

inline void write_svg(const SvgPlot& plot, const std::string& path) {
  const auto text = render_svg(plot);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::BadInput, "cannot write " + path);
  out << text;
}

inline std::string stat_label(Statistic s) {
  switch (s) {
    case Statistic::F: return "F(r)";
    case Statistic::H: return "H(r)";
    case Statistic::J: return "J(r)";
    case Statistic::K: return "K(r)";
  }
  return "";
}

/// Estimate plot; J gets a dashed line at 1 and K at r, F and H none.
inline SvgPlot summary_plot(const SummaryEstimate& est) {
  SvgPlot p;
  p.ylabel = stat_label(est.statistic);
  p.solid = SvgSeries{est.r, est.values};
  if (est.statistic == Statistic::J || est.statistic == Statistic::K) {
    SvgSeries ref{est.r, {}};
    for (double r : est.r) ref.y.push_back(est.statistic == Statistic::J ? 1.0 : r);
    p.dashed = std::move(ref);
  }
  return p;
}

inline SvgPlot envelope_plot(const EnvelopeResult& res) {
  SvgPlot p;
  p.ylabel = stat_label(res.stat);
  p.band_lo = SvgSeries{res.r, res.lo};
  p.band_hi = SvgSeries{res.r, res.hi};
  p.solid = SvgSeries{res.r, res.observed};
  SvgSeries ref{res.r, {}};
  for (double v : res.reference) ref.y.push_back(v);
  p.dashed = std::move(ref);
  return p;
}

}  // namespace netfrak

#endif  // NETFRAK_SVG_HPP
