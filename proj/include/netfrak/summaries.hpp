#ifndef NETFRAK_SUMMARIES_HPP
#define NETFRAK_SUMMARIES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "netfrak/error.hpp"
#include "netfrak/geometry.hpp"
#include "netfrak/intensity.hpp"
#include "netfrak/metric.hpp"
#include "netfrak/parallel.hpp"

namespace netfrak {

enum class Statistic { F, H, J, K };
enum class IntensityMode { Inhomogeneous, Homogeneous };

inline std::string_view to_string(Statistic s) {
  switch (s) {
    case Statistic::F: return "F";
    case Statistic::H: return "H";
    case Statistic::J: return "J";
    case Statistic::K: return "K";
  }
  return "?";
}

inline std::string_view to_string(IntensityMode m) {
  return m == IntensityMode::Inhomogeneous ? "inhom" : "hom";
}

/// How data points are reweighted. Inhomogeneous estimators scale each
/// point's factor by rho_bar / rho(x) (F, H) or 1 / (rho(x1) rho(x2)) (K);
/// homogeneous ones drop the ratio (F, H) or use (n / |L|)^2 (K).
struct Weighting {
  IntensityMode mode = IntensityMode::Homogeneous;
  std::optional<IntensitySurface> surface;
  double rho_bar = 0.0;

  static Weighting homogeneous() { return {}; }
  static Weighting inhomogeneous(IntensitySurface surface, double rho_bar) {
    return {IntensityMode::Inhomogeneous, std::move(surface), rho_bar};
  }
};

struct SummaryMetadata {
  std::size_t n_points = 0;
  double total_length = 0.0;
  double r_limit = 0.0;  // R used to bound the r grid, 0 if not supplied
  std::size_t grid_size = 0;
  IntensityMode mode = IntensityMode::Homogeneous;
  double rho_bar = 0.0;
  bool rho_bar_floored = false;
  /// Product factors that fell outside [0, 1]; possible only when rho_bar exceeds rho(x).
  std::size_t factor_violations = 0;
};

/// A summary function on an r grid. Undefined entries are std::nullopt.
struct SummaryEstimate {
  Statistic statistic = Statistic::F;
  std::vector<double> r;
  std::vector<std::optional<double>> values;
  std::vector<std::size_t> n_grid;    // N(I ∩ L_{-r}); F and J only
  std::vector<std::size_t> n_points;  // N(X ∩ L_{-r}) for H and J, n for K
  std::vector<double> product_sums;   // sum of the minus-sampling products; F and H only
  SummaryMetadata meta;
};

/// nr equally spaced values on [0, frac * R].
inline std::vector<double> default_r_grid(double r_limit, double frac = 0.45, std::size_t nr = 513) {
  if (nr < 2 || !(frac > 0.0) || !(r_limit > 0.0)) throw Error(ErrorCode::BadRGrid, "r grid needs nr >= 2 and positive range");
  std::vector<double> r(nr);
  const double top = frac * r_limit;
  for (std::size_t k = 0; k < nr; ++k) r[k] = top * static_cast<double>(k) / static_cast<double>(nr - 1);
  return r;
}

namespace detail {

inline void check_r_grid(std::span<const double> r) {
  if (r.empty() || r.front() != 0.0) throw Error(ErrorCode::BadRGrid, "r grid must start at 0");
  for (std::size_t k = 1; k < r.size(); ++k)
    if (!(r[k] > r[k - 1])) throw Error(ErrorCode::BadRGrid, "r grid must be strictly increasing");
}

inline std::vector<double> point_ratios(const PointPattern& pattern, const Weighting& w) {
  std::vector<double> ratio(pattern.size(), 1.0);
  if (w.mode == IntensityMode::Homogeneous) return ratio;
  if (!w.surface) throw Error(ErrorCode::BadParameter, "inhomogeneous weighting needs an intensity surface");
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const double rho = (*w.surface)(pattern[i]);
    if (!(rho > 0.0))
      throw Error(ErrorCode::NonPositiveIntensityAtDataPoint, "intensity is not positive at data point " + std::to_string(i));
    ratio[i] = w.rho_bar / rho;
  }
  return ratio;
}

struct CentreProducts {
  std::vector<double> products;  // one per r index the centre survives erosion for
  std::size_t violations = 0;
};

/// Minus-sampling products for one centre u: for every r_k <= d(u, boundary),
/// the product over data points within r_k of (1 - ratio(x) w(u, d(u, x))).
/// `skip` names a data point to leave out (the centre itself for H).
template <RegularMetric Metric>
CentreProducts centre_products(const Metric& metric, const NetworkLocation& u, const PointPattern& pattern,
                               std::span<const double> ratio, std::span<const double> r,
                               std::optional<std::size_t> skip) {
  CentreProducts out;
  const double reach = metric.distance_to_boundary(u);
  const auto survive = static_cast<std::size_t>(std::upper_bound(r.begin(), r.end(), reach) - r.begin());
  out.products.assign(survive, 1.0);
  if (survive <= 1 || pattern.empty()) return out;

  const double rmax = r[survive - 1];
  const double tol = pattern.network().length_tolerance();
  const auto field = metric.field(u);
  std::vector<std::pair<double, double>> factors;  // (distance, factor)
  for (std::size_t j = 0; j < pattern.size(); ++j) {
    if (skip && *skip == j) continue;
    const double d = field.at(pattern[j]);
    if (d <= tol || d > rmax) continue;
    const double f = 1.0 - ratio[j] * field.weight(d);
    if (f < 0.0 || f > 1.0) ++out.violations;
    factors.emplace_back(d, f);
  }
  std::sort(factors.begin(), factors.end());
  double running = 1.0;
  std::size_t next = 0;
  for (std::size_t k = 0; k < survive; ++k) {
    while (next < factors.size() && factors[next].first <= r[k]) running *= factors[next++].second;
    out.products[k] = running;
  }
  return out;
}

/// Averages per-centre products into 1 - mean, in centre order.
inline void reduce_products(const std::vector<CentreProducts>& per_centre, std::size_t nr, SummaryEstimate& est,
                            std::vector<std::size_t>& counts) {
  std::vector<CompensatedSum> sums(nr);
  counts.assign(nr, 0);
  for (const auto& c : per_centre) {
    for (std::size_t k = 0; k < c.products.size(); ++k) {
      sums[k].add(c.products[k]);
      ++counts[k];
    }
    est.meta.factor_violations += c.violations;
  }
  est.values.assign(nr, std::nullopt);
  est.product_sums.assign(nr, 0.0);
  for (std::size_t k = 0; k < nr; ++k) {
    est.product_sums[k] = sums[k].value();
    if (counts[k] > 0) est.values[k] = 1.0 - est.product_sums[k] / static_cast<double>(counts[k]);
  }
}

inline SummaryEstimate blank_estimate(Statistic s, const PointPattern& pattern, std::span<const double> r,
                                      const Weighting& w) {
  SummaryEstimate est;
  est.statistic = s;
  est.r.assign(r.begin(), r.end());
  est.meta.n_points = pattern.size();
  est.meta.total_length = pattern.network().total_length();
  est.meta.mode = w.mode;
  est.meta.rho_bar = w.mode == IntensityMode::Inhomogeneous ? w.rho_bar : 0.0;
  return est;
}

}  // namespace detail

/// Minus-sampling empty-space function estimate over the centre grid I.
template <RegularMetric Metric>
SummaryEstimate estimate_F(const Metric& metric, const PointPattern& pattern, std::span<const NetworkLocation> grid,
                           std::span<const double> r, const Weighting& weighting) {
  detail::check_r_grid(r);
  if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "F estimation needs a nonempty grid");
  if (weighting.mode == IntensityMode::Inhomogeneous && !(weighting.rho_bar > 0.0))
    throw Error(ErrorCode::BadParameter, "rho_bar must be positive");
  const auto ratio = detail::point_ratios(pattern, weighting);

  std::vector<detail::CentreProducts> per_centre(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    per_centre[i] = detail::centre_products(metric, grid[i], pattern, ratio, r, std::nullopt);
  });

  auto est = detail::blank_estimate(Statistic::F, pattern, r, weighting);
  est.meta.grid_size = grid.size();
  detail::reduce_products(per_centre, r.size(), est, est.n_grid);
  return est;
}

/// Minus-sampling nearest-neighbour distance distribution estimate.
template <RegularMetric Metric>
SummaryEstimate estimate_H(const Metric& metric, const PointPattern& pattern, std::span<const double> r,
                           const Weighting& weighting) {
  detail::check_r_grid(r);
  if (weighting.mode == IntensityMode::Inhomogeneous && !(weighting.rho_bar > 0.0))
    throw Error(ErrorCode::BadParameter, "rho_bar must be positive");
  const auto ratio = detail::point_ratios(pattern, weighting);

  std::vector<detail::CentreProducts> per_centre(pattern.size());
  parallel_for(pattern.size(), [&](std::size_t i) {
    per_centre[i] = detail::centre_products(metric, pattern[i], pattern, ratio, r, i);
  });

  auto est = detail::blank_estimate(Statistic::H, pattern, r, weighting);
  detail::reduce_products(per_centre, r.size(), est, est.n_points);
  return est;
}

/// J = (1 - H) / (1 - F), undefined where either input is undefined or F = 1.
inline SummaryEstimate estimate_J(const SummaryEstimate& f, const SummaryEstimate& h) {
  if (f.statistic != Statistic::F || h.statistic != Statistic::H)
    throw Error(ErrorCode::BadParameter, "estimate_J takes an F estimate and an H estimate");
  if (f.r != h.r) throw Error(ErrorCode::GridMismatch, "F and H were estimated on different r grids");
  if (f.meta.n_points != h.meta.n_points || f.meta.mode != h.meta.mode)
    throw Error(ErrorCode::GridMismatch, "F and H come from different patterns or modes");
  SummaryEstimate est;
  est.statistic = Statistic::J;
  est.r = f.r;
  est.meta = f.meta;
  est.meta.factor_violations = f.meta.factor_violations + h.meta.factor_violations;
  est.n_grid = f.n_grid;
  est.n_points = h.n_points;
  est.values.assign(f.r.size(), std::nullopt);
  for (std::size_t k = 0; k < f.r.size(); ++k) {
    if (!f.values[k] || !h.values[k]) continue;
    const double denom = 1.0 - *f.values[k];
    if (denom == 0.0) continue;
    est.values[k] = (1.0 - *h.values[k]) / denom;
  }
  if (!est.values.empty() && f.values[0] && h.values[0]) est.values[0] = 1.0;
  return est;
}

/// Geometrically corrected K-function: (1/|L|) sum over ordered pairs within r
/// of w(x1, d) / (rho(x1) rho(x2)). Requires max r < R.
template <RegularMetric Metric>
SummaryEstimate estimate_K(const Metric& metric, const PointPattern& pattern, std::span<const double> r,
                           double r_limit, const Weighting& weighting) {
  detail::check_r_grid(r);
  if (!(r.back() < r_limit))
    throw Error(ErrorCode::RMaxExceedsR, "largest r " + std::to_string(r.back()) + " is not below R = " + std::to_string(r_limit));
  const double length = pattern.network().total_length();
  const std::size_t n = pattern.size();

  std::vector<double> inv_rho(n, n > 0 ? length / static_cast<double>(n) : 0.0);
  if (weighting.mode == IntensityMode::Inhomogeneous) {
    if (!weighting.surface) throw Error(ErrorCode::BadParameter, "inhomogeneous weighting needs an intensity surface");
    for (std::size_t i = 0; i < n; ++i) {
      const double rho = (*weighting.surface)(pattern[i]);
      if (!(rho > 0.0))
        throw Error(ErrorCode::NonPositiveIntensityAtDataPoint, "intensity is not positive at data point " + std::to_string(i));
      inv_rho[i] = 1.0 / rho;
    }
  }

  const double rmax = r.back();
  const double tol = pattern.network().length_tolerance();
  std::vector<std::vector<double>> cumulative(n);
  parallel_for(n < 2 ? 0 : n, [&](std::size_t i) {
    const auto field = metric.field(pattern[i]);
    std::vector<std::pair<double, double>> terms;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = field.at(pattern[j]);
      if (d <= tol || d > rmax) continue;
      terms.emplace_back(d, field.weight(d) * inv_rho[i] * inv_rho[j]);
    }
    std::sort(terms.begin(), terms.end());
    auto& acc = cumulative[i];
    acc.assign(r.size(), 0.0);
    CompensatedSum running;
    std::size_t next = 0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      while (next < terms.size() && terms[next].first <= r[k]) running.add(terms[next++].second);
      acc[k] = running.value();
    }
  });

  auto est = detail::blank_estimate(Statistic::K, pattern, r, weighting);
  est.meta.r_limit = r_limit;
  est.values.assign(r.size(), 0.0);
  est.n_points.assign(r.size(), n);
  est.n_grid.assign(r.size(), 0);
  for (std::size_t k = 0; k < r.size(); ++k) {
    CompensatedSum total;
    for (const auto& acc : cumulative)
      if (!acc.empty()) total.add(acc[k]);
    est.values[k] = total.value() / length;
  }
  return est;
}

}  // namespace netfrak

#endif  // NETFRAK_SUMMARIES_HPP
