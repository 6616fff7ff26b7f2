#ifndef NETFRAK_INTENSITY_HPP
#define NETFRAK_INTENSITY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "netfrak/error.hpp"
#include "netfrak/geometry.hpp"
#include "netfrak/parallel.hpp"

namespace netfrak {

/// Planar Gaussian kernels are cut off at this many bandwidths.
inline constexpr double kKernelTruncation = 4.0;

/// An intensity function on a network: a kernel estimate, a constant, or a
/// user-supplied function of planar coordinates.
class IntensitySurface {
 public:
  struct Kernel {
    double sigma;
    std::vector<Point2> centres;
    std::vector<double> inverse_mass;  // 1 / C_L(x_i)
    double quad_spacing;
  };
  struct Constant {
    double value;
  };
  struct Function {
    std::function<double(const Point2&)> fn;
    double upper_bound;
  };

  static IntensitySurface constant(const LinearNetwork& net, double value) {
    if (!(value >= 0.0) || !std::isfinite(value)) throw Error(ErrorCode::BadParameter, "constant intensity must be >= 0");
    return IntensitySurface(net, Constant{value}, value * net.total_length());
  }

  /// `upper_bound` must dominate fn on the network; `expected_count` is the
  /// integral of fn over the network.
  static IntensitySurface from_function(const LinearNetwork& net, std::function<double(const Point2&)> fn,
                                        double upper_bound, double expected_count) {
    return IntensitySurface(net, Function{std::move(fn), upper_bound}, expected_count);
  }

  static IntensitySurface from_kernel(const LinearNetwork& net, Kernel k) {
    const double n = static_cast<double>(k.centres.size());
    return IntensitySurface(net, std::move(k), n);
  }

  const LinearNetwork& network() const { return net_; }

  /// Number of data points (kernel) or expected count (constant, function).
  double count() const { return count_; }

  std::optional<double> bandwidth() const {
    if (const auto* k = std::get_if<Kernel>(&model_)) return k->sigma;
    return std::nullopt;
  }

  bool is_constant() const { return std::holds_alternative<Constant>(model_); }

  double operator()(const NetworkLocation& u) const { return at(net_.xy(u)); }

  double at(const Point2& p) const {
    return std::visit(
        [&](const auto& m) -> double {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, Constant>) {
            return m.value;
          } else if constexpr (std::is_same_v<T, Function>) {
            return m.fn(p);
          } else {
            const double cutoff = kKernelTruncation * m.sigma;
            const double norm = 1.0 / (2.0 * std::numbers::pi * m.sigma * m.sigma);
            double total = 0.0;
            for (std::size_t i = 0; i < m.centres.size(); ++i) {
              const double d = distance(p, m.centres[i]);
              if (d <= cutoff) total += norm * std::exp(-0.5 * d * d / (m.sigma * m.sigma)) * m.inverse_mass[i];
            }
            return total;
          }
        },
        model_);
  }

  /// An upper bound on the surface over the whole network, used as the
  /// dominating rate when simulating from it.
  double dominating_bound() const {
    return std::visit(
        [&](const auto& m) -> double {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, Constant>) {
            return m.value;
          } else if constexpr (std::is_same_v<T, Function>) {
            return m.upper_bound;
          } else {
            // Every network point is within half a cell of a cell midpoint g.
            // Untruncated terms grow by at most exp((4s + h)h / s^2) moving h
            // away from g; terms cut off at g contribute at most kappa(4s).
            const auto cells = quadrature_cells(net_, m.quad_spacing);
            double grid_max = 0.0, half = 0.0;
            for (const auto& c : cells) {
              grid_max = std::max(grid_max, (*this)(c.midpoint));
              half = std::max(half, 0.5 * c.length);
            }
            const double s = m.sigma;
            const double growth = std::exp((kKernelTruncation * s + half) * half / (s * s));
            const double peak = 1.0 / (2.0 * std::numbers::pi * s * s);
            double tail = 0.0;
            for (double w : m.inverse_mass) tail += peak * std::exp(-0.5 * kKernelTruncation * kKernelTruncation) * w;
            return growth * grid_max + tail;
          }
        },
        model_);
  }

 private:
  using Model = std::variant<Kernel, Constant, Function>;

  IntensitySurface(LinearNetwork net, Model model, double count)
      : net_(std::move(net)), model_(std::move(model)), count_(count) {}

  LinearNetwork net_;
  Model model_;
  double count_ = 0.0;
};

/// Scott's rule: n^(-1/6) sqrt((var_x + var_y) / 2), sample variances.
inline double scott_bandwidth(const PointPattern& pattern) {
  const std::size_t n = pattern.size();
  if (n < 2) throw Error(ErrorCode::TooFewPoints, "Scott bandwidth needs at least two points");
  const auto xy = pattern.coordinates();
  double mx = 0.0, my = 0.0;
  for (const auto& p : xy) {
    mx += p.x;
    my += p.y;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double vx = 0.0, vy = 0.0;
  for (const auto& p : xy) {
    vx += (p.x - mx) * (p.x - mx);
    vy += (p.y - my) * (p.y - my);
  }
  vx /= static_cast<double>(n - 1);
  vy /= static_cast<double>(n - 1);
  return std::pow(static_cast<double>(n), -1.0 / 6.0) * std::sqrt(0.5 * (vx + vy));
}

/// Gaussian kernel estimate with each data point's kernel renormalised to
/// unit mass on the network, so the surface integrates to the point count.
inline IntensitySurface kernel_intensity(const LinearNetwork& net, const PointPattern& pattern, double sigma,
                                         double quad_spacing) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw Error(ErrorCode::BadBandwidth, "bandwidth must be positive and finite, got " + std::to_string(sigma));
  if (!(quad_spacing > 0.0)) throw Error(ErrorCode::BadSpacing, "quadrature spacing must be positive");

  IntensitySurface::Kernel k{sigma, pattern.coordinates(), {}, quad_spacing};
  k.inverse_mass.assign(k.centres.size(), 0.0);
  const auto cells = quadrature_cells(net, quad_spacing);
  const double cutoff = kKernelTruncation * sigma;
  const double norm = 1.0 / (2.0 * std::numbers::pi * sigma * sigma);
  std::vector<Point2> mids;
  mids.reserve(cells.size());
  for (const auto& c : cells) mids.push_back(net.xy(c.midpoint));

  parallel_for(k.centres.size(), [&](std::size_t i) {
    CompensatedSum mass;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const double d = distance(mids[c], k.centres[i]);
      if (d <= cutoff) mass.add(norm * std::exp(-0.5 * d * d / (sigma * sigma)) * cells[c].length);
    }
    // The data point itself lies on the network, so its kernel has positive mass.
    k.inverse_mass[i] = 1.0 / mass.value();
  });
  return IntensitySurface::from_kernel(net, std::move(k));
}

inline IntensitySurface kernel_intensity(const LinearNetwork& net, const PointPattern& pattern, double sigma) {
  return kernel_intensity(net, pattern, sigma, sigma / 10.0);
}

/// Integral of the surface over the network by the midpoint rule.
inline double integrate(const IntensitySurface& surface, double quad_spacing) {
  CompensatedSum total;
  for (const auto& c : quadrature_cells(surface.network(), quad_spacing)) total.add(surface(c.midpoint) * c.length);
  return total.value();
}

struct RhoBar {
  double value = 0.0;
  double grid_minimum = 0.0;
  bool floor_applied = false;
};

/// max(min over grid of the surface, floor_eps * n / |L|).
inline RhoBar rho_bar(const IntensitySurface& surface, std::span<const NetworkLocation> grid, double floor_eps = 1e-3) {
  if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "rho_bar needs a nonempty grid");
  if (!(floor_eps > 0.0)) throw Error(ErrorCode::BadParameter, "floor_eps must be positive");
  if (!(surface.count() > 0.0)) throw Error(ErrorCode::EmptySurface, "intensity surface carries no points");
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { values[i] = surface(grid[i]); });
  const double minimum = *std::min_element(values.begin(), values.end());
  const double floor = floor_eps * surface.count() / surface.network().total_length();
  RhoBar out;
  out.grid_minimum = minimum;
  out.floor_applied = minimum < floor;
  out.value = std::max(minimum, floor);
  return out;
}

}  // namespace netfrak

#endif  // NETFRAK_INTENSITY_HPP
