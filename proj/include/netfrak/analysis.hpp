#ifndef NETFRAK_ANALYSIS_HPP
#define NETFRAK_ANALYSIS_HPP

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "netfrak/geometry.hpp"
#include "netfrak/intensity.hpp"
#include "netfrak/metric.hpp"
#include "netfrak/summaries.hpp"

namespace netfrak {

/// Knobs shared by the `summary` and `envelope` workflows.
struct AnalysisSettings {
  double grid_spacing = 0.0;             // spacing of the centre grid I
  IntensityMode mode = IntensityMode::Inhomogeneous;
  std::optional<double> bandwidth;       // std::nullopt selects Scott's rule
  double floor_eps = 1e-3;
  double rmax_frac = 0.45;
  std::size_t nr = 513;
};

/// Everything that depends on the network alone: metric, centre grid, R and
/// the r grid. Built once and reused across patterns.
struct AnalysisContext {
  LinearNetwork net;
  ShortestPathMetric metric;
  std::vector<NetworkLocation> grid;
  double r_limit = 0.0;
  std::vector<double> r;
  AnalysisSettings settings;

  AnalysisContext(LinearNetwork network, AnalysisSettings s)
      : net(network), metric(network), grid(grid_points(network, s.grid_spacing)), settings(s) {
    if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "grid spacing leaves no centre points");
    r_limit = global_r_max(net, grid);
    r = default_r_grid(r_limit, s.rmax_frac, s.nr);
  }
};

struct FittedIntensity {
  IntensitySurface surface;
  RhoBar rho_bar;
};

inline FittedIntensity fit_intensity(const AnalysisContext& ctx, const PointPattern& pattern) {
  const double sigma = ctx.settings.bandwidth ? *ctx.settings.bandwidth : scott_bandwidth(pattern);
  auto surface = kernel_intensity(ctx.net, pattern, sigma);
  auto bar = rho_bar(surface, ctx.grid, ctx.settings.floor_eps);
  return {std::move(surface), bar};
}

inline FittedIntensity fixed_intensity(const AnalysisContext& ctx, IntensitySurface surface) {
  auto bar = rho_bar(surface, ctx.grid, ctx.settings.floor_eps);
  return {std::move(surface), bar};
}

/// Computes one summary statistic for `pattern`. In inhomogeneous mode the
/// intensity is `fitted` when given, otherwise estimated from the pattern.
inline SummaryEstimate summarize(const AnalysisContext& ctx, const PointPattern& pattern, Statistic stat,
                                 const std::optional<FittedIntensity>& fitted = std::nullopt) {
  Weighting weighting = Weighting::homogeneous();
  bool floored = false;
  if (ctx.settings.mode == IntensityMode::Inhomogeneous) {
    const FittedIntensity fit = fitted ? *fitted : fit_intensity(ctx, pattern);
    weighting = Weighting::inhomogeneous(fit.surface, fit.rho_bar.value);
    floored = fit.rho_bar.floor_applied;
  }
  SummaryEstimate est;
  switch (stat) {
    case Statistic::F:
      est = estimate_F(ctx.metric, pattern, ctx.grid, ctx.r, weighting);
      break;
    case Statistic::H:
      est = estimate_H(ctx.metric, pattern, ctx.r, weighting);
      break;
    case Statistic::J:
      est = estimate_J(estimate_F(ctx.metric, pattern, ctx.grid, ctx.r, weighting),
                       estimate_H(ctx.metric, pattern, ctx.r, weighting));
      break;
    case Statistic::K:
      est = estimate_K(ctx.metric, pattern, ctx.r, ctx.r_limit, weighting);
      break;
  }
  est.meta.r_limit = ctx.r_limit;
  est.meta.grid_size = ctx.grid.size();
  est.meta.rho_bar_floored = floored;
  return est;
}

}  // namespace netfrak

#endif  // NETFRAK_ANALYSIS_HPP
