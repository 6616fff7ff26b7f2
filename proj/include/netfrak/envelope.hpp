#ifndef NETFRAK_ENVELOPE_HPP
#define NETFRAK_ENVELOPE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "netfrak/analysis.hpp"
#include "netfrak/error.hpp"
#include "netfrak/intensity.hpp"
#include "netfrak/parallel.hpp"
#include "netfrak/rng.hpp"
#include "netfrak/simulate.hpp"
#include "netfrak/summaries.hpp"

namespace netfrak {

struct EnvelopeOptions {
  Statistic stat = Statistic::J;
  std::size_t nsim = 99;
  std::size_t rank = 1;
  bool refit = true;
  std::uint64_t seed = 1;
  /// Null model intensity. When absent it is fitted to the observed pattern.
  std::optional<IntensitySurface> null_intensity;
};

struct EnvelopeResult {
  Statistic stat = Statistic::J;
  std::vector<double> r;
  std::vector<std::optional<double>> observed;
  std::vector<std::optional<double>> lo, hi, mean;
  std::vector<std::size_t> defined_count;
  std::vector<double> reference;  // theoretical Poisson curve
  std::size_t nsim = 0;
  std::size_t rank = 1;
  std::size_t failed_replicates = 0;
  std::string observed_error;  // empty when the observed curve was computed
  // metadata
  std::string null_model;
  std::uint64_t seed = 0;
  IntensityMode mode = IntensityMode::Inhomogeneous;
  bool refit = true;
  bool null_fallback = false;  // observed intensity could not be fitted, constant null used
};

namespace detail {

inline std::vector<double> poisson_reference(Statistic stat, std::span<const double> r, double rate) {
  std::vector<double> ref(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) {
    switch (stat) {
      case Statistic::F:
      case Statistic::H: ref[k] = 1.0 - std::exp(-rate * r[k]); break;
      case Statistic::J: ref[k] = 1.0; break;
      case Statistic::K: ref[k] = r[k]; break;
    }
  }
  return ref;
}

}  // namespace detail

/// Pointwise Monte Carlo envelopes under an inhomogeneous Poisson null.
/// Replicate i draws from substream i of the seed, so results do not depend
/// on the number of workers.
inline EnvelopeResult pointwise_envelope(const AnalysisContext& ctx, const PointPattern& observed,
                                         const EnvelopeOptions& opt) {
  if (opt.rank == 0 || opt.nsim + 1 < 2 * opt.rank)
    throw Error(ErrorCode::BadParameter, "need rank >= 1 and nsim >= 2 rank - 1");
  if (observed.empty()) throw Error(ErrorCode::BadInput, "observed pattern is empty");

  EnvelopeResult res;
  res.stat = opt.stat;
  res.r = ctx.r;
  res.nsim = opt.nsim;
  res.rank = opt.rank;
  res.seed = opt.seed;
  res.mode = ctx.settings.mode;
  res.refit = opt.refit;

  // Null model.
  std::optional<FittedIntensity> observed_fit;
  std::optional<IntensitySurface> null_surface = opt.null_intensity;
  if (null_surface) {
    res.null_model = "supplied intensity";
  } else {
    try {
      observed_fit = fit_intensity(ctx, observed);
      null_surface = observed_fit->surface;
      res.null_model = "kernel intensity fitted to observed pattern";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TooFewPoints && e.code() != ErrorCode::BadBandwidth) throw;
      null_surface = IntensitySurface::constant(ctx.net, static_cast<double>(observed.size()) / ctx.net.total_length());
      res.null_model = "constant intensity n/|L| (observed fit failed)";
      res.null_fallback = true;
    }
  }
  std::optional<FittedIntensity> fixed;  // used for every curve when not refitting
  if (!opt.refit) fixed = observed_fit ? *observed_fit : fixed_intensity(ctx, *null_surface);

  auto curve_for = [&](const PointPattern& p, const std::optional<FittedIntensity>& fit) {
    return summarize(ctx, p, opt.stat, fit).values;
  };

  // Observed curve: with a supplied null and refit off, it uses the null too.
  std::optional<FittedIntensity> obs_fit = opt.refit ? observed_fit : fixed;
  try {
    res.observed = curve_for(observed, obs_fit);
  } catch (const Error& e) {
    res.observed.assign(ctx.r.size(), std::nullopt);
    res.observed_error = e.what();
  }

  const double bound = null_surface->dominating_bound();
  std::vector<std::vector<std::optional<double>>> sims(opt.nsim);
  std::vector<char> failed(opt.nsim, 0);
  const SeededRng master(opt.seed);
  parallel_for(opt.nsim, [&](std::size_t i) {
    SeededRng rng = master.substream(i);
    try {
      const auto pattern = poisson_inhomogeneous(ctx.net, *null_surface, bound, rng);
      sims[i] = curve_for(pattern, opt.refit ? std::nullopt : fixed);
    } catch (const Error&) {
      sims[i].assign(ctx.r.size(), std::nullopt);
      failed[i] = 1;
    }
  });
  res.failed_replicates = static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));

  const std::size_t nr = ctx.r.size();
  res.lo.assign(nr, std::nullopt);
  res.hi.assign(nr, std::nullopt);
  res.mean.assign(nr, std::nullopt);
  res.defined_count.assign(nr, 0);
  std::vector<double> column;
  for (std::size_t k = 0; k < nr; ++k) {
    column.clear();
    for (const auto& s : sims)
      if (s[k]) column.push_back(*s[k]);
    res.defined_count[k] = column.size();
    if (column.empty()) continue;
    CompensatedSum total;
    for (double v : column) total.add(v);
    res.mean[k] = total.value() / static_cast<double>(column.size());
    if (column.size() < opt.rank) continue;
    std::sort(column.begin(), column.end());
    res.lo[k] = column[opt.rank - 1];
    res.hi[k] = column[column.size() - opt.rank];
  }

  double rate = static_cast<double>(observed.size()) / ctx.net.total_length();
  if (ctx.settings.mode == IntensityMode::Inhomogeneous) {
    try {
      rate = (fixed ? *fixed : fixed_intensity(ctx, *null_surface)).rho_bar.value;
    } catch (const Error&) {
    }
  }
  res.reference = detail::poisson_reference(opt.stat, ctx.r, rate);
  return res;
}

struct EnvelopeVerdict {
  double below_fraction = 0.0;  // obs < lo: clustering signal for J
  double above_fraction = 0.0;  // obs > hi: inhibition signal for J
  std::size_t compared = 0;     // r values where obs, lo and hi are all defined
};

inline EnvelopeVerdict envelope_verdict(const EnvelopeResult& res) {
  EnvelopeVerdict v;
  std::size_t below = 0, above = 0;
  for (std::size_t k = 0; k < res.r.size(); ++k) {
    if (!res.observed[k] || !res.lo[k] || !res.hi[k]) continue;
    ++v.compared;
    if (*res.observed[k] < *res.lo[k]) ++below;
    if (*res.observed[k] > *res.hi[k]) ++above;
  }
  if (v.compared > 0) {
    v.below_fraction = static_cast<double>(below) / static_cast<double>(v.compared);
    v.above_fraction = static_cast<double>(above) / static_cast<double>(v.compared);
  }
  return v;
}

/// One-line human summary of an envelope test.
inline std::string envelope_report(const EnvelopeResult& res) {
  const auto v = envelope_verdict(res);
  std::ostringstream out;
  out << "stat=" << to_string(res.stat) << " nsim=" << res.nsim << " rank=" << res.rank << " compared=" << v.compared
      << " below_fraction=" << v.below_fraction << " above_fraction=" << v.above_fraction;
  if (v.below_fraction > 0.0 && res.stat == Statistic::J) out << " (below envelope: clustering)";
  if (v.above_fraction > 0.0 && res.stat == Statistic::J) out << " (above envelope: inhibition)";
  if (res.failed_replicates > 0) out << " failed_replicates=" << res.failed_replicates;
  return out.str();
}

}  // namespace netfrak

#endif  // NETFRAK_ENVELOPE_HPP
