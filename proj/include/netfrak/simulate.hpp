#ifndef NETFRAK_SIMULATE_HPP
#define NETFRAK_SIMULATE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "netfrak/error.hpp"
#include "netfrak/geometry.hpp"
#include "netfrak/metric.hpp"
#include "netfrak/rng.hpp"

namespace netfrak {

namespace detail {

inline std::size_t poisson_count(double mean, SeededRng& rng) {
  if (!(mean > 0.0)) return 0;
  return static_cast<std::size_t>(std::poisson_distribution<long long>(mean)(rng));
}

inline NetworkLocation uniform_location(const LinearNetwork& net, SeededRng& rng) {
  return net.at_arc_position(rng.uniform() * net.total_length());
}

/// Drops draws that land within the network's length tolerance of an earlier
/// draw, so the result is a simple pattern. Order is otherwise preserved.
inline PointPattern simple_pattern(const LinearNetwork& net, std::vector<NetworkLocation> pts) {
  const double tol = net.length_tolerance();
  std::vector<std::size_t> order(pts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pts[a].segment != pts[b].segment ? pts[a].segment < pts[b].segment : pts[a].offset < pts[b].offset;
  });
  std::vector<char> drop(pts.size(), 0);
  std::vector<std::optional<std::size_t>> vertex_owner(net.vertex_count());
  auto claim = [&](std::size_t v, std::size_t i) {
    if (vertex_owner[v] && *vertex_owner[v] != i) {
      drop[std::max(*vertex_owner[v], i)] = 1;
      vertex_owner[v] = std::min(*vertex_owner[v], i);
    } else {
      vertex_owner[v] = i;
    }
  };
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t i = order[k];
    const auto& s = net.segment(pts[i].segment);
    if (pts[i].offset <= tol) claim(s.a, i);
    if (s.length - pts[i].offset <= tol) claim(s.b, i);
    if (k > 0) {
      const std::size_t j = order[k - 1];
      if (pts[j].segment == pts[i].segment && pts[i].offset - pts[j].offset <= tol) drop[std::max(i, j)] = 1;
    }
  }
  std::vector<NetworkLocation> kept;
  kept.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (!drop[i]) kept.push_back(pts[i]);
  return PointPattern(net, std::move(kept));
}

}  // namespace detail

/// Homogeneous Poisson process: N ~ Poisson(rho |L|), points uniform in arc length.
inline PointPattern poisson_homogeneous(const LinearNetwork& net, double rho, SeededRng& rng) {
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw Error(ErrorCode::BadParameter, "intensity must be finite and >= 0");
  const std::size_t n = detail::poisson_count(rho * net.total_length(), rng);
  std::vector<NetworkLocation> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pts.push_back(detail::uniform_location(net, rng));
  return detail::simple_pattern(net, std::move(pts));
}

/// Inhomogeneous Poisson process by thinning a dominating homogeneous one.
template <class IntensityFn>
PointPattern poisson_inhomogeneous(const LinearNetwork& net, const IntensityFn& rho, double rho_max, SeededRng& rng) {
  if (!(rho_max >= 0.0) || !std::isfinite(rho_max))
    throw Error(ErrorCode::BadParameter, "dominating intensity must be finite and >= 0");
  const std::size_t n = detail::poisson_count(rho_max * net.total_length(), rng);
  std::vector<NetworkLocation> kept;
  for (std::size_t i = 0; i < n; ++i) {
    const auto u = detail::uniform_location(net, rng);
    const double value = rho(u);
    const double accept = rng.uniform();
    if (value > rho_max * (1.0 + 1e-12))
      throw Error(ErrorCode::BadDominating,
                  "intensity " + std::to_string(value) + " exceeds the dominating bound " + std::to_string(rho_max));
    if (value < 0.0) throw Error(ErrorCode::BadParameter, "intensity function returned a negative value");
    if (accept * rho_max < value) kept.push_back(u);
  }
  return detail::simple_pattern(net, std::move(kept));
}

struct SsiResult {
  PointPattern pattern;
  bool partial = false;  // stopped on max_attempts consecutive rejections
  std::size_t proposals = 0;
};

/// Simple sequential inhibition: uniform proposals, each accepted iff its
/// network distance to every accepted point exceeds delta.
template <RegularMetric Metric>
SsiResult ssi(const Metric& metric, std::size_t n, double delta, SeededRng& rng, std::size_t max_attempts = 0) {
  if (!(delta > 0.0)) throw Error(ErrorCode::BadParameter, "inhibition distance must be positive");
  const auto& net = metric.network();
  if (max_attempts == 0) max_attempts = 10000 * std::max<std::size_t>(n, 1);
  std::vector<NetworkLocation> accepted;
  std::vector<Point2> accepted_xy;
  SsiResult out;
  std::size_t rejections = 0;
  while (accepted.size() < n) {
    if (rejections >= max_attempts) {
      out.partial = true;
      break;
    }
    const auto u = detail::uniform_location(net, rng);
    ++out.proposals;
    const Point2 p = net.xy(u);
    // Network distance dominates planar distance, so only planar neighbours need a field.
    bool ok = true;
    std::optional<DistanceField> field;
    for (std::size_t j = 0; j < accepted.size() && ok; ++j) {
      if (distance(p, accepted_xy[j]) > delta) continue;
      if (!field) field.emplace(metric.field(u));
      if (field->at(accepted[j]) <= delta) ok = false;
    }
    if (ok) {
      accepted.push_back(u);
      accepted_xy.push_back(p);
      rejections = 0;
    } else {
      ++rejections;
    }
  }
  out.pattern = PointPattern(net, std::move(accepted));
  return out;
}

/// Independent thinning with retention probability p(u).
template <class RetentionFn>
PointPattern thin(const PointPattern& pattern, const RetentionFn& p, SeededRng& rng) {
  std::vector<NetworkLocation> kept;
  for (const auto& u : pattern) {
    const double prob = p(u);
    if (!(prob >= 0.0 && prob <= 1.0)) throw Error(ErrorCode::BadParameter, "retention probability outside [0, 1]");
    if (rng.uniform() < prob) kept.push_back(u);
  }
  return PointPattern(pattern.network(), std::move(kept));
}

/// Gaussian random field on planar coordinates, discretised on network cells.
struct GaussianFieldSpec {
  std::function<double(const Point2&)> mean;
  std::function<double(const Point2&, const Point2&)> covariance;
  double spacing = 0.0;
};

/// variance * exp(-|p - q| / scale)
inline std::function<double(const Point2&, const Point2&)> exponential_covariance(double variance, double scale) {
  return [variance, scale](const Point2& p, const Point2& q) { return variance * std::exp(-distance(p, q) / scale); };
}

/// log(base) + trend * (x - (xmax - xmin)) / |L|, with the network's bounding box.
inline std::function<double(const Point2&)> log_linear_mean(const LinearNetwork& net, double base, double trend) {
  const double width = net.bbox().xmax - net.bbox().xmin;
  const double length = net.total_length();
  const double offset = std::log(base);
  return [=](const Point2& p) { return offset + trend * (p.x - width) / length; };
}

struct LgcpRealization {
  PointPattern pattern;
  std::vector<double> log_intensity;  // per cell
};

/// Log-Gaussian Cox process sampler. The covariance factorisation is done
/// once so that replicates only pay for the matrix-vector product.
class LgcpSampler {
 public:
  static constexpr std::size_t kMaxCells = 20000;

  LgcpSampler(LinearNetwork net, const GaussianFieldSpec& spec) : net_(std::move(net)) {
    if (!(spec.spacing > 0.0)) throw Error(ErrorCode::BadSpacing, "field spacing must be positive");
    const double est = net_.total_length() / spec.spacing;
    if (est > static_cast<double>(kMaxCells) * 1.5)
      throw Error(ErrorCode::FieldTooLarge, "field would need about " + std::to_string(static_cast<long long>(est)) + " cells");
    cells_ = quadrature_cells(net_, spec.spacing);
    const auto m = cells_.size();
    if (m > kMaxCells) throw Error(ErrorCode::FieldTooLarge, "field needs " + std::to_string(m) + " cells");

    std::vector<Point2> mids;
    mids.reserve(m);
    for (const auto& c : cells_) mids.push_back(net_.xy(c.midpoint));
    mean_.resize(static_cast<Eigen::Index>(m));
    Eigen::MatrixXd cov(m, m);
    double top = 0.0, largest = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      mean_(static_cast<Eigen::Index>(i)) = spec.mean(mids[i]);
      for (std::size_t j = 0; j <= i; ++j) {
        const double c = spec.covariance(mids[i], mids[j]);
        cov(i, j) = cov(j, i) = c;
        largest = std::max(largest, std::abs(c));
      }
      top = std::max(top, cov(i, i));
    }
    if (largest == 0.0) {
      deterministic_ = true;
      return;
    }
    for (double jitter = 1e-8 * top; jitter <= 1e-4 * top * (1.0 + 1e-9); jitter *= 10.0) {
      Eigen::MatrixXd trial = cov;
      trial.diagonal().array() += jitter;
      Eigen::LLT<Eigen::MatrixXd> llt(trial);
      if (llt.info() == Eigen::Success) {
        factor_ = llt.matrixL();
        jitter_ = jitter;
        return;
      }
    }
    throw Error(ErrorCode::CovarianceNotPD, "covariance matrix is not positive definite even with jitter");
  }

  std::size_t cell_count() const { return cells_.size(); }
  const std::vector<QuadratureCell>& cells() const { return cells_; }
  double jitter() const { return jitter_; }

  LgcpRealization sample(SeededRng& rng) const {
    const auto m = static_cast<Eigen::Index>(cells_.size());
    Eigen::VectorXd z = mean_;
    if (!deterministic_) {
      std::normal_distribution<double> normal(0.0, 1.0);
      Eigen::VectorXd xi(m);
      for (Eigen::Index i = 0; i < m; ++i) xi(i) = normal(rng);
      z += factor_.triangularView<Eigen::Lower>() * xi;
    }
    LgcpRealization out;
    out.log_intensity.assign(z.data(), z.data() + m);
    std::vector<NetworkLocation> pts;
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto& cell = cells_[static_cast<std::size_t>(i)];
      const std::size_t count = detail::poisson_count(std::exp(z(i)) * cell.length, rng);
      const double start = cell.midpoint.offset - 0.5 * cell.length;
      for (std::size_t k = 0; k < count; ++k) {
        const double len = net_.segment(cell.midpoint.segment).length;
        pts.push_back({cell.midpoint.segment, std::clamp(start + rng.uniform() * cell.length, 0.0, len)});
      }
    }
    out.pattern = detail::simple_pattern(net_, std::move(pts));
    return out;
  }

 private:
  LinearNetwork net_;
  std::vector<QuadratureCell> cells_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd factor_;
  double jitter_ = 0.0;
  bool deterministic_ = false;
};

inline LgcpRealization lgcp(const LinearNetwork& net, const GaussianFieldSpec& spec, SeededRng& rng) {
  return LgcpSampler(net, spec).sample(rng);
}

}  // namespace netfrak

#endif  // NETFRAK_SIMULATE_HPP
