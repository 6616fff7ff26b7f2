#ifndef NETFRAK_METRIC_HPP
#define NETFRAK_METRIC_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "netfrak/error.hpp"
#include "netfrak/geometry.hpp"

namespace netfrak {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

namespace detail {

struct VertexSeed {
  std::size_t vertex;
  double distance;
};

inline std::vector<double> dijkstra(const LinearNetwork& net, std::span<const VertexSeed> seeds) {
  std::vector<double> dist(net.vertex_count(), kInfinity);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  for (const auto& s : seeds) {
    if (s.distance < dist[s.vertex]) {
      dist[s.vertex] = s.distance;
      queue.push({s.distance, s.vertex});
    }
  }
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    for (const auto& inc : net.incident(v)) {
      const double nd = d + net.segment(inc.segment).length;
      if (nd < dist[inc.vertex]) {
        dist[inc.vertex] = nd;
        queue.push({nd, inc.vertex});
      }
    }
  }
  return dist;
}

/// Along a piece of length len whose ends are at distances (da, db), the
/// distance profile is min(da + t, db + len - t). Returns the peak position.
inline double peak_offset(double len, double da, double db) { return std::clamp(0.5 * (db + len - da), 0.0, len); }

inline double profile(double len, double da, double db, double t) { return std::min(da + t, db + len - t); }

/// Level-r crossings strictly inside a piece (endpoints are counted separately).
inline std::size_t interior_crossings(double len, double da, double db, double r, double eps) {
  const double tp = peak_offset(len, da, db);
  const double top = profile(len, da, db, tp);
  std::size_t count = 0;
  if (r > da + eps && r < top - eps) ++count;
  if (r > db + eps && r < top - eps) ++count;
  if (std::abs(r - top) <= eps && tp > eps && tp < len - eps) ++count;
  return count;
}

}  // namespace detail

/// Single-source shortest-path solution from a network location.
class DistanceField {
 public:
  DistanceField(LinearNetwork net, NetworkLocation source) : net_(std::move(net)), source_(source) {
    const auto& s = net_.segment(source_.segment);
    const detail::VertexSeed seeds[2] = {{s.a, source_.offset}, {s.b, s.length - source_.offset}};
    vertex_dist_ = detail::dijkstra(net_, seeds);
    eps_ = 1e-12 * net_.total_length();
  }

  const NetworkLocation& source() const { return source_; }
  std::span<const double> vertex_distances() const { return vertex_dist_; }

  /// Shortest-path distance from the source to v.
  double at(const NetworkLocation& v) const {
    const auto& s = net_.segment(v.segment);
    const double da = vertex_dist_[s.a], db = vertex_dist_[s.b];
    if (v.segment == source_.segment) {
      const double u = source_.offset;
      if (v.offset <= u) return std::min(u - v.offset, da + v.offset);
      return std::min(v.offset - u, db + s.length - v.offset);
    }
    return detail::profile(s.length, da, db, v.offset);
  }

  /// c_L(u, r): number of network points at distance exactly r. A crossing
  /// that lands on a vertex is counted once, however many segments meet there.
  std::size_t boundary_count(double r) const {
    std::size_t count = 0;
    for_each_piece([&](double len, double da, double db) { count += detail::interior_crossings(len, da, db, r, eps_); });
    for (double d : vertex_dist_)
      if (std::abs(d - r) <= eps_) ++count;
    const double len = net_.segment(source_.segment).length;
    if (std::abs(r) <= eps_ && source_.offset > 0.0 && source_.offset < len) ++count;
    return count;
  }

  /// w(u, r) = 1 / c_L(u, r) for the shortest-path metric.
  double weight(double r) const {
    const auto c = boundary_count(r);
    if (c == 0) throw Error(ErrorCode::EmptyBallBoundary, "no network point at distance " + std::to_string(r));
    return 1.0 / static_cast<double>(c);
  }

  /// D(u): the farthest reachable distance.
  double farthest() const {
    double best = 0.0;
    for_each_piece([&](double len, double da, double db) {
      best = std::max(best, detail::profile(len, da, db, detail::peak_offset(len, da, db)));
    });
    return best;
  }

 private:
  // The source's own segment is split at the source into two pieces whose
  // inner end has distance zero.
  template <class Fn>
  void for_each_piece(Fn&& fn) const {
    for (std::size_t i = 0; i < net_.segment_count(); ++i) {
      const auto& s = net_.segment(i);
      const double da = vertex_dist_[s.a], db = vertex_dist_[s.b];
      if (i == source_.segment) {
        if (source_.offset > 0.0) fn(source_.offset, da, 0.0);
        if (source_.offset < s.length) fn(s.length - source_.offset, 0.0, db);
      } else {
        fn(s.length, da, db);
      }
    }
  }

  LinearNetwork net_;
  NetworkLocation source_;
  std::vector<double> vertex_dist_;
  double eps_ = 0.0;
};

/// The operations a regular distance metric exposes to the estimators.
template <class M>
concept RegularMetric = requires(const M& m, const NetworkLocation& u, const NetworkLocation& v, double r) {
  { m.network() } -> std::convertible_to<const LinearNetwork&>;
  { m.distance(u, v) } -> std::convertible_to<double>;
  { m.field(u).at(v) } -> std::convertible_to<double>;
  { m.field(u).weight(r) } -> std::convertible_to<double>;
  { m.boundary_count(u, r) } -> std::convertible_to<std::size_t>;
  { m.weight(u, r) } -> std::convertible_to<double>;
  { m.farthest(u) } -> std::convertible_to<double>;
  { m.distance_to_boundary(u) } -> std::convertible_to<double>;
};

/// Shortest-path distance on a linear network. Its Jacobian is 1 almost
/// everywhere, so the geometric weight reduces to 1 / c_L(u, r).
class ShortestPathMetric {
 public:
  explicit ShortestPathMetric(LinearNetwork net) : net_(std::move(net)) {
    std::vector<detail::VertexSeed> seeds;
    for (auto v : net_.boundary()) seeds.push_back({v, 0.0});
    boundary_dist_ = detail::dijkstra(net_, seeds);
  }

  const LinearNetwork& network() const { return net_; }

  DistanceField field(const NetworkLocation& u) const { return DistanceField(net_, u); }
  double distance(const NetworkLocation& u, const NetworkLocation& v) const { return field(u).at(v); }
  std::size_t boundary_count(const NetworkLocation& u, double r) const { return field(u).boundary_count(r); }
  double weight(const NetworkLocation& u, double r) const { return field(u).weight(r); }
  double farthest(const NetworkLocation& u) const { return field(u).farthest(); }

  /// d(u, boundary); +infinity when the network has no degree-one vertex.
  double distance_to_boundary(const NetworkLocation& u) const {
    const auto& s = net_.segment(u.segment);
    return detail::profile(s.length, boundary_dist_[s.a], boundary_dist_[s.b], u.offset);
  }

  /// Total length of the r-erosion.
  double eroded_length(double r) const {
    double total = 0.0;
    for (const auto& s : net_.segments()) {
      const double da = boundary_dist_[s.a], db = boundary_dist_[s.b];
      const double lo = std::max(0.0, r - da);
      const double hi = std::min(s.length, s.length + db - r);
      if (hi > lo) total += hi - lo;
    }
    return total;
  }

 private:
  LinearNetwork net_;
  std::vector<double> boundary_dist_;
};

static_assert(RegularMetric<ShortestPathMetric>);

inline double shortest_path_distance(const LinearNetwork& net, const NetworkLocation& u, const NetworkLocation& v) {
  return DistanceField(net, u).at(v);
}

inline DistanceField distance_field(const LinearNetwork& net, const NetworkLocation& u) { return DistanceField(net, u); }

inline std::size_t boundary_count(const LinearNetwork& net, const NetworkLocation& u, double r) {
  return DistanceField(net, u).boundary_count(r);
}

inline double weight(const LinearNetwork& net, const NetworkLocation& u, double r) {
  return DistanceField(net, u).weight(r);
}

inline double farthest_distance(const LinearNetwork& net, const NetworkLocation& u) {
  return DistanceField(net, u).farthest();
}

/// Approximates R = min_u D(u) by the minimum over grid points and vertices.
/// The result is an upper bound on R that tightens as the grid is refined.
inline double global_r_max(const LinearNetwork& net, std::span<const NetworkLocation> grid) {
  if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "global_r_max needs a nonempty grid");
  std::vector<NetworkLocation> probes(grid.begin(), grid.end());
  for (std::size_t i = 0; i < net.segment_count(); ++i) {
    probes.push_back({i, 0.0});
    probes.push_back({i, net.segment(i).length});
  }
  double best = kInfinity;
  for (const auto& u : probes) best = std::min(best, farthest_distance(net, u));
  return best;
}

}  // namespace netfrak

#endif  // NETFRAK_METRIC_HPP
