#ifndef NETFRAK_GEOMETRY_HPP
#define NETFRAK_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "netfrak/error.hpp"

namespace netfrak {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Segment {
  std::size_t a = 0;
  std::size_t b = 0;
  double length = 0.0;
};

/// A point on the network: arc length `offset` from endpoint a of `segment`.
struct NetworkLocation {
  std::size_t segment = 0;
  double offset = 0.0;

  friend bool operator==(const NetworkLocation&, const NetworkLocation&) = default;
};

struct Incidence {
  std::size_t vertex;   // the neighbour
  std::size_t segment;  // the connecting segment
};

struct BoundingBox {
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;

  double diameter() const { return std::hypot(xmax - xmin, ymax - ymin); }
};

/// Immutable linear network. Copies share the same underlying data.
class LinearNetwork {
  struct Data {
    std::vector<Point2> vertices;
    std::vector<Segment> segments;
    std::vector<std::vector<Incidence>> adjacency;
    std::vector<std::size_t> boundary;
    std::vector<double> cumulative;  // prefix sums of segment lengths, size E+1
    BoundingBox bbox;
    double total_length = 0.0;
  };

 public:
  LinearNetwork() = default;

  std::span<const Point2> vertices() const { return data_->vertices; }
  std::span<const Segment> segments() const { return data_->segments; }
  const Segment& segment(std::size_t i) const { return data_->segments[i]; }
  std::size_t vertex_count() const { return data_->vertices.size(); }
  std::size_t segment_count() const { return data_->segments.size(); }

  /// |L|
  double total_length() const { return data_->total_length; }
  std::span<const Incidence> incident(std::size_t v) const { return data_->adjacency[v]; }
  std::size_t degree(std::size_t v) const { return data_->adjacency[v].size(); }
  std::size_t max_degree() const {
    std::size_t m = 0;
    for (const auto& adj : data_->adjacency) m = std::max(m, adj.size());
    return m;
  }
  /// Vertices of degree one.
  std::span<const std::size_t> boundary() const { return data_->boundary; }
  const BoundingBox& bbox() const { return data_->bbox; }

  /// Simplicity tolerance: 1e-9 |L|.
  double length_tolerance() const { return 1e-9 * data_->total_length; }

  Point2 xy(const NetworkLocation& u) const {
    const auto& s = data_->segments[u.segment];
    const auto& pa = data_->vertices[s.a];
    const auto& pb = data_->vertices[s.b];
    const double f = u.offset / s.length;
    return {pa.x + f * (pb.x - pa.x), pa.y + f * (pb.y - pa.y)};
  }

  bool contains(const NetworkLocation& u) const {
    return u.segment < segment_count() && u.offset >= 0.0 &&
           u.offset <= data_->segments[u.segment].length;
  }

  /// Vertex index if u sits exactly on an endpoint.
  std::optional<std::size_t> vertex_at(const NetworkLocation& u) const {
    const auto& s = data_->segments[u.segment];
    if (u.offset == 0.0) return s.a;
    if (u.offset == s.length) return s.b;
    return std::nullopt;
  }

  /// Maps every representation of a shared vertex to the one on its
  /// lowest-indexed incident segment.
  NetworkLocation canonical(const NetworkLocation& u) const {
    const auto v = vertex_at(u);
    if (!v) return u;
    std::size_t best = u.segment;
    for (const auto& inc : data_->adjacency[*v]) best = std::min(best, inc.segment);
    const auto& s = data_->segments[best];
    return {best, s.a == *v ? 0.0 : s.length};
  }

  bool same_location(const NetworkLocation& u, const NetworkLocation& v) const {
    return canonical(u) == canonical(v);
  }

  /// Location at arc-length position `s` along the concatenation of all segments.
  NetworkLocation at_arc_position(double s) const {
    const auto& cum = data_->cumulative;
    s = std::clamp(s, 0.0, data_->total_length);
    auto it = std::upper_bound(cum.begin() + 1, cum.end(), s);
    std::size_t seg = static_cast<std::size_t>(std::distance(cum.begin() + 1, it));
    if (seg >= segment_count()) seg = segment_count() - 1;
    const double len = data_->segments[seg].length;
    return {seg, std::clamp(s - cum[seg], 0.0, len)};
  }

 private:
  friend LinearNetwork build_network(std::vector<Point2> vertices,
                                     const std::vector<std::pair<std::size_t, std::size_t>>& segments);
  std::shared_ptr<const Data> data_;
};

namespace detail {

inline double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

/// Distance from p to segment [a,b] and the clamped projection parameter in [0,1].
inline std::pair<double, double> project(const Point2& p, const Point2& a, const Point2& b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double f = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  f = std::clamp(f, 0.0, 1.0);
  const Point2 q{a.x + f * dx, a.y + f * dy};
  return {distance(p, q), f};
}

inline bool proper_intersection(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const double d1 = cross(a, b, c), d2 = cross(a, b, d);
  const double d3 = cross(c, d, a), d4 = cross(c, d, b);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

inline double segment_gap(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  if (proper_intersection(a, b, c, d)) return 0.0;
  return std::min({project(a, c, d).first, project(b, c, d).first, project(c, a, b).first,
                   project(d, a, b).first});
}

}  // namespace detail

/// Validates and builds a network from vertex coordinates and index pairs.
inline LinearNetwork build_network(std::vector<Point2> vertices,
                                   const std::vector<std::pair<std::size_t, std::size_t>>& segments) {
  if (segments.empty()) throw Error(ErrorCode::EmptyNetwork, "network has no segments");
  if (vertices.empty()) throw Error(ErrorCode::BadIndex, "segments given without vertices");
  for (const auto& p : vertices) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw Error(ErrorCode::BadInput, "non-finite vertex coordinate");
  }

  BoundingBox box{vertices.front().x, vertices.front().x, vertices.front().y, vertices.front().y};
  for (const auto& p : vertices) {
    box.xmin = std::min(box.xmin, p.x);
    box.xmax = std::max(box.xmax, p.x);
    box.ymin = std::min(box.ymin, p.y);
    box.ymax = std::max(box.ymax, p.y);
  }
  const double tol = 1e-9 * box.diameter();

  std::vector<Segment> segs;
  segs.reserve(segments.size());
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto [a, b] = segments[i];
    if (a >= vertices.size() || b >= vertices.size())
      throw Error(ErrorCode::BadIndex, "segment " + std::to_string(i) + " references a missing vertex");
    const double len = distance(vertices[a], vertices[b]);
    if (a == b || !(len > tol) || !std::isfinite(len))
      throw Error(ErrorCode::ZeroLengthSegment, "segment " + std::to_string(i) + " has zero length");
    if (!seen.insert(std::minmax(a, b)).second)
      throw Error(ErrorCode::DuplicateSegment, "segment " + std::to_string(i) + " duplicates another");
    segs.push_back({a, b, len});
  }

  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& p1 = vertices[segs[i].a];
    const auto& p2 = vertices[segs[i].b];
    for (std::size_t j = i + 1; j < segs.size(); ++j) {
      const auto& q1 = vertices[segs[j].a];
      const auto& q2 = vertices[segs[j].b];
      const std::size_t ids_i[2] = {segs[i].a, segs[i].b};
      const std::size_t ids_j[2] = {segs[j].a, segs[j].b};
      int shared = -1;
      for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t)
          if (ids_i[s] == ids_j[t]) shared = s * 2 + t;
      bool crossing = false;
      if (shared < 0) {
        crossing = detail::segment_gap(p1, p2, q1, q2) <= tol;
      } else {
        // Sharing one vertex: the free endpoint of either segment must stay off the other.
        const Point2& free_i = (shared / 2 == 0) ? p2 : p1;
        const Point2& free_j = (shared % 2 == 0) ? q2 : q1;
        crossing = detail::project(free_i, q1, q2).first <= tol || detail::project(free_j, p1, p2).first <= tol;
      }
      if (crossing)
        throw Error(ErrorCode::CrossingSegments,
                    "segments " + std::to_string(i) + " and " + std::to_string(j) + " intersect away from a shared vertex");
    }
  }

  std::vector<std::vector<Incidence>> adjacency(vertices.size());
  for (std::size_t i = 0; i < segs.size(); ++i) {
    adjacency[segs[i].a].push_back({segs[i].b, i});
    adjacency[segs[i].b].push_back({segs[i].a, i});
  }

  // Every vertex must be reachable; isolated vertices count as a separate component.
  std::vector<char> visited(vertices.size(), 0);
  std::vector<std::size_t> stack{segs.front().a};
  visited[segs.front().a] = 1;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (const auto& inc : adjacency[v]) {
      if (!visited[inc.vertex]) {
        visited[inc.vertex] = 1;
        stack.push_back(inc.vertex);
      }
    }
  }
  if (std::find(visited.begin(), visited.end(), 0) != visited.end())
    throw Error(ErrorCode::Disconnected, "network has more than one connected component");

  auto data = std::make_shared<LinearNetwork::Data>();
  data->cumulative.resize(segs.size() + 1, 0.0);
  for (std::size_t i = 0; i < segs.size(); ++i) data->cumulative[i + 1] = data->cumulative[i] + segs[i].length;
  data->total_length = data->cumulative.back();
  for (std::size_t v = 0; v < vertices.size(); ++v)
    if (adjacency[v].size() == 1) data->boundary.push_back(v);
  data->vertices = std::move(vertices);
  data->segments = std::move(segs);
  data->adjacency = std::move(adjacency);
  data->bbox = box;

  LinearNetwork net;
  net.data_ = std::move(data);
  return net;
}

/// Nearest Euclidean projection onto the network, if it lies within tol.
inline NetworkLocation snap_to_network(const LinearNetwork& net, const Point2& xy, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::BadParameter, "snap tolerance must be positive");
  double best = std::numeric_limits<double>::infinity();
  NetworkLocation loc;
  const auto verts = net.vertices();
  for (std::size_t i = 0; i < net.segment_count(); ++i) {
    const auto& s = net.segment(i);
    const auto [d, f] = detail::project(xy, verts[s.a], verts[s.b]);
    if (d < best) {
      best = d;
      loc = {i, f * s.length};
    }
  }
  if (best > tol)
    throw Error(ErrorCode::TooFarFromNetwork,
                "point (" + std::to_string(xy.x) + "," + std::to_string(xy.y) + ") is " + std::to_string(best) +
                    " from the network");
  return loc;
}

/// Cell-midpoint grid: offsets spacing/2, 3 spacing/2, ... on every segment.
inline std::vector<NetworkLocation> grid_points(const LinearNetwork& net, double spacing) {
  if (!(spacing > 0.0) || !(spacing < net.total_length()))
    throw Error(ErrorCode::BadSpacing, "grid spacing must lie in (0, |L|)");
  std::vector<NetworkLocation> grid;
  grid.reserve(static_cast<std::size_t>(net.total_length() / spacing) + net.segment_count());
  for (std::size_t i = 0; i < net.segment_count(); ++i) {
    const double len = net.segment(i).length;
    for (std::size_t k = 0;; ++k) {
      const double t = (static_cast<double>(k) + 0.5) * spacing;
      if (t >= len) break;
      grid.push_back({i, t});
    }
  }
  return grid;
}

struct QuadratureCell {
  NetworkLocation midpoint;
  double length;
};

/// Per-segment midpoint rule: each segment split into ceil(len/h) equal cells.
inline std::vector<QuadratureCell> quadrature_cells(const LinearNetwork& net, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::BadSpacing, "quadrature spacing must be positive");
  std::vector<QuadratureCell> cells;
  for (std::size_t i = 0; i < net.segment_count(); ++i) {
    const double len = net.segment(i).length;
    const auto count = static_cast<std::size_t>(std::max(1.0, std::ceil(len / h)));
    const double cell = len / static_cast<double>(count);
    for (std::size_t k = 0; k < count; ++k) cells.push_back({{i, (static_cast<double>(k) + 0.5) * cell}, cell});
  }
  return cells;
}

/// True iff u lies in the r-erosion of the network under `metric`.
template <class Metric>
bool erosion_contains(const LinearNetwork&, const Metric& metric, double r, const NetworkLocation& u) {
  return metric.distance_to_boundary(u) >= r;
}

/// A simple point pattern on a network.
class PointPattern {
 public:
  PointPattern() = default;

  PointPattern(LinearNetwork net, std::vector<NetworkLocation> points)
      : net_(std::move(net)), points_(std::move(points)) {
    validate();
  }

  const LinearNetwork& network() const { return net_; }
  std::span<const NetworkLocation> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const NetworkLocation& operator[](std::size_t i) const { return points_[i]; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

  std::vector<Point2> coordinates() const {
    std::vector<Point2> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(net_.xy(p));
    return out;
  }

 private:
  void validate() const {
    const double tol = net_.length_tolerance();
    // Points within tol of each other either share a segment or sit near a common vertex.
    std::vector<std::vector<double>> by_segment(net_.segment_count());
    std::vector<int> near_vertex(net_.vertex_count(), 0);
    for (const auto& p : points_) {
      if (!net_.contains(p)) throw Error(ErrorCode::BadInput, "point does not lie on the network");
      by_segment[p.segment].push_back(p.offset);
      const auto& s = net_.segment(p.segment);
      const bool near_a = p.offset <= tol, near_b = s.length - p.offset <= tol;
      if (near_a && ++near_vertex[s.a] > 1) throw Error(ErrorCode::NotSimple, "two points share a vertex");
      if (near_b && ++near_vertex[s.b] > 1) throw Error(ErrorCode::NotSimple, "two points share a vertex");
    }
    for (auto& offs : by_segment) {
      std::sort(offs.begin(), offs.end());
      for (std::size_t k = 1; k < offs.size(); ++k)
        if (offs[k] - offs[k - 1] <= tol) throw Error(ErrorCode::NotSimple, "duplicate points in pattern");
    }
  }

  LinearNetwork net_;
  std::vector<NetworkLocation> points_;
};

}  // namespace netfrak

#endif  // NETFRAK_GEOMETRY_HPP
