#ifndef NETFRAK_TESTS_ORACLE_HPP
#define NETFRAK_TESTS_ORACLE_HPP

// Brute-force reference for small fixtures. Every location of interest is
// spliced into the graph as a node, all-pairs distances come from
// Floyd-Warshall, and c_L(u, r) is found by sampling each edge's distance
// profile for sign changes plus exact node hits. Shares no code with the
// library's distance fields or estimators.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "netfrak/geometry.hpp"

namespace netfrak::oracle {

class DenseNetwork {
 public:
  DenseNetwork(const LinearNetwork& net, const std::vector<NetworkLocation>& points) {
    const std::size_t nv = net.vertex_count();
    std::vector<std::map<double, std::size_t>> cuts(net.segment_count());
    node_count_ = nv;
    // Locations within the network tolerance of each other share a node.
    const double tol = net.length_tolerance();
    for (const auto& p : points) {
      const auto& s = net.segment(p.segment);
      auto& m = cuts[p.segment];
      if (p.offset <= tol) {
        node_of_.push_back(s.a);
      } else if (p.offset >= s.length - tol) {
        node_of_.push_back(s.b);
      } else if (auto it = m.lower_bound(p.offset - tol); it != m.end() && it->first <= p.offset + tol) {
        node_of_.push_back(it->second);
      } else {
        m[p.offset] = node_count_;
        node_of_.push_back(node_count_++);
      }
    }
    for (std::size_t i = 0; i < net.segment_count(); ++i) {
      const auto& s = net.segment(i);
      std::vector<std::pair<double, std::size_t>> chain{{0.0, s.a}};
      for (const auto& [off, node] : cuts[i]) chain.emplace_back(off, node);
      chain.emplace_back(s.length, s.b);
      for (std::size_t k = 0; k + 1 < chain.size(); ++k)
        edges_.push_back({chain[k].second, chain[k + 1].second, chain[k + 1].first - chain[k].first});
    }
    for (std::size_t v = 0; v < nv; ++v)
      if (net.degree(v) == 1) boundary_.push_back(v);

    const double inf = std::numeric_limits<double>::infinity();
    d_.assign(node_count_, std::vector<double>(node_count_, inf));
    for (std::size_t v = 0; v < node_count_; ++v) d_[v][v] = 0.0;
    for (const auto& e : edges_) {
      d_[e.a][e.b] = std::min(d_[e.a][e.b], e.len);
      d_[e.b][e.a] = std::min(d_[e.b][e.a], e.len);
    }
    for (std::size_t k = 0; k < node_count_; ++k)
      for (std::size_t i = 0; i < node_count_; ++i)
        for (std::size_t j = 0; j < node_count_; ++j)
          if (d_[i][k] + d_[k][j] < d_[i][j]) d_[i][j] = d_[i][k] + d_[k][j];
  }

  /// Distance between the i-th and j-th registered points.
  double distance(std::size_t i, std::size_t j) const { return d_[node_of_[i]][node_of_[j]]; }

  double boundary_distance(std::size_t i) const {
    double best = std::numeric_limits<double>::infinity();
    for (auto b : boundary_) best = std::min(best, d_[node_of_[i]][b]);
    return best;
  }

  /// Points at distance exactly r from registered point i.
  std::size_t level_count(std::size_t i, double r, std::size_t samples = 4000) const {
    const auto src = node_of_[i];
    std::size_t count = 0;
    for (std::size_t v = 0; v < node_count_; ++v)
      if (std::abs(d_[src][v] - r) <= 1e-12) ++count;
    for (const auto& e : edges_) {
      const double da = d_[src][e.a], db = d_[src][e.b];
      // Endpoints already counted as node hits read as exactly on the level.
      auto level = [&](double v) { return std::abs(v - r) <= 1e-12 ? 0.0 : v - r; };
      double prev = level(da);
      for (std::size_t k = 1; k <= samples; ++k) {
        const double t = e.len * static_cast<double>(k) / static_cast<double>(samples);
        const double cur = k == samples ? level(db) : std::min(da + t, db + e.len - t) - r;
        if (k < samples && cur == 0.0) ++count;
        if ((prev < 0.0 && cur > 0.0) || (prev > 0.0 && cur < 0.0)) ++count;
        prev = cur;
      }
    }
    return count;
  }

  double weight(std::size_t i, double r) const { return 1.0 / static_cast<double>(level_count(i, r)); }

 private:
  struct Edge {
    std::size_t a, b;
    double len;
  };
  std::size_t node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> node_of_;
  std::vector<std::size_t> boundary_;
  std::vector<std::vector<double>> d_;
};

/// Direct enumeration of the F, H, J and K estimators for a small fixture.
/// `ratio[x]` is rho_bar / rho(x) (1 for the homogeneous variant) and
/// `inv_rho[x]` is 1 / rho(x).
struct Enumeration {
  std::vector<std::optional<double>> F, H, J;
  std::vector<double> K;
};

inline Enumeration enumerate(const LinearNetwork& net, const std::vector<NetworkLocation>& grid,
                             const std::vector<NetworkLocation>& pattern, const std::vector<double>& ratio,
                             const std::vector<double>& inv_rho, const std::vector<double>& r) {
  std::vector<NetworkLocation> all = grid;
  all.insert(all.end(), pattern.begin(), pattern.end());
  const DenseNetwork dense(net, all);
  const std::size_t g = grid.size(), n = pattern.size();
  const double tol = net.length_tolerance();
  Enumeration out;
  for (double rk : r) {
    // F
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t u = 0; u < g; ++u) {
      if (dense.boundary_distance(u) < rk) continue;
      ++used;
      double prod = 1.0;
      for (std::size_t x = 0; x < n; ++x) {
        const double d = dense.distance(u, g + x);
        if (d > tol && d <= rk) prod *= 1.0 - ratio[x] * dense.weight(u, d);
      }
      sum += prod;
    }
    std::optional<double> f;
    if (used > 0) f = 1.0 - sum / static_cast<double>(used);
    // H
    sum = 0.0;
    used = 0;
    for (std::size_t u = 0; u < n; ++u) {
      if (dense.boundary_distance(g + u) < rk) continue;
      ++used;
      double prod = 1.0;
      for (std::size_t x = 0; x < n; ++x) {
        if (x == u) continue;
        const double d = dense.distance(g + u, g + x);
        if (d > tol && d <= rk) prod *= 1.0 - ratio[x] * dense.weight(g + u, d);
      }
      sum += prod;
    }
    std::optional<double> h;
    if (used > 0) h = 1.0 - sum / static_cast<double>(used);
    // J
    std::optional<double> j;
    if (rk == 0.0 && f && h)
      j = 1.0;
    else if (f && h && *f != 1.0)
      j = (1.0 - *h) / (1.0 - *f);
    // K
    double k = 0.0;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        if (a == b) continue;
        const double d = dense.distance(g + a, g + b);
        if (d > tol && d <= rk) k += dense.weight(g + a, d) * inv_rho[a] * inv_rho[b];
      }
    out.F.push_back(f);
    out.H.push_back(h);
    out.J.push_back(j);
    out.K.push_back(k / net.total_length());
  }
  return out;
}

}  // namespace netfrak::oracle

#endif  // NETFRAK_TESTS_ORACLE_HPP
