#ifndef NETFRAK_TESTS_FIXTURES_HPP
#define NETFRAK_TESTS_FIXTURES_HPP

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "netfrak/geometry.hpp"
#include "netfrak/rng.hpp"

namespace netfrak::fixtures {

/// Unit segment (0,0)-(1,0).
inline LinearNetwork seg1(double scale = 1.0) { return build_network({{0, 0}, {scale, 0}}, {{0, 1}}); }

/// Centre (0,0) with arms to (1,0), (-1,0), (0,1); vertex 0 is the centre and
/// each arm runs centre -> tip.
inline LinearNetwork star3(double scale = 1.0) {
  return build_network({{0, 0}, {scale, 0}, {-scale, 0}, {0, scale}}, {{0, 1}, {0, 2}, {0, 3}});
}

/// Unit square loop, perimeter 4, no boundary.
inline LinearNetwork square_loop(double scale = 1.0) {
  return build_network({{0, 0}, {scale, 0}, {scale, scale}, {0, scale}}, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
}

/// A loop with a tail: square (0,0)-(1,1) plus a spur (1,0)-(2,0). Has both a
/// cycle and a boundary vertex.
inline LinearNetwork lollipop() {
  return build_network({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {2, 0}}, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {1, 4}});
}

/// City-like lattice: 6x6 vertices at `block` spacing, two interior edges
/// removed, and (with `spurs`) outward dead ends of length block/2 from each
/// non-corner edge vertex, giving 16 boundary vertices.
inline LinearNetwork desk_network(double block = 200.0, bool spurs = true) {
  std::vector<Point2> v;
  std::vector<std::pair<std::size_t, std::size_t>> s;
  constexpr int n = 6;
  auto id = [](int i, int j) { return static_cast<std::size_t>(j * n + i); };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) v.push_back({i * block, j * block});
  for (int j = 0; j < n; ++j)
    for (int i = 0; i + 1 < n; ++i)
      if (!(j == 2 && i == 1)) s.emplace_back(id(i, j), id(i + 1, j));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j + 1 < n; ++j)
      if (!(i == 3 && j == 3)) s.emplace_back(id(i, j), id(i, j + 1));
  const double spur = 0.5 * block;
  for (int k = 1; spurs && k + 1 < n; ++k) {
    const std::pair<Point2, std::size_t> ends[4] = {
        {{k * block, -spur}, id(k, 0)},
        {{k * block, (n - 1) * block + spur}, id(k, n - 1)},
        {{-spur, k * block}, id(0, k)},
        {{(n - 1) * block + spur, k * block}, id(n - 1, k)},
    };
    for (const auto& [p, from] : ends) {
      v.push_back(p);
      s.emplace_back(from, v.size() - 1);
    }
  }
  return build_network(std::move(v), s);
}

inline NetworkLocation random_location(const LinearNetwork& net, SeededRng& rng) {
  return net.at_arc_position(rng.uniform() * net.total_length());
}

}  // namespace netfrak::fixtures

#endif  // NETFRAK_TESTS_FIXTURES_HPP
