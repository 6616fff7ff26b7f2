#ifndef NETFRAK_IO_HPP
#define NETFRAK_IO_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "netfrak/envelope.hpp"
#include "netfrak/error.hpp"
#include "netfrak/geometry.hpp"
#include "netfrak/summaries.hpp"

namespace netfrak::io {

/// Shortest round-trippable decimal (17 significant digits).
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_optional(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '\xEF' ||
                        s.front() == '\xBB' || s.front() == '\xBF'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double parse_double(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw Error(ErrorCode::BadInput, "line " + std::to_string(line_no) + ": cannot parse number '" + std::string(s) + "'");
  return v;
}

struct Table {
  std::map<std::string, std::size_t> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

inline Table read_table(std::istream& in, const std::string& what) {
  Table t;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (!have_header) {
      for (std::size_t i = 0; i < cells.size(); ++i) t.columns[std::string(cells[i])] = i;
      have_header = true;
      continue;
    }
    std::vector<std::string> row(cells.begin(), cells.end());
    if (row.size() != t.columns.size())
      throw Error(ErrorCode::BadInput, what + " line " + std::to_string(line_no) + ": expected " +
                                           std::to_string(t.columns.size()) + " fields");
    t.rows.push_back(std::move(row));
    t.line_numbers.push_back(line_no);
  }
  if (!have_header) throw Error(ErrorCode::BadInput, what + " is empty");
  return t;
}

inline std::size_t require_column(const Table& t, const std::string& name, const std::string& what) {
  const auto it = t.columns.find(name);
  if (it == t.columns.end()) throw Error(ErrorCode::BadInput, what + " lacks column '" + name + "'");
  return it->second;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::BadInput, "cannot open " + path);
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::BadInput, "cannot write " + path);
  return out;
}

}  // namespace detail

/// Network CSV: header x1,y1,x2,y2, one segment per row. Endpoints closer
/// than 1e-9 times the bounding-box diameter become one vertex.
inline LinearNetwork read_network_csv(std::istream& in) {
  const auto t = detail::read_table(in, "network CSV");
  const std::size_t cx1 = detail::require_column(t, "x1", "network CSV");
  const std::size_t cy1 = detail::require_column(t, "y1", "network CSV");
  const std::size_t cx2 = detail::require_column(t, "x2", "network CSV");
  const std::size_t cy2 = detail::require_column(t, "y2", "network CSV");

  std::vector<std::pair<Point2, Point2>> raw;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const auto ln = t.line_numbers[i];
    const Point2 a{detail::parse_double(row[cx1], ln), detail::parse_double(row[cy1], ln)};
    const Point2 b{detail::parse_double(row[cx2], ln), detail::parse_double(row[cy2], ln)};
    for (const auto& p : {a, b}) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
    raw.emplace_back(a, b);
  }
  if (raw.empty()) throw Error(ErrorCode::EmptyNetwork, "network CSV has no segments");
  const double tol = 1e-9 * std::hypot(xmax - xmin, ymax - ymin);
  const double cell = tol > 0.0 ? tol : 1.0;

  // Spatial hash on cells of size tol; a match lies in one of the 9 neighbouring cells.
  std::vector<Point2> vertices;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
  auto key = [](long long ix, long long iy) {
    return (static_cast<std::uint64_t>(ix) * 0x9E3779B97F4A7C15ULL) ^ static_cast<std::uint64_t>(iy);
  };
  auto vertex_of = [&](const Point2& p) {
    const auto ix = static_cast<long long>(std::floor(p.x / cell));
    const auto iy = static_cast<long long>(std::floor(p.y / cell));
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy) {
        const auto it = buckets.find(key(ix + dx, iy + dy));
        if (it == buckets.end()) continue;
        for (auto v : it->second)
          if (distance(vertices[v], p) <= tol) return v;
      }
    vertices.push_back(p);
    buckets[key(ix, iy)].push_back(vertices.size() - 1);
    return vertices.size() - 1;
  };
  std::vector<std::pair<std::size_t, std::size_t>> segs;
  for (const auto& [a, b] : raw) {
    const auto va = vertex_of(a);
    const auto vb = vertex_of(b);
    segs.emplace_back(va, vb);
  }
  return build_network(std::move(vertices), segs);
}

inline LinearNetwork read_network_csv(const std::string& path) {
  auto in = detail::open_input(path);
  return read_network_csv(in);
}

inline void write_network_csv(std::ostream& out, const LinearNetwork& net) {
  out << "x1,y1,x2,y2\n";
  const auto v = net.vertices();
  for (const auto& s : net.segments())
    out << format_double(v[s.a].x) << ',' << format_double(v[s.a].y) << ',' << format_double(v[s.b].x) << ','
        << format_double(v[s.b].y) << '\n';
}

/// Pattern CSV: header with x,y. When segment,offset columns are present they
/// are used verbatim; otherwise each point is snapped within `tol`.
inline PointPattern read_pattern_csv(std::istream& in, const LinearNetwork& net, double tol) {
  const auto t = detail::read_table(in, "pattern CSV");
  const std::size_t cx = detail::require_column(t, "x", "pattern CSV");
  const std::size_t cy = detail::require_column(t, "y", "pattern CSV");
  const auto seg_it = t.columns.find("segment");
  const auto off_it = t.columns.find("offset");
  const bool located = seg_it != t.columns.end() && off_it != t.columns.end();
  std::vector<NetworkLocation> pts;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const auto ln = t.line_numbers[i];
    const Point2 p{detail::parse_double(row[cx], ln), detail::parse_double(row[cy], ln)};
    if (located) {
      const double seg = detail::parse_double(row[seg_it->second], ln);
      const NetworkLocation u{static_cast<std::size_t>(seg), detail::parse_double(row[off_it->second], ln)};
      if (seg < 0 || seg != std::floor(seg) || !net.contains(u))
        throw Error(ErrorCode::BadInput, "pattern CSV line " + std::to_string(ln) + ": location is not on the network");
      pts.push_back(u);
    } else {
      pts.push_back(snap_to_network(net, p, tol));
    }
  }
  return PointPattern(net, std::move(pts));
}

inline PointPattern read_pattern_csv(const std::string& path, const LinearNetwork& net, double tol) {
  auto in = detail::open_input(path);
  return read_pattern_csv(in, net, tol);
}

inline void write_pattern_csv(std::ostream& out, const PointPattern& pattern) {
  out << "x,y,segment,offset\n";
  for (const auto& u : pattern) {
    const auto p = pattern.network().xy(u);
    out << format_double(p.x) << ',' << format_double(p.y) << ',' << u.segment << ',' << format_double(u.offset) << '\n';
  }
}

inline void write_summary_csv(std::ostream& out, const SummaryEstimate& est) {
  out << "r,value,defined,n_grid,n_points\n";
  for (std::size_t k = 0; k < est.r.size(); ++k) {
    out << format_double(est.r[k]) << ',' << format_optional(est.values[k]) << ',' << (est.values[k] ? 1 : 0) << ','
        << (k < est.n_grid.size() ? est.n_grid[k] : 0) << ',' << (k < est.n_points.size() ? est.n_points[k] : 0) << '\n';
  }
}

inline void write_envelope_csv(std::ostream& out, const EnvelopeResult& res) {
  out << "r,obs,lo,hi,mean,defined_count\n";
  for (std::size_t k = 0; k < res.r.size(); ++k) {
    out << format_double(res.r[k]) << ',' << format_optional(res.observed[k]) << ',' << format_optional(res.lo[k]) << ','
        << format_optional(res.hi[k]) << ',' << format_optional(res.mean[k]) << ',' << res.defined_count[k] << '\n';
  }
}

/// Reads back a two-column-or-more numeric CSV; empty cells become nullopt.
inline std::map<std::string, std::vector<std::optional<double>>> read_numeric_csv(std::istream& in) {
  const auto t = detail::read_table(in, "CSV");
  std::map<std::string, std::vector<std::optional<double>>> out;
  for (const auto& [name, col] : t.columns) {
    auto& v = out[name];
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const auto& cell = t.rows[i][col];
      if (cell.empty())
        v.push_back(std::nullopt);
      else
        v.push_back(detail::parse_double(cell, t.line_numbers[i]));
    }
  }
  return out;
}

/// 64-bit FNV-1a of a file's bytes, as 16 hex digits.
inline std::string file_digest(const std::string& path) {
  auto in = detail::open_input(path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (in) {
    in.read(buf, sizeof buf);
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

/// Record of one CLI run. `argv` re-runs it verbatim.
struct RunManifest {
  std::string subcommand;
  std::vector<std::string> argv;
  std::map<std::string, std::string> params;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> input_digests;
  std::string tool_version;
  double duration_seconds = 0.0;
  nlohmann::json flags = nlohmann::json::object();

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["subcommand"] = subcommand;
    j["argv"] = argv;
    j["params"] = params;
    j["seed"] = seed;
    j["input_digests"] = input_digests;
    j["tool_version"] = tool_version;
    j["duration_seconds"] = duration_seconds;
    j["flags"] = flags;
    return j;
  }

  static RunManifest from_json(const nlohmann::json& j) {
    RunManifest m;
    m.subcommand = j.at("subcommand").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.params = j.at("params").get<std::map<std::string, std::string>>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.input_digests = j.at("input_digests").get<std::map<std::string, std::string>>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.duration_seconds = j.at("duration_seconds").get<double>();
    if (j.contains("flags")) m.flags = j.at("flags");
    return m;
  }

  void write(const std::string& path) const {
    auto out = detail::open_output(path);
    out << to_json().dump(2) << '\n';
  }

  static RunManifest read(const std::string& path) {
    auto in = detail::open_input(path);
    try {
      return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::BadInput, path + ": " + e.what());
    }
  }
};

}  // namespace netfrak::io

#endif  // NETFRAK_IO_HPP
