#ifndef NETFRAK_CLI_HPP
#define NETFRAK_CLI_HPP

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "netfrak/analysis.hpp"
#include "netfrak/envelope.hpp"
#include "netfrak/error.hpp"
#include "netfrak/geometry.hpp"
#include "netfrak/intensity.hpp"
#include "netfrak/io.hpp"
#include "netfrak/metric.hpp"
#include "netfrak/simulate.hpp"
#include "netfrak/summaries.hpp"
#include "netfrak/svg.hpp"

#ifndef NETFRAK_VERSION
#define NETFRAK_VERSION "0.1.0"
#endif

namespace netfrak::cli {

namespace detail {

inline Point2 parse_xy(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw Error(ErrorCode::BadInput, "expected x,y but got '" + s + "'");
  try {
    std::size_t used1 = 0, used2 = 0;
    const double x = std::stod(s.substr(0, comma), &used1);
    const double y = std::stod(s.substr(comma + 1), &used2);
    if (used1 != comma || used2 != s.size() - comma - 1) throw std::invalid_argument(s);
    return {x, y};
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::BadInput, "expected x,y but got '" + s + "'");
  }
}

inline double parse_number(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::BadInput, key + ": expected a number, got '" + s + "'");
  }
}

inline std::optional<double> parse_bandwidth(const std::string& s) {
  if (s == "scott") return std::nullopt;
  const double v = parse_number("--bandwidth", s);
  if (!(v > 0.0)) throw Error(ErrorCode::BadBandwidth, "--bandwidth must be 'scott' or a positive number");
  return v;
}

inline Statistic parse_stat(const std::string& s) {
  if (s == "f") return Statistic::F;
  if (s == "g") return Statistic::H;
  if (s == "j") return Statistic::J;
  if (s == "k") return Statistic::K;
  throw Error(ErrorCode::BadInput, "--stat must be one of f, g, j, k");
}

inline double default_tol(const LinearNetwork& net, double tol) { return tol > 0.0 ? tol : 1e-6 * net.bbox().diameter(); }

inline double default_spacing(const LinearNetwork& net, double spacing) {
  return spacing > 0.0 ? spacing : net.total_length() / 500.0;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); }
};

inline io::RunManifest manifest_for(const std::string& sub, const std::vector<std::string>& argv,
                                    std::map<std::string, std::string> params, std::uint64_t seed,
                                    const std::vector<std::string>& inputs) {
  io::RunManifest m;
  m.subcommand = sub;
  m.argv = argv;
  m.params = std::move(params);
  m.seed = seed;
  for (const auto& path : inputs) m.input_digests[path] = io::file_digest(path);
  m.tool_version = NETFRAK_VERSION;
  return m;
}

inline std::map<std::string, double> parse_params(const std::vector<std::string>& kv,
                                                  const std::map<std::string, double>& defaults) {
  std::map<std::string, double> out = defaults;
  for (const auto& item : kv) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::BadInput, "--params expects KEY=VAL, got '" + item + "'");
    const auto key = item.substr(0, eq);
    if (!defaults.count(key)) throw Error(ErrorCode::BadParameter, "unknown model parameter '" + key + "'");
    out[key] = parse_number(key, item.substr(eq + 1));
  }
  return out;
}

}  // namespace detail

/// Runs the command-line interface on `args` (without the program name).
/// Returns 0 on success, 1 on user error, 2 on an internal failure.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Point patterns on linear networks: simulation, summary functions and envelopes", "netfrak"};
  app.require_subcommand(1);
  app.set_version_flag("--version", NETFRAK_VERSION);

  std::string net_path, pattern_path, out_path, svg_path, out_dir, from, to;
  std::string bandwidth = "scott", stat = "j", mode = "inhom", model, refit = "true";
  double tol = 0.0, grid_spacing = 0.0, rmax_frac = 0.45;
  std::size_t nr = 513, nsim = 99, rank = 1, reps = 1;
  std::uint64_t seed = 1;
  std::vector<std::string> params;

  auto* validate = app.add_subcommand("validate", "Check a network CSV and print its description");
  validate->add_option("--net", net_path, "Network CSV (x1,y1,x2,y2)")->required();

  auto* dist = app.add_subcommand("distance", "Shortest-path distance between two snapped points");
  dist->add_option("--net", net_path, "Network CSV")->required();
  dist->add_option("--from", from, "x,y")->required();
  dist->add_option("--to", to, "x,y")->required();
  dist->add_option("--tol", tol, "Snapping tolerance")->required();

  auto* sim = app.add_subcommand("simulate", "Simulate point patterns on a network");
  sim->add_option("--net", net_path, "Network CSV")->required();
  sim->add_option("--model", model, "poisson|ipoisson|ssi-thin|lgcp")
      ->required()
      ->check(CLI::IsMember({"poisson", "ipoisson", "ssi-thin", "lgcp"}));
  sim->add_option("--params", params, "Model parameters KEY=VAL");
  sim->add_option("--seed", seed, "Master seed");
  sim->add_option("--reps", reps, "Number of replicates")->check(CLI::PositiveNumber);
  sim->add_option("--out-dir", out_dir, "Output directory")->required();

  auto* inten = app.add_subcommand("intensity", "Kernel intensity estimate on a grid");
  inten->add_option("--net", net_path, "Network CSV")->required();
  inten->add_option("--pattern", pattern_path, "Pattern CSV (x,y)")->required();
  inten->add_option("--bandwidth", bandwidth, "scott or a positive bandwidth");
  inten->add_option("--grid-spacing", grid_spacing, "Grid spacing (default |L|/500)");
  inten->add_option("--tol", tol, "Snapping tolerance (default 1e-6 x bbox diameter)");
  inten->add_option("--out", out_path, "Output CSV")->required();

  auto add_analysis = [&](CLI::App* sub) {
    sub->add_option("--net", net_path, "Network CSV")->required();
    sub->add_option("--pattern", pattern_path, "Pattern CSV")->required();
    sub->add_option("--stat", stat, "f|g|j|k")->check(CLI::IsMember({"f", "g", "j", "k"}));
    sub->add_option("--mode", mode, "inhom|hom")->check(CLI::IsMember({"inhom", "hom"}));
    sub->add_option("--grid-spacing", grid_spacing, "Centre grid spacing (default |L|/500)");
    sub->add_option("--rmax-frac", rmax_frac, "Largest r as a fraction of R");
    sub->add_option("--nr", nr, "Number of r values");
    sub->add_option("--bandwidth", bandwidth, "scott or a positive bandwidth");
    sub->add_option("--tol", tol, "Snapping tolerance (default 1e-6 x bbox diameter)");
    sub->add_option("--out", out_path, "Output CSV")->required();
    sub->add_option("--svg", svg_path, "Optional SVG plot");
  };
  auto* summary = app.add_subcommand("summary", "Estimate F, H (g), J or K");
  add_analysis(summary);
  auto* env = app.add_subcommand("envelope", "Pointwise Monte Carlo envelopes");
  add_analysis(env);
  env->add_option("--nsim", nsim, "Number of simulations");
  env->add_option("--rank", rank, "Order statistic rank");
  env->add_option("--refit", refit, "Refit intensity per simulation")->check(CLI::IsMember({"true", "false"}));
  env->add_option("--seed", seed, "Master seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << NETFRAK_VERSION << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  const std::vector<std::string> argv(args.begin(), args.end());
  detail::Timer timer;
  try {
    const auto net = io::read_network_csv(net_path);

    if (validate->parsed()) {
      out << net.segment_count() << " segments and " << net.vertex_count() << " nodes, " << net.boundary().size()
          << " of degree 1; total length " << io::format_double(net.total_length()) << "; maximum node degree "
          << net.max_degree() << "; window [" << io::format_double(net.bbox().xmin) << ", "
          << io::format_double(net.bbox().xmax) << "] x [" << io::format_double(net.bbox().ymin) << ", "
          << io::format_double(net.bbox().ymax) << "]\n";
      return 0;
    }

    if (dist->parsed()) {
      const auto u = snap_to_network(net, detail::parse_xy(from), tol);
      const auto v = snap_to_network(net, detail::parse_xy(to), tol);
      out << io::format_double(shortest_path_distance(net, u, v)) << '\n';
      return 0;
    }

    if (sim->parsed()) {
      std::map<std::string, double> defaults;
      if (model == "poisson") defaults = {{"rho", -1.0}};
      if (model == "ipoisson") defaults = {{"a", 0.005}, {"freq", 1.0}};
      if (model == "ssi-thin") defaults = {{"n", 300}, {"delta_frac", 0.001}, {"p", 0.3}};
      if (model == "lgcp") defaults = {{"base", 0.002}, {"trend", 1.0}, {"variance", 1.0}, {"scale", 1.0}, {"spacing", 0.0}};
      const auto p = detail::parse_params(params, defaults);
      if (model == "poisson" && p.at("rho") < 0.0) throw Error(ErrorCode::BadParameter, "poisson needs rho=VALUE >= 0");

      std::optional<LgcpSampler> sampler;
      if (model == "lgcp") {
        const double spacing = p.at("spacing") > 0.0 ? p.at("spacing") : std::max(0.5 * p.at("scale"), net.total_length() / 4000.0);
        GaussianFieldSpec spec{log_linear_mean(net, p.at("base"), p.at("trend")),
                               exponential_covariance(p.at("variance"), p.at("scale")), spacing};
        sampler.emplace(net, spec);
      }
      const ShortestPathMetric metric(net);
      std::vector<PointPattern> patterns(reps);
      std::vector<char> partial(reps, 0);
      const SeededRng master(seed);
      parallel_for(reps, [&](std::size_t i) {
        SeededRng rng = master.substream(i);
        if (model == "poisson") {
          patterns[i] = poisson_homogeneous(net, p.at("rho"), rng);
        } else if (model == "ipoisson") {
          const double a = p.at("a"), freq = p.at("freq");
          patterns[i] = poisson_inhomogeneous(
              net, [&](const NetworkLocation& u) { return a * std::abs(std::sin(freq * net.xy(u).x)); }, a, rng);
        } else if (model == "ssi-thin") {
          const auto n = static_cast<std::size_t>(p.at("n"));
          auto packed = ssi(metric, n, p.at("delta_frac") * net.total_length(), rng);
          partial[i] = packed.partial ? 1 : 0;
          const double keep = p.at("p");
          patterns[i] = thin(packed.pattern, [keep](const NetworkLocation&) { return keep; }, rng);
        } else {
          patterns[i] = sampler->sample(rng).pattern;
        }
      });

      std::filesystem::create_directories(out_dir);
      nlohmann::json counts = nlohmann::json::array();
      std::vector<std::size_t> partial_reps;
      for (std::size_t i = 0; i < reps; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "pattern_%04zu.csv", i + 1);
        auto f = io::detail::open_output((std::filesystem::path(out_dir) / name).string());
        io::write_pattern_csv(f, patterns[i]);
        counts.push_back(patterns[i].size());
        if (partial[i]) partial_reps.push_back(i + 1);
      }
      std::map<std::string, std::string> pm{{"model", model}, {"reps", std::to_string(reps)}};
      for (const auto& [k, v] : p) pm["param." + k] = io::format_double(v);
      auto m = detail::manifest_for("simulate", argv, pm, seed, {net_path});
      m.flags["point_counts"] = counts;
      m.flags["ssi_partial_replicates"] = partial_reps;
      if (sampler) m.flags["lgcp_cells"] = sampler->cell_count();
      m.duration_seconds = timer.seconds();
      m.write((std::filesystem::path(out_dir) / "manifest.json").string());
      out << "wrote " << reps << " pattern(s) to " << out_dir << '\n';
      return 0;
    }

    const auto pattern = io::read_pattern_csv(pattern_path, net, detail::default_tol(net, tol));
    const double spacing = detail::default_spacing(net, grid_spacing);

    if (inten->parsed()) {
      const auto bw = detail::parse_bandwidth(bandwidth);
      const double sigma = bw ? *bw : scott_bandwidth(pattern);
      const auto surface = kernel_intensity(net, pattern, sigma);
      auto f = io::detail::open_output(out_path);
      f << "x,y,segment,offset,rho_hat\n";
      for (const auto& u : grid_points(net, spacing)) {
        const auto q = net.xy(u);
        f << io::format_double(q.x) << ',' << io::format_double(q.y) << ',' << u.segment << ','
          << io::format_double(u.offset) << ',' << io::format_double(surface(u)) << '\n';
      }
      auto m = detail::manifest_for("intensity", argv,
                                    {{"bandwidth", io::format_double(sigma)}, {"grid_spacing", io::format_double(spacing)}},
                                    0, {net_path, pattern_path});
      m.duration_seconds = timer.seconds();
      m.write(out_path + ".manifest.json");
      return 0;
    }

    AnalysisSettings settings;
    settings.grid_spacing = spacing;
    settings.mode = mode == "hom" ? IntensityMode::Homogeneous : IntensityMode::Inhomogeneous;
    settings.bandwidth = detail::parse_bandwidth(bandwidth);
    settings.rmax_frac = rmax_frac;
    settings.nr = nr;
    const AnalysisContext ctx(net, settings);
    const Statistic which = detail::parse_stat(stat);
    std::map<std::string, std::string> pm{{"stat", stat},
                                          {"mode", mode},
                                          {"grid_spacing", io::format_double(spacing)},
                                          {"rmax_frac", io::format_double(rmax_frac)},
                                          {"nr", std::to_string(nr)},
                                          {"bandwidth", bandwidth},
                                          {"R", io::format_double(ctx.r_limit)}};

    if (summary->parsed()) {
      const auto est = summarize(ctx, pattern, which);
      auto f = io::detail::open_output(out_path);
      io::write_summary_csv(f, est);
      f.close();
      if (!svg_path.empty()) write_svg(summary_plot(est), svg_path);
      auto m = detail::manifest_for("summary", argv, pm, 0, {net_path, pattern_path});
      m.flags["rho_bar"] = est.meta.rho_bar;
      m.flags["rho_bar_floored"] = est.meta.rho_bar_floored;
      m.flags["factor_violations"] = est.meta.factor_violations;
      m.duration_seconds = timer.seconds();
      m.write(out_path + ".manifest.json");
      if (est.meta.factor_violations > 0)
        err << "warning: " << est.meta.factor_violations << " product factors fell outside [0,1]\n";
      return 0;
    }

    if (env->parsed()) {
      EnvelopeOptions opt;
      opt.stat = which;
      opt.nsim = nsim;
      opt.rank = rank;
      opt.refit = refit == "true";
      opt.seed = seed;
      const auto res = pointwise_envelope(ctx, pattern, opt);
      auto f = io::detail::open_output(out_path);
      io::write_envelope_csv(f, res);
      f.close();
      if (!svg_path.empty()) write_svg(envelope_plot(res), svg_path);
      pm["nsim"] = std::to_string(nsim);
      pm["rank"] = std::to_string(rank);
      pm["refit"] = refit;
      auto m = detail::manifest_for("envelope", argv, pm, seed, {net_path, pattern_path});
      m.flags["null_model"] = res.null_model;
      m.flags["failed_replicates"] = res.failed_replicates;
      m.flags["null_fallback"] = res.null_fallback;
      m.duration_seconds = timer.seconds();
      m.write(out_path + ".manifest.json");
      out << envelope_report(res) << '\n';
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::Internal ? 2 : 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace netfrak::cli

#endif  // NETFRAK_CLI_HPP
