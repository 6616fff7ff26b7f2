#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "netfrak/cli.hpp"

using namespace netfrak;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("netfrak_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

int run_cli(const std::vector<std::string>& args, std::string* out = nullptr, std::string* err = nullptr) {
  std::ostringstream o, e;
  const int code = cli::run(args, o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return code;
}

}  // namespace

TEST(NetworkCsv, RoundTripAndVertexMerging) {
  std::istringstream in("x1,y1,x2,y2\n0,0,1,0\n1,0,1,1\n1.0000000000001,1,0,1\n");
  const auto net = io::read_network_csv(in);
  EXPECT_EQ(net.vertex_count(), 4u);
  EXPECT_EQ(net.segment_count(), 3u);
  std::ostringstream out;
  io::write_network_csv(out, net);
  std::istringstream again(out.str());
  EXPECT_DOUBLE_EQ(io::read_network_csv(again).total_length(), net.total_length());
}

TEST(NetworkCsv, RejectsMalformedRows) {
  std::istringstream missing("x1,y1,x2\n0,0,1\n");
  EXPECT_THROW(io::read_network_csv(missing), Error);
  std::istringstream junk("x1,y1,x2,y2\n0,0,one,0\n");
  EXPECT_THROW(io::read_network_csv(junk), Error);
  std::istringstream ragged("x1,y1,x2,y2\n0,0,1\n");
  EXPECT_THROW(io::read_network_csv(ragged), Error);
}

TEST(PatternCsv, LocatedRoundTripIsExact) {
  const auto net = fixtures::star3();
  const PointPattern p(net, {{0, 0.1}, {1, 1.0 / 3.0}, {2, 0.999}});
  std::ostringstream out;
  io::write_pattern_csv(out, p);
  std::istringstream in(out.str());
  const auto q = io::read_pattern_csv(in, net, 1e-6);
  ASSERT_EQ(q.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(q[i], p[i]);
}

TEST(PatternCsv, SnapsPlainCoordinates) {
  const auto net = fixtures::star3();
  std::istringstream in("x,y\n0.5,0.0001\n0,0.25\n");
  const auto q = io::read_pattern_csv(in, net, 1e-3);
  EXPECT_EQ(q[0].segment, 0u);
  EXPECT_NEAR(q[1].offset, 0.25, 1e-12);
  std::istringstream far("x,y\n0.5,0.5\n");
  EXPECT_THROW(io::read_pattern_csv(far, net, 1e-3), Error);
}

TEST(SummaryCsv, UndefinedIsEmptyCell) {
  SummaryEstimate est;
  est.statistic = Statistic::H;
  est.r = {0.0, 0.5};
  est.values = {0.0, std::nullopt};
  est.n_points = {3, 0};
  std::ostringstream out;
  io::write_summary_csv(out, est);
  EXPECT_EQ(out.str(), "r,value,defined,n_grid,n_points\n0,0,1,0,3\n0.5,,0,0,0\n");
  std::istringstream in(out.str());
  const auto cols = io::read_numeric_csv(in);
  EXPECT_FALSE(cols.at("value")[1].has_value());
}

TEST(Manifest, JsonRoundTrip) {
  io::RunManifest m;
  m.subcommand = "envelope";
  m.argv = {"envelope", "--net", "a.csv"};
  m.params = {{"nsim", "99"}};
  m.seed = 12345678901234ULL;
  m.input_digests = {{"a.csv", "00ff"}};
  m.tool_version = "0.1.0";
  m.flags["null_fallback"] = false;
  const auto back = io::RunManifest::from_json(m.to_json());
  EXPECT_EQ(back.argv, m.argv);
  EXPECT_EQ(back.seed, m.seed);
  EXPECT_EQ(back.params, m.params);
  EXPECT_EQ(back.flags, m.flags);
}

TEST(Svg, BandReferenceAndEstimate) {
  EnvelopeResult res;
  res.stat = Statistic::J;
  res.r = {0, 1, 2};
  res.observed = {1.0, std::nullopt, 1.2};
  res.lo = {0.9, 0.8, 0.7};
  res.hi = {1.1, 1.2, 1.3};
  res.reference = {1, 1, 1};
  const auto svg = render_svg(envelope_plot(res));
  EXPECT_NE(svg.find("viewBox=\"0 0 800 600\""), std::string::npos);
  EXPECT_NE(svg.find("class=\"band\""), std::string::npos);
  EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
  // The gap at r = 1 restarts the estimate path.
  const auto est = svg.find("class=\"estimate\"");
  ASSERT_NE(est, std::string::npos);
  EXPECT_NE(svg.find(" M", est), std::string::npos);
}

TEST(Svg, AllUndefinedThrows) {
  SummaryEstimate est;
  est.statistic = Statistic::F;
  est.r = {0, 1};
  est.values = {std::nullopt, std::nullopt};
  try {
    render_svg(summary_plot(est));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AllUndefined);
  }
}

TEST(Cli, ValidateDescribesNetwork) {
  TempDir dir;
  write_file(dir / "net.csv", "x1,y1,x2,y2\n0,0,1,0\n0,0,-1,0\n0,0,0,1\n");
  std::string out;
  ASSERT_EQ(run_cli({"validate", "--net", dir / "net.csv"}, &out), 0);
  EXPECT_NE(out.find("3 segments and 4 nodes, 3 of degree 1; total length 3; maximum node degree 3"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  std::string err;
  EXPECT_EQ(run_cli({"bogus"}), 1);
  EXPECT_EQ(run_cli({"validate"}), 1);
  EXPECT_EQ(run_cli({"validate", "--net", dir / "missing.csv"}, nullptr, &err), 1);
  EXPECT_NE(err.find("cannot open"), std::string::npos);
  write_file(dir / "cross.csv", "x1,y1,x2,y2\n0,0,2,2\n0,2,2,0\n");
  EXPECT_EQ(run_cli({"validate", "--net", dir / "cross.csv"}, nullptr, &err), 1);
  EXPECT_NE(err.find("CrossingSegments"), std::string::npos);
}

TEST(Cli, Distance) {
  TempDir dir;
  write_file(dir / "net.csv", "x1,y1,x2,y2\n0,0,1,0\n0,0,-1,0\n0,0,0,1\n");
  std::string out;
  ASSERT_EQ(run_cli({"distance", "--net", dir / "net.csv", "--from", "0.5,0", "--to", "0,0.25", "--tol", "1e-6"}, &out), 0);
  EXPECT_EQ(out, "0.75\n");
}

TEST(Cli, SimulateSummaryEnvelopePipeline) {
  TempDir dir;
  {
    std::ofstream f(dir / "net.csv");
    io::write_network_csv(f, fixtures::star3(100.0));
  }
  ASSERT_EQ(run_cli({"simulate", "--net", dir / "net.csv", "--model", "poisson", "--params", "rho=0.15", "--seed", "9",
                     "--reps", "2", "--out-dir", dir / "sims"}),
            0);
  const auto manifest = io::RunManifest::read(dir / "sims/manifest.json");
  EXPECT_EQ(manifest.subcommand, "simulate");
  EXPECT_EQ(manifest.flags.at("point_counts").size(), 2u);
  const auto pattern = dir / "sims/pattern_0001.csv";
  ASSERT_TRUE(fs::exists(pattern));

  ASSERT_EQ(run_cli({"summary", "--net", dir / "net.csv", "--pattern", pattern, "--stat", "k", "--nr", "21", "--out",
                     dir / "k.csv", "--svg", dir / "k.svg"}),
            0);
  EXPECT_EQ(slurp(dir / "k.csv").rfind("r,value,defined,n_grid,n_points\n", 0), 0u);
  EXPECT_TRUE(fs::exists(dir / "k.svg"));
  EXPECT_TRUE(fs::exists(dir / "k.csv.manifest.json"));

  std::string out;
  ASSERT_EQ(run_cli({"envelope", "--net", dir / "net.csv", "--pattern", pattern, "--nsim", "5", "--nr", "21", "--out",
                     dir / "env.csv"},
                    &out),
            0);
  EXPECT_EQ(out.rfind("stat=J nsim=5 rank=1", 0), 0u);
  EXPECT_EQ(slurp(dir / "env.csv").rfind("r,obs,lo,hi,mean,defined_count\n", 0), 0u);

  ASSERT_EQ(run_cli({"intensity", "--net", dir / "net.csv", "--pattern", pattern, "--out", dir / "rho.csv"}), 0);
  EXPECT_EQ(slurp(dir / "rho.csv").rfind("x,y,segment,offset,rho_hat\n", 0), 0u);
}

TEST(Cli, SimulateModelsRun) {
  TempDir dir;
  {
    std::ofstream f(dir / "net.csv");
    io::write_network_csv(f, fixtures::star3(100.0));
  }
  for (const std::string model : {"ipoisson", "ssi-thin", "lgcp"}) {
    std::vector<std::string> args{"simulate", "--net", dir / "net.csv", "--model", model, "--out-dir", dir / model};
    if (model == "ssi-thin") args.insert(args.end(), {"--params", "n=30"});
    if (model == "lgcp") args.insert(args.end(), {"--params", "scale=5", "base=0.1"});
    std::string err;
    EXPECT_EQ(run_cli(args, nullptr, &err), 0) << model << ": " << err;
  }
  EXPECT_EQ(run_cli({"simulate", "--net", dir / "net.csv", "--model", "poisson", "--out-dir", dir / "p"}), 1);
  EXPECT_EQ(run_cli({"simulate", "--net", dir / "net.csv", "--model", "poisson", "--params", "rh=1", "--out-dir",
                     dir / "p"}),
            1);
}
