#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "netfrak/simulate.hpp"
#include "stat_helpers.hpp"

using namespace netfrak;

namespace {

/// Arc-length position of a location, normalised to [0, 1].
double arc_fraction(const LinearNetwork& net, const NetworkLocation& u) {
  double before = 0.0;
  for (std::size_t i = 0; i < u.segment; ++i) before += net.segment(i).length;
  return (before + u.offset) / net.total_length();
}

template <class Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

}  // namespace

TEST(Rng, SameSeedSameStream) {
  SeededRng a(42), b(42), c(43);
  for (int i = 0; i < 10; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
  }
  SeededRng s0 = SeededRng(42).substream(0), s1 = SeededRng(42).substream(1);
  EXPECT_NE(s0(), s1());
}

TEST(Poisson, CountsAndUniformPositions) {
  const auto net = fixtures::lollipop();
  const double rho = 20.0;
  SeededRng rng(1);
  std::vector<double> counts, positions;
  for (int rep = 0; rep < 400; ++rep) {
    const auto p = poisson_homogeneous(net, rho, rng);
    counts.push_back(static_cast<double>(p.size()));
    for (const auto& u : p) positions.push_back(arc_fraction(net, u));
  }
  const auto c = stats::mean_se(counts);
  EXPECT_NEAR(c.mean, rho * net.total_length(), 4.0 * c.se);
  EXPECT_GT(stats::ks_uniform_pvalue(positions), 1e-3);
}

TEST(Poisson, InhomogeneousThinning) {
  const auto net = fixtures::seg1(10.0);
  SeededRng rng(2);
  auto rho = [&](const NetworkLocation& u) { return 0.5 * net.xy(u).x; };  // integral 25
  std::vector<double> counts, cdf;
  for (int rep = 0; rep < 400; ++rep) {
    const auto p = poisson_inhomogeneous(net, rho, 5.0, rng);
    counts.push_back(static_cast<double>(p.size()));
    for (const auto& u : p) cdf.push_back(std::pow(u.offset / 10.0, 2));
  }
  const auto c = stats::mean_se(counts);
  EXPECT_NEAR(c.mean, 25.0, 4.0 * c.se);
  EXPECT_GT(stats::ks_uniform_pvalue(cdf), 1e-3);
  EXPECT_EQ(code_of([&] { poisson_inhomogeneous(net, rho, 1.0, rng); }), ErrorCode::BadDominating);
}

TEST(Ssi, RespectsInhibition) {
  const auto net = fixtures::desk_network();
  const ShortestPathMetric m(net);
  SeededRng rng(3);
  const double delta = 60.0;
  const auto res = ssi(m, 100, delta, rng);
  EXPECT_FALSE(res.partial);
  ASSERT_EQ(res.pattern.size(), 100u);
  for (std::size_t i = 0; i < res.pattern.size(); ++i) {
    const auto field = m.field(res.pattern[i]);
    for (std::size_t j = i + 1; j < res.pattern.size(); ++j) EXPECT_GT(field.at(res.pattern[j]), delta);
  }
}

TEST(Ssi, StopsWhenFull) {
  const ShortestPathMetric m(fixtures::seg1());
  SeededRng rng(4);
  const auto res = ssi(m, 10, 0.3, rng, 500);
  EXPECT_TRUE(res.partial);
  EXPECT_LE(res.pattern.size(), 4u);
  EXPECT_GE(res.proposals, 500u);
}

TEST(Thin, Extremes) {
  const auto net = fixtures::star3();
  SeededRng rng(5);
  const auto p = poisson_homogeneous(net, 30.0, rng);
  EXPECT_EQ(thin(p, [](const NetworkLocation&) { return 1.0; }, rng).size(), p.size());
  EXPECT_EQ(thin(p, [](const NetworkLocation&) { return 0.0; }, rng).size(), 0u);
  EXPECT_EQ(code_of([&] { thin(p, [](const NetworkLocation&) { return 1.5; }, rng); }), ErrorCode::BadParameter);
}

TEST(Lgcp, DegenerateFieldIsPoisson) {
  const auto net = fixtures::star3(10.0);
  GaussianFieldSpec spec{[](const Point2&) { return std::log(2.0); }, [](const Point2&, const Point2&) { return 0.0; },
                         0.5};
  const LgcpSampler sampler(net, spec);
  SeededRng rng(6);
  std::vector<double> counts;
  for (int rep = 0; rep < 300; ++rep) counts.push_back(static_cast<double>(sampler.sample(rng).pattern.size()));
  const auto c = stats::mean_se(counts);
  EXPECT_NEAR(c.mean, 60.0, 4.0 * c.se);
}

TEST(Lgcp, MeanCountIncludesVarianceCorrection) {
  const auto net = fixtures::star3(10.0);
  GaussianFieldSpec spec{[](const Point2&) { return 0.0; }, exponential_covariance(1.0, 1.0), 0.5};
  const LgcpSampler sampler(net, spec);
  EXPECT_EQ(sampler.cell_count(), 60u);
  EXPECT_GT(sampler.jitter(), 0.0);
  SeededRng rng(7);
  std::vector<double> counts, log_means;
  for (int rep = 0; rep < 400; ++rep) {
    const auto real = sampler.sample(rng);
    counts.push_back(static_cast<double>(real.pattern.size()));
    double s = 0.0;
    for (double z : real.log_intensity) s += z;
    log_means.push_back(s / static_cast<double>(real.log_intensity.size()));
  }
  const auto c = stats::mean_se(counts);
  EXPECT_NEAR(c.mean, 30.0 * std::exp(0.5), 4.0 * c.se);
  const auto z = stats::mean_se(log_means);
  EXPECT_NEAR(z.mean, 0.0, 4.0 * z.se);
}

TEST(Lgcp, Errors) {
  const auto net = fixtures::seg1(1000.0);
  GaussianFieldSpec big{[](const Point2&) { return 0.0; }, exponential_covariance(1.0, 1.0), 0.01};
  EXPECT_EQ(code_of([&] { LgcpSampler(net, big); }), ErrorCode::FieldTooLarge);
  GaussianFieldSpec bad{[](const Point2&) { return 0.0; },
                        [](const Point2& p, const Point2& q) { return p.x == q.x ? 1.0 : -1.0; }, 100.0};
  EXPECT_EQ(code_of([&] { LgcpSampler(net, bad); }), ErrorCode::CovarianceNotPD);
  GaussianFieldSpec zero{[](const Point2&) { return 0.0; }, exponential_covariance(1.0, 1.0), 0.0};
  EXPECT_EQ(code_of([&] { LgcpSampler(net, zero); }), ErrorCode::BadSpacing);
}

TEST(Lgcp, LogLinearMean) {
  const auto net = fixtures::seg1(100.0);
  const auto mu = log_linear_mean(net, 0.002, 1.0);
  EXPECT_NEAR(mu({100.0, 0.0}), std::log(0.002), 1e-15);
  EXPECT_NEAR(mu({0.0, 0.0}), std::log(0.002) - 1.0, 1e-15);
}

TEST(SimplePattern, DropsNearCoincidentDraws) {
  const auto net = fixtures::star3();
  const auto p = detail::simple_pattern(net, {{0, 0.5}, {1, 0.2}, {0, 0.5 + 1e-10}, {0, 0.0}, {2, 1e-10}, {1, 0.0}});
  ASSERT_EQ(p.size(), 3u);
  EXPECT_EQ(p[0], (NetworkLocation{0, 0.5}));
  EXPECT_EQ(p[1], (NetworkLocation{1, 0.2}));
  EXPECT_EQ(p[2], (NetworkLocation{0, 0.0}));
}
