#include <gtest/gtest.h>

#include <cmath>

#include "rmt/parallel.hpp"
#include "rmt/rng.hpp"
#include "rmt/stats.hpp"

namespace rmt {
namespace {

TEST(Kolmogorov, Oracles) {
  EXPECT_NEAR(stats::kolmogorov_survival(1.0), 0.26999967167735456, 1e-12);
  EXPECT_NEAR(stats::kolmogorov_quantile(0.01), 1.6276236115189504, 1e-9);
  EXPECT_NEAR(stats::ks_critical_value(100, 100, 0.01), 0.23018073858487773, 1e-9);
  EXPECT_NEAR(stats::kolmogorov_survival(stats::kolmogorov_quantile(0.2)), 0.2, 1e-12);
}

TEST(Ks, TwoSampleHandExamples) {
  EXPECT_EQ(stats::ks_two_sample({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_EQ(stats::ks_two_sample({1, 2, 3}, {4, 5, 6}), 1.0);
  EXPECT_NEAR(stats::ks_two_sample({1, 2, 3, 4}, {3.5, 5, 6, 7}), 0.75, 1e-15);
  // Ties across samples are resolved at the shared value.
  EXPECT_NEAR(stats::ks_two_sample({1, 2, 2, 3}, {2, 2, 2, 2}), 0.25, 1e-15);
}

TEST(Ks, OneSampleUniform) {
  std::vector<double> x = {0.1, 0.4, 0.7};
  EXPECT_NEAR(stats::ks_one_sample(x, [](double v) { return v; }), 0.3, 1e-15);
}

TEST(Ks, PValueIsCalibratedUnderTheNull) {
  // Two independent uniform samples: the 1% test rejects about 1% of the time.
  int rejections = 0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    Stream a(1, stream_tag::scalar, t, 0), b(1, stream_tag::scalar, t, 1);
    std::vector<double> x(200), y(200);
    for (auto& v : x) v = a.uniform();
    for (auto& v : y) v = b.uniform();
    rejections += stats::ks_two_sample_pvalue(stats::ks_two_sample(x, y), 200, 200) < 0.01;
  }
  EXPECT_LE(rejections, 12);
}

TEST(Moments, WelfordMergeMatchesSequential) {
  stats::Moments a, b, all;
  for (int k = 0; k < 100; ++k) {
    const double x = std::sin(k) * 10.0 + k;
    (k < 37 ? a : b).add(x);
    all.add(x);
  }
  a.merge(b);
  EXPECT_EQ(a.count, all.count);
  EXPECT_NEAR(a.mean, all.mean, 1e-12);
  EXPECT_NEAR(a.variance(), all.variance(), 1e-9);
  EXPECT_NEAR(all.stderr_mean(), std::sqrt(all.variance() / 100.0), 1e-15);
}

TEST(Quantiles, MedianAndQuantile) {
  EXPECT_EQ(stats::median({3, 1, 2}), 2.0);
  EXPECT_EQ(stats::median({4, 1, 2, 3}), 2.5);
  EXPECT_EQ(stats::quantile({1, 2, 3, 4, 5}, 0.0), 1.0);
  EXPECT_EQ(stats::quantile({1, 2, 3, 4, 5}, 1.0), 5.0);
  const std::vector<double> x = {1.0, 2.0, 6.0};
  EXPECT_EQ(stats::mean(x), 3.0);
}

TEST(Rng, StreamsAreKeyedAndReproducible) {
  Stream a(1, stream_tag::entry, 2, 3), b(1, stream_tag::entry, 2, 3), c(1, stream_tag::entry, 3, 2);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
  EXPECT_NE(derive_seed(1, stream_tag::replica, 0), derive_seed(1, stream_tag::replica, 1));
  EXPECT_NE(derive_seed(1, stream_tag::replica, 0), derive_seed(1, stream_tag::bootstrap, 0));
}

TEST(Rng, UniformAndNormalMoments) {
  Stream r(3, stream_tag::scalar);
  double su = 0.0, sn = 0.0, sn2 = 0.0;
  const int m = 200000;
  for (int k = 0; k < m; ++k) {
    const double u = r.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double g = r.normal();
    sn += g;
    sn2 += g * g;
  }
  EXPECT_NEAR(su / m, 0.5, 0.005);
  EXPECT_NEAR(sn / m, 0.0, 0.01);
  EXPECT_NEAR(sn2 / m, 1.0, 0.01);
}

TEST(Parallel, ResultsIndependentOfWorkerCount) {
  auto body = [](Index i) { return std::sqrt(static_cast<double>(i)) * 3.0; };
  const auto one = parallel_map<double>(1000, body, 1);
  const auto four = parallel_map<double>(1000, body, 4);
  EXPECT_EQ(one, four);
}

TEST(Parallel, FirstExceptionPropagates) {
  EXPECT_THROW(parallel_for(
                   100,
                   [](Index i) {
                     if (i == 57) throw Error(ErrorCode::io, "boom");
                   },
                   3),
               Error);
}

}  // namespace
}  // namespace rmt
