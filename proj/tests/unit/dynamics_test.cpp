#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "generators.hpp"
#include "rmt/dynamics.hpp"
#include "rmt/resolvent.hpp"
#include "rmt/stats.hpp"

namespace rmt {
namespace {

using testing::Gen;

TEST(ClassicalLocations, Oracles) {
  const auto g = classical_locations(4);
  EXPECT_NEAR(g[0], -0.8079455065990344, 1e-13);
  EXPECT_EQ(g[1], 0.0);
  EXPECT_NEAR(g[2], 0.8079455065990344, 1e-13);
  EXPECT_EQ(g[3], 2.0);
  EXPECT_NEAR(classical_locations(10)[2], -0.6393830195810077, 1e-13);
}

TEST(ClassicalLocations, MonotoneAndSolveTheQuantileEquation) {
  for (Index n : {3u, 17u, 200u, 1001u}) {
    const auto g = classical_locations(n);
    for (Index i = 1; i <= n; ++i) {
      EXPECT_LT(std::abs(semicircle_cdf(g[i - 1]) - static_cast<double>(i) / n), 1e-10);
      if (i > 1) EXPECT_LT(g[i - 2], g[i - 1]);
    }
  }
}

TEST(OrnsteinUhlenbeck, DeterministicSymmetricAndTimeStamped) {
  const auto s = EnsembleSpec{EnsembleSpec::Kind::wigner, 30, EntryLaw::student_t(3.0), ProfileKind::tilted, 0.3, {}}
                     .sample(1);
  const FlowState a = ou_evolve({0.0, s}, 0.2, 9);
  EXPECT_EQ(a.t, 0.2);
  EXPECT_EQ(a.sample.h, ou_evolve({0.0, s}, 0.2, 9).sample.h);
  EXPECT_EQ(a.sample.h, a.sample.h.transpose());
  EXPECT_NE(a.sample.h, ou_evolve({0.0, s}, 0.2, 10).sample.h);
  EXPECT_THROW(ou_evolve({0.0, s}, 0.0, 9), Error);
}

TEST(OrnsteinUhlenbeck, SecondMomentIsConserved) {
  // Average of h_ij^2 / s_ij over the upper triangle stays within 4 standard
  // errors of 1 (gaussian start, so the fourth moment is 3).
  const auto profile =
      std::make_shared<const VarianceProfile>(make_profile(200, ProfileKind::sinkhorn_periodic, 0.5, 0.3));
  const auto s = sample_matrix(profile, EntryLaw::gaussian(), 3);
  for (double t : {0.01, 0.5, 5.0}) {
    const auto h = ou_evolve({0.0, s}, t, 4).sample.h;
    stats::Moments m;
    for (Index j = 0; j < 200; ++j)
      for (Index i = 0; i <= j; ++i) m.add(h(i, j) * h(i, j) / profile->s(i, j));
    EXPECT_NEAR(m.mean, 1.0, 4.0 * m.stderr_mean()) << "t = " << t;
  }
}

TEST(OrnsteinUhlenbeck, LongTimesForgetTheStart) {
  const auto s = sample_goe(20, 1);
  const auto a = ou_evolve({0.0, s}, 1e4, 5).sample.h;
  const auto zero = WignerSample{s.profile, RealMatrix::Zero(20, 20), 0, s.law};
  const auto b = ou_evolve({0.0, zero}, 1e4, 5).sample.h;
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Split, ScalarsAndNoiseVariances) {
  for (std::uint64_t k = 0; k < 20; ++k) {
    Gen g(51, k);
    const auto spec = g.ensemble(g.size(2, 40));
    const auto s = spec.sample(g.seed());
    const double t = g.log_uniform(1e-3, 2.0);
    const auto d = gaussian_divisible_split(s, t, g.seed());
    const double nd = static_cast<double>(spec.n);
    EXPECT_NEAR(d.r, nd * s.profile->s.minCoeff(), 1e-14);
    EXPECT_NEAR(d.s, d.r * (1.0 - std::exp(-t / d.r)) / 2.0, 1e-15);
    EXPECT_GE(d.min_noise_variance, -1e-14);
    // Moment matching: e^{-t/(N s)} s + noise + s_goe = s for every entry.
    for (Index i = 0; i < spec.n; ++i)
      for (Index j = i; j < spec.n; ++j) {
        const double sij = s.profile->s(i, j);
        const double noise = split_noise_variance(spec.n, sij, d.r, t, i == j);
        const double goe = d.s * (i == j ? 2.0 : 1.0) / nd;
        EXPECT_NEAR(std::exp(-t / (nd * sij)) * sij + noise + goe, sij, 1e-14);
      }
  }
}

TEST(Split, ComposeMatchesInLaw) {
  // m_N(i) under OU(t) and under h1 + sqrt(s) GOE at small N: two-sample KS at 1%.
  const Index n = 40, replicas = 300;
  const double t = 0.3;
  const auto spec = EnsembleSpec{EnsembleSpec::Kind::wigner, n, EntryLaw::student_t(3.0), ProfileKind::flat, 0.0, {}};
  const auto profile = spec.make_profile();
  std::vector<double> a, b;
  for (Index r = 0; r < replicas; ++r) {
    const auto s = spec.sample(profile, derive_seed(61, stream_tag::replica, r));
    a.push_back(resolvent(ou_evolve({0.0, s}, t, derive_seed(62, stream_tag::replica, r)).sample.h, {0.0, 1.0})
                    .m_n.imag());
    const auto d = gaussian_divisible_split(s, t, derive_seed(63, stream_tag::replica, r));
    b.push_back(resolvent(d.compose(sample_goe(n, derive_seed(64, stream_tag::replica, r)).h), {0.0, 1.0}).m_n.imag());
  }
  EXPECT_GT(stats::ks_two_sample_pvalue(stats::ks_two_sample(a, b), replicas, replicas), 0.01);
}

TEST(FreeConvolution, PointMassGivesASemicircle) {
  // A single atom at 0 convolved with variance s is a semicircle of radius 2 sqrt(s).
  const double s = 0.7;
  const FreeConvolution fc({0.0}, s);
  for (std::uint64_t k = 0; k < 50; ++k) {
    Gen g(52, k);
    const Complex z = {g.uniform(-2.5, 2.5), g.log_uniform(1e-3, 3.0)};
    const Complex expected = m_sc(z / std::sqrt(s)) / std::sqrt(s);
    EXPECT_LT(std::abs(fc.stieltjes(z) - expected), 1e-9) << z;
  }
  EXPECT_NEAR(fc.lower(), -2.0 * std::sqrt(s), 1e-15);
}

TEST(FreeConvolution, FixedPointResidual) {
  const auto base = classical_locations(200);
  const FreeConvolution fc(base, 0.05);
  for (std::uint64_t k = 0; k < 100; ++k) {
    Gen g(53, k);
    const Complex z = {g.uniform(-2.5, 2.5), g.log_uniform(1e-3, 3.0)};
    EXPECT_LT(fc.residual(z, fc.stieltjes(z)), 1e-12) << z;
  }
}

TEST(FreeConvolution, QuantilesAreOrderedAndInsideTheSupport) {
  const auto base = classical_locations(100);
  const auto q = free_convolution_quantiles(base, 0.1, 100, 2000);
  ASSERT_EQ(q.size(), 100u);
  const FreeConvolution fc(base, 0.1);
  for (std::size_t i = 1; i < q.size(); ++i) EXPECT_LE(q[i - 1], q[i]);
  EXPECT_GE(q.front(), fc.lower());
  EXPECT_LE(q.back(), fc.upper());
  // Semicircle base plus variance 0.1 is a semicircle of variance 1.1.
  const double scale = std::sqrt(1.1);
  for (std::size_t i = 10; i < 90; i += 10)
    EXPECT_NEAR(q[i - 1], scale * semicircle_quantile(static_cast<double>(i) / 100.0), 0.03);
}

}  // namespace
}  // namespace rmt
