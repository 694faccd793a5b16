#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "rmt/ensemble.hpp"
#include "rmt/spectral_stats.hpp"

namespace rmt {
namespace {

using testing::Gen;

TEST(VarianceProfile, FlatIsExactlyOneOverN) {
  const auto p = make_profile(37, ProfileKind::flat, 0.5);
  for (Index i = 0; i < p.n; ++i) {
    for (Index j = 0; j < p.n; ++j) EXPECT_EQ(p.s(i, j), 1.0 / 37.0);
    EXPECT_NEAR(p.row_defect(i), 0.0, 1e-15);
  }
}

TEST(VarianceProfile, SinkhornRowsSumToOne) {
  const auto p = make_profile(64, ProfileKind::sinkhorn_periodic, 0.5, 0.4);
  for (Index i = 0; i < p.n; ++i) EXPECT_LE(std::abs(p.row_defect(i)), 1e-12);
  EXPECT_GT(p.max_scaled() - p.min_scaled(), 0.1);  // genuinely non-flat
}

TEST(VarianceProfile, TiltedHasTheStatedDefect) {
  const Index n = 50;
  const double eps = 0.5, amp = 0.3;
  const auto p = make_profile(n, ProfileKind::tilted, eps, amp);
  const double tau = amp * std::pow(static_cast<double>(n), -eps);
  const double pi = std::acos(-1.0);
  for (Index i = 0; i < n; ++i)
    EXPECT_NEAR(p.row_defect(i), tau * std::cos(2.0 * pi * static_cast<double>(i) / n) / 2.0, 1e-14);
}

TEST(VarianceProfile, ValidateNamesTheOffendingEntry) {
  auto p = make_profile(10, ProfileKind::flat, 0.5);
  p.s(3, 4) = p.s(4, 3) = 5.0 / 10.0;  // N s = 5 > C1
  try {
    p.validate();
    FAIL() << "expected constraint_violation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::constraint_violation);
    EXPECT_NE(std::string(e.what()).find("(3,4)"), std::string::npos) << e.what();
  }
}

TEST(VarianceProfile, EveryConstructedProfileSatisfiesA1AndA2) {
  for (std::uint64_t k = 0; k < 40; ++k) {
    Gen g(11, k);
    const auto spec = g.ensemble(g.size(2, 80));
    const auto p = spec.make_profile();
    SCOPED_TRACE(spec.describe());
    const double nd = static_cast<double>(p->n);
    const double defect_bound = p->constants.C1 * std::pow(nd, -p->constants.eps);
    for (Index i = 0; i < p->n; ++i) {
      for (Index j = 0; j < p->n; ++j) {
        EXPECT_EQ(p->s(i, j), p->s(j, i));
        EXPECT_GT(nd * p->s(i, j), p->constants.c1);
        EXPECT_LT(nd * p->s(i, j), p->constants.C1);
      }
      EXPECT_LT(std::abs(p->row_defect(i)), defect_bound);
    }
  }
}

TEST(VarianceProfile, RejectsBadArguments) {
  EXPECT_THROW(make_profile(0, ProfileKind::flat, 0.5), Error);
  EXPECT_THROW(make_profile(10, ProfileKind::flat, 0.0), Error);
  EXPECT_THROW(make_profile(10, ProfileKind::flat, 1.5), Error);
  EXPECT_THROW(make_profile(10, ProfileKind::sinkhorn_periodic, 0.5, 1.0), Error);
}

TEST(EntryLaw, StandardizedToTargetVariance) {
  for (const EntryLaw& law : {EntryLaw::gaussian(0.25), EntryLaw::rademacher(0.25), EntryLaw::student_t(3.0, 0.25),
                              EntryLaw::sym_pareto(5.0, 0.25)}) {
    EXPECT_NEAR(law.absolute_moment(2.0), 0.25, 1e-12) << to_string(law.kind);
  }
}

TEST(EntryLaw, MomentsExistExactlyBelowTheTailIndex) {
  const auto t = EntryLaw::student_t(2.6);
  EXPECT_TRUE(std::isfinite(t.absolute_moment(2.5)));
  EXPECT_TRUE(std::isinf(t.absolute_moment(2.6)));
  EXPECT_TRUE(std::isinf(t.absolute_moment(4.0)));
  const auto p = EntryLaw::sym_pareto(3.0);
  EXPECT_TRUE(std::isfinite(p.absolute_moment(2.9)));
  EXPECT_TRUE(std::isinf(p.absolute_moment(3.0)));
}

TEST(EntryLaw, SurvivalInverseRoundTrips) {
  for (const EntryLaw& law : {EntryLaw::gaussian(), EntryLaw::student_t(2.6), EntryLaw::sym_pareto(3.5)}) {
    for (double tail : {0.9, 0.5, 1e-3, 1e-8}) {
      const double x = law.abs_survival_inverse(tail);
      EXPECT_NEAR(law.abs_survival(x) / tail, 1.0, 1e-8) << to_string(law.kind) << " tail " << tail;
    }
  }
}

TEST(EntryLaw, DensityIntegratesToSurvival) {
  // Midpoint rule on [a, b] against the closed-form survival.
  for (const EntryLaw& law : {EntryLaw::gaussian(), EntryLaw::student_t(2.6), EntryLaw::sym_pareto(3.5)}) {
    const double a = 0.3, b = 2.0;
    const int m = 20000;
    double sum = 0.0;
    for (int k = 0; k < m; ++k) sum += law.density(a + (k + 0.5) * (b - a) / m);
    const double integral = 2.0 * sum * (b - a) / m;
    EXPECT_NEAR(integral, law.abs_survival(a) - law.abs_survival(b), 1e-7) << to_string(law.kind);
  }
}

TEST(EntryLaw, SampleVarianceMatches) {
  for (const EntryLaw& law : {EntryLaw::gaussian(2.0), EntryLaw::rademacher(2.0), EntryLaw::sym_pareto(6.0, 2.0)}) {
    Stream rng(5, stream_tag::scalar);
    double sum = 0.0;
    const int m = 200000;
    for (int k = 0; k < m; ++k) {
      const double x = law.sample(rng);
      sum += x * x;
    }
    EXPECT_NEAR(sum / m, 2.0, 0.05) << to_string(law.kind);
  }
}

TEST(EntryLaw, MomentAssumptionNeedsTailAboveTwoPlusEps) {
  EXPECT_NO_THROW(check_moment_assumption(EntryLaw::student_t(2.6), 0.5));
  try {
    check_moment_assumption(EntryLaw::student_t(2.4), 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::moment_assumption);
  }
  EXPECT_THROW(EntryLaw::student_t(1.5).validate(), Error);
}

TEST(Sampling, PureFunctionOfProfileLawAndSeed) {
  for (std::uint64_t k = 0; k < 10; ++k) {
    Gen g(12, k);
    const auto spec = g.ensemble(g.size(2, 60));
    const Seed seed = g.seed();
    const auto a = spec.sample(seed);
    const auto b = spec.sample(seed);
    EXPECT_EQ(a.h, b.h);
    EXPECT_NE(a.h, spec.sample(seed + 1).h);
    EXPECT_EQ(a.h, a.h.transpose());
  }
}

TEST(Sampling, EntryDoesNotDependOnMatrixSize) {
  // Per-entry streams: the leading block of a larger flat gaussian sample
  // scales with the standard deviation only.
  const auto small = sample_matrix(make_profile(10, ProfileKind::flat, 0.5), EntryLaw::gaussian(), 3);
  const auto large = sample_matrix(make_profile(20, ProfileKind::flat, 0.5), EntryLaw::gaussian(), 3);
  const RealMatrix block = large.h.topLeftCorner(10, 10) * std::sqrt(20.0 / 10.0);
  EXPECT_LT((block - small.h).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Sampling, GoeHasTheGoeProfile) {
  const auto p = make_goe_profile(30);
  EXPECT_DOUBLE_EQ(p.s(4, 4), 2.0 / 30.0);
  EXPECT_DOUBLE_EQ(p.s(4, 5), 1.0 / 30.0);
  EXPECT_NO_THROW(p.validate());
  const auto s = sample_goe(30, 1);
  EXPECT_EQ(s.h, sample_goe(30, 1).h);
}

TEST(Sampling, EntryVariancesFollowTheProfile) {
  // Average of h_ij^2 / s_ij over many entries of a tilted gaussian sample.
  const auto p = std::make_shared<const VarianceProfile>(make_profile(300, ProfileKind::tilted, 0.3, 0.9));
  const auto s = sample_matrix(p, EntryLaw::gaussian(), 17);
  double sum = 0.0;
  Index count = 0;
  for (Index j = 0; j < 300; ++j)
    for (Index i = 0; i <= j; ++i, ++count) sum += s.h(i, j) * s.h(i, j) / p->s(i, j);
  EXPECT_NEAR(sum / static_cast<double>(count), 1.0, 4.0 * std::sqrt(2.0 / static_cast<double>(count)));
}

TEST(Semicircle, DensityAndCdf) {
  EXPECT_NEAR(semicircle_density(0.0), 1.0 / std::acos(-1.0), 1e-15);
  EXPECT_EQ(semicircle_density(2.5), 0.0);
  EXPECT_EQ(semicircle_cdf(-3.0), 0.0);
  EXPECT_EQ(semicircle_cdf(3.0), 1.0);
  EXPECT_NEAR(semicircle_cdf(0.0), 0.5, 1e-15);
  EXPECT_NEAR(semicircle_cdf(-0.807945506599034418), 0.25, 1e-14);
}

TEST(Sampling, GlobalLawAtN2000) {
  const auto spec = eigendecompose(sample_goe(2000, 1));
  EXPECT_LT(esd_ks_semicircle(spec), 0.05);
}

TEST(Sampling, HeavyTailsProduceLargeEntries) {
  // student_t(2.6): some |h_ij| >= N^{-eps/10} at N = 1000 in at least 99% of seeds.
  const Index n = 1000;
  const double eps = 0.5;
  const auto p = std::make_shared<const VarianceProfile>(make_profile(n, ProfileKind::flat, eps));
  const double threshold = std::pow(static_cast<double>(n), -eps / 10.0);
  int with_large = 0;
  const int seeds = 100;
  for (int k = 0; k < seeds; ++k) {
    const auto s = sample_matrix(p, EntryLaw::student_t(2.6), 1000 + k);
    with_large += (s.h.cwiseAbs().array() >= threshold).any();
  }
  EXPECT_GE(with_large, 99);
}

TEST(EnsembleSpec, DescribeIsStable) {
  EnsembleSpec s;
  s.n = 8;
  s.law = EntryLaw::student_t(2.6);
  EXPECT_EQ(s.describe(), s.describe());
  EXPECT_NE(s.describe().find("student_t"), std::string::npos);
}

}  // namespace
}  // namespace rmt
