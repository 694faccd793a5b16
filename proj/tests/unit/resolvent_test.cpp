#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "generators.hpp"
#include "rmt/resolvent.hpp"

namespace rmt {
namespace {

using testing::Gen;

void expect_complex_near(Complex a, Complex b, double tol) {
  EXPECT_NEAR(a.real(), b.real(), tol);
  EXPECT_NEAR(a.imag(), b.imag(), tol);
}

TEST(MSc, Oracles) {
  expect_complex_near(m_sc({0.0, 1.0}), {0.0, 0.6180339887498948}, 1e-15);
  expect_complex_near(m_sc({0.0, 1e-3}), {0.0, 0.9995001249999922}, 1e-15);
  expect_complex_near(m_sc({0.5, 0.5}), {-0.18762124345051952, 0.7519436657161217}, 1e-15);
  expect_complex_near(m_sc({-1.0, 0.1}), {0.4711963531112389, 0.8179456492627245}, 1e-15);
  EXPECT_THROW(m_sc({1.0, 0.0}), Error);
}

TEST(MSc, SolvesTheQuadraticInTheUpperHalfPlane) {
  for (std::uint64_t k = 0; k < 500; ++k) {
    Gen g(31, k);
    const Complex z = g.upper_half_plane();
    const Complex m = m_sc(z);
    EXPECT_GT(m.imag(), 0.0);
    EXPECT_LT(quadratic_residual(z, m), 1e-12 * std::max(1.0, std::norm(z)));
  }
}

TEST(MSc, NoBranchFlipAlongPaths) {
  // 1000 points along a path crossing the bulk and the edges at small eta;
  // consecutive values must move by at most the Lipschitz bound of m_sc.
  const int points = 1000;
  const double eta = 1e-2;
  Complex prev = m_sc({-3.0, eta});
  for (int k = 1; k <= points; ++k) {
    const Complex z(-3.0 + 6.0 * k / points, eta);
    const Complex m = m_sc(z);
    // |m'| = |m|^2 / |1 - m^2| <= 1 / Im z on the upper half plane.
    EXPECT_LE(std::abs(m - prev), (6.0 / points) / eta + 1e-12) << "at " << z;
    prev = m;
  }
}

TEST(Resolvent, WardAndDeterministicBoundOnFramesAndMinors) {
  for (std::uint64_t k = 0; k < 40; ++k) {
    Gen g(32, k);
    const auto spec = g.ensemble(g.size(2, 60));
    const auto s = spec.sample(g.seed());
    const Complex z = g.upper_half_plane();
    const auto frame = resolvent(s, z);
    EXPECT_LT(ward_residual(frame), 1e-8);
    EXPECT_LT(deterministic_bound_ratio(frame), 1.0);
    const std::array<Index, 1> removed{g.index(spec.n)};
    const auto mi = minor(s.h, removed, z);
    EXPECT_EQ(mi.size(), spec.n - 1);
    EXPECT_LT(ward_residual(mi), 1e-8);
    EXPECT_LT(deterministic_bound_ratio(mi), 1.0);
  }
}

TEST(Resolvent, MinorKeepsOriginalIndices) {
  const auto s = sample_goe(6, 1);
  const std::array<Index, 2> removed{1, 4};
  const auto mi = minor(s.h, removed, {0.0, 1.0});
  EXPECT_EQ(mi.indices, (std::vector<Index>{0, 2, 3, 5}));
  const std::array<Index, 6> all{0, 1, 2, 3, 4, 5};
  EXPECT_THROW(minor(s.h, all, {0.0, 1.0}), Error);
}

TEST(Resolvent, MNIsTheNormalizedTrace) {
  const auto s = sample_goe(40, 2);
  const auto f = resolvent(s, {0.3, 0.2});
  EXPECT_LT(std::abs(f.m_n - f.g.trace() / 40.0), 1e-14);
  EXPECT_EQ(f.m_sc, m_sc({0.3, 0.2}));
  EXPECT_EQ(f.source_seed, 2u);
}

TEST(Resolvent, ExactIdentities) {
  for (std::uint64_t k = 0; k < 30; ++k) {
    Gen g(33, k);
    const auto spec = g.ensemble(g.size(3, 50));
    const auto s = spec.sample(g.seed());
    const Complex z = g.bulk_z();
    const Index i = g.index(spec.n);
    const auto full = resolvent(s, z);
    const std::array<Index, 1> removed{i};
    const auto mi = minor(s.h, removed, z);
    SCOPED_TRACE(spec.describe());
    EXPECT_LT(minor_identity_residual(full, mi, i), 1e-8);
    EXPECT_LT(schur_residual(s.h, full, mi, i), 1e-8);
    EXPECT_LT(resolvent_identity_residual(full, resolvent(s, g.upper_half_plane())), 1e-8);
    const auto t = schur_terms(s.h, *s.profile, i, full, mi);
    EXPECT_LT(t.decomposition_residual, 1e-9);
    EXPECT_LT(t.self_consistent_residual, 1e-9);
  }
}

TEST(SchurTerms, DefinitionsHoldTermByTerm) {
  const auto s = EnsembleSpec{EnsembleSpec::Kind::wigner, 12, EntryLaw::student_t(3.0), ProfileKind::tilted, 0.5, {}}
                     .sample(7);
  const Complex z(0.2, 0.3);
  const Index i = 5;
  const auto t = schur_terms(s, i, z);
  const auto& p = *s.profile;
  expect_complex_near(t.v, resolvent(s, z).g(5, 5) - m_sc(z), 1e-13);
  expect_complex_near(t.gamma, t.f + t.e + t.d - t.h_ii + m_sc(z) * t.t_i, 1e-13);
  expect_complex_near(t.gamma_exact, t.f + t.e + t.d - t.h_ii + m_sc(z) * t.t_i_minor, 1e-13);
  EXPECT_NEAR(t.t_i - t.t_i_minor, p.s(i, i), 1e-15);
  EXPECT_EQ(t.h_ii, s.h(5, 5));
  // The reported bookkeeping gap is -m^2 s_ii G_ii.
  const Complex m = m_sc(z);
  expect_complex_near(t.bookkeeping_gap, -m * m * p.s(i, i) * resolvent(s, z).g(5, 5), 1e-12);
}

TEST(SchurTerms, GammaFromDiagonalMatchesMinors) {
  for (std::uint64_t k = 0; k < 10; ++k) {
    Gen g(34, k);
    const auto spec = g.ensemble(g.size(3, 40));
    const auto s = spec.sample(g.seed());
    const Complex z = g.bulk_z();
    const auto full = resolvent(s, z);
    const ComplexVector gamma = gamma_from_diagonal(*s.profile, full.g.diagonal(), z);
    for (Index i = 0; i < spec.n; ++i) {
      const auto t = schur_terms(s, i, z);
      EXPECT_LT(std::abs(gamma[i] - t.gamma), 1e-8 * std::max(1.0, std::abs(t.gamma)));
    }
  }
}

TEST(Stability, FlatProfileOracle) {
  // ||(I - m^2 S)^{-1}||_inf for S = J/N at z = 0.5 + 0.1i, from a dense inverse.
  EXPECT_NEAR(stability_norm(make_profile(100, ProfileKind::flat, 0.5), {0.5, 0.1}), 1.480061198212309, 1e-10);
  EXPECT_NEAR(stability_norm(make_profile(200, ProfileKind::flat, 0.5), {0.5, 0.1}), 1.4848715244087964, 1e-10);
}

TEST(Stability, BulkWindowAndSubset) {
  const auto p = make_profile(20, ProfileKind::sinkhorn_periodic, 0.5, 0.3);
  EXPECT_THROW(stability_norm(p, {1.8, 0.1}, 0.5), Error);
  const std::array<Index, 3> subset{1, 4, 7};
  EXPECT_GE(stability_norm(p, {0.0, 0.1}, 0.5, subset), 1.0);
}

}  // namespace
}  // namespace rmt
