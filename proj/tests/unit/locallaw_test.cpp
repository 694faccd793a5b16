#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "generators.hpp"
#include "rmt/locallaw.hpp"
#include "rmt/stats.hpp"

namespace rmt {
namespace {

using testing::Gen;

TEST(Scales, Oracles) {
  EXPECT_NEAR(phi_n(1000) / 9486827185.70566, 1.0, 1e-12);
  EXPECT_NEAR(ladder_factor(1000), 1.0209568552235127, 1e-15);
  EXPECT_EQ(rung_count(2000, 5.0, 20.0), 363u);
}

TEST(Grid, PhiFloorIsEmptyAtDeskScale) {
  try {
    build_grid(2000, 0.5, 7, EtaFloor::phi_n);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::empty_domain);
  }
}

TEST(Grid, ExplicitLadder) {
  const auto g = build_grid(2000, 0.5, 7, EtaFloor::explicit_value, 20.0 / 2000.0);
  ASSERT_EQ(g.energies.size(), 7u);
  EXPECT_DOUBLE_EQ(g.energies.front(), -1.5);
  EXPECT_DOUBLE_EQ(g.energies.back(), 1.5);
  EXPECT_DOUBLE_EQ(g.etas.front(), 5.0);
  // The rung count covers eta > 20/N; the ladder stops at the last rung >= 20/N.
  EXPECT_EQ(g.etas.size(), rung_count(2000, 5.0, 20.0));
  for (std::size_t k = 1; k < g.etas.size(); ++k) {
    EXPECT_LT(g.etas[k], g.etas[k - 1]);
    EXPECT_NEAR(g.etas[k - 1] / g.etas[k], g.ladder_factor, 1e-12);
  }
  EXPECT_GE(g.etas.back(), g.eta_floor);
  EXPECT_LT(g.etas.back() / g.ladder_factor, g.eta_floor);
  EXPECT_EQ(g.size(), 7 * g.etas.size());
  const auto mid = build_grid(100, 0.4, 1, EtaFloor::explicit_value, 1.0);
  EXPECT_EQ(mid.energies, std::vector<double>{0.0});
}

TEST(Envelope, ShapeAndFit) {
  const EnvelopeConstants e{2.0, 0.1, 1.0};
  const double n = 1000.0;
  EXPECT_NEAR(e(1000, 0.5, 0.5), 2.0 * std::log(n) * (1.0 / std::sqrt(500.0) + std::pow(n, -0.05)), 1e-12);
  const std::vector<EnvelopeObservation> obs = {{1000, 0.5, 0.3}, {1000, 0.01, 0.9}, {1000, 2.0, 0.05}};
  const auto fit = fit_envelope(obs, 0.5, 0.1, 1.0, 0.25);
  double worst = 0.0;
  for (const auto& o : obs) worst = std::max(worst, o.error / EnvelopeConstants{1.0, 0.1, 1.0}(o.n, o.eta, 0.5));
  EXPECT_NEAR(fit.C, worst * 1.25, 1e-12);
  for (const auto& o : obs) EXPECT_LE(o.error, fit(o.n, o.eta, 0.5));
}

TEST(LocalLaw, ReportCoversEveryGridPoint) {
  const auto s = sample_goe(200, 3);
  const auto grid = build_grid(200, 0.5, 3, EtaFloor::explicit_value, 0.1);
  LocalLawOptions opts;
  opts.envelope = EnvelopeConstants{1.0, 0.05, 1.0};
  opts.entry_stride = 5;
  const auto r = verify_local_law(s, grid, opts);
  ASSERT_EQ(r.points.size(), grid.size());
  for (std::size_t k = 0; k < r.points.size(); ++k) {
    const auto& p = r.points[k];
    EXPECT_EQ(p.energy, grid.energies[k / grid.etas.size()]);
    EXPECT_EQ(p.eta, grid.etas[k % grid.etas.size()]);
    EXPECT_TRUE(std::isfinite(p.abs_mn_minus_msc));
    EXPECT_EQ(std::isnan(p.max_abs_g), (k % grid.etas.size()) % 5 != 0);
  }
  EXPECT_EQ(r.seed, 3u);
}

TEST(LocalLaw, AgreesWithDirectResolvent) {
  const auto s = sample_goe(60, 4);
  const auto grid = build_grid(60, 0.5, 2, EtaFloor::explicit_value, 1.0);
  LocalLawOptions opts;
  opts.entry_stride = 1;
  const auto r = verify_local_law(s, grid, opts);
  for (const auto& p : r.points) {
    const auto f = resolvent(s, {p.energy, p.eta});
    EXPECT_NEAR(p.abs_mn_minus_msc, std::abs(f.m_n - f.m_sc), 1e-12);
    EXPECT_NEAR(p.max_abs_g, f.g.cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(LocalLaw, LipschitzInZ) {
  // |m_N(z) - m_N(z')| <= |z - z'| / (Im z Im z').
  for (std::uint64_t k = 0; k < 50; ++k) {
    Gen g(41, k);
    const auto s = g.ensemble(g.size(5, 80)).sample(g.seed());
    const Complex z = g.upper_half_plane(), w = g.upper_half_plane();
    const Complex a = resolvent(s, z).m_n, b = resolvent(s, w).m_n;
    EXPECT_LE(std::abs(a - b), std::abs(z - w) / (z.imag() * w.imag()) * (1.0 + 1e-12));
  }
}

TEST(LocalLaw, ErrorIsLargerAtSmallEta) {
  // Median over seeds of |m_N - m_sc| at eta = 1/N exceeds the median at eta = 1.
  for (const EntryLaw& law : {EntryLaw::gaussian(), EntryLaw::student_t(2.6)}) {
    const Index n = 300;
    const auto profile = std::make_shared<const VarianceProfile>(make_profile(n, ProfileKind::flat, 0.5));
    std::vector<double> small, large;
    for (Seed seed = 1; seed <= 15; ++seed) {
      const auto s = sample_matrix(profile, law, seed);
      small.push_back(std::abs(resolvent(s, {0.1, 1.0 / n}).m_n - m_sc({0.1, 1.0 / n})));
      large.push_back(std::abs(resolvent(s, {0.1, 1.0}).m_n - m_sc({0.1, 1.0})));
    }
    EXPECT_GT(stats::median(small), stats::median(large)) << to_string(law.kind);
  }
}

TEST(LocalLaw, RefiningTheEnergyGridMovesTheSupremumBoundedly) {
  const Index n = 300;
  const auto s = sample_goe(n, 5);
  const auto coarse = build_grid(n, 0.5, 9, EtaFloor::explicit_value, 0.05);
  const auto fine = build_grid(n, 0.5, 17, EtaFloor::explicit_value, 0.05);
  auto sup = [](const LocalLawReport& r) {
    double m = 0.0;
    for (const auto& p : r.points) m = std::max(m, p.abs_mn_minus_msc);
    return m;
  };
  const double a = sup(verify_local_law(s, coarse)), b = sup(verify_local_law(s, fine));
  const double step = coarse.energies[1] - coarse.energies[0];
  const double eta = coarse.etas.back();
  // Both m_N and m_sc are Lipschitz with constant 1/eta^2 in E.
  EXPECT_GE(b, a);
  EXPECT_LE(b - a, 2.0 * step / (eta * eta));
}

TEST(Entrywise, ReportFields) {
  const auto s = EnsembleSpec{EnsembleSpec::Kind::wigner, 80, EntryLaw::student_t(2.6), ProfileKind::flat, 0.0, {}}
                     .sample(6);
  ABLabel label(80, 0.5);
  label.set(2, 3, true);
  const Complex z(0.0, 0.2);
  const auto r = verify_entrywise(s.h, label, z);
  const auto f = resolvent(s, z);
  EXPECT_NEAR(r.max_abs_g, f.g.cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(r.deviant_count, 2u);
  EXPECT_NEAR(r.max_deviant_block,
              std::max({std::abs(f.g(2, 2)), std::abs(f.g(2, 3)), std::abs(f.g(3, 3))}), 1e-14);
  EXPECT_TRUE(r.deviant_below_limit);
  EXPECT_LT(r.max_abs_g, 1.0 / z.imag());
}

TEST(Delocalization, Statistics) {
  const auto spec = eigendecompose(sample_goe(200, 7), true);
  const auto r = verify_delocalization(spec, 0.5, 0.5, 100.0);
  const double scale = std::sqrt(200.0) / std::sqrt(std::log(200.0));
  double bulk = 0.0;
  Index count = 0;
  for (Index k = 0; k < 200; ++k) {
    if (std::abs(spec.eigenvalues[k]) > 1.5) continue;
    ++count;
    bulk = std::max(bulk, scale * spec.vectors.col(k).cwiseAbs().maxCoeff());
  }
  EXPECT_EQ(r.bulk_count, count);
  EXPECT_NEAR(r.bulk_max, bulk, 1e-12);
  EXPECT_NEAR(r.top_edge, scale * spec.vectors.col(199).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_TRUE(r.pass);
  EXPECT_FALSE(verify_delocalization(spec, 0.5, 0.5, bulk).pass);
  // A unit vector has sup norm at least N^{-1/2}.
  EXPECT_GE(r.bulk_max * std::sqrt(std::log(200.0)), 1.0 - 1e-12);
}

TEST(Ladder, ContinuityHoldsAndRungsFollowTheGrid) {
  const auto s = EnsembleSpec{EnsembleSpec::Kind::wigner, 200, EntryLaw::student_t(2.6), ProfileKind::flat, 0.0, {}}
                     .sample(8);
  const auto grid = build_grid(200, 0.5, 1, EtaFloor::explicit_value, 20.0 / 200.0);
  LadderOptions opts;
  opts.energy = 0.3;
  const auto r = multiscale_ladder_diagnostic(s, label_of(s), grid, opts);
  ASSERT_EQ(r.rungs.size(), grid.etas.size());
  EXPECT_TRUE(r.continuity_holds);
  for (std::size_t k = 0; k < r.rungs.size(); ++k) {
    EXPECT_EQ(r.rungs[k].eta, grid.etas[k]);
    EXPECT_LE(r.rungs[k].continuity_violation, 1e-9);
  }
  // The diagonal agrees with a direct resolvent at the last rung.
  const auto f = resolvent(s, {0.3, grid.etas.back()});
  const auto cls = classify(label_of(s));
  double typical = 0.0;
  for (Index i : cls.typical) typical = std::max(typical, std::abs(f.g(i, i) - f.m_sc));
  EXPECT_NEAR(r.rungs.back().max_typical_v, typical, 1e-10);
}

}  // namespace
}  // namespace rmt
