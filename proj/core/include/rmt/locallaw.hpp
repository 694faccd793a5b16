#pragma once

#include <optional>
#include <vector>

#include "rmt/labels.hpp"
#include "rmt/linalg.hpp"
#include "rmt/resolvent.hpp"
#include "rmt/spectral_stats.hpp"

namespace rmt {

/// (log N)^{8 log log N} / N, natural logarithms.
double phi_n(Index n);

/// 1 + (log N)^{-2}
double ladder_factor(Index n);

enum class EtaFloor { phi_n, explicit_value };

struct SpectralDomainGrid {
  Index n = 0;
  double kappa = 0.5;
  std::vector<double> energies;
  std::vector<double> etas;  // 5, 5/f, 5/f^2, ... down to the floor; strictly decreasing
  double ladder_factor = 1.0;
  double eta_floor = 0.0;

  Index size() const { return energies.size() * etas.size(); }
};

/// Energies evenly spaced on [kappa - 2, 2 - kappa] (the midpoint when
/// energy_count is 1) and the eta ladder from 5 divided by ladder_factor(n)
/// while eta >= floor. In phi_n mode the floor is phi_n(n) and an empty
/// ladder throws empty_domain; in explicit mode the floor is `eta_min`.
SpectralDomainGrid build_grid(Index n, double kappa, Index energy_count, EtaFloor mode, double eta_min = 0.0);

/// C (log N)^xi ((N eta)^{-1/2} + N^{-c eps})
struct EnvelopeConstants {
  double C = 1.0;
  double c = 0.05;
  double xi = 1.0;

  double operator()(Index n, double eta, double eps) const;
};

struct EnvelopeObservation {
  Index n = 0;
  double eta = 0.0;
  double error = 0.0;
};

/// With c and xi fixed, the smallest C covering every observation, scaled by
/// (1 + margin).
EnvelopeConstants fit_envelope(const std::vector<EnvelopeObservation>& obs, double eps, double c, double xi,
                               double margin = 0.0);

struct LocalLawPoint {
  double energy = 0.0;
  double eta = 0.0;
  double abs_mn_minus_msc = 0.0;
  double max_typical_entry_err = std::numeric_limits<double>::quiet_NaN();
  double max_abs_g = std::numeric_limits<double>::quiet_NaN();
  Index deviant_count = 0;
  bool covered = true;
};

struct LocalLawReport {
  Index n = 0;
  Seed seed = 0;
  std::vector<LocalLawPoint> points;  // energy-major, eta-minor
  std::optional<EnvelopeConstants> envelope;
  double coverage = 1.0;  // fraction of points with error within the envelope
  bool pass = true;
};

struct LocalLawOptions {
  std::optional<EnvelopeConstants> envelope;
  double eps = 0.5;
  double coverage_required = 0.99;
  // Entry columns are computed at every entry_stride-th eta (0 disables them).
  Index entry_stride = 0;
  const ABLabel* label = nullptr;
};

LocalLawReport verify_local_law(const WignerSample& sample, const SpectralDomainGrid& grid,
                                const LocalLawOptions& options = {});
LocalLawReport verify_local_law(const RealMatrix& h, const SpectralDomainGrid& grid,
                                const LocalLawOptions& options = {});

struct EntrywiseReport {
  Complex z;
  double max_abs_g = 0.0;               // over all (i, j)
  double max_typical_err = 0.0;         // max over i typical, all j of |G_ij - 1_{i=j} m_sc|
  double max_deviant_err = 0.0;         // same over deviant i (0 if none)
  double max_deviant_block = 0.0;       // max over D x D of |G_ij|
  Index deviant_count = 0;
  double deviant_limit = 0.0;           // N^{1 - eps/20}
  bool deviant_below_limit = true;
};

EntrywiseReport verify_entrywise(const RealMatrix& h, const ABLabel& label, Complex z);
EntrywiseReport verify_entrywise(const ResolventFrame& frame, const ABLabel& label);
std::vector<EntrywiseReport> verify_entrywise(const WignerSample& sample, const ABLabel& label,
                                              const std::vector<Complex>& points);

struct DelocalizationReport {
  Index n = 0;
  double xi = 0.5;
  Index bulk_count = 0;
  double bulk_max = 0.0;  // max over bulk eigenvectors of sqrt(N) ||v||_inf / (ln N)^xi
  double top_edge = 0.0;  // same statistic for the eigenvector of the largest eigenvalue
  std::optional<double> constant;
  bool pass = true;
};

DelocalizationReport verify_delocalization(const SpectrumSummary& spec, double kappa, double xi,
                                           std::optional<double> constant = std::nullopt);
DelocalizationReport verify_delocalization(const WignerSample& sample, double kappa, double xi,
                                           std::optional<double> constant = std::nullopt);

struct LadderRung {
  double eta = 0.0;
  double max_typical_v = 0.0;  // max over typical i of |G_ii - m_sc|
  double max_gamma = 0.0;      // max over all i of |Gamma_i|
  double envelope = 0.0;
  bool within_envelope = true;
  // Continuity against the previous (larger) rung, on the diagonal.
  double continuity_violation = 0.0;  // max of |G'_jj - G_jj| - (eta'/2eta)(|Im G'_jj| + |Im G_jj|)
  double min_ratio = 1.0;             // min_j min/max(|G'_jj|, |G_jj|)
  bool continuity_ok = true;
};

struct LadderReport {
  double energy = 0.0;
  std::vector<LadderRung> rungs;
  bool envelope_holds = true;
  bool continuity_holds = true;
};

struct LadderOptions {
  double energy = 0.0;
  EnvelopeConstants envelope;  // applied as C (log N)^{3 xi} ((N eta)^{-1/2} + N^{-eps/20})
  double eps = 0.5;
};

/// Walks the grid's eta ladder at one energy using the spectral
/// decomposition, so each rung costs O(N^2).
LadderReport multiscale_ladder_diagnostic(const WignerSample& sample, const ABLabel& label,
                                          const SpectralDomainGrid& grid, const LadderOptions& options);
LadderReport multiscale_ladder_diagnostic(const linalg::EigenSystem& es, const VarianceProfile& profile,
                                          const ABLabel& label, const SpectralDomainGrid& grid,
                                          const LadderOptions& options);

// ceil(log(eta0 N / c) / log(ladder_factor(N))): rungs with eta > c / N.
Index rung_count(Index n, double eta0, double c);

}  // namespace rmt
