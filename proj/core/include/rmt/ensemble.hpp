#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rmt/common.hpp"
#include "rmt/rng.hpp"

namespace rmt {

/// Constants of the generalized Wigner model. c1 < N s_ij < C1 bounds the
/// variance profile, |t_i| < C1 N^{-eps} bounds the row-sum defect and
/// E|h_ij sqrt(N)|^{2+eps} < C2 bounds the entry moments.
struct ModelConstants {
  double eps = 0.5;
  double c1 = 0.5;
  double C1 = 2.0;
  double C2 = 8.0;
};

enum class LawKind { gaussian, rademacher, student_t, sym_pareto };

std::string to_string(LawKind kind);
LawKind law_kind_from_string(const std::string& name);

/// Centered scalar law standardized to `target_variance`.
///
/// student_t is a scaled Student-t with `tail_index` degrees of freedom;
/// sym_pareto is a symmetrized Pareto type II (Lomax) law with shape
/// `tail_index`, whose density is positive and smooth away from the origin
/// and continuous at it. Both have finite p-th absolute moments exactly for
/// p < tail_index.
struct EntryLaw {
  LawKind kind = LawKind::gaussian;
  double tail_index = 0.0;
  double target_variance = 1.0;

  static EntryLaw gaussian(double variance = 1.0) { return {LawKind::gaussian, 0.0, variance}; }
  static EntryLaw rademacher(double variance = 1.0) { return {LawKind::rademacher, 0.0, variance}; }
  static EntryLaw student_t(double nu, double variance = 1.0) { return {LawKind::student_t, nu, variance}; }
  static EntryLaw sym_pareto(double alpha, double variance = 1.0) { return {LawKind::sym_pareto, alpha, variance}; }

  EntryLaw with_variance(double variance) const {
    EntryLaw out = *this;
    out.target_variance = variance;
    return out;
  }

  bool heavy_tailed() const { return kind == LawKind::student_t || kind == LawKind::sym_pareto; }
  bool has_density() const { return kind != LawKind::rademacher; }

  // Scale applied to the unit-shape variable (T for student_t, Y for sym_pareto).
  double scale() const;

  double sample(Stream& rng) const;

  // Closed-form density of X; throws for rademacher.
  double density(double x) const;

  // Closed-form P[|X| >= x] for x >= 0 (used for inverse-CDF restriction).
  double abs_survival(double x) const;

  // Inverse of abs_survival: the x >= 0 with P[|X| >= x] = tail.
  double abs_survival_inverse(double tail) const;

  // E|X|^p in closed form; +infinity when the moment does not exist.
  double absolute_moment(double p) const;

  void validate() const;
};

enum class ProfileKind { flat, sinkhorn_periodic, tilted, goe };

std::string to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(const std::string& name);

struct VarianceProfile {
  Index n = 0;
  RealMatrix s;
  ModelConstants constants;
  ProfileKind kind = ProfileKind::flat;
  double amplitude = 0.0;

  // t_i = sum_j s_ij - 1
  double row_defect(Index i) const;
  // N min_ij s_ij
  double min_scaled() const;
  double max_scaled() const;

  // Throws constraint_violation naming the first offending entry or row.
  void validate() const;
};

/// flat: s_ij = 1/n. sinkhorn_periodic: symmetric row normalization of
/// 1 + amplitude cos(2 pi (i+j)/n) until every row sum is within 1e-12 of 1.
/// tilted: s_ij = (1 + tau (c_i + c_j)/2)/n with c_i = cos(2 pi i/n) and
/// tau = amplitude n^{-eps}, giving nonzero t_i = tau c_i / 2.
VarianceProfile make_profile(Index n, ProfileKind kind, double eps, double amplitude = 0.0,
                             ModelConstants constants = {});

/// GOE variance profile (2/n on the diagonal, 1/n off it). C1 is raised to 3
/// so that the diagonal satisfies N s_ii < C1.
VarianceProfile make_goe_profile(Index n, double eps = 0.5);

struct WignerSample {
  std::shared_ptr<const VarianceProfile> profile;
  RealMatrix h;
  Seed seed = 0;
  EntryLaw law;

  Index n() const { return static_cast<Index>(h.rows()); }
};

WignerSample sample_matrix(std::shared_ptr<const VarianceProfile> profile, const EntryLaw& law, Seed seed);
WignerSample sample_matrix(const VarianceProfile& profile, const EntryLaw& law, Seed seed);

WignerSample sample_goe(Index n, Seed seed);

/// Throws moment_assumption if the (2+eps)-th moment of `law` is infinite.
void check_moment_assumption(const EntryLaw& law, double eps);

double semicircle_density(double x);
double semicircle_cdf(double x);

/// Reproducible description of an ensemble used by experiments and the CLI.
struct EnsembleSpec {
  enum class Kind { wigner, goe };
  Kind kind = Kind::wigner;
  Index n = 100;
  EntryLaw law = EntryLaw::gaussian();
  ProfileKind profile = ProfileKind::flat;
  double amplitude = 0.0;
  ModelConstants constants;

  std::shared_ptr<const VarianceProfile> make_profile() const;
  WignerSample sample(Seed seed) const;
  WignerSample sample(const std::shared_ptr<const VarianceProfile>& profile, Seed seed) const;
  std::string describe() const;
};

}  // namespace rmt
