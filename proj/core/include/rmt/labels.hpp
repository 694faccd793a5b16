#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rmt/ensemble.hpp"

namespace rmt {

/// N^{-eps/10}, the A/B cutoff.
double label_threshold(Index n, double eps);

/// Symmetric A/B bitmap. A bit is true for B (|h_ij| > threshold).
class ABLabel {
 public:
  ABLabel() = default;
  ABLabel(Index n, double eps);

  static ABLabel all_a(Index n, double eps) { return ABLabel(n, eps); }
  static ABLabel all_b(Index n, double eps);

  Index n() const { return n_; }
  double eps() const { return eps_; }
  double threshold() const { return label_threshold(n_, eps_); }

  bool is_b(Index i, Index j) const { return bits_[i * n_ + j] != 0; }
  void set(Index i, Index j, bool b);

  // B entries with i <= j.
  Index count_b_upper() const;

  bool operator==(const ABLabel& other) const = default;

 private:
  Index n_ = 0;
  double eps_ = 0.5;
  std::vector<std::uint8_t> bits_;
};

ABLabel label_of(const RealMatrix& h, double eps);
ABLabel label_of(const WignerSample& sample);

/// P[|X| < threshold] by adaptive quadrature of the law's density.
double entry_p(const EntryLaw& law, double threshold);

/// The law conditioned on |X| < threshold (a) and on |X| >= threshold (b).
/// Sampling uses rejection when the conditioning event is likely and
/// inverse-CDF restriction otherwise. b-draws are kept strictly above the
/// threshold so that relabelling a conditioned matrix is exact.
struct ConditionalLaws {
  EntryLaw base;
  double threshold = 0.0;
  double p = 1.0;          // P[|X| < threshold]
  double tail_mass = 0.0;  // P[|X| >= threshold], from the closed-form survival

  double sample_a(Stream& rng) const;
  double sample_b(Stream& rng) const;

  // E[a] is zero for every provided law (all are symmetric).
  double a_mean() const { return 0.0; }
  // E[a^2] by quadrature.
  double a_second_moment() const;
};

/// Throws degenerate_conditioning unless 0 < p < 1, and
/// resampling_unsupported for laws without a density.
ConditionalLaws conditional_laws(const EntryLaw& law, double threshold);

/// Independent Bernoulli(1 - p_ij) B-bits for i <= j, mirrored.
ABLabel sample_h_distributed_label(const VarianceProfile& profile, const EntryLaw& law, Seed seed);

/// Entry (i,j) from the a-law if the label is A there and from the b-law
/// otherwise.
WignerSample sample_conditioned_matrix(std::shared_ptr<const VarianceProfile> profile, const EntryLaw& law,
                                       const ABLabel& label, Seed seed);

struct IndexClassification {
  std::vector<Index> deviant;
  std::vector<Index> typical;
  std::vector<std::vector<Index>> components;  // partition of `deviant`, each sorted
  std::vector<std::uint8_t> deviant_mask;

  bool is_deviant(Index i) const { return deviant_mask[i] != 0; }
  Index largest_component() const;
};

/// An index is deviant when some entry in its row is B, including the
/// diagonal. Components are the connected components of the B-graph
/// restricted to deviant indices.
IndexClassification classify(const ABLabel& label);

enum class Verdict { admissible, deviant_inadmissible, connected_inadmissible, both };
inline constexpr std::array<Verdict, 4> kAllVerdicts = {Verdict::admissible, Verdict::deviant_inadmissible,
                                                        Verdict::connected_inadmissible, Verdict::both};
std::string to_string(Verdict v);

struct AdmissibilityConfig {
  Index r_min = 0;                     // r = max(ceil(log log N), r_min)
  double log_base = 2.718281828459045;
};

/// ceil(log_b log_b n), raised to r_min. Throws undefined_threshold for n <= b.
Index connectivity_size(Index n, const AdmissibilityConfig& config = {});

struct Admissibility {
  Verdict verdict = Verdict::admissible;
  Index deviant_count = 0;
  double deviant_limit = 0.0;  // N^{1 - eps/20}
  Index largest_component = 0;
  Index r = 0;
};

Admissibility admissibility(const ABLabel& label, const AdmissibilityConfig& config = {});
Admissibility admissibility(const ABLabel& label, const IndexClassification& cls,
                            const AdmissibilityConfig& config = {});

struct RateEstimate {
  Index count = 0;
  double rate = 0.0;
  double lo = 0.0;  // Wilson 95% interval
  double hi = 0.0;
};

RateEstimate wilson_interval(Index count, Index trials, double z = 1.959963984540054);

struct AdmissibilityRates {
  Index trials = 0;
  std::array<RateEstimate, 4> by_verdict;  // indexed by Verdict
  std::vector<Index> deviant_counts;

  const RateEstimate& operator[](Verdict v) const { return by_verdict[static_cast<std::size_t>(v)]; }
};

/// Monte Carlo verdict frequencies over H-distributed labels.
AdmissibilityRates admissibility_frequency(const VarianceProfile& profile, const EntryLaw& law, Index trials,
                                           Seed seed, const AdmissibilityConfig& config = {});

}  // namespace rmt
