#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rmt/ensemble.hpp"
#include "rmt/stats.hpp"

namespace rmt {

struct SpectrumSummary {
  RealVector eigenvalues;  // ascending
  RealMatrix vectors;      // empty unless requested
  Seed seed = 0;
  std::string ensemble;

  Index n() const { return static_cast<Index>(eigenvalues.size()); }
  std::span<const double> values() const { return {eigenvalues.data(), static_cast<std::size_t>(eigenvalues.size())}; }
};

SpectrumSummary eigendecompose(const RealMatrix& h, bool with_vectors = false);
SpectrumSummary eigendecompose(const WignerSample& sample, bool with_vectors = false);

// max |H V - V Lambda| and max |V^T V - I|.
double reconstruction_error(const RealMatrix& h, const SpectrumSummary& spec);
double orthogonality_error(const SpectrumSummary& spec);

// KS distance between the empirical spectral distribution and the semicircle.
double esd_ks_semicircle(const SpectrumSummary& spec);

// Bulk index range [ceil(kappa N), floor((1 - kappa) N)] in 0-based form.
struct BulkRange {
  Index first = 0;
  Index last = 0;  // inclusive
  bool empty() const { return last < first; }
};
BulkRange bulk_range(Index n, double kappa);

struct GapSample {
  Index i = 0;
  std::vector<Index> offsets;
  std::vector<double> values;  // N (lambda_{i + j_r} - lambda_i)
};

std::vector<GapSample> gap_statistics(const SpectrumSummary& spec, double kappa, std::span<const Index> offsets);

// N rho_sc(midpoint) (lambda_{i+1} - lambda_i) over bulk i; mean about 1.
std::vector<double> rescaled_nearest_gaps(const SpectrumSummary& spec, double kappa);

/// Smooth compactly supported bump exp(-1/(1 - x^2)) on (-1, 1), dilated to
/// support radius `radius` and normalized to unit integral.
class Bump {
 public:
  explicit Bump(double radius = 1.0);
  double operator()(double x) const;
  double radius() const { return radius_; }

 private:
  double radius_;
  double norm_;
};

/// A test function on R^k together with the sup-norm radius of its support.
struct TestFunction {
  int k = 1;
  double support_radius = 1.0;
  std::function<double(std::span<const double>)> f;

  double operator()(std::span<const double> a) const { return f(a); }

  static TestFunction zero(int k);
  // prod_r bump(a_r)
  static TestFunction product_bump(int k, double radius);
};

struct CorrelationOptions {
  double rho = 0.0;          // density used for rescaling; 0 means rho_sc(E)
  bool restrict_window = true;
  double window_slack = 1e-9;
};

/// One replica's contribution:
///   (N rho)^k / (N)_k * sum over ordered distinct k-tuples of F(N rho (lambda - E)).
/// With restrict_window only eigenvalues inside the support window are scanned.
double correlation_statistic(std::span<const double> eigenvalues, const TestFunction& f, double energy,
                             const CorrelationOptions& options = {});

struct CorrelationObservable {
  int k = 1;
  double energy = 0.0;
  double estimate = 0.0;
  double stderr_estimate = 0.0;
  Index replicas = 0;
};

/// Sum / sum-of-squares accumulator over replica statistics.
struct CorrelationAccumulator {
  int k = 1;
  double energy = 0.0;
  stats::Moments moments;

  void add(double statistic) { moments.add(statistic); }
  void merge(const CorrelationAccumulator& other) { moments.merge(other.moments); }
  CorrelationObservable observable() const;
};

CorrelationObservable correlation_observable(const std::vector<SpectrumSummary>& spectra, const TestFunction& f,
                                             double energy, double kappa, const CorrelationOptions& options = {});

struct GapComparison {
  double ks = 0.0;
  double ci_lo = 0.0;  // bootstrap 95% interval over replicas
  double ci_hi = 0.0;
  double critical_1pct = 0.0;
  double tolerance = 0.05;
  double mean_a = 0.0;  // pooled mean gap of each side
  double mean_b = 0.0;
  Index n_a = 0;
  Index n_b = 0;
  bool pass = false;
};

/// Two-sample KS distance between pooled per-replica gap samples, with a
/// replica-level bootstrap interval. Throws insufficient_replicas when either
/// side has fewer than 2 replicas.
GapComparison compare_gaps(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b,
                           double tolerance, Index bootstrap_rounds, Seed seed);

struct CorrelationComparison {
  CorrelationObservable a;
  CorrelationObservable b;
  double diff = 0.0;
  double pooled_stderr = 0.0;
  double sigmas = 3.0;
  bool pass = false;
};

CorrelationComparison compare_correlation(const CorrelationObservable& a, const CorrelationObservable& b,
                                          double sigmas = 3.0);

enum class ComparisonStatistic { gap_ks, correlation_diff };

struct ComparisonConfig {
  ComparisonStatistic statistic = ComparisonStatistic::gap_ks;
  Index replicas = 200;
  Seed seed_a = 1;
  Seed seed_b = 2;
  double kappa = 0.25;
  double tolerance = 0.05;        // gap_ks
  Index bootstrap_rounds = 200;   // gap_ks
  int k = 1;                      // correlation_diff
  double energy = 0.0;            // correlation_diff
  double bump_radius = 2.0;       // correlation_diff
  double sigmas = 3.0;            // correlation_diff
};

struct EnsembleComparison {
  ComparisonStatistic statistic;
  double magnitude = 0.0;  // KS distance or |diff|
  bool pass = false;
  GapComparison gaps;
  CorrelationComparison correlation;
};

/// Samples both ensembles (replica r uses derive_seed(seed, replica, r)) and
/// compares them. Ensembles must have the same N.
EnsembleComparison compare_ensembles(const EnsembleSpec& a, const EnsembleSpec& b, const ComparisonConfig& config);

}  // namespace rmt
