#include "rmt/spectral_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rmt/linalg.hpp"
#include "rmt/parallel.hpp"

namespace rmt {

SpectrumSummary eigendecompose(const RealMatrix& h, bool with_vectors) {
  linalg::EigenSystem es = linalg::symmetric_eigen(h, with_vectors);
  SpectrumSummary out;
  out.eigenvalues = std::move(es.values);
  out.vectors = std::move(es.vectors);
  return out;
}

SpectrumSummary eigendecompose(const WignerSample& sample, bool with_vectors) {
  SpectrumSummary out = eigendecompose(sample.h, with_vectors);
  out.seed = sample.seed;
  return out;
}

double reconstruction_error(const RealMatrix& h, const SpectrumSummary& spec) {
  require(spec.vectors.size() > 0, ErrorCode::invalid_argument, "eigenvectors required");
  return (h * spec.vectors - spec.vectors * spec.eigenvalues.asDiagonal()).cwiseAbs().maxCoeff();
}

double orthogonality_error(const SpectrumSummary& spec) {
  require(spec.vectors.size() > 0, ErrorCode::invalid_argument, "eigenvectors required");
  const RealMatrix gram = spec.vectors.transpose() * spec.vectors;
  return (gram - RealMatrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

double esd_ks_semicircle(const SpectrumSummary& spec) { return stats::ks_one_sample(spec.values(), semicircle_cdf); }

BulkRange bulk_range(Index n, double kappa) {
  require(kappa >= 0.0 && kappa < 0.5, ErrorCode::invalid_argument, "kappa must lie in [0, 1/2)");
  const double nd = static_cast<double>(n);
  const auto lo = std::max(static_cast<long>(std::ceil(kappa * nd)), 1L) - 1;
  const auto hi = static_cast<long>(std::floor((1.0 - kappa) * nd)) - 1;
  BulkRange r;
  r.first = static_cast<Index>(lo);
  r.last = hi < 0 ? 0 : static_cast<Index>(hi);
  if (hi < lo) {
    r.first = 1;
    r.last = 0;
  }
  return r;
}

std::vector<GapSample> gap_statistics(const SpectrumSummary& spec, double kappa, std::span<const Index> offsets) {
  require(!offsets.empty(), ErrorCode::invalid_argument, "at least one offset required");
  const Index n = spec.n();
  const BulkRange bulk = bulk_range(n, kappa);
  require(!bulk.empty(), ErrorCode::invalid_argument, "bulk window is empty");
  const Index max_off = *std::max_element(offsets.begin(), offsets.end());
  const double nd = static_cast<double>(n);
  std::vector<GapSample> out;
  for (Index i = bulk.first; i <= bulk.last && i + max_off < n; ++i) {
    GapSample g;
    g.i = i;
    g.offsets.assign(offsets.begin(), offsets.end());
    for (Index j : offsets)
      g.values.push_back(nd * (spec.eigenvalues[static_cast<Eigen::Index>(i + j)] -
                               spec.eigenvalues[static_cast<Eigen::Index>(i)]));
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<double> rescaled_nearest_gaps(const SpectrumSummary& spec, double kappa) {
  const Index n = spec.n();
  const BulkRange bulk = bulk_range(n, kappa);
  const double nd = static_cast<double>(n);
  std::vector<double> out;
  if (bulk.empty()) return out;
  for (Index i = bulk.first; i <= bulk.last && i + 1 < n; ++i) {
    const double a = spec.eigenvalues[static_cast<Eigen::Index>(i)];
    const double b = spec.eigenvalues[static_cast<Eigen::Index>(i + 1)];
    out.push_back(nd * semicircle_density(0.5 * (a + b)) * (b - a));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Test functions

namespace {

double raw_bump(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - x * x));
}

}  // namespace

Bump::Bump(double radius) : radius_(radius) {
  require(radius > 0.0, ErrorCode::invalid_argument, "bump radius must be positive");
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(raw_bump, -1.0, 1.0, 15, 1e-14);
  norm_ = 1.0 / (radius * integral);
}

double Bump::operator()(double x) const { return norm_ * raw_bump(x / radius_); }

TestFunction TestFunction::zero(int k) {
  return {k, 1.0, [](std::span<const double>) { return 0.0; }};
}

TestFunction TestFunction::product_bump(int k, double radius) {
  Bump b(radius);
  return {k, radius, [b](std::span<const double> a) {
            double v = 1.0;
            for (double x : a) v *= b(x);
            return v;
          }};
}

// ---------------------------------------------------------------------------
// Correlation observable

namespace {

double falling_factorial(double n, int k) {
  double out = 1.0;
  for (int r = 0; r < k; ++r) out *= n - r;
  return out;
}

void scan_tuples(const std::vector<double>& scaled, const TestFunction& f, std::vector<std::size_t>& chosen,
                 std::vector<double>& point, double& acc) {
  const auto depth = chosen.size();
  if (static_cast<int>(depth) == f.k) {
    acc += f(point);
    return;
  }
  for (std::size_t idx = 0; idx < scaled.size(); ++idx) {
    if (std::find(chosen.begin(), chosen.end(), idx) != chosen.end()) continue;
    chosen.push_back(idx);
    point[depth] = scaled[idx];
    scan_tuples(scaled, f, chosen, point, acc);
    chosen.pop_back();
  }
}

}  // namespace

double correlation_statistic(std::span<const double> eigenvalues, const TestFunction& f, double energy,
                             const CorrelationOptions& options) {
  require(f.k >= 1 && f.k <= 3, ErrorCode::invalid_argument, "k must lie in {1,2,3}");
  const auto n = static_cast<Index>(eigenvalues.size());
  require(n >= static_cast<Index>(f.k), ErrorCode::invalid_argument, "fewer eigenvalues than k");
  const double rho = options.rho > 0.0 ? options.rho : semicircle_density(energy);
  require(rho > 0.0, ErrorCode::invalid_argument, "energy outside the support of the density");
  const double nd = static_cast<double>(n);
  const double half_width = f.support_radius / (nd * rho);
  require(half_width < 2.0, ErrorCode::invalid_argument, "test function window exceeds the spectrum");

  std::vector<double> scaled;
  for (double l : eigenvalues) {
    if (options.restrict_window && std::abs(l - energy) > half_width + options.window_slack) continue;
    scaled.push_back(nd * rho * (l - energy));
  }
  double acc = 0.0;
  std::vector<std::size_t> chosen;
  std::vector<double> point(static_cast<std::size_t>(f.k));
  scan_tuples(scaled, f, chosen, point, acc);
  return std::pow(nd * rho, f.k) / falling_factorial(nd, f.k) * acc;
}

CorrelationObservable CorrelationAccumulator::observable() const {
  CorrelationObservable o;
  o.k = k;
  o.energy = energy;
  o.estimate = moments.mean;
  o.stderr_estimate = moments.stderr_mean();
  o.replicas = moments.count;
  return o;
}

CorrelationObservable correlation_observable(const std::vector<SpectrumSummary>& spectra, const TestFunction& f,
                                             double energy, double kappa, const CorrelationOptions& options) {
  require(energy >= kappa - 2.0 && energy <= 2.0 - kappa, ErrorCode::invalid_argument, "energy outside the bulk");
  CorrelationAccumulator acc{f.k, energy, {}};
  for (const auto& s : spectra) acc.add(correlation_statistic(s.values(), f, energy, options));
  return acc.observable();
}

// ---------------------------------------------------------------------------
// Comparisons

namespace {

std::vector<double> pool(const std::vector<std::vector<double>>& groups, const std::vector<Index>& pick) {
  std::vector<double> out;
  for (Index r : pick) out.insert(out.end(), groups[r].begin(), groups[r].end());
  return out;
}

}  // namespace

GapComparison compare_gaps(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b,
                           double tolerance, Index bootstrap_rounds, Seed seed) {
  require(a.size() >= 2 && b.size() >= 2, ErrorCode::insufficient_replicas,
          "gap comparison needs at least 2 replicas per ensemble");
  std::vector<Index> ia(a.size()), ib(b.size());
  std::iota(ia.begin(), ia.end(), Index{0});
  std::iota(ib.begin(), ib.end(), Index{0});
  const std::vector<double> pa = pool(a, ia);
  const std::vector<double> pb = pool(b, ib);
  GapComparison out;
  out.n_a = pa.size();
  out.n_b = pb.size();
  out.ks = stats::ks_two_sample(pa, pb);
  out.mean_a = stats::mean(pa);
  out.mean_b = stats::mean(pb);
  out.critical_1pct = stats::ks_critical_value(out.n_a, out.n_b, 0.01);
  out.tolerance = tolerance;
  out.ci_lo = out.ci_hi = out.ks;
  if (bootstrap_rounds > 0) {
    std::vector<double> boot(bootstrap_rounds);
    for (Index round = 0; round < bootstrap_rounds; ++round) {
      Stream rng(seed, stream_tag::bootstrap, round);
      std::vector<Index> ra(a.size()), rb(b.size());
      for (auto& r : ra) r = rng() % a.size();
      for (auto& r : rb) r = rng() % b.size();
      boot[round] = stats::ks_two_sample(pool(a, ra), pool(b, rb));
    }
    out.ci_lo = stats::quantile(boot, 0.025);
    out.ci_hi = stats::quantile(boot, 0.975);
  }
  out.pass = out.ks < tolerance;
  return out;
}

CorrelationComparison compare_correlation(const CorrelationObservable& a, const CorrelationObservable& b,
                                          double sigmas) {
  require(a.replicas >= 2 && b.replicas >= 2, ErrorCode::insufficient_replicas,
          "correlation comparison needs at least 2 replicas per ensemble");
  CorrelationComparison out;
  out.a = a;
  out.b = b;
  out.sigmas = sigmas;
  out.diff = std::abs(a.estimate - b.estimate);
  out.pooled_stderr = std::hypot(a.stderr_estimate, b.stderr_estimate);
  out.pass = out.diff <= sigmas * out.pooled_stderr;
  return out;
}

EnsembleComparison compare_ensembles(const EnsembleSpec& a, const EnsembleSpec& b, const ComparisonConfig& config) {
  require(a.n == b.n, ErrorCode::dimension_mismatch, "ensembles must share N");
  require(config.replicas >= 2, ErrorCode::insufficient_replicas, "at least 2 replicas per ensemble required");
  const auto pa = a.make_profile();
  const auto pb = b.make_profile();
  const Index reps = config.replicas;
  EnsembleComparison out;
  out.statistic = config.statistic;

  if (config.statistic == ComparisonStatistic::gap_ks) {
    auto gaps = [&](const EnsembleSpec& spec, const std::shared_ptr<const VarianceProfile>& p, Seed seed) {
      return parallel_map<std::vector<double>>(reps, [&](Index r) {
        const WignerSample s = spec.sample(p, derive_seed(seed, stream_tag::replica, r));
        return rescaled_nearest_gaps(eigendecompose(s), config.kappa);
      });
    };
    out.gaps = compare_gaps(gaps(a, pa, config.seed_a), gaps(b, pb, config.seed_b), config.tolerance,
                            config.bootstrap_rounds, derive_seed(config.seed_a ^ config.seed_b, stream_tag::bootstrap, 0));
    out.magnitude = out.gaps.ks;
    out.pass = out.gaps.pass;
  } else {
    const TestFunction f = TestFunction::product_bump(config.k, config.bump_radius);
    auto observe = [&](const EnsembleSpec& spec, const std::shared_ptr<const VarianceProfile>& p, Seed seed) {
      require(config.energy >= config.kappa - 2.0 && config.energy <= 2.0 - config.kappa,
              ErrorCode::invalid_argument, "energy outside the bulk");
      const std::vector<double> stats_r = parallel_map<double>(reps, [&](Index r) {
        const WignerSample s = spec.sample(p, derive_seed(seed, stream_tag::replica, r));
        return correlation_statistic(eigendecompose(s).values(), f, config.energy);
      });
      CorrelationAccumulator acc{config.k, config.energy, {}};
      for (double v : stats_r) acc.add(v);
      return acc.observable();
    };
    out.correlation = compare_correlation(observe(a, pa, config.seed_a), observe(b, pb, config.seed_b), config.sigmas);
    out.magnitude = out.correlation.diff;
    out.pass = out.correlation.pass;
  }
  return out;
}

}  // namespace rmt
