#include "rmt/labels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace rmt {

double label_threshold(Index n, double eps) {
  require(n >= 1, ErrorCode::invalid_argument, "n must be at least 1");
  return std::pow(static_cast<double>(n), -eps / 10.0);
}

ABLabel::ABLabel(Index n, double eps) : n_(n), eps_(eps), bits_(n * n, 0) {}

ABLabel ABLabel::all_b(Index n, double eps) {
  ABLabel out(n, eps);
  std::fill(out.bits_.begin(), out.bits_.end(), 1);
  return out;
}

void ABLabel::set(Index i, Index j, bool b) {
  bits_[i * n_ + j] = b;
  bits_[j * n_ + i] = b;
}

Index ABLabel::count_b_upper() const {
  Index count = 0;
  for (Index j = 0; j < n_; ++j)
    for (Index i = 0; i <= j; ++i) count += is_b(i, j);
  return count;
}

ABLabel label_of(const RealMatrix& h, double eps) {
  const auto n = static_cast<Index>(h.rows());
  ABLabel out(n, eps);
  const double thr = label_threshold(n, eps);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i <= j; ++i) out.set(i, j, std::abs(h(i, j)) > thr);
  return out;
}

ABLabel label_of(const WignerSample& sample) {
  const double eps = sample.profile ? sample.profile->constants.eps : 0.5;
  return label_of(sample.h, eps);
}

// ---------------------------------------------------------------------------
// Conditional laws

namespace {

double half_line_integral(const EntryLaw& law, double upper, double power) {
  auto f = [&](double x) { return std::pow(x, power) * law.density(x); };
  return 2.0 * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, upper, 20, 1e-14);
}

ConditionalLaws build_conditional(const EntryLaw& law, double threshold) {
  require(threshold > 0.0 && std::isfinite(threshold), ErrorCode::degenerate_conditioning,
          "threshold must be positive and finite");
  if (!law.has_density())
    throw Error(ErrorCode::resampling_unsupported, to_string(law.kind) + " law has atoms; p_ij is not smooth");
  ConditionalLaws out;
  out.base = law;
  out.threshold = threshold;
  out.p = entry_p(law, threshold);
  out.tail_mass = law.abs_survival(threshold);
  return out;
}

}  // namespace

double entry_p(const EntryLaw& law, double threshold) {
  if (!law.has_density())
    throw Error(ErrorCode::resampling_unsupported, to_string(law.kind) + " law has no density");
  if (threshold <= 0.0) return 0.0;
  if (law.target_variance == 0.0) return 1.0;
  return std::min(1.0, half_line_integral(law, threshold, 0.0));
}

double ConditionalLaws::sample_a(Stream& rng) const {
  if (p >= 0.5) {
    for (;;) {
      const double x = base.sample(rng);
      if (std::abs(x) < threshold) return x;
    }
  }
  const double sign = (rng() >> 63) ? 1.0 : -1.0;
  const double tail = 1.0 - p * rng.uniform();  // uniform on (tail_mass, 1)
  const double x = std::min(base.abs_survival_inverse(tail), std::nextafter(threshold, 0.0));
  return sign * x;
}

double ConditionalLaws::sample_b(Stream& rng) const {
  require(tail_mass > 0.0, ErrorCode::degenerate_conditioning,
          "P[|X| >= threshold] underflows; the b-law cannot be sampled");
  if (tail_mass >= 0.5) {
    for (;;) {
      const double x = base.sample(rng);
      if (std::abs(x) > threshold) return x;
    }
  }
  const double sign = (rng() >> 63) ? 1.0 : -1.0;
  const double x =
      std::max(base.abs_survival_inverse(tail_mass * rng.uniform()), std::nextafter(threshold, INFINITY));
  return sign * x;
}

double ConditionalLaws::a_second_moment() const { return half_line_integral(base, threshold, 2.0) / p; }

ConditionalLaws conditional_laws(const EntryLaw& law, double threshold) {
  ConditionalLaws out = build_conditional(law, threshold);
  require(out.p > 0.0 && out.tail_mass > 0.0 && out.p < 1.0, ErrorCode::degenerate_conditioning,
          "P[|X| < threshold] = " + std::to_string(out.p) + " is not inside (0,1)");
  return out;
}

namespace {

// One conditional law per distinct variance value in the profile.
class ConditionalCache {
 public:
  ConditionalCache(const EntryLaw& law, double threshold) : law_(law), threshold_(threshold) {}

  const ConditionalLaws& at(double variance) {
    auto it = cache_.find(variance);
    if (it == cache_.end()) {
      ConditionalLaws c = build_conditional(law_.with_variance(variance), threshold_);
      require(c.p > 0.0, ErrorCode::resampling_unsupported, "P[|h_ij| < threshold] = 0");
      it = cache_.emplace(variance, c).first;
    }
    return it->second;
  }

 private:
  EntryLaw law_;
  double threshold_;
  std::map<double, ConditionalLaws> cache_;
};

}  // namespace

ABLabel sample_h_distributed_label(const VarianceProfile& profile, const EntryLaw& law, Seed seed) {
  check_moment_assumption(law, profile.constants.eps);
  const Index n = profile.n;
  ABLabel out(n, profile.constants.eps);
  ConditionalCache cache(law, out.threshold());
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i <= j; ++i) {
      const double q = cache.at(profile.s(i, j)).tail_mass;
      if (q == 0.0) continue;
      Stream rng(seed, stream_tag::label, i, j);
      out.set(i, j, rng.uniform() < q);
    }
  }
  return out;
}

WignerSample sample_conditioned_matrix(std::shared_ptr<const VarianceProfile> profile, const EntryLaw& law,
                                       const ABLabel& label, Seed seed) {
  require(profile != nullptr, ErrorCode::invalid_argument, "profile required");
  require(label.n() == profile->n, ErrorCode::dimension_mismatch,
          "label is " + std::to_string(label.n()) + " but profile is " + std::to_string(profile->n));
  check_moment_assumption(law, profile->constants.eps);
  const Index n = profile->n;
  ConditionalCache cache(law, label.threshold());
  WignerSample out;
  out.h.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i <= j; ++i) {
      const ConditionalLaws& c = cache.at(profile->s(i, j));
      Stream rng(seed, stream_tag::conditioned, i, j);
      const double x = label.is_b(i, j) ? c.sample_b(rng) : c.sample_a(rng);
      out.h(i, j) = x;
      out.h(j, i) = x;
    }
  }
  out.profile = std::move(profile);
  out.seed = seed;
  out.law = law;
  return out;
}

// ---------------------------------------------------------------------------
// Classification

namespace {

struct DisjointSets {
  std::vector<Index> parent;
  explicit DisjointSets(Index n) : parent(n) { std::iota(parent.begin(), parent.end(), Index{0}); }
  Index find(Index x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

Index IndexClassification::largest_component() const {
  Index best = 0;
  for (const auto& c : components) best = std::max(best, static_cast<Index>(c.size()));
  return best;
}

IndexClassification classify(const ABLabel& label) {
  const Index n = label.n();
  IndexClassification out;
  out.deviant_mask.assign(n, 0);
  DisjointSets sets(n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i <= j; ++i) {
      if (!label.is_b(i, j)) continue;
      out.deviant_mask[i] = out.deviant_mask[j] = 1;
      sets.unite(i, j);
    }
  }
  std::map<Index, std::vector<Index>> groups;
  for (Index i = 0; i < n; ++i) {
    if (out.deviant_mask[i]) {
      out.deviant.push_back(i);
      groups[sets.find(i)].push_back(i);
    } else {
      out.typical.push_back(i);
    }
  }
  for (auto& [root, members] : groups) out.components.push_back(std::move(members));
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::admissible: return "admissible";
    case Verdict::deviant_inadmissible: return "deviant_inadmissible";
    case Verdict::connected_inadmissible: return "connected_inadmissible";
    case Verdict::both: return "both";
  }
  return "unknown";
}

Index connectivity_size(Index n, const AdmissibilityConfig& config) {
  require(config.log_base > 1.0, ErrorCode::invalid_argument, "log base must exceed 1");
  const double lb = std::log(config.log_base);
  const double inner = std::log(static_cast<double>(n)) / lb;
  if (!(inner > 1.0))
    throw Error(ErrorCode::undefined_threshold,
                "log log N is undefined or nonpositive for N = " + std::to_string(n));
  const auto r = static_cast<Index>(std::ceil(std::log(inner) / lb));
  return std::max<Index>(std::max<Index>(r, 1), config.r_min);
}

Admissibility admissibility(const ABLabel& label, const IndexClassification& cls, const AdmissibilityConfig& config) {
  Admissibility out;
  out.r = connectivity_size(label.n(), config);
  out.deviant_count = cls.deviant.size();
  out.deviant_limit = std::pow(static_cast<double>(label.n()), 1.0 - label.eps() / 20.0);
  out.largest_component = cls.largest_component();
  const bool deviant_bad = static_cast<double>(out.deviant_count) >= out.deviant_limit;
  const bool connected_bad = out.largest_component >= out.r;
  out.verdict = deviant_bad && connected_bad ? Verdict::both
                : deviant_bad                ? Verdict::deviant_inadmissible
                : connected_bad              ? Verdict::connected_inadmissible
                                             : Verdict::admissible;
  return out;
}

Admissibility admissibility(const ABLabel& label, const AdmissibilityConfig& config) {
  return admissibility(label, classify(label), config);
}

RateEstimate wilson_interval(Index count, Index trials, double z) {
  RateEstimate out;
  out.count = count;
  if (trials == 0) return out;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(count) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  out.rate = p;
  out.lo = std::max(0.0, centre - half);
  out.hi = std::min(1.0, centre + half);
  return out;
}

AdmissibilityRates admissibility_frequency(const VarianceProfile& profile, const EntryLaw& law, Index trials,
                                           Seed seed, const AdmissibilityConfig& config) {
  require(trials >= 1, ErrorCode::invalid_argument, "trials must be at least 1");
  connectivity_size(profile.n, config);
  std::array<Index, 4> counts{};
  AdmissibilityRates out;
  out.trials = trials;
  for (Index t = 0; t < trials; ++t) {
    const ABLabel label = sample_h_distributed_label(profile, law, derive_seed(seed, stream_tag::replica, t));
    const Admissibility a = admissibility(label, config);
    ++counts[static_cast<std::size_t>(a.verdict)];
    out.deviant_counts.push_back(a.deviant_count);
  }
  for (std::size_t v = 0; v < counts.size(); ++v) out.by_verdict[v] = wilson_interval(counts[v], trials);
  return out;
}

}  // namespace rmt
