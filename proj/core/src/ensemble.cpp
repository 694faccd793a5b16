#include "rmt/ensemble.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/student_t_distribution.hpp>

namespace rmt {

std::string to_string(LawKind kind) {
  switch (kind) {
    case LawKind::gaussian: return "gaussian";
    case LawKind::rademacher: return "rademacher";
    case LawKind::student_t: return "student_t";
    case LawKind::sym_pareto: return "sym_pareto";
  }
  return "unknown";
}

LawKind law_kind_from_string(const std::string& name) {
  if (name == "gaussian") return LawKind::gaussian;
  if (name == "rademacher") return LawKind::rademacher;
  if (name == "student_t") return LawKind::student_t;
  if (name == "sym_pareto") return LawKind::sym_pareto;
  throw Error(ErrorCode::invalid_argument, "unknown law kind '" + name + "'");
}

std::string to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::flat: return "flat";
    case ProfileKind::sinkhorn_periodic: return "sinkhorn_periodic";
    case ProfileKind::tilted: return "tilted";
    case ProfileKind::goe: return "goe";
  }
  return "unknown";
}

ProfileKind profile_kind_from_string(const std::string& name) {
  if (name == "flat") return ProfileKind::flat;
  if (name == "sinkhorn_periodic") return ProfileKind::sinkhorn_periodic;
  if (name == "tilted") return ProfileKind::tilted;
  if (name == "goe") return ProfileKind::goe;
  throw Error(ErrorCode::invalid_argument, "unknown profile kind '" + name + "'");
}

// ---------------------------------------------------------------------------
// EntryLaw

void EntryLaw::validate() const {
  require(target_variance >= 0.0 && std::isfinite(target_variance), ErrorCode::invalid_argument,
          "target variance must be finite and nonnegative");
  if (heavy_tailed())
    require(tail_index > 2.0, ErrorCode::moment_assumption,
            "tail index must exceed 2 for a finite variance, got " + std::to_string(tail_index));
}

double EntryLaw::scale() const {
  switch (kind) {
    case LawKind::gaussian:
    case LawKind::rademacher: return std::sqrt(target_variance);
    case LawKind::student_t: return std::sqrt(target_variance * (tail_index - 2.0) / tail_index);
    case LawKind::sym_pareto:
      return std::sqrt(target_variance * (tail_index - 1.0) * (tail_index - 2.0) / 2.0);
  }
  return 0.0;
}

double EntryLaw::sample(Stream& rng) const {
  const double sigma = scale();
  switch (kind) {
    case LawKind::gaussian: {
      boost::random::normal_distribution<double> d;
      return sigma * d(rng);
    }
    case LawKind::rademacher: return (rng() >> 63) ? sigma : -sigma;
    case LawKind::student_t: {
      boost::random::student_t_distribution<double> d(tail_index);
      return sigma * d(rng);
    }
    case LawKind::sym_pareto: {
      const double sign = (rng() >> 63) ? 1.0 : -1.0;
      const double y = std::pow(rng.uniform(), -1.0 / tail_index) - 1.0;
      return sign * sigma * y;
    }
  }
  return 0.0;
}

double EntryLaw::density(double x) const {
  const double sigma = scale();
  switch (kind) {
    case LawKind::gaussian:
      return std::exp(-0.5 * x * x / (sigma * sigma)) / (sigma * std::sqrt(2.0 * std::numbers::pi));
    case LawKind::rademacher:
      throw Error(ErrorCode::resampling_unsupported, "rademacher law has no density");
    case LawKind::student_t: {
      const double nu = tail_index;
      const double u = x / sigma;
      const double log_norm = std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0) -
                              0.5 * std::log(nu * std::numbers::pi);
      return std::exp(log_norm - (nu + 1.0) / 2.0 * std::log1p(u * u / nu)) / sigma;
    }
    case LawKind::sym_pareto: {
      const double a = tail_index;
      return 0.5 * a * std::pow(1.0 + std::abs(x) / sigma, -a - 1.0) / sigma;
    }
  }
  return 0.0;
}

double EntryLaw::abs_survival(double x) const {
  const double sigma = scale();
  if (x <= 0.0) return 1.0;
  switch (kind) {
    case LawKind::gaussian: return std::erfc(x / (sigma * std::numbers::sqrt2));
    case LawKind::rademacher: return x <= sigma ? 1.0 : 0.0;
    case LawKind::student_t: {
      boost::math::students_t_distribution<double> t(tail_index);
      return 2.0 * boost::math::cdf(boost::math::complement(t, x / sigma));
    }
    case LawKind::sym_pareto: return std::pow(1.0 + x / sigma, -tail_index);
  }
  return 0.0;
}

double EntryLaw::abs_survival_inverse(double tail) const {
  require(tail > 0.0 && tail <= 1.0, ErrorCode::invalid_argument, "tail probability out of (0,1]");
  const double sigma = scale();
  if (tail == 1.0) return 0.0;
  switch (kind) {
    case LawKind::gaussian: return sigma * std::numbers::sqrt2 * boost::math::erfc_inv(tail);
    case LawKind::rademacher:
      throw Error(ErrorCode::resampling_unsupported, "rademacher law has no continuous quantile");
    case LawKind::student_t: {
      boost::math::students_t_distribution<double> t(tail_index);
      return sigma * boost::math::quantile(boost::math::complement(t, tail / 2.0));
    }
    case LawKind::sym_pareto: return sigma * (std::pow(tail, -1.0 / tail_index) - 1.0);
  }
  return 0.0;
}

double EntryLaw::absolute_moment(double p) const {
  const double sigma = scale();
  const double inf = std::numeric_limits<double>::infinity();
  switch (kind) {
    case LawKind::gaussian:
      return std::pow(sigma, p) * std::pow(2.0, p / 2.0) * std::tgamma((p + 1.0) / 2.0) /
             std::sqrt(std::numbers::pi);
    case LawKind::rademacher: return std::pow(sigma, p);
    case LawKind::student_t: {
      const double nu = tail_index;
      if (p >= nu) return inf;
      const double log_m = 0.5 * p * std::log(nu) + std::lgamma((p + 1.0) / 2.0) +
                           std::lgamma((nu - p) / 2.0) - 0.5 * std::log(std::numbers::pi) -
                           std::lgamma(nu / 2.0);
      return std::pow(sigma, p) * std::exp(log_m);
    }
    case LawKind::sym_pareto: {
      const double a = tail_index;
      if (p >= a) return inf;
      return std::pow(sigma, p) * std::exp(std::lgamma(p + 1.0) + std::lgamma(a - p) - std::lgamma(a));
    }
  }
  return inf;
}

void check_moment_assumption(const EntryLaw& law, double eps) {
  law.validate();
  if (law.heavy_tailed())
    require(law.tail_index > 2.0 + eps, ErrorCode::moment_assumption,
            "tail index " + std::to_string(law.tail_index) + " <= 2 + eps = " + std::to_string(2.0 + eps) +
                ": the (2+eps)-th moment is infinite");
}

// ---------------------------------------------------------------------------
// VarianceProfile

double VarianceProfile::row_defect(Index i) const { return s.row(static_cast<Eigen::Index>(i)).sum() - 1.0; }

double VarianceProfile::min_scaled() const { return static_cast<double>(n) * s.minCoeff(); }
double VarianceProfile::max_scaled() const { return static_cast<double>(n) * s.maxCoeff(); }

void VarianceProfile::validate() const {
  require(n >= 1 && s.rows() == static_cast<Eigen::Index>(n) && s.cols() == static_cast<Eigen::Index>(n),
          ErrorCode::dimension_mismatch, "profile matrix must be n x n");
  const double nd = static_cast<double>(n);
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    for (Eigen::Index j = i; j < s.cols(); ++j) {
      const double v = s(i, j);
      if (v != s(j, i))
        throw Error(ErrorCode::constraint_violation,
                    "profile not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      const double scaled = nd * v;
      if (!(constants.c1 < scaled && scaled < constants.C1))
        throw Error(ErrorCode::constraint_violation,
                    "N s_ij = " + std::to_string(scaled) + " outside (c1, C1) at (" + std::to_string(i) +
                        "," + std::to_string(j) + ")");
    }
  }
  const double row_bound = constants.C1 * std::pow(nd, -constants.eps);
  for (Index i = 0; i < n; ++i) {
    const double t = row_defect(i);
    if (!(std::abs(t) < row_bound))
      throw Error(ErrorCode::constraint_violation,
                  "|t_i| = " + std::to_string(std::abs(t)) + " >= C1 N^-eps at row " + std::to_string(i));
  }
}

namespace {

constexpr int kSinkhornBudget = 10000;
constexpr double kRowTolerance = 1e-12;

RealMatrix sinkhorn_symmetric(const RealMatrix& kernel) {
  const Eigen::Index n = kernel.rows();
  RealVector x = RealVector::Constant(n, 1.0 / std::sqrt(kernel.sum() / static_cast<double>(n)));
  RealMatrix s(n, n);
  for (int iter = 0; iter < kSinkhornBudget; ++iter) {
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i <= j; ++i) s(i, j) = s(j, i) = x[i] * kernel(i, j) * x[j];
    const RealVector rows = s.rowwise().sum();
    if ((rows.array() - 1.0).abs().maxCoeff() <= kRowTolerance) return s;
    // Symmetric fixed point x <- sqrt(x / (K x)).
    x = (x.array() / rows.array().sqrt()).matrix();
  }
  throw Error(ErrorCode::profile_construction,
              "symmetric normalization did not reach 1e-12 row sums within the iteration budget");
}

}  // namespace

VarianceProfile make_profile(Index n, ProfileKind kind, double eps, double amplitude, ModelConstants constants) {
  require(n >= 1, ErrorCode::invalid_argument, "n must be at least 1");
  require(eps > 0.0 && eps <= 1.0, ErrorCode::invalid_argument, "eps must lie in (0,1]");
  constants.eps = eps;
  VarianceProfile p;
  p.n = n;
  p.kind = kind;
  p.amplitude = amplitude;
  p.constants = constants;
  const auto m = static_cast<Eigen::Index>(n);
  const double nd = static_cast<double>(n);
  switch (kind) {
    case ProfileKind::flat: p.s = RealMatrix::Constant(m, m, 1.0 / nd); break;
    case ProfileKind::sinkhorn_periodic: {
      require(amplitude >= 0.0 && amplitude < 1.0, ErrorCode::invalid_argument,
              "sinkhorn_periodic amplitude must lie in [0,1)");
      RealMatrix kernel(m, m);
      for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = 0; i < m; ++i)
          kernel(i, j) = 1.0 + amplitude * std::cos(2.0 * std::numbers::pi * static_cast<double>(i + j) / nd);
      p.s = sinkhorn_symmetric(kernel);
      break;
    }
    case ProfileKind::tilted: {
      require(amplitude >= 0.0 && amplitude < 1.0, ErrorCode::invalid_argument, "tilted amplitude must lie in [0,1)");
      const double tau = amplitude * std::pow(nd, -eps);
      RealVector c(m);
      for (Eigen::Index i = 0; i < m; ++i) c[i] = std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / nd);
      p.s.resize(m, m);
      for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = 0; i <= j; ++i) p.s(i, j) = p.s(j, i) = (1.0 + tau * (c[i] + c[j]) / 2.0) / nd;
      break;
    }
    case ProfileKind::goe: {
      p.s = RealMatrix::Constant(m, m, 1.0 / nd);
      p.s.diagonal().setConstant(2.0 / nd);
      break;
    }
  }
  p.validate();
  return p;
}

VarianceProfile make_goe_profile(Index n, double eps) {
  ModelConstants c;
  c.C1 = 3.0;
  return make_profile(n, ProfileKind::goe, eps, 0.0, c);
}

// ---------------------------------------------------------------------------
// Sampling

WignerSample sample_matrix(std::shared_ptr<const VarianceProfile> profile, const EntryLaw& law, Seed seed) {
  require(profile != nullptr, ErrorCode::invalid_argument, "profile required");
  check_moment_assumption(law, profile->constants.eps);
  const auto m = static_cast<Eigen::Index>(profile->n);
  WignerSample out;
  out.h.resize(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      Stream rng(seed, stream_tag::entry, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
      const double x = law.with_variance(profile->s(i, j)).sample(rng);
      out.h(i, j) = x;
      out.h(j, i) = x;
    }
  }
  out.profile = std::move(profile);
  out.seed = seed;
  out.law = law;
  return out;
}

WignerSample sample_matrix(const VarianceProfile& profile, const EntryLaw& law, Seed seed) {
  return sample_matrix(std::make_shared<const VarianceProfile>(profile), law, seed);
}

WignerSample sample_goe(Index n, Seed seed) {
  return sample_matrix(std::make_shared<const VarianceProfile>(make_goe_profile(n)), EntryLaw::gaussian(), seed);
}

double semicircle_density(double x) {
  if (std::abs(x) >= 2.0) return 0.0;
  return std::sqrt(4.0 - x * x) / (2.0 * std::numbers::pi);
}

double semicircle_cdf(double x) {
  if (x <= -2.0) return 0.0;
  if (x >= 2.0) return 1.0;
  return 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * std::numbers::pi) + std::asin(x / 2.0) / std::numbers::pi;
}

// ---------------------------------------------------------------------------
// EnsembleSpec

std::shared_ptr<const VarianceProfile> EnsembleSpec::make_profile() const {
  if (kind == Kind::goe) return std::make_shared<const VarianceProfile>(make_goe_profile(n, constants.eps));
  return std::make_shared<const VarianceProfile>(rmt::make_profile(n, profile, constants.eps, amplitude, constants));
}

WignerSample EnsembleSpec::sample(Seed seed) const { return sample(make_profile(), seed); }

WignerSample EnsembleSpec::sample(const std::shared_ptr<const VarianceProfile>& p, Seed seed) const {
  if (kind == Kind::goe) return sample_matrix(p, EntryLaw::gaussian(), seed);
  return sample_matrix(p, law, seed);
}

std::string EnsembleSpec::describe() const {
  std::ostringstream os;
  if (kind == Kind::goe) {
    os << "goe(n=" << n << ")";
  } else {
    os << to_string(law.kind);
    if (law.heavy_tailed()) os << "(" << law.tail_index << ")";
    os << "/" << to_string(profile) << "(n=" << n << ",eps=" << constants.eps << ")";
  }
  return os.str();
}

}  // namespace rmt
