#include "rmt/bounds_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rmt/parallel.hpp"
#include "rmt/stats.hpp"

namespace rmt {

std::string to_string(DeviationForm f) {
  switch (f) {
    case DeviationForm::linear: return "linear";
    case DeviationForm::diagonal: return "diagonal";
    case DeviationForm::quadratic: return "quadratic";
    case DeviationForm::bilinear: return "bilinear";
  }
  return "unknown";
}

DeviationForm deviation_form_from_string(const std::string& name) {
  if (name == "linear") return DeviationForm::linear;
  if (name == "diagonal") return DeviationForm::diagonal;
  if (name == "quadratic") return DeviationForm::quadratic;
  if (name == "bilinear") return DeviationForm::bilinear;
  throw Error(ErrorCode::invalid_argument, "unknown deviation form '" + name + "'");
}

std::string ScalarLaw::describe() const {
  if (kind == Kind::gaussian) return "gaussian";
  std::string s = "truncated_" + to_string(entry.kind);
  if (entry.heavy_tailed()) s += "(" + std::to_string(entry.tail_index) + ")";
  return s;
}

double DeviationCheckConfig::q_value() const {
  return q > 0.0 ? q : std::pow(static_cast<double>(n), eps / 10.0);
}

// ---------------------------------------------------------------------------
// Coefficients

Coefficients Coefficients::vector(const RealVector& r) {
  Coefficients c;
  c.diag = r;
  return c;
}

Coefficients Coefficients::zero(Index n) {
  Coefficients c;
  const auto m = static_cast<Eigen::Index>(n);
  c.u = RealMatrix::Zero(m, 1);
  c.v = RealMatrix::Zero(m, 1);
  c.diag = RealVector::Zero(m);
  return c;
}

Coefficients Coefficients::ones(Index n) {
  Coefficients c;
  const auto m = static_cast<Eigen::Index>(n);
  c.u = RealMatrix::Ones(m, 1);
  c.v = RealMatrix::Ones(m, 1);
  c.diag = RealVector::Ones(m);  // vector forms read this; matrix forms ignore it
  return c;
}

Coefficients Coefficients::matrix(const RealMatrix& r) {
  require(r.rows() == r.cols(), ErrorCode::dimension_mismatch, "R must be square");
  Coefficients c;
  c.dense = r;
  c.diag = r.diagonal();
  return c;
}

Coefficients Coefficients::low_rank(const RealMatrix& u, const RealMatrix& v) {
  require(u.rows() == v.rows() && u.cols() == v.cols(), ErrorCode::dimension_mismatch, "U and V shapes differ");
  Coefficients c;
  c.u = u;
  c.v = v;
  c.diag = (u.cwiseProduct(v)).rowwise().sum();
  return c;
}

Index Coefficients::n() const {
  if (dense) return static_cast<Index>(dense->rows());
  if (u.rows() > 0) return static_cast<Index>(u.rows());
  return static_cast<Index>(diag.size());
}

namespace {

// Visits R_ij for all (i, j) (or i != j) in the matrix representation.
template <class F>
void for_each_entry(const Coefficients& r, bool off_diagonal, F&& f) {
  const auto n = static_cast<Eigen::Index>(r.n());
  if (r.dense) {
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        if (!off_diagonal || i != j) f((*r.dense)(i, j));
    return;
  }
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      if (!off_diagonal || i != j) f(r.u.row(i).dot(r.v.row(j)));
}

}  // namespace

double Coefficients::max_abs(bool off_diagonal) const {
  double m = 0.0;
  for_each_entry(*this, off_diagonal, [&](double x) { m = std::max(m, std::abs(x)); });
  return m;
}

double Coefficients::rms(bool off_diagonal) const {
  double s = 0.0;
  for_each_entry(*this, off_diagonal, [&](double x) { s += x * x; });
  const double nd = static_cast<double>(n());
  return std::sqrt(s / (nd * nd));
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

class ScalarSampler {
 public:
  ScalarSampler(const ScalarLaw& law, Index n, double q) : law_(law), sigma_(1.0 / std::sqrt(static_cast<double>(n))) {
    if (law.kind == ScalarLaw::Kind::truncated) {
      cond_ = conditional_laws(law.entry.with_variance(1.0 / static_cast<double>(n)), 1.0 / q);
      second_moment_ = cond_->a_second_moment();
    } else {
      second_moment_ = sigma_ * sigma_;
    }
  }

  double draw(Stream& rng) const { return cond_ ? cond_->sample_a(rng) : sigma_ * rng.normal(); }
  double second_moment() const { return second_moment_; }

 private:
  ScalarLaw law_;
  double sigma_;
  std::optional<ConditionalLaws> cond_;
  double second_moment_ = 0.0;
};

RealVector draw_vector(const ScalarSampler& sampler, Index n, Seed seed, std::uint64_t tag, Index replica) {
  Stream rng(seed, tag, replica);
  RealVector x(static_cast<Eigen::Index>(n));
  for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = sampler.draw(rng);
  return x;
}

double quadratic_off_diagonal(const Coefficients& r, const RealVector& x) {
  if (r.dense) return x.dot(*r.dense * x) - (r.dense->diagonal().array() * x.array().square()).sum();
  const RealVector ux = r.u.transpose() * x;
  const RealVector vx = r.v.transpose() * x;
  const RealVector uv_diag = r.u.cwiseProduct(r.v).rowwise().sum();
  return ux.dot(vx) - (uv_diag.array() * x.array().square()).sum();
}

double bilinear_full(const Coefficients& r, const RealVector& x, const RealVector& y) {
  if (r.dense) return x.dot(*r.dense * y);
  return (r.u.transpose() * x).dot(r.v.transpose() * y);
}

std::vector<double> form_statistics(const DeviationCheckConfig& config, const Coefficients& r, const ScalarLaw& law_x,
                                    const ScalarLaw& law_y, Seed seed_x, Seed seed_y) {
  const Index n = config.n;
  require(r.n() == n, ErrorCode::dimension_mismatch, "coefficients and config disagree on N");
  require(config.replicas >= 1, ErrorCode::invalid_argument, "replicas must be at least 1");
  const double q = config.q_value();
  require(q > 1.0 && q < std::sqrt(static_cast<double>(n)), ErrorCode::invalid_argument, "q must lie in (1, sqrt N)");
  const ScalarSampler sx(law_x, n, q);
  const ScalarSampler sy(law_y, n, q);
  const bool vector_form = config.form == DeviationForm::linear || config.form == DeviationForm::diagonal;
  if (vector_form) require(r.diag.size() == static_cast<Eigen::Index>(n), ErrorCode::dimension_mismatch, "R vector missing");

  std::vector<double> out(config.replicas);
  constexpr Index kChunk = 256;
  const Index chunks = (config.replicas + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](Index c) {
    const Index end = std::min(config.replicas, (c + 1) * kChunk);
    for (Index rep = c * kChunk; rep < end; ++rep) {
      const RealVector x = draw_vector(sx, n, seed_x, stream_tag::deviation_x, rep);
      double v = 0.0;
      switch (config.form) {
        case DeviationForm::linear: v = r.diag.dot(x); break;
        case DeviationForm::diagonal:
          v = (r.diag.array() * (x.array().square() - sx.second_moment())).sum();
          break;
        case DeviationForm::quadratic: v = quadratic_off_diagonal(r, x); break;
        case DeviationForm::bilinear: {
          const RealVector y = draw_vector(sy, n, seed_y, stream_tag::deviation_y, rep);
          v = bilinear_full(r, x, y);
          break;
        }
      }
      out[rep] = std::abs(v);
    }
  });
  return out;
}

TailRow tail_row(const DeviationCheckConfig& config, const Coefficients& r, const std::vector<double>& stat, double xi,
                 double threshold) {
  TailRow row;
  row.form = config.form;
  row.n = config.n;
  row.xi = xi;
  row.threshold = threshold;
  row.replicas = stat.size();
  for (double s : stat) row.exceedances += (s >= threshold && s > 0.0);
  row.empirical_tail = static_cast<double>(row.exceedances) / static_cast<double>(row.replicas);
  row.bound = std::exp(-config.nu * std::pow(std::log(static_cast<double>(config.n)), xi));
  row.comparable = row.bound >= 10.0 / static_cast<double>(row.replicas);
  row.pass = row.empirical_tail <= row.bound;
  return row;
}

TailReport run_check(const DeviationCheckConfig& config, const Coefficients& r, const ScalarLaw& law_x,
                     const ScalarLaw& law_y, Seed seed_x, Seed seed_y) {
  TailReport report;
  report.preflight = preflight(config, law_x, seed_x);
  if (config.form == DeviationForm::bilinear) {
    const PreflightReport py = preflight(config, law_y, seed_y);
    if (!py.ok) report.preflight = py;
  }
  if (!report.preflight.ok)
    throw Error(ErrorCode::preflight_violation,
                "scalar law " + law_x.describe() + " violates the moment template at N=" + std::to_string(config.n));
  const std::vector<double> stat = form_statistics(config, r, law_x, law_y, seed_x, seed_y);
  for (double xi : config.xi) {
    report.rows.push_back(tail_row(config, r, stat, xi, deviation_threshold(config, r, xi)));
    report.pass = report.pass && report.rows.back().pass;
  }
  return report;
}

}  // namespace

PreflightReport preflight(const DeviationCheckConfig& config, const ScalarLaw& law, Seed seed, Index draws) {
  const double q = config.q_value();
  const double nd = static_cast<double>(config.n);
  const ScalarSampler sampler(law, config.n, q);
  PreflightReport r;
  r.mean_bound = config.C_prime * std::pow(nd, -1.0 - config.delta);
  std::vector<stats::Moments> moments(r.p.size());
  stats::Moments mean;
  Stream rng(seed, stream_tag::scalar, 0);
  for (Index k = 0; k < draws; ++k) {
    const double x = sampler.draw(rng);
    mean.add(x);
    for (std::size_t a = 0; a < r.p.size(); ++a) moments[a].add(std::pow(std::abs(x), r.p[a]));
  }
  r.mean_estimate = mean.mean;
  // The provided laws are symmetric, so the mean test uses a 4-sigma Monte Carlo allowance.
  r.ok = std::abs(mean.mean) <= r.mean_bound + 4.0 * mean.stderr_mean();
  for (std::size_t a = 0; a < r.p.size(); ++a) {
    r.moment_estimate.push_back(moments[a].mean);
    r.moment_bound.push_back(q * q / nd * std::pow(config.C / q, r.p[a]));
    r.ok = r.ok && r.moment_estimate.back() <= r.moment_bound.back();
  }
  return r;
}

double deviation_threshold(const DeviationCheckConfig& config, const Coefficients& r, double xi) {
  const double nd = static_cast<double>(config.n);
  const double l = std::log(nd);
  const double qi = 1.0 / config.q_value();
  const double cp = config.C_prime;
  const double nd_delta = std::pow(nd, -config.delta);
  switch (config.form) {
    case DeviationForm::linear: {
      const double max_r = r.diag.cwiseAbs().maxCoeff();
      const double rms = std::sqrt(r.diag.squaredNorm() / nd);
      return std::pow(l, xi) * ((cp * nd_delta + qi) * max_r + rms);
    }
    case DeviationForm::diagonal:
      return std::pow(l, xi) * (5.0 * cp * cp * nd_delta + qi) * r.diag.cwiseAbs().maxCoeff();
    case DeviationForm::quadratic:
      return std::pow(l, 2.0 * xi) * ((5.0 * cp * cp * nd_delta + qi) * r.max_abs(true) + r.rms(true));
    case DeviationForm::bilinear:
      return std::pow(l, 2.0 * xi) * ((5.0 * cp * cp * nd_delta + 2.0 * qi) * r.max_abs(false) + r.rms(false));
  }
  return 0.0;
}

TailReport check_linear_form(const DeviationCheckConfig& config, const Coefficients& r, const ScalarLaw& law,
                             Seed seed) {
  DeviationCheckConfig c = config;
  c.form = DeviationForm::linear;
  return run_check(c, r, law, law, seed, seed);
}

TailReport check_diagonal_form(const DeviationCheckConfig& config, const Coefficients& r, const ScalarLaw& law,
                               Seed seed) {
  DeviationCheckConfig c = config;
  c.form = DeviationForm::diagonal;
  return run_check(c, r, law, law, seed, seed);
}

TailReport check_quadratic_form(const DeviationCheckConfig& config, const Coefficients& r, const ScalarLaw& law,
                                Seed seed) {
  DeviationCheckConfig c = config;
  c.form = DeviationForm::quadratic;
  return run_check(c, r, law, law, seed, seed);
}

TailReport check_bilinear_form(const DeviationCheckConfig& config, const Coefficients& r, const ScalarLaw& law_x,
                               const ScalarLaw& law_y, Seed seed_x, Seed seed_y) {
  if (seed_x == seed_y)
    throw Error(ErrorCode::stream_collision, "X and Y must come from independent streams (seeds are equal)");
  DeviationCheckConfig c = config;
  c.form = DeviationForm::bilinear;
  return run_check(c, r, law_x, law_y, seed_x, seed_y);
}

TailReport check_form(const DeviationCheckConfig& config, const Coefficients& r, const ScalarLaw& law, Seed seed) {
  switch (config.form) {
    case DeviationForm::linear: return check_linear_form(config, r, law, seed);
    case DeviationForm::diagonal: return check_diagonal_form(config, r, law, seed);
    case DeviationForm::quadratic: return check_quadratic_form(config, r, law, seed);
    case DeviationForm::bilinear:
      return check_bilinear_form(config, r, law, law, seed, derive_seed(seed, stream_tag::deviation_y, 1));
  }
  throw Error(ErrorCode::invalid_argument, "unknown form");
}

NuCalibration calibrate_nu(const DeviationCheckConfig& config, const Coefficients& r, Seed seed,
                           const std::vector<double>& xi_grid, double max_tail, bool allow_empty) {
  const ScalarLaw g = ScalarLaw::gaussian();
  const Seed seed_y = derive_seed(seed, stream_tag::deviation_y, 1);
  const std::vector<double> stat = form_statistics(config, r, g, g, seed, seed_y);
  NuCalibration cal;
  cal.nu = std::numeric_limits<double>::infinity();
  const double floor = 10.0 / static_cast<double>(config.replicas);
  const double l = std::log(static_cast<double>(config.n));
  for (double xi : xi_grid) {
    TailRow row = tail_row(config, r, stat, xi, deviation_threshold(config, r, xi));
    if (row.empirical_tail >= floor && row.empirical_tail <= max_tail) {
      cal.nu = std::min(cal.nu, -std::log(row.empirical_tail) / std::pow(l, xi));
      ++cal.used;
    }
    cal.points.push_back(row);
  }
  if (cal.used == 0 && !allow_empty)
    throw Error(ErrorCode::insufficient_replicas,
                "no calibration point has a tail inside [10/replicas, " + std::to_string(max_tail) + "]");
  return cal;
}

// ---------------------------------------------------------------------------
// Continuity

ContinuityCheck check_continuity(const ResolventFrame& g, const ResolventFrame& gp, double slack) {
  require(g.size() == gp.size(), ErrorCode::dimension_mismatch, "frames differ in size");
  require(g.z.real() == gp.z.real(), ErrorCode::invalid_argument, "frames must share the real part");
  const double eta = g.eta();
  const double eta_prime = gp.eta() - eta;
  require(eta_prime >= 0.0, ErrorCode::invalid_argument, "Im z' must be at least Im z");
  ContinuityCheck c;
  c.z = g.z;
  c.z_prime = gp.z;
  c.ratio_floor = 1.0 - eta_prime / eta;
  c.max_violation = -std::numeric_limits<double>::infinity();
  const Eigen::Index n = g.g.rows();
  const double factor = eta_prime / (2.0 * eta);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double im_kk = std::abs(g.g(k, k).imag());
    for (Eigen::Index j = 0; j < n; ++j) {
      const double lhs = std::abs(gp.g(j, k) - g.g(j, k));
      const double rhs = factor * (std::abs(gp.g(j, j).imag()) + im_kk);
      const double v = lhs - rhs;
      c.max_violation = std::max(c.max_violation, v);
      if (v > slack * std::max(1.0, rhs)) ++c.violations;
    }
    const double a = std::abs(gp.g(k, k)), b = std::abs(g.g(k, k));
    const double ratio = std::min(a, b) / std::max(a, b);
    c.min_ratio = std::min(c.min_ratio, ratio);
    if (ratio < c.ratio_floor - slack) ++c.violations;
  }
  c.pass = c.violations == 0;
  return c;
}

ContinuityCheck check_continuity(const RealMatrix& h, double energy, double eta, double eta_prime, double slack) {
  require(eta > 0.0 && eta_prime >= 0.0, ErrorCode::invalid_argument, "eta must be positive and eta' nonnegative");
  const ResolventFrame g = resolvent(h, Complex(energy, eta));
  if (eta_prime == 0.0) return check_continuity(g, g, slack);
  return check_continuity(g, resolvent(h, Complex(energy, eta + eta_prime)), slack);
}

}  // namespace rmt
