#include "rmt/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/roots.hpp>

#include "rmt/linalg.hpp"

namespace rmt {

FlowState ou_evolve(const FlowState& state, double dt, Seed seed) {
  require(dt > 0.0, ErrorCode::invalid_argument, "dt must be positive");
  const WignerSample& in = state.sample;
  require(in.profile != nullptr, ErrorCode::invalid_argument, "flow state has no profile");
  const auto n = static_cast<Eigen::Index>(in.n());
  const double nd = static_cast<double>(n);
  FlowState out;
  out.t = state.t + dt;
  out.sample = in;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double s = in.profile->s(i, j);
      const double decay = std::exp(-dt / (2.0 * nd * s));
      const double var = -s * std::expm1(-dt / (nd * s));
      Stream rng(seed, stream_tag::ou_noise, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
      const double x = decay * in.h(i, j) + std::sqrt(var) * rng.normal();
      out.sample.h(i, j) = x;
      out.sample.h(j, i) = x;
    }
  }
  return out;
}

double split_noise_variance(Index n, double s_ij, double r, double t, bool diagonal) {
  const double nd = static_cast<double>(n);
  const double x = nd * s_ij;
  const double ou = -x * std::expm1(-t / x);
  const double goe = r * (diagonal ? 1.0 : 0.5) * -std::expm1(-t / r);
  return (ou - goe) / nd;
}

RealMatrix DivisibleDecomposition::compose(const RealMatrix& goe) const {
  require(goe.rows() == h1.h.rows() && goe.cols() == h1.h.cols(), ErrorCode::dimension_mismatch,
          "GOE and h1 sizes differ");
  return h1.h + std::sqrt(s) * goe;
}

DivisibleDecomposition gaussian_divisible_split(const WignerSample& sample, double t, Seed seed) {
  require(t > 0.0, ErrorCode::invalid_argument, "t must be positive");
  require(sample.profile != nullptr, ErrorCode::invalid_argument, "sample has no profile");
  const VarianceProfile& p = *sample.profile;
  const auto n = static_cast<Eigen::Index>(sample.n());
  const double nd = static_cast<double>(n);
  DivisibleDecomposition d;
  d.t = t;
  d.r = nd * p.s.minCoeff();
  d.s = -d.r * std::expm1(-t / d.r) / 2.0;
  d.h1 = sample;
  d.min_noise_variance = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double s = p.s(i, j);
      double var = split_noise_variance(sample.n(), s, d.r, t, i == j);
      d.min_noise_variance = std::min(d.min_noise_variance, var);
      if (var < 0.0) {
        // Rounding can leave -1e-18 where the exact value is 0 (entries with N s_ij = r).
        require(var > -1e-14 * s, ErrorCode::constraint_violation,
                "negative split noise variance at (" + std::to_string(i) + "," + std::to_string(j) + ")");
        var = 0.0;
      }
      Stream rng(seed, stream_tag::split_noise, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
      const double x = std::exp(-t / (2.0 * nd * s)) * sample.h(i, j) + std::sqrt(var) * rng.normal();
      d.h1.h(i, j) = x;
      d.h1.h(j, i) = x;
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Classical locations

double semicircle_quantile(double p) {
  require(p >= 0.0 && p <= 1.0, ErrorCode::invalid_argument, "quantile level must lie in [0,1]");
  if (p == 0.0) return -2.0;
  if (p == 1.0) return 2.0;
  if (p == 0.5) return 0.0;
  auto f = [p](double x) { return semicircle_cdf(x) - p; };
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(f, -2.0, 2.0, -p, 1.0 - p,
                                                   boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (r.first + r.second);
}

std::vector<double> classical_locations(Index n) {
  require(n >= 1, ErrorCode::invalid_argument, "n must be at least 1");
  std::vector<double> out(n);
  for (Index i = 1; i <= n; ++i) {
    out[i - 1] = (2 * i == n) ? 0.0 : semicircle_quantile(static_cast<double>(i) / static_cast<double>(n));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Free convolution

FreeConvolution::FreeConvolution(std::vector<double> base, double s) : base_(std::move(base)), s_(s) {
  require(!base_.empty(), ErrorCode::invalid_argument, "empty base spectrum");
  require(s > 0.0, ErrorCode::invalid_argument, "s must be positive");
  std::sort(base_.begin(), base_.end());
}

Complex FreeConvolution::base_stieltjes(Complex w) const {
  return linalg::stieltjes(std::span<const double>(base_), w);
}

double FreeConvolution::residual(Complex z, Complex m) const { return std::abs(m - base_stieltjes(z + s_ * m)); }

double FreeConvolution::lower() const { return base_.front() - 2.0 * std::sqrt(s_); }
double FreeConvolution::upper() const { return base_.back() + 2.0 * std::sqrt(s_); }

namespace {

constexpr double kTolerance = 1e-12;

}  // namespace

Complex FreeConvolution::stieltjes(Complex z) const {
  require(z.imag() > 0.0, ErrorCode::invalid_argument, "free convolution needs Im z > 0");
  const double nd = static_cast<double>(base_.size());
  const double start = std::max(1.0, z.imag());

  // Damped fixed point where the map is a contraction.
  Complex m = Complex(0.0, 1.0 / start);
  const Complex z0(z.real(), start);
  for (int it = 0;; ++it) {
    const Complex next = base_stieltjes(z0 + s_ * m);
    if (std::abs(next - m) < 1e-14) {
      m = next;
      break;
    }
    m = 0.5 * m + 0.5 * next;
    if (it > 20000)
      throw Error(ErrorCode::convergence, "free convolution fixed point stalled at eta=" + std::to_string(start));
  }

  // Newton continuation in eta.
  double eta = start;
  double step = 0.5;
  while (eta > z.imag()) {
    const double target = std::max(z.imag(), eta * step);
    const Complex zt(z.real(), target);
    Complex mt = m;
    bool ok = false;
    for (int it = 0; it < 60; ++it) {
      const Complex w = zt + s_ * mt;
      Complex mb = 0.0, dmb = 0.0;
      for (double l : base_) {
        const Complex d = 1.0 / (l - w);
        mb += d;
        dmb += d * d;
      }
      mb /= nd;
      dmb /= nd;
      const Complex f = mt - mb;
      if (std::abs(f) < 0.05 * kTolerance) {
        ok = true;
        break;
      }
      mt -= f / (1.0 - s_ * dmb);
      if (!(mt.imag() > 0.0) || !std::isfinite(mt.real())) break;
    }
    if (ok) {
      m = mt;
      eta = target;
      step = std::max(0.05, step * step);
    } else {
      step = std::sqrt(step);
      if (step > 0.999)
        throw Error(ErrorCode::convergence, "free convolution continuation failed at E=" + std::to_string(z.real()) +
                                                ", eta=" + std::to_string(eta) + "; last m=" +
                                                std::to_string(m.real()) + "+" + std::to_string(m.imag()) + "i");
    }
  }
  if (residual(z, m) >= kTolerance)
    throw Error(ErrorCode::convergence, "free convolution residual above 1e-12 at E=" + std::to_string(z.real()));
  return m;
}

double FreeConvolution::density(double energy, double eta) const {
  return stieltjes(Complex(energy, eta)).imag() / M_PI;
}

std::vector<double> FreeConvolution::quantiles(Index n, Index grid_points) const {
  require(n >= 1 && grid_points >= 16, ErrorCode::invalid_argument, "need n >= 1 and at least 16 grid points");
  const double lo = lower() - 0.05, hi = upper() + 0.05;
  std::vector<double> x(grid_points), rho(grid_points), cdf(grid_points, 0.0);
  for (Index k = 0; k < grid_points; ++k) {
    x[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(grid_points - 1);
    rho[k] = density(x[k]);
  }
  for (Index k = 1; k < grid_points; ++k) cdf[k] = cdf[k - 1] + 0.5 * (rho[k] + rho[k - 1]) * (x[k] - x[k - 1]);
  const double mass = cdf.back();
  for (double& c : cdf) c /= mass;

  // The eta smoothing leaves O(eta) mass outside the support; matching levels
  // to within 1e-4/n keeps the top quantile on the support edge.
  const double slack = 1e-4 / static_cast<double>(n);
  std::vector<double> out(n);
  Index k = 1;
  for (Index i = 1; i <= n; ++i) {
    const double level = static_cast<double>(i) / static_cast<double>(n) - slack;
    while (k < grid_points - 1 && cdf[k] < level) ++k;
    const double c0 = cdf[k - 1], c1 = cdf[k];
    const double frac = c1 > c0 ? std::clamp((level - c0) / (c1 - c0), 0.0, 1.0) : 0.0;
    out[i - 1] = x[k - 1] + frac * (x[k] - x[k - 1]);
  }
  return out;
}

std::vector<double> free_convolution_quantiles(const std::vector<double>& base, double s, Index n,
                                               Index grid_points) {
  return FreeConvolution(base, s).quantiles(n, grid_points);
}

}  // namespace rmt
