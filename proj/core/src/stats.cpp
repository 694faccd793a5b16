#include "rmt/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/roots.hpp>

#include "rmt/linalg.hpp"

namespace rmt::stats {

double ks_one_sample(std::span<const double> sorted, const std::function<double(double)>& cdf) {
  require(!sorted.empty(), ErrorCode::invalid_argument, "empty sample");
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const double f = cdf(sorted[k]);
    d = std::max({d, static_cast<double>(k + 1) / n - f, f - static_cast<double>(k) / n});
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), ErrorCode::invalid_argument, "empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) {
    // Theta-function form converges quickly for small lambda.
    const double pi2 = M_PI * M_PI;
    double acc = 0.0;
    for (int k = 1; k < 50; ++k) {
      const double odd = 2.0 * k - 1.0;
      acc += std::exp(-odd * odd * pi2 / (8.0 * lambda * lambda));
    }
    return 1.0 - std::sqrt(2.0 * M_PI) / lambda * acc;
  }
  double acc = 0.0;
  for (int k = 1; k < 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    acc += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * acc, 0.0, 1.0);
}

double kolmogorov_quantile(double alpha) {
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::invalid_argument, "alpha must lie in (0,1)");
  auto f = [alpha](double c) { return kolmogorov_survival(c) - alpha; };
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(f, 0.1, 10.0, boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (r.first + r.second);
}

double ks_critical_value(Index n, Index m, double alpha) {
  const double nd = static_cast<double>(n), md = static_cast<double>(m);
  return kolmogorov_quantile(alpha) * std::sqrt((nd + md) / (nd * md));
}

double ks_two_sample_pvalue(double d, Index n, Index m) {
  const double ne = static_cast<double>(n) * static_cast<double>(m) / static_cast<double>(n + m);
  const double s = std::sqrt(ne);
  return kolmogorov_survival((s + 0.12 + 0.11 / s) * d);
}

void Moments::add(double x) {
  ++count;
  const double delta = x - mean;
  mean += delta / static_cast<double>(count);
  m2 += delta * (x - mean);
}

void Moments::merge(const Moments& other) {
  if (other.count == 0) return;
  if (count == 0) {
    *this = other;
    return;
  }
  const double n = static_cast<double>(count + other.count);
  const double delta = other.mean - mean;
  mean += delta * static_cast<double>(other.count) / n;
  m2 += other.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(other.count) / n;
  count += other.count;
}

double Moments::stderr_mean() const {
  return count > 1 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
}

double mean(std::span<const double> x) {
  require(!x.empty(), ErrorCode::invalid_argument, "empty sample");
  return linalg::pairwise_sum(x) / static_cast<double>(x.size());
}

double quantile(std::vector<double> x, double q) {
  require(!x.empty(), ErrorCode::invalid_argument, "empty sample");
  std::sort(x.begin(), x.end());
  const double pos = q * static_cast<double>(x.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (pos - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

double median(std::vector<double> x) { return quantile(std::move(x), 0.5); }

}  // namespace rmt::stats
