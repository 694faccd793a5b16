#pragma once

#include <functional>
#include <span>
#include <vector>

#include "rmt/common.hpp"

namespace rmt::stats {

// sup_x |F_n(x) - cdf(x)| for an ascending sample.
double ks_one_sample(std::span<const double> sorted, const std::function<double(double)>& cdf);

// sup_x |F_a(x) - F_b(x)|; inputs need not be sorted.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// P[K > lambda] for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

// Inverse of kolmogorov_survival: the c with P[K > c] = alpha.
double kolmogorov_quantile(double alpha);

// Asymptotic two-sample critical value c(alpha) sqrt((n + m) / (n m)).
double ks_critical_value(Index n, Index m, double alpha);

// Asymptotic p-value with the Stephens small-sample correction.
double ks_two_sample_pvalue(double d, Index n, Index m);

// Running mean / variance (Welford), mergeable.
struct Moments {
  Index count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x);
  void merge(const Moments& other);
  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  double stderr_mean() const;
};

double mean(std::span<const double> x);
double median(std::vector<double> x);
double quantile(std::vector<double> x, double q);

}  // namespace rmt::stats
