#pragma once

#include <vector>

#include "rmt/ensemble.hpp"

namespace rmt {

struct FlowState {
  double t = 0.0;
  WignerSample sample;
};

/// Exact OU transition of dh = N^{-1/2} dB - (2 N s_ij)^{-1} h dt over `dt`:
/// h <- e^{-dt/(2 N s)} h + sqrt(s (1 - e^{-dt/(N s)})) g, entrywise for i <= j.
FlowState ou_evolve(const FlowState& state, double dt, Seed seed);

/// H_t = h1 + sqrt(s) GOE in law, with
///   h1_ij = e^{-t/(2 N s_ij)} h_ij + independent Gaussian noise,
///   r = N min s_ij, s = r (1 - e^{-t/r}) / 2.
struct DivisibleDecomposition {
  double t = 0.0;
  WignerSample h1;
  double s = 0.0;
  double r = 0.0;
  double min_noise_variance = 0.0;

  // h1 + sqrt(s) * goe
  RealMatrix compose(const RealMatrix& goe) const;
};

DivisibleDecomposition gaussian_divisible_split(const WignerSample& sample, double t, Seed seed);

// Variance of the Gaussian noise added to h1_ij; negative values mean the
// split does not exist.
double split_noise_variance(Index n, double s_ij, double r, double t, bool diagonal);

/// Semicircle quantiles gamma_i (i = 1..n) solving F_sc(gamma_i) = i/n.
std::vector<double> classical_locations(Index n);

// Quantile of the semicircle at level p in [0,1].
double semicircle_quantile(double p);

/// Free convolution of an empirical spectrum with a semicircle of variance s:
/// m(z) = m_base(z + s m(z)).
class FreeConvolution {
 public:
  FreeConvolution(std::vector<double> base, double s);

  // Solves the fixed point at z (Im z > 0) by damped iteration at eta = 1
  // followed by Newton continuation down to Im z.
  Complex stieltjes(Complex z) const;
  // |m - m_base(z + s m)|
  double residual(Complex z, Complex m) const;

  double density(double energy, double eta = 1e-6) const;

  // Support bracket [min base - 2 sqrt(s), max base + 2 sqrt(s)].
  double lower() const;
  double upper() const;

  /// gamma^(s)_i for i = 1..n from the trapezoid CDF on `grid_points` points.
  std::vector<double> quantiles(Index n, Index grid_points = 4000) const;

  Complex base_stieltjes(Complex w) const;

 private:
  std::vector<double> base_;
  double s_;
};

std::vector<double> free_convolution_quantiles(const std::vector<double>& base, double s, Index n,
                                               Index grid_points = 4000);

}  // namespace rmt
