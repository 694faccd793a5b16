#pragma once

#include <span>
#include <vector>

#include "rmt/common.hpp"

namespace rmt::linalg {

struct EigenSystem {
  RealVector values;   // ascending
  RealMatrix vectors;  // column k pairs with values[k]; empty when not requested
};

// Dense symmetric eigensolver (Eigen, or LAPACK dsyevd with RMT_USE_LAPACKE). Only the lower
// triangle of `h` is referenced. Throws ErrorCode::convergence on failure.
EigenSystem symmetric_eigen(const RealMatrix& h, bool with_vectors);

RealVector symmetric_eigenvalues(const RealMatrix& h);

// (h - z)^{-1} by partial-pivoting LU on the complex shifted matrix.
ComplexMatrix shifted_inverse(const RealMatrix& h, Complex z);

// Resolvent entries G = V diag(1/(lambda - z)) V^T from an eigensystem.
ComplexMatrix spectral_resolvent(const EigenSystem& es, Complex z);

// Diagonal of the spectral resolvent only, O(N^2).
ComplexVector spectral_resolvent_diagonal(const EigenSystem& es, Complex z);

// N^{-1} sum_k 1/(lambda_k - z) with a fixed pairwise summation order.
Complex stieltjes(std::span<const double> eigenvalues, Complex z);

// Fixed-order pairwise summation.
double pairwise_sum(std::span<const double> values);
Complex pairwise_sum(std::span<const Complex> values);

RealMatrix principal_submatrix(const RealMatrix& h, std::span<const Index> keep);

// Indices of [0, n) not contained in `removed`.
std::vector<Index> complement(Index n, std::span<const Index> removed);

}  // namespace rmt::linalg
