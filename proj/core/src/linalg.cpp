#include "rmt/linalg.hpp"

#include <algorithm>
#include <string>

// With RMT_USE_LAPACKE the LAPACKE prototypes come from Eigen (EIGEN_USE_LAPACKE).

namespace rmt::linalg {

EigenSystem symmetric_eigen(const RealMatrix& h, bool with_vectors) {
  require(h.rows() == h.cols(), ErrorCode::dimension_mismatch, "eigensolver needs a square matrix");
  EigenSystem out;
  if (h.rows() == 0) return out;
#ifdef RMT_USE_LAPACKE
  const auto n = static_cast<lapack_int>(h.rows());
  out.values.resize(n);
  RealMatrix a = h;  // column-major, overwritten by eigenvectors
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, with_vectors ? 'V' : 'N', 'L', n,
                                         a.data(), n, out.values.data());
  require(info == 0, ErrorCode::convergence, "dsyevd failed with info=" + std::to_string(info));
  if (with_vectors) out.vectors = std::move(a);
#else
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(h, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, ErrorCode::convergence, "symmetric eigensolver did not converge");
  out.values = es.eigenvalues();
  if (with_vectors) out.vectors = es.eigenvectors();
#endif
  return out;
}

RealVector symmetric_eigenvalues(const RealMatrix& h) { return symmetric_eigen(h, false).values; }

ComplexMatrix shifted_inverse(const RealMatrix& h, Complex z) {
  const Eigen::Index n = h.rows();
  ComplexMatrix a = h.cast<Complex>();
  a.diagonal().array() -= z;
  Eigen::PartialPivLU<ComplexMatrix> lu(a);
  ComplexMatrix g = lu.inverse();
  require(g.allFinite(), ErrorCode::singular_solve, "resolvent solve produced non-finite entries");
  (void)n;
  return g;
}

ComplexMatrix spectral_resolvent(const EigenSystem& es, Complex z) {
  require(es.vectors.size() > 0, ErrorCode::invalid_argument, "eigenvectors required");
  const Eigen::Index n = es.values.size();
  RealVector re(n), im(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex d = 1.0 / (es.values[k] - z);
    re[k] = d.real();
    im[k] = d.imag();
  }
  const RealMatrix g_re = es.vectors * re.asDiagonal() * es.vectors.transpose();
  const RealMatrix g_im = es.vectors * im.asDiagonal() * es.vectors.transpose();
  ComplexMatrix g(n, n);
  g.real() = g_re;
  g.imag() = g_im;
  return g;
}

ComplexVector spectral_resolvent_diagonal(const EigenSystem& es, Complex z) {
  require(es.vectors.size() > 0, ErrorCode::invalid_argument, "eigenvectors required");
  const Eigen::Index n = es.values.size();
  ComplexVector d(n);
  for (Eigen::Index k = 0; k < n; ++k) d[k] = 1.0 / (es.values[k] - z);
  ComplexVector out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Complex acc = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double v = es.vectors(i, k);
      acc += v * v * d[k];
    }
    out[i] = acc;
  }
  return out;
}

namespace {

template <class T>
T pairwise(std::span<const T> v) {
  if (v.size() <= 16) {
    T acc{};
    for (const T& x : v) acc += x;
    return acc;
  }
  const std::size_t half = v.size() / 2;
  return pairwise(v.first(half)) + pairwise(v.subspan(half));
}

}  // namespace

double pairwise_sum(std::span<const double> values) { return pairwise(values); }
Complex pairwise_sum(std::span<const Complex> values) { return pairwise(values); }

Complex stieltjes(std::span<const double> eigenvalues, Complex z) {
  std::vector<Complex> terms(eigenvalues.size());
  std::transform(eigenvalues.begin(), eigenvalues.end(), terms.begin(),
                 [z](double l) { return 1.0 / (l - z); });
  return pairwise_sum(std::span<const Complex>(terms)) / static_cast<double>(eigenvalues.size());
}

RealMatrix principal_submatrix(const RealMatrix& h, std::span<const Index> keep) {
  const auto m = static_cast<Eigen::Index>(keep.size());
  RealMatrix out(m, m);
  for (Eigen::Index b = 0; b < m; ++b)
    for (Eigen::Index a = 0; a < m; ++a)
      out(a, b) = h(static_cast<Eigen::Index>(keep[a]), static_cast<Eigen::Index>(keep[b]));
  return out;
}

std::vector<Index> complement(Index n, std::span<const Index> removed) {
  std::vector<bool> drop(n, false);
  for (Index r : removed) {
    require(r < n, ErrorCode::invalid_argument, "index out of range");
    drop[r] = true;
  }
  std::vector<Index> keep;
  keep.reserve(n);
  for (Index i = 0; i < n; ++i)
    if (!drop[i]) keep.push_back(i);
  return keep;
}

}  // namespace rmt::linalg
