#include "rmt/resolvent.hpp"

#include <algorithm>
#include <cmath>

#include "rmt/linalg.hpp"

namespace rmt {

Complex m_sc(Complex z) {
  require(z.imag() > 0.0, ErrorCode::invalid_argument, "m_sc needs Im z > 0");
  Complex s = std::sqrt(z * z - 4.0);
  if (std::abs(z + s) < std::abs(z - s)) s = -s;
  const Complex big = -(z + s) / 2.0;  // larger root in modulus; roots multiply to 1
  const Complex small = 1.0 / big;
  return big.imag() > 0.0 ? big : small;
}

double quadratic_residual(Complex z, Complex m) { return std::abs(m * m + z * m + 1.0); }

namespace {

Complex trace_mean(const ComplexMatrix& g) {
  std::vector<Complex> d(static_cast<std::size_t>(g.rows()));
  for (Eigen::Index k = 0; k < g.rows(); ++k) d[static_cast<std::size_t>(k)] = g(k, k);
  return linalg::pairwise_sum(std::span<const Complex>(d)) / static_cast<double>(g.rows());
}

ResolventFrame make_frame(const RealMatrix& h, Complex z, std::vector<Index> indices) {
  require(z.imag() > 0.0, ErrorCode::invalid_argument, "resolvent needs Im z > 0");
  require(h.rows() > 0, ErrorCode::invalid_argument, "empty matrix");
  ResolventFrame f;
  f.z = z;
  f.g = linalg::shifted_inverse(h, z);
  f.m_n = trace_mean(f.g);
  f.m_sc = m_sc(z);
  f.indices = std::move(indices);
  return f;
}

}  // namespace

ResolventFrame resolvent(const RealMatrix& h, Complex z) {
  std::vector<Index> all(static_cast<std::size_t>(h.rows()));
  for (Index k = 0; k < all.size(); ++k) all[k] = k;
  return make_frame(h, z, std::move(all));
}

ResolventFrame resolvent(const WignerSample& sample, Complex z) {
  ResolventFrame f = resolvent(sample.h, z);
  f.source_seed = sample.seed;
  return f;
}

ResolventFrame minor(const RealMatrix& h, std::span<const Index> removed, Complex z) {
  const auto n = static_cast<Index>(h.rows());
  std::vector<Index> keep = linalg::complement(n, removed);
  require(!keep.empty(), ErrorCode::invalid_argument, "cannot remove every index");
  if (keep.size() == n) return resolvent(h, z);
  RealMatrix sub = linalg::principal_submatrix(h, keep);
  return make_frame(sub, z, std::move(keep));
}

double ward_residual(const ResolventFrame& frame) {
  const double eta = frame.eta();
  double worst = 0.0;
  for (Eigen::Index j = 0; j < frame.g.rows(); ++j) {
    const double lhs = frame.g.row(j).squaredNorm();
    const double rhs = frame.g(j, j).imag() / eta;
    worst = std::max(worst, std::abs(lhs - rhs) / rhs);
  }
  return worst;
}

double deterministic_bound_ratio(const ResolventFrame& frame) { return frame.g.cwiseAbs().maxCoeff() * frame.eta(); }

double minor_identity_residual(const ResolventFrame& full, const ResolventFrame& minor_i, Index i) {
  const auto ii = static_cast<Eigen::Index>(i);
  const Complex gii = full.g(ii, ii);
  double worst = 0.0;
  for (Index b = 0; b < minor_i.indices.size(); ++b) {
    const auto j = static_cast<Eigen::Index>(minor_i.indices[b]);
    for (Index a = 0; a < minor_i.indices.size(); ++a) {
      const auto k = static_cast<Eigen::Index>(minor_i.indices[a]);
      const Complex rhs = minor_i.g(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +
                          full.g(k, ii) * full.g(ii, j) / gii;
      worst = std::max(worst, std::abs(full.g(k, j) - rhs));
    }
  }
  return worst / full.g.cwiseAbs().maxCoeff();
}

namespace {

ComplexVector row_without(const RealMatrix& h, Index i, const std::vector<Index>& keep) {
  ComplexVector out(static_cast<Eigen::Index>(keep.size()));
  for (Index a = 0; a < keep.size(); ++a)
    out[static_cast<Eigen::Index>(a)] = h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(keep[a]));
  return out;
}

}  // namespace

double schur_residual(const RealMatrix& h, const ResolventFrame& full, const ResolventFrame& minor_i, Index i) {
  const auto ii = static_cast<Eigen::Index>(i);
  const ComplexVector hi = row_without(h, i, minor_i.indices);
  const Complex q = hi.transpose() * minor_i.g * hi;
  const Complex lhs = 1.0 / full.g(ii, ii);
  const Complex rhs = h(ii, ii) - full.z - q;
  return std::abs(lhs - rhs) / std::abs(lhs);
}

double resolvent_identity_residual(const ResolventFrame& g1, const ResolventFrame& g2) {
  const ComplexMatrix lhs = g1.g - g2.g;
  const ComplexMatrix rhs = (g1.z - g2.z) * (g1.g * g2.g);
  const double scale = std::abs(g1.z - g2.z) * g1.g.cwiseAbs().maxCoeff() * g2.g.cwiseAbs().maxCoeff() *
                       static_cast<double>(g1.g.rows());
  return (lhs - rhs).cwiseAbs().maxCoeff() / std::max(scale, 1e-300);
}

// ---------------------------------------------------------------------------
// Schur decomposition

SchurTerms schur_terms(const RealMatrix& h, const VarianceProfile& profile, Index i, const ResolventFrame& full,
                       const ResolventFrame& minor_i) {
  const auto n = static_cast<Index>(h.rows());
  require(i < n, ErrorCode::invalid_argument, "index " + std::to_string(i) + " out of range");
  require(profile.n == n, ErrorCode::dimension_mismatch, "profile and matrix sizes differ");
  const auto ii = static_cast<Eigen::Index>(i);
  const Complex m = full.m_sc;
  const std::vector<Index>& keep = minor_i.indices;
  const ComplexVector hi = row_without(h, i, keep);

  SchurTerms t;
  t.i = i;
  t.h_ii = h(ii, ii);
  t.quadratic_form = hi.transpose() * minor_i.g * hi;

  Complex diag_part = 0.0;
  Complex e = 0.0, d = 0.0, mm = 0.0;
  double s_minor = 0.0;
  for (Index a = 0; a < keep.size(); ++a) {
    const auto aa = static_cast<Eigen::Index>(a);
    const auto j = static_cast<Eigen::Index>(keep[a]);
    const double hij = h(ii, j);
    const double sij = profile.s(ii, j);
    const Complex gm = minor_i.g(aa, aa);
    const Complex gj = full.g(j, j);
    diag_part += hij * hij * gm;
    e += (hij * hij - sij) * gm;
    d += sij * (gm - gj);
    mm += sij * (gj - m);
    s_minor += sij;
  }
  t.f = t.quadratic_form - diag_part;
  t.e = e;
  t.d = d;
  t.m = mm;
  t.t_i = profile.row_defect(i);
  t.t_i_minor = s_minor - 1.0;
  t.gamma = t.f + t.e + t.d - t.h_ii + m * t.t_i;
  t.gamma_exact = t.f + t.e + t.d - t.h_ii + m * t.t_i_minor;
  t.v = full.g(ii, ii) - m;

  const Complex recon = t.f + t.e + t.d + t.m + m * s_minor;
  t.decomposition_residual = std::abs(t.quadratic_form - recon) / std::max(1.0, std::abs(t.quadratic_form));

  const Complex lhs = t.v / (1.0 + t.v / m) - m * m * mm;
  const Complex rhs = m * m * t.gamma_exact;
  t.self_consistent_residual = std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});

  const double sii = profile.s(ii, ii);
  const Complex lhs_full = lhs - m * m * sii * t.v;
  t.bookkeeping_gap = lhs_full - m * m * t.gamma;
  return t;
}

SchurTerms schur_terms(const RealMatrix& h, const VarianceProfile& profile, Index i, Complex z) {
  require(i < static_cast<Index>(h.rows()), ErrorCode::invalid_argument, "index out of range");
  const ResolventFrame full = resolvent(h, z);
  const Index removed[] = {i};
  const ResolventFrame mi = minor(h, removed, z);
  return schur_terms(h, profile, i, full, mi);
}

SchurTerms schur_terms(const WignerSample& sample, Index i, Complex z) {
  require(sample.profile != nullptr, ErrorCode::invalid_argument, "sample has no profile");
  return schur_terms(sample.h, *sample.profile, i, z);
}

ComplexVector gamma_from_diagonal(const VarianceProfile& profile, const ComplexVector& g_diag, Complex z) {
  require(static_cast<Index>(g_diag.size()) == profile.n, ErrorCode::dimension_mismatch,
          "diagonal and profile sizes differ");
  const Complex m = m_sc(z);
  const ComplexVector v = g_diag.array() - m;
  const ComplexVector sv = profile.s.cast<Complex>() * v;
  ComplexVector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double sii = profile.s(i, i);
    const Complex sv_minor = sv[i] - sii * v[i];
    const Complex gamma_exact = (v[i] / (1.0 + v[i] / m) - m * m * sv_minor) / (m * m);
    out[i] = gamma_exact + m * sii;
  }
  return out;
}

double stability_norm(const VarianceProfile& profile, Complex z, double kappa, std::span<const Index> subset) {
  if (kappa > 0.0)
    require(z.real() > kappa - 2.0 && z.real() < 2.0 - kappa, ErrorCode::invalid_argument,
            "Re z outside the bulk window");
  const Complex m = m_sc(z);
  RealMatrix s;
  if (subset.empty()) {
    s = profile.s;
  } else {
    s = linalg::principal_submatrix(profile.s, subset);
  }
  const Eigen::Index k = s.rows();
  ComplexMatrix a = ComplexMatrix::Identity(k, k) - (m * m) * s.cast<Complex>();
  Eigen::PartialPivLU<ComplexMatrix> lu(a);
  const ComplexMatrix inv = lu.inverse();
  if (!inv.allFinite() || lu.rcond() < 1e-14)
    throw Error(ErrorCode::singular_stability, "I - m^2 S is numerically singular");
  return inv.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace rmt
