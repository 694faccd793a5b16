#pragma once

#include <span>
#include <vector>

#include "rmt/ensemble.hpp"

namespace rmt {

/// Stieltjes transform of the semicircle: the root of m^2 + z m + 1 = 0
/// with Im m > 0. Requires Im z > 0.
Complex m_sc(Complex z);

struct ResolventFrame {
  Complex z;
  ComplexMatrix g;
  Complex m_n;
  Complex m_sc;
  std::vector<Index> indices;  // rows of the source matrix kept in this frame
  Seed source_seed = 0;

  double eta() const { return z.imag(); }
  Index size() const { return static_cast<Index>(g.rows()); }
};

ResolventFrame resolvent(const RealMatrix& h, Complex z);
ResolventFrame resolvent(const WignerSample& sample, Complex z);

/// Resolvent of h with the rows and columns in `removed` deleted. Indices in
/// the frame refer to the original matrix through `indices`.
ResolventFrame minor(const RealMatrix& h, std::span<const Index> removed, Complex z);

// Identity residuals. All are relative and return 0 for an exact match.

// max_j |sum_k |G_jk|^2 - Im G_jj / eta| / (Im G_jj / eta)
double ward_residual(const ResolventFrame& frame);

// max_ij |G_ij| * eta; strictly below 1 for any resolvent.
double deterministic_bound_ratio(const ResolventFrame& frame);

// max over (k, j) != i of |G_kj - G^(i)_kj - G_ki G_ij / G_ii|, relative to max |G|.
double minor_identity_residual(const ResolventFrame& full, const ResolventFrame& minor_i, Index i);

// |1/G_ii - (h_ii - z - sum_{j,k != i} h_ij G^(i)_jk h_ki)| / |1/G_ii|
double schur_residual(const RealMatrix& h, const ResolventFrame& full, const ResolventFrame& minor_i, Index i);

// A^{-1} - B^{-1} = (z1 - z2) A^{-1} B^{-1} for A = H - z1, B = H - z2.
double resolvent_identity_residual(const ResolventFrame& g1, const ResolventFrame& g2);

// |m^2 + z m + 1|
double quadratic_residual(Complex z, Complex m);

/// Schur-complement decomposition at index i.
///
///   F = sum_{j != k} h_ij G^(i)_jk h_ki
///   E = sum_j (h_ij^2 - s_ij) G^(i)_jj
///   D = sum_j s_ij (G^(i)_jj - G_jj)
///   M = sum_j s_ij (G_jj - m)
///
/// with all sums over j, k != i, so that the quadratic form equals
/// F + E + D + M + m sum_{j != i} s_ij exactly.
struct SchurTerms {
  Index i = 0;
  Complex f, e, d, m;
  double h_ii = 0.0;
  double t_i = 0.0;        // sum_j s_ij - 1
  double t_i_minor = 0.0;  // sum_{j != i} s_ij - 1
  Complex gamma;           // F + E + D - h_ii + m_sc t_i
  Complex gamma_exact;     // F + E + D - h_ii + m_sc t_i_minor
  Complex v;               // G_ii - m_sc
  Complex quadratic_form;  // sum_{j,k != i} h_ij G^(i)_jk h_ki

  // |quadratic_form - (F + E + D + M + m sum_{j != i} s_ij)| / max(1, |quadratic_form|)
  double decomposition_residual = 0.0;
  // v_i / (1 + v_i/m) - m^2 sum_{j != i} s_ij v_j - m^2 gamma_exact, relative
  double self_consistent_residual = 0.0;
  // Same left side with the full sum over j and gamma in place of gamma_exact.
  // Equals -m^2 s_ii G_ii; O(1/N).
  Complex bookkeeping_gap;
};

SchurTerms schur_terms(const RealMatrix& h, const VarianceProfile& profile, Index i, Complex z);
SchurTerms schur_terms(const RealMatrix& h, const VarianceProfile& profile, Index i, const ResolventFrame& full,
                       const ResolventFrame& minor_i);
SchurTerms schur_terms(const WignerSample& sample, Index i, Complex z);

/// Gamma_i for every index from diag(G) alone, using the self-consistent
/// identity solved for Gamma. O(N^2); no minors needed.
ComplexVector gamma_from_diagonal(const VarianceProfile& profile, const ComplexVector& g_diag, Complex z);

/// ||(I - m_sc^2 S~)^{-1}||_inf with S~ the profile restricted to `subset`
/// (all indices when empty). kappa > 0 enforces Re z in (kappa - 2, 2 - kappa).
double stability_norm(const VarianceProfile& profile, Complex z, double kappa = 0.0,
                      std::span<const Index> subset = {});

}  // namespace rmt
