#include "rmt/locallaw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rmt {

double phi_n(Index n) {
  require(n >= 3, ErrorCode::invalid_argument, "phi_N needs N >= 3");
  const double l = std::log(static_cast<double>(n));
  return std::exp(8.0 * std::log(l) * std::log(l)) / static_cast<double>(n);
}

double ladder_factor(Index n) {
  require(n >= 2, ErrorCode::invalid_argument, "ladder factor needs N >= 2");
  const double l = std::log(static_cast<double>(n));
  return 1.0 + 1.0 / (l * l);
}

SpectralDomainGrid build_grid(Index n, double kappa, Index energy_count, EtaFloor mode, double eta_min) {
  require(kappa > 0.0 && kappa < 1.0, ErrorCode::invalid_argument, "kappa must lie in (0,1)");
  require(energy_count >= 1, ErrorCode::invalid_argument, "energy_count must be at least 1");
  SpectralDomainGrid g;
  g.n = n;
  g.kappa = kappa;
  g.ladder_factor = ladder_factor(n);
  if (mode == EtaFloor::phi_n) {
    const double phi = phi_n(n);
    if (eta_min > 0.0)
      require(eta_min >= phi, ErrorCode::empty_domain, "eta_min is below phi_N");
    g.eta_floor = std::max(phi, eta_min);
  } else {
    require(eta_min > 0.0, ErrorCode::invalid_argument, "explicit eta_min must be positive");
    g.eta_floor = eta_min;
  }
  if (g.eta_floor > 5.0)
    throw Error(ErrorCode::empty_domain,
                "eta floor " + std::to_string(g.eta_floor) + " exceeds 5; the spectral domain is empty");

  const double lo = kappa - 2.0, hi = 2.0 - kappa;
  if (energy_count == 1) {
    g.energies.push_back(0.5 * (lo + hi));
  } else {
    for (Index k = 0; k < energy_count; ++k)
      g.energies.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(energy_count - 1));
  }
  const double log_f = std::log(g.ladder_factor);
  for (Index k = 0;; ++k) {
    const double eta = 5.0 * std::exp(-static_cast<double>(k) * log_f);
    if (eta < g.eta_floor) break;
    g.etas.push_back(eta);
  }
  return g;
}

Index rung_count(Index n, double eta0, double c) {
  return static_cast<Index>(std::ceil(std::log(eta0 * static_cast<double>(n) / c) / std::log(ladder_factor(n))));
}

double EnvelopeConstants::operator()(Index n, double eta, double eps) const {
  const double nd = static_cast<double>(n);
  return C * std::pow(std::log(nd), xi) * (1.0 / std::sqrt(nd * eta) + std::pow(nd, -c * eps));
}

EnvelopeConstants fit_envelope(const std::vector<EnvelopeObservation>& obs, double eps, double c, double xi,
                               double margin) {
  require(!obs.empty(), ErrorCode::insufficient_replicas, "no calibration observations");
  EnvelopeConstants unit{1.0, c, xi};
  double worst = 0.0;
  for (const auto& o : obs) worst = std::max(worst, o.error / unit(o.n, o.eta, eps));
  return {worst * (1.0 + margin), c, xi};
}

// ---------------------------------------------------------------------------
// Local law

namespace {

double max_entry_error(const ComplexMatrix& g, Complex m, const std::vector<Index>& rows) {
  double worst = 0.0;
  for (Index i : rows) {
    const auto ii = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      const Complex target = (j == ii) ? m : Complex(0.0);
      worst = std::max(worst, std::abs(g(ii, j) - target));
    }
  }
  return worst;
}

}  // namespace

LocalLawReport verify_local_law(const RealMatrix& h, const SpectralDomainGrid& grid, const LocalLawOptions& options) {
  const auto n = static_cast<Index>(h.rows());
  require(grid.n == n, ErrorCode::dimension_mismatch, "grid was built for a different N");
  const bool entries = options.entry_stride > 0;
  const linalg::EigenSystem es = linalg::symmetric_eigen(h, entries);
  const std::span<const double> lambda(es.values.data(), static_cast<std::size_t>(es.values.size()));

  IndexClassification cls;
  if (options.label != nullptr) {
    cls = classify(*options.label);
  } else {
    cls = classify(label_of(h, options.eps));
  }

  LocalLawReport report;
  report.n = n;
  report.envelope = options.envelope;
  Index covered = 0;
  for (double e : grid.energies) {
    for (std::size_t k = 0; k < grid.etas.size(); ++k) {
      const Complex z(e, grid.etas[k]);
      LocalLawPoint p;
      p.energy = e;
      p.eta = grid.etas[k];
      const Complex msc = m_sc(z);
      p.abs_mn_minus_msc = std::abs(linalg::stieltjes(lambda, z) - msc);
      p.deviant_count = cls.deviant.size();
      if (entries && k % options.entry_stride == 0) {
        const ComplexMatrix g = linalg::spectral_resolvent(es, z);
        p.max_abs_g = g.cwiseAbs().maxCoeff();
        p.max_typical_entry_err = max_entry_error(g, msc, cls.typical);
      }
      if (options.envelope) p.covered = p.abs_mn_minus_msc <= (*options.envelope)(n, p.eta, options.eps);
      covered += p.covered;
      report.points.push_back(p);
    }
  }
  report.coverage = report.points.empty() ? 1.0 : static_cast<double>(covered) / static_cast<double>(report.points.size());
  report.pass = !options.envelope || report.coverage >= options.coverage_required;
  return report;
}

LocalLawReport verify_local_law(const WignerSample& sample, const SpectralDomainGrid& grid,
                                const LocalLawOptions& options) {
  LocalLawOptions opts = options;
  if (sample.profile) opts.eps = sample.profile->constants.eps;
  LocalLawReport r = verify_local_law(sample.h, grid, opts);
  r.seed = sample.seed;
  return r;
}

// ---------------------------------------------------------------------------
// Entrywise

EntrywiseReport verify_entrywise(const ResolventFrame& frame, const ABLabel& label) {
  require(label.n() == frame.size(), ErrorCode::dimension_mismatch, "label and frame sizes differ");
  const IndexClassification cls = classify(label);
  EntrywiseReport r;
  r.z = frame.z;
  r.max_abs_g = frame.g.cwiseAbs().maxCoeff();
  r.max_typical_err = max_entry_error(frame.g, frame.m_sc, cls.typical);
  r.max_deviant_err = max_entry_error(frame.g, frame.m_sc, cls.deviant);
  for (Index i : cls.deviant)
    for (Index j : cls.deviant)
      r.max_deviant_block =
          std::max(r.max_deviant_block, std::abs(frame.g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
  r.deviant_count = cls.deviant.size();
  r.deviant_limit = std::pow(static_cast<double>(label.n()), 1.0 - label.eps() / 20.0);
  r.deviant_below_limit = static_cast<double>(r.deviant_count) < r.deviant_limit;
  return r;
}

EntrywiseReport verify_entrywise(const RealMatrix& h, const ABLabel& label, Complex z) {
  return verify_entrywise(resolvent(h, z), label);
}

std::vector<EntrywiseReport> verify_entrywise(const WignerSample& sample, const ABLabel& label,
                                              const std::vector<Complex>& points) {
  std::vector<EntrywiseReport> out;
  for (const Complex& z : points) out.push_back(verify_entrywise(sample.h, label, z));
  return out;
}

// ---------------------------------------------------------------------------
// Delocalization

DelocalizationReport verify_delocalization(const SpectrumSummary& spec, double kappa, double xi,
                                           std::optional<double> constant) {
  require(spec.vectors.size() > 0, ErrorCode::invalid_argument, "eigenvectors required");
  const Index n = spec.n();
  DelocalizationReport r;
  r.n = n;
  r.xi = xi;
  r.constant = constant;
  if (n < 2) return r;  // log N = 0; no bulk statistic is defined
  const double nd = static_cast<double>(n);
  const double scale = std::sqrt(nd) / std::pow(std::log(nd), xi);
  for (Eigen::Index k = 0; k < spec.eigenvalues.size(); ++k) {
    const double l = spec.eigenvalues[k];
    if (l < kappa - 2.0 || l > 2.0 - kappa) continue;
    ++r.bulk_count;
    r.bulk_max = std::max(r.bulk_max, scale * spec.vectors.col(k).cwiseAbs().maxCoeff());
  }
  r.top_edge = scale * spec.vectors.col(spec.eigenvalues.size() - 1).cwiseAbs().maxCoeff();
  if (constant) r.pass = r.bulk_max < *constant;
  return r;
}

DelocalizationReport verify_delocalization(const WignerSample& sample, double kappa, double xi,
                                           std::optional<double> constant) {
  return verify_delocalization(eigendecompose(sample, true), kappa, xi, constant);
}

// ---------------------------------------------------------------------------
// Ladder

LadderReport multiscale_ladder_diagnostic(const linalg::EigenSystem& es, const VarianceProfile& profile,
                                          const ABLabel& label, const SpectralDomainGrid& grid,
                                          const LadderOptions& options) {
  const Index n = profile.n;
  require(grid.n == n && label.n() == n && static_cast<Index>(es.values.size()) == n,
          ErrorCode::dimension_mismatch, "grid, label, profile and spectrum must share N");
  require(es.vectors.size() > 0, ErrorCode::invalid_argument, "eigenvectors required");
  const IndexClassification cls = classify(label);
  const RealMatrix weights = es.vectors.cwiseAbs2();  // G_ii = sum_k V_ik^2 / (lambda_k - z)
  const double nd = static_cast<double>(n);
  const double log_n = std::log(nd);

  LadderReport report;
  report.energy = options.energy;
  ComplexVector prev;
  double prev_eta = 0.0;
  for (double eta : grid.etas) {
    const Complex z(options.energy, eta);
    RealVector re(n), im(n);
    for (Eigen::Index k = 0; k < es.values.size(); ++k) {
      const Complex d = 1.0 / (es.values[k] - z);
      re[k] = d.real();
      im[k] = d.imag();
    }
    ComplexVector diag(n);
    diag.real() = weights * re;
    diag.imag() = weights * im;

    LadderRung rung;
    rung.eta = eta;
    const Complex m = m_sc(z);
    for (Index i : cls.typical) rung.max_typical_v = std::max(rung.max_typical_v, std::abs(diag[static_cast<Eigen::Index>(i)] - m));
    rung.max_gamma = gamma_from_diagonal(profile, diag, z).cwiseAbs().maxCoeff();
    rung.envelope = options.envelope.C * std::pow(log_n, 3.0 * options.envelope.xi) *
                    (1.0 / std::sqrt(nd * eta) + std::pow(nd, -options.eps / 20.0));
    rung.within_envelope = rung.max_typical_v <= rung.envelope;

    if (prev.size() > 0) {
      const double eta_prime = prev_eta - eta;
      const double slack = 1e-9;
      rung.continuity_violation = -std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < diag.size(); ++j) {
        const double lhs = std::abs(prev[j] - diag[j]);
        const double rhs = eta_prime / (2.0 * eta) * (std::abs(prev[j].imag()) + std::abs(diag[j].imag()));
        rung.continuity_violation = std::max(rung.continuity_violation, lhs - rhs);
        const double a = std::abs(prev[j]), b = std::abs(diag[j]);
        rung.min_ratio = std::min(rung.min_ratio, std::min(a, b) / std::max(a, b));
      }
      rung.continuity_ok =
          rung.continuity_violation <= slack && rung.min_ratio >= 1.0 - eta_prime / eta - slack;
    }
    report.envelope_holds = report.envelope_holds && rung.within_envelope;
    report.continuity_holds = report.continuity_holds && rung.continuity_ok;
    report.rungs.push_back(rung);
    prev = diag;
    prev_eta = eta;
  }
  return report;
}

LadderReport multiscale_ladder_diagnostic(const WignerSample& sample, const ABLabel& label,
                                          const SpectralDomainGrid& grid, const LadderOptions& options) {
  require(sample.profile != nullptr, ErrorCode::invalid_argument, "sample has no profile");
  const linalg::EigenSystem es = linalg::symmetric_eigen(sample.h, true);
  return multiscale_ladder_diagnostic(es, *sample.profile, label, grid, options);
}

}  // namespace rmt
