#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rmt/labels.hpp"
#include "rmt/resolvent.hpp"

namespace rmt {

enum class DeviationForm { linear, diagonal, quadratic, bilinear };
std::string to_string(DeviationForm f);
DeviationForm deviation_form_from_string(const std::string& name);

/// Law of the scalars X_j (and Y_j). gaussian: N(0, 1/N). truncated: the
/// entry law with variance 1/N conditioned on |X| < 1/q.
struct ScalarLaw {
  enum class Kind { gaussian, truncated };
  Kind kind = Kind::gaussian;
  EntryLaw entry = EntryLaw::student_t(2.6);

  static ScalarLaw gaussian() { return {}; }
  static ScalarLaw truncated(const EntryLaw& law) { return {Kind::truncated, law}; }
  std::string describe() const;
};

struct DeviationCheckConfig {
  Index n = 500;
  double q = 0.0;  // 0 selects q = N^{eps/10}
  double eps = 0.5;
  std::vector<double> xi = {2.0, 3.0};
  double delta = 0.5;
  double C = 2.0;
  double C_prime = 2.0;
  DeviationForm form = DeviationForm::linear;
  Index replicas = 100000;
  double nu = 1.0;

  double q_value() const;
};

/// Coefficients R. Dense, or low rank R = U V^T so that every form costs
/// O(N k) per replica. `diag` holds R_ii, which is also the coefficient
/// vector of the linear and diagonal forms.
struct Coefficients {
  std::optional<RealMatrix> dense;
  RealMatrix u, v;  // N x k
  RealVector diag;  // size N or empty

  static Coefficients vector(const RealVector& r);  // linear / diagonal forms use `diag`
  static Coefficients zero(Index n);
  static Coefficients ones(Index n);                // R_ij = 1 for all i, j
  static Coefficients matrix(const RealMatrix& r);
  static Coefficients low_rank(const RealMatrix& u, const RealMatrix& v);

  Index n() const;
  // max |R_ij| over the pairs the form sums over, and (N^-2 sum |R_ij|^2)^{1/2}
  // (or N^-1 for vector forms).
  double max_abs(bool off_diagonal) const;
  double rms(bool off_diagonal) const;
};

struct PreflightReport {
  double mean_bound = 0.0;
  double mean_estimate = 0.0;
  std::vector<double> p = {2.0, 4.0, 8.0};
  std::vector<double> moment_estimate;
  std::vector<double> moment_bound;
  bool ok = true;
};

/// Monte Carlo check of |E X| <= C' N^{-1-delta} and
/// E|X|^p <= (q^2/N)(C/q)^p at p in {2, 4, 8}.
PreflightReport preflight(const DeviationCheckConfig& config, const ScalarLaw& law, Seed seed, Index draws = 20000);

struct TailRow {
  DeviationForm form = DeviationForm::linear;
  Index n = 0;
  double xi = 0.0;
  double threshold = 0.0;
  Index exceedances = 0;
  Index replicas = 0;
  double empirical_tail = 0.0;
  double bound = 0.0;
  bool comparable = false;  // bound >= 10 / replicas
  bool pass = true;         // empirical_tail <= bound
};

struct TailReport {
  std::vector<TailRow> rows;
  PreflightReport preflight;
  bool pass = true;
};

/// Threshold for `form` at `xi` from the corresponding large-deviation display.
double deviation_threshold(const DeviationCheckConfig& config, const Coefficients& r, double xi);

TailReport check_linear_form(const DeviationCheckConfig& config, const Coefficients& r, const ScalarLaw& law,
                             Seed seed);
TailReport check_diagonal_form(const DeviationCheckConfig& config, const Coefficients& r, const ScalarLaw& law,
                               Seed seed);
TailReport check_quadratic_form(const DeviationCheckConfig& config, const Coefficients& r, const ScalarLaw& law,
                                Seed seed);
/// Throws stream_collision when seed_x == seed_y.
TailReport check_bilinear_form(const DeviationCheckConfig& config, const Coefficients& r, const ScalarLaw& law_x,
                               const ScalarLaw& law_y, Seed seed_x, Seed seed_y);

/// Dispatches on config.form (bilinear uses seed and derive_seed(seed)).
TailReport check_form(const DeviationCheckConfig& config, const Coefficients& r, const ScalarLaw& law, Seed seed);

struct NuCalibration {
  double nu = 0.0;
  std::vector<TailRow> points;  // empirical tails on the calibration xi grid
  Index used = 0;                // points inside the tail window
};

/// Largest nu with exp(-nu (log N)^xi) >= empirical tail at every calibration
/// point whose tail lies in [10/replicas, max_tail]. Without such a point this
/// throws insufficient_replicas, or returns nu = inf and used = 0 when
/// `allow_empty` is set.
NuCalibration calibrate_nu(const DeviationCheckConfig& config, const Coefficients& r, Seed seed,
                           const std::vector<double>& xi_grid, double max_tail = 0.1, bool allow_empty = false);

struct ContinuityCheck {
  Complex z;
  Complex z_prime;
  double max_violation = 0.0;  // max_jk |G'_jk - G_jk| - (eta'/2eta)(|Im G'_jj| + |Im G_kk|)
  double min_ratio = 1.0;      // min_j min/max(|G'_jj|, |G_jj|)
  double ratio_floor = 1.0;    // 1 - eta'/eta
  Index violations = 0;
  bool pass = true;
};

/// z = E + i eta, z' = E + i (eta + eta_prime).
ContinuityCheck check_continuity(const RealMatrix& h, double energy, double eta, double eta_prime,
                                 double slack = 1e-9);
ContinuityCheck check_continuity(const ResolventFrame& g, const ResolventFrame& g_prime, double slack = 1e-9);

}  // namespace rmt
