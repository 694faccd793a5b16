#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rmt/bounds_lab.hpp"
#include "rmt/dynamics.hpp"
#include "rmt/locallaw.hpp"
#include "rmt/serialize.hpp"

// Typed experiment pipelines. The harness maps configuration files onto
// these; the acceptance binary calls them directly.
namespace rmt::experiments {

using io::json;

/// Files produced by a pipeline, relative to the run directory.
struct Artifact {
  std::string name;
  std::string content;
};

struct Outcome {
  bool pass = false;
  json summary = json::object();
  std::vector<Artifact> artifacts;
};

std::vector<Seed> seed_range(Seed first, Index count);

// --- local law ---------------------------------------------------------------

struct EnvelopeCalibration {
  std::vector<Seed> seeds;       // GOE calibration seeds
  std::optional<EntryLaw> heavy;  // optional second calibration ensemble on the same seeds
  double c = 0.05;
  double xi = 1.0;
  double margin = 0.25;
};

struct LocalLawExperiment {
  EnsembleSpec ensemble;
  std::vector<Seed> seeds;
  double kappa = 0.5;
  Index energy_count = 7;
  double eta_min = 0.0;  // 0 selects 20/N
  bool phi_floor = false;
  std::optional<EnvelopeConstants> envelope;  // fitted on GOE when absent
  EnvelopeCalibration calibration;
  double coverage_required = 0.99;
  double seed_fraction = 0.9;
  Index entry_stride = 0;
};

SpectralDomainGrid locallaw_grid(const LocalLawExperiment& e);

/// Fits C on GOE samples (and flat-profile samples of `heavy` when set) over
/// `grid` with c and xi fixed.
EnvelopeConstants calibrate_envelope(const SpectralDomainGrid& grid, double eps, const EnvelopeCalibration& cal);

struct LocalLawResult {
  SpectralDomainGrid grid;
  EnvelopeConstants envelope;
  std::vector<LocalLawReport> reports;
  Index passing = 0;
  bool pass = false;
};

LocalLawResult run_locallaw(const LocalLawExperiment& e);
Outcome to_outcome(const LocalLawResult& r);

// --- entrywise ---------------------------------------------------------------

struct EntrywiseExperiment {
  EnsembleSpec ensemble;
  std::vector<Seed> seeds;        // matrices for the boundedness check
  Complex z{0.0, 0.05};
  double bound = 10.0;            // frozen constant for max |G_ij|
  Index label_trials = 100;       // H-distributed labels for the deviant-count check
  Seed label_seed = 1;
  AdmissibilityConfig admissibility;
  double label_fraction = 0.95;
  double seed_fraction = 0.9;
};

struct EntrywiseResult {
  std::vector<EntrywiseReport> reports;  // one per seed
  AdmissibilityRates rates;
  Index labels_below_limit = 0;
  Index seeds_bounded = 0;
  bool labels_pass = false;
  bool bound_pass = false;
  bool pass = false;
};

EntrywiseResult run_entrywise(const EntrywiseExperiment& e);
Outcome to_outcome(const EntrywiseExperiment& e, const EntrywiseResult& r);

// --- delocalization ----------------------------------------------------------

struct DelocalizationExperiment {
  EnsembleSpec ensemble;
  std::vector<Seed> seeds;
  double kappa = 0.5;
  double xi = 0.5;
  std::optional<double> constant;          // fitted on GOE when absent
  std::vector<Seed> calibration_seeds;
  double margin = 0.25;
  double seed_fraction = 0.95;
  double edge_fraction = 0.8;              // only checked for heavy-tailed ensembles
};

struct DelocalizationResult {
  double constant = 0.0;
  std::vector<DelocalizationReport> reports;
  Index bulk_passing = 0;
  Index edge_exceeds = 0;
  bool edge_checked = false;
  bool pass = false;
};

double calibrate_delocalization(Index n, double kappa, double xi, const std::vector<Seed>& seeds, double margin);
DelocalizationResult run_delocalization(const DelocalizationExperiment& e);
Outcome to_outcome(const DelocalizationExperiment& e, const DelocalizationResult& r);

// --- ladder ------------------------------------------------------------------

struct LadderExperiment {
  EnsembleSpec ensemble;
  std::vector<Seed> seeds;
  double energy = 0.0;
  double eta_min = 0.0;  // 0 selects 20/N
  EnvelopeConstants envelope{1.0, 0.05, 1.0};
  double seed_fraction = 0.9;
};

struct LadderResult {
  std::vector<LadderReport> reports;
  Index envelope_passing = 0;
  bool continuity = true;
  bool pass = false;
};

LadderResult run_ladder(const LadderExperiment& e);
Outcome to_outcome(const LadderResult& r);

// --- gaps and correlation ----------------------------------------------------

struct UniversalityExperiment {
  EnsembleSpec ensemble;
  EnsembleSpec reference;  // GOE unless configured
  Index replicas = 200;
  Seed seed = 1;
  Seed reference_seed = 2;
  double kappa = 0.25;
  double tolerance = 0.05;
  Index bootstrap_rounds = 200;
  double energy = 0.0;
  double bump_radius = 2.0;
  double sigmas = 3.0;
  Index histogram_bins = 60;
};

std::vector<SpectrumSummary> sample_spectra(const EnsembleSpec& spec, Index replicas, Seed seed);

struct GapResult {
  GapComparison comparison;
  std::vector<double> mean_gap;  // per ensemble: mean rescaled gap
  std::vector<double> hist_edges;
  std::vector<double> hist_a;
  std::vector<double> hist_b;
};

GapResult run_gaps(const UniversalityExperiment& e);
Outcome to_outcome(const UniversalityExperiment& e, const GapResult& r);

struct CorrelationResult {
  CorrelationComparison comparison;
  double rho = 0.0;
};

CorrelationResult run_correlation(const UniversalityExperiment& e);
Outcome to_outcome(const UniversalityExperiment& e, const CorrelationResult& r);

// --- flow equivalence --------------------------------------------------------

struct FlowExperiment {
  EnsembleSpec ensemble;
  Index replicas = 200;
  Seed seed = 1;
  std::vector<double> moment_times = {0.01, 0.1, 1.0};
  double delta = 0.5;   // split time t = N^{delta - 1}
  double alpha = 0.01;  // KS level
  double sigmas = 3.0;
};

struct MomentRow {
  double t = 0.0;
  double mean = 0.0;  // mean over replicas of the average of h_ij^2 / s_ij
  double stderr_mean = 0.0;
  bool pass = false;
};

struct FunctionalRow {
  std::string name;
  double ks = 0.0;
  double critical = 0.0;
  double pvalue = 0.0;
  bool pass = false;
};

struct FlowResult {
  double t_split = 0.0;
  double s = 0.0;
  std::vector<MomentRow> moments;
  std::vector<FunctionalRow> functionals;
  bool pass = false;
};

FlowResult run_flow(const FlowExperiment& e);
Outcome to_outcome(const FlowResult& r);

// --- deviation ---------------------------------------------------------------

struct DeviationExperiment {
  std::vector<Index> sizes = {500, 1000, 2000};
  std::vector<DeviationForm> forms = {DeviationForm::linear, DeviationForm::diagonal, DeviationForm::quadratic,
                                      DeviationForm::bilinear};
  std::vector<double> xi = {2.0, 3.0};
  std::vector<double> calibration_xi = {0.0, 0.25, 0.5, 0.75, 1.0};
  Index replicas = 100000;
  Index calibration_replicas = 100000;
  EntryLaw heavy = EntryLaw::student_t(2.6);
  double eps = 0.5;
  double delta = 0.5;
  double C = 2.0;
  double C_prime = 2.0;
  Seed seed = 1;
};

struct DeviationResult {
  std::vector<NuCalibration> calibration;  // per form
  std::vector<double> nu;                  // per form
  std::vector<TailRow> rows;
  std::vector<std::string> laws;           // per row
  bool pass = false;
};

/// Coefficients used by the sweep: R = 1 (vector forms) or the all-ones matrix.
Coefficients sweep_coefficients(DeviationForm form, Index n);
DeviationResult run_deviation(const DeviationExperiment& e);
Outcome to_outcome(const DeviationResult& r);

// --- continuity --------------------------------------------------------------

struct ContinuityExperiment {
  EnsembleSpec ensemble;
  std::vector<Seed> seeds;
  Index triples = 1;                // (E, eta, eta') draws per seed
  std::optional<double> energy;     // fixed values override the random draws
  std::optional<double> eta;
  std::optional<double> eta_prime;
};

struct ContinuityRow {
  Seed seed = 0;
  double energy = 0.0;
  double eta = 0.0;
  double eta_prime = 0.0;
  ContinuityCheck check;
};

struct ContinuityResult {
  std::vector<ContinuityRow> rows;
  Index violations = 0;
  bool pass = false;
};

ContinuityResult run_continuity(const ContinuityExperiment& e);
Outcome to_outcome(const ContinuityResult& r);

// --- admissibility -----------------------------------------------------------

struct AdmissibilityExperiment {
  EnsembleSpec ensemble;
  Index trials = 100;
  Seed seed = 1;
  AdmissibilityConfig config;
  double required = 0.95;  // fraction of labels with |D| below N^{1 - eps/20}
};

struct AdmissibilityResult {
  AdmissibilityRates rates;
  double deviant_limit = 0.0;
  Index below_limit = 0;
  bool pass = false;
};

AdmissibilityResult run_admissibility(const AdmissibilityExperiment& e);
Outcome to_outcome(const AdmissibilityResult& r);

// --- suites without a harness kind ---------------------------------------------

struct IdentityRow {
  Index n = 0;
  Index instance = 0;
  double ward = 0.0;
  double schur = 0.0;
  double minor = 0.0;
  double resolvent = 0.0;
  double decomposition = 0.0;
  double self_consistent = 0.0;
  double deterministic = 0.0;  // max |G_ij| eta, must be <= 1
  double worst() const;
};

/// Exact resolvent identities on random instances of each size.
std::vector<IdentityRow> identity_suite(const std::vector<Index>& sizes, Index instances, Seed seed);

/// KS distance between the ESD and the semicircle for one sample per seed.
std::vector<double> semicircle_distances(const EnsembleSpec& spec, const std::vector<Seed>& seeds);

struct ResamplingRow {
  Index i = 0;
  Index j = 0;
  double ks = 0.0;
  double critical = 0.0;
  bool pass = false;
};

/// Two-stage (label, then conditional draw) vs direct draws of single entries.
std::vector<ResamplingRow> resampling_consistency(const EnsembleSpec& spec,
                                                  const std::vector<std::pair<Index, Index>>& positions,
                                                  Index draws, Seed seed, double alpha = 0.01);

}  // namespace rmt::experiments
