#include "rmt/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rmt/linalg.hpp"
#include "rmt/parallel.hpp"

namespace rmt::experiments {

using io::Csv;

namespace {

double fraction(Index k, Index total) { return total ? static_cast<double>(k) / static_cast<double>(total) : 0.0; }

// Seed for replica r of an independent role (initial matrix, noise, GOE part, ...).
Seed role_seed(Seed seed, std::uint64_t role, Index r) {
  return derive_seed(derive_seed(seed, stream_tag::replica, role), stream_tag::replica, r);
}

json ensemble_json(const EnsembleSpec& s) {
  return {{"description", s.describe()}, {"n", s.n}, {"law", io::to_json(s.law)}};
}

}  // namespace

std::vector<Seed> seed_range(Seed first, Index count) {
  std::vector<Seed> out(count);
  for (Index k = 0; k < count; ++k) out[k] = first + k;
  return out;
}

// ---------------------------------------------------------------------------
// Local law

SpectralDomainGrid locallaw_grid(const LocalLawExperiment& e) {
  const double floor = e.eta_min > 0.0 ? e.eta_min : 20.0 / static_cast<double>(e.ensemble.n);
  return build_grid(e.ensemble.n, e.kappa, e.energy_count, e.phi_floor ? EtaFloor::phi_n : EtaFloor::explicit_value,
                    floor);
}

EnvelopeConstants calibrate_envelope(const SpectralDomainGrid& grid, double eps, const EnvelopeCalibration& cal) {
  require(!cal.seeds.empty(), ErrorCode::insufficient_replicas, "envelope calibration needs at least one seed");
  std::shared_ptr<const VarianceProfile> flat;
  if (cal.heavy) {
    check_moment_assumption(*cal.heavy, eps);
    flat = std::make_shared<const VarianceProfile>(make_profile(grid.n, ProfileKind::flat, eps));
  }
  const Index per = cal.seeds.size();
  const auto reports = parallel_map<LocalLawReport>(cal.heavy ? 2 * per : per, [&](Index k) {
    if (k < per) return verify_local_law(sample_goe(grid.n, cal.seeds[k]).h, grid, {});
    return verify_local_law(sample_matrix(flat, *cal.heavy, cal.seeds[k - per]).h, grid, {});
  });
  std::vector<EnvelopeObservation> obs;
  for (const auto& r : reports)
    for (const auto& p : r.points) obs.push_back({grid.n, p.eta, p.abs_mn_minus_msc});
  return fit_envelope(obs, eps, cal.c, cal.xi, cal.margin);
}

LocalLawResult run_locallaw(const LocalLawExperiment& e) {
  LocalLawResult out;
  out.grid = locallaw_grid(e);
  const auto profile = e.ensemble.make_profile();
  const double eps = profile->constants.eps;
  out.envelope = e.envelope ? *e.envelope : calibrate_envelope(out.grid, eps, e.calibration);
  LocalLawOptions opts;
  opts.envelope = out.envelope;
  opts.eps = eps;
  opts.coverage_required = e.coverage_required;
  opts.entry_stride = e.entry_stride;
  out.reports = parallel_map<LocalLawReport>(e.seeds.size(), [&](Index k) {
    return verify_local_law(e.ensemble.sample(profile, e.seeds[k]), out.grid, opts);
  });
  for (const auto& r : out.reports) out.passing += r.pass;
  out.pass = !out.reports.empty() && fraction(out.passing, out.reports.size()) >= e.seed_fraction;
  return out;
}

Outcome to_outcome(const LocalLawResult& r) {
  Outcome o;
  o.pass = r.pass;
  Csv csv({"seed", "E", "eta", "abs_mN_minus_msc", "max_typical_entry_err", "max_abs_G", "deviant_count", "covered"});
  json per_seed = json::array();
  for (const auto& rep : r.reports) {
    for (const auto& p : rep.points)
      csv.row()
          .add(std::to_string(rep.seed))
          .add(p.energy)
          .add(p.eta)
          .add(p.abs_mn_minus_msc)
          .add(p.max_typical_entry_err)
          .add(p.max_abs_g)
          .add(p.deviant_count)
          .add(p.covered ? 1 : 0);
    per_seed.push_back({{"seed", rep.seed}, {"coverage", rep.coverage}, {"pass", rep.pass}});
  }
  o.summary = {{"envelope", {{"C", r.envelope.C}, {"c", r.envelope.c}, {"xi", r.envelope.xi}}},
               {"grid", {{"energies", r.grid.energies.size()}, {"etas", r.grid.etas.size()},
                         {"eta_floor", r.grid.eta_floor}, {"ladder_factor", r.grid.ladder_factor}}},
               {"seeds", per_seed},
               {"passing", r.passing},
               {"pass", r.pass}};
  o.artifacts.push_back({"locallaw.csv", csv.str()});
  return o;
}

// ---------------------------------------------------------------------------
// Entrywise

EntrywiseResult run_entrywise(const EntrywiseExperiment& e) {
  EntrywiseResult out;
  const auto profile = e.ensemble.make_profile();
  if (e.label_trials > 0) {
    out.rates = admissibility_frequency(*profile, e.ensemble.law, e.label_trials, e.label_seed, e.admissibility);
    const double limit = std::pow(static_cast<double>(profile->n), 1.0 - profile->constants.eps / 20.0);
    for (Index c : out.rates.deviant_counts) out.labels_below_limit += static_cast<double>(c) < limit;
    out.labels_pass = fraction(out.labels_below_limit, e.label_trials) >= e.label_fraction;
  } else {
    out.labels_pass = true;
  }
  out.reports = parallel_map<EntrywiseReport>(e.seeds.size(), [&](Index k) {
    const WignerSample s = e.ensemble.sample(profile, e.seeds[k]);
    return verify_entrywise(s.h, label_of(s), e.z);
  });
  for (const auto& r : out.reports) out.seeds_bounded += r.max_abs_g < e.bound;
  out.bound_pass = e.seeds.empty() || fraction(out.seeds_bounded, e.seeds.size()) >= e.seed_fraction;
  out.pass = out.labels_pass && out.bound_pass;
  return out;
}

Outcome to_outcome(const EntrywiseExperiment& e, const EntrywiseResult& r) {
  Outcome o;
  o.pass = r.pass;
  Csv csv({"seed", "max_abs_G", "max_typical_err", "max_deviant_err", "max_deviant_block", "deviant_count",
           "deviant_limit"});
  for (std::size_t k = 0; k < r.reports.size(); ++k) {
    const auto& p = r.reports[k];
    csv.row()
        .add(std::to_string(e.seeds[k]))
        .add(p.max_abs_g)
        .add(p.max_typical_err)
        .add(p.max_deviant_err)
        .add(p.max_deviant_block)
        .add(p.deviant_count)
        .add(p.deviant_limit);
  }
  Csv labels({"trial", "deviant_count"});
  for (std::size_t t = 0; t < r.rates.deviant_counts.size(); ++t)
    labels.row().add(static_cast<Index>(t)).add(r.rates.deviant_counts[t]);
  o.summary = {{"z", io::to_json(e.z)},
               {"bound", e.bound},
               {"seeds_bounded", r.seeds_bounded},
               {"labels_below_limit", r.labels_below_limit},
               {"label_trials", e.label_trials},
               {"labels_pass", r.labels_pass},
               {"bound_pass", r.bound_pass},
               {"pass", r.pass}};
  o.artifacts.push_back({"entrywise.csv", csv.str()});
  o.artifacts.push_back({"deviant_counts.csv", labels.str()});
  return o;
}

// ---------------------------------------------------------------------------
// Delocalization

double calibrate_delocalization(Index n, double kappa, double xi, const std::vector<Seed>& seeds, double margin) {
  require(!seeds.empty(), ErrorCode::insufficient_replicas, "delocalization calibration needs at least one seed");
  const auto stat = parallel_map<double>(seeds.size(), [&](Index k) {
    return verify_delocalization(sample_goe(n, seeds[k]), kappa, xi).bulk_max;
  });
  return *std::max_element(stat.begin(), stat.end()) * (1.0 + margin);
}

DelocalizationResult run_delocalization(const DelocalizationExperiment& e) {
  DelocalizationResult out;
  out.constant = e.constant ? *e.constant
                            : calibrate_delocalization(e.ensemble.n, e.kappa, e.xi, e.calibration_seeds, e.margin);
  const auto profile = e.ensemble.make_profile();
  out.reports = parallel_map<DelocalizationReport>(e.seeds.size(), [&](Index k) {
    return verify_delocalization(e.ensemble.sample(profile, e.seeds[k]), e.kappa, e.xi, out.constant);
  });
  out.edge_checked = e.ensemble.kind == EnsembleSpec::Kind::wigner && e.ensemble.law.heavy_tailed();
  for (const auto& r : out.reports) {
    out.bulk_passing += r.pass;
    out.edge_exceeds += r.top_edge > r.bulk_max;
  }
  const Index n = out.reports.size();
  out.pass = n > 0 && fraction(out.bulk_passing, n) >= e.seed_fraction &&
             (!out.edge_checked || fraction(out.edge_exceeds, n) >= e.edge_fraction);
  return out;
}

Outcome to_outcome(const DelocalizationExperiment& e, const DelocalizationResult& r) {
  Outcome o;
  o.pass = r.pass;
  Csv csv({"seed", "bulk_count", "bulk_max", "top_edge", "pass"});
  for (std::size_t k = 0; k < r.reports.size(); ++k) {
    const auto& p = r.reports[k];
    csv.row().add(std::to_string(e.seeds[k])).add(p.bulk_count).add(p.bulk_max).add(p.top_edge).add(p.pass ? 1 : 0);
  }
  o.summary = {{"constant", r.constant},   {"xi", e.xi},
               {"bulk_passing", r.bulk_passing}, {"edge_checked", r.edge_checked},
               {"edge_exceeds", r.edge_exceeds}, {"pass", r.pass}};
  o.artifacts.push_back({"delocalization.csv", csv.str()});
  return o;
}

// ---------------------------------------------------------------------------
// Ladder

LadderResult run_ladder(const LadderExperiment& e) {
  LadderResult out;
  const double floor = e.eta_min > 0.0 ? e.eta_min : 20.0 / static_cast<double>(e.ensemble.n);
  const SpectralDomainGrid grid = build_grid(e.ensemble.n, 0.5, 1, EtaFloor::explicit_value, floor);
  const auto profile = e.ensemble.make_profile();
  LadderOptions opts;
  opts.energy = e.energy;
  opts.envelope = e.envelope;
  opts.eps = profile->constants.eps;
  out.reports = parallel_map<LadderReport>(e.seeds.size(), [&](Index k) {
    const WignerSample s = e.ensemble.sample(profile, e.seeds[k]);
    return multiscale_ladder_diagnostic(s, label_of(s), grid, opts);
  });
  for (const auto& r : out.reports) {
    out.envelope_passing += r.envelope_holds;
    out.continuity = out.continuity && r.continuity_holds;
  }
  out.pass = !out.reports.empty() && out.continuity &&
             fraction(out.envelope_passing, out.reports.size()) >= e.seed_fraction;
  return out;
}

Outcome to_outcome(const LadderResult& r) {
  Outcome o;
  o.pass = r.pass;
  Csv csv({"replica", "eta", "max_typical_v", "max_gamma", "envelope", "within_envelope", "continuity_violation",
           "min_ratio"});
  for (std::size_t k = 0; k < r.reports.size(); ++k)
    for (const auto& g : r.reports[k].rungs)
      csv.row()
          .add(static_cast<Index>(k))
          .add(g.eta)
          .add(g.max_typical_v)
          .add(g.max_gamma)
          .add(g.envelope)
          .add(g.within_envelope ? 1 : 0)
          .add(g.continuity_violation)
          .add(g.min_ratio);
  o.summary = {{"rungs", r.reports.empty() ? 0 : r.reports.front().rungs.size()},
               {"envelope_passing", r.envelope_passing},
               {"continuity", r.continuity},
               {"pass", r.pass}};
  o.artifacts.push_back({"ladder.csv", csv.str()});
  return o;
}

// ---------------------------------------------------------------------------
// Gaps and correlation

std::vector<SpectrumSummary> sample_spectra(const EnsembleSpec& spec, Index replicas, Seed seed) {
  const auto profile = spec.make_profile();
  return parallel_map<SpectrumSummary>(replicas, [&](Index r) {
    return eigendecompose(spec.sample(profile, derive_seed(seed, stream_tag::replica, r)));
  });
}

GapResult run_gaps(const UniversalityExperiment& e) {
  require(e.ensemble.n == e.reference.n, ErrorCode::dimension_mismatch, "ensembles must share N");
  auto gaps = [&](const EnsembleSpec& spec, Seed seed) {
    const auto profile = spec.make_profile();
    return parallel_map<std::vector<double>>(e.replicas, [&](Index r) {
      const WignerSample s = spec.sample(profile, derive_seed(seed, stream_tag::replica, r));
      return rescaled_nearest_gaps(eigendecompose(s), e.kappa);
    });
  };
  const auto a = gaps(e.ensemble, e.seed);
  const auto b = gaps(e.reference, e.reference_seed);
  GapResult out;
  out.comparison =
      compare_gaps(a, b, e.tolerance, e.bootstrap_rounds, derive_seed(e.seed ^ e.reference_seed, stream_tag::bootstrap, 0));

  constexpr double kMaxGap = 4.0;
  const Index bins = std::max<Index>(e.histogram_bins, 1);
  for (Index k = 0; k <= bins; ++k) out.hist_edges.push_back(kMaxGap * static_cast<double>(k) / static_cast<double>(bins));
  auto histogram = [&](const std::vector<std::vector<double>>& g, double& mean) {
    std::vector<double> h(bins, 0.0);
    std::vector<double> flat;
    for (const auto& v : g) flat.insert(flat.end(), v.begin(), v.end());
    for (double x : flat)
      if (x < kMaxGap) h[static_cast<Index>(x / kMaxGap * static_cast<double>(bins))] += 1.0;
    const double width = kMaxGap / static_cast<double>(bins);
    for (double& c : h) c /= static_cast<double>(flat.size()) * width;
    mean = stats::mean(flat);
    return h;
  };
  out.mean_gap.resize(2);
  out.hist_a = histogram(a, out.mean_gap[0]);
  out.hist_b = histogram(b, out.mean_gap[1]);
  return out;
}

Outcome to_outcome(const UniversalityExperiment& e, const GapResult& r) {
  Outcome o;
  o.pass = r.comparison.pass;
  Csv csv({"bin_lo", "bin_hi", "density_ensemble", "density_reference"});
  for (std::size_t k = 0; k < r.hist_a.size(); ++k)
    csv.row().add(r.hist_edges[k]).add(r.hist_edges[k + 1]).add(r.hist_a[k]).add(r.hist_b[k]);
  const auto& c = r.comparison;
  o.summary = {{"ensemble", ensemble_json(e.ensemble)},
               {"reference", ensemble_json(e.reference)},
               {"replicas", e.replicas},
               {"ks", c.ks},
               {"ci", {c.ci_lo, c.ci_hi}},
               {"critical_1pct", c.critical_1pct},
               {"tolerance", c.tolerance},
               {"gaps", {c.n_a, c.n_b}},
               {"mean_gap", r.mean_gap},
               {"pass", c.pass}};
  o.artifacts.push_back({"gap_histogram.csv", csv.str()});
  return o;
}

CorrelationResult run_correlation(const UniversalityExperiment& e) {
  require(e.ensemble.n == e.reference.n, ErrorCode::dimension_mismatch, "ensembles must share N");
  require(e.energy >= e.kappa - 2.0 && e.energy <= 2.0 - e.kappa, ErrorCode::invalid_argument,
          "energy outside the bulk");
  const TestFunction f = TestFunction::product_bump(1, e.bump_radius);
  auto observe = [&](const EnsembleSpec& spec, Seed seed) {
    const auto profile = spec.make_profile();
    CorrelationAccumulator acc{1, e.energy, {}};
    const auto stat = parallel_map<double>(e.replicas, [&](Index r) {
      const WignerSample s = spec.sample(profile, derive_seed(seed, stream_tag::replica, r));
      return correlation_statistic(eigendecompose(s).values(), f, e.energy);
    });
    for (double x : stat) acc.add(x);
    return acc.observable();
  };
  CorrelationResult out;
  out.rho = semicircle_density(e.energy);
  out.comparison = compare_correlation(observe(e.ensemble, e.seed), observe(e.reference, e.reference_seed), e.sigmas);
  return out;
}

Outcome to_outcome(const UniversalityExperiment& e, const CorrelationResult& r) {
  Outcome o;
  const auto& c = r.comparison;
  o.pass = c.pass;
  Csv csv({"ensemble", "estimate", "stderr", "replicas", "estimate_over_rho"});
  csv.row().add(e.ensemble.describe()).add(c.a.estimate).add(c.a.stderr_estimate).add(c.a.replicas).add(c.a.estimate / r.rho);
  csv.row().add(e.reference.describe()).add(c.b.estimate).add(c.b.stderr_estimate).add(c.b.replicas).add(c.b.estimate / r.rho);
  o.summary = {{"energy", e.energy},          {"bump_radius", e.bump_radius}, {"diff", c.diff},
               {"pooled_stderr", c.pooled_stderr}, {"sigmas", c.sigmas},      {"pass", c.pass}};
  o.artifacts.push_back({"correlation.csv", csv.str()});
  return o;
}

// ---------------------------------------------------------------------------
// Flow equivalence

FlowResult run_flow(const FlowExperiment& e) {
  require(e.replicas >= 2, ErrorCode::insufficient_replicas, "flow equivalence needs at least 2 replicas");
  const auto profile = e.ensemble.make_profile();
  const Index n = profile->n;
  FlowResult out;

  // Entrywise second moments along the flow: per replica, the average of h_ij^2 / s_ij over i <= j.
  for (std::size_t ti = 0; ti < e.moment_times.size(); ++ti) {
    const double t = e.moment_times[ti];
    const auto stat = parallel_map<double>(e.replicas, [&](Index r) {
      FlowState st{0.0, e.ensemble.sample(profile, role_seed(e.seed, 10, r))};
      const FlowState ev = ou_evolve(st, t, role_seed(e.seed, 11 + ti, r));
      double acc = 0.0;
      for (Index j = 0; j < n; ++j)
        for (Index i = 0; i <= j; ++i) {
          const double x = ev.sample.h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
          acc += x * x / profile->s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
      return acc / static_cast<double>(n * (n + 1) / 2);
    });
    stats::Moments m;
    for (double x : stat) m.add(x);
    MomentRow row{t, m.mean, m.stderr_mean(), false};
    row.pass = std::abs(row.mean - 1.0) <= e.sigmas * row.stderr_mean;
    out.moments.push_back(row);
  }

  // Equality in law of the OU matrix and the Gaussian-divisible construction.
  out.t_split = std::pow(static_cast<double>(n), e.delta - 1.0);
  struct Functionals {
    double im_m = 0.0, median = 0.0, radius = 0.0;
  };
  auto functionals = [](const RealMatrix& h) {
    const RealVector l = linalg::symmetric_eigenvalues(h);
    const std::span<const double> v(l.data(), static_cast<std::size_t>(l.size()));
    std::vector<double> sorted(v.begin(), v.end());
    return Functionals{linalg::stieltjes(v, Complex(0.0, 1.0)).imag(), stats::median(sorted),
                       std::max(std::abs(sorted.front()), std::abs(sorted.back()))};
  };
  const auto ou = parallel_map<Functionals>(e.replicas, [&](Index r) {
    FlowState st{0.0, e.ensemble.sample(profile, role_seed(e.seed, 20, r))};
    return functionals(ou_evolve(st, out.t_split, role_seed(e.seed, 21, r)).sample.h);
  });
  std::vector<double> split_s(e.replicas);
  const auto split = parallel_map<Functionals>(e.replicas, [&](Index r) {
    const WignerSample h = e.ensemble.sample(profile, role_seed(e.seed, 30, r));
    const DivisibleDecomposition d = gaussian_divisible_split(h, out.t_split, role_seed(e.seed, 31, r));
    split_s[r] = d.s;
    return functionals(d.compose(sample_goe(n, role_seed(e.seed, 32, r)).h));
  });
  out.s = split_s.front();
  auto column = [](const std::vector<Functionals>& f, double Functionals::*member) {
    std::vector<double> v;
    for (const auto& x : f) v.push_back(x.*member);
    return v;
  };
  const std::pair<const char*, double Functionals::*> names[] = {
      {"im_m_N(i)", &Functionals::im_m}, {"median_eigenvalue", &Functionals::median}, {"max_abs_eigenvalue", &Functionals::radius}};
  for (const auto& [name, member] : names) {
    FunctionalRow row;
    row.name = name;
    row.ks = stats::ks_two_sample(column(ou, member), column(split, member));
    row.critical = stats::ks_critical_value(e.replicas, e.replicas, e.alpha);
    row.pvalue = stats::ks_two_sample_pvalue(row.ks, e.replicas, e.replicas);
    row.pass = row.ks < row.critical;
    out.functionals.push_back(row);
  }
  out.pass = std::all_of(out.moments.begin(), out.moments.end(), [](const MomentRow& m) { return m.pass; }) &&
             std::all_of(out.functionals.begin(), out.functionals.end(), [](const FunctionalRow& f) { return f.pass; });
  return out;
}

Outcome to_outcome(const FlowResult& r) {
  Outcome o;
  o.pass = r.pass;
  Csv moments({"t", "mean_scaled_second_moment", "stderr", "pass"});
  for (const auto& m : r.moments) moments.row().add(m.t).add(m.mean).add(m.stderr_mean).add(m.pass ? 1 : 0);
  Csv ks({"functional", "ks", "critical", "pvalue", "pass"});
  for (const auto& f : r.functionals) ks.row().add(f.name).add(f.ks).add(f.critical).add(f.pvalue).add(f.pass ? 1 : 0);
  o.summary = {{"t_split", r.t_split}, {"s", r.s}, {"pass", r.pass}};
  o.artifacts.push_back({"flow_moments.csv", moments.str()});
  o.artifacts.push_back({"flow_ks.csv", ks.str()});
  return o;
}

// ---------------------------------------------------------------------------
// Deviation sweep

Coefficients sweep_coefficients(DeviationForm form, Index n) {
  if (form == DeviationForm::linear || form == DeviationForm::diagonal)
    return Coefficients::vector(RealVector::Ones(static_cast<Eigen::Index>(n)));
  return Coefficients::ones(n);
}

DeviationResult run_deviation(const DeviationExperiment& e) {
  require(!e.sizes.empty() && !e.forms.empty(), ErrorCode::invalid_argument, "deviation sweep needs sizes and forms");
  DeviationResult out;
  auto config_for = [&](Index n, DeviationForm form, Index replicas) {
    DeviationCheckConfig c;
    c.n = n;
    c.eps = e.eps;
    c.delta = e.delta;
    c.C = e.C;
    c.C_prime = e.C_prime;
    c.form = form;
    c.replicas = replicas;
    return c;
  };

  // One nu for (C, C'): the smallest value supported by any Gaussian calibration point.
  // A form whose Gaussian tails never reach the bound (the diagonal form has no
  // rms term) constrains nothing and is skipped.
  double nu = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < e.forms.size(); ++f) {
    for (std::size_t k = 0; k < e.sizes.size(); ++k) {
      const Index n = e.sizes[k];
      const NuCalibration cal = calibrate_nu(config_for(n, e.forms[f], e.calibration_replicas),
                                             sweep_coefficients(e.forms[f], n),
                                             role_seed(e.seed, 100 + 10 * f, k), e.calibration_xi, 0.1, true);
      nu = std::min(nu, cal.nu);
      out.calibration.push_back(cal);
    }
  }
  require(std::isfinite(nu), ErrorCode::insufficient_replicas,
          "no calibration point has a tail inside [10/replicas, 0.1] for any form");
  out.nu.assign(e.forms.size(), nu);

  const ScalarLaw laws[] = {ScalarLaw::gaussian(), ScalarLaw::truncated(e.heavy)};
  out.pass = true;
  for (std::size_t f = 0; f < e.forms.size(); ++f) {
    for (std::size_t k = 0; k < e.sizes.size(); ++k) {
      for (std::size_t l = 0; l < 2; ++l) {
        DeviationCheckConfig c = config_for(e.sizes[k], e.forms[f], e.replicas);
        c.xi = e.xi;
        c.nu = nu;
        const TailReport rep =
            check_form(c, sweep_coefficients(e.forms[f], e.sizes[k]), laws[l], role_seed(e.seed, 200 + 10 * f + l, k));
        for (const auto& row : rep.rows) {
          out.rows.push_back(row);
          out.laws.push_back(laws[l].describe());
        }
        out.pass = out.pass && rep.pass;
      }
    }
  }
  return out;
}

Outcome to_outcome(const DeviationResult& r) {
  Outcome o;
  o.pass = r.pass;
  Csv csv({"form", "law", "N", "xi", "threshold", "empirical_tail", "bound", "replicas", "comparable", "pass"});
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    const auto& t = r.rows[k];
    csv.row()
        .add(to_string(t.form))
        .add(r.laws[k])
        .add(t.n)
        .add(t.xi)
        .add(t.threshold)
        .add(t.empirical_tail)
        .add(t.bound)
        .add(t.replicas)
        .add(t.comparable ? 1 : 0)
        .add(t.pass ? 1 : 0);
  }
  Csv cal({"form", "N", "xi", "threshold", "empirical_tail", "replicas"});
  for (const auto& c : r.calibration)
    for (const auto& t : c.points)
      cal.row().add(to_string(t.form)).add(t.n).add(t.xi).add(t.threshold).add(t.empirical_tail).add(t.replicas);
  o.summary = {{"nu", r.nu.empty() ? 0.0 : r.nu.front()}, {"rows", r.rows.size()}, {"pass", r.pass}};
  o.artifacts.push_back({"deviation.csv", csv.str()});
  o.artifacts.push_back({"nu_calibration.csv", cal.str()});
  return o;
}

// ---------------------------------------------------------------------------
// Continuity

ContinuityResult run_continuity(const ContinuityExperiment& e) {
  require(e.triples >= 1, ErrorCode::invalid_argument, "triples must be at least 1");
  const auto profile = e.ensemble.make_profile();
  const auto per_seed = parallel_map<std::vector<ContinuityRow>>(e.seeds.size(), [&](Index k) {
    const WignerSample s = e.ensemble.sample(profile, e.seeds[k]);
    Stream rng(e.seeds[k], stream_tag::replica, 0xc0);
    std::vector<ContinuityRow> rows;
    for (Index t = 0; t < e.triples; ++t) {
      ContinuityRow row;
      row.seed = e.seeds[k];
      // Energies across and slightly beyond the spectrum, eta log-uniform in [1e-3, 1].
      const double u_e = rng.uniform(), u_eta = rng.uniform(), u_p = rng.uniform();
      row.energy = e.energy.value_or(-2.5 + 5.0 * u_e);
      row.eta = e.eta.value_or(std::pow(10.0, -3.0 + 3.0 * u_eta));
      row.eta_prime = e.eta_prime.value_or(row.eta * 2.0 * u_p);
      row.check = check_continuity(s.h, row.energy, row.eta, row.eta_prime);
      rows.push_back(row);
    }
    return rows;
  });
  ContinuityResult out;
  for (const auto& v : per_seed)
    for (const auto& r : v) {
      out.violations += r.check.violations;
      out.rows.push_back(r);
    }
  out.pass = out.violations == 0 && !out.rows.empty();
  return out;
}

Outcome to_outcome(const ContinuityResult& r) {
  Outcome o;
  o.pass = r.pass;
  Csv csv({"seed", "E", "eta", "eta_prime", "max_violation", "min_ratio", "ratio_floor", "violations"});
  for (const auto& row : r.rows)
    csv.row()
        .add(std::to_string(row.seed))
        .add(row.energy)
        .add(row.eta)
        .add(row.eta_prime)
        .add(row.check.max_violation)
        .add(row.check.min_ratio)
        .add(row.check.ratio_floor)
        .add(row.check.violations);
  o.summary = {{"checks", r.rows.size()}, {"violations", r.violations}, {"pass", r.pass}};
  o.artifacts.push_back({"continuity.csv", csv.str()});
  return o;
}

// ---------------------------------------------------------------------------
// Admissibility

AdmissibilityResult run_admissibility(const AdmissibilityExperiment& e) {
  const auto profile = e.ensemble.make_profile();
  AdmissibilityResult out;
  out.rates = admissibility_frequency(*profile, e.ensemble.law, e.trials, e.seed, e.config);
  out.deviant_limit = std::pow(static_cast<double>(profile->n), 1.0 - profile->constants.eps / 20.0);
  for (Index c : out.rates.deviant_counts) out.below_limit += static_cast<double>(c) < out.deviant_limit;
  out.pass = fraction(out.below_limit, e.trials) >= e.required;
  return out;
}

Outcome to_outcome(const AdmissibilityResult& r) {
  Outcome o;
  o.pass = r.pass;
  Csv csv({"verdict", "count", "rate", "lo", "hi"});
  for (Verdict v : kAllVerdicts) {
    const RateEstimate& x = r.rates[v];
    csv.row().add(to_string(v)).add(x.count).add(x.rate).add(x.lo).add(x.hi);
  }
  Csv counts({"trial", "deviant_count"});
  for (std::size_t t = 0; t < r.rates.deviant_counts.size(); ++t)
    counts.row().add(static_cast<Index>(t)).add(r.rates.deviant_counts[t]);
  const auto& d = r.rates.deviant_counts;
  o.summary = {{"trials", r.rates.trials},
               {"deviant_limit", r.deviant_limit},
               {"below_limit", r.below_limit},
               {"mean_deviant_count",
                d.empty() ? 0.0
                          : static_cast<double>(std::accumulate(d.begin(), d.end(), Index{0})) /
                                static_cast<double>(d.size())},
               {"pass", r.pass}};
  o.artifacts.push_back({"admissibility.csv", csv.str()});
  o.artifacts.push_back({"deviant_counts.csv", counts.str()});
  return o;
}

// ---------------------------------------------------------------------------
// Identity, semicircle and resampling suites

double IdentityRow::worst() const {
  return std::max({ward, schur, minor, resolvent, decomposition, self_consistent});
}

std::vector<IdentityRow> identity_suite(const std::vector<Index>& sizes, Index instances, Seed seed) {
  std::vector<IdentityRow> out;
  for (std::size_t a = 0; a < sizes.size(); ++a) {
    const Index n = sizes[a];
    const auto rows = parallel_map<IdentityRow>(instances, [&](Index k) {
      Stream rng(seed, stream_tag::replica, a, k);
      // Rotate through profile and law combinations.
      EnsembleSpec spec;
      spec.n = n;
      switch (k % 3) {
        case 0: spec.law = EntryLaw::gaussian(); break;
        case 1:
          spec.law = EntryLaw::student_t(2.6);
          spec.profile = ProfileKind::sinkhorn_periodic;
          spec.amplitude = 0.3;
          break;
        default:
          spec.law = EntryLaw::rademacher();
          spec.profile = ProfileKind::tilted;
          spec.amplitude = 0.3;
          break;
      }
      const auto profile = spec.make_profile();
      const WignerSample s = spec.sample(profile, rng());
      const double e = -2.5 + 5.0 * rng.uniform();
      const double eta = std::pow(10.0, -2.0 + 2.5 * rng.uniform());
      const Complex z(e, eta), z2(-2.5 + 5.0 * rng.uniform(), std::pow(10.0, -2.0 + 2.5 * rng.uniform()));
      const Index i = static_cast<Index>(rng() % n);
      const std::array<Index, 1> removed{i};

      const ResolventFrame g = resolvent(s.h, z);
      const ResolventFrame gi = minor(s.h, removed, z);
      const SchurTerms t = schur_terms(s.h, *profile, i, g, gi);
      IdentityRow row;
      row.n = n;
      row.instance = k;
      row.ward = ward_residual(g);
      row.schur = schur_residual(s.h, g, gi, i);
      row.minor = minor_identity_residual(g, gi, i);
      row.resolvent = resolvent_identity_residual(g, resolvent(s.h, z2));
      row.decomposition = t.decomposition_residual;
      row.self_consistent = t.self_consistent_residual;
      row.deterministic = deterministic_bound_ratio(g);
      return row;
    });
    out.insert(out.end(), rows.begin(), rows.end());
  }
  return out;
}

std::vector<double> semicircle_distances(const EnsembleSpec& spec, const std::vector<Seed>& seeds) {
  const auto profile = spec.make_profile();
  return parallel_map<double>(seeds.size(), [&](Index k) {
    return esd_ks_semicircle(eigendecompose(spec.sample(profile, seeds[k])));
  });
}

std::vector<ResamplingRow> resampling_consistency(const EnsembleSpec& spec,
                                                  const std::vector<std::pair<Index, Index>>& positions,
                                                  Index draws, Seed seed, double alpha) {
  const auto profile = spec.make_profile();
  const double thr = label_threshold(profile->n, profile->constants.eps);
  std::vector<ResamplingRow> out;
  for (std::size_t k = 0; k < positions.size(); ++k) {
    const auto [i, j] = positions[k];
    require(i < profile->n && j < profile->n, ErrorCode::invalid_argument, "entry position out of range");
    const EntryLaw law = spec.law.with_variance(profile->s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    const ConditionalLaws cond = conditional_laws(law, thr);
    std::vector<double> direct(draws), staged(draws);
    Stream rd(seed, stream_tag::entry, k, 0);
    Stream rl(seed, stream_tag::label, k, 1);
    Stream rc(seed, stream_tag::conditioned, k, 2);
    const double q = 1.0 - cond.p;
    for (Index d = 0; d < draws; ++d) {
      direct[d] = law.sample(rd);
      staged[d] = rl.uniform() < q ? cond.sample_b(rc) : cond.sample_a(rc);
    }
    ResamplingRow row;
    row.i = i;
    row.j = j;
    row.ks = stats::ks_two_sample(std::move(direct), std::move(staged));
    row.critical = stats::ks_critical_value(draws, draws, alpha);
    row.pass = row.ks < row.critical;
    out.push_back(row);
  }
  return out;
}

}  // namespace rmt::experiments
