#include <benchmark/benchmark.h>

#include "rmt/bounds_lab.hpp"
#include "rmt/labels.hpp"
#include "rmt/linalg.hpp"
#include "rmt/resolvent.hpp"
#include "rmt/spectral_stats.hpp"

namespace {

void BM_SampleFlatStudentT(benchmark::State& state) {
  const auto n = static_cast<rmt::Index>(state.range(0));
  const auto profile = std::make_shared<const rmt::VarianceProfile>(rmt::make_profile(n, rmt::ProfileKind::flat, 0.5));
  const auto law = rmt::EntryLaw::student_t(2.6);
  rmt::Seed seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(rmt::sample_matrix(profile, law, seed++).h.data());
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n * (n + 1) / 2));
}
BENCHMARK(BM_SampleFlatStudentT)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Eigenvalues(benchmark::State& state) {
  const auto n = static_cast<rmt::Index>(state.range(0));
  const rmt::WignerSample s = rmt::sample_goe(n, 7);
  for (auto _ : state) benchmark::DoNotOptimize(rmt::linalg::symmetric_eigenvalues(s.h).data());
}
BENCHMARK(BM_Eigenvalues)->Arg(500)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_EigenSystem(benchmark::State& state) {
  const auto n = static_cast<rmt::Index>(state.range(0));
  const rmt::WignerSample s = rmt::sample_goe(n, 7);
  for (auto _ : state) benchmark::DoNotOptimize(rmt::linalg::symmetric_eigen(s.h, true).vectors.data());
}
BENCHMARK(BM_EigenSystem)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ResolventLU(benchmark::State& state) {
  const auto n = static_cast<rmt::Index>(state.range(0));
  const rmt::WignerSample s = rmt::sample_goe(n, 7);
  for (auto _ : state) benchmark::DoNotOptimize(rmt::resolvent(s.h, {0.1, 0.05}).g.data());
}
BENCHMARK(BM_ResolventLU)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_StieltjesFromSpectrum(benchmark::State& state) {
  const auto n = static_cast<rmt::Index>(state.range(0));
  const rmt::RealVector l = rmt::linalg::symmetric_eigenvalues(rmt::sample_goe(n, 7).h);
  const std::span<const double> v(l.data(), static_cast<std::size_t>(l.size()));
  for (auto _ : state) benchmark::DoNotOptimize(rmt::linalg::stieltjes(v, {0.0, 0.01}));
}
BENCHMARK(BM_StieltjesFromSpectrum)->Arg(2000);

void BM_HDistributedLabel(benchmark::State& state) {
  const auto n = static_cast<rmt::Index>(state.range(0));
  const rmt::VarianceProfile p = rmt::make_profile(n, rmt::ProfileKind::flat, 1.0);
  const auto law = rmt::EntryLaw::student_t(3.2);
  rmt::Seed seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(rmt::sample_h_distributed_label(p, law, seed++).count_b_upper());
}
BENCHMARK(BM_HDistributedLabel)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_QuadraticFormReplicas(benchmark::State& state) {
  rmt::DeviationCheckConfig c;
  c.n = static_cast<rmt::Index>(state.range(0));
  c.form = rmt::DeviationForm::quadratic;
  c.replicas = 1000;
  c.xi = {2.0};
  const auto r = rmt::Coefficients::ones(c.n);
  for (auto _ : state)
    benchmark::DoNotOptimize(rmt::check_form(c, r, rmt::ScalarLaw::truncated(rmt::EntryLaw::student_t(2.6)), 3).pass);
}
BENCHMARK(BM_QuadraticFormReplicas)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
