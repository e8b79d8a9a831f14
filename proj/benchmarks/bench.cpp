#include <benchmark/benchmark.h>

#include "relaxo/inference.hpp"
#include "relaxo/rate_dynamics.hpp"
#include "relaxo/spin_model.hpp"
#include "relaxo/synth.hpp"

using namespace relaxo;

namespace {

const rates::RateParams kRates{35.1, 99.8};
const rates::ReadoutModel kReadout{1.0, 0.0, 1.0};

void bm_spin_levels(benchmark::State& state) {
  const spin::DefectParams params{3480.0, 48.0, 2.0, {}, ""};
  const spin::FieldConfig field{120.0, 0.3, 1.1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(spin::spin_levels(spin::build_hamiltonian(params, field)));
  }
}
BENCHMARK(bm_spin_levels);

void bm_evolve_analytic(benchmark::State& state) {
  const rates::Populations p0{1.0, 0.0, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(rates::evolve_analytic(p0, kRates, 5.0));
  }
}
BENCHMARK(bm_evolve_analytic);

void bm_evolve_numeric(benchmark::State& state) {
  const rates::Populations p0{1.0, 0.0, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(rates::evolve_numeric(p0, kRates, 5.0, 5.0 / 1000.0));
  }
}
BENCHMARK(bm_evolve_numeric);

void bm_paired_generation(benchmark::State& state) {
  synth::AcquisitionConfig acq;
  acq.tau_grid_us = synth::default_tau_grid_us(kRates);
  acq.noise_scale = 0.05;
  acq.seed = 7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(synth::paired_f1_f2(kRates, kReadout, acq));
  }
}
BENCHMARK(bm_paired_generation);

void bm_fit_pair(benchmark::State& state) {
  synth::AcquisitionConfig acq;
  acq.tau_grid_us = synth::default_tau_grid_us(kRates);
  acq.noise_scale = 0.05;
  acq.seed = 7;
  const auto [f1, f2] = synth::paired_f1_f2(kRates, kReadout, acq);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit::extract_rates(f1, f2));
  }
}
BENCHMARK(bm_fit_pair);

}  // namespace

BENCHMARK_MAIN();
