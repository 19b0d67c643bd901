#include <benchmark/benchmark.h>

#include <random>

#include "flateta/eta.hpp"
#include "flateta/flow.hpp"
#include "flateta/geometry.hpp"
#include "flateta/spectral.hpp"

using namespace flateta;

namespace {

Connection diagonal_torus(int rank) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::vector<CMatrix> comps;
  for (int j = 0; j < 3; ++j) {
    CMatrix d = CMatrix::Zero(rank, rank);
    for (int k = 0; k < rank; ++k) d(k, k) = kTwoPiI * Complex(u(rng), 0.1 * u(rng));
    comps.push_back(d);
  }
  return Connection::constant(3, comps);
}

void BM_Wedge(benchmark::State& state) {
  const int rank = int(state.range(0));
  const TrigPolyForm a = diagonal_torus(rank).form() +
                         TrigPolyForm::monomial(3, 0.3 * CMatrix::Ones(rank, rank), {1, 0, -1}, IndexSet::of({1}));
  for (auto _ : state) benchmark::DoNotOptimize(wedge(a, wedge(a, a)));
}
BENCHMARK(BM_Wedge)->Arg(1)->Arg(2)->Arg(4);

void BM_ChernSimonsForm(benchmark::State& state) {
  const Connection c0 = diagonal_torus(2);
  const Connection c1 = r_deformation(c0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(cs_form(c0, c1));
}
BENCHMARK(BM_ChernSimonsForm);

void BM_TorusSpectrum(benchmark::State& state) {
  const Connection c = diagonal_torus(2);
  for (auto _ : state) benchmark::DoNotOptimize(spectrum(build_truncation(c, int(state.range(0)))));
}
BENCHMARK(BM_TorusSpectrum)->Arg(1)->Arg(2)->Arg(4);

void BM_CircleGalerkin(benchmark::State& state) {
  TrigPolyForm a = TrigPolyForm::scalar(1, kTwoPiI * 0.3, {0}, IndexSet::of({0}));
  a += TrigPolyForm::scalar(1, 0.5, {1}, IndexSet::of({0}));
  const Connection c(a);
  for (auto _ : state) benchmark::DoNotOptimize(spectrum(build_truncation(c, int(state.range(0)))));
}
BENCHMARK(BM_CircleGalerkin)->Arg(16)->Arg(64);

void BM_HurwitzZeta(benchmark::State& state) {
  const Complex a(0.3, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(hurwitz_zeta(0.0, a));
}
BENCHMARK(BM_HurwitzZeta);

void BM_GaugeTrack(benchmark::State& state) {
  const Connection c = Connection::circle(Complex(0.3, 0.1));
  for (auto _ : state) {
    const OperatorPath op = [&c](double t) { return build_truncation(gauge_path(c, 2, t), 10); };
    benchmark::DoNotOptimize(spectral_flow(track_operator_path(op, 16)));
  }
}
BENCHMARK(BM_GaugeTrack);

}  // namespace

BENCHMARK_MAIN();
