#include <benchmark/benchmark.h>

#include "electrogp/corp.hpp"
#include "electrogp/embed.hpp"
#include "electrogp/gpcore.hpp"
#include "electrogp/inference.hpp"
#include "electrogp/model.hpp"
#include "electrogp/synthetic.hpp"

using namespace electrogp;

namespace {

const FittedModel& parabola_fit() {
  static const FittedModel model = [] {
    FitSettings s;
    s.center = true;
    return fit(simulate(Shape::kParabola, 100, 0.05, 1).points, s);
  }();
  return model;
}

std::vector<double> spaced(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = (i + 0.5) / static_cast<double>(n);
  return x;
}

}  // namespace

static void BM_CorpSample(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample(n, {}, seed++));
}
BENCHMARK(BM_CorpSample)->Arg(10)->Arg(50)->Arg(100);

static void BM_CorpJointGradient(benchmark::State& state) {
  const auto x = spaced(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(joint_log_density_gradient(x, {}));
}
BENCHMARK(BM_CorpJointGradient)->Arg(100)->Arg(400);

static void BM_GpLmlGradient(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = spaced(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = std::sin(6.0 * x[i]);
  const KernelParams p = KernelParams::natural(1.0, 10.0, 0.01);
  for (auto _ : state) {
    GPDim dim(x, y, p);
    benchmark::DoNotOptimize(dim.log_marginal_likelihood());
    benchmark::DoNotOptimize(dim.grad_log_marginal());
  }
}
BENCHMARK(BM_GpLmlGradient)->Arg(50)->Arg(100)->Arg(200);

static void BM_Lle(benchmark::State& state) {
  const SyntheticData syn = simulate(Shape::kSpiral, static_cast<std::size_t>(state.range(0)), 0.05, 1);
  for (auto _ : state) benchmark::DoNotOptimize(lle_1d(syn.points, {}));
}
BENCHMARK(BM_Lle)->Arg(100)->Arg(300);

static void BM_FitParabola(benchmark::State& state) {
  const SyntheticData syn = simulate(Shape::kParabola, static_cast<std::size_t>(state.range(0)), 0.05, 1);
  FitSettings s;
  s.center = true;
  for (auto _ : state) benchmark::DoNotOptimize(fit(syn.points, s));
}
BENCHMARK(BM_FitParabola)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_MeanCurve(benchmark::State& state) {
  const FittedModel& m = parabola_fit();
  for (auto _ : state) benchmark::DoNotOptimize(mean_curve(m, 512));
}
BENCHMARK(BM_MeanCurve);

static void BM_Band(benchmark::State& state) {
  const FittedModel& m = parabola_fit();
  const CurveEstimate curve = mean_curve(m, 512);
  for (auto _ : state) benchmark::DoNotOptimize(uncertainty_band(m, curve, {0.95, 100, 50, 1}));
}
BENCHMARK(BM_Band)->Unit(benchmark::kMillisecond);

static void BM_PredictMap(benchmark::State& state) {
  const FittedModel& m = parabola_fit();
  const PartialObservation obs{{0}, {0.2}, {1}};
  for (auto _ : state) benchmark::DoNotOptimize(predict_latent_map(m, obs));
}
BENCHMARK(BM_PredictMap);

static void BM_PolylineDistance(benchmark::State& state) {
  const CurveEstimate curve = mean_curve(parabola_fit(), 512);
  const std::vector<double> p{0.3, -0.2};
  for (auto _ : state) benchmark::DoNotOptimize(point_to_polyline_distance(p, curve));
}
BENCHMARK(BM_PolylineDistance);
BENCHMARK_MAIN();
