#include <benchmark/benchmark.h>

#include "testgen/gan.hpp"
#include "testgen/input_space.hpp"
#include "testgen/nn.hpp"
#include "testgen/sut.hpp"

using namespace testgen;

namespace {

gan::TrainingSet random_suite(std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  gan::TrainingSet s{nn::Matrix(n, gan::kTestDim), std::vector<double>(n)};
  for (double& v : s.inputs.values()) v = u(rng);
  for (double& v : s.fitness) v = 0.5 * (u(rng) + 1.0);
  return s;
}

void BM_GeneratorForward(benchmark::State& state) {
  Rng rng(1);
  const gan::GanModel model = gan::init_gan({}, rng);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gan::sample_candidates(model, n, rng));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GeneratorForward)->Arg(1)->Arg(32)->Arg(256);

void BM_DiscriminatorBackward(benchmark::State& state) {
  Rng rng(2);
  const gan::GanModel model = gan::init_gan({}, rng);
  const gan::TrainingSet s = random_suite(static_cast<std::size_t>(state.range(0)), rng);
  nn::Matrix y(s.fitness.size(), 1);
  std::copy(s.fitness.begin(), s.fitness.end(), y.values().begin());
  for (auto _ : state) benchmark::DoNotOptimize(nn::backward(model.discriminator, s.inputs, y));
}
BENCHMARK(BM_DiscriminatorBackward)->Arg(32)->Arg(200);

void BM_GeneratorGradients(benchmark::State& state) {
  Rng rng(3);
  const gan::GanModel model = gan::init_gan({}, rng);
  std::normal_distribution<double> n01;
  nn::Matrix z(32, gan::kLatentDim);
  for (double& v : z.values()) v = n01(rng);
  for (auto _ : state) benchmark::DoNotOptimize(gan::generator_gradients(model, z));
}
BENCHMARK(BM_GeneratorGradients);

void BM_TrainGan(benchmark::State& state) {
  Rng rng(4);
  const gan::TrainingSet s = random_suite(static_cast<std::size_t>(state.range(0)), rng);
  gan::GanModel model = gan::init_gan({}, rng);
  Rng shuffle(5);
  Rng latent(6);
  for (auto _ : state) gan::train_gan(model, s, {}, shuffle, latent);
}
BENCHMARK(BM_TrainGan)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Oracle(benchmark::State& state) {
  const InputSpace space = InputSpace::default_board();
  const FitnessSpec spec{6.0};
  const SyntheticSut sut(space, calibrate_gain({}, space, spec, 0.01));
  for (auto _ : state) benchmark::DoNotOptimize(oracle_positive_set(sut, space, spec));
}
BENCHMARK(BM_Oracle)->Unit(benchmark::kMillisecond);

void BM_SampleUniform(benchmark::State& state) {
  const InputSpace space = InputSpace::default_board();
  Rng rng(7);
  const InputSet executed = [&] {
    InputSet s;
    for (const TestInput& t : space.sample_uniform({}, 200, rng)) s.insert(t);
    return s;
  }();
  const auto k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(space.sample_uniform(executed, k, rng));
}
BENCHMARK(BM_SampleUniform)->Arg(1)->Arg(4)->Arg(32000);

void BM_Snap(benchmark::State& state) {
  const InputSpace space = InputSpace::default_board();
  Rng rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  NormalizedInput v{};
  for (auto _ : state) {
    for (double& x : v.values) x = u(rng);
    benchmark::DoNotOptimize(space.snap(v));
  }
}
BENCHMARK(BM_Snap);

}  // namespace

BENCHMARK_MAIN();
