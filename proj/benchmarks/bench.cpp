#include <benchmark/benchmark.h>

#include <memory>
#include <random>
#include <sstream>
#include <vector>

#include "ctrlseq/motif.hpp"
#include "ctrlseq/policy.hpp"
#include "ctrlseq/rewards.hpp"
#include "ctrlseq/trainer.hpp"

using namespace ctrlseq;

namespace {

Ppm random_ppm(std::size_t width, std::mt19937_64& rng) {
  Ppm ppm;
  ppm.name = "bench";
  for (std::size_t c = 0; c < width; ++c) {
    std::array<double, 4> col{};
    double sum = 0;
    for (int b = 0; b < 4; ++b) {
      col[b] = 1.0 + static_cast<double>(rng() % 97);
      sum += col[b];
    }
    for (int b = 0; b < 4; ++b) col[b] /= sum;
    ppm.columns.push_back(col);
  }
  return ppm;
}

Sequence random_sequence(std::size_t length, std::mt19937_64& rng) {
  std::vector<Base> bases;
  bases.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    bases.push_back(static_cast<Base>(rng() % 4));
  }
  return Sequence(bases);
}

void bm_pvalue_table(benchmark::State& state) {
  std::mt19937_64 rng(1);
  Ppm ppm = random_ppm(static_cast<std::size_t>(state.range(0)), rng);
  Pwm pwm = ppm_to_pwm(ppm);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_pvalue_table(pwm));
  }
}
BENCHMARK(bm_pvalue_table)->Arg(8)->Arg(12)->Arg(16);

void bm_scan(benchmark::State& state) {
  std::mt19937_64 rng(2);
  ScoredMotif motif = make_scored_motif(random_ppm(10, rng));
  Sequence seq = random_sequence(static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(scan(seq, motif.pwm, motif.table, 1e-4));
  }
}
BENCHMARK(bm_scan)->Arg(200)->Arg(1000)->Arg(5000);

void bm_sample_batch(benchmark::State& state) {
  Policy policy = Policy::uniform(static_cast<int>(state.range(0)));
  std::mt19937_64 rng(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_batch(policy, 64, 200, rng));
  }
}
BENCHMARK(bm_sample_batch)->Arg(2)->Arg(4)->Arg(6);

void bm_surrogate_gradient(benchmark::State& state) {
  Policy policy = Policy::uniform(4);
  std::mt19937_64 rng(4);
  SampledBatch batch = sample_batch(policy, 64, 200, rng);
  std::vector<double> adv(batch.size());
  for (double& a : adv) a = static_cast<double>(rng() % 200) / 100.0 - 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        surrogate_gradient(policy, batch, adv, policy, 0.2, 0.2));
  }
}
BENCHMARK(bm_surrogate_gradient);

struct GcOracle : Oracle {
  double eval(const Sequence& x) const override {
    double gc = 0;
    for (std::size_t t = 0; t < x.length(); ++t) {
      if (x[t] == 1 || x[t] == 2) gc += 1.0;
    }
    return gc / static_cast<double>(x.length());
  }
};

void bm_train_step(benchmark::State& state) {
  RewardSuite suite;
  suite.labels = {"target", "off"};
  suite.oracles.push_back(std::make_unique<GcOracle>());
  suite.oracles.push_back(std::make_unique<GcOracle>());

  TrainerConfig config;
  config.batch_size = 64;
  config.epochs = 1;
  config.length = 100;
  config.order = 4;
  config.deltas = {0.5};
  config.seed = 5;
  TrainerState trainer = make_trainer_state(config, suite, Policy::uniform(4));
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_step(trainer, suite, config));
  }
}
BENCHMARK(bm_train_step);

}  // namespace

BENCHMARK_MAIN();
