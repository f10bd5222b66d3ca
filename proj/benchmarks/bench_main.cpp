#include <benchmark/benchmark.h>

#include "tvpvar/sampler.hpp"
#include "tvpvar/simulate.hpp"
#include "tvpvar/statespace.hpp"

namespace {

using namespace tvpvar;

StateSpaceSpec make_spec(int T, int k, int n_obs) {
  StateSpaceSpec spec;
  spec.trans_cov = 1e-4 * arma::eye(k, k);
  spec.init_mean.zeros(k);
  spec.init_cov = arma::eye(k, k);
  Rng rng(7);
  for (int t = 0; t < T; ++t) {
    spec.obs_loading.push_back(rng.normal_mat(n_obs, k));
    spec.obs_cov.push_back(arma::eye(n_obs, n_obs));
  }
  return spec;
}

void BM_KalmanFilter(benchmark::State& state) {
  const int T = 700, k = 21, n_obs = 3;
  const auto spec = make_spec(T, k, n_obs);
  Rng rng(11);
  const arma::mat obs = rng.normal_mat(T, n_obs);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kalman_filter(spec, obs));
  }
}
BENCHMARK(BM_KalmanFilter)->Unit(benchmark::kMillisecond);

void BM_BackwardSample(benchmark::State& state) {
  const int T = 700, k = 21, n_obs = 3;
  const auto spec = make_spec(T, k, n_obs);
  Rng rng(11);
  const arma::mat obs = rng.normal_mat(T, n_obs);
  const auto filt = kalman_filter(spec, obs);
  for (auto _ : state) {
    benchmark::DoNotOptimize(backward_sample(filt, spec.trans_cov, rng));
  }
}
BENCHMARK(BM_BackwardSample)->Unit(benchmark::kMillisecond);

void BM_GibbsSweep(benchmark::State& state) {
  DgpSpec spec;
  spec.n = 3;
  spec.lags = 2;
  spec.T = 700;
  spec.phi0.zeros(spec.k());
  spec.phi0(1) = 0.3;
  spec.lnsig0 = arma::vec(3, arma::fill::value(std::log(1.0)));
  spec.seed = 21;
  const auto sim = simulate_panel(spec);
  const ModelData data = model_data_from_obs(sim.panel.data, spec.lags);
  const PriorSet priors = geweke_priors(3, 2);
  Rng rng(5);
  VarState st = initial_state(data, priors);
  Hyperparams hy = initial_hyper(priors);
  MhState mh(3);
  for (auto _ : state) {
    gibbs_sweep(data, st, hy, priors, rng, mh);
  }
}
BENCHMARK(BM_GibbsSweep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
