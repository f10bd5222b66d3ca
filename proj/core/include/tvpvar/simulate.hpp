#pragma once

#include <armadillo>
#include <string>
#include <vector>

#include "tvpvar/dataset.hpp"
#include "tvpvar/priors.hpp"
#include "tvpvar/sampler.hpp"

namespace tvpvar {

// Synthetic data-generating process matching the estimated model family.
struct DgpSpec {
  int n = 2;
  int lags = 1;
  int T = 200;
  arma::vec phi0;            // length k; fixed coefficients or walk start
  arma::mat coeff_walk_cov;  // empty = fixed coefficients
  arma::vec lnsig0;          // length n, initial log variances
  arma::vec vol_walk_var;    // empty = constant volatility, else g per eq
  arma::mat a_lower;         // unit lower triangular A; empty = identity
  double dof = arma::datum::inf;  // finite = Student-t mixture weights
  std::uint64_t seed = 1;
  int start_year = 1;

  int k() const { return n * (n * lags + 1); }
};

struct SimulatedPanel {
  TimeSeriesPanel panel;
  VarState truth;
};

SimulatedPanel simulate_panel(const DgpSpec& spec);

// zero presample; row t regressors use simulated history
ModelData model_data_from_obs(const arma::mat& y, int lags);

// prior draws used by the Geweke harness (and reusable in tests)
Hyperparams simulate_hyper_prior(const PriorSet& priors, Rng& rng);
VarState simulate_state_prior(const PriorSet& priors, const Hyperparams& hyper,
                              int T, Rng& rng);
arma::mat simulate_obs(const VarState& state, int n, int lags, Rng& rng);

struct GewekeConfig {
  int n = 2;
  int lags = 1;
  int T = 30;
  int n_rep = 5000;
  int sc_thin = 20;  // sweeps per recorded successive-conditional draw
  std::uint64_t seed = 1;
  double mh_scale = 4.0;
  bool corrupt_lambda = false;  // fault-injection mode for harness checks
};

struct GewekeStat {
  std::string name;
  double mean_marginal = 0.0;
  double mean_successive = 0.0;
  double z = 0.0;
};

// proper, well-conditioned priors for the joint-distribution test
PriorSet geweke_priors(int n, int lags);

// Compares moments of 20 monitored statistics between the
// marginal-conditional and successive-conditional simulators.
std::vector<GewekeStat> geweke_check(const GewekeConfig& config);

void write_z_table(const std::string& path,
                   const std::vector<GewekeStat>& stats);

}  // namespace tvpvar
