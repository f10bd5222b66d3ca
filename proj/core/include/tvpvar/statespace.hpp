#pragma once

#include <armadillo>
#include <vector>

#include "tvpvar/rng.hpp"

namespace tvpvar {

// Random-walk state, time-varying observation equation:
//   y_t = H_t x_t + w_t,  w_t ~ N(0, R_t)
//   x_t = x_{t-1} + v_t,  v_t ~ N(0, trans_cov)
struct StateSpaceSpec {
  std::vector<arma::mat> obs_loading;  // per date, n_obs x n_state
  std::vector<arma::mat> obs_cov;      // per date, n_obs x n_obs
  arma::mat trans_cov;                 // n_state x n_state
  arma::vec init_mean;
  arma::mat init_cov;
};

struct FilterOutput {
  arma::mat filt_mean;  // T x n_state, row t = m_{t|t}
  arma::mat pred_mean;  // T x n_state, row t = m_{t|t-1}
  std::vector<arma::mat> filt_cov;
  std::vector<arma::mat> pred_cov;
  arma::vec loglik;  // per-date contributions
};

FilterOutput kalman_filter(const StateSpaceSpec& spec, const arma::mat& obs);

// Carter-Kohn backward recursion: draws the full state path from its joint
// conditional given the observations.
arma::mat backward_sample(const FilterOutput& filter,
                          const arma::mat& trans_cov, Rng& rng);

// Symmetric-PSD inverse with escalating ridge (1e-10*trace/dim up to 1e-6),
// pseudo-inverse as the final fallback.
arma::mat robust_inv_psd(const arma::mat& m);

}  // namespace tvpvar
