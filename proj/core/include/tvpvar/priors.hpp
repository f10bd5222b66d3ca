#pragma once

#include <armadillo>
#include <string>
#include <vector>

#include "tvpvar/dataset.hpp"

namespace tvpvar {

// Hyperparameters and initial states calibrated from the training sample.
// Coefficient vectors stack equation blocks: for equation i, the block is
// [intercept, lag-1 coefs, ..., lag-p coefs], so k = n * (n*lags + 1).
// alpha stacks the free lower-triangular elements of A row by row:
// (2,1), (3,1), (3,2), ...
struct PriorSet {
  int n = 0;
  int lags = 0;

  arma::vec phi0_mean;
  arma::mat phi0_cov;

  arma::vec a0_mean;
  arma::vec a0_var;   // diagonal of a0 covariance, 10*|a0_mean|

  arma::vec sigma0;   // initial variances, diagonal of v_ols

  arma::mat hyper_q_scale;  // Q-bar_0
  double hyper_q_dof = 0.0; // T_0

  std::vector<arma::mat> s_scales;  // per equation i >= 2, dim i-1
  std::vector<double> s_dofs;       // K_i, default block dim + 1

  double g_scale = 1e-4;  // inverse-gamma scale s0 (prior is IG(s0/2, v0/2))
  double g_dof = 1.0;     // inverse-gamma dof v0

  double dof_prior_mean = 20.0;  // v_0 for the degrees-of-freedom prior

  int k() const { return n * (n * lags + 1); }
  int n_alpha() const { return n * (n - 1) / 2; }
};

PriorSet calibrate(const TimeSeriesPanel& training, int lags);

void save_priors(const PriorSet& priors, const std::string& path);
PriorSet load_priors(const std::string& path);

}  // namespace tvpvar
