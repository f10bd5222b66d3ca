#pragma once

#include <armadillo>
#include <functional>
#include <string>
#include <vector>

#include "tvpvar/config.hpp"
#include "tvpvar/dataset.hpp"
#include "tvpvar/priors.hpp"
#include "tvpvar/rng.hpp"

namespace tvpvar {

// Estimation sample with regressors prebuilt. Row t of `x` holds
// [1, y_{t-1}, ..., y_{t-p}]; the first `lags` regressor rows draw on the
// presample (tail of the training range).
struct ModelData {
  arma::mat y;  // T x n
  arma::mat x;  // T x m, m = n*lags + 1
  std::vector<int> years;
  int n = 0;
  int lags = 0;

  int T() const { return static_cast<int>(y.n_rows); }
  int m() const { return n * lags + 1; }
  int k() const { return n * m(); }
};

ModelData build_model_data(const TimeSeriesPanel& panel, int training_len,
                           int lags);

// Full latent state path of one draw.
struct VarState {
  arma::mat phi;     // T x k
  arma::mat alpha;   // T x n(n-1)/2
  arma::mat lnsig;   // T x n, log variances
  arma::mat lambda;  // T x n, t-mixture weights
};

struct Hyperparams {
  arma::mat hyper_q;                 // k x k
  std::vector<arma::mat> s_blocks;   // per equation i >= 2
  arma::vec g;                       // n
  arma::vec v_lambda;                // n
};

// unit-lower-triangular A from one row of the alpha path
arma::mat a_matrix(const arma::rowvec& alpha_t, int n);
// Sigma_t = A^{-1} H A^{-1}' with H = diag(exp(lnsig)/lambda)
arma::mat sigma_at(const arma::rowvec& alpha_t, const arma::rowvec& lnsig_t,
                   const arma::rowvec& lambda_t, int n);

arma::mat reduced_residuals(const ModelData& data, const arma::mat& phi);
// orthogonalized residuals A_t * (y_t - X_t phi_t)
arma::mat ortho_residuals(const ModelData& data, const VarState& state);

// MH bookkeeping for the adaptive degrees-of-freedom step
struct MhState {
  arma::vec scale;     // per equation
  arma::vec accepted;  // counts
  arma::vec proposed;
  bool adapt = true;

  explicit MhState(int n, double initial_scale = 1.0, bool adapt_on = true)
      : scale(n, arma::fill::value(initial_scale)),
        accepted(n, arma::fill::zeros),
        proposed(n, arma::fill::zeros),
        adapt(adapt_on) {}
  void maybe_adapt();
  arma::vec acceptance_rates() const;
};

// Individual Gibbs steps, exposed for unit tests and the Geweke harness.
void draw_lambda(const ModelData& data, VarState& state,
                 const Hyperparams& hyper, Rng& rng);
void draw_dof(const VarState& state, Hyperparams& hyper,
              const PriorSet& priors, Rng& rng, MhState& mh);
void draw_g(const VarState& state, Hyperparams& hyper, const PriorSet& priors,
            Rng& rng);
void draw_volatility(const ModelData& data, VarState& state,
                     const Hyperparams& hyper, const PriorSet& priors,
                     Rng& rng);
void draw_alpha(const ModelData& data, VarState& state,
                const Hyperparams& hyper, const PriorSet& priors, Rng& rng);
void draw_phi(const ModelData& data, VarState& state, const Hyperparams& hyper,
              const PriorSet& priors, Rng& rng,
              bool stability_filter = false);
void draw_hyper_q(const VarState& state, Hyperparams& hyper,
                  const PriorSet& priors, Rng& rng);
void draw_hyper_s(const VarState& state, Hyperparams& hyper,
                  const PriorSet& priors, Rng& rng);
// all time-invariant hyperparameters at once (Q, S blocks, g)
void draw_hyper(const VarState& state, Hyperparams& hyper,
                const PriorSet& priors, Rng& rng);

// one full sweep in the fixed step order:
// lambda, dof, g, volatility, alpha, phi, Q, S
void gibbs_sweep(const ModelData& data, VarState& state, Hyperparams& hyper,
                 const PriorSet& priors, Rng& rng, MhState& mh,
                 bool stability_filter = false);

// deterministic starting point: flat paths at the prior means
VarState initial_state(const ModelData& data, const PriorSet& priors);
Hyperparams initial_hyper(const PriorSet& priors);

using DrawCallback =
    std::function<void(int index, const VarState&, const Hyperparams&)>;

struct GibbsProgress {
  arma::vec dof_acceptance;  // per equation, post-burn-in
  int n_stored = 0;
};

GibbsProgress run_gibbs(const ModelData& data, const PriorSet& priors,
                        const SamplerConfig& config,
                        const DrawCallback& on_draw,
                        std::ostream* log = nullptr);

}  // namespace tvpvar
