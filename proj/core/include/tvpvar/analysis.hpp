#pragma once

#include <armadillo>
#include <string>
#include <vector>

#include "tvpvar/config.hpp"
#include "tvpvar/identify.hpp"

namespace tvpvar {

// Responses to a unit structural shock in direction q (a unit-norm rotation
// column). Row h = horizon h, cumulated by default since the variables enter
// the VAR in differences. Output is (horizons+1) x n.
arma::mat irf_paths(const MaShape& shape, const arma::vec& q, int horizons,
                    bool cumulate = true);

// Per-variable share of the K-period forecast error variance attributed to
// the shock in direction q.
arma::vec fevd_shares(const MaShape& shape, const arma::vec& q, int k_horizon);

struct VolPair {
  arma::vec unconditional;  // sqrt diag of Sigma
  arma::vec conditional;    // |e_i' omega q| per variable
};
VolPair conditional_volatility(const MaShape& shape, const arma::vec& q);

struct PredictResult {
  arma::vec r2;       // per variable
  bool stable = true; // false when the companion matrix is explosive
};
// Forecast R^2 at horizon h from the date-t coefficients; the unconditional
// variance comes from the discrete Lyapunov solution on the companion form.
PredictResult predictability(const arma::vec& phi_t, const arma::mat& sigma,
                             int n, int lags, int h);

// structural shock realization q' * omega^{-1} * v_t
double structural_shock(const MaShape& shape, const arma::vec& q,
                        const arma::vec& reduced_residual);

// shock_draws: draws x dates. Per episode: sum over years of the
// posterior-median shock.
std::vector<double> episode_shocks(const arma::mat& shock_draws,
                                   const std::vector<int>& years,
                                   const std::vector<EpisodeSpec>& episodes);

// type-7 quantile (linear interpolation between order statistics)
double quantile_type7(std::vector<double> values, double p);

struct QuantileSummary {
  double q16 = 0.0, q50 = 0.0, q84 = 0.0;
};
QuantileSummary summarize(const std::vector<double>& values);

struct TidyRow {
  int date = 0;
  std::string variable;
  int horizon = 0;
  QuantileSummary q;
  std::string stat;
};
// columns: date, variable, horizon, q16, q50, q84, stat_name
void write_tidy_csv(const std::string& path, const std::vector<TidyRow>& rows);

}  // namespace tvpvar
