#include "tvpvar/statespace.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tvpvar {

namespace {

void check_spec(const StateSpaceSpec& spec, const arma::mat& obs) {
  const arma::uword T = obs.n_rows;
  if (spec.obs_loading.size() != T || spec.obs_cov.size() != T)
    throw std::invalid_argument(
        "kalman_filter: spec length does not match observations");
  const arma::uword k = spec.init_mean.n_elem;
  for (arma::uword t = 0; t < T; ++t) {
    if (spec.obs_loading[t].n_cols != k ||
        spec.obs_loading[t].n_rows != obs.n_cols ||
        spec.obs_cov[t].n_rows != obs.n_cols)
      throw std::invalid_argument("kalman_filter: dimension mismatch at t=" +
                                  std::to_string(t));
  }
}

inline arma::mat sym(const arma::mat& m) { return 0.5 * (m + m.t()); }

}  // namespace

arma::mat robust_inv_psd(const arma::mat& m) {
  arma::mat out;
  if (arma::inv_sympd(out, sym(m))) return out;
  const double base =
      std::max(arma::trace(m), 0.0) / static_cast<double>(m.n_rows);
  double ridge = 1e-10 * std::max(base, 1e-300);
  const double cap = 1e-6 * std::max(base, 1e-300);
  while (ridge <= cap) {
    if (arma::inv_sympd(out, sym(m) + ridge * arma::eye(m.n_rows, m.n_rows)))
      return out;
    ridge *= 10.0;
  }
  return arma::pinv(sym(m));
}

FilterOutput kalman_filter(const StateSpaceSpec& spec, const arma::mat& obs) {
  check_spec(spec, obs);
  const arma::uword T = obs.n_rows;
  const arma::uword k = spec.init_mean.n_elem;

  FilterOutput out;
  out.filt_mean.set_size(T, k);
  out.pred_mean.set_size(T, k);
  out.filt_cov.resize(T);
  out.pred_cov.resize(T);
  out.loglik.set_size(T);

  arma::vec m = spec.init_mean;
  arma::mat P = sym(spec.init_cov);
  const double log2pi = std::log(2.0 * M_PI);

  for (arma::uword t = 0; t < T; ++t) {
    // predict (identity transition)
    const arma::vec m_pred = m;
    const arma::mat P_pred = sym(P + spec.trans_cov);

    const arma::mat& H = spec.obs_loading[t];
    const arma::vec innov = obs.row(t).t() - H * m_pred;
    const arma::mat S = sym(H * P_pred * H.t() + spec.obs_cov[t]);
    if (!S.is_finite())
      throw std::runtime_error(
          "kalman_filter: non-finite innovation covariance at t=" +
          std::to_string(t));
    const arma::mat S_inv = robust_inv_psd(S);
    const arma::mat K = P_pred * H.t() * S_inv;

    m = m_pred + K * innov;
    P = sym(P_pred - K * H * P_pred);

    double logdet, sign;
    arma::log_det(logdet, sign, S);
    out.loglik(t) = -0.5 * (static_cast<double>(obs.n_cols) * log2pi + logdet +
                            arma::dot(innov, S_inv * innov));

    out.pred_mean.row(t) = m_pred.t();
    out.pred_cov[t] = P_pred;
    out.filt_mean.row(t) = m.t();
    out.filt_cov[t] = P;
  }
  return out;
}

arma::mat backward_sample(const FilterOutput& filter,
                          const arma::mat& trans_cov, Rng& rng) {
  const arma::uword T = filter.filt_mean.n_rows;
  const arma::uword k = filter.filt_mean.n_cols;
  (void)trans_cov;  // implied by pred_cov = filt_cov + trans_cov

  arma::mat path(T, k);
  arma::vec x = mvn_draw(rng, filter.filt_mean.row(T - 1).t(),
                         filter.filt_cov[T - 1]);
  path.row(T - 1) = x.t();

  for (arma::uword t = T - 1; t-- > 0;) {
    const arma::mat& P_filt = filter.filt_cov[t];
    const arma::mat gain = P_filt * robust_inv_psd(filter.pred_cov[t + 1]);
    const arma::vec mean = filter.filt_mean.row(t).t() +
                           gain * (x - filter.pred_mean.row(t + 1).t());
    const arma::mat cov = 0.5 * ((P_filt - gain * P_filt) +
                                 (P_filt - gain * P_filt).t());
    if (!cov.is_finite())
      throw std::runtime_error(
          "backward_sample: non-finite conditional covariance at t=" +
          std::to_string(t));
    x = mvn_draw(rng, mean, cov);
    path.row(t) = x.t();
  }
  return path;
}

}  // namespace tvpvar
