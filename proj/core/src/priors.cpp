#include "tvpvar/priors.hpp"

#include <cmath>
#include <stdexcept>

#include "tvpvar/config.hpp"

namespace tvpvar {

PriorSet calibrate(const TimeSeriesPanel& training, int lags) {
  const int n = static_cast<int>(training.n());
  const int T = static_cast<int>(training.T());
  const int m = n * lags + 1;
  if (T <= n * lags + n + 1)
    throw std::runtime_error("calibrate: training sample too short");

  // fixed-coefficient VAR by OLS on the training sample
  const int T_eff = T - lags;
  arma::mat X(T_eff, m);
  arma::mat Y(T_eff, n);
  for (int t = 0; t < T_eff; ++t) {
    X(t, 0) = 1.0;
    for (int l = 1; l <= lags; ++l)
      X(t, arma::span(1 + (l - 1) * n, l * n)) =
          training.data.row(t + lags - l);
    Y.row(t) = training.data.row(t + lags);
  }

  const arma::mat xtx = X.t() * X;
  arma::mat xtx_inv;
  if (!arma::inv_sympd(xtx_inv, arma::symmatu(xtx)))
    throw std::runtime_error("calibrate: singular regressor cross-product");
  const arma::mat B = xtx_inv * X.t() * Y;  // m x n
  const arma::mat resid = Y - X * B;
  const arma::mat v_ols = resid.t() * resid / static_cast<double>(T_eff - m);

  PriorSet p;
  p.n = n;
  p.lags = lags;

  p.phi0_mean = arma::vectorise(B);  // equation-major blocks
  p.phi0_cov = arma::kron(v_ols, xtx_inv);

  // scaled Cholesky factor: row i of L divided by L_ii, strictly lower part
  const arma::mat L = arma::chol(arma::symmatu(v_ols), "lower");
  p.a0_mean.set_size(p.n_alpha());
  int idx = 0;
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) p.a0_mean(idx++) = L(i, j) / L(i, i);
  p.a0_var = 10.0 * arma::abs(p.a0_mean);

  p.sigma0 = v_ols.diag();

  p.hyper_q_scale = p.phi0_cov * 1e-4;
  p.hyper_q_dof = static_cast<double>(T);

  for (int i = 1; i < n; ++i) {
    const int start = i * (i - 1) / 2;
    arma::vec block = arma::abs(p.a0_mean.subvec(start, start + i - 1));
    p.s_scales.push_back(arma::diagmat(block * 1e-3));
    p.s_dofs.push_back(static_cast<double>(i) + 1.0);
  }

  p.g_scale = 1e-4;
  p.g_dof = 1.0;
  p.dof_prior_mean = 20.0;
  return p;
}

void save_priors(const PriorSet& p, const std::string& path) {
  KeyValueFile kv;
  kv.set_int("n", p.n);
  kv.set_int("lags", p.lags);
  auto set_mat = [&](const std::string& key, const arma::mat& m) {
    kv.set_doubles(key, arma::conv_to<std::vector<double>>::from(
                            arma::vectorise(m)));
  };
  set_mat("phi0_mean", p.phi0_mean);
  set_mat("phi0_cov", p.phi0_cov);
  set_mat("a0_mean", p.a0_mean);
  set_mat("a0_var", p.a0_var);
  set_mat("sigma0", p.sigma0);
  set_mat("hyper_q_scale", p.hyper_q_scale);
  kv.set_double("hyper_q_dof", p.hyper_q_dof);
  for (std::size_t i = 0; i < p.s_scales.size(); ++i) {
    set_mat("s_scale_" + std::to_string(i + 2), p.s_scales[i]);
    kv.set_double("s_dof_" + std::to_string(i + 2), p.s_dofs[i]);
  }
  kv.set_double("g_scale", p.g_scale);
  kv.set_double("g_dof", p.g_dof);
  kv.set_double("dof_prior_mean", p.dof_prior_mean);
  kv.save(path);
}

PriorSet load_priors(const std::string& path) {
  const KeyValueFile kv = KeyValueFile::parse(path);
  PriorSet p;
  p.n = static_cast<int>(kv.get_int("n", 0));
  p.lags = static_cast<int>(kv.get_int("lags", 0));
  const int k = p.k();
  auto get_mat = [&](const std::string& key, int rows, int cols) {
    const auto v = kv.get_doubles(key);
    if (static_cast<int>(v.size()) != rows * cols)
      throw std::runtime_error("load_priors: bad size for " + key);
    return arma::mat(v.data(), rows, cols);
  };
  p.phi0_mean = get_mat("phi0_mean", k, 1);
  p.phi0_cov = get_mat("phi0_cov", k, k);
  p.a0_mean = get_mat("a0_mean", p.n_alpha(), 1);
  p.a0_var = get_mat("a0_var", p.n_alpha(), 1);
  p.sigma0 = get_mat("sigma0", p.n, 1);
  p.hyper_q_scale = get_mat("hyper_q_scale", k, k);
  p.hyper_q_dof = kv.get_double("hyper_q_dof", 0.0);
  for (int i = 2; i <= p.n; ++i) {
    p.s_scales.push_back(get_mat("s_scale_" + std::to_string(i), i - 1, i - 1));
    p.s_dofs.push_back(kv.get_double("s_dof_" + std::to_string(i), i));
  }
  p.g_scale = kv.get_double("g_scale", 1e-4);
  p.g_dof = kv.get_double("g_dof", 1.0);
  p.dof_prior_mean = kv.get_double("dof_prior_mean", 20.0);
  return p;
}

}  // namespace tvpvar
