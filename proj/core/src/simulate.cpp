#include "tvpvar/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace tvpvar {

namespace {

arma::mat obs_from_state(const VarState& state, int n, int lags, Rng& rng,
                         double clip = 1e8) {
  const int T = static_cast<int>(state.phi.n_rows);
  const int m = n * lags + 1;
  arma::mat y(T, n, arma::fill::zeros);
  for (int t = 0; t < T; ++t) {
    arma::rowvec x(m, arma::fill::zeros);
    x(0) = 1.0;
    for (int l = 1; l <= lags; ++l)
      if (t - l >= 0) x(arma::span(1 + (l - 1) * n, l * n)) = y.row(t - l);
    // row views are not contiguous in memory; copy before reshaping
    const arma::vec p = state.phi.row(t).t();
    const arma::mat B(p.memptr(), m, n);
    const arma::mat A = a_matrix(state.alpha.row(t), n);
    const arma::vec sd = arma::sqrt(arma::exp(state.lnsig.row(t).t()) /
                                    state.lambda.row(t).t());
    const arma::vec shock =
        arma::solve(arma::trimatl(A), sd % rng.normal_vec(n));
    y.row(t) = x * B + shock.t();
    if (arma::abs(y.row(t)).max() > clip)
      throw std::runtime_error("explosive path");
  }
  return y;
}

}  // namespace

SimulatedPanel simulate_panel(const DgpSpec& spec) {
  if (spec.T < 50) throw std::invalid_argument("simulate_panel: T >= 50");
  if (static_cast<int>(spec.phi0.n_elem) != spec.k())
    throw std::invalid_argument("simulate_panel: phi0 length mismatch");

  Rng rng(spec.seed);
  const int T = spec.T;
  const int n = spec.n;
  const int na = n * (n - 1) / 2;

  for (int attempt = 0; attempt < 100; ++attempt) {
    VarState s;
    s.phi.set_size(T, spec.k());
    s.lnsig.set_size(T, n);
    s.alpha.set_size(T, na);
    s.lambda.set_size(T, n);

    arma::vec phi = spec.phi0;
    arma::vec lnsig = spec.lnsig0.n_elem
                          ? spec.lnsig0
                          : arma::vec(n, arma::fill::zeros);
    arma::rowvec alpha(na, arma::fill::zeros);
    if (spec.a_lower.n_elem) {
      int idx = 0;
      for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) alpha(idx++) = spec.a_lower(i, j);
    }

    for (int t = 0; t < T; ++t) {
      if (t > 0 && spec.coeff_walk_cov.n_elem)
        phi += mvn_draw(rng, arma::vec(spec.k(), arma::fill::zeros),
                        spec.coeff_walk_cov);
      if (t > 0 && spec.vol_walk_var.n_elem)
        lnsig += arma::sqrt(spec.vol_walk_var) % rng.normal_vec(n);
      s.phi.row(t) = phi.t();
      s.lnsig.row(t) = lnsig.t();
      s.alpha.row(t) = alpha;
      for (int i = 0; i < n; ++i)
        s.lambda(t, i) = std::isfinite(spec.dof)
                             ? rng.gamma(0.5 * spec.dof, 2.0 / spec.dof)
                             : 1.0;
    }

    try {
      const arma::mat y = obs_from_state(s, n, spec.lags, rng);
      SimulatedPanel out;
      out.truth = std::move(s);
      out.panel.data = y;
      out.panel.mask.ones(T, n);
      for (int i = 0; i < n; ++i) {
        out.panel.variables.push_back("y" + std::to_string(i + 1));
        out.panel.meta.push_back("simulated");
      }
      for (int t = 0; t < T; ++t)
        out.panel.years.push_back(spec.start_year + t);
      return out;
    } catch (const std::runtime_error&) {
      if (!spec.coeff_walk_cov.n_elem) throw;  // fixed spec must be stable
      continue;  // regenerate under random-walk coefficients
    }
  }
  throw std::runtime_error(
      "simulate_panel: explosive path in 100 consecutive attempts");
}

ModelData model_data_from_obs(const arma::mat& y, int lags) {
  const int T = static_cast<int>(y.n_rows);
  const int n = static_cast<int>(y.n_cols);
  ModelData d;
  d.n = n;
  d.lags = lags;
  d.y = y;
  d.x.zeros(T, n * lags + 1);
  for (int t = 0; t < T; ++t) {
    d.x(t, 0) = 1.0;
    for (int l = 1; l <= lags; ++l)
      if (t - l >= 0)
        d.x(t, arma::span(1 + (l - 1) * n, l * n)) = y.row(t - l);
    d.years.push_back(t + 1);
  }
  return d;
}

Hyperparams simulate_hyper_prior(const PriorSet& priors, Rng& rng) {
  Hyperparams h;
  h.hyper_q = inverse_wishart(rng, priors.hyper_q_scale, priors.hyper_q_dof);
  for (std::size_t i = 0; i < priors.s_scales.size(); ++i)
    h.s_blocks.push_back(
        inverse_wishart(rng, priors.s_scales[i], priors.s_dofs[i]));
  h.g.set_size(priors.n);
  for (int i = 0; i < priors.n; ++i)
    h.g(i) = priors.g_scale / rng.chi2(priors.g_dof);
  h.v_lambda.set_size(priors.n);
  for (int i = 0; i < priors.n; ++i)
    h.v_lambda(i) =
        -priors.dof_prior_mean * std::log(std::max(rng.uniform(), 1e-300));
  return h;
}

VarState simulate_state_prior(const PriorSet& priors, const Hyperparams& hyper,
                              int T, Rng& rng) {
  VarState s;
  const int n = priors.n;
  s.phi.set_size(T, priors.k());
  s.alpha.set_size(T, priors.n_alpha());
  s.lnsig.set_size(T, n);
  s.lambda.set_size(T, n);

  arma::vec phi = mvn_draw(rng, priors.phi0_mean, priors.phi0_cov);
  arma::vec alpha =
      priors.n_alpha()
          ? mvn_draw(rng, priors.a0_mean, arma::diagmat(priors.a0_var))
          : arma::vec();
  arma::vec lnsig = arma::log(priors.sigma0);

  for (int t = 0; t < T; ++t) {
    phi += mvn_draw(rng, arma::vec(priors.k(), arma::fill::zeros),
                    hyper.hyper_q);
    for (int i = 1; i < n; ++i) {
      const int start = i * (i - 1) / 2;
      alpha.subvec(start, start + i - 1) +=
          mvn_draw(rng, arma::vec(i, arma::fill::zeros),
                   hyper.s_blocks[static_cast<std::size_t>(i - 1)]);
    }
    lnsig += arma::sqrt(hyper.g) % rng.normal_vec(n);
    s.phi.row(t) = phi.t();
    if (priors.n_alpha()) s.alpha.row(t) = alpha.t();
    s.lnsig.row(t) = lnsig.t();
    for (int i = 0; i < n; ++i)
      s.lambda(t, i) =
          rng.gamma(0.5 * hyper.v_lambda(i), 2.0 / hyper.v_lambda(i));
  }
  return s;
}

arma::mat simulate_obs(const VarState& state, int n, int lags, Rng& rng) {
  return obs_from_state(state, n, lags, rng, 1e100);
}

PriorSet geweke_priors(int n, int lags) {
  PriorSet p;
  p.n = n;
  p.lags = lags;
  const int k = p.k();
  p.phi0_mean.zeros(k);
  p.phi0_cov = 0.0025 * arma::eye(k, k);
  p.a0_mean.zeros(p.n_alpha());
  p.a0_var = 0.25 * arma::ones(p.n_alpha());
  p.sigma0.ones(n);
  // IW scale chosen so the prior mean of Q is 1e-5 * I
  p.hyper_q_dof = static_cast<double>(k) + 12.0;
  p.hyper_q_scale = 1e-5 * (p.hyper_q_dof - k - 1.0) * arma::eye(k, k);
  for (int i = 1; i < n; ++i) {
    const double dof = static_cast<double>(i) + 11.0;
    p.s_scales.push_back(1e-4 * (dof - i - 1.0) * arma::eye(i, i));
    p.s_dofs.push_back(dof);
  }
  p.g_dof = 10.0;
  p.g_scale = 0.01 * (p.g_dof - 2.0);  // prior mean 0.01
  p.dof_prior_mean = 20.0;
  return p;
}

namespace {

std::vector<double> monitored_stats(const VarState& s, const Hyperparams& h,
                                    int T) {
  const int mid = T / 2;
  const int last = T - 1;
  return {
      s.phi(0, 0),      s.phi(mid, 0),    s.phi(last, 0),  s.phi(mid, 1),
      s.alpha(0, 0),    s.alpha(mid, 0),  s.alpha(last, 0),
      s.lnsig(0, 0),    s.lnsig(mid, 0),  s.lnsig(last, 0), s.lnsig(mid, 1),
      s.lambda(0, 0),   s.lambda(mid, 0), s.lambda(last, 1),
      h.v_lambda(0),    h.v_lambda(1),
      std::log(h.g(0)), std::log(h.g(1)),
      std::log(arma::trace(h.hyper_q)),
      std::log(h.s_blocks[0](0, 0)),
  };
}

const char* kStatNames[20] = {
    "phi_first_t1",  "phi_first_mid",  "phi_first_T",  "phi_second_mid",
    "alpha_t1",      "alpha_mid",      "alpha_T",
    "lnsig1_t1",     "lnsig1_mid",     "lnsig1_T",     "lnsig2_mid",
    "lambda1_t1",    "lambda1_mid",    "lambda2_T",
    "dof_eq1",       "dof_eq2",
    "ln_g1",         "ln_g2",
    "ln_tr_q",       "ln_s11",
};

// batch-means numerical standard error for a correlated sequence
double batch_nse(const std::vector<double>& x) {
  const std::size_t M = x.size();
  if (M < 16) return 1e300;
  const std::size_t n_batch =
      static_cast<std::size_t>(std::sqrt(static_cast<double>(M)));
  const std::size_t len = M / n_batch;
  std::vector<double> means;
  for (std::size_t b = 0; b < n_batch; ++b) {
    double s = 0.0;
    for (std::size_t i = b * len; i < (b + 1) * len; ++i) s += x[i];
    means.push_back(s / static_cast<double>(len));
  }
  double mu = 0.0;
  for (double m : means) mu += m;
  mu /= static_cast<double>(means.size());
  double var = 0.0;
  for (double m : means) var += (m - mu) * (m - mu);
  var /= static_cast<double>(means.size() - 1);
  return std::sqrt(var / static_cast<double>(means.size()));
}

}  // namespace

std::vector<GewekeStat> geweke_check(const GewekeConfig& config) {
  std::vector<GewekeStat> out;
  if (config.n_rep == 0) return out;
  const PriorSet priors = geweke_priors(config.n, config.lags);
  const int T = config.T;
  const int M = config.n_rep;

  // marginal-conditional: independent draws from the prior
  std::vector<std::vector<double>> mc(20);
  {
    Rng rng(config.seed);
    for (int r = 0; r < M; ++r) {
      const Hyperparams h = simulate_hyper_prior(priors, rng);
      const VarState s = simulate_state_prior(priors, h, T, rng);
      const auto stats = monitored_stats(s, h, T);
      for (int i = 0; i < 20; ++i) mc[static_cast<std::size_t>(i)].push_back(
          stats[static_cast<std::size_t>(i)]);
    }
  }

  // successive-conditional: alternate a Gibbs sweep with data regeneration
  std::vector<std::vector<double>> sc(20);
  {
    Rng rng(config.seed + 0x9e3779b97f4a7c15ull);
    Hyperparams h = simulate_hyper_prior(priors, rng);
    VarState s = simulate_state_prior(priors, h, T, rng);
    MhState mh(config.n, config.mh_scale, /*adapt_on=*/false);
    const int thin = std::max(config.sc_thin, 1);
    for (int r = 0; r < M; ++r) {
      // thinning shortens the chain's autocorrelation per recorded draw
      for (int j = 0; j < thin; ++j) {
        const arma::mat y = simulate_obs(s, config.n, config.lags, rng);
        const ModelData data = model_data_from_obs(y, config.lags);
        gibbs_sweep(data, s, h, priors, rng, mh);
        if (config.corrupt_lambda) s.lambda *= 1.15;  // deliberate fault
      }
      const auto stats = monitored_stats(s, h, T);
      for (int i = 0; i < 20; ++i) sc[static_cast<std::size_t>(i)].push_back(
          stats[static_cast<std::size_t>(i)]);
    }
  }

  for (int i = 0; i < 20; ++i) {
    const auto& a = mc[static_cast<std::size_t>(i)];
    const auto& b = sc[static_cast<std::size_t>(i)];
    double mean_a = 0.0, mean_b = 0.0;
    for (double v : a) mean_a += v;
    for (double v : b) mean_b += v;
    mean_a /= static_cast<double>(a.size());
    mean_b /= static_cast<double>(b.size());
    double var_a = 0.0;
    for (double v : a) var_a += (v - mean_a) * (v - mean_a);
    var_a /= static_cast<double>(a.size() - 1);
    const double se_a = std::sqrt(var_a / static_cast<double>(a.size()));
    const double se_b = batch_nse(b);
    GewekeStat stat;
    stat.name = kStatNames[i];
    stat.mean_marginal = mean_a;
    stat.mean_successive = mean_b;
    stat.z = (mean_a - mean_b) / std::sqrt(se_a * se_a + se_b * se_b);
    out.push_back(stat);
  }
  return out;
}

void write_z_table(const std::string& path,
                   const std::vector<GewekeStat>& stats) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_z_table: cannot write " + path);
  out << "statistic,mean_marginal,mean_successive,z\n";
  char buf[96];
  for (const auto& s : stats) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g", s.name.c_str(),
                  s.mean_marginal, s.mean_successive, s.z);
    out << buf << "\n";
  }
}

}  // namespace tvpvar
