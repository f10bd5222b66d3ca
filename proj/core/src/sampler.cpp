#include "tvpvar/sampler.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "tvpvar/statespace.hpp"

namespace tvpvar {

ModelData build_model_data(const TimeSeriesPanel& panel, int training_len,
                           int lags) {
  const int n = static_cast<int>(panel.n());
  const int T_total = static_cast<int>(panel.T());
  if (training_len < lags)
    throw std::runtime_error("build_model_data: training shorter than lags");
  const int T = T_total - training_len;
  if (T < 1)
    throw std::runtime_error("build_model_data: no estimation observations");

  ModelData d;
  d.n = n;
  d.lags = lags;
  d.y.set_size(T, n);
  d.x.set_size(T, n * lags + 1);
  for (int t = 0; t < T; ++t) {
    const int row = training_len + t;
    d.y.row(t) = panel.data.row(row);
    d.x(t, 0) = 1.0;
    for (int l = 1; l <= lags; ++l)
      d.x(t, arma::span(1 + (l - 1) * n, l * n)) = panel.data.row(row - l);
    d.years.push_back(panel.years.empty() ? t : panel.years[row]);
  }
  return d;
}

arma::mat a_matrix(const arma::rowvec& alpha_t, int n) {
  arma::mat A = arma::eye(n, n);
  int idx = 0;
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) A(i, j) = alpha_t(idx++);
  return A;
}

arma::mat sigma_at(const arma::rowvec& alpha_t, const arma::rowvec& lnsig_t,
                   const arma::rowvec& lambda_t, int n) {
  const arma::mat A = a_matrix(alpha_t, n);
  const arma::vec h = arma::exp(lnsig_t.t()) / lambda_t.t();
  const arma::mat Ainv =
      arma::solve(arma::trimatl(A), arma::eye(n, n));
  return arma::symmatu(Ainv * arma::diagmat(h) * Ainv.t());
}

arma::mat reduced_residuals(const ModelData& data, const arma::mat& phi) {
  const int T = data.T();
  const int n = data.n;
  const int m = data.m();
  arma::mat v(T, n);
  for (int t = 0; t < T; ++t) {
    // row views are not contiguous in memory; copy before reshaping
    const arma::vec p = phi.row(t).t();
    const arma::mat B(p.memptr(), m, n);
    v.row(t) = data.y.row(t) - data.x.row(t) * B;
  }
  return v;
}

arma::mat ortho_residuals(const ModelData& data, const VarState& state) {
  const arma::mat v = reduced_residuals(data, state.phi);
  arma::mat u(v.n_rows, v.n_cols);
  for (arma::uword t = 0; t < v.n_rows; ++t)
    u.row(t) =
        (a_matrix(state.alpha.row(t), data.n) * v.row(t).t()).t();
  return u;
}

void MhState::maybe_adapt() {
  if (!adapt) return;
  for (arma::uword i = 0; i < scale.n_elem; ++i) {
    if (proposed(i) < 50) continue;
    const double rate = accepted(i) / proposed(i);
    if (rate > 0.40) scale(i) *= 1.5;
    if (rate < 0.20) scale(i) /= 1.5;
    accepted(i) = 0;
    proposed(i) = 0;
  }
}

arma::vec MhState::acceptance_rates() const {
  arma::vec out(scale.n_elem, arma::fill::zeros);
  for (arma::uword i = 0; i < scale.n_elem; ++i)
    if (proposed(i) > 0) out(i) = accepted(i) / proposed(i);
  return out;
}

void draw_lambda(const ModelData& data, VarState& state,
                 const Hyperparams& hyper, Rng& rng) {
  const arma::mat eps = ortho_residuals(data, state);
  const int T = data.T();
  for (int i = 0; i < data.n; ++i) {
    const double v = hyper.v_lambda(i);
    for (int t = 0; t < T; ++t) {
      const double sig2 = std::exp(state.lnsig(t, i));
      if (!(sig2 > 0.0))
        throw std::runtime_error("draw_lambda: nonpositive variance");
      const double z2 = eps(t, i) * eps(t, i) / sig2;
      const double shape = 0.5 * (v + 1.0);
      const double rate = 0.5 * (v + z2);
      state.lambda(t, i) = rng.gamma(shape, 1.0 / rate);
    }
  }
}

namespace {

double dof_log_kernel(double v, double sum_term, int T, double v0) {
  // (v/2)^(Tv/2) * Gamma(v/2)^(-T) * exp(-(1/v0 + sum_term) * v)
  return 0.5 * T * v * std::log(0.5 * v) - T * std::lgamma(0.5 * v) -
         (1.0 / v0 + sum_term) * v;
}

}  // namespace

void draw_dof(const VarState& state, Hyperparams& hyper,
              const PriorSet& priors, Rng& rng, MhState& mh) {
  const int T = static_cast<int>(state.lambda.n_rows);
  for (arma::uword i = 0; i < hyper.v_lambda.n_elem; ++i) {
    double sum_term = 0.0;
    for (int t = 0; t < T; ++t) {
      const double lam = state.lambda(t, i);
      sum_term += 0.5 * (-std::log(lam) + lam);
    }
    const double v_old = hyper.v_lambda(i);
    const double v_new = v_old + std::sqrt(mh.scale(i)) * rng.normal();
    mh.proposed(i) += 1.0;
    if (v_new > 0.0) {
      const double lr =
          dof_log_kernel(v_new, sum_term, T, priors.dof_prior_mean) -
          dof_log_kernel(v_old, sum_term, T, priors.dof_prior_mean);
      if (std::log(std::max(rng.uniform(), 1e-300)) < lr) {
        hyper.v_lambda(i) = v_new;
        mh.accepted(i) += 1.0;
      }
    }
  }
  mh.maybe_adapt();
}

void draw_g(const VarState& state, Hyperparams& hyper, const PriorSet& priors,
            Rng& rng) {
  const int T = static_cast<int>(state.lnsig.n_rows);
  for (int i = 0; i < priors.n; ++i) {
    double ss = 0.0;
    double prev = std::log(priors.sigma0(i));
    for (int t = 0; t < T; ++t) {
      const double d = state.lnsig(t, i) - prev;
      ss += d * d;
      prev = state.lnsig(t, i);
    }
    hyper.g(i) = (priors.g_scale + ss) /
                 rng.chi2(priors.g_dof + static_cast<double>(T));
  }
}

void draw_volatility(const ModelData& data, VarState& state,
                     const Hyperparams& hyper, const PriorSet& priors,
                     Rng& rng) {
  const arma::mat u = ortho_residuals(data, state);
  const int T = data.T();
  for (int i = 0; i < data.n; ++i) {
    const double g = hyper.g(i);
    const double anchor = std::log(priors.sigma0(i));
    for (int t = 0; t < T; ++t) {
      const double u2 = u(t, i) * u(t, i) * state.lambda(t, i);
      const double ln_prev = t == 0 ? anchor : state.lnsig(t - 1, i);
      double mu, var;
      if (t < T - 1) {
        mu = 0.5 * (ln_prev + state.lnsig(t + 1, i));
        var = 0.5 * g;
      } else {
        mu = ln_prev;
        var = g;
      }
      const double ln_new = mu + std::sqrt(var) * rng.normal();
      const double ln_old = state.lnsig(t, i);
      const double lr = -0.5 * (ln_new - ln_old) -
                        0.5 * u2 * (std::exp(-ln_new) - std::exp(-ln_old));
      if (std::log(std::max(rng.uniform(), 1e-300)) < lr)
        state.lnsig(t, i) = ln_new;
    }
  }
}

void draw_alpha(const ModelData& data, VarState& state,
                const Hyperparams& hyper, const PriorSet& priors, Rng& rng) {
  if (data.n < 2) return;
  const arma::mat v = reduced_residuals(data, state.phi);
  const int T = data.T();
  for (int i = 1; i < data.n; ++i) {
    const int start = i * (i - 1) / 2;
    StateSpaceSpec spec;
    spec.trans_cov = hyper.s_blocks[static_cast<std::size_t>(i - 1)];
    spec.init_mean = priors.a0_mean.subvec(start, start + i - 1);
    spec.init_cov =
        arma::diagmat(priors.a0_var.subvec(start, start + i - 1));
    arma::mat obs(T, 1);
    spec.obs_loading.resize(T);
    spec.obs_cov.resize(T);
    for (int t = 0; t < T; ++t) {
      obs(t, 0) = v(t, i);
      spec.obs_loading[t] = -v(t, arma::span(0, i - 1));
      spec.obs_cov[t] = arma::mat(
          1, 1,
          arma::fill::value(std::exp(state.lnsig(t, i)) / state.lambda(t, i)));
    }
    try {
      const FilterOutput filt = kalman_filter(spec, obs);
      state.alpha.cols(start, start + i - 1) =
          backward_sample(filt, spec.trans_cov, rng);
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("draw_alpha[eq ") +
                               std::to_string(i + 1) + "]: " + e.what());
    }
  }
}

namespace {

arma::mat companion(const arma::vec& phi_t, int n, int lags) {
  const int m = n * lags + 1;
  const arma::mat B(const_cast<double*>(phi_t.memptr()), m, n, false, true);
  arma::mat F(n * lags, n * lags, arma::fill::zeros);
  for (int l = 0; l < lags; ++l)
    F(arma::span(0, n - 1), arma::span(l * n, (l + 1) * n - 1)) =
        B.rows(1 + l * n, (l + 1) * n).t();
  if (lags > 1)
    F(arma::span(n, n * lags - 1), arma::span(0, n * (lags - 1) - 1)) =
        arma::eye(n * (lags - 1), n * (lags - 1));
  return F;
}

bool path_stable(const arma::mat& phi, int n, int lags) {
  for (arma::uword t = 0; t < phi.n_rows; ++t) {
    const arma::cx_vec ev = arma::eig_gen(companion(phi.row(t).t(), n, lags));
    if (arma::abs(ev).max() >= 1.0) return false;
  }
  return true;
}

}  // namespace

void draw_phi(const ModelData& data, VarState& state, const Hyperparams& hyper,
              const PriorSet& priors, Rng& rng, bool stability_filter) {
  const int T = data.T();
  const int n = data.n;
  StateSpaceSpec spec;
  spec.trans_cov = hyper.hyper_q;
  spec.init_mean = priors.phi0_mean;
  spec.init_cov = priors.phi0_cov;
  spec.obs_loading.resize(T);
  spec.obs_cov.resize(T);
  for (int t = 0; t < T; ++t) {
    spec.obs_loading[t] = arma::kron(arma::eye(n, n), data.x.row(t));
    spec.obs_cov[t] =
        sigma_at(state.alpha.row(t), state.lnsig.row(t), state.lambda.row(t),
                 n);
  }
  try {
    const FilterOutput filt = kalman_filter(spec, data.y);
    arma::mat path = backward_sample(filt, spec.trans_cov, rng);
    if (stability_filter) {
      int tries = 0;
      while (!path_stable(path, n, data.lags) && ++tries < 20)
        path = backward_sample(filt, spec.trans_cov, rng);
    }
    state.phi = path;
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("draw_phi: ") + e.what());
  }
}

void draw_hyper_q(const VarState& state, Hyperparams& hyper,
                  const PriorSet& priors, Rng& rng) {
  const arma::mat d = arma::diff(state.phi);
  const arma::mat scale = priors.hyper_q_scale + d.t() * d;
  const double dof =
      priors.hyper_q_dof + static_cast<double>(state.phi.n_rows) - 1.0;
  hyper.hyper_q = inverse_wishart(rng, scale, dof);
}

void draw_hyper_s(const VarState& state, Hyperparams& hyper,
                  const PriorSet& priors, Rng& rng) {
  for (int i = 1; i < priors.n; ++i) {
    const int start = i * (i - 1) / 2;
    const arma::mat d = arma::diff(state.alpha.cols(start, start + i - 1));
    const arma::mat scale =
        priors.s_scales[static_cast<std::size_t>(i - 1)] + d.t() * d;
    const double dof = priors.s_dofs[static_cast<std::size_t>(i - 1)] +
                       static_cast<double>(state.alpha.n_rows) - 1.0;
    hyper.s_blocks[static_cast<std::size_t>(i - 1)] =
        inverse_wishart(rng, scale, dof);
  }
}

void draw_hyper(const VarState& state, Hyperparams& hyper,
                const PriorSet& priors, Rng& rng) {
  draw_g(state, hyper, priors, rng);
  draw_hyper_q(state, hyper, priors, rng);
  draw_hyper_s(state, hyper, priors, rng);
}

void gibbs_sweep(const ModelData& data, VarState& state, Hyperparams& hyper,
                 const PriorSet& priors, Rng& rng, MhState& mh,
                 bool stability_filter) {
  draw_lambda(data, state, hyper, rng);
  draw_dof(state, hyper, priors, rng, mh);
  draw_g(state, hyper, priors, rng);
  draw_volatility(data, state, hyper, priors, rng);
  draw_alpha(data, state, hyper, priors, rng);
  draw_phi(data, state, hyper, priors, rng, stability_filter);
  draw_hyper_q(state, hyper, priors, rng);
  draw_hyper_s(state, hyper, priors, rng);
}

VarState initial_state(const ModelData& data, const PriorSet& priors) {
  const int T = data.T();
  VarState s;
  s.phi = arma::repmat(priors.phi0_mean.t(), T, 1);
  s.alpha = priors.a0_mean.n_elem
                ? arma::repmat(priors.a0_mean.t(), T, 1)
                : arma::mat(T, 0);
  // seed the volatility path from a rolling local variance of the
  // prior-mean residuals so the single-move sampler starts near the data
  const arma::mat B0(priors.phi0_mean.memptr(), data.x.n_cols, data.n);
  const arma::mat e2 = arma::square(data.y - data.x * B0);
  s.lnsig.set_size(T, data.n);
  const int half = 10;
  for (int i = 0; i < data.n; ++i) {
    for (int t = 0; t < T; ++t) {
      const int lo = std::max(0, t - half);
      const int hi = std::min(T - 1, t + half);
      const arma::vec win = e2.col(i).subvec(lo, hi);
      s.lnsig(t, i) = std::log(std::max(arma::mean(win), 1e-8));
    }
  }
  s.lambda.ones(T, data.n);
  return s;
}

Hyperparams initial_hyper(const PriorSet& priors) {
  Hyperparams h;
  const double k = static_cast<double>(priors.k());
  const double denom = priors.hyper_q_dof - k - 1.0;
  h.hyper_q = priors.hyper_q_scale /
              (denom > 0.0 ? denom : priors.hyper_q_dof);
  for (std::size_t i = 0; i < priors.s_scales.size(); ++i) {
    const double p = static_cast<double>(priors.s_scales[i].n_rows);
    const double d = priors.s_dofs[i] - p - 1.0;
    h.s_blocks.push_back(priors.s_scales[i] / (d > 0.0 ? d : priors.s_dofs[i]));
  }
  // floor the walk variance so early volatility proposals can move
  h.g = arma::vec(priors.n,
                  arma::fill::value(std::max(priors.g_scale, 1e-2)));
  h.v_lambda = arma::vec(priors.n, arma::fill::value(priors.dof_prior_mean));
  return h;
}

GibbsProgress run_gibbs(const ModelData& data, const PriorSet& priors,
                        const SamplerConfig& config,
                        const DrawCallback& on_draw, std::ostream* log) {
  config.validate();
  Rng rng(config.seed);
  VarState state = initial_state(data, priors);
  Hyperparams hyper = initial_hyper(priors);
  MhState mh(data.n, config.mh_scale, config.adapt_mh);

  GibbsProgress progress;
  progress.dof_acceptance.zeros(data.n);
  arma::vec post_accept(data.n, arma::fill::zeros);
  arma::vec post_propose(data.n, arma::fill::zeros);

  for (int sweep = 0; sweep < config.n_draws; ++sweep) {
    if (sweep == config.burn_in) mh.adapt = false;  // freeze the kernel
    const arma::vec acc_before = mh.accepted;
    const arma::vec prop_before = mh.proposed;
    try {
      gibbs_sweep(data, state, hyper, priors, rng, mh,
                  config.stability_filter);
    } catch (const std::exception& e) {
      throw std::runtime_error("run_gibbs: sweep " + std::to_string(sweep) +
                               ": " + e.what());
    }
    if (sweep >= config.burn_in) {
      post_accept += mh.accepted - acc_before;
      post_propose += mh.proposed - prop_before;
      const int post = sweep - config.burn_in;
      if (post % config.thin == 0) {
        on_draw(progress.n_stored, state, hyper);
        ++progress.n_stored;
      }
    }
    if (log && (sweep + 1) % 1000 == 0) {
      *log << "sweep " << (sweep + 1) << "/" << config.n_draws << " stored "
           << progress.n_stored << " dof_acc";
      const arma::vec rates = mh.acceptance_rates();
      for (arma::uword i = 0; i < rates.n_elem; ++i) *log << " " << rates(i);
      *log << "\n";
    }
  }
  for (int i = 0; i < data.n; ++i)
    progress.dof_acceptance(i) =
        post_propose(i) > 0 ? post_accept(i) / post_propose(i) : 0.0;
  return progress;
}

}  // namespace tvpvar
