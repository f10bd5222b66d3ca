#include "tvpvar/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace tvpvar {

arma::mat irf_paths(const MaShape& shape, const arma::vec& q, int horizons,
                    bool cumulate) {
  const int n = static_cast<int>(shape.omega_tilde.n_rows);
  if (horizons + 1 > static_cast<int>(shape.b.size()))
    throw std::invalid_argument("irf_paths: horizon exceeds MA terms");
  arma::mat out(horizons + 1, n);
  arma::rowvec acc(n, arma::fill::zeros);
  const arma::vec impact = shape.omega_tilde * q;
  for (int h = 0; h <= horizons; ++h) {
    const arma::rowvec resp =
        (shape.b[static_cast<std::size_t>(h)] * impact).t();
    if (cumulate) {
      acc += resp;
      out.row(h) = acc;
    } else {
      out.row(h) = resp;
    }
  }
  return out;
}

arma::vec fevd_shares(const MaShape& shape, const arma::vec& q,
                      int k_horizon) {
  const int n = static_cast<int>(shape.omega_tilde.n_rows);
  if (k_horizon < 1 || k_horizon > static_cast<int>(shape.b.size()))
    throw std::invalid_argument("fevd_shares: bad horizon");
  const arma::mat sigma = shape.omega_tilde * shape.omega_tilde.t();
  arma::vec num(n, arma::fill::zeros);
  arma::vec den(n, arma::fill::zeros);
  for (int j = 0; j < k_horizon; ++j) {
    const arma::mat& B = shape.b[static_cast<std::size_t>(j)];
    const double weight = static_cast<double>(k_horizon - j);
    const arma::vec impact = B * shape.omega_tilde * q;
    num += weight * arma::square(impact);
    den += weight * arma::diagvec(B * sigma * B.t());
  }
  for (int i = 0; i < n; ++i)
    if (den(i) <= 0.0)
      throw std::runtime_error("fevd_shares: zero forecast error variance");
  return num / den;
}

VolPair conditional_volatility(const MaShape& shape, const arma::vec& q) {
  VolPair out;
  const arma::mat sigma = shape.omega_tilde * shape.omega_tilde.t();
  out.unconditional = arma::sqrt(arma::diagvec(sigma));
  out.conditional = arma::abs(shape.omega_tilde * q);
  return out;
}

PredictResult predictability(const arma::vec& phi_t, const arma::mat& sigma,
                             int n, int lags, int h) {
  if (h < 1) throw std::invalid_argument("predictability: horizon >= 1");
  const int m = n * lags + 1;
  const arma::mat B(const_cast<double*>(phi_t.memptr()), m, n, false, true);
  const int p = n * lags;
  arma::mat F(p, p, arma::fill::zeros);
  for (int l = 0; l < lags; ++l)
    F(arma::span(0, n - 1), arma::span(l * n, (l + 1) * n - 1)) =
        B.rows(1 + l * n, (l + 1) * n).t();
  if (lags > 1)
    F(arma::span(n, p - 1), arma::span(0, n * (lags - 1) - 1)) =
        arma::eye(n * (lags - 1), n * (lags - 1));

  PredictResult out;
  const arma::cx_vec ev = arma::eig_gen(F);
  if (arma::abs(ev).max() >= 1.0 - 1e-9) {
    out.stable = false;
    out.r2 = arma::vec(n, arma::fill::value(arma::datum::nan));
    return out;
  }

  // discrete Lyapunov: V = F V F' + Qc, solved by vectorization
  arma::mat Qc(p, p, arma::fill::zeros);
  Qc(arma::span(0, n - 1), arma::span(0, n - 1)) = sigma;
  const arma::mat lhs =
      arma::eye(p * p, p * p) - arma::kron(F, F);
  const arma::vec v = arma::solve(lhs, arma::vectorise(Qc));
  const arma::mat V = arma::reshape(v, p, p);

  arma::vec fev(n, arma::fill::zeros);
  arma::mat Fj = arma::eye(p, p);
  for (int j = 0; j < h; ++j) {
    const arma::mat Bj = Fj(arma::span(0, n - 1), arma::span(0, n - 1));
    fev += arma::diagvec(Bj * sigma * Bj.t());
    Fj = F * Fj;
  }
  out.r2.set_size(n);
  for (int i = 0; i < n; ++i) out.r2(i) = 1.0 - fev(i) / V(i, i);
  return out;
}

double structural_shock(const MaShape& shape, const arma::vec& q,
                        const arma::vec& reduced_residual) {
  const arma::vec eps =
      arma::solve(arma::trimatl(shape.omega_tilde), reduced_residual);
  return arma::dot(q, eps);
}

std::vector<double> episode_shocks(const arma::mat& shock_draws,
                                   const std::vector<int>& years,
                                   const std::vector<EpisodeSpec>& episodes) {
  if (shock_draws.n_cols != years.size())
    throw std::invalid_argument("episode_shocks: date dimension mismatch");
  // per-date posterior medians
  std::vector<double> medians(years.size());
  for (std::size_t t = 0; t < years.size(); ++t)
    medians[t] = quantile_type7(
        arma::conv_to<std::vector<double>>::from(shock_draws.col(t)), 0.5);

  std::vector<double> out;
  for (const auto& ep : episodes) {
    if (ep.start_year > ep.end_year)
      throw std::invalid_argument("episode_shocks: start after end for " +
                                  ep.name);
    double sum = 0.0;
    for (int y = ep.start_year; y <= ep.end_year; ++y) {
      const auto it = std::find(years.begin(), years.end(), y);
      if (it == years.end())
        throw std::invalid_argument("episode_shocks: year " +
                                    std::to_string(y) + " outside sample");
      sum += medians[static_cast<std::size_t>(it - years.begin())];
    }
    out.push_back(sum);
  }
  return out;
}

double quantile_type7(std::vector<double> values, double p) {
  if (values.empty())
    throw std::invalid_argument("quantile_type7: empty input");
  std::sort(values.begin(), values.end());
  const double idx = p * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(idx));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = idx - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

QuantileSummary summarize(const std::vector<double>& values) {
  if (values.size() < 2)
    throw std::invalid_argument("summarize: need at least 2 draws");
  QuantileSummary q;
  q.q16 = quantile_type7(values, 0.16);
  q.q50 = quantile_type7(values, 0.50);
  q.q84 = quantile_type7(values, 0.84);
  return q;
}

void write_tidy_csv(const std::string& path,
                    const std::vector<TidyRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_tidy_csv: cannot write " + path);
  out << "date,variable,horizon,q16,q50,q84,stat_name\n";
  char buf[32];
  for (const auto& r : rows) {
    out << r.date << "," << r.variable << "," << r.horizon;
    for (double v : {r.q.q16, r.q.q50, r.q.q84}) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << "," << buf;
    }
    out << "," << r.stat << "\n";
  }
}

}  // namespace tvpvar
