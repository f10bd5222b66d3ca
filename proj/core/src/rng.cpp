#include "tvpvar/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace tvpvar {

double Rng::normal() {
  // Box-Muller, one variate per call
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double Rng::gamma(double shape, double scale) {
  if (shape <= 0.0 || scale <= 0.0)
    throw std::invalid_argument("Rng::gamma: nonpositive shape or scale");
  if (shape < 1.0) {
    // boost to shape+1 and rescale by u^(1/shape)
    const double u = std::max(uniform(), 1e-300);
    return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return d * v * scale;
  }
}

arma::vec Rng::normal_vec(arma::uword n) {
  arma::vec out(n);
  for (arma::uword i = 0; i < n; ++i) out(i) = normal();
  return out;
}

arma::mat Rng::normal_mat(arma::uword rows, arma::uword cols) {
  arma::mat out(rows, cols);
  // column-major fill, fixed order
  for (arma::uword j = 0; j < cols; ++j)
    for (arma::uword i = 0; i < rows; ++i) out(i, j) = normal();
  return out;
}

namespace {

arma::mat chol_with_jitter(const arma::mat& cov) {
  arma::mat L;
  if (arma::chol(L, cov, "lower")) return L;
  const double base = std::max(arma::trace(cov), 0.0) / cov.n_rows;
  double ridge = 1e-12 * std::max(base, 1e-30);
  for (int k = 0; k < 8; ++k) {
    if (arma::chol(L, cov + ridge * arma::eye(cov.n_rows, cov.n_rows),
                   "lower"))
      return L;
    ridge *= 10.0;
  }
  // last resort: eigendecomposition with clamped spectrum
  arma::vec eigval;
  arma::mat eigvec;
  if (!arma::eig_sym(eigval, eigvec, arma::symmatu(cov)))
    throw std::runtime_error("chol_with_jitter: eigendecomposition failed");
  eigval.transform([](double v) { return v > 0.0 ? std::sqrt(v) : 0.0; });
  return eigvec * arma::diagmat(eigval);
}

}  // namespace

arma::mat wishart(Rng& rng, const arma::mat& scale, double dof) {
  const arma::uword p = scale.n_rows;
  if (dof <= static_cast<double>(p) - 1.0)
    throw std::invalid_argument("wishart: dof too small");
  const arma::mat L = chol_with_jitter(scale);
  arma::mat A(p, p, arma::fill::zeros);
  for (arma::uword i = 0; i < p; ++i) {
    A(i, i) = std::sqrt(rng.chi2(dof - static_cast<double>(i)));
    for (arma::uword j = 0; j < i; ++j) A(i, j) = rng.normal();
  }
  const arma::mat LA = L * A;
  return LA * LA.t();
}

arma::mat inverse_wishart(Rng& rng, const arma::mat& scale, double dof) {
  const arma::mat w = wishart(rng, arma::inv_sympd(arma::symmatu(scale)), dof);
  return arma::inv_sympd(arma::symmatu(w));
}

arma::vec mvn_draw(Rng& rng, const arma::vec& mean, const arma::mat& cov) {
  return mean + chol_with_jitter(cov) * rng.normal_vec(mean.n_elem);
}

}  // namespace tvpvar
