#pragma once

#include <armadillo>
#include <cstdint>
#include <random>

namespace tvpvar {

// Deterministic random stream. All transforms are implemented explicitly so
// that a given seed produces the same draws on every platform (the standard
// library distributions do not guarantee that).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform on [0, 1)
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double normal();
  // Marsaglia-Tsang; valid for any shape > 0
  double gamma(double shape, double scale);
  double chi2(double dof) { return gamma(0.5 * dof, 2.0); }

  arma::vec normal_vec(arma::uword n);
  arma::mat normal_mat(arma::uword rows, arma::uword cols);

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

// Bartlett decomposition draws. `scale` is the scale matrix of the
// distribution; dof must exceed dim - 1.
arma::mat wishart(Rng& rng, const arma::mat& scale, double dof);
arma::mat inverse_wishart(Rng& rng, const arma::mat& scale, double dof);

// N(mean, cov) with jitter fallback for near-singular cov.
arma::vec mvn_draw(Rng& rng, const arma::vec& mean, const arma::mat& cov);

}  // namespace tvpvar
