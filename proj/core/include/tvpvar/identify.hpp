#pragma once

#include <armadillo>
#include <optional>
#include <string>
#include <vector>

#include "tvpvar/rng.hpp"

namespace tvpvar {

// Constant-coefficient MA approximation of the VAR at one date, plus the
// Cholesky factor of the reduced-form covariance.
struct MaShape {
  std::vector<arma::mat> b;  // B_0 = I, B_1, ..., B_K
  arma::mat omega_tilde;     // lower triangular, omega*omega' = Sigma
};

enum class Scheme { MaxShare, Sign, Cholesky };

struct StructuralRotation {
  Scheme scheme = Scheme::MaxShare;
  arma::mat q_cols;          // orthonormal column(s)
  int target_var = 0;        // maxshare
  int horizon = 1;           // maxshare FEV horizon K
  double achieved_share = 0.0;
};

// MA coefficients from companion-matrix powers. phi_t stacks equation blocks
// [intercept, lag coefs].
std::vector<arma::mat> ma_coefficients(const arma::vec& phi_t, int n, int lags,
                                       int horizons);

MaShape ma_shape(const arma::vec& phi_t, const arma::mat& sigma, int n,
                 int lags, int horizons);

// Principal-eigenvector solution of the max-FEV problem for `target_var`
// over horizons 1..K. Sign-normalized so the impact on the target is
// positive.
StructuralRotation max_fev_rotation(const MaShape& shape, int target_var,
                                    int k_horizon);

// FEV share of unit-norm impact direction q (used by oracles and FEVD).
double fev_share(const MaShape& shape, const arma::vec& q, int target_var,
                 int k_horizon);

// Haar-distributed orthonormal matrix (QR with positive-diagonal R).
arma::mat haar_orthonormal(Rng& rng, int dim);

// signs: variables x shocks, entries in {-1, 0, +1}; restrictions are
// checked on the cumulated response at `sign_horizon` (0 = impact). Column
// sign flips are allowed. Returns the accepted rotation or nullopt after
// max_tries.
std::optional<StructuralRotation> sign_rotation(const MaShape& shape,
                                                const arma::imat& signs,
                                                Rng& rng, int max_tries,
                                                int sign_horizon = 0);

arma::imat load_sign_matrix(const std::string& path);

}  // namespace tvpvar
