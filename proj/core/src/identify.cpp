#include "tvpvar/identify.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tvpvar {

std::vector<arma::mat> ma_coefficients(const arma::vec& phi_t, int n, int lags,
                                       int horizons) {
  const int m = n * lags + 1;
  if (static_cast<int>(phi_t.n_elem) != n * m)
    throw std::invalid_argument("ma_coefficients: phi length mismatch");
  const arma::mat B(const_cast<double*>(phi_t.memptr()), m, n, false, true);

  arma::mat F(n * lags, n * lags, arma::fill::zeros);
  for (int l = 0; l < lags; ++l)
    F(arma::span(0, n - 1), arma::span(l * n, (l + 1) * n - 1)) =
        B.rows(1 + l * n, (l + 1) * n).t();
  if (lags > 1)
    F(arma::span(n, n * lags - 1), arma::span(0, n * (lags - 1) - 1)) =
        arma::eye(n * (lags - 1), n * (lags - 1));

  std::vector<arma::mat> out;
  arma::mat Fj = arma::eye(n * lags, n * lags);
  for (int j = 0; j <= horizons; ++j) {
    out.push_back(Fj(arma::span(0, n - 1), arma::span(0, n - 1)));
    Fj = F * Fj;
  }
  return out;
}

MaShape ma_shape(const arma::vec& phi_t, const arma::mat& sigma, int n,
                 int lags, int horizons) {
  MaShape shape;
  shape.b = ma_coefficients(phi_t, n, lags, horizons);
  if (!arma::chol(shape.omega_tilde, arma::symmatu(sigma), "lower"))
    throw std::runtime_error("ma_shape: covariance not positive definite");
  return shape;
}

namespace {

// M = sum_{k=1..K} sum_{j<k} omega' B_j' e e' B_j omega
arma::mat fev_matrix(const MaShape& shape, int target_var, int k_horizon) {
  const int n = static_cast<int>(shape.omega_tilde.n_rows);
  if (k_horizon < 1) throw std::invalid_argument("fev horizon must be >= 1");
  if (k_horizon > static_cast<int>(shape.b.size()))
    throw std::invalid_argument("fev horizon exceeds available MA terms");
  arma::mat M(n, n, arma::fill::zeros);
  for (int j = 0; j < k_horizon; ++j) {
    const arma::vec w =
        shape.omega_tilde.t() * shape.b[static_cast<std::size_t>(j)].row(
                                    target_var).t();
    M += static_cast<double>(k_horizon - j) * (w * w.t());
  }
  return arma::symmatu(M);
}

}  // namespace

double fev_share(const MaShape& shape, const arma::vec& q, int target_var,
                 int k_horizon) {
  const arma::mat M = fev_matrix(shape, target_var, k_horizon);
  const double total = arma::trace(M);
  if (total <= 0.0) throw std::runtime_error("fev_share: degenerate variance");
  return arma::dot(q, M * q) / total;
}

StructuralRotation max_fev_rotation(const MaShape& shape, int target_var,
                                    int k_horizon) {
  const arma::mat M = fev_matrix(shape, target_var, k_horizon);
  const double total = arma::trace(M);
  if (total <= 0.0)
    throw std::runtime_error("max_fev_rotation: degenerate variance matrix");

  arma::vec eigval;
  arma::mat eigvec;
  if (!arma::eig_sym(eigval, eigvec, M))
    throw std::runtime_error("max_fev_rotation: eigendecomposition failed");
  arma::vec q = eigvec.col(eigvec.n_cols - 1);
  q /= arma::norm(q);

  // impact on the target variable is normalized positive
  const double impact = arma::dot(shape.omega_tilde.row(target_var), q);
  if (impact < 0.0) q = -q;

  StructuralRotation rot;
  rot.scheme = Scheme::MaxShare;
  rot.q_cols = q;
  rot.target_var = target_var;
  rot.horizon = k_horizon;
  rot.achieved_share = eigval(eigval.n_elem - 1) / total;
  return rot;
}

arma::mat haar_orthonormal(Rng& rng, int dim) {
  const arma::mat z = rng.normal_mat(dim, dim);
  arma::mat Q, R;
  if (!arma::qr(Q, R, z)) throw std::runtime_error("haar_orthonormal: qr failed");
  for (int j = 0; j < dim; ++j)
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
  return Q;
}

std::optional<StructuralRotation> sign_rotation(const MaShape& shape,
                                                const arma::imat& signs,
                                                Rng& rng, int max_tries,
                                                int sign_horizon) {
  const int n = static_cast<int>(shape.omega_tilde.n_rows);
  if (static_cast<int>(signs.n_rows) != n)
    throw std::invalid_argument("sign_rotation: sign matrix row mismatch");
  for (arma::uword s = 0; s < signs.n_cols; ++s)
    if (arma::all(signs.col(s) == 0))
      throw std::invalid_argument(
          "sign_rotation: shock column with no restriction");
  if (sign_horizon + 1 > static_cast<int>(shape.b.size()))
    throw std::invalid_argument("sign_rotation: horizon exceeds MA terms");

  // cumulated responses per horizon to the Cholesky shocks
  std::vector<arma::mat> cum(static_cast<std::size_t>(sign_horizon) + 1);
  arma::mat acc(n, n, arma::fill::zeros);
  for (int h = 0; h <= sign_horizon; ++h) {
    acc += shape.b[static_cast<std::size_t>(h)] * shape.omega_tilde;
    cum[static_cast<std::size_t>(h)] = acc;
  }

  for (int attempt = 0; attempt < max_tries; ++attempt) {
    arma::mat Q = haar_orthonormal(rng, n);
    bool ok = true;
    for (arma::uword s = 0; s < signs.n_cols && ok; ++s) {
      bool direct = true, flipped = true;
      for (int h = 0; h <= sign_horizon; ++h) {
        const arma::vec resp = cum[static_cast<std::size_t>(h)] * Q.col(s);
        for (int i = 0; i < n; ++i) {
          const int want = static_cast<int>(signs(i, s));
          if (want == 0) continue;
          if (want * resp(i) <= 0.0) direct = false;
          if (want * resp(i) >= 0.0) flipped = false;
        }
      }
      if (flipped) Q.col(s) = -Q.col(s);
      else if (!direct) ok = false;
    }
    if (ok) {
      StructuralRotation rot;
      rot.scheme = Scheme::Sign;
      rot.q_cols = Q;
      rot.horizon = sign_horizon;
      return rot;
    }
  }
  return std::nullopt;
}

arma::imat load_sign_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_sign_matrix: cannot open " + path);
  std::vector<std::vector<int>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::vector<int> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      const auto b = field.find_first_not_of(" \t\r");
      const std::string t =
          b == std::string::npos ? "" : field.substr(b, field.find_last_not_of(
                                                            " \t\r") - b + 1);
      if (t == "+" || t == "+1" || t == "1") row.push_back(1);
      else if (t == "-" || t == "-1") row.push_back(-1);
      else if (t == "0" || t.empty()) row.push_back(0);
      else throw std::runtime_error("load_sign_matrix: bad entry '" + t + "'");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("load_sign_matrix: empty file");
  arma::imat out(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      throw std::runtime_error("load_sign_matrix: ragged rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      out(i, j) = rows[i][j];
  }
  return out;
}

}  // namespace tvpvar
