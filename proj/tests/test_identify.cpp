#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "tvpvar/identify.hpp"

using namespace tvpvar;

namespace {

arma::vec pack_phi(const arma::mat& coeffs_by_eq) {
  // coeffs_by_eq: m x n, column per equation
  return arma::vectorise(coeffs_by_eq);
}

MaShape random_shape(Rng& rng, int n, int lags, int horizons) {
  arma::mat B(n * lags + 1, n);
  B.zeros();
  // keep the companion stable
  for (int i = 0; i < n; ++i)
    for (int j = 1; j < n * lags + 1; ++j)
      B(j, i) = 0.3 * rng.normal() / (n * lags);
  const arma::mat z = rng.normal_mat(n, n);
  const arma::mat sigma = z * z.t() + 0.5 * arma::eye(n, n);
  return ma_shape(pack_phi(B), sigma, n, lags, horizons);
}

}  // namespace

TEST_SUITE("identify") {

TEST_CASE("moving-average recursion against a hand computation") {
  // univariate, two lags: y_t = 0.5 y_{t-1} + 0.2 y_{t-2}
  arma::mat B(3, 1);
  B(0, 0) = 0.1;  // intercept, irrelevant for the MA terms
  B(1, 0) = 0.5;
  B(2, 0) = 0.2;
  const auto b = ma_coefficients(pack_phi(B), 1, 2, 3);
  REQUIRE(b.size() == 4);
  CHECK(b[0](0, 0) == 1.0);
  CHECK(b[1](0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  // frozen: 0.5*0.5 + 0.2
  CHECK(b[2](0, 0) == doctest::Approx(0.45).epsilon(1e-15));
  // frozen: 0.5*0.45 + 0.2*0.5
  CHECK(b[3](0, 0) == doctest::Approx(0.325).epsilon(1e-14));
}

TEST_CASE("bivariate first-order MA terms are powers of the lag matrix") {
  arma::mat A1 = {{0.5, 0.1}, {-0.2, 0.3}};
  arma::mat B(3, 2, arma::fill::zeros);
  B.rows(1, 2) = A1.t();
  const auto b = ma_coefficients(pack_phi(B), 2, 1, 4);
  CHECK(arma::abs(b[1] - A1).max() < 1e-15);
  CHECK(arma::abs(b[2] - A1 * A1).max() < 1e-14);
  CHECK(arma::abs(b[4] - A1 * A1 * A1 * A1).max() < 1e-14);
}

TEST_CASE("shape factor reproduces the covariance") {
  Rng rng(1);
  const auto shape = random_shape(rng, 3, 2, 4);
  const arma::mat sigma = shape.omega_tilde * shape.omega_tilde.t();
  CHECK(shape.omega_tilde.is_trimatl());
  CHECK(arma::eig_sym(arma::symmatu(sigma)).min() > 0.0);
}

TEST_CASE("max-share direction beats a dense angle grid in two variables") {
  Rng rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    const auto shape = random_shape(rng, 2, 1, 6);
    const int target = rep % 2;
    const int K = 1 + rep % 5;
    const auto rot = max_fev_rotation(shape, target, K);

    // independent oracle: rebuild the weighted outer-product matrix and
    // scan the unit circle
    arma::mat M(2, 2, arma::fill::zeros);
    for (int j = 0; j < K; ++j) {
      const arma::vec w = shape.omega_tilde.t() * shape.b[j].row(target).t();
      M += static_cast<double>(K - j) * (w * w.t());
    }
    const int G = 1000000;
    double best = 0.0;
    for (int g = 0; g < G; ++g) {
      const double th = arma::datum::pi * g / G;
      const double c = std::cos(th), s = std::sin(th);
      best = std::max(best, M(0, 0) * c * c + 2.0 * M(0, 1) * c * s +
                                M(1, 1) * s * s);
    }
    const double best_share = best / arma::trace(M);
    CHECK(rot.achieved_share >= best_share - 1e-9);
    CHECK(rot.achieved_share <= best_share + 1e-5);
    // reported share equals the quadratic form at the chosen direction
    CHECK(fev_share(shape, rot.q_cols.col(0), target, K) ==
          doctest::Approx(rot.achieved_share).epsilon(1e-10));
  }
}

TEST_CASE("max-share direction dominates random unit vectors in three "
          "variables") {
  Rng rng(3);
  const auto shape = random_shape(rng, 3, 2, 5);
  const auto rot = max_fev_rotation(shape, 0, 4);
  for (int i = 0; i < 20000; ++i) {
    arma::vec q = rng.normal_vec(3);
    q /= arma::norm(q);
    CHECK(fev_share(shape, q, 0, 4) <= rot.achieved_share + 1e-12);
  }
}

TEST_CASE("max-share invariants") {
  Rng rng(4);
  const auto shape = random_shape(rng, 3, 1, 4);
  const auto rot = max_fev_rotation(shape, 1, 3);
  CHECK(arma::norm(rot.q_cols.col(0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rot.achieved_share > 0.0);
  CHECK(rot.achieved_share <= 1.0 + 1e-12);
  // positive impact normalization
  CHECK(arma::dot(shape.omega_tilde.row(1), rot.q_cols.col(0)) >= 0.0);
  // invariant to rescaling the system
  MaShape scaled = shape;
  scaled.omega_tilde *= 3.0;
  const auto rot2 = max_fev_rotation(scaled, 1, 3);
  CHECK(std::abs(rot2.achieved_share - rot.achieved_share) < 1e-12);
  CHECK(arma::abs(rot2.q_cols - rot.q_cols).max() < 1e-9);
}

TEST_CASE("shares over a complete orthonormal set add to one") {
  Rng rng(5);
  const auto shape = random_shape(rng, 3, 2, 6);
  const arma::mat Q = haar_orthonormal(rng, 3);
  for (int target = 0; target < 3; ++target) {
    double total = 0.0;
    for (int s = 0; s < 3; ++s) total += fev_share(shape, Q.col(s), target, 5);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("haar draws are orthonormal and cover both rotation senses") {
  Rng rng(6);
  int neg_det = 0;
  for (int i = 0; i < 200; ++i) {
    const arma::mat Q = haar_orthonormal(rng, 4);
    CHECK(arma::abs(Q * Q.t() - arma::eye(4, 4)).max() < 1e-12);
    if (arma::det(Q) < 0.0) ++neg_det;
  }
  CHECK(neg_det > 50);
  CHECK(neg_det < 150);
}

TEST_CASE("sign search acceptance rate matches the arc-length oracle") {
  // identity system, single restriction: impact of shock 1 on variable 1
  // positive. A Haar column is uniform on the circle, and flips repair any
  // draw, so acceptance is certain. With two same-column restrictions
  // (+ on both variables) the feasible arc is a quarter circle doubled by
  // the flip: acceptance probability 1/2.
  MaShape shape;
  shape.b = {arma::eye(2, 2)};
  shape.omega_tilde = arma::eye(2, 2);

  Rng rng(7);
  arma::imat one_restriction = {{1, 0}, {0, 1}};
  int ok = 0;
  for (int i = 0; i < 2000; ++i)
    if (sign_rotation(shape, one_restriction, rng, 1, 0)) ++ok;
  CHECK(ok == 2000);

  arma::imat quarter = {{1, 0}, {1, 1}};  // shock 1 positive on both
  ok = 0;
  for (int i = 0; i < 4000; ++i)
    if (sign_rotation(shape, quarter, rng, 1, 0)) ++ok;
  CHECK(std::abs(ok / 4000.0 - 0.5) < 0.03);
}

TEST_CASE("geometrically infeasible restrictions are censored") {
  // cumulated response at horizon 1 is (I + B1) omega = -I times the
  // rotation: asking for the same sign at horizons 0 and 1 is impossible
  MaShape shape;
  shape.b = {arma::eye(2, 2), -2.0 * arma::eye(2, 2)};
  shape.omega_tilde = arma::eye(2, 2);
  arma::imat signs = {{1, 0}, {0, 1}};
  Rng rng(8);
  CHECK_FALSE(sign_rotation(shape, signs, rng, 500, 1).has_value());
  // the same restriction at impact only is always satisfiable
  CHECK(sign_rotation(shape, signs, rng, 500, 0).has_value());
}

TEST_CASE("sign search rejects an unrestricted shock column") {
  MaShape shape;
  shape.b = {arma::eye(2, 2)};
  shape.omega_tilde = arma::eye(2, 2);
  arma::imat signs = {{1, 0}, {0, 0}};
  Rng rng(9);
  CHECK_THROWS_AS(sign_rotation(shape, signs, rng, 10, 0),
                  std::invalid_argument);
}

TEST_CASE("sign matrix file parsing") {
  const auto path =
      (std::filesystem::temp_directory_path() / "signs.csv").string();
  {
    std::ofstream out(path);
    out << "+,0\n-,+1\n0,-1\n";
  }
  const arma::imat m = load_sign_matrix(path);
  REQUIRE(m.n_rows == 3);
  REQUIRE(m.n_cols == 2);
  CHECK(m(0, 0) == 1);
  CHECK(m(1, 0) == -1);
  CHECK(m(1, 1) == 1);
  CHECK(m(2, 1) == -1);
  {
    std::ofstream out(path);
    out << "+,x\n";
  }
  CHECK_THROWS_AS(load_sign_matrix(path), std::runtime_error);
}

}  // TEST_SUITE
