#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tvpvar/analysis.hpp"

using namespace tvpvar;

namespace {

MaShape scalar_shape(double rho, double sig2, int horizons) {
  arma::vec phi = {0.0, rho};
  return ma_shape(phi, arma::mat{sig2}, 1, 1, horizons);
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("cumulated scalar response is the geometric partial sum") {
  const auto shape = scalar_shape(0.5, 1.0, 5);
  const arma::vec q = {1.0};
  const arma::mat path = irf_paths(shape, q, 5, true);
  REQUIRE(path.n_rows == 6);
  CHECK(path(0, 0) == 1.0);
  CHECK(path(1, 0) == 1.5);
  // frozen: sum_{j=0..5} 0.5^j
  CHECK(path(5, 0) == doctest::Approx(1.96875).epsilon(1e-15));
  const arma::mat raw = irf_paths(shape, q, 5, false);
  CHECK(raw(5, 0) == doctest::Approx(std::pow(0.5, 5)).epsilon(1e-14));
  // impact scales with the shock size
  const auto big = scalar_shape(0.5, 4.0, 5);
  CHECK(irf_paths(big, q, 0, true)(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("single-shock share of a univariate system is one") {
  const auto shape = scalar_shape(0.7, 2.0, 8);
  const arma::vec shares = fevd_shares(shape, arma::vec{1.0}, 6);
  CHECK(shares(0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("variance shares across a complete basis add to one and match a "
          "Monte Carlo oracle") {
  arma::mat A1 = {{0.4, 0.2}, {-0.1, 0.5}};
  arma::mat B(3, 2, arma::fill::zeros);
  B.rows(1, 2) = A1.t();
  arma::mat sigma = {{1.0, 0.3}, {0.3, 0.8}};
  const auto shape = ma_shape(arma::vectorise(B), sigma, 2, 1, 4);
  const int K = 3;

  arma::vec total(2, arma::fill::zeros);
  arma::mat per_shock(2, 2);
  for (int s = 0; s < 2; ++s) {
    arma::vec q(2, arma::fill::zeros);
    q(s) = 1.0;
    per_shock.col(s) = fevd_shares(shape, q, K);
    total += per_shock.col(s);
  }
  CHECK(arma::abs(total - 1.0).max() < 1e-10);

  // Monte Carlo oracle for the numerator of shock 1: simulate the weighted
  // forecast-error variance produced by the first orthogonalized shock only
  Rng rng(1);
  arma::running_stat_vec<arma::vec> num_stat, den_stat;
  for (int rep = 0; rep < 400000; ++rep) {
    arma::vec werr1(2, arma::fill::zeros), werrall(2, arma::fill::zeros);
    std::vector<arma::vec> eps;
    for (int j = 0; j < K; ++j) eps.push_back(rng.normal_vec(2));
    for (int k = 1; k <= K; ++k) {
      // k-step-ahead error = sum_{j<k} B_j omega eps_{k-j}
      arma::vec e1(2, arma::fill::zeros), eall(2, arma::fill::zeros);
      for (int j = 0; j < k; ++j) {
        arma::vec shock1 = {eps[j](0), 0.0};
        e1 += shape.b[j] * shape.omega_tilde * shock1;
        eall += shape.b[j] * shape.omega_tilde * eps[j];
      }
      werr1 += arma::square(e1);
      werrall += arma::square(eall);
    }
    num_stat(werr1);
    den_stat(werrall);
  }
  const arma::vec mc_share = num_stat.mean() / den_stat.mean();
  CHECK(arma::abs(mc_share - per_shock.col(0)).max() < 0.01);
}

TEST_CASE("conditional volatility never exceeds the unconditional") {
  Rng rng(2);
  for (int rep = 0; rep < 50; ++rep) {
    const arma::mat z = rng.normal_mat(3, 3);
    MaShape shape;
    shape.b = {arma::eye(3, 3)};
    arma::mat sigma = z * z.t() + 0.1 * arma::eye(3, 3);
    shape.omega_tilde = arma::chol(sigma, "lower");
    arma::vec q = rng.normal_vec(3);
    q /= arma::norm(q);
    const VolPair v = conditional_volatility(shape, q);
    CHECK(arma::all(v.conditional <= v.unconditional + 1e-12));
    CHECK(arma::all(v.unconditional > 0.0));
  }
  // with a single underlying shock the conditional part is everything
  MaShape rank1;
  rank1.b = {arma::eye(2, 2)};
  rank1.omega_tilde = arma::mat{{1.0, 0.0}, {0.9, 0.0}};
  // degenerate, only for the identity: use a tiny second column instead
  rank1.omega_tilde(1, 1) = 1e-8;
  const VolPair v = conditional_volatility(rank1, arma::vec{1.0, 0.0});
  CHECK(v.conditional(1) == doctest::Approx(v.unconditional(1)).epsilon(1e-8));
}

TEST_CASE("one-step predictability of a scalar AR(1) is rho squared") {
  for (double rho : {0.0, 0.3, 0.9}) {
    const PredictResult r =
        predictability(arma::vec{0.0, rho}, arma::mat{1.0}, 1, 1, 1);
    REQUIRE(r.stable);
    CHECK(r.r2(0) == doctest::Approx(rho * rho).epsilon(1e-10));
  }
}

TEST_CASE("predictability declines with the horizon and vanishes in the "
          "limit") {
  const double rho = 0.8;
  double prev = 1.0;
  for (int h : {1, 2, 5, 20}) {
    const PredictResult r =
        predictability(arma::vec{0.0, rho}, arma::mat{1.0}, 1, 1, h);
    // closed form: R^2(h) = 1 - (1-rho^2) * sum_{j<h} rho^{2j} * (1-rho^2)...
    // equivalently 1 - (1 - rho^{2h}) = rho^{2h} for the single-variable case
    CHECK(r.r2(0) == doctest::Approx(std::pow(rho, 2 * h)).epsilon(1e-8));
    CHECK(r.r2(0) < prev);
    prev = r.r2(0);
  }
}

TEST_CASE("explosive coefficients are flagged instead of extrapolated") {
  const PredictResult r =
      predictability(arma::vec{0.0, 1.01}, arma::mat{1.0}, 1, 1, 3);
  CHECK_FALSE(r.stable);
  CHECK(std::isnan(r.r2(0)));
}

TEST_CASE("structural shock recovers the rotated orthogonalized residual") {
  MaShape shape;
  shape.omega_tilde = arma::mat{{2.0, 0.0}, {1.0, 1.5}};
  const arma::vec eps_true = {0.7, -1.2};
  const arma::vec v = shape.omega_tilde * eps_true;
  arma::vec q = {0.6, 0.8};
  CHECK(structural_shock(shape, q, v) ==
        doctest::Approx(arma::dot(q, eps_true)).epsilon(1e-12));
}

TEST_CASE("type-7 quantiles") {
  std::vector<double> v;
  for (int i = 1; i <= 100; ++i) v.push_back(i);
  CHECK(quantile_type7(v, 0.5) == doctest::Approx(50.5).epsilon(1e-15));
  CHECK(quantile_type7(v, 0.0) == 1.0);
  CHECK(quantile_type7(v, 1.0) == 100.0);
  CHECK(quantile_type7(v, 0.16) == doctest::Approx(16.84).epsilon(1e-12));
  CHECK(quantile_type7({3.0}, 0.5) == 3.0);
  CHECK_THROWS_AS(quantile_type7({}, 0.5), std::invalid_argument);
  const QuantileSummary s = summarize(v);
  CHECK(s.q50 == 50.5);
  CHECK(s.q16 < s.q50);
  CHECK(s.q50 < s.q84);
  CHECK_THROWS_AS(summarize({1.0}), std::invalid_argument);
}

TEST_CASE("episode sums use per-date medians over draws") {
  // 3 draws x 4 dates; medians by column: 1, 2, 0, -1
  arma::mat draws = {{0.0, 2.0, -5.0, -1.0},
                     {1.0, 2.0, 0.0, -1.0},
                     {9.0, 2.0, 5.0, -1.0}};
  const std::vector<int> years = {1900, 1901, 1902, 1903};
  const auto sums = episode_shocks(
      draws, years, {{"a", 1900, 1901}, {"b", 1902, 1903}, {"c", 1901, 1901}});
  REQUIRE(sums.size() == 3);
  CHECK(sums[0] == doctest::Approx(3.0));
  CHECK(sums[1] == doctest::Approx(-1.0));
  CHECK(sums[2] == doctest::Approx(2.0));
  CHECK_THROWS_AS(episode_shocks(draws, years, {{"x", 1899, 1900}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(episode_shocks(draws, years, {{"x", 1902, 1901}}),
                  std::invalid_argument);
}

TEST_CASE("tidy csv layout") {
  const auto path =
      (std::filesystem::temp_directory_path() / "tidy.csv").string();
  write_tidy_csv(path, {{1800, "output", 5, {0.25, 0.5, 0.75}, "irf"}});
  std::ifstream in(path);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "date,variable,horizon,q16,q50,q84,stat_name");
  CHECK(row == "1800,output,5,0.25,0.5,0.75,irf");
}

}  // TEST_SUITE
