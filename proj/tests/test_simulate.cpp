#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "tvpvar/simulate.hpp"

using namespace tvpvar;

TEST_SUITE("simulate") {

TEST_CASE("identical seeds give identical panels") {
  DgpSpec spec;
  spec.n = 2;
  spec.lags = 1;
  spec.T = 120;
  spec.phi0 = {0.0, 0.5, 0.1, 0.0, -0.1, 0.4};
  spec.lnsig0 = {0.0, std::log(2.0)};
  spec.seed = 31;
  const auto a = simulate_panel(spec);
  const auto b = simulate_panel(spec);
  CHECK(arma::abs(a.panel.data - b.panel.data).max() == 0.0);
  CHECK(arma::abs(a.truth.lnsig - b.truth.lnsig).max() == 0.0);
  spec.seed = 32;
  const auto c = simulate_panel(spec);
  CHECK(arma::abs(a.panel.data - c.panel.data).max() > 0.0);
}

TEST_CASE("fixed specification gives constant truth paths") {
  DgpSpec spec;
  spec.n = 2;
  spec.lags = 1;
  spec.T = 100;
  spec.phi0 = {0.2, 0.5, 0.0, -0.3, 0.1, 0.4};
  spec.lnsig0 = {0.5, -0.5};
  spec.a_lower = {{1.0, 0.0}, {0.6, 1.0}};
  spec.seed = 33;
  const auto sim = simulate_panel(spec);
  CHECK(arma::abs(sim.truth.phi.row(0) - sim.truth.phi.row(99)).max() == 0.0);
  CHECK(sim.truth.lnsig(50, 0) == 0.5);
  CHECK(sim.truth.alpha(7, 0) == 0.6);
  CHECK(arma::abs(sim.truth.lambda - 1.0).max() == 0.0);  // gaussian
  CHECK(sim.panel.years.front() == spec.start_year);
  CHECK(sim.panel.variables.size() == 2);
}

TEST_CASE("sample covariance of a white-noise panel matches the implied "
          "covariance") {
  DgpSpec spec;
  spec.n = 2;
  spec.lags = 1;
  spec.T = 60000;
  spec.phi0.zeros(6);
  spec.lnsig0 = {0.0, std::log(0.25)};
  spec.a_lower = {{1.0, 0.0}, {-0.5, 1.0}};
  spec.seed = 34;
  const auto sim = simulate_panel(spec);
  const arma::mat A = {{1.0, 0.0}, {-0.5, 1.0}};
  const arma::mat H = arma::diagmat(arma::vec{1.0, 0.25});
  const arma::mat Ai = arma::inv(A);
  const arma::mat expect = Ai * H * Ai.t();
  const arma::mat hat = arma::cov(sim.panel.data);
  CHECK(arma::abs(hat - expect).max() < 0.02);
}

TEST_CASE("student-t weights create excess kurtosis") {
  DgpSpec gauss;
  gauss.n = 1;
  gauss.lags = 1;
  gauss.T = 60000;
  gauss.phi0.zeros(2);
  gauss.seed = 35;
  DgpSpec heavy = gauss;
  heavy.dof = 4.0;
  const auto g = simulate_panel(gauss);
  const auto h = simulate_panel(heavy);
  auto kurtosis = [](const arma::vec& x) {
    const double m = arma::mean(x);
    const double s2 = arma::var(x);
    return arma::mean(arma::pow(x - m, 4)) / (s2 * s2);
  };
  CHECK(kurtosis(g.panel.data.col(0)) == doctest::Approx(3.0).epsilon(0.05));
  CHECK(kurtosis(h.panel.data.col(0)) > 4.0);
  CHECK(h.truth.lambda.min() < 0.5);
  CHECK(h.truth.lambda.max() > 2.0);
}

TEST_CASE("unstable fixed coefficients are rejected") {
  DgpSpec spec;
  spec.n = 1;
  spec.lags = 1;
  spec.T = 2000;
  spec.phi0 = {0.0, 1.2};  // explosive
  spec.seed = 36;
  CHECK_THROWS_AS(simulate_panel(spec), std::runtime_error);
}

TEST_CASE("prior simulators are internally consistent") {
  const PriorSet priors = geweke_priors(2, 1);
  Rng rng(37);
  // hyperparameter prior means
  arma::mat q_acc(priors.k(), priors.k(), arma::fill::zeros);
  double g_acc = 0.0, v_acc = 0.0;
  const int N = 20000;
  for (int i = 0; i < N; ++i) {
    const Hyperparams h = simulate_hyper_prior(priors, rng);
    q_acc += h.hyper_q;
    g_acc += h.g(0);
    v_acc += h.v_lambda(0);
  }
  CHECK(arma::abs(q_acc / N - 1e-5 * arma::eye(priors.k(), priors.k())).max() <
        2e-6);
  CHECK(g_acc / N == doctest::Approx(0.01).epsilon(0.05));
  CHECK(v_acc / N == doctest::Approx(20.0).epsilon(0.05));

  // state prior: mixture weights have mean one, log variances follow a
  // random walk whose increments match g
  Hyperparams h = simulate_hyper_prior(priors, rng);
  h.g.fill(0.04);
  const VarState s = simulate_state_prior(priors, h, 4000, rng);
  CHECK(arma::mean(arma::vectorise(s.lambda)) == doctest::Approx(1.0).epsilon(0.05));
  const arma::vec d = arma::diff(s.lnsig.col(0));
  CHECK(arma::var(d) == doctest::Approx(0.04).epsilon(0.1));
}

TEST_CASE("joint-distribution harness runs and reports all monitored "
          "statistics") {
  GewekeConfig cfg;
  cfg.n_rep = 40;
  cfg.T = 12;
  cfg.seed = 38;
  const auto stats = geweke_check(cfg);
  CHECK(stats.size() == 20);
  for (const auto& s : stats) {
    CHECK_FALSE(s.name.empty());
    CHECK(std::isfinite(s.z));
    CHECK(std::isfinite(s.mean_marginal));
    CHECK(std::isfinite(s.mean_successive));
  }
  const auto path =
      (std::filesystem::temp_directory_path() / "ztab.csv").string();
  write_z_table(path, stats);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header.find("statistic") != std::string::npos);
  int rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 20);
}

}  // TEST_SUITE
