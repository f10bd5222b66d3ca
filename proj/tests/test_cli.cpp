#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "tvpvar/drawstore.hpp"
#include "tvpvar/simulate.hpp"

using namespace tvpvar;

namespace {

namespace fs = std::filesystem;

std::string fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

RunConfig small_run(const std::string& root) {
  // data: simulated bivariate system written as a level panel
  DgpSpec dgp;
  dgp.n = 2;
  dgp.lags = 1;
  dgp.T = 170;
  dgp.phi0 = {0.1, 0.5, 0.1, 0.0, -0.1, 0.4};
  dgp.lnsig0 = {0.0, 0.0};
  dgp.a_lower = {{1.0, 0.0}, {0.4, 1.0}};
  dgp.seed = 7;
  dgp.start_year = 1800;
  const auto sim = simulate_panel(dgp);
  export_panel_csv(sim.panel, root + "/data.csv");

  RunConfig cfg;
  cfg.data_path = root + "/data.csv";
  cfg.variables = {"y1", "y2"};
  cfg.sources = {"y1", "y2"};
  cfg.transforms = {"level", "level"};
  cfg.lags = 1;
  cfg.training_len = 50;
  cfg.sampler.n_draws = 30;
  cfg.sampler.burn_in = 10;
  cfg.sampler.thin = 2;
  cfg.sampler.seed = 5;
  cfg.identification = "maxshare";
  cfg.target_var = 0;
  cfg.fev_horizon = 1;
  cfg.irf_horizons = 4;
  cfg.episodes = {{"slump", 1860, 1862}};
  cfg.output_dir = root + "/out";
  return cfg;
}

int count_csv_rows(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  int rows = -1;  // skip header
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  return rows;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("estimate, analyze, and identify produce a consistent run "
          "directory") {
  const auto root = fresh_dir("cli_pipeline");
  const RunConfig cfg = small_run(root);
  std::ostringstream log;
  REQUIRE(cli::cmd_estimate(cfg, log) == 0);

  const DrawStore store = DrawStore::load(cfg.output_dir + "/draws");
  CHECK(store.complete());
  CHECK(store.records.size() == 10);
  CHECK(store.T() == 120);
  CHECK(store.manifest.get("config_hash") == cfg.config_hash());
  CHECK(fs::exists(cfg.output_dir + "/panel.csv"));
  CHECK(fs::exists(cfg.output_dir + "/priors.kv"));

  REQUIRE(cli::cmd_analyze(cfg, cfg.output_dir + "/draws", 2, false, log) == 0);
  // one row per date, variable, horizon
  CHECK(count_csv_rows(cfg.output_dir + "/analysis/irf.csv") ==
        120 * 2 * 5);
  CHECK(count_csv_rows(cfg.output_dir + "/analysis/fevd.csv") == 120 * 2);
  CHECK(count_csv_rows(cfg.output_dir + "/analysis/volatility.csv") ==
        120 * 2 * 2);
  // explosive draws are excluded from the forecastability summary, so the
  // per-date row can be missing in principle; expect near-full coverage
  const int pred_rows =
      count_csv_rows(cfg.output_dir + "/analysis/predictability.csv");
  CHECK(pred_rows > 120 * 2 * 9 / 10);
  CHECK(pred_rows <= 120 * 2);
  CHECK(count_csv_rows(cfg.output_dir + "/analysis/episodes.csv") == 1);

  REQUIRE(cli::cmd_identify(cfg, cfg.output_dir + "/draws", 2, log) == 0);
  CHECK(count_csv_rows(cfg.output_dir + "/analysis/identify.csv") ==
        120 * 3);  // share + per-variable impact
}

TEST_CASE("analyze refuses a mismatched config") {
  const auto root = fresh_dir("cli_mismatch");
  RunConfig cfg = small_run(root);
  std::ostringstream log;
  REQUIRE(cli::cmd_estimate(cfg, log) == 0);
  cfg.sampler.seed = 999;  // different run description
  CHECK_THROWS_WITH_AS(
      cli::cmd_analyze(cfg, cfg.output_dir + "/draws", 1, false, log),
      doctest::Contains("config_hash"), std::runtime_error);
}

TEST_CASE("analyze refuses an incomplete store unless overridden") {
  const auto root = fresh_dir("cli_partial");
  const RunConfig cfg = small_run(root);
  std::ostringstream log;
  REQUIRE(cli::cmd_estimate(cfg, log) == 0);
  {
    KeyValueFile m = KeyValueFile::parse(cfg.output_dir + "/draws/manifest");
    m.set("status", "incomplete");
    m.save(cfg.output_dir + "/draws/manifest");
  }
  CHECK_THROWS_WITH_AS(
      cli::cmd_analyze(cfg, cfg.output_dir + "/draws", 1, false, log),
      doctest::Contains("allow-partial"), std::runtime_error);
  CHECK(cli::cmd_analyze(cfg, cfg.output_dir + "/draws", 1, true, log) == 0);
}

TEST_CASE("sign identification path produces output or logs censoring") {
  const auto root = fresh_dir("cli_sign");
  RunConfig cfg = small_run(root);
  cfg.identification = "sign";
  cfg.sign_matrix_path = root + "/signs.csv";
  cfg.sign_horizon = 0;
  cfg.sign_max_tries = 200;
  {
    std::ofstream out(cfg.sign_matrix_path);
    out << "+,0\n0,+\n";
  }
  std::ostringstream log;
  REQUIRE(cli::cmd_estimate(cfg, log) == 0);
  REQUIRE(cli::cmd_analyze(cfg, cfg.output_dir + "/draws", 2, false, log) == 0);
  // two shocks reported, every (date, draw) pair satisfiable by flips
  CHECK(count_csv_rows(cfg.output_dir + "/analysis/irf.csv") ==
        120 * 2 * 5 * 2);
}

TEST_CASE("splice plan feeds the panel build") {
  const auto root = fresh_dir("cli_splice");
  // base covers 1902+, donor covers 1900-1902; spliced series covers 1900+
  {
    std::ofstream out(root + "/data.csv");
    out << "year,gdp,old_gdp\n";
    out << "1900,,90\n1901,,99\n1902,100,100\n1903,105,\n1904,110,\n";
  }
  {
    std::ofstream out(root + "/splice.txt");
    out << "# target,donor,join_year,direction\n";
    out << "gdp,old_gdp,1902,backward\n";
  }
  RunConfig cfg;
  cfg.data_path = root + "/data.csv";
  cfg.splice_plan_path = root + "/splice.txt";
  cfg.variables = {"output"};
  cfg.sources = {"gdp"};
  cfg.transforms = {"log_growth"};
  const TimeSeriesPanel panel = cli::panel_from_config(cfg);
  REQUIRE(panel.T() == 4);
  CHECK(panel.years.front() == 1901);
  // growth 1900->1901 inherited from the donor: 100*ln(99/90)
  CHECK(panel.data(0, 0) ==
        doctest::Approx(100.0 * std::log(99.0 / 90.0)).epsilon(1e-12));
}

TEST_CASE("simulate command writes a loadable panel with truth paths") {
  const auto root = fresh_dir("cli_sim");
  {
    std::ofstream out(root + "/dgp.kv");
    out << "n = 2\nlags = 1\nT = 80\nseed = 3\nstart_year = 1900\n";
    out << "phi0 = 0, 0.5, 0, 0, 0, 0.5\n";
    out << "lnsig0 = 0, 0\n";
    out << "a_lower = 0.3\n";
  }
  std::ostringstream log;
  REQUIRE(cli::cmd_simulate(root + "/dgp.kv", root + "/sim", log) == 0);
  const auto series = load_csv(root + "/sim/panel.csv");
  REQUIRE(series.size() == 2);
  CHECK(series[0].years.front() == 1900);
  arma::mat truth;
  REQUIRE(truth.load(root + "/sim/truth_phi.csv", arma::csv_ascii));
  CHECK(truth.n_rows == 80);
  CHECK(truth.n_cols == 6);
}

TEST_CASE("check command smoke run") {
  const auto root = fresh_dir("cli_check");
  std::ostringstream log;
  CHECK(cli::cmd_check(0, false, root, 1, log) == 0);
  CHECK(fs::exists(root + "/geweke_z.csv"));
}

}  // TEST_SUITE
