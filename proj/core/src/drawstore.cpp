#include "tvpvar/drawstore.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tvpvar {

namespace {

namespace fs = std::filesystem;

// t-major, coefficient-minor: row t of the path contributes its entries in
// order before row t+1
std::vector<double> flatten_path(const arma::mat& path) {
  std::vector<double> out;
  out.reserve(path.n_elem);
  for (arma::uword t = 0; t < path.n_rows; ++t)
    for (arma::uword j = 0; j < path.n_cols; ++j) out.push_back(path(t, j));
  return out;
}

arma::mat unflatten_path(const std::vector<double>& flat, int T, int cols) {
  if (static_cast<int>(flat.size()) != T * cols)
    throw std::runtime_error("DrawStore: record length mismatch");
  arma::mat out(T, cols);
  std::size_t idx = 0;
  for (int t = 0; t < T; ++t)
    for (int j = 0; j < cols; ++j) out(t, j) = flat[idx++];
  return out;
}

std::vector<double> flatten_hyper(const Hyperparams& h) {
  std::vector<double> out;
  for (arma::uword i = 0; i < h.hyper_q.n_elem; ++i)
    out.push_back(h.hyper_q(i));
  for (const auto& s : h.s_blocks)
    for (arma::uword i = 0; i < s.n_elem; ++i) out.push_back(s(i));
  for (arma::uword i = 0; i < h.g.n_elem; ++i) out.push_back(h.g(i));
  for (arma::uword i = 0; i < h.v_lambda.n_elem; ++i)
    out.push_back(h.v_lambda(i));
  return out;
}

Hyperparams unflatten_hyper(const std::vector<double>& flat, int n, int k) {
  Hyperparams h;
  std::size_t idx = 0;
  auto take_mat = [&](int rows, int cols) {
    arma::mat m(rows, cols);
    for (arma::uword i = 0; i < m.n_elem; ++i) m(i) = flat.at(idx++);
    return m;
  };
  h.hyper_q = take_mat(k, k);
  for (int i = 2; i <= n; ++i) h.s_blocks.push_back(take_mat(i - 1, i - 1));
  h.g = take_mat(n, 1);
  h.v_lambda = take_mat(n, 1);
  if (idx != flat.size())
    throw std::runtime_error("DrawStore: hyper record length mismatch");
  return h;
}

void write_rows(const std::string& path,
                const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("DrawStore: cannot write " + path);
  char buf[32];
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", row[j]);
      if (j) out << ",";
      out << buf;
    }
    out << "\n";
  }
}

std::vector<std::vector<double>> read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("DrawStore: cannot read " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) row.push_back(std::stod(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

int DrawStore::T() const {
  return static_cast<int>(manifest.get_int("model.T", 0));
}
int DrawStore::n() const {
  return static_cast<int>(manifest.get_int("model.n", 0));
}
int DrawStore::lags() const {
  return static_cast<int>(manifest.get_int("model.lags", 0));
}
bool DrawStore::complete() const {
  return manifest.get_or("status", "complete") == "complete";
}

void DrawStore::append(const VarState& state, const Hyperparams& hyper) {
  records.push_back({state, hyper});
}

void DrawStore::save(const std::string& dir) const {
  fs::create_directories(dir);
  KeyValueFile m = manifest;
  m.set_int("records", static_cast<std::int64_t>(records.size()));
  m.save(dir + "/manifest");

  std::vector<std::vector<double>> phi, alpha, lnsig, lambda, hyper;
  for (const auto& r : records) {
    phi.push_back(flatten_path(r.state.phi));
    alpha.push_back(flatten_path(r.state.alpha));
    lnsig.push_back(flatten_path(r.state.lnsig));
    lambda.push_back(flatten_path(r.state.lambda));
    hyper.push_back(flatten_hyper(r.hyper));
  }
  write_rows(dir + "/phi.csv", phi);
  write_rows(dir + "/alpha.csv", alpha);
  write_rows(dir + "/lnsig.csv", lnsig);
  write_rows(dir + "/lambda.csv", lambda);
  write_rows(dir + "/hyper.csv", hyper);
}

DrawStore DrawStore::load(const std::string& dir) {
  DrawStore store;
  store.manifest = KeyValueFile::parse(dir + "/manifest");
  const int T = store.T();
  const int n = store.n();
  const int lags = store.lags();
  const int k = n * (n * lags + 1);
  const int na = n * (n - 1) / 2;

  const auto phi = read_rows(dir + "/phi.csv");
  const auto alpha = read_rows(dir + "/alpha.csv");
  const auto lnsig = read_rows(dir + "/lnsig.csv");
  const auto lambda = read_rows(dir + "/lambda.csv");
  const auto hyper = read_rows(dir + "/hyper.csv");
  const std::size_t count = phi.size();
  if (alpha.size() != count || lnsig.size() != count ||
      lambda.size() != count || hyper.size() != count)
    throw std::runtime_error("DrawStore: record files disagree on draw count");
  if (static_cast<std::int64_t>(count) != store.manifest.get_int("records", -1))
    throw std::runtime_error("DrawStore: manifest record count mismatch");

  for (std::size_t i = 0; i < count; ++i) {
    DrawRecord r;
    r.state.phi = unflatten_path(phi[i], T, k);
    r.state.alpha = unflatten_path(alpha[i], T, na);
    r.state.lnsig = unflatten_path(lnsig[i], T, n);
    r.state.lambda = unflatten_path(lambda[i], T, n);
    r.hyper = unflatten_hyper(hyper[i], n, k);
    store.records.push_back(std::move(r));
  }
  return store;
}

KeyValueFile make_manifest(const RunConfig& config, int T, int n, int lags,
                           int first_year) {
  KeyValueFile m;
  m.set_int("model.T", T);
  m.set_int("model.n", n);
  m.set_int("model.lags", lags);
  m.set_int("model.first_year", first_year);
  m.set_int("sampler.n_draws", config.sampler.n_draws);
  m.set_int("sampler.burn_in", config.sampler.burn_in);
  m.set_int("sampler.thin", config.sampler.thin);
  m.set_int("sampler.seed", static_cast<std::int64_t>(config.sampler.seed));
  m.set("config_hash", config.config_hash());
  m.set("status", "complete");
  return m;
}

}  // namespace tvpvar
