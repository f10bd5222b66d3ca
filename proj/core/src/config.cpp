#include "tvpvar/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tvpvar {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

KeyValueFile KeyValueFile::parse(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("KeyValueFile: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

KeyValueFile KeyValueFile::parse_text(const std::string& text) {
  KeyValueFile out;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("KeyValueFile: missing '=' at line " +
                               std::to_string(lineno));
    out.kv_[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return out;
}

bool KeyValueFile::has(const std::string& key) const {
  return kv_.count(key) > 0;
}

std::string KeyValueFile::get(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end())
    throw std::runtime_error("KeyValueFile: missing key '" + key + "'");
  return it->second;
}

std::string KeyValueFile::get_or(const std::string& key,
                                 const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double KeyValueFile::get_double(const std::string& key, double fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : std::stod(it->second);
}

std::int64_t KeyValueFile::get_int(const std::string& key,
                                   std::int64_t fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : std::stoll(it->second);
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  return it->second == "true" || it->second == "1" || it->second == "on";
}

std::vector<double> KeyValueFile::get_doubles(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(get(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) out.push_back(std::stod(t));
  }
  return out;
}

std::vector<std::string> KeyValueFile::get_strings(
    const std::string& key) const {
  std::vector<std::string> out;
  std::stringstream ss(get(key));
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

void KeyValueFile::set(const std::string& key, const std::string& value) {
  kv_[key] = value;
}

void KeyValueFile::set_double(const std::string& key, double value) {
  kv_[key] = fmt_double(value);
}

void KeyValueFile::set_int(const std::string& key, std::int64_t value) {
  kv_[key] = std::to_string(value);
}

void KeyValueFile::set_doubles(const std::string& key,
                               const std::vector<double>& values) {
  std::string joined;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) joined += ",";
    joined += fmt_double(values[i]);
  }
  kv_[key] = joined;
}

std::string KeyValueFile::serialize() const {
  std::string out;
  for (const auto& [k, v] : kv_) out += k + " = " + v + "\n";
  return out;
}

void KeyValueFile::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("KeyValueFile: cannot write " + path);
  out << serialize();
}

std::uint64_t fnv1a_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void SamplerConfig::validate() const {
  if (burn_in < 0 || n_draws <= burn_in)
    throw std::runtime_error("SamplerConfig: need burn_in < n_draws");
  if (thin < 1) throw std::runtime_error("SamplerConfig: thin >= 1 required");
}

RunConfig RunConfig::from_file(const std::string& path) {
  return from_kv(KeyValueFile::parse(path));
}

RunConfig RunConfig::from_kv(const KeyValueFile& kv) {
  RunConfig c;
  c.schema_version = static_cast<int>(kv.get_int("schema_version", 1));
  c.data_path = kv.get_or("data.path", "");
  c.splice_plan_path = kv.get_or("data.splice_plan", "");
  if (kv.has("panel.variables")) c.variables = kv.get_strings("panel.variables");
  if (kv.has("panel.sources")) c.sources = kv.get_strings("panel.sources");
  if (kv.has("panel.per_capita_by"))
    c.per_capita_by = kv.get_strings("panel.per_capita_by");
  if (kv.has("panel.transforms"))
    c.transforms = kv.get_strings("panel.transforms");
  c.lags = static_cast<int>(kv.get_int("model.lags", 2));
  c.training_len = static_cast<int>(kv.get_int("model.training_len", 50));
  c.sampler.n_draws = static_cast<int>(kv.get_int("sampler.n_draws", 20000));
  c.sampler.burn_in = static_cast<int>(kv.get_int("sampler.burn_in", 10000));
  c.sampler.thin = static_cast<int>(kv.get_int("sampler.thin", 10));
  c.sampler.seed = static_cast<std::uint64_t>(kv.get_int("sampler.seed", 1));
  c.sampler.mh_scale = kv.get_double("sampler.mh_scale", 1.0);
  c.sampler.adapt_mh = kv.get_bool("sampler.adapt_mh", true);
  c.sampler.stability_filter = kv.get_bool("sampler.stability_filter", false);
  c.identification = kv.get_or("identify.scheme", "maxshare");
  c.target_var = static_cast<int>(kv.get_int("identify.target_var", 0));
  c.fev_horizon = static_cast<int>(kv.get_int("identify.fev_horizon", 1));
  c.sign_matrix_path = kv.get_or("identify.sign_matrix", "");
  c.sign_horizon = static_cast<int>(kv.get_int("identify.sign_horizon", 0));
  c.sign_max_tries = static_cast<int>(kv.get_int("identify.max_tries", 1000));
  c.irf_horizons = static_cast<int>(kv.get_int("analysis.irf_horizons", 5));
  c.output_dir = kv.get_or("output.dir", "out");
  if (kv.has("analysis.episodes")) {
    // name:start:end triples
    for (const auto& item : kv.get_strings("analysis.episodes")) {
      std::stringstream ss(item);
      EpisodeSpec e;
      std::string tok;
      std::getline(ss, e.name, ':');
      std::getline(ss, tok, ':');
      e.start_year = std::stoi(tok);
      std::getline(ss, tok, ':');
      e.end_year = std::stoi(tok);
      c.episodes.push_back(e);
    }
  }
  return c;
}

KeyValueFile RunConfig::to_kv() const {
  KeyValueFile kv;
  kv.set_int("schema_version", schema_version);
  kv.set("data.path", data_path);
  kv.set("data.splice_plan", splice_plan_path);
  auto join = [](const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ",";
      out += v[i];
    }
    return out;
  };
  kv.set("panel.variables", join(variables));
  kv.set("panel.sources", join(sources));
  kv.set("panel.per_capita_by", join(per_capita_by));
  kv.set("panel.transforms", join(transforms));
  kv.set_int("model.lags", lags);
  kv.set_int("model.training_len", training_len);
  kv.set_int("sampler.n_draws", sampler.n_draws);
  kv.set_int("sampler.burn_in", sampler.burn_in);
  kv.set_int("sampler.thin", sampler.thin);
  kv.set_int("sampler.seed", static_cast<std::int64_t>(sampler.seed));
  kv.set_double("sampler.mh_scale", sampler.mh_scale);
  kv.set("sampler.adapt_mh", sampler.adapt_mh ? "true" : "false");
  kv.set("sampler.stability_filter",
         sampler.stability_filter ? "true" : "false");
  kv.set("identify.scheme", identification);
  kv.set_int("identify.target_var", target_var);
  kv.set_int("identify.fev_horizon", fev_horizon);
  kv.set("identify.sign_matrix", sign_matrix_path);
  kv.set_int("identify.sign_horizon", sign_horizon);
  kv.set_int("identify.max_tries", sign_max_tries);
  kv.set_int("analysis.irf_horizons", irf_horizons);
  std::string eps;
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    if (i) eps += ",";
    eps += episodes[i].name + ":" + std::to_string(episodes[i].start_year) +
           ":" + std::to_string(episodes[i].end_year);
  }
  kv.set("analysis.episodes", eps);
  kv.set("output.dir", output_dir);
  return kv;
}

std::string RunConfig::config_hash() const {
  return hash_hex(fnv1a_hash(to_kv().serialize()));
}

}  // namespace tvpvar
