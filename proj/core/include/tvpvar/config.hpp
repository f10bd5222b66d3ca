#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace tvpvar {

// Flat `key = value` text files; keys use dotted paths, values are scalars or
// comma-separated lists. Lines starting with '#' are comments.
class KeyValueFile {
 public:
  KeyValueFile() = default;
  static KeyValueFile parse(const std::string& path);
  static KeyValueFile parse_text(const std::string& text);

  bool has(const std::string& key) const;
  std::string get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::string> get_strings(const std::string& key) const;

  void set(const std::string& key, const std::string& value);
  void set_double(const std::string& key, double value);  // 17 sig digits
  void set_int(const std::string& key, std::int64_t value);
  void set_doubles(const std::string& key, const std::vector<double>& values);

  // canonical form: keys sorted, one per line
  std::string serialize() const;
  void save(const std::string& path) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

std::uint64_t fnv1a_hash(const std::string& text);
std::string hash_hex(std::uint64_t h);

struct SamplerConfig {
  int n_draws = 20000;   // total sweeps, including burn-in
  int burn_in = 10000;
  int thin = 10;
  std::uint64_t seed = 1;
  double mh_scale = 1.0;     // initial RWMH step variance for the dof draw
  bool adapt_mh = true;      // adapt during burn-in only
  bool stability_filter = false;

  void validate() const;
};

struct EpisodeSpec {
  std::string name;
  int start_year = 0;
  int end_year = 0;
};

// Full run description for the CLI; round-trips through KeyValueFile.
struct RunConfig {
  int schema_version = 1;
  std::string data_path;
  std::string splice_plan_path;  // optional
  std::vector<std::string> variables;       // panel variable names
  std::vector<std::string> sources;         // CSV column per variable
  std::vector<std::string> per_capita_by;   // divisor column or ""
  std::vector<std::string> transforms;      // "log_growth" | "level"
  int lags = 2;
  int training_len = 50;
  SamplerConfig sampler;
  std::string identification = "maxshare";  // or "sign"
  int target_var = 0;
  int fev_horizon = 1;
  std::string sign_matrix_path;
  int sign_horizon = 0;
  int sign_max_tries = 1000;
  int irf_horizons = 5;
  std::vector<EpisodeSpec> episodes;
  std::string output_dir;

  static RunConfig from_file(const std::string& path);
  static RunConfig from_kv(const KeyValueFile& kv);
  KeyValueFile to_kv() const;
  std::string config_hash() const;  // hash of canonical serialization
};

}  // namespace tvpvar
