#pragma once

#include <string>
#include <vector>

#include "tvpvar/config.hpp"
#include "tvpvar/sampler.hpp"

namespace tvpvar {

struct DrawRecord {
  VarState state;
  Hyperparams hyper;
};

// Append-only store of posterior draws plus a manifest describing the run.
// On disk: a directory with `manifest` (key-value) and one CSV per parameter
// block (row = draw, flattened path, 17 significant digits).
struct DrawStore {
  KeyValueFile manifest;
  std::vector<DrawRecord> records;

  int T() const;
  int n() const;
  int lags() const;
  bool complete() const;

  void append(const VarState& state, const Hyperparams& hyper);
  void save(const std::string& dir) const;
  static DrawStore load(const std::string& dir);
};

KeyValueFile make_manifest(const RunConfig& config, int T, int n, int lags,
                           int first_year);

}  // namespace tvpvar
