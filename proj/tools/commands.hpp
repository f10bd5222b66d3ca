#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include "tvpvar/config.hpp"
#include "tvpvar/dataset.hpp"

namespace tvpvar::cli {

// Builds the estimation panel from the run config: CSV load, splice plan,
// per-variable transforms.
TimeSeriesPanel panel_from_config(const RunConfig& config);

int cmd_estimate(const RunConfig& config, std::ostream& log);
int cmd_analyze(const RunConfig& config, const std::string& draws_dir,
                int threads, bool allow_partial, std::ostream& log);
int cmd_identify(const RunConfig& config, const std::string& draws_dir,
                 int threads, std::ostream& log);
int cmd_simulate(const std::string& spec_path, const std::string& out_dir,
                 std::ostream& log);
int cmd_check(int n_rep, bool fault, const std::string& out_dir,
              std::uint64_t seed, std::ostream& log);

}  // namespace tvpvar::cli
