#pragma once

#include <armadillo>
#include <string>
#include <vector>

namespace tvpvar {

// One annual series in levels. Missing values are NaN; coverage is the
// contiguous year range [years.front(), years.back()].
struct RawSeries {
  std::string name;
  std::vector<int> years;      // strictly increasing, step 1
  std::vector<double> values;  // NaN = missing
  std::string unit;

  bool has(int year) const;
  double at(int year) const;  // NaN if absent
};

struct TimeSeriesPanel {
  std::vector<std::string> variables;
  std::vector<int> years;  // contiguous
  arma::mat data;          // T x n
  arma::umat mask;         // availability
  std::vector<std::string> meta;  // transform provenance per variable

  arma::uword T() const { return data.n_rows; }
  arma::uword n() const { return data.n_cols; }
  int year_index(int year) const;  // -1 when outside
};

struct SampleSplit {
  int training_len = 50;
};

enum class Transform { LogGrowth, Level };

struct VariableSpec {
  std::string name;           // panel variable name
  std::string source;         // RawSeries name
  std::string per_capita_by;  // divisor series name, empty = none
  Transform transform = Transform::LogGrowth;
};

enum class SpliceDirection { Backward, Forward };

// schema: required column names (empty = every non-year column).
std::vector<RawSeries> load_csv(const std::string& path,
                                const std::vector<std::string>& schema = {});

// Extends `base` with the growth rates of `donor` beyond `join_year`.
RawSeries splice_by_growth(const RawSeries& base, const RawSeries& donor,
                           int join_year, SpliceDirection direction);

TimeSeriesPanel build_panel(const std::vector<RawSeries>& series,
                            const std::vector<VariableSpec>& spec);

void export_panel_csv(const TimeSeriesPanel& panel, const std::string& path);

}  // namespace tvpvar
