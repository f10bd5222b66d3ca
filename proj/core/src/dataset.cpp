#include "tvpvar/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tvpvar {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

bool RawSeries::has(int year) const {
  return std::isfinite(at(year));
}

double RawSeries::at(int year) const {
  if (years.empty() || year < years.front() || year > years.back()) return kNaN;
  return values[static_cast<std::size_t>(year - years.front())];
}

int TimeSeriesPanel::year_index(int year) const {
  if (years.empty() || year < years.front() || year > years.back()) return -1;
  return year - years.front();
}

std::vector<RawSeries> load_csv(const std::string& path,
                                const std::vector<std::string>& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open " + path);

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("load_csv: empty file " + path);
  const auto header = split_csv_line(line);

  int year_col = -1;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (trim(header[j]) == "year") year_col = static_cast<int>(j);
  if (year_col < 0)
    throw std::runtime_error("load_csv: no 'year' column in " + path);

  std::vector<int> value_cols;
  if (schema.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j)
      if (static_cast<int>(j) != year_col) value_cols.push_back(j);
  } else {
    for (const auto& name : schema) {
      int found = -1;
      for (std::size_t j = 0; j < header.size(); ++j)
        if (trim(header[j]) == name) found = static_cast<int>(j);
      if (found < 0)
        throw std::runtime_error("load_csv: required column '" + name +
                                 "' missing in " + path);
      value_cols.push_back(found);
    }
  }

  std::vector<int> years;
  std::vector<std::vector<double>> cols(value_cols.size());
  std::set<int> seen;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    const std::string ys = trim(fields[static_cast<std::size_t>(year_col)]);
    int year;
    try {
      std::size_t pos;
      year = std::stoi(ys, &pos);
      if (pos != ys.size()) throw std::invalid_argument(ys);
    } catch (const std::exception&) {
      throw std::runtime_error("load_csv: malformed year '" + ys + "' at row " +
                               std::to_string(row));
    }
    if (!seen.insert(year).second)
      throw std::runtime_error("load_csv: duplicate year " +
                               std::to_string(year) + " at row " +
                               std::to_string(row));
    years.push_back(year);
    for (std::size_t c = 0; c < value_cols.size(); ++c) {
      const std::size_t j = static_cast<std::size_t>(value_cols[c]);
      const std::string v = j < fields.size() ? trim(fields[j]) : "";
      if (v.empty()) {
        cols[c].push_back(kNaN);
      } else {
        try {
          std::size_t pos;
          const double x = std::stod(v, &pos);
          if (pos != v.size()) throw std::invalid_argument(v);
          cols[c].push_back(x);
        } catch (const std::exception&) {
          throw std::runtime_error("load_csv: malformed value '" + v +
                                   "' at row " + std::to_string(row));
        }
      }
    }
  }
  if (years.size() < 2) throw std::runtime_error("load_csv: fewer than 2 rows");

  // sort rows by year, then expand to a contiguous index
  std::vector<std::size_t> order(years.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return years[a] < years[b]; });
  const int y0 = years[order.front()];
  const int y1 = years[order.back()];

  std::vector<RawSeries> out;
  for (std::size_t c = 0; c < value_cols.size(); ++c) {
    RawSeries s;
    s.name = trim(header[static_cast<std::size_t>(value_cols[c])]);
    for (int y = y0; y <= y1; ++y) s.years.push_back(y);
    s.values.assign(s.years.size(), kNaN);
    for (std::size_t i : order)
      s.values[static_cast<std::size_t>(years[i] - y0)] = cols[c][i];
    out.push_back(std::move(s));
  }
  return out;
}

RawSeries splice_by_growth(const RawSeries& base, const RawSeries& donor,
                           int join_year, SpliceDirection direction) {
  if (!base.has(join_year))
    throw std::runtime_error("splice_by_growth: base undefined at join year " +
                             std::to_string(join_year));
  if (!donor.has(join_year))
    throw std::runtime_error("splice_by_growth: donor undefined at join year " +
                             std::to_string(join_year));

  const int ext_end = direction == SpliceDirection::Backward
                          ? donor.years.front()
                          : donor.years.back();

  RawSeries out;
  out.name = base.name;
  out.unit = base.unit;
  const int y0 = std::min(base.years.front(), ext_end);
  const int y1 = std::max(base.years.back(), ext_end);
  for (int y = y0; y <= y1; ++y) {
    out.years.push_back(y);
    out.values.push_back(base.at(y));
  }

  auto value_at = [&](int y) -> double& {
    return out.values[static_cast<std::size_t>(y - y0)];
  };

  auto step = [&](int from, int to) {
    const double d_from = donor.at(from);
    const double d_to = donor.at(to);
    if (!std::isfinite(d_from) || !std::isfinite(d_to))
      throw std::runtime_error("splice_by_growth: donor gap at year " +
                               std::to_string(std::isfinite(d_from) ? to
                                                                    : from));
    if (d_from <= 0.0 || d_to <= 0.0)
      throw std::runtime_error(
          "splice_by_growth: nonpositive donor value at year " +
          std::to_string(d_from <= 0.0 ? from : to));
    const double v_from = value_at(from);
    if (v_from <= 0.0)
      throw std::runtime_error(
          "splice_by_growth: nonpositive base value at year " +
          std::to_string(from));
    value_at(to) = v_from * (d_to / d_from);
  };

  if (direction == SpliceDirection::Backward) {
    for (int y = join_year; y > ext_end; --y) step(y, y - 1);
  } else {
    for (int y = join_year; y < ext_end; ++y) step(y, y + 1);
  }
  return out;
}

TimeSeriesPanel build_panel(const std::vector<RawSeries>& series,
                            const std::vector<VariableSpec>& spec) {
  if (spec.empty()) throw std::runtime_error("build_panel: empty spec");
  std::map<std::string, const RawSeries*> by_name;
  for (const auto& s : series) by_name[s.name] = &s;

  auto find = [&](const std::string& name) -> const RawSeries& {
    auto it = by_name.find(name);
    if (it == by_name.end())
      throw std::runtime_error("build_panel: unknown series '" + name + "'");
    return *it->second;
  };

  // level series per variable, after per-capita division
  struct Working {
    std::vector<int> years;
    std::vector<double> values;
    bool differenced;
    std::string meta;
  };
  std::vector<Working> work;
  int lo = std::numeric_limits<int>::min();
  int hi = std::numeric_limits<int>::max();

  for (const auto& v : spec) {
    const RawSeries& src = find(v.source);
    Working w;
    w.differenced = v.transform == Transform::LogGrowth;
    w.meta = v.source;
    const RawSeries* pop =
        v.per_capita_by.empty() ? nullptr : &find(v.per_capita_by);
    if (pop) w.meta += "/" + v.per_capita_by;
    w.meta += v.transform == Transform::LogGrowth ? ", 100*dlog" : ", level";

    int first = std::numeric_limits<int>::min();
    int last = std::numeric_limits<int>::max();
    for (int y = src.years.front(); y <= src.years.back(); ++y) {
      const bool ok = src.has(y) && (!pop || pop->has(y));
      if (ok && first == std::numeric_limits<int>::min()) first = y;
      if (ok) last = y;
    }
    if (first == std::numeric_limits<int>::min())
      throw std::runtime_error("build_panel: no usable data for '" + v.name +
                               "'");
    for (int y = first; y <= last; ++y) {
      const bool ok = src.has(y) && (!pop || pop->has(y));
      if (!ok)
        throw std::runtime_error("build_panel: interior missing value in '" +
                                 v.name + "' at year " + std::to_string(y));
      double x = src.at(y);
      if (pop) {
        const double p = pop->at(y);
        if (p <= 0.0)
          throw std::runtime_error("build_panel: nonpositive population at " +
                                   std::to_string(y));
        x /= p;
      }
      w.years.push_back(y);
      w.values.push_back(x);
    }
    lo = std::max(lo, w.differenced ? first + 1 : first);
    hi = std::min(hi, last);
    work.push_back(std::move(w));
  }
  if (lo > hi) throw std::runtime_error("build_panel: empty coverage overlap");

  TimeSeriesPanel panel;
  for (int y = lo; y <= hi; ++y) panel.years.push_back(y);
  panel.data.set_size(static_cast<arma::uword>(hi - lo + 1), spec.size());
  panel.mask.ones(panel.data.n_rows, panel.data.n_cols);

  for (std::size_t j = 0; j < spec.size(); ++j) {
    panel.variables.push_back(spec[j].name);
    panel.meta.push_back(work[j].meta);
    const Working& w = work[j];
    auto level_at = [&](int y) {
      return w.values[static_cast<std::size_t>(y - w.years.front())];
    };
    for (int y = lo; y <= hi; ++y) {
      double out;
      if (w.differenced) {
        const double cur = level_at(y);
        const double prev = level_at(y - 1);
        if (cur <= 0.0 || prev <= 0.0)
          throw std::runtime_error(
              "build_panel: nonpositive level before log in '" +
              spec[j].name + "' near year " + std::to_string(y));
        out = 100.0 * std::log(cur / prev);
      } else {
        out = level_at(y);
      }
      panel.data(static_cast<arma::uword>(y - lo), j) = out;
    }
  }
  return panel;
}

void export_panel_csv(const TimeSeriesPanel& panel, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("export_panel_csv: cannot write " + path);
  out << "year";
  for (const auto& v : panel.variables) out << "," << v;
  out << "\n";
  char buf[32];
  for (arma::uword t = 0; t < panel.T(); ++t) {
    out << panel.years[t];
    for (arma::uword j = 0; j < panel.n(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", panel.data(t, j));
      out << "," << buf;
    }
    out << "\n";
  }
}

}  // namespace tvpvar
