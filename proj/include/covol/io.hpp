#pragma once

// Serialization: grids as JSON arrays of times, observation CSV files with
// columns series_id,time,value, estimate results as JSON objects, and the
// MDP report CSV. Floats are written with 17 significant digits so every
// report round-trips exactly and repeated runs are byte-identical.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "covol/design.hpp"
#include "covol/errors.hpp"
#include "covol/estimators.hpp"
#include "covol/grid.hpp"
#include "covol/mdp.hpp"

namespace covol {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline nlohmann::json grid_to_json(const ObservationGrid& grid) {
  return nlohmann::json(grid.times());
}

inline ObservationGrid grid_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw IoError("grid JSON must be an array of times");
  std::vector<double> times;
  times.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw IoError("grid JSON must contain only numbers");
    times.push_back(v.get<double>());
  }
  try {
    return ObservationGrid(std::move(times));
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("grid JSON invalid: ") + e.what());
  }
}

inline ObservationGrid read_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open grid file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("cannot parse grid file " + path + ": " + e.what());
  }
  return grid_from_json(j);
}

struct ObservedSeries {
  std::vector<double> times;
  std::vector<double> values;
};

/// Parse observation CSV with columns series_id,time,value (an optional
/// header row is skipped). Times per series must be strictly increasing and
/// start at 0, and both series must end at the same horizon. Every error
/// names the offending line.
inline std::pair<ObservedSeries, ObservedSeries> ingest_observations(std::istream& in) {
  ObservedSeries s1, s2;
  std::size_t last_line[2] = {0, 0};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1 && line.find("series_id") != std::string::npos) continue;
    std::istringstream row(line);
    std::string id_s, t_s, v_s;
    if (!std::getline(row, id_s, ',') || !std::getline(row, t_s, ',') ||
        !std::getline(row, v_s))
      throw IoError("line " + std::to_string(line_no) + ": expected series_id,time,value");
    int id = 0;
    double t = 0.0, v = 0.0;
    try {
      id = std::stoi(id_s);
      t = std::stod(t_s);
      v = std::stod(v_s);
    } catch (const std::exception&) {
      throw IoError("line " + std::to_string(line_no) + ": cannot parse '" + line + "'");
    }
    if (id != 1 && id != 2)
      throw IoError("line " + std::to_string(line_no) + ": series_id must be 1 or 2");
    if (!std::isfinite(t) || !std::isfinite(v))
      throw IoError("line " + std::to_string(line_no) + ": non-finite time or value");
    ObservedSeries& s = (id == 1) ? s1 : s2;
    if (!s.times.empty()) {
      if (t == s.times.back())
        throw IoError("line " + std::to_string(line_no) + ": duplicate time " +
                      format_double(t) + " in series " + std::to_string(id));
      if (t < s.times.back())
        throw IoError("line " + std::to_string(line_no) + ": non-monotone time " +
                      format_double(t) + " in series " + std::to_string(id));
    }
    s.times.push_back(t);
    s.values.push_back(v);
    last_line[id - 1] = line_no;
  }
  if (s1.times.size() < 2 || s2.times.size() < 2)
    throw IoError("need at least two observations per series");
  if (s1.times.front() != 0.0 || s2.times.front() != 0.0)
    throw IoError("each series must start at time 0");
  if (s1.times.back() != s2.times.back())
    throw IoError("series horizons differ: " + format_double(s1.times.back()) + " (line " +
                  std::to_string(last_line[0]) + ") vs " + format_double(s2.times.back()) +
                  " (line " + std::to_string(last_line[1]) + ")");
  return {std::move(s1), std::move(s2)};
}

inline std::pair<ObservedSeries, ObservedSeries> ingest_observations_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open observations file: " + path);
  return ingest_observations(in);
}

inline void write_observations(std::ostream& out, const ObservedSeries& s1,
                               const ObservedSeries& s2) {
  out << "series_id,time,value\n";
  for (std::size_t i = 0; i < s1.times.size(); ++i)
    out << "1," << format_double(s1.times[i]) << ',' << format_double(s1.values[i]) << '\n';
  for (std::size_t i = 0; i < s2.times.size(); ++i)
    out << "2," << format_double(s2.times[i]) << ',' << format_double(s2.values[i]) << '\n';
}

inline nlohmann::json estimate_to_json(const EstimateResult& r) {
  nlohmann::json j;
  j["value"] = r.value;
  j["estimator"] = to_string(r.tag);
  j["n"] = r.n;
  j["m"] = r.m;
  if (!r.scheme.empty()) j["scheme"] = r.scheme;
  j["seed"] = r.seed;
  return j;
}

inline nlohmann::json design_to_json(const ReducedDesign& d) {
  nlohmann::json j;
  nlohmann::json intervals = nlohmann::json::array();
  for (const Interval& iv : d.i_hat) intervals.push_back({{"lo", iv.lo}, {"hi", iv.hi}});
  j["intervals"] = std::move(intervals);
  nlohmann::json ranges = nlohmann::json::array();
  for (const auto& [a, b] : d.j_ranges) ranges.push_back({a + 1, b + 1});  // 1-based
  j["j_ranges"] = std::move(ranges);
  j["tau"] = d.tau;
  j["sigma_stops"] = d.sigma_stops;
  j["n0"] = d.n0;
  j["n_hat"] = d.n_hat;
  return j;
}

inline std::string mdp_report_csv(const MdpReport& report) {
  std::ostringstream out;
  out << "n,b_n,delta,count,R,phat,rescaled,L_theory,lower_bound_flag\n";
  for (const MdpCell& c : report.cells) {
    out << c.n << ',' << format_double(c.b_n) << ',' << format_double(c.delta) << ','
        << c.count << ',' << c.replicates << ',' << format_double(c.phat) << ','
        << format_double(c.rescaled) << ',' << format_double(c.L_theory) << ','
        << (c.lower_bound ? 1 : 0) << '\n';
  }
  return out.str();
}

inline nlohmann::json mdp_report_json(const MdpReport& report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const MdpCell& c : report.cells) {
    cells.push_back({{"n", c.n},
                     {"b_n", c.b_n},
                     {"delta", c.delta},
                     {"count", c.count},
                     {"R", c.replicates},
                     {"phat", c.phat},
                     {"rescaled", c.rescaled},
                     {"se_band", c.se_band},
                     {"L_theory", c.L_theory},
                     {"lower_bound_flag", c.lower_bound}});
  }
  nlohmann::json sigmas = nlohmann::json::array();
  for (const auto& [n, sigma] : report.sigma_per_n) sigmas.push_back({{"n", n}, {"sigma", sigma}});
  return {{"cells", std::move(cells)},
          {"sigma_per_n", std::move(sigmas)},
          {"speed_admissible", report.speed_admissible}};
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace covol
