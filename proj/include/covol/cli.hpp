#pragma once

// The covol command line: verbs simulate | estimate | design | variance |
// sigma | mdp | report. Configuration comes from an optional JSON file plus
// flags (flags win, COVOL_SEED wins over both); defaults are filled, the
// whole configuration is validated with every violation listed, and the
// effective configuration is echoed to stdout as canonical JSON before the
// verb runs. Exit codes: 0 success, 2 configuration error, 3 numerical
// failure, 4 I/O failure.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "covol/asymptotics.hpp"
#include "covol/design.hpp"
#include "covol/errors.hpp"
#include "covol/estimators.hpp"
#include "covol/grid.hpp"
#include "covol/io.hpp"
#include "covol/mdp.hpp"
#include "covol/model.hpp"
#include "covol/paths.hpp"

namespace covol::cli {

using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitIo = 4;

namespace detail {

inline const std::vector<std::string>& known_verbs() {
  static const std::vector<std::string> v = {"simulate", "estimate", "design", "variance",
                                             "sigma",    "mdp",      "report"};
  return v;
}

inline bool is_switch(const std::string& key) {
  return key == "force" || key == "dual" || key == "oracle";
}

/// Collect `--key value` pairs (and bare switches) into a JSON object.
inline json flags_to_json(const std::vector<std::string>& args, std::size_t start,
                          std::vector<std::string>& problems) {
  json j = json::object();
  std::size_t i = start;
  while (i < args.size()) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) {
      problems.push_back("unexpected argument '" + a + "'");
      ++i;
      continue;
    }
    std::string key = a.substr(2);
    std::string value;
    const auto eq = key.find('=');
    if (eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else if (is_switch(key)) {
      j[key] = true;
      ++i;
      continue;
    } else if (i + 1 < args.size()) {
      value = args[++i];
    } else {
      problems.push_back("flag --" + key + " needs a value");
      ++i;
      continue;
    }
    ++i;
    std::string canon_key = key;
    for (char& c : canon_key)
      if (c == '-') c = '_';
    // lists split on commas; numbers stay numbers; everything else is a string
    json parsed;
    if (canon_key == "rates" || canon_key == "deltas" || canon_key == "n_list" ||
        canon_key == "coefficients") {
      json arr = json::array();
      std::istringstream ss(value);
      std::string tok;
      bool ok = true;
      while (std::getline(ss, tok, ',')) {
        try {
          arr.push_back(std::stod(tok));
        } catch (const std::exception&) {
          ok = false;
        }
      }
      if (!ok || arr.empty()) {
        problems.push_back("flag --" + key + ": expected a comma-separated number list");
        continue;
      }
      parsed = std::move(arr);
    } else {
      try {
        std::size_t used = 0;
        const double d = std::stod(value, &used);
        if (used == value.size())
          parsed = d;
        else
          parsed = value;
      } catch (const std::exception&) {
        parsed = value;
      }
    }
    j[canon_key] = std::move(parsed);
  }
  return j;
}

inline bool get_number(const json& j, const std::string& key, double& out) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number()) return false;
  out = it->get<double>();
  return true;
}

inline std::string get_string(const json& j, const std::string& key,
                              const std::string& fallback = "") {
  const auto it = j.find(key);
  if (it != j.end() && it->is_string()) return it->get<std::string>();
  return fallback;
}

inline double get_or(const json& j, const std::string& key, double fallback) {
  double v = fallback;
  get_number(j, key, v);
  return v;
}

inline bool get_flag(const json& j, const std::string& key) {
  const auto it = j.find(key);
  return it != j.end() && it->is_boolean() && it->get<bool>();
}

inline bool file_exists(const std::string& path) {
  std::ifstream in(path);
  return static_cast<bool>(in);
}

inline void default_to(json& cfg, const std::string& key, const json& value) {
  if (!cfg.contains(key)) cfg[key] = value;
}

inline void fill_model_defaults(json& cfg) {
  default_to(cfg, "model", "constant");
  default_to(cfg, "sigma1", 1.0);
  default_to(cfg, "sigma2", 1.0);
  default_to(cfg, "rho", 0.5);
  const std::string name = get_string(cfg, "model", "constant");
  if (name == "piecewise") {
    default_to(cfg, "sigma1b", cfg["sigma1"]);
    default_to(cfg, "sigma2b", cfg["sigma2"]);
  } else if (name == "sine") {
    default_to(cfg, "sigma1b", 0.0);
    default_to(cfg, "sigma2b", 0.0);
  }
}

inline void fill_scheme_defaults(json& cfg) {
  default_to(cfg, "scheme", "sync");
  default_to(cfg, "n", 10.0);
  if (get_string(cfg, "scheme") == "poisson") default_to(cfg, "rates", json::array({100.0, 100.0}));
}

/// Fill per-verb defaults so the echoed configuration is complete and
/// re-parsing the echo is a fixed point.
inline void fill_defaults(json& cfg) {
  const std::string verb = get_string(cfg, "verb");
  if (verb == "simulate") {
    fill_model_defaults(cfg);
    fill_scheme_defaults(cfg);
    default_to(cfg, "substeps", 8.0);
  } else if (verb == "estimate") {
    default_to(cfg, "estimator", "hy");
    const std::string est = get_string(cfg, "estimator");
    if (est == "hy") default_to(cfg, "mode", "direct");
    if (est == "bipower") {
      default_to(cfg, "r", 2.0);
      default_to(cfg, "q", 0.0);
      default_to(cfg, "range", "full");
    }
  } else if (verb == "design") {
    default_to(cfg, "dual", false);
  } else if (verb == "variance") {
    fill_model_defaults(cfg);
    fill_scheme_defaults(cfg);
    default_to(cfg, "oracle", false);
  } else if (verb == "sigma") {
    fill_model_defaults(cfg);
    default_to(cfg, "g", "abs^1");
    default_to(cfg, "h", "abs^1");
  } else if (verb == "mdp") {
    default_to(cfg, "target", "mdep");
    const std::string target = get_string(cfg, "target");
    if (target != "mdep") {
      fill_model_defaults(cfg);
      default_to(cfg, "scheme", "sync");
      if (get_string(cfg, "scheme") == "poisson")
        default_to(cfg, "rates", json::array({100.0, 100.0}));
    } else {
      default_to(cfg, "m", 0.0);
      {
        json coeffs = json::array();
        const std::size_t m = static_cast<std::size_t>(get_or(cfg, "m", 0.0));
        for (std::size_t i = 0; i <= m; ++i) coeffs.push_back(1.0);
        default_to(cfg, "coefficients", coeffs);
      }
      default_to(cfg, "base", "gaussian");
      if (get_string(cfg, "base") == "t") default_to(cfg, "t_dof", 3.0);
    }
    if (target == "bipower") {
      default_to(cfg, "g", "abs^1");
      default_to(cfg, "h", "abs^1");
      default_to(cfg, "range", "full");
    }
    default_to(cfg, "alpha", 0.1);
    default_to(cfg, "beta", 1.0);
    default_to(cfg, "n_list", json::array({100.0, 1000.0}));
    default_to(cfg, "deltas", json::array({1.0}));
    default_to(cfg, "replicates", 1000.0);
    default_to(cfg, "substeps", 8.0);
    default_to(cfg, "workers", 0.0);
    default_to(cfg, "force", false);
    default_to(cfg, "format", "csv");
  } else if (verb == "report") {
    default_to(cfg, "format", "json");
  }
}

inline const std::vector<std::string>& allowed_keys(const std::string& verb) {
  static const std::vector<std::string> common = {"verb", "seed", "T", "out"};
  static const std::vector<std::string> model = {"model",   "sigma1", "sigma2",
                                                 "sigma1b", "sigma2b", "rho"};
  static const std::vector<std::string> scheme = {"scheme", "n", "rates"};
  auto build = [&](std::initializer_list<const std::vector<std::string>*> groups,
                   std::initializer_list<const char*> extra) {
    std::vector<std::string> keys = common;
    for (const auto* g : groups) keys.insert(keys.end(), g->begin(), g->end());
    for (const char* e : extra) keys.emplace_back(e);
    return keys;
  };
  static const std::vector<std::string> k_simulate = build({&model, &scheme}, {"substeps"});
  static const std::vector<std::string> k_estimate =
      build({}, {"estimator", "input", "mode", "r", "q", "range"});
  static const std::vector<std::string> k_design = build({}, {"gridI", "gridJ", "dual"});
  static const std::vector<std::string> k_variance = build({&model, &scheme}, {"oracle"});
  static const std::vector<std::string> k_sigma = build({&model}, {"g", "h"});
  static const std::vector<std::string> k_mdp = build(
      {&model, &scheme}, {"target", "alpha", "beta", "n_list", "deltas", "replicates",
                          "substeps", "workers", "force", "m", "coefficients", "base",
                          "t_dof", "g", "h", "range", "format"});
  static const std::vector<std::string> k_report = build({}, {"input", "format"});
  static const std::vector<std::string> none = {};
  if (verb == "simulate") return k_simulate;
  if (verb == "estimate") return k_estimate;
  if (verb == "design") return k_design;
  if (verb == "variance") return k_variance;
  if (verb == "sigma") return k_sigma;
  if (verb == "mdp") return k_mdp;
  if (verb == "report") return k_report;
  return none;
}

struct ParsedModel {
  ModelSpec model = ModelSpec::constant(1.0, 1.0, 0.5);
  std::string name = "constant";
};

inline ParsedModel parse_model(const json& cfg, std::vector<std::string>& problems) {
  ParsedModel out;
  out.name = get_string(cfg, "model", "constant");
  const double T = get_or(cfg, "T", 1.0);
  const double s1 = get_or(cfg, "sigma1", 1.0);
  const double s2 = get_or(cfg, "sigma2", 1.0);
  const double s1b = get_or(cfg, "sigma1b", out.name == "piecewise" ? s1 : 0.0);
  const double s2b = get_or(cfg, "sigma2b", out.name == "piecewise" ? s2 : 0.0);
  const double rho = get_or(cfg, "rho", 0.5);
  bool ok = true;
  auto fail = [&](const std::string& msg) {
    problems.push_back(msg);
    ok = false;
  };
  if (!(T > 0.0)) fail("field T: must be > 0");
  if (rho < 0.0 || rho > 1.0) fail("field rho: must lie in [0,1]");
  if (s1 < 0.0) fail("field sigma1: must be >= 0");
  if (s2 < 0.0) fail("field sigma2: must be >= 0");
  if (out.name == "constant") {
    if (ok) out.model = ModelSpec::constant(s1, s2, rho, T);
  } else if (out.name == "piecewise") {
    if (s1b < 0.0) fail("field sigma1b: must be >= 0");
    if (s2b < 0.0) fail("field sigma2b: must be >= 0");
    if (ok) out.model = ModelSpec::piecewise(s1, s1b, s2, s2b, rho, T);
  } else if (out.name == "sine") {
    if (s1 < std::abs(s1b)) fail("field sigma1b: sine preset needs sigma1 >= |sigma1b|");
    if (s2 < std::abs(s2b)) fail("field sigma2b: sine preset needs sigma2 >= |sigma2b|");
    if (ok) out.model = ModelSpec::sine(s1, s1b, s2, s2b, rho, T);
  } else {
    fail("field model: unknown preset '" + out.name + "' (constant | piecewise | sine)");
  }
  return out;
}

struct ParsedGrids {
  ObservationGrid gridI = synchronous_grid(1, 1.0);
  ObservationGrid gridJ = synchronous_grid(1, 1.0);
  std::string scheme = "sync";
};

inline ParsedGrids parse_grids(const json& cfg, double T, std::uint64_t seed,
                               std::vector<std::string>& problems) {
  ParsedGrids out;
  out.scheme = get_string(cfg, "scheme", "sync");
  const double n_raw = get_or(cfg, "n", 10.0);
  if (!(n_raw >= 1.0) || n_raw != std::floor(n_raw)) {
    problems.push_back("field n: must be a positive integer");
    return out;
  }
  const std::size_t n = static_cast<std::size_t>(n_raw);
  if (out.scheme == "sync") {
    out.gridI = synchronous_grid(n, T);
    out.gridJ = out.gridI;
  } else if (out.scheme == "alt") {
    auto pair = alternating_grids(n, T);
    out.gridI = std::move(pair.first);
    out.gridJ = std::move(pair.second);
  } else if (out.scheme == "poisson") {
    double r1 = 100.0, r2 = 100.0;
    const auto it = cfg.find("rates");
    if (it != cfg.end()) {
      if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() ||
          !(*it)[1].is_number()) {
        problems.push_back("field rates: expected two positive numbers");
        return out;
      }
      r1 = (*it)[0].get<double>();
      r2 = (*it)[1].get<double>();
    }
    if (!(r1 > 0.0) || !(r2 > 0.0)) {
      problems.push_back("field rates: expected two positive numbers");
      return out;
    }
    auto pair = poisson_grids(r1, r2, T, seed);
    out.gridI = std::move(pair.first);
    out.gridJ = std::move(pair.second);
  } else {
    problems.push_back("field scheme: unknown scheme '" + out.scheme +
                       "' (sync | alt | poisson)");
  }
  return out;
}

inline std::optional<FunctionSpec> parse_function(const std::string& text,
                                                  std::vector<std::string>& problems,
                                                  const std::string& field) {
  if (text == "1" || text == "one") return FunctionSpec::abs_power_fn(0.0);
  if (text.rfind("abs^", 0) == 0) {
    try {
      const double r = std::stod(text.substr(4));
      if (r >= 0.0) return FunctionSpec::abs_power_fn(r);
    } catch (const std::exception&) {
    }
  }
  problems.push_back("field " + field + ": expected 'abs^<r>' or '1', got '" + text + "'");
  return std::nullopt;
}

inline std::uint64_t parse_seed(const json& cfg, std::vector<std::string>& problems) {
  const auto it = cfg.find("seed");
  if (it == cfg.end()) return 12345;
  if (it->is_number_unsigned()) return it->get<std::uint64_t>();
  if (it->is_number_integer() && it->get<long long>() >= 0)
    return static_cast<std::uint64_t>(it->get<long long>());
  if (it->is_number_float()) {
    const double d = it->get<double>();
    if (d >= 0.0 && d == std::floor(d)) return static_cast<std::uint64_t>(d);
  }
  problems.push_back("field seed: must be a 64-bit unsigned integer");
  return 0;
}

inline void emit(const json& cfg, const std::string& content, std::ostream& out) {
  const std::string path = get_string(cfg, "out");
  if (path.empty()) {
    out << content;
    if (!content.empty() && content.back() != '\n') out << '\n';
  } else {
    write_text_file(path, content);
  }
}

inline int do_simulate(const json& cfg, std::ostream& out, std::vector<std::string>& problems) {
  const ParsedModel pm = parse_model(cfg, problems);
  const std::uint64_t seed = parse_seed(cfg, problems);
  const double substeps = get_or(cfg, "substeps", 8.0);
  if (!(substeps >= 1.0) || substeps != std::floor(substeps))
    problems.push_back("field substeps: must be a positive integer");
  if (!problems.empty()) return kExitConfig;
  const ParsedGrids grids = parse_grids(cfg, pm.model.horizon, seed, problems);
  if (!problems.empty()) return kExitConfig;

  const std::vector<double> master =
      master_grid_for(grids.gridI, grids.gridJ, static_cast<int>(substeps));
  const PathPair path = simulate_paths(pm.model, master, seed);
  ObservedSeries s1{grids.gridI.times(), restrict_series(path, 1, grids.gridI)};
  ObservedSeries s2{grids.gridJ.times(), restrict_series(path, 2, grids.gridJ)};
  std::ostringstream csv;
  write_observations(csv, s1, s2);
  emit(cfg, csv.str(), out);
  return kExitOk;
}

inline int do_estimate(const json& cfg, std::ostream& out, std::vector<std::string>& problems) {
  const std::string estimator = get_string(cfg, "estimator", "hy");
  const std::string input = get_string(cfg, "input");
  if (input.empty())
    problems.push_back("field input: required (observations CSV)");
  else if (!file_exists(input))
    problems.push_back("input file does not exist: " + input);
  if (estimator == "v")
    problems.push_back(
        "estimator v needs the martingale decomposition, which external data does not carry; "
        "use estimator hy");
  else if (estimator != "hy" && estimator != "cn" && estimator != "bipower")
    problems.push_back("field estimator: expected hy | cn | bipower");
  if (!problems.empty()) return kExitConfig;

  const auto [s1, s2] = ingest_observations_file(input);
  const ObservationGrid gridI{std::vector<double>(s1.times)};
  const ObservationGrid gridJ{std::vector<double>(s2.times)};

  EstimateResult r;
  r.seed = parse_seed(cfg, problems);
  r.n = gridI.interval_count();
  r.m = gridJ.interval_count();
  if (estimator == "cn") {
    if (s1.times != s2.times) {
      problems.push_back("estimator cn needs synchronous observations");
      return kExitConfig;
    }
    r.tag = EstimatorTag::Cn;
    r.value = realized_covolatility(s1.values, s2.values);
  } else if (estimator == "hy") {
    const std::string mode_s = get_string(cfg, "mode", "direct");
    HyMode mode = HyMode::direct;
    if (mode_s == "reduced")
      mode = HyMode::reduced;
    else if (mode_s == "dual")
      mode = HyMode::dual;
    else if (mode_s != "direct") {
      problems.push_back("field mode: expected direct | reduced | dual");
      return kExitConfig;
    }
    r.tag = EstimatorTag::U;
    r.value = hayashi_yoshida(gridI, s1.values, gridJ, s2.values, mode);
  } else {  // bipower, evaluated on series 1
    const double rr = get_or(cfg, "r", 2.0);
    const double qq = get_or(cfg, "q", 0.0);
    if (rr < 0.0 || qq < 0.0) {
      problems.push_back("fields r, q: exponents must be >= 0");
      return kExitConfig;
    }
    const std::string range_s = get_string(cfg, "range", "full");
    if (range_s != "full" && range_s != "truncated") {
      problems.push_back("field range: expected full | truncated");
      return kExitConfig;
    }
    r.tag = EstimatorTag::Bipower;
    r.value = bipower_power(rr, qq, gridI, s1.values,
                            range_s == "full" ? BipowerRange::full : BipowerRange::truncated);
  }
  emit(cfg, estimate_to_json(r).dump(2), out);
  return kExitOk;
}

inline int do_design(const json& cfg, std::ostream& out, std::vector<std::string>& problems) {
  const std::string pathI = get_string(cfg, "gridI");
  const std::string pathJ = get_string(cfg, "gridJ");
  if (pathI.empty() || pathJ.empty())
    problems.push_back("fields gridI, gridJ: both grid files are required");
  if (!pathI.empty() && !file_exists(pathI))
    problems.push_back("gridI file does not exist: " + pathI);
  if (!pathJ.empty() && !file_exists(pathJ))
    problems.push_back("gridJ file does not exist: " + pathJ);
  if (!problems.empty()) return kExitConfig;

  const ObservationGrid gridI = read_grid_file(pathI);
  const ObservationGrid gridJ = read_grid_file(pathJ);
  const ReducedDesign d = get_flag(cfg, "dual") ? dual_reduced_design(gridI, gridJ)
                                                : build_reduced_design(gridI, gridJ);
  emit(cfg, design_to_json(d).dump(2), out);
  return kExitOk;
}

inline int do_variance(const json& cfg, std::ostream& out, std::vector<std::string>& problems) {
  const ParsedModel pm = parse_model(cfg, problems);
  const std::uint64_t seed = parse_seed(cfg, problems);
  if (!problems.empty()) return kExitConfig;
  const ParsedGrids grids = parse_grids(cfg, pm.model.horizon, seed, problems);
  if (!problems.empty()) return kExitConfig;

  const QuadratureSpec quad;
  const ReducedDesign design = build_reduced_design(grids.gridI, grids.gridJ);
  json j;
  j["value"] = variance_Vn(design, grids.gridJ, pm.model, quad);
  j["method"] = "variance-bracket";
  j["tolerance"] = quad.abs_tol;
  if (get_flag(cfg, "oracle"))
    j["oracle"] = isserlis_variance_oracle(grids.gridI, grids.gridJ, pm.model, quad);
  emit(cfg, j.dump(2), out);
  return kExitOk;
}

inline int do_sigma(const json& cfg, std::ostream& out, std::vector<std::string>& problems) {
  const ParsedModel pm = parse_model(cfg, problems);
  const auto g = parse_function(get_string(cfg, "g", "abs^1"), problems, "g");
  const auto h = parse_function(get_string(cfg, "h", "abs^1"), problems, "h");
  if (!problems.empty()) return kExitConfig;

  const QuadratureSpec quad;
  const BipowerAsymptotics asy = sigma_bipower(*g, *h, pm.model, 1, quad);
  json j;
  j["value"] = asy.variance;
  j["limit"] = asy.limit;
  j["method"] = "gauss-hermite-64";
  j["tolerance"] = quad.abs_tol;
  emit(cfg, j.dump(2), out);
  return kExitOk;
}

/// Build the experiment configuration, collecting problems instead of
/// throwing; shared by the validation pass and the execution pass.
inline MdpExperimentConfig parse_mdp_experiment(const json& cfg,
                                                std::vector<std::string>& problems) {
  MdpExperimentConfig exp;
  const std::string target = get_string(cfg, "target", "mdep");
  if (target == "hy_v")
    exp.target = MdpTarget::HY_V;
  else if (target == "hy_u")
    exp.target = MdpTarget::HY_U;
  else if (target == "bipower")
    exp.target = MdpTarget::Bipower;
  else if (target == "mdep")
    exp.target = MdpTarget::MDepSynthetic;
  else
    problems.push_back("field target: expected hy_v | hy_u | bipower | mdep");

  if (target != "mdep") {
    const ParsedModel pm = parse_model(cfg, problems);
    exp.model = pm.model;
  }
  const std::string scheme = get_string(cfg, "scheme", "sync");
  if (scheme == "sync")
    exp.scheme = SamplingScheme::synchronous;
  else if (scheme == "alt")
    exp.scheme = SamplingScheme::alternating;
  else if (scheme == "poisson")
    exp.scheme = SamplingScheme::poisson;
  else
    problems.push_back("field scheme: unknown scheme '" + scheme + "'");

  if (cfg.contains("rates") && cfg["rates"].is_array() && cfg["rates"].size() == 2) {
    exp.poisson_rate1 = cfg["rates"][0].get<double>();
    exp.poisson_rate2 = cfg["rates"][1].get<double>();
  }
  exp.speed.alpha = get_or(cfg, "alpha", 0.1);
  exp.speed.beta = get_or(cfg, "beta", 1.0);
  exp.seed = parse_seed(cfg, problems);
  exp.replicates = static_cast<std::size_t>(get_or(cfg, "replicates", 1000.0));
  exp.substeps = static_cast<int>(get_or(cfg, "substeps", 8.0));
  exp.workers = static_cast<std::size_t>(get_or(cfg, "workers", 0.0));
  exp.force = get_flag(cfg, "force");

  if (cfg.contains("n_list") && cfg["n_list"].is_array()) {
    exp.n_list.clear();
    for (const auto& v : cfg["n_list"]) {
      if (!v.is_number() || v.get<double>() < 1.0) {
        problems.push_back("field n_list: entries must be positive integers");
        break;
      }
      exp.n_list.push_back(static_cast<std::size_t>(v.get<double>()));
    }
  }
  if (cfg.contains("deltas") && cfg["deltas"].is_array()) {
    exp.deltas.clear();
    for (const auto& v : cfg["deltas"]) {
      if (!v.is_number()) {
        problems.push_back("field deltas: entries must be numbers");
        break;
      }
      exp.deltas.push_back(v.get<double>());
    }
  }
  if (target == "mdep") {
    exp.mdep.m = static_cast<std::size_t>(get_or(cfg, "m", 0.0));
    exp.mdep.coefficients.assign(exp.mdep.m + 1, 1.0);
    if (cfg.contains("coefficients") && cfg["coefficients"].is_array()) {
      exp.mdep.coefficients.clear();
      for (const auto& v : cfg["coefficients"])
        exp.mdep.coefficients.push_back(v.get<double>());
    }
    const std::string base = get_string(cfg, "base", "gaussian");
    if (base == "gaussian")
      exp.mdep.base = BaseDistribution::gaussian;
    else if (base == "bounded")
      exp.mdep.base = BaseDistribution::bounded;
    else if (base == "t")
      exp.mdep.base = BaseDistribution::heavy_tail_t;
    else
      problems.push_back("field base: expected gaussian | bounded | t");
    exp.mdep.t_dof = static_cast<int>(get_or(cfg, "t_dof", 3.0));
  }
  if (target == "bipower") {
    const auto g = parse_function(get_string(cfg, "g", "abs^1"), problems, "g");
    const auto h = parse_function(get_string(cfg, "h", "abs^1"), problems, "h");
    if (g) exp.g = *g;
    if (h) exp.h = *h;
    exp.range = get_string(cfg, "range", "full") == "truncated" ? BipowerRange::truncated
                                                                : BipowerRange::full;
  }
  if (!problems.empty()) return exp;

  try {
    exp.validate();
  } catch (const std::invalid_argument& e) {
    problems.push_back(e.what());
    return exp;
  }
  if (!exp.speed_admissible() && !exp.force)
    problems.push_back(
        "speed (alpha, beta) is inadmissible for this target; pass --force to run anyway");
  return exp;
}

inline int do_mdp(const json& cfg, std::ostream& out, std::ostream& err,
                  std::vector<std::string>& problems) {
  const MdpExperimentConfig exp = parse_mdp_experiment(cfg, problems);
  if (!problems.empty()) return kExitConfig;
  if (!exp.speed_admissible())
    err << "warning: inadmissible speed, running anyway (--force)\n";

  const MdpReport report = run_mdp_experiment(exp);
  const std::string format = get_string(cfg, "format", "csv");
  emit(cfg, format == "json" ? mdp_report_json(report).dump(2) : mdp_report_csv(report), out);
  return kExitOk;
}

/// Semantic validation before the canonical echo: every violation is
/// collected, nothing is executed, no file is written.
inline void validate_verb(const json& cfg, std::vector<std::string>& problems) {
  const std::string verb = get_string(cfg, "verb");
  if (verb == "simulate" || verb == "variance") {
    parse_model(cfg, problems);
    parse_seed(cfg, problems);
    const double n = get_or(cfg, "n", 10.0);
    if (!(n >= 1.0) || n != std::floor(n))
      problems.push_back("field n: must be a positive integer");
    const std::string scheme = get_string(cfg, "scheme", "sync");
    if (scheme != "sync" && scheme != "alt" && scheme != "poisson")
      problems.push_back("field scheme: unknown scheme '" + scheme + "'");
    if (verb == "simulate") {
      const double substeps = get_or(cfg, "substeps", 8.0);
      if (!(substeps >= 1.0) || substeps != std::floor(substeps))
        problems.push_back("field substeps: must be a positive integer");
    }
  } else if (verb == "estimate") {
    const std::string estimator = get_string(cfg, "estimator", "hy");
    const std::string input = get_string(cfg, "input");
    if (input.empty())
      problems.push_back("field input: required (observations CSV)");
    else if (!file_exists(input))
      problems.push_back("input file does not exist: " + input);
    if (estimator == "v")
      problems.push_back(
          "estimator v needs the martingale decomposition, which external data does not "
          "carry; use estimator hy");
    else if (estimator != "hy" && estimator != "cn" && estimator != "bipower")
      problems.push_back("field estimator: expected hy | cn | bipower");
    if (estimator == "hy") {
      const std::string mode = get_string(cfg, "mode", "direct");
      if (mode != "direct" && mode != "reduced" && mode != "dual")
        problems.push_back("field mode: expected direct | reduced | dual");
    }
    if (estimator == "bipower") {
      if (get_or(cfg, "r", 2.0) < 0.0 || get_or(cfg, "q", 0.0) < 0.0)
        problems.push_back("fields r, q: exponents must be >= 0");
      const std::string range = get_string(cfg, "range", "full");
      if (range != "full" && range != "truncated")
        problems.push_back("field range: expected full | truncated");
    }
  } else if (verb == "design") {
    const std::string pathI = get_string(cfg, "gridI");
    const std::string pathJ = get_string(cfg, "gridJ");
    if (pathI.empty() || pathJ.empty())
      problems.push_back("fields gridI, gridJ: both grid files are required");
    if (!pathI.empty() && !file_exists(pathI))
      problems.push_back("gridI file does not exist: " + pathI);
    if (!pathJ.empty() && !file_exists(pathJ))
      problems.push_back("gridJ file does not exist: " + pathJ);
  } else if (verb == "sigma") {
    parse_model(cfg, problems);
    parse_function(get_string(cfg, "g", "abs^1"), problems, "g");
    parse_function(get_string(cfg, "h", "abs^1"), problems, "h");
  } else if (verb == "mdp") {
    parse_mdp_experiment(cfg, problems);
  } else if (verb == "report") {
    const std::string input = get_string(cfg, "input");
    const std::string format = get_string(cfg, "format", "json");
    if (input.empty())
      problems.push_back("field input: required (report CSV)");
    else if (!file_exists(input))
      problems.push_back("input file does not exist: " + input);
    if (format != "json" && format != "csv") problems.push_back("field format: json | csv");
  }
}

inline int do_report(const json& cfg, std::ostream& out, std::vector<std::string>& problems) {
  const std::string input = get_string(cfg, "input");
  const std::string format = get_string(cfg, "format", "json");
  if (input.empty())
    problems.push_back("field input: required (report CSV)");
  else if (!file_exists(input))
    problems.push_back("input file does not exist: " + input);
  if (format != "json" && format != "csv") problems.push_back("field format: json | csv");
  if (!problems.empty()) return kExitConfig;

  std::ifstream in(input);
  std::string line;
  MdpReport report;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;  // header
    std::istringstream row(line);
    std::string tok;
    std::vector<std::string> cols;
    while (std::getline(row, tok, ',')) cols.push_back(tok);
    if (cols.size() != 9)
      throw IoError("line " + std::to_string(line_no) + ": expected 9 columns");
    MdpCell c;
    try {
      c.n = std::stoull(cols[0]);
      c.b_n = std::stod(cols[1]);
      c.delta = std::stod(cols[2]);
      c.count = std::stoull(cols[3]);
      c.replicates = std::stoull(cols[4]);
      c.phat = std::stod(cols[5]);
      c.rescaled = std::stod(cols[6]);
      c.L_theory = std::stod(cols[7]);
      c.lower_bound = cols[8] == "1";
    } catch (const std::exception&) {
      throw IoError("line " + std::to_string(line_no) + ": cannot parse '" + line + "'");
    }
    report.cells.push_back(c);
  }
  emit(cfg, format == "json" ? mdp_report_json(report).dump(2) : mdp_report_csv(report), out);
  return kExitOk;
}

}  // namespace detail

/// Merge file config and flags (flags win), apply the COVOL_SEED override,
/// fill defaults, and reject unknown fields. Problems are collected, not
/// thrown.
inline json parse_config(const std::string& verb, const json& flags,
                         std::vector<std::string>& problems) {
  json cfg = json::object();
  if (flags.contains("config")) {
    const std::string path = flags["config"].get<std::string>();
    if (!detail::file_exists(path)) {
      problems.push_back("config file does not exist: " + path);
    } else {
      std::ifstream in(path);
      try {
        in >> cfg;
      } catch (const json::exception& e) {
        problems.push_back("config file " + path + " is not valid JSON: " + e.what());
        cfg = json::object();
      }
      if (!cfg.is_object()) {
        problems.push_back("config file " + path + " must hold a JSON object");
        cfg = json::object();
      }
    }
  }
  for (const auto& [key, value] : flags.items())
    if (key != "config") cfg[key] = value;

  if (!verb.empty()) {
    if (cfg.contains("verb") && cfg["verb"].is_string() &&
        cfg["verb"].get<std::string>() != verb)
      problems.push_back("config verb '" + cfg["verb"].get<std::string>() +
                         "' conflicts with command '" + verb + "'");
    cfg["verb"] = verb;
  }
  std::string effective_verb;
  if (!cfg.contains("verb") || !cfg["verb"].is_string()) {
    problems.push_back("missing verb");
  } else {
    effective_verb = cfg["verb"].get<std::string>();
    bool known = false;
    for (const auto& k : detail::known_verbs()) known = known || (k == effective_verb);
    if (!known) {
      problems.push_back("unknown verb '" + effective_verb + "'");
      effective_verb.clear();
    }
  }

  if (const char* env = std::getenv("COVOL_SEED")) {
    try {
      cfg["seed"] = static_cast<std::uint64_t>(std::stoull(env));
    } catch (const std::exception&) {
      problems.push_back("COVOL_SEED is not a 64-bit unsigned integer: " + std::string(env));
    }
  }
  if (!cfg.contains("seed")) cfg["seed"] = 12345;
  if (!cfg.contains("T")) cfg["T"] = 1.0;

  if (!effective_verb.empty()) {
    detail::fill_defaults(cfg);
    const auto& allowed = detail::allowed_keys(effective_verb);
    for (const auto& [key, value] : cfg.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        problems.push_back("field " + key + ": not a " + effective_verb + " field");
    }
  }
  return cfg;
}

/// Entry point shared by the binary and the tests.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty() || args[0] == "--help" || args[0] == "-h") {
    err << "usage: covol <simulate|estimate|design|variance|sigma|mdp|report> [--flag value]...\n"
           "       covol --config cfg.json   (verb read from the file)\n";
    return args.empty() ? kExitConfig : kExitOk;
  }

  std::vector<std::string> problems;
  std::string verb;
  std::size_t flag_start = 0;
  if (args[0].rfind("--", 0) != 0) {
    verb = args[0];
    flag_start = 1;
  }
  const json flags = detail::flags_to_json(args, flag_start, problems);
  const json cfg = parse_config(verb, flags, problems);
  if (problems.empty()) detail::validate_verb(cfg, problems);

  if (problems.empty()) {
    out << cfg.dump() << '\n';  // canonical echo of the effective configuration
    const std::string v = cfg["verb"].get<std::string>();
    try {
      int rc = kExitConfig;
      if (v == "simulate") rc = detail::do_simulate(cfg, out, problems);
      else if (v == "estimate") rc = detail::do_estimate(cfg, out, problems);
      else if (v == "design") rc = detail::do_design(cfg, out, problems);
      else if (v == "variance") rc = detail::do_variance(cfg, out, problems);
      else if (v == "sigma") rc = detail::do_sigma(cfg, out, problems);
      else if (v == "mdp") rc = detail::do_mdp(cfg, out, err, problems);
      else if (v == "report") rc = detail::do_report(cfg, out, problems);
      if (rc != kExitConfig) return rc;
    } catch (const IoError& e) {
      err << "io error: " << e.what() << '\n';
      return kExitIo;
    } catch (const NumericalError& e) {
      err << "numerical error: " << e.what() << '\n';
      return kExitNumerical;
    } catch (const std::invalid_argument& e) {
      problems.push_back(e.what());
    }
  }
  for (const std::string& p : problems) err << "config error: " << p << '\n';
  return kExitConfig;
}

}  // namespace covol::cli
