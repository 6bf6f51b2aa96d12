// Copyright 2026 The lda-particles Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lda/asymptotics.hpp"
#include "lda/compound_mc.hpp"
#include "lda/errors.hpp"
#include "lda/panjer_oracle.hpp"
#include "lda/particle_panjer.hpp"
#include "lda/rare_event_smc.hpp"
#include "lda/report.hpp"

namespace lda {

struct McSpec {
  std::size_t T = 1000000;
  double ci_level = 0.95;
};

struct SlaSpec {
  int order = 1;
};

struct PanjerSpec {
  double step = 0.1;
  /// Unset: 30 times the mean annual loss.
  std::optional<double> x_max;
};

struct ParticleSpec {
  double grid_step = 1.0;
  double x_max = 120.0;
  std::size_t n = 50000;
  std::optional<double> absorption;
  double ci_level = 0.95;
};

struct RareEventSpec {
  std::vector<double> thresholds;
  std::size_t n = 2000;
  int mh_steps = 5;
  std::size_t replicates = 10;
  ResamplingScheme resampling = ResamplingScheme::Multinomial;
  double rho = 0.8;
};

struct SpectrumSpec {
  /// exponential: k e^{-k(1-u)} / (1 - e^{-k}); flat: 1; tail: 1[u > alpha]/(1 - alpha).
  std::string type = "exponential";
  double k = 20.0;
  double alpha = 0.99;

  [[nodiscard]] SpectrumFn fn() const {
    if (type == "flat") {
      return [](double) { return 1.0; };
    }
    if (type == "tail") {
      const double a = alpha;
      return [a](double u) { return u > a ? 1.0 / (1.0 - a) : 0.0; };
    }
    const double kk = k;
    return [kk](double u) { return kk * std::exp(-kk * (1.0 - u)) / -std::expm1(-kk); };
  }

  [[nodiscard]] std::string describe() const {
    if (type == "flat") {
      return "flat";
    }
    if (type == "tail") {
      return "tail(alpha=" + format6(alpha) + ")";
    }
    return "exponential(k=" + format6(k) + ")";
  }
};

inline const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names = {"mc", "sla", "panjer", "particle", "rare-event"};
  return names;
}

struct ExperimentConfig {
  CompoundModel model{FrequencyModel{Poisson{2.0}}, SeverityModel{LogNormal{2.0, 0.5}}};
  std::vector<std::string> methods = {"mc"};
  std::vector<double> levels = {0.5, 0.8, 0.9, 0.95, 0.99, 0.999, 0.9995};
  std::uint64_t seed = 1;
  int threads = 1;
  bool deterministic_reduction = false;
  ReportFormat format = ReportFormat::Csv;
  bool timing = false;
  McSpec mc;
  SlaSpec sla;
  PanjerSpec panjer;
  ParticleSpec particle;
  RareEventSpec rare_event;
  SpectrumSpec spectrum;

  [[nodiscard]] ExecutionPolicy policy() const { return {threads, deterministic_reduction}; }
};

namespace detail {

using Json = nlohmann::json;

[[noreturn]] inline void config_fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

inline void check_keys(const Json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) {
    config_fail(path, "expected an object");
  }
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) {
      config_fail(path + "." + k, "unknown field");
    }
  }
}

inline double get_number(const Json& j, const std::string& path) {
  if (!j.is_number()) {
    config_fail(path, "expected a number");
  }
  const double v = j.get<double>();
  if (!std::isfinite(v)) {
    config_fail(path, "must be finite");
  }
  return v;
}

inline double get_positive(const Json& j, const std::string& path) {
  const double v = get_number(j, path);
  if (!(v > 0.0)) {
    config_fail(path, "must be positive");
  }
  return v;
}

inline std::uint64_t get_count(const Json& j, const std::string& path, std::uint64_t min_value) {
  if (!j.is_number_integer() && !(j.is_number() && std::floor(j.get<double>()) == j.get<double>())) {
    config_fail(path, "expected an integer");
  }
  const double v = j.get<double>();
  if (v < static_cast<double>(min_value) || v > 9.0e15) {
    config_fail(path, "must be an integer >= " + std::to_string(min_value));
  }
  return static_cast<std::uint64_t>(v);
}

inline std::string get_string(const Json& j, const std::string& path) {
  if (!j.is_string()) {
    config_fail(path, "expected a string");
  }
  return j.get<std::string>();
}

inline bool get_bool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) {
    config_fail(path, "expected true or false");
  }
  return j.get<bool>();
}

inline const Json& require(const Json& j, const std::string& path, const std::string& key) {
  if (!j.contains(key)) {
    config_fail(path + "." + key, "required field is missing");
  }
  return j.at(key);
}

inline FrequencyModel parse_frequency(const Json& j, const std::string& path) {
  const auto kind = get_string(require(j, path, "kind"), path + ".kind");
  try {
    if (kind == "poisson") {
      check_keys(j, path, {"kind", "lambda"});
      const double rate = get_number(require(j, path, "lambda"), path + ".lambda");
      if (rate < 0.0) {
        config_fail(path + ".lambda", "must be non-negative");
      }
      return FrequencyModel{Poisson{rate}};
    }
    if (kind == "binomial") {
      check_keys(j, path, {"kind", "trials", "q"});
      return FrequencyModel{Binomial{static_cast<int>(get_count(require(j, path, "trials"), path + ".trials", 1)),
                      get_number(require(j, path, "q"), path + ".q")}};
    }
    if (kind == "negative_binomial") {
      check_keys(j, path, {"kind", "r", "beta"});
      return FrequencyModel{NegativeBinomial{get_positive(require(j, path, "r"), path + ".r"),
                              get_positive(require(j, path, "beta"), path + ".beta")}};
    }
    if (kind == "generalized_poisson") {
      check_keys(j, path, {"kind", "lambda", "theta"});
      return FrequencyModel{GeneralizedPoisson{get_positive(require(j, path, "lambda"), path + ".lambda"),
                                get_number(require(j, path, "theta"), path + ".theta")}};
    }
  } catch (const DomainError& e) {
    config_fail(path, e.what());
  }
  config_fail(path + ".kind", "unknown frequency '" + kind +
                                  "' (poisson, binomial, negative_binomial, generalized_poisson)");
}

inline SeverityModel parse_severity(const Json& j, const std::string& path) {
  const auto kind = get_string(require(j, path, "kind"), path + ".kind");
  try {
    if (kind == "lognormal") {
      check_keys(j, path, {"kind", "mu", "sigma"});
      return SeverityModel{LogNormal{get_number(require(j, path, "mu"), path + ".mu"),
                       get_positive(require(j, path, "sigma"), path + ".sigma")}};
    }
    if (kind == "pareto") {
      check_keys(j, path, {"kind", "tail_index", "scale"});
      return SeverityModel{Pareto{get_positive(require(j, path, "tail_index"), path + ".tail_index"),
                    get_positive(require(j, path, "scale"), path + ".scale")}};
    }
    if (kind == "degenerate") {
      check_keys(j, path, {"kind", "atom"});
      return SeverityModel{Degenerate{get_positive(require(j, path, "atom"), path + ".atom")}};
    }
  } catch (const DomainError& e) {
    config_fail(path, e.what());
  }
  config_fail(path + ".kind", "unknown severity '" + kind + "' (lognormal, pareto, degenerate)");
}

inline std::vector<double> parse_increasing(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) {
    config_fail(path, "expected a non-empty array of numbers");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
    if (i > 0 && !(out[i] > out[i - 1])) {
      config_fail(path + "[" + std::to_string(i) + "]", "values must be strictly increasing");
    }
  }
  return out;
}

}  // namespace detail

/// Validates a JSON config document; every failure names the offending field.
inline ExperimentConfig parse_config(const nlohmann::json& j) {
  using detail::check_keys;
  using detail::config_fail;
  using detail::get_count;
  using detail::get_number;
  using detail::get_positive;
  using detail::require;
  ExperimentConfig c;
  check_keys(j, "config",
             {"model", "methods", "levels", "seed", "threads", "deterministic_reduction", "output", "mc", "sla",
              "panjer", "particle", "rare_event", "spectrum"});
  const auto& m = require(j, "config", "model");
  check_keys(m, "config.model", {"frequency", "severity"});
  c.model = CompoundModel{detail::parse_frequency(require(m, "config.model", "frequency"), "config.model.frequency"),
                          detail::parse_severity(require(m, "config.model", "severity"), "config.model.severity")};
  if (j.contains("methods")) {
    const auto& ms = j["methods"];
    if (!ms.is_array() || ms.empty()) {
      config_fail("config.methods", "expected a non-empty array of method names");
    }
    c.methods.clear();
    for (std::size_t i = 0; i < ms.size(); ++i) {
      const auto name = detail::get_string(ms[i], "config.methods[" + std::to_string(i) + "]");
      const auto& known = method_names();
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        config_fail("config.methods[" + std::to_string(i) + "]",
                    "unknown method '" + name + "' (mc, sla, panjer, particle, rare-event)");
      }
      c.methods.push_back(name);
    }
  }
  if (j.contains("levels")) {
    c.levels = detail::parse_increasing(j["levels"], "config.levels");
    for (std::size_t i = 0; i < c.levels.size(); ++i) {
      if (!(c.levels[i] > 0.0 && c.levels[i] < 1.0)) {
        config_fail("config.levels[" + std::to_string(i) + "]", "must lie in (0,1)");
      }
    }
  }
  if (j.contains("seed")) {
    c.seed = get_count(j["seed"], "config.seed", 0);
  }
  if (j.contains("threads")) {
    c.threads = static_cast<int>(get_count(j["threads"], "config.threads", 1));
  }
  if (j.contains("deterministic_reduction")) {
    c.deterministic_reduction = detail::get_bool(j["deterministic_reduction"], "config.deterministic_reduction");
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    check_keys(o, "config.output", {"format", "timing"});
    if (o.contains("format")) {
      const auto f = detail::get_string(o["format"], "config.output.format");
      if (f == "csv") {
        c.format = ReportFormat::Csv;
      } else if (f == "json") {
        c.format = ReportFormat::Json;
      } else {
        config_fail("config.output.format", "must be \"csv\" or \"json\"");
      }
    }
    if (o.contains("timing")) {
      c.timing = detail::get_bool(o["timing"], "config.output.timing");
    }
  }
  if (j.contains("mc")) {
    const auto& b = j["mc"];
    check_keys(b, "config.mc", {"T", "ci_level"});
    if (b.contains("T")) {
      c.mc.T = get_count(b["T"], "config.mc.T", 1);
    }
    if (b.contains("ci_level")) {
      c.mc.ci_level = get_number(b["ci_level"], "config.mc.ci_level");
      if (!(c.mc.ci_level > 0.0 && c.mc.ci_level < 1.0)) {
        config_fail("config.mc.ci_level", "must lie in (0,1)");
      }
    }
  }
  if (j.contains("sla")) {
    const auto& b = j["sla"];
    check_keys(b, "config.sla", {"order"});
    if (b.contains("order")) {
      c.sla.order = static_cast<int>(get_count(b["order"], "config.sla.order", 1));
      if (c.sla.order > 2) {
        config_fail("config.sla.order", "must be 1 or 2");
      }
    }
  }
  if (j.contains("panjer")) {
    const auto& b = j["panjer"];
    check_keys(b, "config.panjer", {"step", "x_max"});
    if (b.contains("step")) {
      c.panjer.step = get_positive(b["step"], "config.panjer.step");
    }
    if (b.contains("x_max")) {
      c.panjer.x_max = get_positive(b["x_max"], "config.panjer.x_max");
    }
  }
  if (j.contains("particle")) {
    const auto& b = j["particle"];
    check_keys(b, "config.particle", {"grid_step", "x_max", "N", "absorption", "ci_level"});
    if (b.contains("grid_step")) {
      c.particle.grid_step = get_positive(b["grid_step"], "config.particle.grid_step");
    }
    if (b.contains("x_max")) {
      c.particle.x_max = get_positive(b["x_max"], "config.particle.x_max");
    }
    if (b.contains("N")) {
      c.particle.n = get_count(b["N"], "config.particle.N", 2);
    }
    if (b.contains("absorption")) {
      const double pd = get_number(b["absorption"], "config.particle.absorption");
      if (!(pd > 0.0 && pd <= 1.0)) {
        config_fail("config.particle.absorption", "must lie in (0,1]");
      }
      c.particle.absorption = pd;
    }
    if (b.contains("ci_level")) {
      c.particle.ci_level = get_number(b["ci_level"], "config.particle.ci_level");
      if (!(c.particle.ci_level > 0.0 && c.particle.ci_level < 1.0)) {
        config_fail("config.particle.ci_level", "must lie in (0,1)");
      }
    }
    if (c.particle.x_max < c.particle.grid_step) {
      config_fail("config.particle.x_max", "must be at least grid_step");
    }
  }
  if (j.contains("rare_event")) {
    const auto& b = j["rare_event"];
    check_keys(b, "config.rare_event", {"thresholds", "N", "mh_steps", "replicates", "resampling", "rho"});
    c.rare_event.thresholds = detail::parse_increasing(require(b, "config.rare_event", "thresholds"),
                                                       "config.rare_event.thresholds");
    if (b.contains("N")) {
      c.rare_event.n = get_count(b["N"], "config.rare_event.N", 2);
    }
    if (b.contains("mh_steps")) {
      c.rare_event.mh_steps = static_cast<int>(get_count(b["mh_steps"], "config.rare_event.mh_steps", 0));
    }
    if (b.contains("replicates")) {
      c.rare_event.replicates = get_count(b["replicates"], "config.rare_event.replicates", 2);
    }
    if (b.contains("resampling")) {
      const auto r = detail::get_string(b["resampling"], "config.rare_event.resampling");
      if (r == "multinomial") {
        c.rare_event.resampling = ResamplingScheme::Multinomial;
      } else if (r == "systematic") {
        c.rare_event.resampling = ResamplingScheme::Systematic;
      } else {
        config_fail("config.rare_event.resampling", "must be \"multinomial\" or \"systematic\"");
      }
    }
    if (b.contains("rho")) {
      c.rare_event.rho = get_number(b["rho"], "config.rare_event.rho");
      if (!(c.rare_event.rho >= 0.0 && c.rare_event.rho < 1.0)) {
        config_fail("config.rare_event.rho", "must lie in [0,1)");
      }
    }
  }
  if (j.contains("spectrum")) {
    const auto& b = j["spectrum"];
    check_keys(b, "config.spectrum", {"type", "k", "alpha"});
    c.spectrum.type = detail::get_string(require(b, "config.spectrum", "type"), "config.spectrum.type");
    if (c.spectrum.type != "exponential" && c.spectrum.type != "flat" && c.spectrum.type != "tail") {
      config_fail("config.spectrum.type", "must be \"exponential\", \"flat\" or \"tail\"");
    }
    if (b.contains("k")) {
      c.spectrum.k = get_positive(b["k"], "config.spectrum.k");
    }
    if (b.contains("alpha")) {
      c.spectrum.alpha = get_number(b["alpha"], "config.spectrum.alpha");
      if (!(c.spectrum.alpha > 0.0 && c.spectrum.alpha < 1.0)) {
        config_fail("config.spectrum.alpha", "must lie in (0,1)");
      }
    }
  }
  if (std::find(c.methods.begin(), c.methods.end(), "rare-event") != c.methods.end() &&
      c.rare_event.thresholds.empty()) {
    config_fail("config.rare_event.thresholds", "required when method rare-event is selected");
  }
  return c;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

namespace detail {

// Fixed substream tags so a method's numbers do not depend on which other
// methods run alongside it.
inline constexpr std::uint64_t kMcTag = 1;
inline constexpr std::uint64_t kParticleTag = 2;
inline constexpr std::uint64_t kRareEventTag = 3;

inline std::string with_context(const std::string& method, const std::exception& e) {
  return "method " + method + ": " + e.what();
}

inline void run_mc(const ExperimentConfig& c, RiskReport& r) {
  const auto batch = simulate_compound(c.model, c.mc.T, derive_seed(c.seed, {kMcTag}), c.policy());
  const SortedSample s(batch.values);
  const auto phi = c.spectrum.fn();
  const double srm = s.spectral(phi);
  const double z = normal_quantile(0.5 * (1.0 + c.mc.ci_level));
  for (double a : c.levels) {
    const auto q = s.quantile_ci(a, c.mc.ci_level);
    r.rows.push_back({a, "mc", q.point, q.lower, q.upper, s.tail_mean(a), srm, (q.upper - q.lower) / (2.0 * z)});
  }
}

inline void run_sla(const ExperimentConfig& c, RiskReport& r) {
  const auto phi = c.spectrum.fn();
  const bool regular = c.model.severity.tail_index().has_value() && *c.model.severity.tail_index() > 1.0;
  for (double a : c.levels) {
    ReportRow row;
    row.alpha = a;
    row.method = "sla";
    if (c.sla.order == 2) {
      row.var = sla_var_second_order(c.model, a).var_second;
    } else {
      row.var = sla_var_first_order(c.model, a);
    }
    if (regular) {
      const auto es = sla_es_srm(c.model, a, phi);
      row.es = es.es;
      row.srm = es.srm;
    }
    r.rows.push_back(row);
  }
}

inline void run_panjer(const ExperimentConfig& c, RiskReport& r) {
  const double x_max = c.panjer.x_max.value_or(30.0 * c.model.mean());
  if (!std::isfinite(x_max)) {
    throw ConfigError("config.panjer.x_max: required when the mean loss is infinite");
  }
  const auto M = static_cast<std::size_t>(std::ceil(x_max / c.panjer.step));
  const auto pmf = panjer_oracle(c.model, c.panjer.step, M);
  const auto cdf = pmf.cdf();
  const auto phi = c.spectrum.fn();
  const double total = cdf.back();
  double srm = 0.0;
  for (std::size_t k = 0; k < pmf.masses.size(); ++k) {
    srm += static_cast<double>(k) * pmf.step * phi(std::min(1.0, cdf[k] / total)) * pmf.masses[k] / total;
  }
  for (double a : c.levels) {
    const double q = compound_cdf_quantile(pmf, a).quantile;
    double tw = 0.0;
    double txw = 0.0;
    for (auto k = static_cast<std::size_t>(std::llround(q / pmf.step)); k < pmf.masses.size(); ++k) {
      tw += pmf.masses[k];
      txw += static_cast<double>(k) * pmf.step * pmf.masses[k];
    }
    r.rows.push_back({a, "panjer", q, std::nullopt, std::nullopt, txw / tw, srm, std::nullopt});
  }
}

inline void run_particle(const ExperimentConfig& c, RiskReport& r) {
  PathSamplerConfig pc;
  pc.absorption = c.particle.absorption;
  const auto grid = linear_grid(c.particle.grid_step, c.particle.x_max);
  const auto m =
      estimate_density_measure(c.model, grid, c.particle.n, pc, derive_seed(c.seed, {kParticleTag}), c.policy());
  const auto phi = c.spectrum.fn();
  const double z = normal_quantile(0.5 * (1.0 + c.particle.ci_level));
  std::string short_rows;
  for (double a : c.levels) {
    ReportRow row;
    row.alpha = a;
    row.method = "particle";
    try {
      const auto q = quantile_ci_from_measure(m, a, z);
      const auto rm = risk_measures_from_measure(m, a, phi);
      row.var = q.point;
      row.var_lo = q.lower;
      row.var_hi = q.upper;
      row.es = rm.es;
      row.srm = rm.srm;
      row.std_error = q.std_error;
    } catch (const TruncationError&) {
      short_rows += (short_rows.empty() ? "" : " ") + format6(a);
    }
    r.rows.push_back(row);
  }
  r.set_meta("particle_total_mass", format6(m.total_mass()));
  if (!short_rows.empty()) {
    r.set_meta("particle_unreached_levels", short_rows);
  }
}

inline void run_rare_event(const ExperimentConfig& c, RiskReport& r) {
  const CompoundLatentModel model(c.model, c.rare_event.rho);
  SmcConfig sc;
  sc.levels = c.rare_event.thresholds;
  sc.particles = c.rare_event.n;
  sc.mh_steps = c.rare_event.mh_steps;
  sc.resampling = c.rare_event.resampling;
  const std::size_t L = sc.levels.size();
  const std::size_t R = c.rare_event.replicates;
  // Running products give P(Z > z_k) for every threshold from one run.
  std::vector<std::vector<double>> p(L, std::vector<double>(R, 0.0));
  const std::uint64_t base = derive_seed(c.seed, {kRareEventTag});
  for (std::size_t rep = 0; rep < R; ++rep) {
    const auto est = smc_rare_event(model, sc, derive_seed(base, {rep}), c.policy());
    double prod = 1.0;
    for (std::size_t k = 0; k < est.fractions.size(); ++k) {
      prod *= est.fractions[k];
      p[k][rep] = prod;
    }
  }
  for (std::size_t k = 0; k < L; ++k) {
    const auto s = summarize_replicates(p[k]);
    r.rows.push_back(
        {1.0 - s.mean, "rare-event", sc.levels[k], std::nullopt, std::nullopt, std::nullopt, std::nullopt, s.std_error});
  }
}

}  // namespace detail

/// Runs the configured methods in order; rows follow the method order and,
/// within a method, increasing alpha.
inline RiskReport run_experiment(const ExperimentConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  RiskReport r;
  r.set_meta("model", c.model.describe());
  r.set_meta("model_hash", c.model.hash());
  r.set_meta("seed", std::to_string(c.seed));
  std::string methods;
  for (const auto& m : c.methods) {
    methods += (methods.empty() ? "" : ",") + m;
  }
  r.set_meta("methods", methods);
  r.set_meta("spectrum", c.spectrum.describe());
  r.set_meta("version", kVersion);
  for (const auto& m : c.methods) {
    try {
      if (m == "mc") {
        detail::run_mc(c, r);
      } else if (m == "sla") {
        detail::run_sla(c, r);
      } else if (m == "panjer") {
        detail::run_panjer(c, r);
      } else if (m == "particle") {
        detail::run_particle(c, r);
      } else if (m == "rare-event") {
        detail::run_rare_event(c, r);
      } else {
        throw ConfigError("config.methods: unknown method '" + m + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const NumericError& e) {
      throw NumericError(detail::with_context(m, e), e.achieved_tolerance());
    } catch (const ExtinctionError& e) {
      throw ExtinctionError(detail::with_context(m, e), e.level());
    } catch (const Error& e) {
      throw Error(e.kind(), detail::with_context(m, e));
    }
  }
  if (c.timing) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.set_meta("runtime_seconds", format6(secs));
  }
  return r;
}

enum class Table1Preset { Sigma05, Sigma1 };

inline Table1Preset parse_preset(const std::string& s) {
  if (s == "sigma05") {
    return Table1Preset::Sigma05;
  }
  if (s == "sigma1") {
    return Table1Preset::Sigma1;
  }
  throw ConfigError("preset: must be \"sigma05\" or \"sigma1\"");
}

/// Poisson(2)-LogNormal(2, sigma) at the full budgets (5e7 annual losses;
/// 5e4 paths per point on a unit grid) times `scale`.
inline ExperimentConfig table1_config(Table1Preset preset, double scale, std::uint64_t seed = 1) {
  if (!(scale > 0.0 && scale <= 1.0)) {
    throw ConfigError("scale: must lie in (0,1]");
  }
  ExperimentConfig c;
  const double sigma = preset == Table1Preset::Sigma05 ? 0.5 : 1.0;
  c.model = CompoundModel{FrequencyModel{Poisson{2.0}}, SeverityModel{LogNormal{2.0, sigma}}};
  c.methods = {"mc", "particle", "sla"};
  c.levels = {0.5, 0.8, 0.9, 0.95, 0.99, 0.999, 0.9995};
  c.seed = seed;
  c.mc.T = std::max<std::size_t>(1000, static_cast<std::size_t>(std::llround(5.0e7 * scale)));
  c.particle.grid_step = 1.0;
  c.particle.x_max = preset == Table1Preset::Sigma05 ? 120.0 : 400.0;
  c.particle.n = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(5.0e4 * scale)));
  return c;
}

inline RiskReport reproduce_table1(Table1Preset preset, double scale, std::uint64_t seed = 1,
                                   const ExecutionPolicy& policy = {1, false}) {
  auto c = table1_config(preset, scale, seed);
  c.threads = policy.threads;
  c.deterministic_reduction = policy.deterministic_reduction;
  auto r = run_experiment(c);
  r.set_meta("preset", preset == Table1Preset::Sigma05 ? "sigma05" : "sigma1");
  r.set_meta("scale", format6(scale));
  return r;
}

}  // namespace lda
