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

// Command-line front end: one subcommand per method plus the three-method comparison driver.
// Reports go to stdout; failures go to stderr as a one-line JSON object.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "lda/experiment.hpp"

namespace {

int fail(const std::string& kind, const std::string& message, int code) {
  nlohmann::ordered_json j;
  j["error"]["kind"] = kind;
  j["error"]["message"] = message;
  std::cerr << j.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compound loss risk measures: Monte Carlo, asymptotics, Panjer, particle and rare-event solvers"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> threads;
  bool deterministic = false;
  app.add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Override the config seed");
  app.add_option("--out", out, "Report format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--deterministic-reduction", deterministic,
               "Fixed chunking so results do not depend on --threads");

  const std::pair<const char*, const char*> methods[] = {
      {"simulate", "mc"}, {"sla", "sla"}, {"panjer", "panjer"}, {"particle", "particle"}, {"rare-event", "rare-event"}};
  for (const auto& [cmd, method] : methods) {
    app.add_subcommand(cmd, std::string("Run the ") + method + " method")->fallthrough();
  }
  auto* table1 = app.add_subcommand("table1", "Three-method comparison for Poisson(2)-LogNormal(2, sigma)");
  table1->fallthrough();
  std::string preset = "sigma05";
  double scale = 0.01;
  table1->add_option("--preset", preset, "sigma05 or sigma1")->check(CLI::IsMember({"sigma05", "sigma1"}));
  table1->add_option("--scale", scale, "Fraction of the full budgets, in (0,1]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    lda::ExperimentConfig cfg;
    if (!config_path.empty()) {
      cfg = lda::load_config(config_path);
    }
    std::string label;
    if (table1->parsed()) {
      const auto base = cfg;
      cfg = lda::table1_config(lda::parse_preset(preset), scale, base.seed);
      cfg.threads = base.threads;
      cfg.deterministic_reduction = base.deterministic_reduction;
      cfg.format = base.format;
      cfg.timing = base.timing;
    } else {
      for (const auto& [cmd, method] : methods) {
        if (app.got_subcommand(cmd)) {
          cfg.methods = {method};
        }
      }
      if (cfg.methods.front() == "rare-event" && cfg.rare_event.thresholds.empty()) {
        throw lda::ConfigError("config.rare_event.thresholds: required for rare-event");
      }
    }
    if (seed) {
      cfg.seed = *seed;
    }
    if (threads) {
      cfg.threads = *threads;
    }
    if (deterministic) {
      cfg.deterministic_reduction = true;
    }
    if (!out.empty()) {
      cfg.format = out == "json" ? lda::ReportFormat::Json : lda::ReportFormat::Csv;
    }
    auto report = lda::run_experiment(cfg);
    if (table1->parsed()) {
      report.set_meta("preset", preset);
      report.set_meta("scale", lda::format6(scale));
    }
    std::cout << lda::render_report(report, cfg.format);
    return 0;
  } catch (const lda::Error& e) {
    return fail(std::string(lda::to_string(e.kind())), e.what(), 1);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
}
