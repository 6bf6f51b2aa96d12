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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "lda/experiment.hpp"

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_path(const std::string& name) { return fs::temp_directory_path() / ("lda_cli_test_" + name); }

std::string cli() {
  const char* p = std::getenv("LDA_CLI");
  return p ? p : "";
}

std::string config(const std::string& name) {
  const char* p = std::getenv("LDA_CONFIGS");
  return (fs::path(p ? p : "configs") / name).string();
}

RunResult run_cli(const std::string& args) {
  const auto err_path = temp_path("stderr.txt");
  const std::string cmd = "'" + cli() + "' " + args + " 2>'" + err_path.string() + "'";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) {
    return r;
  }
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) {
    r.out.append(buf, got);
  }
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = read_file(err_path);
  fs::remove(err_path);
  return r;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto p = temp_path(name);
  std::ofstream(p, std::ios::binary) << text;
  return p.string();
}

const lda::ReportRow& row_at(const lda::RiskReport& r, const std::string& method, double alpha) {
  for (const auto& row : r.rows) {
    if (row.method == method && std::abs(row.alpha - alpha) < 1e-12) {
      return row;
    }
  }
  throw std::runtime_error("no row " + method + " at " + std::to_string(alpha));
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    if (cli().empty()) {
      GTEST_SKIP() << "LDA_CLI not set";
    }
  }
};

}  // namespace

TEST(Config, DocumentedModelFragmentParses) {
  const auto c = lda::parse_config_text(
      R"({"model":{"frequency":{"kind":"poisson","lambda":2.0},"severity":{"kind":"lognormal","mu":2.0,"sigma":0.5}}})");
  EXPECT_DOUBLE_EQ(c.model.mean(), 2.0 * std::exp(2.0 + 0.125));
  EXPECT_EQ(c.methods, std::vector<std::string>{"mc"});
}

TEST(Config, FieldLevelErrors) {
  const std::string model =
      R"("model":{"frequency":{"kind":"poisson","lambda":2},"severity":{"kind":"lognormal","mu":2,"sigma":1}})";
  const auto message = [](const std::string& text) {
    try {
      lda::parse_config_text(text);
    } catch (const lda::ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message(R"({"model":{"frequency":{"kind":"poisson","lambda":2},"severity":{"kind":"lognormal","mu":2,"sigma":-1}}})")
                .find("config.model.severity.sigma"),
            std::string::npos);
  EXPECT_NE(message("{" + model + R"(,"seeed":3})").find("seeed"), std::string::npos);
  EXPECT_NE(message("{" + model + R"(,"levels":[0.9,0.5]})").find("config.levels[1]"), std::string::npos);
  EXPECT_NE(message("{" + model + R"(,"methods":["mcmc"]})").find("config.methods[0]"), std::string::npos);
  EXPECT_NE(message(R"({"model":{"frequency":{"kind":"poisson"}}})").find("config.model.frequency.lambda"),
            std::string::npos);
  EXPECT_NE(message("{}").find("config.model"), std::string::npos);
  EXPECT_NE(message("{not json").find("config"), std::string::npos);
}

TEST(Experiment, SlaSigmaOneAtNinetyNine) {
  auto c = lda::load_config(config("sla_sigma1.json"));
  const auto r = lda::run_experiment(c);
  EXPECT_EQ(std::floor(*row_at(r, "sla", 0.99).var), 97.0);
}

TEST(Experiment, ZeroFrequencyGivesZeroQuantiles) {
  lda::ExperimentConfig c;
  c.model = lda::CompoundModel{lda::FrequencyModel{lda::Poisson{0.0}}, lda::SeverityModel{lda::LogNormal{2.0, 0.5}}};
  c.mc.T = 10;
  const auto r = lda::run_experiment(c);
  ASSERT_EQ(r.rows.size(), c.levels.size());
  for (const auto& row : r.rows) {
    EXPECT_EQ(*row.var, 0.0);
  }
}

TEST(Experiment, Table1SlaColumnSigmaHalf) {
  auto c = lda::table1_config(lda::Table1Preset::Sigma05, 1.0);
  c.methods = {"sla"};
  const auto r = lda::run_experiment(c);
  EXPECT_EQ(std::floor(*row_at(r, "sla", 0.99).var), 26.0);
  EXPECT_EQ(std::floor(*row_at(r, "sla", 0.999).var), 38.0);
  EXPECT_EQ(std::floor(*row_at(r, "sla", 0.9995).var), 42.0);
}

TEST(Experiment, Table1McSigmaOneAtNinetyFive) {
  auto c = lda::table1_config(lda::Table1Preset::Sigma1, 0.1);
  c.methods = {"mc"};
  const auto r = lda::run_experiment(c);
  EXPECT_NEAR(*row_at(r, "mc", 0.95).var, 77.0, 2.0);
}

TEST(Experiment, SmokeScaleReportIsWellFormed) {
  const auto r = lda::reproduce_table1(lda::Table1Preset::Sigma05, 1e-4);
  EXPECT_EQ(r.rows.size(), 21U);
  EXPECT_TRUE(lda::report_violations(r).empty());
  for (const auto& row : r.rows) {
    EXPECT_FALSE(row.method.empty());
    if (row.method == "sla") {
      EXPECT_FALSE(row.std_error.has_value());
    } else if (row.var) {
      EXPECT_TRUE(row.std_error.has_value());
    }
  }
  EXPECT_EQ(r.get_meta("preset"), "sigma05");
  EXPECT_FALSE(r.get_meta("runtime_seconds").has_value());
  EXPECT_THROW(lda::reproduce_table1(lda::Table1Preset::Sigma05, 0.0), lda::ConfigError);
  EXPECT_THROW(lda::reproduce_table1(lda::Table1Preset::Sigma05, 1.5), lda::ConfigError);
}

TEST(Experiment, ErrorsCarryMethodContext) {
  lda::ExperimentConfig c;
  c.methods = {"panjer"};
  // The lattice ends far below the 0.5 quantile.
  c.panjer.x_max = 5.0;
  try {
    lda::run_experiment(c);
    FAIL() << "short lattice accepted";
  } catch (const lda::Error& e) {
    EXPECT_EQ(std::string(e.what()).rfind("method panjer: ", 0), 0U) << e.what();
  }
}

TEST(Report, ViolationsFlagDecreasingVar) {
  lda::RiskReport r;
  r.rows.push_back({0.5, "mc", 10.0, {}, {}, {}, {}, 1.0});
  r.rows.push_back({0.9, "mc", 9.0, {}, {}, {}, {}, 1.0});
  r.rows.push_back({0.5, "sla", 1.0, {}, {}, {}, {}, {}});
  EXPECT_EQ(lda::report_violations(r).size(), 1U);
}

TEST(Report, CsvAndJsonContracts) {
  lda::RiskReport r;
  r.set_meta("model", "x");
  r.rows.push_back({0.99, "mc", 57.123456789, 55.0, 60.0, 65.7, 47.5, 0.31});
  r.rows.push_back({0.99, "sla", 26.7869, {}, {}, {}, {}, {}});
  const auto csv = lda::report_to_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "alpha,method,var,var_lo,var_hi,es,srm,stderr");
  EXPECT_NE(csv.find("0.99,mc,57.1235,55,60,65.7,47.5,0.31\n"), std::string::npos);
  EXPECT_NE(csv.find("0.99,sla,26.7869,n/a,n/a,n/a,n/a,n/a\n"), std::string::npos);
  const auto j = nlohmann::ordered_json::parse(lda::report_to_json(r));
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) {
    keys.push_back(k);
  }
  EXPECT_EQ(keys, (std::vector<std::string>{"meta", "rows"}));
  EXPECT_EQ(j["rows"][1]["stderr"], "n/a");
}

TEST(Report, EmitThenParseRoundTrips) {
  auto r = lda::reproduce_table1(lda::Table1Preset::Sigma05, 1e-4);
  // The formats carry six significant digits.
  for (auto& row : r.rows) {
    row.alpha = lda::round6(row.alpha);
    for (auto* f : {&row.var, &row.var_lo, &row.var_hi, &row.es, &row.srm, &row.std_error}) {
      if (*f) {
        *f = lda::round6(**f);
      }
    }
  }
  const auto csv_path = temp_path("report.csv").string();
  const auto json_path = temp_path("report.json").string();
  lda::emit_report(r, lda::ReportFormat::Csv, csv_path);
  lda::emit_report(r, lda::ReportFormat::Json, json_path);
  const auto from_csv = lda::report_from_csv(read_file(csv_path));
  EXPECT_EQ(from_csv.rows, r.rows);
  const auto from_json = lda::report_from_json(read_file(json_path));
  EXPECT_EQ(from_json, r);
  // A second trip is byte-stable.
  EXPECT_EQ(lda::report_to_csv(from_csv), read_file(csv_path));
  EXPECT_EQ(lda::report_to_json(from_json), read_file(json_path));
  fs::remove(csv_path);
  fs::remove(json_path);
  EXPECT_THROW(lda::emit_report(r, lda::ReportFormat::Csv, "/nonexistent-dir/x.csv"), lda::IoError);
  EXPECT_THROW(lda::report_from_csv("alpha,method\n"), lda::IoError);
}

TEST_F(CliTest, SameConfigAndSeedIsByteIdentical) {
  const auto args = "simulate --config '" + config("poisson_lognormal.json") + "' --seed 5";
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  ASSERT_EQ(a.exit_code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto c = run_cli("simulate --config '" + config("poisson_lognormal.json") + "' --seed 6");
  EXPECT_NE(a.out, c.out);
}

TEST_F(CliTest, ThreadCountDoesNotChangeReport) {
  for (const char* cmd : {"simulate", "particle"}) {
    const std::string cfg = std::string(cmd) == "simulate" ? "poisson_lognormal.json" : "particle_grid.json";
    const auto base = std::string(cmd) + " --config '" + config(cfg) + "' --deterministic-reduction";
    const auto one = run_cli(base + " --threads 1");
    const auto three = run_cli(base + " --threads 3");
    ASSERT_EQ(one.exit_code, 0) << one.err;
    EXPECT_EQ(one.out, three.out) << cmd;
  }
}

TEST_F(CliTest, SlaSubcommandEmitsFlooredTableValue) {
  const auto r = run_cli("sla --config '" + config("sla_sigma1.json") + "' --out json");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto rep = lda::report_from_json(r.out);
  EXPECT_EQ(std::floor(*row_at(rep, "sla", 0.99).var), 97.0);
  EXPECT_EQ(rep.get_meta("methods"), "sla");
}

TEST_F(CliTest, Table1SmokeRun) {
  const auto r = run_cli("table1 --preset sigma1 --scale 1e-4");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto rep = lda::report_from_csv(r.out);
  EXPECT_EQ(rep.rows.size(), 21U);
  EXPECT_TRUE(lda::report_violations(rep).empty());
}

TEST_F(CliTest, RareEventSubcommand) {
  const auto r = run_cli("rare-event --config '" + config("rare_event_tail.json") + "'");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto rep = lda::report_from_csv(r.out);
  ASSERT_FALSE(rep.rows.empty());
  for (const auto& row : rep.rows) {
    EXPECT_EQ(row.method, "rare-event");
    EXPECT_TRUE(row.std_error.has_value());
    EXPECT_FALSE(row.es.has_value());
  }
  EXPECT_TRUE(lda::report_violations(rep).empty());
}

TEST_F(CliTest, ConfigErrorIsMachineReadable) {
  const auto path = write_temp(
      "bad.json", R"({"model":{"frequency":{"kind":"poisson","lambda":2},"severity":{"kind":"lognormal","mu":2,"sigma":0}}})");
  const auto r = run_cli("simulate --config '" + path + "'");
  fs::remove(path);
  EXPECT_NE(r.exit_code, 0);
  EXPECT_TRUE(r.out.empty());
  const auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j["error"]["kind"], "config");
  EXPECT_NE(j["error"]["message"].get<std::string>().find("config.model.severity.sigma"), std::string::npos);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  for (const char* args : {"", "simulate --out xml", "table1 --preset sigma2", "simulate --threads 0",
                           "simulate --config /no/such/file.json"}) {
    const auto r = run_cli(args);
    EXPECT_EQ(r.exit_code, 2) << args;
    EXPECT_EQ(nlohmann::json::parse(r.err)["error"]["kind"], "usage") << args;
  }
}

TEST_F(CliTest, RareEventWithoutThresholdsFails) {
  const auto r = run_cli("rare-event");
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(nlohmann::json::parse(r.err)["error"]["message"].get<std::string>().find("thresholds"),
            std::string::npos);
}
