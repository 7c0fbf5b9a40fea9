// Copyright 2026 The jotdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// End-to-end checks of the jotdp binary.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "json.hpp"

namespace {

using Json = nlohmann::ordered_json;

struct Outcome {
  int exit_code = -1;
  std::string out;
};

Outcome Cli(const std::string& args) {
  const std::string command =
      std::string(JOTDP_CLI_PATH) + " " + args + " 2>/dev/null";
  Outcome result;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return result;
  char buffer[4096];
  size_t n;
  while ((n = fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
    result.out.append(buffer, n);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

Json CliJson(const std::string& args, int expected_exit = 0) {
  const Outcome r = Cli(args);
  EXPECT_EQ(r.exit_code, expected_exit) << args;
  return Json::parse(r.out, nullptr, /*allow_exceptions=*/false);
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(CliTest, NoSubcommandIsUsageError) {
  EXPECT_EQ(Cli("").exit_code, 1);
  EXPECT_EQ(Cli("frobnicate").exit_code, 1);
  EXPECT_EQ(Cli("--version").exit_code, 0);
}

TEST(CliTest, AdaptivePmf) {
  const Json doc = CliJson("pmf --dist adaptive --n 0 --c 2 --k 2");
  EXPECT_EQ(doc["schema"], "jotdp/v1");
  EXPECT_EQ(doc["support"][0], 0);
  EXPECT_EQ(doc["mass"][0], "1/4");
}

TEST(CliTest, DegenerateCensoredPmf) {
  const Json doc = CliJson("pmf --dist cdl --mu 0 --s 1 --lo 0 --hi 0");
  EXPECT_EQ(doc["support"], Json::array({0}));
  EXPECT_EQ(doc["mass"].size(), 1u);
  EXPECT_NEAR(std::stod(doc["mass"][0].get<std::string>()), 1.0, 1e-30);
}

TEST(CliTest, DsgPmfTable) {
  const Json doc = CliJson("pmf --dist dsg --mu 2 --p 1/2 --lo 0 --hi 5");
  EXPECT_EQ(doc["support"], Json::array({0, 1, 2, 3, 4, 5}));
  EXPECT_EQ(doc["mass"], Json::array({"1/8", "1/8", "1/4", "1/4", "1/8", "1/8"}));
  const Outcome csv = Cli("pmf --dist dsg --mu 2 --p 1/2 --lo 0 --hi 5 --format csv");
  EXPECT_EQ(csv.out.rfind("outcome,mass\n0,0.125\n1,0.125\n2,0.25\n", 0), 0u) << csv.out;
}

TEST(CliTest, PmfBadParams) {
  EXPECT_EQ(Cli("pmf --dist gamma").exit_code, 1);
  EXPECT_EQ(Cli("pmf --dist cdl --mu 0 --s 0 --lo 0 --hi 3").exit_code, 1);
  EXPECT_EQ(Cli("pmf --dist dsg --mu 2 --p 1/3 --lo 0 --hi 5").exit_code, 1);
}

TEST(CliTest, LaplaceSumRunIsClampedAndDeterministic) {
  const std::string dir = ::testing::TempDir();
  const std::string args =
      "run --mech laplace-sum --data ones:1000 --eps 1 --c 2 --seed 7 --out ";
  ASSERT_EQ(Cli(args + dir + "/run_a.json").exit_code, 0);
  ASSERT_EQ(Cli(args + dir + "/run_b.json").exit_code, 0);
  const std::string a = ReadFile(dir + "/run_a.json");
  EXPECT_EQ(a, ReadFile(dir + "/run_b.json"));
  const Json doc = Json::parse(a);
  EXPECT_EQ(doc["seed"], 7);
  const int64_t output = doc["output"].get<int64_t>();
  EXPECT_GE(output, 0);
  EXPECT_LE(output, doc["bound"].get<int64_t>());
  EXPECT_GT(doc["runtime"].get<uint64_t>(), 0u);
}

TEST(CliTest, Program1OnEmptyDataset) {
  const Json doc = CliJson(
      "run --mech program1 --data empty --eps-prime 1 --beta 0.5 --inner cdl-sum");
  EXPECT_EQ(doc["output"], 0);
  EXPECT_FALSE(doc["truncated"].get<bool>());
  EXPECT_GE(doc["iterations"].get<uint32_t>(), 1u);
}

TEST(CliTest, SeedFromEnvironment) {
  const std::string cmd = "run --mech program2 --n 10";
  const Outcome with_flag = Cli(cmd + " --seed 11");
  const Outcome from_env = Cli(cmd);
  ASSERT_EQ(setenv("JOTDP_SEED", "11", 1), 0);
  const Outcome with_env = Cli(cmd);
  unsetenv("JOTDP_SEED");
  EXPECT_EQ(with_flag.out, with_env.out);
  EXPECT_EQ(Json::parse(from_env.out)["seed"], 0);
}

TEST(CliTest, ConfigFile) {
  const std::string path = ::testing::TempDir() + "/cli_config.json";
  {
    std::ofstream out(path);
    out << R"({"mech": "program2", "c": 3, "k": 4})";
  }
  const Json doc = CliJson("run --config " + path + " --n 3 --seed 2");
  EXPECT_EQ(doc["params"]["c"], 3);
  EXPECT_EQ(doc["params"]["k"], 4);
  EXPECT_EQ(Cli("run --config /nonexistent.json").exit_code, 1);
}

TEST(CliTest, RunConfigErrors) {
  EXPECT_EQ(Cli("run --mech program9").exit_code, 1);
  EXPECT_EQ(Cli("run --mech program2 --k 1").exit_code, 1);
  EXPECT_EQ(Cli("run --mech program1 --beta 2").exit_code, 1);
  EXPECT_EQ(Cli("run --mech program2 --data '[7]'").exit_code, 1);
}

TEST(CliTest, ExactAuditOfAdaptiveCount) {
  const Json doc = CliJson("audit --mech program2 --n 5 --c 2 --k 3 --mode exact");
  EXPECT_LE(doc["eps_hat"].get<double>(), 4 * std::log(2.0) + 1e-9);
  EXPECT_TRUE(doc["pass"].get<bool>());
  EXPECT_EQ(doc["method"], "exact_ratio");
}

TEST(CliTest, SelfAuditIsZero) {
  const Json doc = CliJson("audit --mech program3 --n 4 --data-b ones:4");
  EXPECT_EQ(doc["eps_hat"].get<double>(), 0.0);
}

TEST(CliTest, LeakySamplerFailsJointAuditWithWitness) {
  const std::string base = std::string(JOTDP_CLI_PATH) +
                           " audit --mech leaky-cdl --lo 0 --hi 10 --n 3";
  FILE* pipe = popen((base + " --mode mc --trials 2000 2>&1 >/dev/null").c_str(), "r");
  ASSERT_NE(pipe, nullptr);
  std::string err;
  char buffer[512];
  size_t n;
  while ((n = fread(buffer, 1, sizeof(buffer), pipe)) > 0) err.append(buffer, n);
  const int status = pclose(pipe);
  EXPECT_EQ(WEXITSTATUS(status), 2);
  EXPECT_NE(err.find("witness"), std::string::npos) << err;

  const Json exact = CliJson("audit --mech leaky-cdl --lo 0 --hi 10 --n 3", 2);
  EXPECT_TRUE(exact["support_mismatch"].get<bool>());
  EXPECT_FALSE(exact["witness"].is_null());
  const Json outputs = CliJson(
      "audit --mech leaky-cdl --lo 0 --hi 10 --n 3 --output-only", 0);
  EXPECT_TRUE(outputs["pass"].get<bool>());
}

TEST(CliTest, McAuditDeterministicAcrossWorkers) {
  const std::string args =
      "audit --mech cdl --lo 0 --hi 10 --n 3 --mode mc --trials 4000 --seed 5";
  const Outcome one = Cli(args + " --workers 1");
  const Outcome three = Cli(args + " --workers 3");
  EXPECT_EQ(one.exit_code, 0);
  Json a = Json::parse(one.out);
  Json b = Json::parse(three.out);
  EXPECT_EQ(a["eps_hat"], b["eps_hat"]);
  EXPECT_EQ(a["worst_outcome"], b["worst_outcome"]);
}

TEST(CliTest, AuditJointCsv) {
  const std::string path = ::testing::TempDir() + "/joint.csv";
  ASSERT_EQ(Cli("audit --mech cdl --lo 0 --hi 4 --n 2 --joint-csv " + path)
                .exit_code,
            0);
  EXPECT_EQ(ReadFile(path).rfind("output,runtime,mass\n", 0), 0u);
}

TEST(CliTest, ScheduleCsv) {
  const Outcome r = Cli("schedule --eps-prime 1 --beta 0.5 --rows 6");
  ASSERT_EQ(r.exit_code, 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "i,eps,beta,m,eps_sum");
  std::vector<uint64_t> m;
  double eps_sum = 0;
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    std::string field;
    std::vector<std::string> cols;
    while (std::getline(fields, field, ',')) cols.push_back(field);
    ASSERT_EQ(cols.size(), 5u);
    m.push_back(std::stoull(cols[3]));
    eps_sum = std::stod(cols[4]);
  }
  ASSERT_EQ(m.size(), 6u);
  EXPECT_EQ(m[0], 8u);
  EXPECT_EQ(m[1], 24u);
  for (size_t i = 1; i < m.size(); ++i) {
    EXPECT_GE(m[i], 2 * m[i - 1]);
    EXPECT_LE(m[i], 4 * m[i - 1]);
  }
  EXPECT_LE(eps_sum, 1.0);
  EXPECT_EQ(Cli("schedule --eps-prime 0").exit_code, 1);
  EXPECT_EQ(Cli("schedule --beta 1").exit_code, 1);
}

TEST(CliTest, ScheduleJsonRoundTrips) {
  const Json doc = CliJson("schedule --rows 3 --format json");
  EXPECT_EQ(doc["rows"].size(), 3u);
  EXPECT_EQ(Json::parse(doc.dump()), doc);
}

TEST(CliTest, DemoLowerBound) {
  const Json below = CliJson("demo-lower-bound --budget 10 --ns 0,100 --trials 200");
  for (const Json& e : below["entries"]) {
    EXPECT_TRUE(e["observed"].empty());
    EXPECT_TRUE(e["exact_support"].empty());
  }
  const std::string csv = ::testing::TempDir() + "/demo.csv";
  const Json doc = CliJson("demo-lower-bound --ns 0,100 --trials 500 --csv " + csv);
  EXPECT_EQ(doc["budget"], 38);
  EXPECT_TRUE(doc["exact_supports_equal"].get<bool>());
  EXPECT_EQ(doc["entries"][0]["exact_support"], doc["entries"][1]["exact_support"]);
  EXPECT_TRUE(doc["entries"][0].contains("exact_probability"));
  EXPECT_EQ(ReadFile(csv).rfind("n,output\n", 0), 0u);
}

}  // namespace
