#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(VIRIAL_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string config(const std::string& name) { return std::string(VIRIAL_SOURCE_DIR) + "/configs/" + name; }

}  // namespace

TEST(Cli, VerifyFirstOrderZero) {
  for (const char* name : {"first-order-zero", "t11"}) {
    const auto r = run(std::string("verify ") + name);
    ASSERT_EQ(r.code, 0) << r.out;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_TRUE(j["result"]["passed"].get<bool>());
    EXPECT_EQ(j["tool"], "virial");
  }
}

TEST(Cli, VerifyGraphSum) {
  const auto r = run("verify proposition-4-2 --max 5");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(nlohmann::json::parse(r.out)["result"]["passed"].get<bool>());
}

TEST(Cli, MalformedConfigExitsTwo) {
  const std::string path = ::testing::TempDir() + "bad_config.json";
  std::ofstream(path) << R"({"beta": 1.0, "potential": {"kind": "square_well", "depth": 1.0, "range": 0.2}})";
  const auto r = run("correlate --config " + path + " --eta 0 --rho 0.1");
  EXPECT_EQ(r.code, 2);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["error"]["key"], "potential.range");
}

TEST(Cli, UsageErrorExitsTwo) {
  EXPECT_EQ(run("correlate --rho 0.1").code, 2);
  EXPECT_EQ(run("no-such-command").code, 2);
}

TEST(Cli, ModuleErrorExitsThree) {
  const auto r = run("oracle z --config " + config("hard_rods.json") + " --N 8 --half-width 5");
  EXPECT_EQ(r.code, 3) << r.out;
  EXPECT_EQ(nlohmann::json::parse(r.out)["error"]["kind"], "cap_exceeded");
}

TEST(Cli, ByteIdenticalOutput) {
  const std::string args = "kernel-hat --config " + config("square_well.toml") + " --eta 0,1.6 --order 2";
  const auto a = run(args + " --workers 1");
  const auto b = run(args + " --workers 4");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, CountsCsv) {
  const auto r = run("counts --max-m 2 --max-n 2");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("1,1,2"), std::string::npos);
  EXPECT_NE(r.out.find("2,2,36"), std::string::npos);
}

TEST(Cli, CorrelateSingleton) {
  const auto r = run("correlate --config " + config("hard_rods.json") + " --eta 0.3 --rho 0.2 --nmax 3");
  ASSERT_EQ(r.code, 0);
  EXPECT_DOUBLE_EQ(nlohmann::json::parse(r.out)["result"]["value"].get<double>(), 0.2);
}

TEST(Cli, OracleKsCheck) {
  const auto r = run("oracle ks-check --config " + config("hard_rods.json") + " --N 4 --half-width 3 --eta 0,1.5 --refine");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(nlohmann::json::parse(r.out)["result"]["halved"].get<bool>());
}

TEST(Cli, GraphsEnumerate) {
  const auto r = run("graphs enumerate --white 2 --black 2 --count");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("8"), std::string::npos);
}

// Required keys and enumerations from the shipped report schema.
TEST(Cli, ReportsFollowSchema) {
  std::ifstream in(std::string(VIRIAL_SOURCE_DIR) + "/schemas/report.schema.json");
  const auto schema = nlohmann::json::parse(in);
  const auto& ok_shape = schema["oneOf"][0];
  const auto& err_shape = schema["oneOf"][1]["properties"]["error"];
  const auto& cfg_shape = schema["$defs"]["config"];
  for (const std::string args : {"verify t11", "counts --max-m 1 --max-n 1 --format json",
                                 "kernel --white 2 --black 1", "correlate --eta 0,1.5 --rho 0.05 --nmax 2",
                                 "oracle z --N 3 --half-width 3", "potential check --trials 50"}) {
    const auto r = run(args);
    ASSERT_EQ(r.code, 0) << args;
    const auto j = nlohmann::json::parse(r.out);
    for (const auto& k : ok_shape["required"]) EXPECT_TRUE(j.contains(k.get<std::string>())) << args << " " << k;
    for (const auto& [k, v] : j.items()) EXPECT_TRUE(ok_shape["properties"].contains(k)) << args << " " << k;
    for (const auto& k : cfg_shape["required"]) EXPECT_TRUE(j["config"].contains(k.get<std::string>())) << k;
    EXPECT_EQ(j["config_hash"].get<std::string>().size(), 16u);
  }
  for (const std::string args : {"correlate --rho 0.1", "oracle z --N 9 --half-width 5", "kernel --white 5 --black 5"}) {
    const auto r = run(args);
    EXPECT_NE(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    const auto kinds = err_shape["properties"]["kind"]["enum"];
    EXPECT_NE(std::find(kinds.begin(), kinds.end(), j["error"]["kind"]), kinds.end()) << args;
  }
}
