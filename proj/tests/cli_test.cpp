#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "idiomgen/cli.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace idiomgen;
using namespace testing_support;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string ws(const std::string& name) { return workspace_dir(name).string(); }

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("idiomgen_cli_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST(Cli, CountsArtifacts) {
  EXPECT_EQ(cli({"-w", ws("sum_intent"), "count", "--intent", "sum"}).out, "6\n");
  EXPECT_EQ(cli({"-w", ws("msum_intent"), "count", "--intent", "msum"}).out, "20\n");
  EXPECT_EQ(cli({"-w", ws("sum_intent"), "count", "--intent", "sum", "--kind", "spec"}).out, "1\n");
}

TEST(Cli, CheckExitCodeFollowsCoherence) {
  auto ok = cli({"-w", ws("sum_intent"), "check", "--intent", "sum", "--seed", "7"});
  EXPECT_EQ(ok.code, kExitOk) << ok.err;
  EXPECT_NE(ok.out.find("coherent"), std::string::npos);
  auto bad = cli({"-w", ws("sum_intent"), "-w", ws("mutations/product.idioms"), "check", "--intent", "sum"});
  EXPECT_EQ(bad.code, kExitFailure);
  EXPECT_NE(bad.out.find("violation"), std::string::npos);
}

TEST(Cli, CheckWritesJsonReport) {
  auto dir = temp_dir("report");
  std::filesystem::create_directories(dir);
  auto file = (dir / "report.json").string();
  cli({"-w", ws("sum_intent"), "check", "--intent", "sum", "--report", file});
  std::ifstream in(file);
  auto j = nlohmann::json::parse(in);
  EXPECT_TRUE(j["coherent"].get<bool>());
  EXPECT_EQ(j["checks"].size(), 21u);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli({"-w", ws("sum_intent"), "count", "--intent", "nope"}).code, kExitUsage);
  EXPECT_EQ(cli({"-w", ws("sum_intent"), "generate", "--intent", "sum", "--mode", "random"}).code, kExitUsage);
  EXPECT_EQ(cli({"-w", ws("sum_intent"), "frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({"-w", ws("no-such-dir"), "count", "--intent", "sum"}).code, kExitUsage);
  EXPECT_EQ(cli({"-w", ws("sum_intent"), "--library", "other", "count", "--intent", "sum"}).code, kExitUsage);
  EXPECT_EQ(cli({"-w", ws("list_grammar"), "derive", "--grammar", "nope"}).code, kExitUsage);
}

TEST(Cli, GenerateWritesNumberedFiles) {
  auto dir = temp_dir("generate");
  auto r = cli({"-w", ws("sum_intent"), "generate", "--intent", "sum", "--out", dir.string()});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, "6\n");
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) files += e.path().filename().string().rfind("program_", 0) == 0;
  EXPECT_EQ(files, 6u);
  EXPECT_TRUE(std::filesystem::exists(dir / "program_000.hs"));

  auto none = temp_dir("generate_none");
  auto z = cli({"-w", ws("sum_intent"), "generate", "--intent", "sum", "--limit", "0", "--out", none.string()});
  EXPECT_EQ(z.code, kExitOk);
  EXPECT_EQ(z.out, "0\n");
  EXPECT_TRUE(!std::filesystem::exists(none) || std::filesystem::is_empty(none));
}

TEST(Cli, OutputIsDeterministic) {
  std::vector<std::string> gen{"-w", ws("sum_intent"), "generate", "--intent", "sum", "--mode", "random", "--seed", "3"};
  EXPECT_EQ(cli(gen).out, cli(gen).out);
  std::vector<std::string> check{"-w", ws("msum_intent"), "check", "--intent", "msum", "--seed", "4", "--samples", "20"};
  EXPECT_EQ(cli(check).out, cli(check).out);
}

TEST(Cli, DeriveAndVariants) {
  auto d = cli({"-w", ws("list_grammar"), "derive", "--grammar", "lists"});
  EXPECT_EQ(d.code, kExitOk) << d.err;
  EXPECT_EQ(d.out.substr(d.out.rfind('\n', d.out.size() - 2) + 1), "40\n");
  auto v = cli({"-w", ws("sum_intent"), "variants", "--intent", "sum"});
  EXPECT_EQ(v.code, kExitOk) << v.err;
  EXPECT_EQ(v.out.substr(v.out.rfind('\n', v.out.size() - 2) + 1), "3\n");
}
