#include <gtest/gtest.h>
#include <openssl/sha.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pot/chain_io.hpp"
#include "pot/cli/cli.hpp"
#include "pot/sim/sweep.hpp"
#include "pot/vote_log.hpp"

namespace fs = std::filesystem;
using pot::cli::dispatch;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result pot_cmd(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), md);
  static const char* digits = "0123456789abcdef";
  std::string s;
  for (unsigned char c : md) s += digits[c >> 4], s += digits[c & 15];
  return s;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("pot_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string at(const std::string& name) const { return (dir / name).string(); }
  fs::path dir;
};

}  // namespace

TEST_F(CliTest, IssueThenVerify) {
  auto issued = pot_cmd({"issue", "--seed", "3", "--length", "5", "--out", at("c.potc")});
  ASSERT_EQ(issued.code, 0) << issued.err;
  EXPECT_TRUE(fs::exists(at("c.registry.json")));
  auto ok = pot_cmd({"verify-chain", at("c.potc")});
  EXPECT_EQ(ok.code, 0);
  EXPECT_EQ(ok.out, "accepted valid=5/5\n");

  auto high = pot_cmd({"verify-chain", at("c.potc"), "--threshold", "6"});
  EXPECT_EQ(high.code, 1);
  EXPECT_NE(high.out.find("BelowThreshold"), std::string::npos);
}

TEST_F(CliTest, TamperedChainRejected) {
  ASSERT_EQ(pot_cmd({"issue", "--seed", "3", "--length", "4", "--out", at("t.json"), "--tamper",
                     "1:event_hash"})
                .code,
            0);
  auto r = pot_cmd({"verify-chain", at("t.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out, "rejected index=2 reason=HashLinkMismatch valid=3/4\n");
}

TEST_F(CliTest, GapsHonoredOrRefused) {
  ASSERT_EQ(pot_cmd({"issue", "--seed", "4", "--length", "5", "--gap", "2", "--out", at("g.potc")}).code, 0);
  EXPECT_EQ(pot_cmd({"verify-chain", at("g.potc")}).out, "accepted valid=4/5\n");
  auto strict = pot_cmd({"verify-chain", at("g.potc"), "--no-gaps"});
  EXPECT_EQ(strict.code, 1);
  EXPECT_NE(strict.out.find("GapNotAllowed"), std::string::npos);
}

TEST_F(CliTest, WrongOwnerRejected) {
  ASSERT_EQ(pot_cmd({"issue", "--seed", "5", "--length", "3", "--out", at("o.potc")}).code, 0);
  auto r = pot_cmd({"verify-chain", at("o.potc"), "--owner", std::string(64, 'a')});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("OwnershipFailure"), std::string::npos);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(pot_cmd({}).code, 2);
  EXPECT_EQ(pot_cmd({"frobnicate"}).code, 2);
  auto r = pot_cmd({"verify-chain"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  EXPECT_EQ(pot_cmd({"issue", "--seed", "x", "--out", at("a")}).code, 2);
  EXPECT_EQ(pot_cmd({"attack", "--kind", "ddos"}).code, 2);
}

TEST_F(CliTest, DomainErrorsExitOne) {
  EXPECT_EQ(pot_cmd({"verify-chain", at("missing.potc")}).code, 1);
  pot::write_text(at("bad.json"), R"({"voting": {"n_thold": 3}})");
  auto r = pot_cmd({"simulate", "--config", at("bad.json"), "--out", at("s")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("voting.n_thold"), std::string::npos);
}

TEST_F(CliTest, VvmtCsv) {
  ASSERT_EQ(pot_cmd({"issue", "--seed", "6", "--length", "11", "--out", at("v.potc")}).code, 0);
  auto r = pot_cmd({"vvmt", at("v.potc"), "--form", "vanilla_linear", "--gamma", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "form,metric,score,signatures,valid_count,total_distance_miles");
  auto f = pot::sim::split_csv_line(row);
  ASSERT_EQ(f.size(), 6u);
  EXPECT_EQ(f[3], "11");
  EXPECT_NEAR(std::stod(f[2]), 2 * std::stod(f[5]), 1e-9);
}

TEST_F(CliTest, SimulateManifestMatchesFiles) {
  auto r = pot_cmd({"simulate", "--seed", "3", "--out", at("run"), "--plots"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto manifest = nlohmann::json::parse(slurp(dir / "run" / "manifest.json"));
  EXPECT_EQ(manifest["seed"], 3);
  EXPECT_EQ(manifest["config_sha256"], sha256_hex(manifest["config"].dump()));
  for (const char* f : {"metrics.csv", "traces/run.jsonl", "traces/votes.csv", "plots/confirmation_delay.svg"}) {
    ASSERT_TRUE(manifest["outputs"].contains(f)) << f;
    EXPECT_EQ(manifest["outputs"][f], sha256_hex(slurp(dir / "run" / f))) << f;
  }
  auto metrics = pot::sim::parse_metrics_csv(slurp(dir / "run" / "metrics.csv"));
  ASSERT_EQ(metrics.size(), 1u);
  EXPECT_EQ(metrics[0].seed, 3u);

  auto replay = pot_cmd({"replay-votes", at("run/traces/votes.csv")});
  EXPECT_EQ(replay.code, 0);
  EXPECT_NE(replay.out.find("mismatches=0"), std::string::npos);
}

TEST_F(CliTest, ReplayDetectsEditedLog) {
  ASSERT_EQ(pot_cmd({"simulate", "--seed", "4", "--out", at("run")}).code, 0);
  auto log = pot::parse_vote_log(slurp(dir / "run" / "traces" / "votes.csv"));
  for (auto& rec : log.records) {
    if (rec.decision) {
      rec.decision = -*rec.decision;
      break;
    }
  }
  pot::write_text(at("edited.csv"), pot::format_vote_log(log));
  EXPECT_EQ(pot_cmd({"replay-votes", at("edited.csv")}).code, 1);
}

TEST_F(CliTest, SweepIsReproducible) {
  pot::write_text(at("grid.json"), R"({"voting.n_thld": [5, 9]})");
  pot::write_text(at("base.json"), R"({"duration_s": 200, "malicious_fraction": 0.2})");
  std::vector<std::string> args{"sweep", "--config", at("base.json"), "--grid", at("grid.json"),
                                "--reps", "2", "--seed", "11"};
  auto a = pot_cmd(args);
  auto b = pot_cmd(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(pot::sim::parse_metrics_csv(a.out).size(), 4u);
  EXPECT_EQ(a.out.substr(0, a.out.find(',')), "voting.n_thld");

  args.insert(args.end(), {"--out", at("sw"), "--plots"});
  ASSERT_EQ(pot_cmd(args).code, 0);
  EXPECT_EQ(slurp(dir / "sw" / "metrics.csv"), a.out);
  EXPECT_TRUE(fs::exists(dir / "sw" / "plots" / "invalid_proportion.svg"));
}

TEST_F(CliTest, GameVerdictAndEnumeration) {
  pot::write_text(at("g.json"), R"({"reward": 10, "punishment": 5, "vote_cost": 1,
                                    "integrity_costs": [0, 1, 2, 20], "n_thld": 2})");
  auto r = pot_cmd({"game", "--config", at("g.json"), "--enumerate"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("voter,integrity_cost,sid,all_cheat_action,payoff_truth,payoff_abstain,payoff_cheat"),
            std::string::npos);
  EXPECT_NE(r.out.find("ne_index,profile"), std::string::npos);
  pot::write_text(at("bad.json"), R"({"reward": 1, "vote_cost": 2, "integrity_costs": [0, 0]})");
  EXPECT_EQ(pot_cmd({"game", "--config", at("bad.json")}).code, 1);
}

TEST_F(CliTest, OptinSweep) {
  auto r = pot_cmd({"optin", "--sweep-thld", "0:400:100"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("# critical_threshold=", 0), 0u);
  std::getline(in, line);
  EXPECT_EQ(line, "vvmt_thld,normal,adversary");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 5);
}

TEST_F(CliTest, AttackReport) {
  auto r = pot_cmd({"attack", "--kind", "replay", "--out", at("atk")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("accepted,0"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "atk" / "manifest.json"));
}
