#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

#include "rmt/harness.hpp"
#include "rmt/parallel.hpp"
#include "rmt/serialize.hpp"

namespace rmt {
namespace {

namespace fs = std::filesystem;
using io::json;

json continuity_json(const fs::path& dir) {
  return {{"kind", "continuity"},
          {"ensemble", {{"kind", "wigner"}, {"n", 30}, {"law", {{"kind", "student_t"}, {"tail_index", 3.0}}}}},
          {"seeds", {{"first", 1}, {"count", 2}}},
          {"params", {{"triples", 5}}},
          {"output_dir", dir.string()}};
}

class HarnessTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rmt_harness_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

std::string config_error_message(const json& j) {
  try {
    parse_config(j);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_config);
    return e.what();
  }
  return "";
}

TEST(Config, FieldLevelErrors) {
  const fs::path d = "out";
  auto j = continuity_json(d);
  j["ensemble"]["n"] = 1;
  EXPECT_NE(config_error_message(j).find("ensemble.n"), std::string::npos);

  j = continuity_json(d);
  j["params"]["bogus"] = 1;
  EXPECT_NE(config_error_message(j).find("params.bogus: unknown field"), std::string::npos);

  j = continuity_json(d);
  j["colour"] = "red";
  EXPECT_NE(config_error_message(j).find("colour"), std::string::npos);

  j = continuity_json(d);
  j["kind"] = "nope";
  EXPECT_NE(config_error_message(j).find("kind"), std::string::npos);

  j = continuity_json(d);
  j.erase("output_dir");
  EXPECT_NE(config_error_message(j).find("output_dir"), std::string::npos);

  j = continuity_json(d);
  j["ensemble"]["law"]["tail_index"] = 1.5;
  EXPECT_NE(config_error_message(j).find("ensemble.law"), std::string::npos);

  j = continuity_json(d);
  j["params"]["eta"] = -1.0;
  EXPECT_NE(config_error_message(j).find("params.eta"), std::string::npos);
}

TEST(Config, CanonicalFormAndHash) {
  const auto a = parse_config(continuity_json("out"));
  EXPECT_EQ(a.seeds, (std::vector<Seed>{1, 2}));
  const auto b = parse_config(a.to_json());
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 64u);
  auto j = continuity_json("out");
  j["seeds"] = {1, 3};
  EXPECT_NE(parse_config(j).hash(), a.hash());
}

TEST(Config, AxisOverrides) {
  const auto base = parse_config(continuity_json("out"));
  EXPECT_EQ(with_axis(base, "N", 80).ensemble.n, 80u);
  EXPECT_EQ(with_axis(base, "tail_index", 4.0).ensemble.law.tail_index, 4.0);
  EXPECT_EQ(with_axis(base, "triples", 9).params.at("triples").get<long long>(), 9);
  EXPECT_EQ(with_axis(base, "N", 80).output_dir, base.output_dir);
  EXPECT_THROW(with_axis(base, "N", 80.5), Error);
  EXPECT_THROW(with_axis(base, "triples", 2.5), Error);
  EXPECT_THROW(with_axis(base, "nothing", 1.0), Error);
}

TEST_F(HarnessTest, RunsAreByteIdentical) {
  const auto c = parse_config(continuity_json(dir_ / "a"));
  const auto m1 = run(c);
  EXPECT_EQ(m1.status, RunStatus::pass);
  EXPECT_EQ(exit_code(m1.status), 0);
  ASSERT_GE(m1.files.size(), 2u);
  auto c2 = c;
  c2.output_dir = dir_ / "b";
  const auto m2 = run(c2);
  ASSERT_EQ(m1.files.size(), m2.files.size());
  for (std::size_t k = 0; k < m1.files.size(); ++k) {
    EXPECT_EQ(m1.files[k].path, m2.files[k].path);
    if (m1.files[k].path != "config.json") EXPECT_EQ(m1.files[k].sha256, m2.files[k].sha256) << m1.files[k].path;
  }
  EXPECT_EQ(m1.config_hash, c.hash());
  // A rerun into the same directory replaces the listed files.
  EXPECT_EQ(run(c).files[1].sha256, m1.files[1].sha256);
}

TEST_F(HarnessTest, ManifestRoundTripAndReport) {
  const auto c = parse_config(continuity_json(dir_));
  const auto m = run(c);
  const auto back = RunManifest::from_json(json::parse(io::read_file(dir_ / kManifestName)));
  EXPECT_EQ(back.config_hash, m.config_hash);
  EXPECT_EQ(back.files.size(), m.files.size());
  const auto ok = report(dir_ / kManifestName);
  EXPECT_EQ(ok.status, RunStatus::pass);
  EXPECT_TRUE(ok.files_ok);
  EXPECT_NE(ok.text.find("kind: continuity"), std::string::npos);
  io::write_file(dir_ / "summary.json", "tampered");
  const auto bad = report(dir_ / kManifestName);
  EXPECT_EQ(bad.status, RunStatus::error);
  EXPECT_FALSE(bad.files_ok);
  EXPECT_NE(bad.text.find("hash mismatch"), std::string::npos);
}

TEST_F(HarnessTest, UnlistedFilesBlockTheRun) {
  io::write_file(dir_ / "stray.txt", "x");
  try {
    run(parse_config(continuity_json(dir_)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::io);
  }
  EXPECT_EQ(io::read_file(dir_ / "stray.txt"), "x");
}

TEST_F(HarnessTest, ComputeErrorsAreRecorded) {
  // The connectivity threshold is undefined at N = 2; the error lands in the manifest.
  json j = continuity_json(dir_);
  j["kind"] = "admissibility";
  j["ensemble"]["n"] = 2;
  j["params"] = {{"trials", 1}};
  const auto m = run(parse_config(j));
  EXPECT_EQ(m.status, RunStatus::error);
  EXPECT_EQ(exit_code(m.status), 2);
  EXPECT_TRUE(fs::exists(dir_ / kManifestName));
}

TEST_F(HarnessTest, SweepWritesOneRunPerValue) {
  const auto base = parse_config(continuity_json(dir_));
  const auto s = sweep(base, "N", {20, 40});
  ASSERT_EQ(s.runs.size(), 2u);
  EXPECT_EQ(s.status, RunStatus::pass);
  EXPECT_TRUE(fs::exists(dir_ / "N=20" / kManifestName));
  EXPECT_TRUE(fs::exists(dir_ / "N=40" / kManifestName));
  const std::string csv = io::read_file(dir_ / "sweep_summary.csv");
  EXPECT_EQ(csv.rfind("N,status,config_hash", 0), 0u);
  const auto r = report(dir_ / "sweep_manifest.json");
  EXPECT_EQ(r.status, RunStatus::pass);
  EXPECT_NE(r.text.find("N=40: pass"), std::string::npos);
  // Sweeping again over the same directory replaces the previous runs.
  EXPECT_EQ(sweep(base, "N", {20}).runs.size(), 1u);
  EXPECT_FALSE(fs::exists(dir_ / "N=40"));
  EXPECT_THROW(sweep(base, "N", {}), Error);
}

TEST_F(HarnessTest, LoadConfigResolvesRelativeOutput) {
  json j = continuity_json("runs/x");
  io::write_file(dir_ / "cfg.json", j.dump());
  const auto c = load_config(dir_ / "cfg.json");
  EXPECT_EQ(c.output_dir, (dir_ / "runs/x").lexically_normal());
  io::write_file(dir_ / "broken.json", "{");
  EXPECT_THROW(load_config(dir_ / "broken.json"), Error);
}

TEST(Workers, EnvironmentOverride) {
  ::setenv("RMT_WORKERS", "3", 1);
  EXPECT_EQ(worker_count(), 3u);
  ::setenv("RMT_WORKERS", "zero", 1);
  EXPECT_THROW(worker_count(), Error);
  ::unsetenv("RMT_WORKERS");
  EXPECT_GE(worker_count(), 1u);
}

}  // namespace
}  // namespace rmt
