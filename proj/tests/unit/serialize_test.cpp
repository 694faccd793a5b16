#include <gtest/gtest.h>

#include <filesystem>

#include "generators.hpp"
#include "rmt/serialize.hpp"

namespace rmt {
namespace {

using testing::Gen;

TEST(Hashing, KnownDigests) {
  EXPECT_EQ(io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(io::sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Base64, KnownEncodingsAndRoundTrip) {
  EXPECT_EQ(io::base64_encode(""), "");
  EXPECT_EQ(io::base64_encode("f"), "Zg==");
  EXPECT_EQ(io::base64_encode("fo"), "Zm8=");
  EXPECT_EQ(io::base64_encode("foobar"), "Zm9vYmFy");
  for (std::uint64_t k = 0; k < 30; ++k) {
    Gen g(91, k);
    std::string bytes(g.size(0, 100), '\0');
    for (auto& c : bytes) c = static_cast<char>(g.index(256));
    EXPECT_EQ(io::base64_decode(io::base64_encode(bytes)), bytes);
  }
}

TEST(Matrix, RoundTripIsBitExact) {
  const RealMatrix m = RealMatrix::Random(7, 3);
  EXPECT_EQ(io::decode_matrix(io::encode_matrix(m), 7, 3), m);
  EXPECT_THROW(io::decode_matrix(io::encode_matrix(m), 7, 4), Error);
}

TEST(Labels, RunLengthRoundTrip) {
  for (std::uint64_t k = 0; k < 30; ++k) {
    Gen g(92, k);
    const Index n = g.size(1, 40);
    ABLabel label(n, 0.5);
    const double p = g.uniform(0.0, 1.0);
    for (Index i = 0; i < n; ++i)
      for (Index j = i; j < n; ++j) label.set(i, j, g.uniform(0.0, 1.0) < p);
    const auto j = io::to_json(label);
    const auto back = io::label_from_json(j);
    ASSERT_EQ(back.n(), n);
    for (Index i = 0; i < n; ++i)
      for (Index jj = 0; jj < n; ++jj) ASSERT_EQ(back.is_b(i, jj), label.is_b(i, jj));
    Index total = 0;
    for (Index r : j.at("runs").get<std::vector<Index>>()) total += r;
    EXPECT_EQ(total, n * (n + 1) / 2);
  }
}

TEST(Labels, HandEncoding) {
  ABLabel label(3, 0.5);  // upper triangle order: 00 01 02 11 12 22
  label.set(0, 0, true);
  label.set(1, 2, true);
  EXPECT_EQ(io::to_json(label).at("runs").get<std::vector<Index>>(), (std::vector<Index>{0, 1, 3, 1, 1}));
  io::json bad = {{"n", 3}, {"eps", 0.5}, {"runs", {2, 2}}};
  EXPECT_THROW(io::label_from_json(bad), Error);
}

TEST(Samples, RegenerateFromSeedOrEmbed) {
  const auto spec = EnsembleSpec{EnsembleSpec::Kind::wigner, 30, EntryLaw::student_t(2.6), ProfileKind::tilted, 0.2, {}};
  const auto s = spec.sample(11);
  const auto light = io::sample_from_json(io::to_json(s, false));
  EXPECT_EQ(light.h, s.h);
  EXPECT_EQ(light.seed, 11u);
  const auto heavy = io::to_json(s, true);
  EXPECT_TRUE(heavy.contains("entries"));
  EXPECT_EQ(io::sample_from_json(heavy).h, s.h);
  const auto p = io::profile_from_json(io::to_json(*s.profile, true));
  EXPECT_EQ(p.s, s.profile->s);
  const auto law = io::law_from_json(io::to_json(EntryLaw::sym_pareto(3.5)));
  EXPECT_EQ(law.kind, LawKind::sym_pareto);
  EXPECT_EQ(law.tail_index, 3.5);
}

TEST(Flow, EmbeddedStateRoundTrip) {
  const FlowState f{0.25, sample_goe(12, 2)};
  const auto back = io::flow_from_json(io::to_json(f));
  EXPECT_EQ(back.t, 0.25);
  EXPECT_EQ(back.sample.h, f.sample.h);
}

TEST(Canonical, SortedAndCompact) {
  const io::json j = {{"b", 1}, {"a", {{"d", 2.5}, {"c", "x"}}}};
  EXPECT_EQ(io::canonical(j), R"({"a":{"c":"x","d":2.5},"b":1})");
}

TEST(Files, WriteReturnsHash) {
  const auto dir = std::filesystem::temp_directory_path() / "rmt_serialize_test";
  std::filesystem::remove_all(dir);
  const auto hash = io::write_file(dir / "sub" / "a.txt", "abc");
  EXPECT_EQ(hash, io::sha256_hex("abc"));
  EXPECT_EQ(io::read_file(dir / "sub" / "a.txt"), "abc");
  EXPECT_THROW(io::read_file(dir / "missing"), Error);
  std::filesystem::remove_all(dir);
}

TEST(Csv, RowsAndNumbers) {
  io::Csv csv({"x", "y"});
  csv.row().add(0.1).add(Index{3});
  csv.row().add(std::nan("")).add(std::string("b"));
  EXPECT_EQ(csv.str(), "x,y\n0.1,3\nnan,b\n");
  EXPECT_EQ(csv.rows(), 2u);
  io::Csv bad({"x", "y"});
  bad.row().add(1.0);
  EXPECT_THROW(bad.str(), Error);
  EXPECT_EQ(io::format_number(1e-300), "1e-300");
  EXPECT_EQ(std::stod(io::format_number(0.1 + 0.2)), 0.1 + 0.2);
}

}  // namespace
}  // namespace rmt
