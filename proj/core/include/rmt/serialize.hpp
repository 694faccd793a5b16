#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rmt/dynamics.hpp"
#include "rmt/labels.hpp"
#include "rmt/resolvent.hpp"

namespace rmt::io {

using nlohmann::json;

std::string sha256_hex(const std::string& bytes);
std::string base64_encode(const std::string& bytes);
std::string base64_decode(const std::string& text);

// Row-major little-endian float64 payloads.
std::string encode_matrix(const RealMatrix& m);
RealMatrix decode_matrix(const std::string& b64, Index rows, Index cols);

json to_json(const ModelConstants& c);
ModelConstants constants_from_json(const json& j);

json to_json(const EntryLaw& law);
EntryLaw law_from_json(const json& j);

/// {"n", "kind", "amplitude", "constants", "s"?}; `s` is embedded only on request.
json to_json(const VarianceProfile& p, bool embed_matrix = false);
VarianceProfile profile_from_json(const json& j);

/// {"profile", "law", "seed", "entries"?}. Without entries the sample is
/// regenerated from (profile, law, seed).
json to_json(const WignerSample& s, bool embed_matrix = false);
WignerSample sample_from_json(const json& j);

json to_json(const FlowState& f, bool embed_matrix = true);
FlowState flow_from_json(const json& j);

/// {"n", "eps", "runs"}: run lengths over the upper triangle (row-major,
/// i <= j), alternating A/B and starting with A.
json to_json(const ABLabel& label);
ABLabel label_from_json(const json& j);

json to_json(const IndexClassification& c);

/// m_N, m_sc, diag(G) and the requested entries; the full matrix only when
/// its size is at most `full_limit`.
json to_json(const ResolventFrame& f, const std::vector<std::pair<Index, Index>>& entries = {},
             Index full_limit = 0);

json to_json(Complex z);

// Canonical text: sorted keys, no whitespace.
std::string canonical(const json& j);

// Writes `text` and returns its SHA-256.
std::string write_file(const std::filesystem::path& path, const std::string& text);
std::string read_file(const std::filesystem::path& path);

/// Minimal CSV builder with full-precision numbers.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header);
  Csv& row();
  Csv& add(double v);
  Csv& add(Index v);
  Csv& add(int v) { return add(static_cast<double>(v)); }
  Csv& add(const std::string& v);
  std::string str() const;
  Index rows() const { return rows_; }

 private:
  std::string body_;
  Index cols_ = 0;
  Index rows_ = 0;
  Index in_row_ = 0;
};

std::string format_number(double v);

}  // namespace rmt::io
