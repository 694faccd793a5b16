#include "rmt/serialize.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

namespace rmt::io {

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::io, "SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int k = 0; k < len; ++k) {
    out.push_back(hex[digest[k] >> 4]);
    out.push_back(hex[digest[k] & 15]);
  }
  return out;
}

std::string base64_encode(const std::string& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string base64_decode(const std::string& text) {
  require(text.size() % 4 == 0, ErrorCode::io, "base64 length must be a multiple of 4");
  std::string out(3 * text.size() / 4, '\0');
  const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(text.data()), static_cast<int>(text.size()));
  require(n >= 0, ErrorCode::io, "invalid base64 payload");
  std::size_t pad = 0;
  if (!text.empty() && text.back() == '=') ++pad;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

std::string encode_matrix(const RealMatrix& m) {
  std::string bytes(static_cast<std::size_t>(m.size()) * sizeof(double), '\0');
  std::size_t off = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j, off += sizeof(double)) {
      const double v = m(i, j);
      std::memcpy(bytes.data() + off, &v, sizeof(double));
    }
  return base64_encode(bytes);
}

RealMatrix decode_matrix(const std::string& b64, Index rows, Index cols) {
  const std::string bytes = base64_decode(b64);
  require(bytes.size() == rows * cols * sizeof(double), ErrorCode::io, "matrix payload has the wrong length");
  RealMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::size_t off = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j, off += sizeof(double)) {
      double v;
      std::memcpy(&v, bytes.data() + off, sizeof(double));
      m(i, j) = v;
    }
  return m;
}

json to_json(const ModelConstants& c) { return {{"eps", c.eps}, {"c1", c.c1}, {"C1", c.C1}, {"C2", c.C2}}; }

ModelConstants constants_from_json(const json& j) {
  ModelConstants c;
  c.eps = j.value("eps", c.eps);
  c.c1 = j.value("c1", c.c1);
  c.C1 = j.value("C1", c.C1);
  c.C2 = j.value("C2", c.C2);
  return c;
}

json to_json(const EntryLaw& law) {
  json j{{"kind", to_string(law.kind)}, {"target_variance", law.target_variance}};
  if (law.heavy_tailed()) j["tail_index"] = law.tail_index;
  return j;
}

EntryLaw law_from_json(const json& j) {
  EntryLaw law;
  law.kind = law_kind_from_string(j.at("kind").get<std::string>());
  law.tail_index = j.value("tail_index", 0.0);
  law.target_variance = j.value("target_variance", 1.0);
  law.validate();
  return law;
}

json to_json(const VarianceProfile& p, bool embed_matrix) {
  json j{{"n", p.n}, {"kind", to_string(p.kind)}, {"amplitude", p.amplitude}, {"constants", to_json(p.constants)}};
  if (embed_matrix) j["s"] = encode_matrix(p.s);
  return j;
}

VarianceProfile profile_from_json(const json& j) {
  const Index n = j.at("n").get<Index>();
  const ProfileKind kind = profile_kind_from_string(j.at("kind").get<std::string>());
  const ModelConstants c = constants_from_json(j.value("constants", json::object()));
  const double amplitude = j.value("amplitude", 0.0);
  VarianceProfile p;
  if (j.contains("s")) {
    p.n = n;
    p.kind = kind;
    p.amplitude = amplitude;
    p.constants = c;
    p.s = decode_matrix(j.at("s").get<std::string>(), n, n);
    p.validate();
  } else if (kind == ProfileKind::goe) {
    p = make_goe_profile(n, c.eps);
  } else {
    p = make_profile(n, kind, c.eps, amplitude, c);
  }
  return p;
}

json to_json(const WignerSample& s, bool embed_matrix) {
  require(s.profile != nullptr, ErrorCode::invalid_argument, "sample has no profile");
  json j{{"profile", to_json(*s.profile)}, {"law", to_json(s.law)}, {"seed", s.seed}, {"n", s.n()}};
  if (embed_matrix) j["entries"] = encode_matrix(s.h);
  return j;
}

WignerSample sample_from_json(const json& j) {
  auto profile = std::make_shared<const VarianceProfile>(profile_from_json(j.at("profile")));
  const EntryLaw law = law_from_json(j.at("law"));
  const Seed seed = j.at("seed").get<Seed>();
  if (j.contains("entries")) {
    WignerSample s;
    s.profile = profile;
    s.law = law;
    s.seed = seed;
    s.h = decode_matrix(j.at("entries").get<std::string>(), profile->n, profile->n);
    return s;
  }
  return sample_matrix(profile, law, seed);
}

json to_json(const FlowState& f, bool embed_matrix) {
  json j = to_json(f.sample, embed_matrix);
  j["t"] = f.t;
  return j;
}

FlowState flow_from_json(const json& j) {
  FlowState f;
  f.sample = sample_from_json(j);
  f.t = j.value("t", 0.0);
  return f;
}

json to_json(const ABLabel& label) {
  std::vector<Index> runs;
  bool current = false;  // runs start with A
  Index len = 0;
  for (Index i = 0; i < label.n(); ++i) {
    for (Index j = i; j < label.n(); ++j) {
      const bool b = label.is_b(i, j);
      if (b != current) {
        runs.push_back(len);
        current = b;
        len = 0;
      }
      ++len;
    }
  }
  runs.push_back(len);
  return {{"n", label.n()}, {"eps", label.eps()}, {"runs", runs}};
}

ABLabel label_from_json(const json& j) {
  const Index n = j.at("n").get<Index>();
  ABLabel label(n, j.at("eps").get<double>());
  const auto runs = j.at("runs").get<std::vector<Index>>();
  Index consumed = 0;
  const Index total = n * (n + 1) / 2;
  bool b = false;
  Index i = 0, jj = 0;
  for (Index len : runs) {
    for (Index k = 0; k < len; ++k) {
      require(i < n, ErrorCode::io, "label runs exceed the upper triangle");
      label.set(i, jj, b);
      if (++jj == n) {
        ++i;
        jj = i;
      }
    }
    consumed += len;
    b = !b;
  }
  require(consumed == total, ErrorCode::io, "label runs do not cover the upper triangle");
  return label;
}

json to_json(const IndexClassification& c) { return {{"deviant", c.deviant}, {"components", c.components}}; }

json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

json to_json(const ResolventFrame& f, const std::vector<std::pair<Index, Index>>& entries, Index full_limit) {
  json diag = json::array();
  for (Eigen::Index k = 0; k < f.g.rows(); ++k) diag.push_back(to_json(f.g(k, k)));
  json j{{"z", to_json(f.z)}, {"m_n", to_json(f.m_n)}, {"m_sc", to_json(f.m_sc)}, {"diag", diag},
         {"indices", f.indices}};
  json picked = json::array();
  for (auto [a, b] : entries) {
    require(a < f.size() && b < f.size(), ErrorCode::invalid_argument, "entry out of range");
    picked.push_back({{"i", a}, {"j", b}, {"g", to_json(f.g(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)))}});
  }
  j["entries"] = picked;
  if (full_limit > 0 && f.size() <= full_limit) {
    j["g_real"] = encode_matrix(f.g.real());
    j["g_imag"] = encode_matrix(f.g.imag());
  }
  return j;
}

std::string canonical(const json& j) { return j.dump(); }

std::string write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::io, "cannot open " + path.string() + " for writing");
  out << text;
  require(static_cast<bool>(out), ErrorCode::io, "failed writing " + path.string());
  return sha256_hex(text);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

Csv::Csv(std::vector<std::string> header) : cols_(header.size()) {
  for (std::size_t k = 0; k < header.size(); ++k) body_ += (k ? "," : "") + header[k];
  body_ += "\n";
}

Csv& Csv::row() {
  if (rows_ > 0) {
    require(in_row_ == cols_, ErrorCode::io, "csv row has the wrong number of fields");
    body_ += "\n";
  }
  ++rows_;
  in_row_ = 0;
  return *this;
}

Csv& Csv::add(const std::string& v) {
  body_ += (in_row_ ? "," : "") + v;
  ++in_row_;
  return *this;
}

Csv& Csv::add(double v) { return add(format_number(v)); }
Csv& Csv::add(Index v) { return add(std::to_string(v)); }

std::string Csv::str() const {
  if (rows_ == 0) return body_;
  require(in_row_ == cols_, ErrorCode::io, "csv row has the wrong number of fields");
  return body_ + "\n";
}

}  // namespace rmt::io
