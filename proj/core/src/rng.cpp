#include "rmt/rng.hpp"

#include <boost/random/normal_distribution.hpp>

namespace rmt {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::profile_construction: return "profile construction error";
    case ErrorCode::constraint_violation: return "constraint violation";
    case ErrorCode::moment_assumption: return "moment assumption error";
    case ErrorCode::resampling_unsupported: return "resampling unsupported";
    case ErrorCode::degenerate_conditioning: return "degenerate conditioning";
    case ErrorCode::dimension_mismatch: return "dimension mismatch";
    case ErrorCode::undefined_threshold: return "undefined threshold";
    case ErrorCode::singular_solve: return "singular solve";
    case ErrorCode::singular_stability: return "singular stability operator";
    case ErrorCode::convergence: return "convergence failure";
    case ErrorCode::empty_domain: return "empty spectral domain";
    case ErrorCode::insufficient_replicas: return "insufficient replicas";
    case ErrorCode::preflight_violation: return "preflight moment violation";
    case ErrorCode::stream_collision: return "stream collision";
    case ErrorCode::invalid_config: return "invalid config";
    case ErrorCode::io: return "i/o error";
  }
  return "error";
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

Seed derive_seed(Seed parent, std::uint64_t tag, std::uint64_t index) noexcept {
  return mix64(mix64(parent ^ 0x243f6a8885a308d3ULL) ^ mix64(tag * 0x9e3779b97f4a7c15ULL + index));
}

Stream::Stream(Seed seed, std::uint64_t tag, std::uint64_t i, std::uint64_t j) noexcept {
  std::uint64_t k = mix64(seed + 0x6a09e667f3bcc909ULL);
  k = mix64(k ^ (tag * 0xbb67ae8584caa73bULL));
  k = mix64(k ^ (i * 0x3c6ef372fe94f82bULL + 0xa54ff53a5f1d36f1ULL));
  k = mix64(k ^ (j * 0x510e527fade682d1ULL + 0x9b05688c2b3e6c1fULL));
  state_ = k;
}

double Stream::normal() noexcept {
  boost::random::normal_distribution<double> dist;
  return dist(*this);
}

}  // namespace rmt
