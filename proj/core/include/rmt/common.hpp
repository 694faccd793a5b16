#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rmt {

using Complex = std::complex<double>;
using Index = std::size_t;
using Seed = std::uint64_t;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

enum class ErrorCode {
  invalid_argument,
  profile_construction,
  constraint_violation,
  moment_assumption,
  resampling_unsupported,
  degenerate_conditioning,
  dimension_mismatch,
  undefined_threshold,
  singular_solve,
  singular_stability,
  convergence,
  empty_domain,
  insufficient_replicas,
  preflight_violation,
  stream_collision,
  invalid_config,
  io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace rmt
