#include "rmt/parallel.hpp"

#include <cstdlib>
#include <string>

namespace rmt {

Index worker_count() {
  if (const char* env = std::getenv("RMT_WORKERS"); env != nullptr && *env != '\0') {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<Index>(v);
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::invalid_config, std::string("RMT_WORKERS must be a positive integer, got '") + env + "'");
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace rmt
