#include "sparseatt/parallel.hpp"

#include <cstdlib>
#include <string>

namespace sparseatt {

std::size_t configured_thread_count() {
  static const std::size_t cached = [] {
    const char* env = std::getenv("SPARSEATT_THREADS");
    if (env == nullptr || *env == '\0') return std::size_t{1};
    char* end = nullptr;
    long parsed = std::strtol(env, &end, 10);
    if (end == env || parsed < 1) return std::size_t{1};
    if (parsed > 64) return std::size_t{64};
    return static_cast<std::size_t>(parsed);
  }();
  return cached;
}

}  // namespace sparseatt
