#include "phaseless/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace phaseless {

int thread_count() {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (char const* env = std::getenv("PHASELESS_THREADS")) {
    try {
      int const cap = std::stoi(env);
      if (cap >= 1) n = std::min(n, cap);
    } catch (...) {
      // ignore malformed values
    }
  }
  return n;
}

}  // namespace phaseless
