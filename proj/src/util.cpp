#include "kernelskel/util.hpp"

#include <algorithm>

namespace kernelskel {

namespace {
int g_num_threads = 1;
}

int num_threads() { return g_num_threads; }

void set_num_threads(int n) { g_num_threads = std::max(1, n); }

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace kernelskel
