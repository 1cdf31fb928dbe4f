#include <algorithm>
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "tempering/error.hpp"
#include "tempering/hardness.hpp"

namespace tempering {

namespace {

// A configuration packs one 4-bit code per level, lowest level in the lowest
// nibble. Code 0 is any sample that started outside levels 0..L (they are
// interchangeable), code j in [1, L] the sample that started at level j, and
// code L+1 the tracked sample from level 0.
using Config = std::uint64_t;

constexpr int kMaxLevels = 16;
constexpr int kDefaultMaxPad = 4;

int code_at(Config c, int pos) { return static_cast<int>((c >> (4 * pos)) & 0xF); }

Config swap_adjacent(Config c, int pos) {
  const Config a = (c >> (4 * pos)) & 0xF;
  const Config b = (c >> (4 * (pos + 1))) & 0xF;
  c &= ~(Config{0xFF} << (4 * pos));
  return c | (b << (4 * pos)) | (a << (4 * (pos + 1)));
}

struct Layout {
  int L;
  int pad;
  int width;

  int window_divergence(Config c) const {
    int d = 0;
    for (int j = 1; j <= L; ++j) d += code_at(c, pad + j) != j;
    return d;
  }
};

bool reachable(const Layout& lay, Config start, int h, Index budget, Index& explored) {
  std::unordered_set<Config> seen{start};
  std::vector<Config> frontier{start};
  std::vector<Config> next;
  const int goal_pos = lay.pad + lay.L;
  const int tracked = lay.L + 1;
  while (!frontier.empty()) {
    next.clear();
    for (Config c : frontier) {
      if (code_at(c, goal_pos) == tracked) return true;
      for (int pos = 0; pos + 1 < lay.width; ++pos) {
        if (code_at(c, pos) == code_at(c, pos + 1)) continue;
        const Config d = swap_adjacent(c, pos);
        if (lay.window_divergence(d) > h) continue;
        if (seen.insert(d).second) {
          if (++explored > budget) {
            throw BudgetError("f-oracle search exceeded " + std::to_string(budget) + " states");
          }
          next.push_back(d);
        }
      }
    }
    frontier.swap(next);
  }
  return false;
}

}  // namespace

FOracleResult min_divergence_f(int L, int pad, Index budget) {
  require(L >= 1, "f is defined for L >= 1");
  require(L + 1 < kMaxLevels, "L too large for the level encoding");
  const int max_pad = (kMaxLevels - (L + 1)) / 2;
  if (pad < 0) pad = std::min(kDefaultMaxPad, max_pad);
  require(pad <= max_pad, "padding does not fit the level encoding");

  Layout lay{L, pad, L + 1 + 2 * pad};
  Config start = 0;
  start |= static_cast<Config>(L + 1) << (4 * pad);
  for (int j = 1; j <= L; ++j) start |= static_cast<Config>(j) << (4 * (pad + j));

  FOracleResult result{L, 0, pad, 0};
  for (int h = 1; h <= L; ++h) {
    if (reachable(lay, start, h, budget, result.states_explored)) {
      result.f = h;
      return result;
    }
  }
  throw ContractError("no path found even without a divergence cap");
}

}  // namespace tempering
