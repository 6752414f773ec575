#pragma once

// Random flat machines for property tests.

#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace generators {

// A spine s0 -> s1 -> ... with disjoint loops hung on spine states and forward shortcuts.
inline std::string random_flat(std::mt19937& rng, int channels) {
  std::uniform_int_distribution<int> spine(2, 4), coin(0, 2), loop_len(1, 3), kind(0, 4), ch(0, channels - 1),
      let(0, 1);
  std::ostringstream o;
  o << "channels";
  for (int c = 0; c < channels; ++c) o << " c" << c;
  o << "\n";
  for (int c = 0; c < channels; ++c) o << "alphabet c" << c << ": a" << c << " b" << c << "\n";
  int n = spine(rng);
  for (int i = 0; i < n; ++i) o << "state s" << i << (i == 0 ? " init" : "") << "\n";
  int tid = 0;
  auto action = [&]() {
    int k = kind(rng);
    if (k == 0) return std::string("tau");
    int c = ch(rng);
    std::string l = (let(rng) ? "a" : "b") + std::to_string(c);
    return "c" + std::to_string(c) + (k <= 2 ? "!" : "?") + l;
  };
  for (int i = 0; i + 1 < n; ++i) o << "trans t" << tid++ << " s" << i << " s" << i + 1 << " " << action() << "\n";
  for (int i = 0; i + 2 < n; ++i)
    if (coin(rng) == 0) o << "trans t" << tid++ << " s" << i << " s" << i + 2 << " " << action() << "\n";
  for (int i = 0; i < n; ++i) {
    if (coin(rng) == 0) continue;
    int len = loop_len(rng);
    std::string prev = "s" + std::to_string(i);
    for (int j = 1; j < len; ++j) {
      std::string mid = "l" + std::to_string(i) + "_" + std::to_string(j);
      o << "state " << mid << "\n";
      o << "trans t" << tid++ << " " << prev << " " << mid << " " << action() << "\n";
      prev = mid;
    }
    o << "trans t" << tid++ << " " << prev << " s" << i << " " << action() << "\n";
  }
  return o.str();
}

// Random 3-CNF over variables 1..n with m clauses of three literals.
inline std::vector<std::vector<int>> random_cnf(std::mt19937& rng, int n, int m) {
  std::vector<std::vector<int>> cs;
  for (int j = 0; j < m; ++j) {
    std::vector<int> c;
    for (int i = 0; i < 3; ++i) c.push_back((1 + (int)(rng() % n)) * (rng() % 2 ? 1 : -1));
    cs.push_back(c);
  }
  return cs;
}

}  // namespace generators
