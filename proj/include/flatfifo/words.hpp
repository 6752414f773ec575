#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "flatfifo/common.hpp"
#include "flatfifo/model.hpp"

namespace flatfifo {

// Witness for x^omega = w.y^omega: x = x'x'', x''x' = z^j, y = z^k, w = x^s.x'.
struct Decomposition {
  Word x_prime;
  Word x_dprime;
  Word z;
  int j = 0;
  int k = 0;
  std::optional<int> s;
  bool operator==(const Decomposition&) const = default;
};

struct PeriodicContent {
  Word base;
  Word period;
  int stride = 0;  // period = z^stride
  bool operator==(const PeriodicContent&) const = default;
};

bool is_primitive(const Word& w);
std::pair<Word, int> primitive_root(const Word& w);
Word power(const Word& w, long n);

std::optional<Decomposition> omega_prefix_eq(const Word& x, const Word& w, const Word& y);
// All splits x = x'x'' with root(x''x') = root(y); independent of w.
std::vector<Decomposition> candidate_splits(const Word& x, const Word& y);
// Recomputes every algebraic claim of a witness.
bool verify_decomposition(const Word& x, const Word& w, const Word& y, const Decomposition& d);

// (retrieved, sent) letters of a loop on one channel, in firing order.
std::pair<Word, Word> loop_projection(const FifoMachine& m, const ElementaryLoop& l, int c);
// |x| - |y| per channel.
std::vector<int> loop_effect(const FifoMachine& m, const ElementaryLoop& l);
// |y| - |x| per channel (sent minus retrieved).
std::vector<int> loop_growth(const FifoMachine& m, const ElementaryLoop& l);

std::optional<Config> fire_sequence(const FifoMachine& m, Config c, const std::vector<int>& seq);

struct Iterability {
  bool iterable = false;
  std::vector<std::optional<Decomposition>> witnesses;  // per channel, set when x_c != eps
};
Iterability infinitely_iterable(const FifoMachine& m, const ElementaryLoop& l, const Config& cfg);
std::vector<PeriodicContent> accelerate_contents(const FifoMachine& m, const ElementaryLoop& l, const Config& cfg);

bool cyclic(const FifoMachine& m, const Config& cfg);

}  // namespace flatfifo
