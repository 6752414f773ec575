#pragma once

#include <vector>

#include "flatfifo/counters.hpp"

namespace flatfifo::detail {

void require_flat(const FifoMachine& m);
std::vector<int> bfs_distance(const FifoMachine& m);
// Elementary loops, each anchored at its state closest to the initial state.
std::vector<ElementaryLoop> all_loops(const FifoMachine& m);
std::vector<std::vector<char>> reachability(const FifoMachine& m);
// c < 0 matches any channel.
bool sends_on(const FifoMachine& m, int t, int c);
std::vector<int> loop_counters(const FifoMachine& m, const CounterTable& tab, const ElementaryLoop& l, int c,
                               GuardScope scope);
Guard sum_zero(const std::vector<int>& ks);

}  // namespace flatfifo::detail
