#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "flatfifo/model.hpp"

// In-place machine extension used by the reductions; callers re-index when done.
namespace flatfifo::detail {

inline std::string fresh_name(const std::vector<std::string>& used, const std::string& base) {
  std::string s = base;
  for (int k = 1; std::find(used.begin(), used.end(), s) != used.end(); ++k) s = base + "_" + std::to_string(k);
  return s;
}

inline int add_state(FifoMachine& m, const std::string& base) {
  m.states.push_back(fresh_name(m.states, base));
  return (int)m.states.size() - 1;
}

inline int add_transition(FifoMachine& m, const std::string& base, int src, int dst, Action a) {
  std::vector<std::string> ids;
  for (const auto& t : m.transitions) ids.push_back(t.id);
  m.transitions.push_back({fresh_name(ids, base), src, dst, a});
  return (int)m.transitions.size() - 1;
}

inline int add_letter(FifoMachine& m, int channel, const std::string& base) {
  m.letters.push_back(fresh_name(m.letters, base));
  m.letter_channel.push_back(channel);
  return (int)m.letters.size() - 1;
}

inline int add_channel(FifoMachine& m, const std::string& base) {
  m.channels.push_back(fresh_name(m.channels, base));
  return (int)m.channels.size() - 1;
}

}  // namespace flatfifo::detail
