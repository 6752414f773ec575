#include "flatfifo/common.hpp"

namespace flatfifo {

Word word_of(const std::string& ascii) {
  Word w;
  for (unsigned char ch : ascii) w.push_back(static_cast<Letter>(ch));
  return w;
}

std::string ascii_of(const Word& w) {
  std::string s;
  for (Letter l : w) s.push_back(static_cast<char>(l));
  return s;
}

ParseError::ParseError(int l, int c, const std::string& msg)
    : Error("parse error at " + std::to_string(l) + ":" + std::to_string(c) + ": " + msg), line(l), col(c) {}

ValidationError::ValidationError(const std::string& r) : Error("validation failed: " + r), rule(r) {}

const char* to_string(Tri t) {
  switch (t) {
    case Tri::Yes: return "yes";
    case Tri::No: return "no";
    default: return "unknown";
  }
}

}  // namespace flatfifo
