#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace flatfifo {

// Letters are indices into a machine's letter table. Word-level code that does
// not need a machine (primitive roots, omega equations) works on any char32_t.
using Letter = char32_t;
using Word = std::u32string;

Word word_of(const std::string& ascii);
std::string ascii_of(const Word& w);

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  int line;
  int col;
  ParseError(int line, int col, const std::string& msg);
};

struct ValidationError : Error {
  std::string rule;
  explicit ValidationError(const std::string& rule);
};

struct AlphabetClash : Error {
  explicit AlphabetClash(const std::string& msg) : Error("alphabet clash: " + msg) {}
};

struct NotFlat : Error {
  int vertex;
  explicit NotFlat(int v) : Error("machine is not flat (vertex " + std::to_string(v) + ")"), vertex(v) {}
};

struct EmptyWord : Error {
  EmptyWord() : Error("empty word") {}
};

struct NotIterable : Error {
  NotIterable() : Error("loop is not infinitely iterable from this configuration") {}
};

struct AccelerationBudgetExceeded : Error {
  int budget;
  explicit AccelerationBudgetExceeded(int b)
      : Error("acceleration did not stabilize within " + std::to_string(b) + " unrollings"), budget(b) {}
};

struct UnionCapExceeded : Error {
  std::size_t cap;
  explicit UnionCapExceeded(std::size_t c)
      : Error("symbolic union exceeded " + std::to_string(c) + " configurations"), cap(c) {}
};

struct SolverBudgetExceeded : Error {
  explicit SolverBudgetExceeded(const std::string& m) : Error("integer solver: " + m) {}
};

struct DimensionMismatch : Error {
  DimensionMismatch() : Error("dimension mismatch") {}
};

struct FixpointBudgetExceeded : Error {
  int budget;
  explicit FixpointBudgetExceeded(int b)
      : Error("lossy fixpoint not reached within " + std::to_string(b) + " rounds"), budget(b) {}
};

struct NonEmptyInit : Error {
  NonEmptyInit() : Error("initial configuration has non-empty channels") {}
};

struct NoLoopAt : Error {
  explicit NoLoopAt(const std::string& q) : Error("no loop at state " + q) {}
};

struct BadWitness : Error {
  explicit BadWitness(const std::string& m) : Error("bad witness: " + m) {}
};

struct BudgetExceeded : Error {
  std::size_t size;
  explicit BudgetExceeded(std::size_t s)
      : Error("budget exceeded at " + std::to_string(s) + " states"), size(s) {}
};

struct UnknownFormat : Error {
  explicit UnknownFormat(const std::string& f) : Error("unknown format: " + f) {}
};

enum class Tri { Yes, No, Unknown };
const char* to_string(Tri t);

}  // namespace flatfifo
