#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "flatfifo/model.hpp"

namespace flatfifo {

// Exit codes of every subcommand.
constexpr int kExitHolds = 0;
constexpr int kExitFails = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitInputError = 3;

enum class QueryKind { Reach, Csr, RepeatedCsr, Cyclic, Terminate, Bounded, ChannelBounded, LetterBounded };
const char* to_string(QueryKind k);
QueryKind query_kind_from_string(const std::string& s);

// A query with its arguments resolved against one machine.
struct Query {
  QueryKind kind = QueryKind::Reach;
  std::optional<Config> config;  // reach target, or the cyclic start (default: initial)
  int state = -1;                // csr, repeated-csr
  int channel = -1;              // channel-bounded, letter-bounded
  int letter = -1;               // letter-bounded
};

// tokens = {name, args...} as in `letter-bounded c a`; --target/--state/--channel/--letter fill the rest.
struct QueryText {
  std::vector<std::string> tokens;
  std::optional<std::string> target, state, channel, letter;
};
Query resolve_query(const FifoMachine& m, const QueryText& q);

struct Budgets {
  int acceleration = 64;        // unrollings per loop
  int fixpoint = 1024;          // lossy rounds
  int tape = 12;                // front-lossy tape length
  std::size_t configs = 50000;  // explorer configs
  std::size_t channel_len = 20;
  std::size_t flatten = 50000;  // flattened states
  std::size_t submachines = 256;
};

struct Report {
  int exit_code = kExitHolds;
  nlohmann::json body;  // answer, witness, stats
};

// Loads DSL or JSON (by extension .json or a leading '{').
FifoMachine load_machine(const std::string& path);

Report cmd_check(const FifoMachine& m, const Query& q, Semantics sem, const Budgets& b);

// Sub-machines keep every state and the transitions of `keep` that are reachable from the initial state.
FifoMachine sub_machine(const FifoMachine& m, const std::vector<int>& keep);
// Maximal flat sub-machines in order of (fewest removed transitions, lexicographic removed indices), as kept
// transition indices after trimming. At most `limit` are returned; `complete` tells whether none were left out.
std::vector<std::vector<int>> maximal_flat_submachines(const FifoMachine& m, std::size_t limit,
                                                       bool* complete = nullptr);
// Semi-decision for machines that need not be flat, by stable flat sub-machines.
Report cmd_verify_general(const FifoMachine& m, const Query& q, const Budgets& b);

// Entry point of the executable; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flatfifo
