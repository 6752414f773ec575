#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "flatfifo/model.hpp"
#include "flatfifo/symbolic.hpp"
#include "flatfifo/words.hpp"

namespace flatfifo {

// Clauses hold signed variable indices 1..n.
struct Cnf {
  int n = 0;
  std::vector<std::vector<int>> clauses;
  bool operator==(const Cnf&) const = default;
};

void validate_cnf(const Cnf& f);
Cnf parse_dimacs(const std::string& text);
std::string cnf_to_dimacs(const Cnf& f);

// Appends c!#, c?w(c), c?# per channel after the target state; q_stop ends the path.
struct CsrReduction {
  FifoMachine machine;
  int stop = 0;
};
CsrReduction reach_to_csr(const FifoMachine& m, const Config& target);

// Draining self loops at q, one per channel letter; the result is flagged when it is not flat.
struct ReachReduction {
  FifoMachine machine;
  Config target;
  bool flat = true;
};
ReachReduction csr_to_reach(const FifoMachine& m, int q);

enum class Sat3Variant { Reach, Unbounded, NonTerm, RepeatedCSR };
const char* to_string(Sat3Variant v);
Sat3Variant sat3_variant_from_string(const std::string& s);

// Variable gadgets guess a bit per channel, clause gadgets read and rewrite one satisfied literal, cleanup
// gadgets empty the channels. Variants other than Reach add a self loop x1!1 at the last state.
struct Sat3Instance {
  FifoMachine machine;
  Sat3Variant variant = Sat3Variant::Reach;
  int last = 0;   // last cleanup state
  Config target;  // (last, empty channels)
};
Sat3Instance sat3_to_flat_fifo(const Cnf& f, Sat3Variant variant);
// Runs the decision procedure the variant's query asks for.
bool decide_sat3(const Sat3Instance& inst, int budget = kDefaultAccelerationBudget);

// Witness-driven gadget: per channel with x != eps it checks w(c) in x*x' while copying w(c) to c__p, then fires
// the loop on the primed channels into q_f. Channels with x = eps are skipped.
struct RcsrGadget {
  FifoMachine machine;
  int final_state = 0;
};
RcsrGadget rcsr_gadget(const FifoMachine& m, int q, const std::vector<std::optional<Decomposition>>& witnesses);
// Every witness vector rcsr_gadget accepts for the loop at q, from candidate_splits per channel.
std::vector<std::vector<std::optional<Decomposition>>> rcsr_witness_choices(const FifoMachine& m, int q);

struct CorpusParams {
  int count = 100;
  int max_states = 8;
  int max_loops = 3;
  int max_channels = 2;
  int alphabet = 3;
};

struct CorpusEntry {
  std::string name;
  FifoMachine machine;
  nlohmann::json annotations;  // explorer verdicts: "yes", "no" or "unknown"
  bool conclusive = false;     // every verdict is yes or no
};

// Deterministic in the seed; machines are flat and respect every bound of the parameters.
std::vector<CorpusEntry> gen_corpus(std::uint64_t seed, const CorpusParams& p = {});

}  // namespace flatfifo
