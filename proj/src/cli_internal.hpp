#pragma once

#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "flatfifo/cli.hpp"
#include "flatfifo/symbolic.hpp"

namespace flatfifo::cli {

// Diagnostics on stderr when FLATFIFO_LOG (info or debug, or 1 or 2) is at least `level`.
void log(int level, const std::string& msg);

bool is_budget_error(const std::exception& e);
// Budget errors give exit 2, everything else exit 3.
Report error_report(const std::exception& e);
Report verdict(bool holds);
nlohmann::json run_json(const FifoMachine& m, const std::vector<int>& run);
// One representative state per cycle of a flat machine.
std::vector<int> loop_anchors(const FifoMachine& m);
// A small member of the family with a replayed run from the initial configuration.
std::optional<nlohmann::json> family_witness(const FifoMachine& m, SymbolicEngine& e, const SymbolicConfig& s);
// First letter (restricted by the query's channel/letter) whose count is unbounded in r.
std::optional<nlohmann::json> unbounded_letter(const FifoMachine& m, const ReachMap& r, const Query& q);

}  // namespace flatfifo::cli
