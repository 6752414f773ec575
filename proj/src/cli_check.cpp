#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "cli_internal.hpp"
#include "flatfifo/lossy.hpp"
#include "flatfifo/symbolic.hpp"
#include "flatfifo/words.hpp"

namespace flatfifo {

using nlohmann::json;

namespace {
const std::vector<std::pair<QueryKind, const char*>> kQueryNames = {
    {QueryKind::Reach, "reach"},       {QueryKind::Csr, "csr"},
    {QueryKind::RepeatedCsr, "repeated-csr"}, {QueryKind::Cyclic, "cyclic"},
    {QueryKind::Terminate, "terminate"}, {QueryKind::Bounded, "bounded"},
    {QueryKind::ChannelBounded, "channel-bounded"}, {QueryKind::LetterBounded, "letter-bounded"},
};
}  // namespace

const char* to_string(QueryKind k) {
  for (const auto& [q, n] : kQueryNames)
    if (q == k) return n;
  return "?";
}

QueryKind query_kind_from_string(const std::string& s) {
  for (const auto& [q, n] : kQueryNames)
    if (s == n) return q;
  throw ValidationError("unknown query '" + s + "'");
}

Query resolve_query(const FifoMachine& m, const QueryText& t) {
  if (t.tokens.empty()) throw ValidationError("missing query");
  Query q;
  q.kind = query_kind_from_string(t.tokens[0]);
  std::vector<std::string> args(t.tokens.begin() + 1, t.tokens.end());
  // positional arguments first, then the named options
  auto take = [&](const std::optional<std::string>& named, const char* what) -> std::string {
    if (named) return *named;
    if (args.empty()) throw ValidationError(std::string("query ") + to_string(q.kind) + " needs " + what);
    std::string v = args.front();
    args.erase(args.begin());
    return v;
  };
  auto state = [&](const std::string& s) {
    int i = m.state_index(s);
    if (i < 0) throw ValidationError("unknown state '" + s + "'");
    return i;
  };
  auto channel = [&](const std::string& s) {
    int i = m.channel_index(s);
    if (i < 0) throw ValidationError("unknown channel '" + s + "'");
    return i;
  };
  switch (q.kind) {
    case QueryKind::Reach: q.config = parse_config(m, take(t.target, "a target configuration")); break;
    case QueryKind::Cyclic:
      if (t.target || !args.empty()) q.config = parse_config(m, take(t.target, "a configuration"));
      else q.config = m.initial_config();
      break;
    case QueryKind::Csr:
    case QueryKind::RepeatedCsr: q.state = state(take(t.state, "a state")); break;
    case QueryKind::Terminate:
    case QueryKind::Bounded: break;
    case QueryKind::ChannelBounded: q.channel = channel(take(t.channel, "a channel")); break;
    case QueryKind::LetterBounded: {
      q.channel = channel(take(t.channel, "a channel"));
      std::string a = take(t.letter, "a letter");
      Word w = parse_word(m, q.channel, a);
      if (w.size() != 1) throw ValidationError("'" + a + "' is not a single letter");
      q.letter = static_cast<int>(w[0]);
      break;
    }
  }
  if (!args.empty()) throw ValidationError("unexpected query argument '" + args.front() + "'");
  return q;
}

FifoMachine load_machine(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  std::string text = ss.str();
  auto first = text.find_first_not_of(" \t\r\n");
  bool is_json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  if (is_json || (first != std::string::npos && text[first] == '{')) {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(1, (int)e.byte, e.what());
    }
    return machine_from_json(j);
  }
  return parse_machine(text);
}

namespace cli {

void log(int level, const std::string& msg) {
  static const int threshold = [] {
    const char* v = std::getenv("FLATFIFO_LOG");
    if (!v) return 0;
    std::string s = v;
    if (s == "debug" || s == "2") return 2;
    if (s == "info" || s == "1") return 1;
    return 0;
  }();
  if (level <= threshold) std::cerr << "[flatfifo] " << msg << "\n";
}

bool is_budget_error(const std::exception& e) {
  return dynamic_cast<const AccelerationBudgetExceeded*>(&e) || dynamic_cast<const UnionCapExceeded*>(&e) ||
         dynamic_cast<const SolverBudgetExceeded*>(&e) || dynamic_cast<const FixpointBudgetExceeded*>(&e) ||
         dynamic_cast<const BudgetExceeded*>(&e);
}

Report error_report(const std::exception& e) {
  if (is_budget_error(e)) return {kExitInconclusive, {{"answer", "unknown"}, {"reason", e.what()}}};
  return {kExitInputError, {{"error", e.what()}}};
}

Report verdict(bool holds) {
  return {holds ? kExitHolds : kExitFails, {{"answer", holds ? "yes" : "no"}}};
}

json run_json(const FifoMachine& m, const std::vector<int>& run) {
  json j = json::array();
  for (int t : run) j.push_back(m.transitions[t].id);
  return j;
}

std::vector<int> loop_anchors(const FifoMachine& m) {
  std::vector<int> out;
  std::set<int> covered;
  for (int q = 0; q < (int)m.states.size(); ++q) {
    if (covered.count(q)) continue;
    auto l = loop_of(m, q);
    if (!l) continue;
    out.push_back(q);
    for (int t : l->body) covered.insert(m.transitions[t].source);
  }
  return out;
}

std::optional<json> family_witness(const FifoMachine& m, SymbolicEngine& e, const SymbolicConfig& s) {
  for (Int bound : {0, 2, 4}) {
    for (const auto& c : enumerate_members(s, bound)) {
      auto v = e.member(s, c);
      if (!v) continue;
      auto run = concretize_trace(s.trace, *v);
      auto end = fire_sequence(m, m.initial_config(), run);
      if (!end || *end != c) continue;
      return json{{"run", run_json(m, run)}, {"config", render_config(m, c)}};
    }
  }
  return std::nullopt;
}

std::optional<json> unbounded_letter(const FifoMachine& m, const ReachMap& r, const Query& q) {
  for (int c = 0; c < (int)m.channels.size(); ++c) {
    if (q.channel >= 0 && c != q.channel) continue;
    for (int a : m.channel_letters(c)) {
      if (q.letter >= 0 && a != q.letter) continue;
      if (letter_unbounded_on(r, c, static_cast<Letter>(a)))
        return json{{"channel", m.channels[c]}, {"letter", m.letters[a]}};
    }
  }
  return std::nullopt;
}

}  // namespace cli

namespace {

using namespace cli;

std::size_t family_count(const ReachMap& r) {
  std::size_t n = 0;
  for (const auto& [q, v] : r) n += v.size();
  return n;
}

Report check_perfect(const FifoMachine& m, const Query& q, const Budgets& b) {
  auto fr = is_flat(m);
  if (!fr.flat) throw NotFlat(fr.vertex);
  Config init = m.initial_config();
  SymbolicEngine e(m, b.acceleration);
  Report rep;
  json stats = json::object();
  switch (q.kind) {
    case QueryKind::Reach: {
      ReachWitness w;
      bool yes = decide_reachability(m, init, *q.config, b.acceleration, &w);
      rep = verdict(yes);
      if (yes) {
        json sk = json::array();
        for (const auto& [seq, times] : w.skeleton) sk.push_back({{"seq", run_json(m, seq)}, {"times", times}});
        rep.body["witness"] = {{"run", run_json(m, w.run)}, {"skeleton", sk}};
      }
      break;
    }
    case QueryKind::Csr: {
      auto r = e.reach_set(init, std::set<int>{q.state});
      auto it = r.find(q.state);
      bool yes = it != r.end() && !it->second.empty();
      rep = verdict(yes);
      if (yes)
        for (const auto& s : it->second)
          if (auto w = family_witness(m, e, s)) {
            rep.body["witness"] = *w;
            break;
          }
      stats["families"] = family_count(r);
      break;
    }
    case QueryKind::RepeatedCsr: {
      e.set_traces(false);
      auto r = e.reach_set(init, std::set<int>{q.state});
      rep = verdict(repeated_csr_on(e, m, r, q.state));
      stats["families"] = family_count(r);
      break;
    }
    case QueryKind::Cyclic: rep = verdict(cyclic(m, *q.config)); break;
    case QueryKind::Terminate: {
      e.set_traces(false);
      auto anchors = loop_anchors(m);
      auto r = e.reach_set(init, std::set<int>(anchors.begin(), anchors.end()));
      std::optional<int> loop;
      for (int a : anchors)
        if (!loop && repeated_csr_on(e, m, r, a)) loop = a;
      rep = verdict(!loop);
      if (loop) rep.body["witness"] = {{"loop_at", m.states[*loop]}};
      stats["families"] = family_count(r);
      break;
    }
    case QueryKind::Bounded:
    case QueryKind::ChannelBounded:
    case QueryKind::LetterBounded: {
      e.set_traces(false);
      auto r = e.reach_set(init);
      auto w = unbounded_letter(m, r, q);
      rep = verdict(!w);
      if (w) rep.body["witness"] = *w;
      stats["families"] = family_count(r);
      break;
    }
  }
  rep.body["stats"] = stats;
  return rep;
}

Report check_lossy(const FifoMachine& m, const Query& q, const Budgets& b) {
  Config init = m.initial_config();
  if (q.kind == QueryKind::Reach) return verdict(lossy_reachable(m, init, *q.config, b.fixpoint));
  if (q.kind == QueryKind::Csr) {
    auto r = lossy_reach_ideals(m, init, b.fixpoint);
    auto it = r.find(q.state);
    return verdict(it != r.end() && !it->second.empty());
  }
  throw ValidationError(std::string("query ") + to_string(q.kind) + " is not supported under lossy semantics");
}

Report check_frontlossy(const FifoMachine& m, const Query& q, const Budgets& b) {
  if (q.kind != QueryKind::Csr)
    throw ValidationError(std::string("query ") + to_string(q.kind) + " is not supported under front-lossy semantics");
  HpdaStats st;
  Tri t = decide_frontlossy_csr(m, m.initial_config(), q.state, b.tape, &st);
  Report rep = t == Tri::Yes ? verdict(true) : Report{kExitInconclusive, {{"answer", "unknown"}}};
  if (t != Tri::Yes) rep.body["reason"] = "no accepted tape up to length " + std::to_string(b.tape);
  rep.body["stats"] = {{"ids", st.ids}};
  return rep;
}

}  // namespace

Report cmd_check(const FifoMachine& m, const Query& q, Semantics sem, const Budgets& b) {
  Report rep;
  try {
    switch (sem) {
      case Semantics::Perfect: rep = check_perfect(m, q, b); break;
      case Semantics::Lossy: rep = check_lossy(m, q, b); break;
      case Semantics::FrontLossy: rep = check_frontlossy(m, q, b); break;
    }
  } catch (const Error& e) {
    rep = error_report(e);
  }
  rep.body["query"] = to_string(q.kind);
  rep.body["semantics"] = to_string(sem);
  return rep;
}

}  // namespace flatfifo
