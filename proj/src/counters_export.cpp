#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "flatfifo/counters.hpp"

namespace flatfifo {

namespace {

using nlohmann::json;

json guard_to_json(const Guard& g, const std::vector<std::string>& names) {
  using K = Guard::Kind;
  switch (g.kind) {
    case K::True: return true;
    case K::False: return false;
    case K::Zero: return json{{"zero", names[g.counter]}};
    case K::Pos: return json{{"pos", names[g.counter]}};
    default: break;
  }
  json kids = json::array();
  for (const auto& k : g.kids) kids.push_back(guard_to_json(k, names));
  return json{{g.kind == K::And ? "and" : "or", kids}};
}

Guard guard_from_json(const json& j, const std::map<std::string, int>& ix) {
  if (j.is_boolean()) return j.get<bool>() ? Guard::truth() : Guard::falsity();
  auto counter = [&](const json& n) {
    auto it = ix.find(n.get<std::string>());
    if (it == ix.end()) throw ValidationError("unknown counter " + n.get<std::string>());
    return it->second;
  };
  if (j.contains("zero")) return Guard::zero(counter(j["zero"]));
  if (j.contains("pos")) return Guard::pos(counter(j["pos"]));
  bool conj = j.contains("and");
  std::vector<Guard> ks;
  for (const auto& k : j[conj ? "and" : "or"]) ks.push_back(guard_from_json(k, ix));
  Guard g{conj ? Guard::Kind::And : Guard::Kind::Or, -1, std::move(ks)};
  return g;
}

// Identifier for the textual format: letters, digits and underscores, made unique.
class Idents {
 public:
  std::string operator()(const std::string& raw) {
    auto it = map_.find(raw);
    if (it != map_.end()) return it->second;
    return map_[raw] = fresh(raw);
  }

  // A new identifier even when the raw name was seen before.
  std::string fresh(const std::string& raw) {
    std::string s;
    for (char ch : raw) {
      if (std::isalnum((unsigned char)ch))
        s += ch;
      else if (!s.empty() && s.back() != '_')
        s += '_';
    }
    while (!s.empty() && s.back() == '_') s.pop_back();
    if (s.empty() || std::isdigit((unsigned char)s[0])) s = "x_" + s;
    std::string u = s;
    for (int i = 2; used_.count(u); ++i) u = s + "_" + std::to_string(i);
    used_.insert(u);
    return u;
  }

 private:
  std::map<std::string, std::string> map_;
  std::set<std::string> used_;
};

std::string fast_guard(const Guard& g, const std::vector<std::string>& ids) {
  using K = Guard::Kind;
  switch (g.kind) {
    case K::True: return "true";
    case K::False: return "false";
    case K::Zero: return ids[g.counter] + "=0";
    case K::Pos: return ids[g.counter] + ">0";
    default: break;
  }
  std::string sep = g.kind == K::And ? " && " : " || ";
  std::string s;
  for (size_t i = 0; i < g.kids.size(); ++i) {
    const auto& k = g.kids[i];
    bool paren = k.kind == K::And || k.kind == K::Or;
    s += (i ? sep : "") + (paren ? "(" + fast_guard(k, ids) + ")" : fast_guard(k, ids));
  }
  return s;
}

std::string fast_text(const CounterMachine& cm) {
  std::ostringstream o;
  o << "// flatfifo counter system: " << cm.states.size() << " states, " << cm.counters.size() << " counters, "
    << cm.transitions.size() << " transitions\n";
  if (cm.states.empty()) return o.str();
  Idents cid, sid, tid;
  std::vector<std::string> cs, ss;
  for (const auto& c : cm.counters) cs.push_back(cid(c));
  for (const auto& s : cm.states) ss.push_back(sid(s));
  for (size_t i = 0; i < cs.size(); ++i) o << "// counter " << cs[i] << " = " << cm.counters[i] << "\n";
  for (size_t i = 0; i < ss.size(); ++i) o << "// state " << ss[i] << " = " << cm.states[i] << "\n";
  o << "model flatfifo {\n";
  o << "  var ";
  for (size_t i = 0; i < cs.size(); ++i) o << (i ? ", " : "") << cs[i];
  o << ";\n  states ";
  for (size_t i = 0; i < ss.size(); ++i) o << (i ? ", " : "") << ss[i];
  o << ";\n";
  for (const auto& t : cm.transitions) {
    // closure can give several edges the same id
    o << "  transition " << tid.fresh(t.id) << " := {\n";
    o << "    from := " << ss[t.source] << ";\n";
    o << "    to := " << ss[t.target] << ";\n";
    o << "    guard := " << fast_guard(t.guard, cs) << ";\n";
    o << "    action := ";
    if (t.update.empty()) o << "skip";
    for (size_t i = 0; i < t.update.size(); ++i) {
      auto [k, d] = t.update[i];
      o << (i ? ", " : "") << cs[k] << "' = " << cs[k] << (d > 0 ? " + " : " - ") << (d > 0 ? d : -d);
    }
    o << ";\n  };\n";
  }
  o << "}\n";
  o << "strategy flatfifo_init {\n  Region init := {state = " << ss[cm.initial];
  for (const auto& c : cs) o << " && " << c << " = 0";
  o << "};\n}\n";
  return o.str();
}

}  // namespace

json counter_machine_to_json(const CounterMachine& cm) {
  json ts = json::array();
  for (const auto& t : cm.transitions) {
    json up = json::object();
    for (auto [k, d] : t.update) up[cm.counters[k]] = d;
    ts.push_back({{"id", t.id},
                  {"from", cm.states[t.source]},
                  {"to", cm.states[t.target]},
                  {"guard", guard_to_json(t.guard, cm.counters)},
                  {"guard_text", guard_text(t.guard, cm.counters)},
                  {"update", up},
                  {"psi", t.psi < 0 ? json(nullptr) : json(cm.counters[t.psi])},
                  {"T", t.fifo}});
  }
  return {{"states", cm.states},
          {"counters", cm.counters},
          {"initial", cm.states.empty() ? json(nullptr) : json(cm.states[cm.initial])},
          {"transitions", ts}};
}

CounterMachine counter_machine_from_json(const json& j) {
  CounterMachine cm;
  cm.states = j.at("states").get<std::vector<std::string>>();
  cm.counters = j.at("counters").get<std::vector<std::string>>();
  std::map<std::string, int> cix;
  for (size_t i = 0; i < cm.counters.size(); ++i) cix[cm.counters[i]] = (int)i;
  if (!j.at("initial").is_null()) cm.initial = cm.state_index(j["initial"].get<std::string>());
  for (const auto& t : j.at("transitions")) {
    CounterTransition ct;
    ct.id = t.at("id").get<std::string>();
    ct.source = cm.state_index(t.at("from").get<std::string>());
    ct.target = cm.state_index(t.at("to").get<std::string>());
    ct.guard = guard_from_json(t.at("guard"), cix);
    for (auto& [k, d] : t.at("update").items()) ct.update.push_back({cix.at(k), d.get<int>()});
    std::sort(ct.update.begin(), ct.update.end());
    ct.psi = t.at("psi").is_null() ? -1 : cix.at(t["psi"].get<std::string>());
    ct.fifo = t.at("T").get<int>();
    cm.transitions.push_back(ct);
  }
  cm.index();
  return cm;
}

json sync_to_json(const SyncSystem& sys) {
  json orders = json::array();
  for (const auto& o : sys.orders) orders.push_back(counter_machine_to_json(o));
  json fifo_ids = json::array();
  for (const auto& t : sys.fifo.transitions) fifo_ids.push_back(t.id);
  return {{"modified", sys.modified},
          {"fifo_transitions", fifo_ids},
          {"count", counter_machine_to_json(sys.count)},
          {"orders", orders},
          {"renames", sys.renames},
          {"product", counter_machine_to_json(sys.product)}};
}

std::string export_counter_machine(const CounterMachine& cm, const std::string& format) {
  if (format == "json") return counter_machine_to_json(cm).dump(2) + "\n";
  if (format == "fast") return fast_text(cm);
  throw UnknownFormat(format);
}

std::string export_counter_system(const SyncSystem& sys, const std::string& format) {
  if (format == "json") return sync_to_json(sys).dump(2) + "\n";
  if (format == "fast") return fast_text(sys.product);
  throw UnknownFormat(format);
}

std::string export_flattening(const FlatteningMap& fm, const std::string& format) {
  if (format == "json") {
    json j = {{"flat", counter_machine_to_json(fm.flat)}, {"f", fm.f}, {"edge_map", fm.edge_map}};
    return j.dump(2) + "\n";
  }
  if (format == "fast") return fast_text(fm.flat);
  throw UnknownFormat(format);
}

}  // namespace flatfifo
