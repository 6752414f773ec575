#include "flatfifo/model.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <sstream>

namespace flatfifo {

using nlohmann::json;

const char* to_string(Semantics s) {
  switch (s) {
    case Semantics::Perfect: return "perfect";
    case Semantics::Lossy: return "lossy";
    default: return "front-lossy";
  }
}

Semantics semantics_from_string(const std::string& s) {
  if (s == "perfect") return Semantics::Perfect;
  if (s == "lossy") return Semantics::Lossy;
  if (s == "front-lossy" || s == "frontlossy") return Semantics::FrontLossy;
  throw UnknownFormat("semantics " + s);
}

// ---------------------------------------------------------------- FifoMachine

namespace {
int lookup(const std::map<std::string, int>& ix, const std::string& k) {
  auto it = ix.find(k);
  return it == ix.end() ? -1 : it->second;
}
}  // namespace

int FifoMachine::state_index(const std::string& n) const { return lookup(state_ix_, n); }
int FifoMachine::channel_index(const std::string& n) const { return lookup(chan_ix_, n); }
int FifoMachine::letter_index(const std::string& n) const { return lookup(letter_ix_, n); }
int FifoMachine::transition_index(const std::string& n) const { return lookup(trans_ix_, n); }

Config FifoMachine::initial_config() const {
  return Config{initial, std::vector<Word>(channels.size())};
}

void FifoMachine::index() {
  state_ix_.clear();
  chan_ix_.clear();
  letter_ix_.clear();
  trans_ix_.clear();
  for (int i = 0; i < (int)states.size(); ++i) state_ix_[states[i]] = i;
  for (int i = 0; i < (int)channels.size(); ++i) chan_ix_[channels[i]] = i;
  for (int i = 0; i < (int)letters.size(); ++i) letter_ix_[letters[i]] = i;
  for (int i = 0; i < (int)transitions.size(); ++i) trans_ix_[transitions[i].id] = i;
  out_.assign(states.size(), {});
  for (int i = 0; i < (int)transitions.size(); ++i) out_[transitions[i].source].push_back(i);
  chan_letters_.assign(channels.size(), {});
  for (int i = 0; i < (int)letters.size(); ++i) chan_letters_[letter_channel[i]].push_back(i);
}

bool FifoMachine::operator==(const FifoMachine& o) const {
  return states == o.states && channels == o.channels && letters == o.letters &&
         letter_channel == o.letter_channel && transitions == o.transitions && initial == o.initial;
}

// ---------------------------------------------------------------- builder

MachineBuilder& MachineBuilder::channel(const std::string& n) {
  channels_.push_back(n);
  return *this;
}
MachineBuilder& MachineBuilder::letter(const std::string& c, const std::string& n) {
  letters_.emplace_back(c, n);
  return *this;
}
MachineBuilder& MachineBuilder::state(const std::string& n, bool init) {
  states_.emplace_back(n, init);
  return *this;
}
MachineBuilder& MachineBuilder::send(const std::string& id, const std::string& s, const std::string& d,
                                     const std::string& c, const std::string& a) {
  trans_.push_back({id, s, d, c, a, ActionKind::Send});
  return *this;
}
MachineBuilder& MachineBuilder::retrieve(const std::string& id, const std::string& s, const std::string& d,
                                         const std::string& c, const std::string& a) {
  trans_.push_back({id, s, d, c, a, ActionKind::Retrieve});
  return *this;
}
MachineBuilder& MachineBuilder::internal(const std::string& id, const std::string& s, const std::string& d) {
  trans_.push_back({id, s, d, "", "", ActionKind::Internal});
  return *this;
}
MachineBuilder& MachineBuilder::rename_shared_letters(bool on) {
  rename_ = on;
  return *this;
}

FifoMachine MachineBuilder::build() const {
  FifoMachine m;
  std::set<std::string> seen;
  for (const auto& c : channels_) {
    if (!seen.insert(c).second) throw ValidationError("duplicate-channel " + c);
    m.channels.push_back(c);
  }
  auto chan = [&](const std::string& c) {
    auto it = std::find(m.channels.begin(), m.channels.end(), c);
    if (it == m.channels.end()) throw ValidationError("unknown-channel " + c);
    return int(it - m.channels.begin());
  };
  std::map<std::string, std::set<int>> owners;
  for (const auto& [c, a] : letters_) owners[a].insert(chan(c));
  // (channel, declared name) -> letter index
  std::map<std::pair<int, std::string>, int> lix;
  for (const auto& [c, a] : letters_) {
    int ci = chan(c);
    if (lix.count({ci, a})) continue;
    std::string name = a;
    if (owners[a].size() > 1) {
      if (!rename_) throw ValidationError("alphabet-partition " + a);
      name = a + "@" + c;
    }
    lix[{ci, a}] = (int)m.letters.size();
    m.letters.push_back(name);
    m.letter_channel.push_back(ci);
  }
  int inits = 0;
  seen.clear();
  for (int i = 0; i < (int)states_.size(); ++i) {
    if (!seen.insert(states_[i].first).second) throw ValidationError("duplicate-state " + states_[i].first);
    m.states.push_back(states_[i].first);
    if (states_[i].second) {
      m.initial = i;
      ++inits;
    }
  }
  if (m.states.empty()) throw ValidationError("no-states");
  if (inits == 0) throw ValidationError("no-initial-state");
  if (inits > 1) throw ValidationError("multiple-initial-states");
  auto st = [&](const std::string& s) {
    auto it = std::find(m.states.begin(), m.states.end(), s);
    if (it == m.states.end()) throw ValidationError("unknown-state " + s);
    return int(it - m.states.begin());
  };
  seen.clear();
  for (const auto& r : trans_) {
    if (!seen.insert(r.id).second) throw ValidationError("duplicate-transition-id " + r.id);
    Transition t{r.id, st(r.src), st(r.dst), Action{r.kind, -1, -1}};
    if (r.kind != ActionKind::Internal) {
      int ci = chan(r.channel);
      auto it = lix.find({ci, r.letter});
      if (it == lix.end()) {
        // accept the renamed spelling too
        int k = -1;
        for (int i = 0; i < (int)m.letters.size(); ++i)
          if (m.letters[i] == r.letter) k = i;
        if (k < 0) throw ValidationError("unknown-letter " + r.letter);
        if (m.letter_channel[k] != ci) throw ValidationError("letter-channel " + r.letter + " on " + r.channel);
        t.action.letter = k;
      } else {
        t.action.letter = it->second;
      }
      t.action.channel = ci;
    }
    m.transitions.push_back(t);
  }
  m.index();
  return m;
}

// ---------------------------------------------------------------- DSL

namespace {

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char ch : s)
    if (ch == '#' || ch == ':' || ch == '!' || ch == '?' || std::isspace((unsigned char)ch)) return false;
  return true;
}

struct Tok {
  std::string text;
  int col;
};

std::vector<Tok> tokenize(const std::string& line) {
  std::vector<Tok> out;
  size_t i = 0;
  while (i < line.size()) {
    if (line[i] == '#') break;
    if (std::isspace((unsigned char)line[i])) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < line.size() && !std::isspace((unsigned char)line[j]) && line[j] != '#') ++j;
    out.push_back({line.substr(i, j - i), int(i) + 1});
    i = j;
  }
  return out;
}

// Splits "c!a" / "c?a" / "tau".
bool split_action(const std::string& s, ActionKind& k, std::string& c, std::string& a) {
  if (s == "tau") {
    k = ActionKind::Internal;
    return true;
  }
  auto p = s.find_first_of("!?");
  if (p == std::string::npos || p == 0 || p + 1 == s.size()) return false;
  k = s[p] == '!' ? ActionKind::Send : ActionKind::Retrieve;
  c = s.substr(0, p);
  a = s.substr(p + 1);
  return valid_name(c) && valid_name(a);
}

void add_trans(MachineBuilder& b, const std::string& id, const std::string& s, const std::string& d, ActionKind k,
               const std::string& c, const std::string& a) {
  if (k == ActionKind::Send) b.send(id, s, d, c, a);
  else if (k == ActionKind::Retrieve) b.retrieve(id, s, d, c, a);
  else b.internal(id, s, d);
}

}  // namespace

FifoMachine parse_machine(const std::string& text, const ParseOptions& opt) {
  MachineBuilder b;
  b.rename_shared_letters(opt.rename_shared_letters);
  std::istringstream in(text);
  std::string line;
  int ln = 0;
  auto need_name = [&](const Tok& t) {
    if (!valid_name(t.text)) throw ParseError(ln, t.col, "invalid name '" + t.text + "'");
  };
  while (std::getline(in, line)) {
    ++ln;
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    const std::string& kw = toks[0].text;
    if (kw == "channels") {
      for (size_t i = 1; i < toks.size(); ++i) {
        need_name(toks[i]);
        b.channel(toks[i].text);
      }
    } else if (kw == "alphabet") {
      if (toks.size() < 2) throw ParseError(ln, toks[0].col, "alphabet needs a channel");
      std::string c = toks[1].text;
      size_t first = 2;
      if (!c.empty() && c.back() == ':') {
        c.pop_back();
      } else if (toks.size() > 2 && toks[2].text == ":") {
        first = 3;
      } else {
        throw ParseError(ln, toks[1].col + (int)c.size(), "expected ':' after channel");
      }
      if (!valid_name(c)) throw ParseError(ln, toks[1].col, "invalid channel name '" + c + "'");
      for (size_t i = first; i < toks.size(); ++i) {
        need_name(toks[i]);
        b.letter(c, toks[i].text);
      }
    } else if (kw == "state") {
      if (toks.size() < 2 || toks.size() > 3) throw ParseError(ln, toks[0].col, "expected 'state NAME [init]'");
      need_name(toks[1]);
      if (toks.size() == 3 && toks[2].text != "init") throw ParseError(ln, toks[2].col, "expected 'init'");
      b.state(toks[1].text, toks.size() == 3);
    } else if (kw == "trans") {
      if (toks.size() != 5) throw ParseError(ln, toks[0].col, "expected 'trans ID SRC DST ACTION'");
      for (int i = 1; i <= 3; ++i) need_name(toks[i]);
      ActionKind k;
      std::string c, a;
      if (!split_action(toks[4].text, k, c, a)) throw ParseError(ln, toks[4].col, "bad action '" + toks[4].text + "'");
      add_trans(b, toks[1].text, toks[2].text, toks[3].text, k, c, a);
    } else {
      throw ParseError(ln, toks[0].col, "unknown keyword '" + kw + "'");
    }
  }
  return b.build();
}

std::string action_text(const FifoMachine& m, const Action& a) {
  if (a.kind == ActionKind::Internal) return "tau";
  return m.channels[a.channel] + (a.kind == ActionKind::Send ? "!" : "?") + m.letters[a.letter];
}

std::string render_machine(const FifoMachine& m) {
  std::ostringstream o;
  o << "channels";
  for (const auto& c : m.channels) o << ' ' << c;
  o << '\n';
  for (int c = 0; c < (int)m.channels.size(); ++c) {
    o << "alphabet " << m.channels[c] << ':';
    for (int l : m.channel_letters(c)) o << ' ' << m.letters[l];
    o << '\n';
  }
  for (int q = 0; q < (int)m.states.size(); ++q) {
    o << "state " << m.states[q];
    if (q == m.initial) o << " init";
    o << '\n';
  }
  for (const auto& t : m.transitions)
    o << "trans " << t.id << ' ' << m.states[t.source] << ' ' << m.states[t.target] << ' '
      << action_text(m, t.action) << '\n';
  return o.str();
}

FifoMachine machine_from_json(const json& j, const ParseOptions& opt) {
  try {
    MachineBuilder b;
    b.rename_shared_letters(opt.rename_shared_letters);
    for (const auto& c : j.at("channels")) b.channel(c.get<std::string>());
    if (j.contains("alphabet"))
      for (const auto& a : j.at("alphabet"))
        for (const auto& l : a.at("letters")) b.letter(a.at("channel").get<std::string>(), l.get<std::string>());
    for (const auto& s : j.at("states")) b.state(s.at("name").get<std::string>(), s.value("init", false));
    if (j.contains("transitions"))
      for (const auto& t : j.at("transitions")) {
        ActionKind k;
        std::string c, a, act = t.at("action").get<std::string>();
        if (!split_action(act, k, c, a)) throw ParseError(0, 0, "bad action '" + act + "'");
        add_trans(b, t.at("id").get<std::string>(), t.at("source").get<std::string>(),
                  t.at("target").get<std::string>(), k, c, a);
      }
    return b.build();
  } catch (const json::exception& e) {
    throw ParseError(0, 0, e.what());
  }
}

json machine_to_json(const FifoMachine& m) {
  json j;
  j["channels"] = m.channels;
  j["alphabet"] = json::array();
  for (int c = 0; c < (int)m.channels.size(); ++c) {
    json ls = json::array();
    for (int l : m.channel_letters(c)) ls.push_back(m.letters[l]);
    j["alphabet"].push_back({{"channel", m.channels[c]}, {"letters", ls}});
  }
  j["states"] = json::array();
  for (int q = 0; q < (int)m.states.size(); ++q) j["states"].push_back({{"name", m.states[q]}, {"init", q == m.initial}});
  j["transitions"] = json::array();
  for (const auto& t : m.transitions)
    j["transitions"].push_back({{"id", t.id},
                                {"source", m.states[t.source]},
                                {"target", m.states[t.target]},
                                {"action", action_text(m, t.action)}});
  return j;
}

// ---------------------------------------------------------------- configs

namespace {
bool short_letters(const FifoMachine& m) {
  for (const auto& l : m.letters)
    if (l.size() != 1) return false;
  return true;
}
}  // namespace

std::string word_text(const FifoMachine& m, const Word& w) {
  bool sh = short_letters(m);
  std::string s;
  for (size_t i = 0; i < w.size(); ++i) {
    if (!sh && i) s += '.';
    s += m.letters[w[i]];
  }
  return s;
}

Word parse_word(const FifoMachine& m, int channel, const std::string& text) {
  Word w;
  if (text.empty()) return w;
  std::vector<std::string> parts;
  if (short_letters(m)) {
    for (char ch : text) parts.emplace_back(1, ch);
  } else {
    std::string cur;
    for (char ch : text) {
      if (ch == '.') {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    parts.push_back(cur);
  }
  for (const auto& p : parts) {
    int l = m.letter_index(p);
    if (l < 0 || m.letter_channel[l] != channel)
      throw ValidationError("letter '" + p + "' not in alphabet of " + m.channels[channel]);
    w.push_back(static_cast<Letter>(l));
  }
  return w;
}

std::string render_config(const FifoMachine& m, const Config& c) {
  std::string s = "(" + m.states[c.state];
  for (const auto& w : c.contents) s += "," + word_text(m, w);
  return s + ")";
}

Config parse_config(const FifoMachine& m, const std::string& raw) {
  std::string text;
  for (char ch : raw)
    if (!std::isspace((unsigned char)ch)) text += ch;
  if (text.size() < 2 || text.front() != '(' || text.back() != ')')
    throw ParseError(1, 1, "configuration must look like (state,w1,...,wp)");
  std::string inner = text.substr(1, text.size() - 2);
  size_t p = m.channels.size();
  // longest state name that leaves exactly p comma-separated fields
  int best = -1;
  for (int q = 0; q < (int)m.states.size(); ++q) {
    const auto& n = m.states[q];
    if (inner.compare(0, n.size(), n) != 0) continue;
    std::string rest = inner.substr(n.size());
    size_t fields = p == 0 ? (rest.empty() ? 0 : 99) : (!rest.empty() && rest[0] == ',' ? std::count(rest.begin(), rest.end(), ',') : 99);
    if (fields == p && (best < 0 || n.size() > m.states[best].size())) best = q;
  }
  if (best < 0) throw ParseError(1, 2, "unknown state or wrong channel count in '" + raw + "'");
  Config c{best, {}};
  std::string rest = inner.substr(m.states[best].size());
  size_t pos = 0;
  for (size_t ch = 0; ch < p; ++ch) {
    size_t start = pos + 1;
    size_t end = rest.find(',', start);
    if (end == std::string::npos) end = rest.size();
    c.contents.push_back(parse_word(m, (int)ch, rest.substr(start, end - start)));
    pos = end;
  }
  return c;
}

// ---------------------------------------------------------------- semantics

std::vector<Config> step(const FifoMachine& m, const Config& c, int ti, Semantics sem) {
  const Transition& t = m.transitions[ti];
  if (c.state != t.source) return {};
  Config n = c;
  n.state = t.target;
  const Action& a = t.action;
  switch (a.kind) {
    case ActionKind::Internal: return {n};
    case ActionKind::Send: n.contents[a.channel].push_back(static_cast<Letter>(a.letter)); return {n};
    case ActionKind::Retrieve: {
      const Word& w = c.contents[a.channel];
      if (sem != Semantics::FrontLossy) {
        if (w.empty() || w[0] != static_cast<Letter>(a.letter)) return {};
        n.contents[a.channel] = w.substr(1);
        return {n};
      }
      std::vector<Config> out;
      for (size_t i = 0; i < w.size(); ++i)
        if (w[i] == static_cast<Letter>(a.letter)) {
          n.contents[a.channel] = w.substr(i + 1);
          out.push_back(n);
        }
      return out;
    }
  }
  return {};
}

std::vector<Config> lose_successors(const Config& c) {
  std::set<Config> out;
  for (size_t ch = 0; ch < c.contents.size(); ++ch)
    for (size_t i = 0; i < c.contents[ch].size(); ++i) {
      Config n = c;
      n.contents[ch].erase(i, 1);
      out.insert(n);
    }
  return {out.begin(), out.end()};
}

// ---------------------------------------------------------------- product

FifoMachine product(const std::vector<FifoMachine>& ps) {
  MachineBuilder b;
  std::vector<std::string> chans;
  std::map<std::string, std::string> letter_owner;
  std::vector<std::pair<std::string, std::string>> letters;
  for (const auto& p : ps) {
    for (const auto& c : p.channels)
      if (std::find(chans.begin(), chans.end(), c) == chans.end()) chans.push_back(c);
    for (int l = 0; l < (int)p.letters.size(); ++l) {
      const std::string& c = p.channels[p.letter_channel[l]];
      auto it = letter_owner.find(p.letters[l]);
      if (it == letter_owner.end()) {
        letter_owner[p.letters[l]] = c;
        letters.emplace_back(c, p.letters[l]);
      } else if (it->second != c) {
        throw AlphabetClash(p.letters[l] + " on " + it->second + " and " + c);
      }
    }
  }
  for (const auto& c : chans) b.channel(c);
  for (const auto& [c, l] : letters) b.letter(c, l);
  size_t n = ps.size();
  std::vector<std::vector<int>> tuples{{}};
  for (const auto& p : ps) {
    std::vector<std::vector<int>> next;
    for (const auto& t : tuples)
      for (int q = 0; q < (int)p.states.size(); ++q) {
        auto u = t;
        u.push_back(q);
        next.push_back(u);
      }
    tuples = std::move(next);
  }
  auto name = [&](const std::vector<int>& t) {
    std::string s = "(";
    for (size_t i = 0; i < n; ++i) s += (i ? "," : "") + ps[i].states[t[i]];
    return s + ")";
  };
  for (const auto& t : tuples) {
    bool init = true;
    for (size_t i = 0; i < n; ++i) init = init && t[i] == ps[i].initial;
    b.state(name(t), init);
  }
  for (const auto& t : tuples) {
    std::string src = name(t);
    for (size_t i = 0; i < n; ++i)
      for (int e : ps[i].out_edges(t[i])) {
        const Transition& tr = ps[i].transitions[e];
        auto u = t;
        u[i] = tr.target;
        std::string id = tr.id + "@" + src;
        const Action& a = tr.action;
        if (a.kind == ActionKind::Internal) b.internal(id, src, name(u));
        else
          add_trans(b, id, src, name(u), a.kind, ps[i].channels[a.channel], ps[i].letters[a.letter]);
      }
  }
  return b.build();
}

// ---------------------------------------------------------------- graph structure

std::vector<int> scc_ids(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<int>> adj(n);
  for (const auto& [s, d] : edges) adj[s].push_back(d);
  std::vector<int> idx(n, -1), low(n, 0), comp(n, -1), stack;
  std::vector<char> on(n, 0);
  int counter = 0, ncomp = 0;
  std::vector<std::pair<int, size_t>> call;
  for (int r = 0; r < n; ++r) {
    if (idx[r] >= 0) continue;
    call.push_back({r, 0});
    idx[r] = low[r] = counter++;
    stack.push_back(r);
    on[r] = 1;
    while (!call.empty()) {
      auto& [v, i] = call.back();
      if (i < adj[v].size()) {
        int w = adj[v][i++];
        if (idx[w] < 0) {
          idx[w] = low[w] = counter++;
          stack.push_back(w);
          on[w] = 1;
          call.push_back({w, 0});
        } else if (on[w]) {
          low[v] = std::min(low[v], idx[w]);
        }
        continue;
      }
      if (low[v] == idx[v]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on[w] = 0;
          comp[w] = ncomp;
        } while (w != v);
        ++ncomp;
      }
      int done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
    }
  }
  return comp;
}

FlatnessResult flatness_of(int n, const std::vector<std::pair<int, int>>& edges) {
  FlatnessResult r;
  auto comp = scc_ids(n, edges);
  std::vector<std::vector<int>> internal(n);
  for (int e = 0; e < (int)edges.size(); ++e)
    if (comp[edges[e].first] == comp[edges[e].second]) internal[edges[e].first].push_back(e);
  for (int v = 0; v < n; ++v) {
    if (internal[v].size() < 2) continue;
    r.flat = false;
    r.vertex = v;
    // close each of the two first internal edges back to v inside the component
    auto close = [&](int e) {
      std::vector<int> cyc{e};
      int start = edges[e].second;
      if (start == v) return cyc;
      std::vector<int> via(n, -2);
      std::deque<int> q{start};
      via[start] = -1;
      while (!q.empty() && via[v] == -2) {
        int u = q.front();
        q.pop_front();
        for (int f : internal[u]) {
          int w = edges[f].second;
          if (via[w] == -2) {
            via[w] = f;
            q.push_back(w);
          }
        }
      }
      std::vector<int> path;
      for (int u = v; u != start; u = edges[via[u]].first) path.push_back(via[u]);
      std::reverse(path.begin(), path.end());
      cyc.insert(cyc.end(), path.begin(), path.end());
      return cyc;
    };
    r.cycle1 = close(internal[v][0]);
    r.cycle2 = close(internal[v][1]);
    return r;
  }
  return r;
}

namespace {
std::vector<std::pair<int, int>> edge_list(const FifoMachine& m) {
  std::vector<std::pair<int, int>> e;
  for (const auto& t : m.transitions) e.emplace_back(t.source, t.target);
  return e;
}

struct Structure {
  std::vector<int> comp;
  std::vector<int> next;  // internal out-edge of a cycle vertex, else -1
};

Structure structure_of(const FifoMachine& m) {
  auto edges = edge_list(m);
  auto fr = flatness_of((int)m.states.size(), edges);
  if (!fr.flat) throw NotFlat(fr.vertex);
  Structure s{scc_ids((int)m.states.size(), edges), std::vector<int>(m.states.size(), -1)};
  for (int e = 0; e < (int)edges.size(); ++e)
    if (s.comp[edges[e].first] == s.comp[edges[e].second]) s.next[edges[e].first] = e;
  return s;
}

ElementaryLoop walk_loop(const FifoMachine& m, const Structure& s, int q) {
  ElementaryLoop l{q, {}};
  int v = q;
  do {
    int e = s.next[v];
    l.body.push_back(e);
    v = m.transitions[e].target;
  } while (v != q);
  return l;
}
}  // namespace

FlatnessResult is_flat(const FifoMachine& m) { return flatness_of((int)m.states.size(), edge_list(m)); }

std::optional<ElementaryLoop> loop_of(const FifoMachine& m, int q) {
  auto s = structure_of(m);
  if (s.next[q] < 0) return std::nullopt;
  return walk_loop(m, s, q);
}

ElementaryLoop rotate_loop(const FifoMachine& m, const ElementaryLoop& l, int anchor) {
  for (size_t i = 0; i < l.body.size(); ++i)
    if (m.transitions[l.body[i]].source == anchor) {
      ElementaryLoop r{anchor, {}};
      for (size_t j = 0; j < l.body.size(); ++j) r.body.push_back(l.body[(i + j) % l.body.size()]);
      return r;
    }
  throw NoLoopAt(m.states[anchor]);
}

std::vector<PathSchema> path_schemas(const FifoMachine& m, int from, int to) {
  auto s = structure_of(m);
  std::vector<PathSchema> out;
  std::function<void(int, PathSchema, std::vector<int>)> go = [&](int v, PathSchema ps, std::vector<int> cur) {
    if (s.next[v] < 0) {
      if (v == to) {
        PathSchema r = ps;
        r.segments.push_back(cur);
        out.push_back(r);
      }
      for (int e : m.out_edges(v)) {
        auto c2 = cur;
        c2.push_back(e);
        go(m.transitions[e].target, ps, c2);
      }
      return;
    }
    ElementaryLoop l = walk_loop(m, s, v);
    ps.segments.push_back(cur);
    ps.loops.push_back(l);
    std::vector<int> seg;
    int u = v;
    for (size_t j = 0; j < l.body.size(); ++j) {
      if (u == to) {
        PathSchema r = ps;
        r.segments.push_back(seg);
        out.push_back(r);
      }
      for (int e : m.out_edges(u)) {
        if (s.comp[m.transitions[e].target] == s.comp[v]) continue;
        auto c2 = seg;
        c2.push_back(e);
        go(m.transitions[e].target, ps, c2);
      }
      seg.push_back(l.body[j]);
      u = m.transitions[l.body[j]].target;
    }
  };
  go(from, PathSchema{}, {});
  std::sort(out.begin(), out.end());
  return out;
}

std::string render_schema(const FifoMachine& m, const PathSchema& s) {
  auto seq = [&](const std::vector<int>& v) {
    if (v.empty()) return std::string("eps");
    std::string r;
    for (size_t i = 0; i < v.size(); ++i) r += (i ? "." : "") + m.transitions[v[i]].id;
    return r;
  };
  std::string r = seq(s.segments[0]);
  for (size_t i = 0; i < s.loops.size(); ++i) r += " (" + seq(s.loops[i].body) + ")* " + seq(s.segments[i + 1]);
  return r;
}

}  // namespace flatfifo
