#include "flatfifo/explorer.hpp"

#include <algorithm>

namespace flatfifo {

std::size_t ReachGraph::VecHash::operator()(const std::vector<int>& v) const {
  std::size_t h = 1469598103934665603ull;
  for (int x : v) h = (h ^ static_cast<std::size_t>(x)) * 1099511628211ull;
  return h;
}

Config ReachGraph::config(int i) const {
  Config c{nodes[i][0], {}};
  for (size_t k = 1; k < nodes[i].size(); ++k) c.contents.push_back(words[nodes[i][k]]);
  return c;
}

int ReachGraph::intern(const Word& w) {
  auto [it, fresh] = word_ix_.emplace(w, (int)words.size());
  if (fresh) words.push_back(w);
  return it->second;
}

int ReachGraph::find(const Config& c) const {
  std::vector<int> key{c.state};
  for (const auto& w : c.contents) {
    auto it = word_ix_.find(w);
    if (it == word_ix_.end()) return -1;
    key.push_back(it->second);
  }
  auto it = node_ix_.find(key);
  return it == node_ix_.end() ? -1 : it->second;
}

int ReachGraph::add(const Config& c, int d) {
  std::vector<int> key{c.state};
  for (const auto& w : c.contents) key.push_back(intern(w));
  auto [it, fresh] = node_ix_.emplace(key, (int)nodes.size());
  if (fresh) {
    nodes.push_back(std::move(key));
    depth.push_back(d);
    parent_edge.push_back(-1);
    dropped.push_back(0);
  }
  return it->second;
}

std::vector<int> ReachGraph::path_to(int i) const {
  std::vector<int> p;
  while (parent_edge[i] >= 0) {
    const auto& e = edges[parent_edge[i]];
    p.push_back(e.transition);
    i = e.from;
  }
  std::reverse(p.begin(), p.end());
  return p;
}

std::vector<std::pair<int, Config>> successors(const FifoMachine& m, const Config& c, Semantics sem) {
  std::vector<std::pair<int, Config>> out;
  for (int t : m.out_edges(c.state))
    for (auto& n : step(m, c, t, sem)) out.emplace_back(t, std::move(n));
  if (sem == Semantics::Lossy)
    for (auto& n : lose_successors(c)) out.emplace_back(kLoseEdge, std::move(n));
  return out;
}

ReachGraph explore(const FifoMachine& m, const Config& init, Semantics sem, const ExploreBounds& b) {
  ReachGraph g;
  g.add(init, 0);
  std::vector<int> level{0};
  for (size_t d = 0; !level.empty(); ++d) {
    struct Pending {
      Config cfg;
      int from, t;
    };
    std::vector<Pending> found;
    for (int i : level) {
      Config c = g.config(i);
      for (auto& [t, n] : successors(m, c, sem)) {
        bool too_long = false;
        for (const auto& w : n.contents) too_long = too_long || w.size() > b.max_channel_len;
        if (too_long) {
          g.dropped[i] = 1;
          g.truncated = true;
          continue;
        }
        if (d >= b.max_depth && g.find(n) < 0) {
          g.dropped[i] = 1;
          g.truncated = true;
          continue;
        }
        found.push_back({std::move(n), i, t});
      }
    }
    // canonical order: by target config, then by source index and transition
    std::sort(found.begin(), found.end(), [](const Pending& a, const Pending& b) {
      if (a.cfg != b.cfg) return a.cfg < b.cfg;
      return std::pair(a.from, a.t) < std::pair(b.from, b.t);
    });
    std::vector<int> next;
    for (auto& p : found) {
      int j = g.find(p.cfg);
      if (j < 0) {
        if (g.size() >= b.max_configs) {
          g.dropped[p.from] = 1;
          g.truncated = true;
          continue;
        }
        j = g.add(p.cfg, (int)d + 1);
        g.parent_edge[j] = (int)g.edges.size();
        next.push_back(j);
      }
      g.edges.push_back({p.from, p.t, j});
    }
    level = std::move(next);
  }
  return g;
}

Tri oracle_reachable(const FifoMachine& m, const Config& init, const Config& target, Semantics sem,
                     const ExploreBounds& b) {
  auto g = explore(m, init, sem, b);
  if (g.find(target) >= 0) return Tri::Yes;
  return g.truncated ? Tri::Unknown : Tri::No;
}

Tri oracle_csr(const FifoMachine& m, const Config& init, int q, Semantics sem, const ExploreBounds& b) {
  auto g = explore(m, init, sem, b);
  for (const auto& n : g.nodes)
    if (n[0] == q) return Tri::Yes;
  return g.truncated ? Tri::Unknown : Tri::No;
}

Tri oracle_cyclic(const FifoMachine& m, const Config& cfg, const ExploreBounds& b) {
  auto g = explore(m, cfg, Semantics::Perfect, b);
  for (const auto& e : g.edges)
    if (e.to == 0) return Tri::Yes;
  return g.truncated ? Tri::Unknown : Tri::No;
}

LetterCount oracle_max_letter_count(const FifoMachine& m, const Config& init, int channel, int letter,
                                    const ExploreBounds& b, Semantics sem) {
  auto g = explore(m, init, sem, b);
  LetterCount r;
  std::vector<size_t> cnt(g.size());
  for (size_t i = 0; i < g.size(); ++i) {
    const Word& w = g.words[g.nodes[i][1 + channel]];
    cnt[i] = std::count(w.begin(), w.end(), static_cast<Letter>(letter));
    r.count = std::max(r.count, cnt[i]);
  }
  if (g.truncated)
    for (size_t i = 0; i < g.size(); ++i) r.saturated = r.saturated || (cnt[i] == r.count && g.dropped[i]);
  return r;
}

nlohmann::json graph_to_json(const FifoMachine& m, const ReachGraph& g) {
  nlohmann::json j;
  j["configs"] = nlohmann::json::array();
  for (size_t i = 0; i < g.size(); ++i) j["configs"].push_back(render_config(m, g.config((int)i)));
  j["edges"] = nlohmann::json::array();
  for (const auto& e : g.edges)
    j["edges"].push_back({e.from, e.transition == kLoseEdge ? std::string("lose") : m.transitions[e.transition].id, e.to});
  j["truncated"] = g.truncated;
  return j;
}

}  // namespace flatfifo
