#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "gf.hpp"

namespace snc {

// edge and source subsets are bit masks over edge / source indices
using EdgeSet = std::uint64_t;
using SourceSet = std::uint64_t;

inline std::size_t popcount(std::uint64_t x) { return static_cast<std::size_t>(std::popcount(x)); }
inline EdgeSet bit(std::size_t i) { return EdgeSet(1) << i; }
inline bool subset_of(std::uint64_t a, std::uint64_t b) { return (a & ~b) == 0; }

inline std::vector<std::size_t> members(std::uint64_t s) {
  std::vector<std::size_t> out;
  while (s) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(s)));
    s &= s - 1;
  }
  return out;
}

// size first, then lexicographic on the sorted index lists
inline bool set_less(std::uint64_t a, std::uint64_t b) {
  if (popcount(a) != popcount(b)) return popcount(a) < popcount(b);
  return members(a) < members(b);
}

struct Edge {
  std::string id;
  std::size_t tail, head;
};

class Network {
 public:
  Network() = default;
  Network(std::vector<std::string> nodes, std::vector<Edge> edges, std::vector<std::size_t> sources,
          std::size_t sink)
      : nodes_(std::move(nodes)), edges_(std::move(edges)), sources_(std::move(sources)), sink_(sink) {
    index();
  }

  // convenience builder from names
  static Network build(const std::vector<std::string>& nodes,
                       const std::vector<std::tuple<std::string, std::string, std::string>>& edges,
                       const std::vector<std::string>& sources, const std::string& sink) {
    std::map<std::string, std::size_t> ix;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (ix.count(nodes[i])) throw Error("DegenerateInput", "duplicate node " + nodes[i]);
      ix[nodes[i]] = i;
    }
    auto look = [&](const std::string& n) {
      auto it = ix.find(n);
      if (it == ix.end()) throw Error("InvalidNode", "unknown node " + n);
      return it->second;
    };
    std::vector<Edge> es;
    for (auto& [id, t, h] : edges) es.push_back({id, look(t), look(h)});
    std::vector<std::size_t> src;
    for (auto& s : sources) src.push_back(look(s));
    return Network(nodes, es, src, look(sink));
  }

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::size_t>& sources() const { return sources_; }
  std::size_t sink() const { return sink_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_sources() const { return sources_.size(); }
  EdgeSet all_edges() const { return edges_.size() == 64 ? ~EdgeSet(0) : bit(edges_.size()) - 1; }
  SourceSet all_sources() const { return sources_.size() == 64 ? ~SourceSet(0) : bit(sources_.size()) - 1; }

  const std::vector<std::size_t>& in_edges(std::size_t v) const { return in_[v]; }
  const std::vector<std::size_t>& out_edges(std::size_t v) const { return out_[v]; }
  EdgeSet in_mask(std::size_t v) const {
    EdgeSet m = 0;
    for (auto e : in_[v]) m |= bit(e);
    return m;
  }

  std::size_t edge_index(const std::string& id) const {
    auto it = edge_ix_.find(id);
    if (it == edge_ix_.end()) throw Error("InvalidEdge", "unknown edge " + id);
    return it->second;
  }
  std::size_t node_index(const std::string& id) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i] == id) return i;
    throw Error("InvalidNode", "unknown node " + id);
  }
  EdgeSet edge_set(const std::vector<std::string>& ids) const {
    EdgeSet m = 0;
    for (auto& id : ids) m |= bit(edge_index(id));
    return m;
  }
  std::vector<std::string> edge_ids(EdgeSet s) const {
    std::vector<std::string> out;
    for (auto e : members(s)) out.push_back(edges_[e].id);
    return out;
  }
  std::vector<std::string> source_names(SourceSet s) const {
    std::vector<std::string> out;
    for (auto i : members(s)) out.push_back(nodes_[sources_[i]]);
    return out;
  }
  // -1 when the node is not a source
  long source_position(std::size_t node) const {
    for (std::size_t i = 0; i < sources_.size(); ++i)
      if (sources_[i] == node) return static_cast<long>(i);
    return -1;
  }

  // edges in an order where every edge follows all edges entering its tail; empty if cyclic
  std::vector<std::size_t> topo_edges() const {
    std::vector<std::size_t> indeg(nodes_.size(), 0), order, queue;
    for (auto& e : edges_) ++indeg[e.head];
    for (std::size_t v = 0; v < nodes_.size(); ++v)
      if (!indeg[v]) queue.push_back(v);
    std::size_t seen = 0;
    while (!queue.empty()) {
      std::size_t v = queue.back();
      queue.pop_back();
      ++seen;
      for (auto e : out_[v]) {
        order.push_back(e);
        if (--indeg[edges_[e].head] == 0) queue.push_back(edges_[e].head);
      }
    }
    if (seen != nodes_.size()) return {};
    return order;
  }

  // edge mask of edges whose tail can be reached from source i (including its own out-edges)
  EdgeSet reach_from_source(std::size_t i) const { return src_reach_[i]; }

  // sources with a path to the sink that uses some edge of C
  SourceSet upstream(EdgeSet C) const {
    SourceSet D = 0;
    for (std::size_t i = 0; i < sources_.size(); ++i)
      if (src_reach_[i] & C) D |= bit(i);
    return D;
  }

  // can node `from` reach any node flagged in `target` without using edges in `removed`
  bool reaches(std::size_t from, const std::vector<bool>& target, EdgeSet removed) const {
    std::vector<bool> seen(nodes_.size(), false);
    std::vector<std::size_t> stack{from};
    seen[from] = true;
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      if (target[v]) return true;
      for (auto e : out_[v]) {
        if (removed & bit(e)) continue;
        std::size_t h = edges_[e].head;
        if (!seen[h]) {
          seen[h] = true;
          stack.push_back(h);
        }
      }
    }
    return false;
  }

  SourceSet separated(EdgeSet C) const {
    std::vector<bool> t(nodes_.size(), false);
    t[sink_] = true;
    SourceSet I = 0;
    for (std::size_t i = 0; i < sources_.size(); ++i)
      if (!reaches(sources_[i], t, C)) I |= bit(i);
    return I;
  }

 private:
  void index() {
    in_.assign(nodes_.size(), {});
    out_.assign(nodes_.size(), {});
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      if (edges_[e].tail >= nodes_.size() || edges_[e].head >= nodes_.size())
        throw Error("InvalidNode", "edge endpoint out of range");
      if (edge_ix_.count(edges_[e].id)) throw Error("DegenerateInput", "duplicate edge id " + edges_[e].id);
      edge_ix_[edges_[e].id] = e;
      out_[edges_[e].tail].push_back(e);
      in_[edges_[e].head].push_back(e);
    }
    src_reach_.assign(sources_.size(), 0);
    for (std::size_t i = 0; i < sources_.size(); ++i) {
      std::vector<bool> seen(nodes_.size(), false);
      std::vector<std::size_t> stack{sources_[i]};
      seen[sources_[i]] = true;
      EdgeSet m = 0;
      while (!stack.empty()) {
        std::size_t v = stack.back();
        stack.pop_back();
        for (auto e : out_[v]) {
          if (e < 64) m |= bit(e);
          if (!seen[edges_[e].head]) {
            seen[edges_[e].head] = true;
            stack.push_back(edges_[e].head);
          }
        }
      }
      src_reach_[i] = m;
    }
  }

  std::vector<std::string> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> sources_;
  std::size_t sink_ = 0;
  std::vector<std::vector<std::size_t>> in_, out_;
  std::unordered_map<std::string, std::size_t> edge_ix_;
  std::vector<EdgeSet> src_reach_;
};

inline std::vector<std::string> validate_network(const Network& n) {
  std::vector<std::string> v;
  if (n.num_edges() > 64) v.push_back("size: more than 64 edges");
  if (n.sources().empty()) v.push_back("sources: no source nodes");
  if (n.sink() >= n.nodes().size()) {
    v.push_back("sink: missing");
    return v;
  }
  if (n.topo_edges().empty() && n.num_edges() > 0) v.push_back("acyclicity: graph has a directed cycle");
  std::vector<bool> seen_src(n.nodes().size(), false);
  for (auto s : n.sources()) {
    if (seen_src[s]) v.push_back("sources: duplicate source " + n.nodes()[s]);
    seen_src[s] = true;
    if (!n.in_edges(s).empty()) v.push_back("sources: " + n.nodes()[s] + " has incoming edges");
    if (s == n.sink()) v.push_back("sources: sink listed as a source");
  }
  if (!n.out_edges(n.sink()).empty()) v.push_back("sink: " + n.nodes()[n.sink()] + " has outgoing edges");
  std::vector<bool> t(n.nodes().size(), false);
  t[n.sink()] = true;
  for (std::size_t u = 0; u < n.nodes().size(); ++u)
    if (u != n.sink() && !n.reaches(u, t, 0)) v.push_back("reachability: " + n.nodes()[u] + " has no path to the sink");
  return v;
}

struct SourceClassification {
  SourceSet D = 0, I = 0, J = 0;
};

inline void check_edges(const Network& n, EdgeSet C) {
  if (!subset_of(C, n.all_edges())) throw Error("InvalidEdge", "edge set refers to unknown edges");
}

inline SourceClassification classify_sources(const Network& n, EdgeSet C) {
  check_edges(n, C);
  SourceClassification c;
  c.D = n.upstream(C);
  c.I = n.separated(C) & c.D;
  c.J = c.D & ~c.I;
  return c;
}

inline bool is_cut(const Network& n, EdgeSet C) { return classify_sources(n, C).I != 0; }

// unit-capacity max flow by augmenting paths; the witness is the set of saturated edges leaving the residual-reachable side
inline std::pair<std::size_t, EdgeSet> min_cut(const Network& n, std::size_t from, std::size_t to) {
  if (from == to) throw Error("DegenerateInput", "min_cut endpoints coincide");
  std::size_t E = n.num_edges();
  std::vector<int> flow(E, 0);
  std::size_t value = 0;
  auto residual_search = [&](std::vector<long>& via) {
    // via[v] = signed edge used to reach v (e+1 forward, -(e+1) backward)
    std::vector<bool> seen(n.nodes().size(), false);
    std::vector<std::size_t> stack{from};
    seen[from] = true;
    via.assign(n.nodes().size(), 0);
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      for (auto e : n.out_edges(v))
        if (!flow[e] && !seen[n.edges()[e].head]) {
          seen[n.edges()[e].head] = true;
          via[n.edges()[e].head] = static_cast<long>(e) + 1;
          stack.push_back(n.edges()[e].head);
        }
      for (auto e : n.in_edges(v))
        if (flow[e] && !seen[n.edges()[e].tail]) {
          seen[n.edges()[e].tail] = true;
          via[n.edges()[e].tail] = -(static_cast<long>(e) + 1);
          stack.push_back(n.edges()[e].tail);
        }
    }
    return seen;
  };
  while (true) {
    std::vector<long> via;
    auto seen = residual_search(via);
    if (!seen[to]) {
      EdgeSet cut = 0;
      for (std::size_t e = 0; e < E; ++e)
        if (seen[n.edges()[e].tail] && !seen[n.edges()[e].head]) cut |= bit(e);
      return {value, cut};
    }
    std::size_t v = to;
    while (v != from) {
      long s = via[v];
      if (s > 0) {
        std::size_t e = static_cast<std::size_t>(s - 1);
        flow[e] = 1;
        v = n.edges()[e].tail;
      } else {
        std::size_t e = static_cast<std::size_t>(-s - 1);
        flow[e] = 0;
        v = n.edges()[e].head;
      }
    }
    ++value;
  }
}

inline std::size_t c_min(const Network& n) {
  std::size_t best = SIZE_MAX;
  for (auto s : n.sources()) best = std::min(best, min_cut(n, s, n.sink()).first);
  return best;
}

// all subsets of size <= max_size, by size then lexicographic
inline std::vector<EdgeSet> subsets_by_size(std::size_t E, std::size_t max_size, EdgeSet universe) {
  std::vector<EdgeSet> out;
  std::vector<std::size_t> pool = members(universe);
  (void)E;
  for (std::size_t k = 0; k <= std::min(max_size, pool.size()); ++k)
    for_each_combination(pool.size(), k, [&](const std::vector<std::size_t>& c) {
      EdgeSet m = 0;
      for (auto i : c) m |= bit(pool[i]);
      out.push_back(m);
      return true;
    });
  return out;
}

inline std::vector<EdgeSet> enumerate_cuts(const Network& n, std::size_t max_size) {
  std::vector<EdgeSet> out;
  for (EdgeSet C : subsets_by_size(n.num_edges(), max_size, n.all_edges()))
    if (C && is_cut(n, C)) out.push_back(C);
  return out;
}

inline std::vector<EdgeSet> enumerate_wiretap_sets(const Network& n, std::size_t r) {
  if (r > n.num_edges()) throw Error("DegenerateInput", "security level exceeds edge count");
  return subsets_by_size(n.num_edges(), r, n.all_edges());
}

using Partition = std::vector<EdgeSet>;

inline bool is_weak_partition(const Network& n, EdgeSet C, const Partition& parts) {
  EdgeSet u = 0;
  for (auto p : parts) {
    if (!p || (u & p)) return false;
    u |= p;
  }
  if (u != C) return false;
  auto whole = classify_sources(n, C);
  SourceSet covered = 0;
  std::vector<SourceClassification> cls;
  for (auto p : parts) {
    cls.push_back(classify_sources(n, p));
    if (!cls.back().I) return false;
    covered |= cls.back().I;
  }
  SourceSet L = whole.I & ~covered;
  for (auto& c : cls)
    if (!subset_of(c.D, c.I | whole.J | L)) return false;
  return true;
}

inline bool is_strong_partition(const Network& n, EdgeSet C, const Partition& parts) {
  EdgeSet u = 0;
  for (auto p : parts) u |= p;
  if (u != C) return false;
  std::vector<SourceClassification> cls;
  for (auto p : parts) {
    cls.push_back(classify_sources(n, p));
    if (!cls.back().I) return false;
  }
  for (std::size_t i = 0; i < cls.size(); ++i)
    for (std::size_t j = 0; j < cls.size(); ++j)
      if (i != j && (cls[i].D & cls[j].I)) return false;
  return true;
}

// Block-first generation of set partitions: the block holding the lowest remaining
// edge is fixed before recursing, which gives the restricted-growth canonical form and
// lets clause (i) prune every block as soon as it is formed.
inline std::vector<Partition> enumerate_weak_partitions(const Network& n, EdgeSet C, std::size_t max_parts = 64) {
  auto whole = classify_sources(n, C);
  if (!whole.I) throw Error("NotACut", "edge set is not a cut");
  std::unordered_map<EdgeSet, SourceClassification> cache;
  auto cls = [&](EdgeSet b) -> const SourceClassification& {
    auto it = cache.find(b);
    if (it != cache.end()) return it->second;
    return cache.emplace(b, classify_sources(n, b)).first->second;
  };
  std::vector<Partition> out;
  Partition cur;
  std::function<void(EdgeSet)> rec = [&](EdgeSet rest) {
    if (!rest) {
      SourceSet covered = 0;
      for (auto p : cur) covered |= cls(p).I;
      SourceSet L = whole.I & ~covered;
      for (auto p : cur)
        if (!subset_of(cls(p).D, cls(p).I | whole.J | L)) return;
      out.push_back(cur);
      return;
    }
    if (cur.size() >= max_parts) return;
    EdgeSet low = rest & (~rest + 1);
    std::vector<std::size_t> others = members(rest & ~low);
    std::size_t k = others.size();
    // larger blocks first so the trivial partition leads
    std::vector<EdgeSet> blocks;
    for (std::uint64_t m = 0; m < (std::uint64_t(1) << k); ++m) {
      EdgeSet b = low;
      for (std::size_t i = 0; i < k; ++i)
        if (m >> i & 1) b |= bit(others[i]);
      blocks.push_back(b);
    }
    std::sort(blocks.begin(), blocks.end(), [](EdgeSet a, EdgeSet b) {
      if (popcount(a) != popcount(b)) return popcount(a) > popcount(b);
      return members(a) < members(b);
    });
    for (EdgeSet b : blocks) {
      if (!cls(b).I) continue;
      cur.push_back(b);
      rec(rest & ~b);
      cur.pop_back();
    }
  };
  rec(C);
  return out;
}

inline std::vector<std::size_t> tails(const Network& n, EdgeSet C) {
  std::vector<std::size_t> t;
  for (auto e : members(C)) t.push_back(n.edges()[e].tail);
  return t;
}

inline bool separates(const Network& n, EdgeSet B, EdgeSet C, SourceSet J) {
  std::vector<bool> target(n.nodes().size(), false);
  for (auto v : tails(n, C)) target[v] = true;
  for (auto i : members(J))
    if (n.reaches(n.sources()[i], target, B)) return false;
  return true;
}

inline bool is_separator(const Network& n, EdgeSet C, EdgeSet B) {
  auto c = classify_sources(n, C);
  return n.upstream(B) == c.J && separates(n, B, C, c.J);
}

inline std::vector<EdgeSet> enumerate_separators(const Network& n, EdgeSet C, std::size_t max_size) {
  auto c = classify_sources(n, C);
  if (!c.I) throw Error("NotACut", "edge set is not a cut");
  std::vector<EdgeSet> out;
  // candidate edges must have D_e inside J_C
  EdgeSet pool = 0;
  for (std::size_t e = 0; e < n.num_edges(); ++e)
    if (subset_of(n.upstream(bit(e)), c.J)) pool |= bit(e);
  for (EdgeSet B : subsets_by_size(n.num_edges(), max_size, pool))
    if (n.upstream(B) == c.J && separates(n, B, C, c.J)) out.push_back(B);
  return out;
}

}  // namespace snc
