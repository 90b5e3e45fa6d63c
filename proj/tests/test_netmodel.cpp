#include <gtest/gtest.h>

#include <set>

#include "support.hpp"

using namespace snc;
using snc::testing::fixture;
using snc::testing::Rng;

namespace {

Network single_edge() { return Network::build({"s", "gamma"}, {{"e1", "s", "gamma"}}, {"s"}, "gamma"); }

Network load(const std::string& name) { return io::read_bundle(fixture(name)).net; }

// plain DFS on an edge list, kept apart from Network::reaches
bool path_exists(const Network& n, std::size_t from, std::size_t to, EdgeSet removed) {
  std::vector<bool> seen(n.nodes().size(), false);
  std::vector<std::size_t> st{from};
  seen[from] = true;
  while (!st.empty()) {
    std::size_t v = st.back();
    st.pop_back();
    if (v == to) return true;
    for (std::size_t e = 0; e < n.num_edges(); ++e)
      if (n.edges()[e].tail == v && !(removed >> e & 1) && !seen[n.edges()[e].head]) {
        seen[n.edges()[e].head] = true;
        st.push_back(n.edges()[e].head);
      }
  }
  return false;
}

std::size_t brute_min_cut(const Network& n, std::size_t from, std::size_t to) {
  for (EdgeSet X : subsets_by_size(n.num_edges(), n.num_edges(), n.all_edges()))
    if (!path_exists(n, from, to, X)) return popcount(X);
  return SIZE_MAX;
}

// all set partitions of the members of C, as restricted growth strings
std::vector<Partition> all_partitions(EdgeSet C) {
  auto m = members(C);
  std::vector<Partition> out;
  std::vector<std::size_t> a(m.size(), 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t mx) {
    if (i == m.size()) {
      Partition p(mx, 0);
      for (std::size_t k = 0; k < m.size(); ++k) p[a[k]] |= bit(m[k]);
      out.push_back(p);
      return;
    }
    for (std::size_t b = 0; b <= mx; ++b) {
      a[i] = b;
      rec(i + 1, std::max(mx, b + 1));
    }
  };
  if (!m.empty()) rec(0, 0);
  return out;
}

std::set<std::vector<EdgeSet>> canon(const std::vector<Partition>& ps) {
  std::set<std::vector<EdgeSet>> s;
  for (auto p : ps) {
    std::sort(p.begin(), p.end());
    s.insert(p);
  }
  return s;
}

Network random_valid(Rng& g, std::size_t max_edges) {
  for (;;) {
    Network n = snc::testing::random_network(g, 2 + g() % 2, g() % 3, g() % 4);
    if (validate_network(n).empty() && n.num_edges() <= max_edges) return n;
  }
}

}  // namespace

TEST(Validate, Examples) {
  EXPECT_TRUE(validate_network(single_edge()).empty());
  EXPECT_TRUE(validate_network(load("fig4.json")).empty());
  Network cyc = Network::build({"s", "a", "b", "gamma"},
                               {{"e1", "s", "a"}, {"e2", "a", "b"}, {"e3", "b", "a"}, {"e4", "b", "gamma"}}, {"s"},
                               "gamma");
  auto v = validate_network(cyc);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v[0].rfind("acyclicity", 0), 0u);
}

TEST(Classify, ReferenceCuts) {
  Network f3 = load("fig3.json");
  auto c1 = classify_sources(f3, f3.edge_set({"e31", "e32"}));
  EXPECT_EQ(c1.D, bit(2));
  EXPECT_EQ(c1.I, bit(2));
  Network f4 = load("fig4.json");
  auto c = classify_sources(f4, f4.edge_set({"e7"}));
  EXPECT_EQ(c.I, bit(0));
  EXPECT_EQ(c.J, bit(1));
  auto e = classify_sources(f4, 0);
  EXPECT_EQ(e.D | e.I | e.J, 0u);
  EXPECT_THROW(f4.edge_set({"nope"}), Error);
  EXPECT_THROW(classify_sources(f4, bit(20)), Error);
}

TEST(Classify, RemovalSemantics) {
  Rng g(8);
  for (int it = 0; it < 40; ++it) {
    Network n = random_valid(g, 10);
    for (EdgeSet C : subsets_by_size(n.num_edges(), 3, n.all_edges())) {
      auto c = classify_sources(n, C);
      EXPECT_TRUE(subset_of(c.I, c.D));
      EXPECT_EQ(c.J, c.D & ~c.I);
      for (std::size_t i = 0; i < n.num_sources(); ++i) {
        if (c.I >> i & 1) EXPECT_FALSE(path_exists(n, n.sources()[i], n.sink(), C));
        if (c.J >> i & 1) EXPECT_TRUE(path_exists(n, n.sources()[i], n.sink(), C));
      }
    }
  }
}

TEST(Cuts, Examples) {
  Network f4 = load("fig4.json");
  EXPECT_TRUE(is_cut(f4, f4.in_mask(f4.sink())));
  EXPECT_TRUE(is_cut(f4, f4.edge_set({"e7"})));
  EXPECT_FALSE(is_cut(f4, 0));
  auto one = enumerate_cuts(single_edge(), 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0], bit(0));
  auto cuts = enumerate_cuts(f4, 1);
  EXPECT_NE(std::find(cuts.begin(), cuts.end(), f4.edge_set({"e7"})), cuts.end());
}

TEST(Cuts, BruteForceAndClosure) {
  Rng g(21);
  for (int it = 0; it < 30; ++it) {
    Network n = random_valid(g, 12);
    auto cuts = enumerate_cuts(n, n.num_edges());
    std::size_t count = 0;
    for (EdgeSet C = 1; C <= n.all_edges(); ++C) {
      bool cut = false;
      for (std::size_t i = 0; i < n.num_sources(); ++i) {
        bool through = false;
        for (auto e : members(C)) through = through || path_exists(n, n.sources()[i], n.edges()[e].tail, 0);
        cut = cut || (through && !path_exists(n, n.sources()[i], n.sink(), C));
      }
      count += cut;
    }
    EXPECT_EQ(cuts.size(), count);
    std::set<EdgeSet> s(cuts.begin(), cuts.end());
    for (EdgeSet C : cuts)
      for (std::size_t e = 0; e < n.num_edges(); ++e) EXPECT_TRUE(s.count(C | bit(e)));
  }
}

TEST(MinCut, Examples) {
  Network one = single_edge();
  EXPECT_EQ(min_cut(one, 0, 1).first, 1u);
  auto t5 = io::read_bundle(fixture("tree5.json"));
  EXPECT_EQ(c_min(t5.net), 2u);
  EXPECT_THROW(min_cut(one, 0, 0), Error);
}

TEST(MinCut, BruteForceAndMonotone) {
  Rng g(4);
  for (int it = 0; it < 40; ++it) {
    Network n = random_valid(g, 8);
    for (auto s : n.sources()) {
      auto [v, w] = min_cut(n, s, n.sink());
      EXPECT_EQ(v, brute_min_cut(n, s, n.sink()));
      EXPECT_EQ(popcount(w), v);
      EXPECT_FALSE(path_exists(n, s, n.sink(), w));
    }
    // adding an edge never lowers the value
    std::vector<std::string> nodes = n.nodes();
    std::vector<std::tuple<std::string, std::string, std::string>> edges;
    for (auto& e : n.edges()) edges.emplace_back(e.id, nodes[e.tail], nodes[e.head]);
    edges.emplace_back("extra", nodes[n.sources()[0]], "gamma");
    Network m = Network::build(nodes, edges, n.source_names(n.all_sources()), "gamma");
    for (std::size_t i = 0; i < n.num_sources(); ++i)
      EXPECT_GE(min_cut(m, m.sources()[i], m.sink()).first, min_cut(n, n.sources()[i], n.sink()).first);
  }
}

TEST(Partitions, ReferenceWeakNotStrong) {
  Network f3 = load("fig3.json");
  EdgeSet C1 = f3.edge_set({"e31", "e32"}), C2 = f3.edge_set({"e1", "e2"});
  EdgeSet C = C1 | C2;
  EXPECT_TRUE(is_weak_partition(f3, C, {C1, C2}));
  EXPECT_FALSE(is_strong_partition(f3, C, {C1, C2}));
  auto ps = enumerate_weak_partitions(f3, C);
  ASSERT_FALSE(ps.empty());
  EXPECT_EQ(ps[0], Partition{C});
  EXPECT_TRUE(canon(ps).count({std::min(C1, C2), std::max(C1, C2)}));
  EXPECT_THROW(enumerate_weak_partitions(f3, 0), Error);
  EXPECT_THROW(enumerate_weak_partitions(f3, f3.edge_set({"e1"})), Error);
}

TEST(Partitions, MatchBruteForce) {
  Rng g(17);
  for (int it = 0; it < 30; ++it) {
    Network n = random_valid(g, 9);
    for (EdgeSet C : enumerate_cuts(n, 4)) {
      auto got = enumerate_weak_partitions(n, C);
      EXPECT_TRUE(std::find(got.begin(), got.end(), Partition{C}) != got.end());
      std::vector<Partition> want;
      for (auto& p : all_partitions(C))
        if (is_weak_partition(n, C, p)) want.push_back(p);
      EXPECT_EQ(canon(got), canon(want));
      EXPECT_EQ(got.size(), want.size());
    }
  }
}

TEST(Separators, Examples) {
  Network f4 = load("fig4.json");
  auto seps = enumerate_separators(f4, f4.edge_set({"e7"}), f4.num_edges());
  EXPECT_NE(std::find(seps.begin(), seps.end(), f4.edge_set({"e4"})), seps.end());
  Network f3 = load("fig3.json");
  auto only = enumerate_separators(f3, f3.in_mask(f3.sink()), f3.num_edges());
  ASSERT_EQ(only.size(), 1u);
  EXPECT_EQ(only[0], 0u);
}

TEST(Separators, MatchBruteForce) {
  Rng g(23);
  for (int it = 0; it < 30; ++it) {
    Network n = random_valid(g, 10);
    for (EdgeSet C : enumerate_cuts(n, 2)) {
      auto got = enumerate_separators(n, C, n.num_edges());
      std::vector<EdgeSet> want;
      for (EdgeSet B : subsets_by_size(n.num_edges(), n.num_edges(), n.all_edges()))
        if (is_separator(n, C, B)) want.push_back(B);
      EXPECT_EQ(got, want);
    }
  }
}

TEST(Wiretaps, Counts) {
  auto r0 = enumerate_wiretap_sets(single_edge(), 0);
  ASSERT_EQ(r0.size(), 1u);
  EXPECT_EQ(r0[0], 0u);
  EXPECT_EQ(enumerate_wiretap_sets(load("fig6.json"), 1).size(), 13u);
  EXPECT_EQ(enumerate_wiretap_sets(load("fig4.json"), 2).size(), 29u);
  EXPECT_THROW(enumerate_wiretap_sets(single_edge(), 2), Error);
}
