#include <gtest/gtest.h>

#include <functional>

#include "support.hpp"

using namespace snc;
using snc::testing::fixture;
using snc::testing::Rng;

namespace {

Network load(const std::string& name) { return io::read_bundle(fixture(name)).net; }

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

// every (C, partition, W) and, for the separator form, every B
Rational brute(const Network& n, const Matrix& F, const Matrix& G, std::size_t r, bool with_sep) {
  Rational best = Rational::infinity();
  for (EdgeSet C = 1; C <= n.all_edges(); ++C) {
    if (!is_cut(n, C)) continue;
    auto cls = classify_sources(n, C);
    std::vector<EdgeSet> Bs{0};
    if (with_sep) {
      Bs.clear();
      for (EdgeSet B = 0; B <= n.all_edges(); ++B)
        if (is_separator(n, C, B)) Bs.push_back(B);
    }
    for (auto& p : all_partitions(C)) {
      if (!is_weak_partition(n, C, p)) continue;
      std::size_t t = t_value(n, p, F, G);
      if (!t) continue;
      SourceSet cov = 0;
      for (auto b : p) cov |= classify_sources(n, b).I;
      if (with_sep) cov |= cls.J;
      for (EdgeSet B : Bs) {
        EdgeSet CB = C | B;
        for (EdgeSet W = CB;; W = (W - 1) & CB) {
          if (popcount(W) <= r && subset_of(n.upstream(W), cov)) {
            Rational v(static_cast<long long>(popcount(CB) - popcount(W)), static_cast<long long>(t));
            if (v < best) best = v;
          }
          if (!W) break;
        }
      }
    }
  }
  return best;
}

Network random_valid(Rng& g, std::size_t max_edges) {
  for (;;) {
    Network n = snc::testing::random_network(g, 2 + g() % 2, g() % 3, g() % 3);
    if (validate_network(n).empty() && n.num_edges() <= max_edges) return n;
  }
}

}  // namespace

TEST(Bounds, ReferenceFig4) {
  auto b = io::read_bundle(fixture("fig4.json"));
  auto a = upper_bound_thm3(b.net, b.fn.F, b.fn.G, 2);
  auto c = upper_bound_thm5(b.net, b.fn.F, b.fn.G, 2);
  EXPECT_EQ(a.value, Rational(1));
  EXPECT_EQ(c.value, Rational(0));
  EXPECT_EQ(c.cut, b.net.edge_set({"e7"}));
  ASSERT_TRUE(c.separator);
  EXPECT_EQ(*c.separator, b.net.edge_set({"e4"}));
  EXPECT_EQ(c.wiretap, b.net.edge_set({"e4", "e7"}));
  EXPECT_TRUE(revalidate(b.net, b.fn.F, b.fn.G, 2, a));
  EXPECT_TRUE(revalidate(b.net, b.fn.F, b.fn.G, 2, c));
  auto bad = c;
  bad.value = Rational(1, 2);
  EXPECT_FALSE(revalidate(b.net, b.fn.F, b.fn.G, 2, bad));
}

TEST(Bounds, SingleEdge) {
  Network n = Network::build({"s", "gamma"}, {{"e1", "s", "gamma"}}, {"s"}, "gamma");
  Matrix one = Matrix::identity(5, 1);
  EXPECT_EQ(upper_bound_thm3(n, one, one, 1).value, Rational(0));
  EXPECT_EQ(upper_bound_thm3(n, one, one, 0).value, Rational(1));
  EXPECT_EQ(nonsecure_bound(n, one).value, Rational(1));
}

TEST(Bounds, ZeroSecurityGivesCutCapacity) {
  Rng g(41);
  for (int it = 0; it < 30; ++it) {
    Network n = random_valid(g, 8);
    Matrix S = sum_column(5, n.num_sources());
    EXPECT_EQ(upper_bound_thm3(n, S, Matrix::identity(5, n.num_sources()), 0).value, Rational(static_cast<long long>(c_min(n))));
  }
}

TEST(Bounds, MatchExhaustiveSearch) {
  Rng g(7);
  for (int it = 0; it < 40; ++it) {
    Network n = random_valid(g, 7);
    elem q = it % 2 ? 2 : 3;
    Matrix F = snc::testing::random_matrix(g, q, n.num_sources(), 1 + it % 2);
    Matrix G = snc::testing::random_matrix(g, q, n.num_sources(), 1 + (it / 2) % 2);
    std::size_t r = 1 + it % 2;
    auto a = upper_bound_thm3(n, F, G, r);
    auto b = upper_bound_thm5(n, F, G, r);
    EXPECT_EQ(a.value, brute(n, F, G, r, false)) << it;
    EXPECT_EQ(b.value, brute(n, F, G, r, true)) << it;
    EXPECT_TRUE(revalidate(n, F, G, r, a));
    EXPECT_TRUE(revalidate(n, F, G, r, b));
    BoundConfig only_empty_J;
    only_empty_J.require_empty_J = true;
    EXPECT_LE(b.value, upper_bound_thm3(n, F, G, r, only_empty_J).value);
  }
}

TEST(Bounds, SpecializedSumIdentity) {
  Network f6 = load("fig6.json");
  Matrix S = sum_column(5, 4), I = Matrix::identity(5, 4);
  EXPECT_EQ(specialized_bounds(f6, S, I, 1, Corollary::cor2).value, Rational(1));
  Rng g(13);
  for (int it = 0; it < 25; ++it) {
    Network n = random_valid(g, 8);
    std::size_t s = n.num_sources();
    Matrix Sn = sum_column(3, s), In = Matrix::identity(3, s);
    BoundConfig triv;
    triv.trivial_partition_only = true;
    for (std::size_t r = 0; r <= 2; ++r)
      EXPECT_EQ(specialized_bounds(n, Sn, In, r, Corollary::cor2).value, upper_bound_thm3(n, Sn, In, r, triv).value);
    EXPECT_EQ(specialized_bounds(n, Sn, Sn, 1, Corollary::cor3).value.inf, false);
    EXPECT_LE(specialized_bounds(n, Sn, In, 1, Corollary::cor4).value,
              Rational(static_cast<long long>(n.in_mask(n.sink()) ? popcount(n.in_mask(n.sink())) : 0)));
  }
}

TEST(Bounds, SpecializedIdentityAndBranch) {
  Network n = Network::build({"s1", "s2", "gamma"}, {{"e1", "s1", "gamma"}, {"e2", "s2", "gamma"}, {"e3", "s2", "gamma"}},
                             {"s1", "s2"}, "gamma");
  Matrix I = Matrix::identity(5, 2);
  // min(3/2, (3-1)/2)
  EXPECT_EQ(specialized_bounds(n, I, I, 1, Corollary::identity).value, Rational(1));
  EXPECT_EQ(specialized_bounds(n, I, I, 0, Corollary::identity).value, Rational(3, 2));
  auto c1 = io::read_bundle(fixture("case1.json"));
  auto bs = decompose_branches(*c1.tree);
  EXPECT_EQ(specialized_bounds(bs[0].net, bs[0].F, bs[0].G, 1, Corollary::branch).value, Rational(3, 2));
  auto t5 = io::read_bundle(fixture("tree5.json"));
  EXPECT_EQ(nonsecure_bound(t5.net, t5.fn.F).value, Rational(2));
}

TEST(Bounds, WrongFunctionClass) {
  Network f6 = load("fig6.json");
  Matrix I = Matrix::identity(5, 4);
  try {
    specialized_bounds(f6, I, I, 1, Corollary::cor2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "WrongFunctionClass");
  }
  EXPECT_THROW(specialized_bounds(f6, sum_column(5, 4), I, 1, Corollary::cor3), Error);
  EXPECT_THROW(specialized_bounds(f6, sum_column(5, 4), I, 1, Corollary::identity), Error);
}

TEST(Bounds, CapsAreReported) {
  auto b = io::read_bundle(fixture("fig4.json"));
  BoundConfig cfg;
  cfg.cut_cap = 1;
  auto a = upper_bound_thm3(b.net, b.fn.F, b.fn.G, 2, cfg);
  EXPECT_EQ(a.caps.cut_cap, 1u);
  EXPECT_EQ(a.caps.sep_cap, b.net.num_edges());
  EXPECT_TRUE(revalidate(b.net, b.fn.F, b.fn.G, 2, a));
}
