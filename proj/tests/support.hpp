#pragma once

#include <random>
#include <string>
#include <vector>

#include "snc/io.hpp"
#include "snc/oracle.hpp"
#include "snc/sumsec.hpp"
#include "snc/treesec.hpp"

#ifndef SNC_FIXTURE_DIR
#define SNC_FIXTURE_DIR "fixtures"
#endif

namespace snc::testing {

inline std::string fixture(const std::string& name) { return std::string(SNC_FIXTURE_DIR) + "/" + name; }

using Rng = std::mt19937_64;

inline elem pick(Rng& g, elem lo, elem hi) { return std::uniform_int_distribution<elem>(lo, hi)(g); }

inline Matrix random_matrix(Rng& g, elem q, std::size_t rows, std::size_t cols, double density = 1.0) {
  Matrix M(q, rows, cols);
  std::bernoulli_distribution keep(density);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      if (keep(g)) M.at(i, j) = pick(g, 0, q - 1);
  return M;
}

// small DAG: sources, a few middle nodes in a chain-compatible order, one sink
inline Network random_network(Rng& g, std::size_t s, std::size_t mids, std::size_t extra) {
  std::vector<std::string> nodes;
  std::vector<std::string> sources;
  for (std::size_t i = 0; i < s; ++i) {
    nodes.push_back("s" + std::to_string(i + 1));
    sources.push_back(nodes.back());
  }
  for (std::size_t i = 0; i < mids; ++i) nodes.push_back("v" + std::to_string(i + 1));
  nodes.push_back("gamma");
  std::vector<std::tuple<std::string, std::string, std::string>> edges;
  std::size_t id = 0;
  auto add = [&](const std::string& a, const std::string& b) { edges.emplace_back("e" + std::to_string(++id), a, b); };
  // targets of node k are middles with larger index or the sink
  auto target_after = [&](std::size_t first_mid) {
    std::size_t span = mids - first_mid + 1;
    std::size_t k = static_cast<std::size_t>(pick(g, 0, span - 1));
    return k + first_mid < mids ? "v" + std::to_string(k + first_mid + 1) : std::string("gamma");
  };
  for (std::size_t i = 0; i < s; ++i) add(sources[i], target_after(0));
  for (std::size_t m = 0; m < mids; ++m) add("v" + std::to_string(m + 1), target_after(m + 1));
  for (std::size_t x = 0; x < extra; ++x) {
    std::size_t from = static_cast<std::size_t>(pick(g, 0, s + mids - 1));
    if (from < s) add(sources[from], target_after(0));
    else add("v" + std::to_string(from - s + 1), target_after(from - s + 1));
  }
  return Network::build(nodes, edges, sources, "gamma");
}

// three-layer network with every source reaching some middle node
inline Network random_three_layer(Rng& g, std::size_t s, std::size_t mids, std::size_t per_source) {
  std::vector<std::string> nodes, sources;
  for (std::size_t i = 0; i < s; ++i) {
    nodes.push_back("s" + std::to_string(i + 1));
    sources.push_back(nodes.back());
  }
  for (std::size_t i = 0; i < mids; ++i) nodes.push_back("v" + std::to_string(i + 1));
  nodes.push_back("gamma");
  std::vector<std::tuple<std::string, std::string, std::string>> edges;
  std::size_t id = 0;
  std::vector<std::size_t> indeg(mids, 0);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t k = 0; k < per_source; ++k) {
      std::size_t m = static_cast<std::size_t>(pick(g, 0, mids));
      if (m == mids) {
        edges.emplace_back("e" + std::to_string(++id), sources[i], "gamma");
      } else {
        edges.emplace_back("e" + std::to_string(++id), sources[i], "v" + std::to_string(m + 1));
        ++indeg[m];
      }
    }
  for (std::size_t m = 0; m < mids; ++m) {
    if (!indeg[m]) edges.emplace_back("e" + std::to_string(++id), sources[m % s], "v" + std::to_string(m + 1));
    std::size_t outs = static_cast<std::size_t>(pick(g, 1, 2));
    for (std::size_t k = 0; k < outs; ++k) edges.emplace_back("e" + std::to_string(++id), "v" + std::to_string(m + 1), "gamma");
  }
  return Network::build(nodes, edges, sources, "gamma");
}

inline LocalCode random_local_code(Rng& g, const Network& n, elem q, std::size_t l, std::size_t nn,
                                   const std::vector<std::size_t>& z, double density = 0.6) {
  LocalCode lc{q, l, nn, z, {}, {}, {}};
  for (std::size_t e = 0; e < n.num_edges(); ++e) {
    std::size_t tail = n.edges()[e].tail;
    long s = n.source_position(tail);
    if (s >= 0) {
      lc.msg[e] = random_matrix(g, q, l, nn, density);
      lc.key[e] = random_matrix(g, q, z[static_cast<std::size_t>(s)], nn, density);
    } else {
      for (auto d : n.in_edges(tail)) lc.mix[{d, e}] = random_matrix(g, q, nn, nn, density);
    }
  }
  return lc;
}

struct RandomCodeCase {
  Network net;
  LinearSecureCode code;
  Matrix F, G;
  std::size_t r = 1;
};

// randomized code with total space q^(s l + sum z) <= cap
inline RandomCodeCase random_code_case(Rng& g, std::uint64_t cap = 15625) {
  static const elem qs[] = {2, 3, 5};
  for (;;) {
    elem q = qs[pick(g, 0, 2)];
    std::size_t s = static_cast<std::size_t>(pick(g, 1, 3));
    std::size_t l = static_cast<std::size_t>(pick(g, 1, 2));
    std::vector<std::size_t> z(s);
    for (auto& x : z) x = static_cast<std::size_t>(pick(g, 0, 2));
    std::size_t N = s * l;
    for (auto x : z) N += x;
    long double space = std::pow(static_cast<long double>(q), static_cast<long double>(N));
    if (space > static_cast<long double>(cap)) continue;
    Network net = random_network(g, s, static_cast<std::size_t>(pick(g, 0, 2)), static_cast<std::size_t>(pick(g, 0, 3)));
    if (!validate_network(net).empty()) continue;
    std::size_t nn = static_cast<std::size_t>(pick(g, 1, 2));
    RandomCodeCase c;
    c.net = net;
    c.code = derive_global(net, random_local_code(g, net, q, l, nn, z));
    c.F = random_matrix(g, q, s, static_cast<std::size_t>(pick(g, 1, 2)));
    c.G = random_matrix(g, q, s, static_cast<std::size_t>(pick(g, 1, 2)));
    c.r = static_cast<std::size_t>(pick(g, 1, std::min<std::size_t>(2, net.num_edges())));
    return c;
  }
}

// first prime strictly above x
inline elem next_prime(elem x) {
  elem p = x + 1;
  while (!is_prime(p)) ++p;
  return p;
}

}  // namespace snc::testing
