#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "codes.hpp"

namespace snc {

// Exhaustive verifier. A random variable is any linear image x * M of the uniform input
// x = (m_1, k_1, ..., m_s, k_s); everything below is counted over all q^N inputs.

inline constexpr std::uint64_t kDefaultSpaceCap = 390625;  // 5^8

struct Info {
  long double value = 0;       // in units of log q
  bool zero = false;           // exact: established from integer counts
  std::optional<long long> units;  // exact value when the law is uniform on q^k points
};

class Enumerator {
 public:
  Enumerator(elem q, std::size_t N, std::uint64_t cap) : q_(q), N_(N) {
    long double sz = std::pow(static_cast<long double>(q), static_cast<long double>(N));
    if (sz > static_cast<long double>(cap)) throw Error("TooLarge", "state space exceeds the oracle cap");
    size_ = 1;
    for (std::size_t i = 0; i < N; ++i) size_ *= q;
  }
  std::uint64_t size() const { return size_; }

  // visit every input; f receives the images x*M_j for each supplied map, as flat codes
  template <class Fn>
  void run(const std::vector<Matrix>& maps, Fn&& f) const {
    std::vector<std::vector<elem>> y(maps.size());
    for (std::size_t j = 0; j < maps.size(); ++j) y[j].assign(maps[j].cols(), 0);
    std::vector<elem> x(N_, 0);
    for (std::uint64_t it = 0; it < size_; ++it) {
      f(x, y);
      // odometer step: each digit touched moves by +1 mod q, so add its row once
      for (std::size_t i = 0; i < N_; ++i) {
        x[i] = (x[i] + 1) % q_;
        for (std::size_t j = 0; j < maps.size(); ++j)
          for (std::size_t c = 0; c < maps[j].cols(); ++c) y[j][c] = (y[j][c] + maps[j](i, c)) % q_;
        if (x[i] != 0) break;
      }
    }
  }

 private:
  elem q_;
  std::size_t N_;
  std::uint64_t size_ = 1;
};

namespace detail {

struct VecHash {
  std::size_t operator()(const std::vector<elem>& v) const {
    std::size_t h = 1469598103934665603ull;
    for (auto x : v) h = (h ^ x) * 1099511628211ull;
    return h;
  }
};

using Counts = std::unordered_map<std::vector<elem>, std::uint64_t, VecHash>;

inline long double entropy_of(const Counts& c, std::uint64_t total, elem q) {
  long double h = 0;
  for (auto& [k, n] : c) {
    long double p = static_cast<long double>(n) / static_cast<long double>(total);
    h -= p * std::log(p);
  }
  return h / std::log(static_cast<long double>(q));
}

inline std::optional<long long> uniform_units(const Counts& c, std::uint64_t total, elem q) {
  std::uint64_t first = c.begin()->second;
  for (auto& [k, n] : c)
    if (n != first) return std::nullopt;
  std::uint64_t support = total / first;
  long long u = 0;
  while (support > 1) {
    if (support % q) return std::nullopt;
    support /= q;
    ++u;
  }
  return u;
}

}  // namespace detail

inline Info entropy(const Matrix& X, std::uint64_t cap = kDefaultSpaceCap) {
  Enumerator en(X.q(), X.rows(), cap);
  detail::Counts c;
  en.run({X}, [&](const std::vector<elem>&, const std::vector<std::vector<elem>>& y) { ++c[y[0]]; });
  Info r;
  r.units = detail::uniform_units(c, en.size(), X.q());
  r.value = r.units ? static_cast<long double>(*r.units) : detail::entropy_of(c, en.size(), X.q());
  r.zero = c.size() == 1;
  return r;
}

namespace detail {

template <class Key, class Hash, class Enc>
Info mi_impl(const Matrix& X, const Matrix& Y, std::uint64_t cap, Enc enc) {
  Enumerator en(X.q(), X.rows(), cap);
  std::unordered_map<Key, std::uint64_t, Hash> cx, cy, cxy;
  en.run({X, Y}, [&](const std::vector<elem>&, const std::vector<std::vector<elem>>& v) {
    Key a = enc(v[0], nullptr), b = enc(v[1], nullptr);
    ++cx[a];
    ++cy[b];
    ++cxy[enc(v[0], &v[1])];
  });
  auto H = [&](const auto& c) {
    long double h = 0;
    for (auto& [k, n] : c) {
      long double p = static_cast<long double>(n) / static_cast<long double>(en.size());
      h -= p * std::log(p);
    }
    return h / std::log(static_cast<long double>(X.q()));
  };
  // exact independence: every pair occurs and N * c(x,y) == c(x) c(y); with the product
  // support fully present this reduces to all joint counts being N / (|X| |Y|) times the marginals
  bool indep = cxy.size() == cx.size() * cy.size();
  if (indep) {
    std::vector<std::uint64_t> mx, my;
    for (auto& [k, n] : cx) mx.push_back(n);
    for (auto& [k, n] : cy) my.push_back(n);
    // linear images give uniform marginals; check that, then the joint must be uniform too
    bool ux = std::all_of(mx.begin(), mx.end(), [&](auto n) { return n == mx[0]; });
    bool uy = std::all_of(my.begin(), my.end(), [&](auto n) { return n == my[0]; });
    unsigned __int128 want = static_cast<unsigned __int128>(mx[0]) * my[0];
    indep = ux && uy;
    if (indep)
      for (auto& [k, n] : cxy)
        if (static_cast<unsigned __int128>(en.size()) * n != want) {
          indep = false;
          break;
        }
  }
  Info r;
  r.zero = indep;
  r.value = indep ? 0.0L : std::max<long double>(0, H(cx) + H(cy) - H(cxy));
  if (indep) r.units = 0;
  return r;
}

struct U64Hash {
  std::size_t operator()(std::uint64_t x) const {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdull;
    x ^= x >> 33;
    return static_cast<std::size_t>(x);
  }
};

}  // namespace detail

inline Info mutual_information(const Matrix& X, const Matrix& Y, std::uint64_t cap = kDefaultSpaceCap) {
  if (X.rows() != Y.rows()) throw Error("ShapeError", "variables live on different spaces");
  X.same_field(Y);
  elem q = X.q();
  long double bits = static_cast<long double>(X.cols() + Y.cols() + 1) * std::log2(static_cast<long double>(q));
  if (bits < 62) {
    // values packed base q, with a leading 1 marking joint keys apart from marginal keys
    return detail::mi_impl<std::uint64_t, detail::U64Hash>(
        X, Y, cap, [q](const std::vector<elem>& a, const std::vector<elem>* b) {
          std::uint64_t k = 1;
          for (auto x : a) k = k * q + x;
          if (b)
            for (auto x : *b) k = k * q + x;
          return k;
        });
  }
  return detail::mi_impl<std::vector<elem>, detail::VecHash>(
      X, Y, cap, [](const std::vector<elem>& a, const std::vector<elem>* b) {
        std::vector<elem> k = a;
        if (b) k.insert(k.end(), b->begin(), b->end());
        return k;
      });
}

struct ExactSecurity {
  bool secure = true;
  std::vector<std::pair<EdgeSet, Info>> table;
};

inline ExactSecurity verify_security_exact(const LinearSecureCode& c, const Matrix& G,
                                           const std::vector<EdgeSet>& wiretaps,
                                           std::uint64_t cap = kDefaultSpaceCap) {
  Enumerator probe(c.q, c.total_rows(), cap);
  (void)probe;
  Matrix S = build_S(G, c);
  ExactSecurity r;
  for (EdgeSet W : wiretaps) {
    Info I = mutual_information(c.stack(W), S, cap);
    if (!I.zero) r.secure = false;
    r.table.push_back({W, I});
  }
  return r;
}

struct ExactDecodability {
  bool decodable = true;
  std::optional<std::pair<std::vector<elem>, std::vector<elem>>> collision;  // two inputs, same sink view
};

inline ExactDecodability verify_decodability_exact(const Network& net, const LinearSecureCode& c, const Matrix& F,
                                                   std::uint64_t cap = kDefaultSpaceCap) {
  Matrix H = c.sink_matrix(net);
  Matrix Sf = build_S(F, c);
  Enumerator en(c.q, c.total_rows(), cap);
  std::unordered_map<std::vector<elem>, std::pair<std::vector<elem>, std::vector<elem>>, detail::VecHash> seen;
  ExactDecodability r;
  en.run({H, Sf}, [&](const std::vector<elem>& x, const std::vector<std::vector<elem>>& v) {
    if (!r.decodable) return;
    auto it = seen.find(v[0]);
    if (it == seen.end()) {
      seen.emplace(v[0], std::make_pair(v[1], x));
    } else if (it->second.first != v[1]) {
      r.decodable = false;
      r.collision = std::make_pair(it->second.second, x);
    }
  });
  return r;
}

}  // namespace snc
