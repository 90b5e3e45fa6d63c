#pragma once

#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "gf.hpp"
#include "netmodel.hpp"

namespace snc {

// exact non-negative rational, or +infinity
struct Rational {
  long long num = 0, den = 1;
  bool inf = false;

  Rational() = default;
  Rational(long long n, long long d = 1) : num(n), den(d) {
    if (d == 0) throw Error("DivisionByZero", "rational with zero denominator");
    if (den < 0) num = -num, den = -den;
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) num /= g, den /= g;
  }
  static Rational infinity() {
    Rational r;
    r.inf = true;
    return r;
  }
  bool operator<(const Rational& o) const {
    if (inf) return false;
    if (o.inf) return true;
    return static_cast<__int128>(num) * o.den < static_cast<__int128>(o.num) * den;
  }
  bool operator==(const Rational& o) const { return inf == o.inf && (inf || (num == o.num && den == o.den)); }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<=(const Rational& o) const { return !(o < *this); }
  std::string str() const {
    if (inf) return "inf";
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
  }
};

struct BoundConfig {
  std::size_t cut_cap = 0;    // 0 means |E|
  std::size_t sep_cap = 0;
  std::size_t parts_cap = 0;
  bool trivial_partition_only = false;
  bool require_empty_J = false;  // restrict to cuts with J_C empty

  BoundConfig resolved(const Network& n) const {
    BoundConfig c = *this;
    if (!c.cut_cap) c.cut_cap = n.num_edges();
    if (!c.sep_cap) c.sep_cap = n.num_edges();
    if (!c.parts_cap) c.parts_cap = n.num_edges();
    return c;
  }
};

struct BoundReport {
  Rational value = Rational::infinity();
  std::string formula;
  EdgeSet cut = 0;
  Partition partition;
  EdgeSet wiretap = 0;
  std::optional<EdgeSet> separator;
  std::size_t t = 0;
  BoundConfig caps;
  bool found() const { return !value.inf; }
};

// F_A: rows outside A replaced by zero
inline Matrix restrict_rows(const Matrix& F, SourceSet A) {
  Matrix R(F.q(), F.rows(), F.cols());
  for (auto i : members(A))
    for (std::size_t j = 0; j < F.cols(); ++j) R.at(i, j) = F(i, j);
  return R;
}

inline std::size_t t_value(const Network& n, const Partition& parts, const Matrix& F, const Matrix& G) {
  Matrix sum(F.q(), F.rows(), 0);
  for (auto p : parts) sum = sum.hcat(restrict_rows(F, classify_sources(n, p).I));
  return intersection_dim(sum, G);
}

namespace detail {

struct PartitionInfo {
  Partition parts;
  SourceSet covered = 0;
  std::size_t t = 0;
};

inline std::vector<PartitionInfo> valid_partitions(const Network& n, EdgeSet C, const Matrix& F, const Matrix& G,
                                                   const BoundConfig& cfg) {
  std::vector<PartitionInfo> out;
  std::vector<Partition> ps;
  if (cfg.trivial_partition_only)
    ps.push_back({C});
  else
    ps = enumerate_weak_partitions(n, C, cfg.parts_cap);
  for (auto& p : ps) {
    PartitionInfo pi{p, 0, 0};
    for (auto b : p) pi.covered |= classify_sources(n, b).I;
    pi.t = t_value(n, p, F, G);
    if (pi.t) out.push_back(pi);
  }
  return out;
}

// first k members of `pool` in index order
inline EdgeSet take_first(EdgeSet pool, std::size_t k) {
  EdgeSet w = 0;
  for (auto e : members(pool)) {
    if (popcount(w) == k) break;
    w |= bit(e);
  }
  return w;
}

inline std::size_t max_rank(const Matrix& G) { return std::max<std::size_t>(1, rank(G)); }

}  // namespace detail

inline BoundReport upper_bound_thm3(const Network& n, const Matrix& F, const Matrix& G, std::size_t r,
                                    BoundConfig cfg = {}) {
  cfg = cfg.resolved(n);
  BoundReport best;
  best.formula = "thm3";
  best.caps = cfg;
  std::size_t tmax = detail::max_rank(G);
  for (EdgeSet C : enumerate_cuts(n, cfg.cut_cap)) {
    std::size_t c = popcount(C);
    if (best.found() && !(Rational(static_cast<long long>(c - std::min(r, c)), static_cast<long long>(tmax)) < best.value))
      continue;
    auto cls = classify_sources(n, C);
    if (cfg.require_empty_J && cls.J) continue;
    for (auto& pi : detail::valid_partitions(n, C, F, G, cfg)) {
      EdgeSet pool = 0;
      for (auto e : members(C))
        if (subset_of(n.upstream(bit(e)), pi.covered)) pool |= bit(e);
      EdgeSet W = detail::take_first(pool, std::min(r, popcount(pool)));
      Rational v(static_cast<long long>(c - popcount(W)), static_cast<long long>(pi.t));
      if (v < best.value) {
        best.value = v;
        best.cut = C;
        best.partition = pi.parts;
        best.wiretap = W;
        best.t = pi.t;
      }
    }
  }
  return best;
}

inline BoundReport upper_bound_thm5(const Network& n, const Matrix& F, const Matrix& G, std::size_t r,
                                    BoundConfig cfg = {}) {
  cfg = cfg.resolved(n);
  BoundReport best;
  best.formula = "thm5";
  best.caps = cfg;
  std::size_t tmax = detail::max_rank(G);
  for (EdgeSet C : enumerate_cuts(n, cfg.cut_cap)) {
    std::size_t c = popcount(C);
    if (best.found() && !(Rational(static_cast<long long>(c - std::min(r, c)), static_cast<long long>(tmax)) < best.value))
      continue;
    auto cls = classify_sources(n, C);
    auto parts = detail::valid_partitions(n, C, F, G, cfg);
    if (parts.empty()) continue;
    std::vector<EdgeSet> Bs;
    if (!cls.J)
      Bs.push_back(0);
    else
      Bs = enumerate_separators(n, C, cfg.sep_cap);
    for (EdgeSet B : Bs) {
      EdgeSet CB = C | B;
      for (auto& pi : parts) {
        EdgeSet pool = 0;
        for (auto e : members(CB))
          if (subset_of(n.upstream(bit(e)), pi.covered | cls.J)) pool |= bit(e);
        EdgeSet W = detail::take_first(pool, std::min(r, popcount(pool)));
        Rational v(static_cast<long long>(popcount(CB) - popcount(W)), static_cast<long long>(pi.t));
        if (v < best.value) {
          best.value = v;
          best.cut = C;
          best.partition = pi.parts;
          best.separator = B;
          best.wiretap = W;
          best.t = pi.t;
        }
      }
    }
  }
  return best;
}

inline BoundReport nonsecure_bound(const Network& n, const Matrix& F, BoundConfig cfg = {}) {
  cfg = cfg.resolved(n);
  BoundReport best;
  best.formula = "cutset";
  best.caps = cfg;
  for (EdgeSet C : enumerate_cuts(n, cfg.cut_cap)) {
    auto cls = classify_sources(n, C);
    std::size_t rk = rank(restrict_rows(F, cls.I));
    if (!rk) continue;
    Rational v(static_cast<long long>(popcount(C)), static_cast<long long>(rk));
    if (v < best.value) {
      best.value = v;
      best.cut = C;
      best.partition = {C};
      best.t = rk;
    }
  }
  return best;
}

// re-check a returned witness from scratch
inline bool revalidate(const Network& n, const Matrix& F, const Matrix& G, std::size_t r, const BoundReport& b) {
  if (!b.found()) return true;
  if (b.formula != "thm3" && b.formula != "thm5") return true;
  EdgeSet C = b.cut;
  if (!is_cut(n, C) || !is_weak_partition(n, C, b.partition)) return false;
  if (t_value(n, b.partition, F, G) != b.t || b.t == 0) return false;
  if (popcount(b.wiretap) > r) return false;
  SourceSet covered = 0;
  for (auto p : b.partition) covered |= classify_sources(n, p).I;
  auto cls = classify_sources(n, C);
  if (b.formula == "thm3") {
    if (!subset_of(b.wiretap, C) || !subset_of(n.upstream(b.wiretap), covered)) return false;
    return b.value == Rational(static_cast<long long>(popcount(C) - popcount(b.wiretap)), static_cast<long long>(b.t));
  }
  EdgeSet B = b.separator.value_or(0);
  if (!is_separator(n, C, B)) return false;
  if (!subset_of(b.wiretap, C | B) || !subset_of(n.upstream(b.wiretap), covered | cls.J)) return false;
  return b.value == Rational(static_cast<long long>(popcount(C | B) - popcount(b.wiretap)), static_cast<long long>(b.t));
}

enum class Corollary { cor2, cor3, cor4, cor5, identity, branch };

inline std::string corollary_name(Corollary w) {
  switch (w) {
    case Corollary::cor2: return "cor2";
    case Corollary::cor3: return "cor3";
    case Corollary::cor4: return "cor4";
    case Corollary::cor5: return "cor5";
    case Corollary::identity: return "identity";
    case Corollary::branch: return "branch";
  }
  return "";
}

// F is a single column with one nonzero value repeated (algebraic sum up to scaling)
inline bool is_sum_column(const Matrix& F) {
  if (F.cols() != 1 || F.rows() == 0) return false;
  for (std::size_t i = 0; i < F.rows(); ++i)
    if (F(i, 0) == 0 || F(i, 0) != F(0, 0)) return false;
  return true;
}
inline bool spans_everything(const Matrix& M) { return rank(M) == M.rows(); }

inline BoundReport specialized_bounds(const Network& n, const Matrix& F, const Matrix& G, std::size_t r,
                                      Corollary which, BoundConfig cfg = {}) {
  cfg = cfg.resolved(n);
  BoundReport best;
  best.formula = corollary_name(which);
  best.caps = cfg;
  auto wrong = [&](const std::string& why) { throw Error("WrongFunctionClass", best.formula + ": " + why); };
  auto consider = [&](Rational v, EdgeSet C, EdgeSet W, std::optional<EdgeSet> B) {
    if (v < best.value) {
      best.value = v;
      best.cut = C;
      best.partition = {C};
      best.wiretap = W;
      best.separator = B;
      best.t = 1;
    }
  };
  SourceSet S = n.all_sources();
  switch (which) {
    case Corollary::cor2: {
      if (!is_sum_column(F) || !spans_everything(G)) wrong("needs sum target and identity security");
      for (EdgeSet C : enumerate_cuts(n, cfg.cut_cap)) {
        auto cls = classify_sources(n, C);
        EdgeSet pool = 0;
        for (auto e : members(C))
          if (subset_of(n.upstream(bit(e)), cls.I)) pool |= bit(e);
        EdgeSet W = detail::take_first(pool, std::min(r, popcount(pool)));
        consider(Rational(static_cast<long long>(popcount(C) - popcount(W))), C, W, std::nullopt);
      }
      break;
    }
    case Corollary::cor3:
    case Corollary::cor5: {
      if (!is_sum_column(F) || G.cols() == 0 || rank(G) != 1 || !in_span(F, G))
        wrong("needs sum target and sum security");
      for (EdgeSet C : enumerate_cuts(n, cfg.cut_cap)) {
        auto cls = classify_sources(n, C);
        for (EdgeSet W : subsets_by_size(n.num_edges(), std::min(r, popcount(C)), C)) {
          SourceSet DW = n.upstream(W);
          if ((cls.I & ~DW) || (cls.I == S && DW == S))
            consider(Rational(static_cast<long long>(popcount(C) - popcount(W))), C, W, std::nullopt);
        }
      }
      break;
    }
    case Corollary::cor4: {
      if (!is_sum_column(F) || !spans_everything(G)) wrong("needs sum target and identity security");
      for (EdgeSet C : enumerate_cuts(n, cfg.cut_cap)) {
        auto cls = classify_sources(n, C);
        std::optional<EdgeSet> B;
        for (EdgeSet cand : enumerate_separators(n, C, cfg.sep_cap))
          if (!B || popcount(cand & ~C) < popcount(*B & ~C)) B = cand;
        if (!B) continue;
        EdgeSet CB = C | *B;
        EdgeSet W = detail::take_first(CB, std::min(r, popcount(CB)));
        consider(Rational(static_cast<long long>(popcount(CB) - popcount(W))), C, W, B);
        (void)cls;
      }
      break;
    }
    case Corollary::identity: {
      if (!spans_everything(F) || F.cols() != F.rows()) wrong("needs identity target");
      long long s = static_cast<long long>(n.num_sources());
      long long rg = static_cast<long long>(rank(G));
      for (EdgeSet C : enumerate_cuts(n, cfg.cut_cap)) {
        if (classify_sources(n, C).I != S) continue;
        long long c = static_cast<long long>(popcount(C));
        Rational a(c, s);
        Rational v = a;
        if (rg > 0) {
          Rational b(std::max<long long>(0, c - static_cast<long long>(r)), rg);
          if (b < v) v = b;
        }
        consider(v, C, 0, std::nullopt);
        best.t = static_cast<std::size_t>(rg);
      }
      break;
    }
    case Corollary::branch: {
      BoundReport ns = nonsecure_bound(n, F, cfg);
      BoundReport a = upper_bound_thm3(n, F, G, r, cfg);
      BoundReport b = upper_bound_thm5(n, F, G, r, cfg);
      best = ns;
      if (a.value < best.value) best = a;
      if (b.value < best.value) best = b;
      best.formula = "branch(" + best.formula + ")";
      best.caps = cfg;
      break;
    }
  }
  return best;
}

}  // namespace snc
