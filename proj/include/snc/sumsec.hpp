#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "codes.hpp"
#include "oracle.hpp"

namespace snc {

// an (R,1) code computing the sum, stored as a code with l = R and no keys
struct BaseSumCode {
  std::size_t R = 0;
  LinearSecureCode code;
};

inline Matrix sum_column(elem q, std::size_t s) {
  Matrix F(q, s, 1);
  for (std::size_t i = 0; i < s; ++i) F.at(i, 0) = 1;
  return F;
}

inline BaseSumCode base_from_vectors(const Network& net, elem q, std::size_t R,
                                     const std::vector<std::vector<long long>>& h) {
  if (h.size() != net.num_edges()) throw Error("ShapeError", "one global vector per edge expected");
  BaseSumCode b;
  b.R = R;
  b.code = {q, R, 1, std::vector<std::size_t>(net.num_sources(), 0), {}};
  for (auto& v : h) {
    if (v.size() != R * net.num_sources()) throw Error("ShapeError", "global vector length must be R*s");
    b.code.global.push_back(Matrix::column(q, v));
  }
  return b;
}

inline bool base_decodes(const Network& net, const BaseSumCode& b) {
  return check_decodability(net, b.code, sum_column(b.code.q, net.num_sources())).decodable;
}

// rows of G that will play the role of the identity block after column operations
inline std::vector<std::size_t> pivot_sources(const Matrix& G) { return rref(G.transpose()).pivots; }

struct BSelection {
  bool ok = false;
  Matrix B, Binv;
  std::vector<std::size_t> pivots;
  std::size_t stuck_j = 0;              // 1-based index of the b_j that could not be placed
  std::vector<Matrix> prefix;           // b_1..b_{j-1} chosen before getting stuck
  std::uint64_t scanned = 0;            // candidates examined at the stuck index
  bool hypothesis = false;              // q > r_g |W_r|
  std::size_t wiretap_count = 0;
};

namespace detail {

// all distinct spans <H_W^{(sigma_i)}> for W in W_r and pivot sources i, as column bases
inline std::vector<Matrix> forbidden_spans(const BaseSumCode& b, const std::vector<EdgeSet>& wiretaps,
                                           const std::vector<std::size_t>& pivots) {
  std::vector<Matrix> out;
  std::vector<Matrix> canon;
  for (EdgeSet W : wiretaps) {
    Matrix H = b.code.stack(W);
    for (auto i : pivots) {
      Matrix blk = column_basis(H.block(i * b.R, 0, b.R, H.cols()));
      Matrix key = rref(blk.transpose()).R;
      bool dup = false;
      for (auto& c : canon)
        if (c == key) {
          dup = true;
          break;
        }
      if (dup) continue;
      canon.push_back(key);
      out.push_back(blk);
    }
  }
  return out;
}

// lexicographic enumeration of nonzero vectors of F_q^R, first coordinate most significant
inline Matrix nth_vector(elem q, std::size_t R, std::uint64_t idx) {
  Matrix v(q, R, 1);
  for (std::size_t k = R; k-- > 0;) {
    v.at(k, 0) = idx % q;
    idx /= q;
  }
  return v;
}

inline std::uint64_t space_size(elem q, std::size_t R) {
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < R; ++i) n *= q;
  return n;
}

// is v outside L + <prefix> for every L
inline bool avoids(const Matrix& v, const std::vector<Matrix>& spans, const Matrix& prefix) {
  for (auto& L : spans)
    if (in_span(v, L.hcat(prefix))) return false;
  return true;
}

}  // namespace detail

inline BSelection try_select_b_vectors(const Network& net, const BaseSumCode& b, const Matrix& G, std::size_t r) {
  elem q = b.code.q;
  std::size_t R = b.R;
  if (r > R) throw Error("DegenerateInput", "security level exceeds the base rate");
  auto wiretaps = enumerate_wiretap_sets(net, r);
  BSelection out;
  out.pivots = pivot_sources(G);
  out.wiretap_count = wiretaps.size();
  out.hypothesis = static_cast<long double>(q) > static_cast<long double>(out.pivots.size()) * wiretaps.size();
  auto spans = detail::forbidden_spans(b, wiretaps, out.pivots);
  Matrix chosen(q, R, 0);
  std::uint64_t total = detail::space_size(q, R);
  for (std::size_t j = 1; j <= R; ++j) {
    bool placed = false;
    std::uint64_t scanned = 0;
    for (std::uint64_t idx = 1; idx < total; ++idx) {
      ++scanned;
      Matrix v = detail::nth_vector(q, R, idx);
      bool ok = j <= R - r ? detail::avoids(v, spans, chosen) : !in_span(v, chosen);
      if (ok) {
        chosen = chosen.hcat(v);
        placed = true;
        break;
      }
    }
    if (!placed) {
      out.stuck_j = j;
      out.scanned = scanned;
      for (std::size_t k = 0; k < chosen.cols(); ++k) out.prefix.push_back(chosen.select_cols({k}));
      return out;
    }
  }
  out.ok = true;
  out.Binv = chosen;
  out.B = *inverse(chosen);
  return out;
}

inline BSelection select_b_vectors(const Network& net, const BaseSumCode& b, const Matrix& G, std::size_t r) {
  BSelection s = try_select_b_vectors(net, b, G, r);
  if (!s.ok)
    throw Error("FieldTooSmall", "no admissible b_" + std::to_string(s.stuck_j) + " after scanning " +
                                     std::to_string(s.scanned) + " candidates");
  return s;
}

inline LinearSecureCode transform_code(const BaseSumCode& b, const Matrix& B, std::size_t r) {
  if (!inverse(B)) throw Error("DegenerateInput", "transform matrix is singular");
  std::size_t s = b.code.num_sources();
  Matrix Bh = kronecker(Matrix::identity(b.code.q, s), B);
  LinearSecureCode c{b.code.q, b.R - r, 1, std::vector<std::size_t>(s, r), {}};
  for (auto& h : b.code.global) c.global.push_back(Bh * h);
  return c;
}

// <B^-1 S> meets every <H_W> trivially, with H_W taken from the base code
inline bool b_condition_holds(const Network& net, const BaseSumCode& b, const Matrix& B, const Matrix& G,
                              std::size_t r) {
  std::size_t s = b.code.num_sources();
  Matrix Binv = *inverse(B);
  Matrix S = build_S(G, b.R - r, std::vector<std::size_t>(s, r));
  Matrix BS = kronecker(Matrix::identity(b.code.q, s), Binv) * S;
  for (EdgeSet W : enumerate_wiretap_sets(net, r))
    if (W && intersect_spans(b.code.stack(W), BS).cols() > 0) return false;
  return true;
}

// three-layer shape: every edge is source->middle, middle->sink or source->sink
inline bool is_three_layer(const Network& net) {
  for (auto& e : net.edges()) {
    bool ts = net.source_position(e.tail) >= 0, hs = e.head == net.sink();
    bool tm = !ts && e.tail != net.sink(), hm = !hs && net.source_position(e.head) < 0;
    if (!((ts && hm) || (tm && hs) || (ts && hs))) return false;
  }
  return true;
}

// each source talks to exactly one middle node, middles only to the sink
inline bool is_tree_like(const Network& net) {
  if (!is_three_layer(net)) return false;
  for (auto s : net.sources()) {
    std::optional<std::size_t> mid;
    for (auto e : net.out_edges(s)) {
      std::size_t h = net.edges()[e].head;
      if (h == net.sink()) return false;
      if (mid && *mid != h) return false;
      mid = h;
    }
  }
  return true;
}

// forwarding plus middle-node summation at rate R
inline BaseSumCode tree_base(const Network& net, elem q, std::size_t R) {
  std::size_t s = net.num_sources();
  LocalCode lc{q, R, 1, std::vector<std::size_t>(s, 0), {}, {}, {}};
  for (std::size_t i = 0; i < s; ++i) {
    auto& outs = net.out_edges(net.sources()[i]);
    for (std::size_t k = 0; k < outs.size(); ++k) {
      Matrix a(q, R, 1);
      if (k < R) a.at(k, 0) = 1;
      lc.msg[outs[k]] = a;
    }
  }
  for (std::size_t v = 0; v < net.nodes().size(); ++v) {
    if (v == net.sink() || net.source_position(v) >= 0) continue;
    auto& outs = net.out_edges(v);
    for (std::size_t k = 0; k < outs.size(); ++k)
      for (auto d : net.in_edges(v)) {
        std::size_t tail = net.edges()[d].tail;
        auto& so = net.out_edges(tail);
        std::size_t pos = static_cast<std::size_t>(std::find(so.begin(), so.end(), d) - so.begin());
        Matrix m(q, 1, 1);
        if (k < R && pos == k) m.at(0, 0) = 1;
        lc.mix[{d, outs[k]}] = m;
      }
  }
  return {R, derive_global(net, lc)};
}

// seeded random local coefficients until the sink can form the sum
inline std::optional<BaseSumCode> random_base(const Network& net, elem q, std::size_t R, std::uint64_t seed,
                                              std::size_t attempts) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<elem> U(0, q - 1);
  std::size_t s = net.num_sources();
  for (std::size_t a = 0; a < attempts; ++a) {
    LocalCode lc{q, R, 1, std::vector<std::size_t>(s, 0), {}, {}, {}};
    for (std::size_t e = 0; e < net.num_edges(); ++e) {
      std::size_t tail = net.edges()[e].tail;
      if (net.source_position(tail) >= 0) {
        Matrix m(q, R, 1);
        for (std::size_t i = 0; i < R; ++i) m.at(i, 0) = U(rng);
        lc.msg[e] = m;
      } else {
        for (auto d : net.in_edges(tail)) {
          Matrix m(q, 1, 1);
          m.at(0, 0) = U(rng);
          lc.mix[{d, e}] = m;
        }
      }
    }
    BaseSumCode b{R, derive_global(net, lc)};
    if (base_decodes(net, b)) return b;
  }
  return std::nullopt;
}

struct SumOptions {
  std::uint64_t seed = 1;
  std::size_t attempts = 4000;
  std::uint64_t oracle_cap = kDefaultSpaceCap;
  bool allow_small_field = true;  // try even when q <= r_g |W_r|
};

struct SumResult {
  LinearSecureCode code;
  BaseSumCode base;
  std::string base_origin;  // user | auto-tree | auto-search
  BSelection selection;
  std::size_t rate = 0;
  bool oracle_checked = false;
};

inline SumResult construct_secure_sum(const Network& net, const Matrix& G, std::size_t r,
                                      std::optional<BaseSumCode> base, const SumOptions& opt = {}) {
  elem q = G.q();
  std::size_t s = net.num_sources();
  SumResult res;
  if (base) {
    if (base->code.q != q) throw Error("FieldMismatch", "base code and G use different moduli");
    if (!base_decodes(net, *base)) throw Error("ConstructionBug", "supplied base code does not compute the sum");
    res.base = *base;
    res.base_origin = "user";
  } else {
    std::size_t R = c_min(net);
    if (r > R) throw Error("DegenerateInput", "security level exceeds C_min");
    if (is_tree_like(net)) {
      res.base = tree_base(net, q, R);
      res.base_origin = "auto-tree";
      if (!base_decodes(net, res.base)) throw Error("NeedUserBaseCode", "tree forwarding base does not decode");
    } else if (is_three_layer(net)) {
      auto b = random_base(net, q, R, opt.seed, opt.attempts);
      if (!b) throw Error("NeedUserBaseCode", "no (C_min,1) sum code found by seeded search");
      res.base = *b;
      res.base_origin = "auto-search";
    } else {
      throw Error("NeedUserBaseCode", "automatic base codes cover three-layer networks only");
    }
  }
  if (r > res.base.R) throw Error("DegenerateInput", "security level exceeds the base rate");
  Matrix Gb = column_basis(G);
  res.selection = try_select_b_vectors(net, res.base, Gb, r);
  if (!res.selection.ok)
    throw Error("FieldTooSmall", "no admissible b_" + std::to_string(res.selection.stuck_j));
  res.code = transform_code(res.base, res.selection.B, r);
  res.rate = res.base.R - r;
  if (!b_condition_holds(net, res.base, res.selection.B, Gb, r))
    throw Error("ConstructionBug", "transform violates the B condition");
  if (!check_decodability(net, res.code, sum_column(q, s)).decodable)
    throw Error("ConstructionBug", "transformed code does not decode the sum");
  auto wiretaps = enumerate_wiretap_sets(net, r);
  if (!check_security_subspace(res.code, build_S(Gb, res.code), wiretaps).secure)
    throw Error("ConstructionBug", "transformed code is not secure");
  long double space = std::pow(static_cast<long double>(q), static_cast<long double>(res.code.total_rows()));
  if (space <= static_cast<long double>(opt.oracle_cap)) {
    if (!verify_security_exact(res.code, Gb, wiretaps, opt.oracle_cap).secure)
      throw Error("ConstructionBug", "oracle disagrees on security");
    res.oracle_checked = true;
  }
  return res;
}

}  // namespace snc
