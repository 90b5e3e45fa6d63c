#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gf.hpp"
#include "netmodel.hpp"

namespace snc {

struct LinearSecureCode {
  elem q = 2;
  std::size_t l = 0, n = 0;
  std::vector<std::size_t> z;      // key length per source
  std::vector<Matrix> global;      // one matrix per edge index, (sum l+z_i) x n

  std::size_t num_sources() const { return z.size(); }
  std::size_t block_offset(std::size_t i) const {
    std::size_t o = 0;
    for (std::size_t j = 0; j < i; ++j) o += l + z[j];
    return o;
  }
  std::size_t total_rows() const { return block_offset(z.size()); }
  std::size_t total_keys() const {
    std::size_t k = 0;
    for (auto x : z) k += x;
    return k;
  }
  // row index of message j of source i, and of key j of source i
  std::size_t msg_row(std::size_t i, std::size_t j) const { return block_offset(i) + j; }
  std::size_t key_row(std::size_t i, std::size_t j) const { return block_offset(i) + l + j; }

  Matrix stack(EdgeSet W) const {
    Matrix M(q, total_rows(), 0);
    for (auto e : members(W)) M = M.hcat(global[e]);
    return M;
  }
  Matrix sink_matrix(const Network& net) const { return stack(net.in_mask(net.sink())); }
};

struct LocalCode {
  elem q = 2;
  std::size_t l = 0, n = 0;
  std::vector<std::size_t> z;
  // source edges: l x n message coefficients and z_i x n key coefficients
  std::map<std::size_t, Matrix> msg, key;
  // internal edges: (d, e) -> n x n
  std::map<std::pair<std::size_t, std::size_t>, Matrix> mix;
};

inline LinearSecureCode derive_global(const Network& net, const LocalCode& lc) {
  if (lc.z.size() != net.num_sources()) throw Error("ShapeError", "key length list does not match sources");
  LinearSecureCode c{lc.q, lc.l, lc.n, lc.z, {}};
  c.global.assign(net.num_edges(), Matrix(lc.q, c.total_rows(), lc.n));
  auto order = net.topo_edges();
  if (order.size() != net.num_edges()) throw Error("DegenerateInput", "network is not a DAG");
  for (auto e : order) {
    std::size_t tail = net.edges()[e].tail;
    long s = net.source_position(tail);
    Matrix H(lc.q, c.total_rows(), lc.n);
    if (s >= 0) {
      auto i = static_cast<std::size_t>(s);
      auto mi = lc.msg.find(e);
      auto ki = lc.key.find(e);
      if (mi == lc.msg.end()) throw Error("IncompleteCode", "no message coefficients for " + net.edges()[e].id);
      Matrix K = ki == lc.key.end() ? Matrix(lc.q, lc.z[i], lc.n) : ki->second;
      if (mi->second.rows() != lc.l || mi->second.cols() != lc.n || K.rows() != lc.z[i] || K.cols() != lc.n)
        throw Error("ShapeError", "source coefficient shape at " + net.edges()[e].id);
      H.put(c.block_offset(i), 0, mi->second);
      H.put(c.block_offset(i) + lc.l, 0, K);
    } else {
      for (auto d : net.in_edges(tail)) {
        auto it = lc.mix.find({d, e});
        if (it == lc.mix.end())
          throw Error("IncompleteCode", "no coefficients for (" + net.edges()[d].id + "," + net.edges()[e].id + ")");
        if (it->second.rows() != lc.n || it->second.cols() != lc.n)
          throw Error("ShapeError", "mixing matrix shape at " + net.edges()[e].id);
        H = H + c.global[d] * it->second;
      }
    }
    c.global[e] = H;
  }
  return c;
}

// structural invariants of a global code; returns the list of violations
inline std::vector<std::string> check_structure(const Network& net, const LinearSecureCode& c) {
  std::vector<std::string> v;
  if (c.z.size() != net.num_sources()) {
    v.push_back("key length list does not match sources");
    return v;
  }
  if (c.global.size() != net.num_edges()) {
    v.push_back("edge count mismatch");
    return v;
  }
  for (std::size_t e = 0; e < net.num_edges(); ++e) {
    const Matrix& H = c.global[e];
    if (H.q() != c.q) v.push_back("field mismatch at " + net.edges()[e].id);
    if (H.rows() != c.total_rows() || H.cols() != c.n) {
      v.push_back("shape mismatch at " + net.edges()[e].id);
      continue;
    }
    std::size_t tail = net.edges()[e].tail;
    long s = net.source_position(tail);
    if (s >= 0) {
      for (std::size_t i = 0; i < c.z.size(); ++i) {
        if (static_cast<long>(i) == s) continue;
        if (!H.block(c.block_offset(i), 0, c.l + c.z[i], c.n).is_zero())
          v.push_back("source edge " + net.edges()[e].id + " depends on another source");
      }
    } else {
      Matrix In = c.stack(net.in_mask(tail));
      if (!in_span(H, In)) v.push_back("edge " + net.edges()[e].id + " is not generated by its inputs");
    }
  }
  return v;
}

// S matrix: block i is [g_i (x) I_l ; 0_{z_i x l r_g}]
inline Matrix build_S(const Matrix& G, std::size_t l, const std::vector<std::size_t>& z) {
  if (G.rows() != z.size()) throw Error("ShapeError", "G row count does not match sources");
  std::size_t rows = 0;
  for (auto x : z) rows += l + x;
  Matrix S(G.q(), rows, l * G.cols());
  Matrix Il = Matrix::identity(G.q(), l);
  std::size_t off = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    S.put(off, 0, kronecker(G.select_rows({i}), Il));
    off += l + z[i];
  }
  return S;
}

inline Matrix build_S(const Matrix& G, const LinearSecureCode& c) { return build_S(G, c.l, c.z); }

// the global input vector (m_1, k_1, ..., m_s, k_s) from source-major m and k
inline Matrix assemble_input(const LinearSecureCode& c, const std::vector<elem>& m, const std::vector<elem>& k) {
  if (m.size() != c.num_sources() * c.l || k.size() != c.total_keys())
    throw Error("ShapeError", "message or key length mismatch");
  Matrix x(c.q, 1, c.total_rows());
  std::size_t ko = 0;
  for (std::size_t i = 0; i < c.num_sources(); ++i) {
    for (std::size_t j = 0; j < c.l; ++j) x.at(0, c.msg_row(i, j)) = m[i * c.l + j] % c.q;
    for (std::size_t j = 0; j < c.z[i]; ++j) x.at(0, c.key_row(i, j)) = k[ko++] % c.q;
  }
  return x;
}

inline std::vector<std::vector<elem>> transmit(const LinearSecureCode& c, const std::vector<elem>& m,
                                               const std::vector<elem>& k) {
  Matrix x = assemble_input(c, m, k);
  std::vector<std::vector<elem>> y;
  for (auto& H : c.global) {
    Matrix v = x * H;
    std::vector<elem> row(v.cols());
    for (std::size_t j = 0; j < v.cols(); ++j) row[j] = v(0, j);
    y.push_back(row);
  }
  return y;
}

// recursive evaluation of the local functions, independent of derive_global
inline std::vector<std::vector<elem>> transmit_local(const Network& net, const LocalCode& lc,
                                                     const std::vector<elem>& m, const std::vector<elem>& k) {
  PrimeField F(lc.q);
  std::vector<std::vector<elem>> y(net.num_edges());
  std::vector<std::size_t> koff(lc.z.size(), 0);
  for (std::size_t i = 1; i < lc.z.size(); ++i) koff[i] = koff[i - 1] + lc.z[i - 1];
  for (auto e : net.topo_edges()) {
    std::size_t tail = net.edges()[e].tail;
    long s = net.source_position(tail);
    std::vector<elem> out(lc.n, 0);
    if (s >= 0) {
      auto i = static_cast<std::size_t>(s);
      const Matrix& A = lc.msg.at(e);
      for (std::size_t j = 0; j < lc.l; ++j)
        for (std::size_t c = 0; c < lc.n; ++c) out[c] = F.add(out[c], F.mul(m[i * lc.l + j], A(j, c)));
      auto ki = lc.key.find(e);
      if (ki != lc.key.end())
        for (std::size_t j = 0; j < lc.z[i]; ++j)
          for (std::size_t c = 0; c < lc.n; ++c)
            out[c] = F.add(out[c], F.mul(k[koff[i] + j], ki->second(j, c)));
    } else {
      for (auto d : net.in_edges(tail)) {
        const Matrix& A = lc.mix.at({d, e});
        for (std::size_t j = 0; j < lc.n; ++j)
          for (std::size_t c = 0; c < lc.n; ++c) out[c] = F.add(out[c], F.mul(y[d][j], A(j, c)));
      }
    }
    y[e] = out;
  }
  return y;
}

struct DecodabilityResult {
  bool decodable = false;
  std::optional<Matrix> psi;        // H_In(gamma) * psi = S_f when it exists
  std::optional<Matrix> collision;  // input direction v with v H = 0 but v S_f != 0
};

inline DecodabilityResult check_decodability(const Network& net, const LinearSecureCode& c, const Matrix& F) {
  if (F.rows() != c.num_sources()) throw Error("ShapeError", "F row count does not match sources");
  Matrix H = c.sink_matrix(net);
  Matrix Sf = build_S(F, c);
  DecodabilityResult r;
  Matrix K = left_kernel(H);
  Matrix KS = K * Sf;
  r.decodable = KS.is_zero();
  if (!r.decodable) {
    for (std::size_t i = 0; i < K.rows(); ++i)
      if (!KS.select_rows({i}).is_zero()) {
        r.collision = K.select_rows({i});
        break;
      }
  }
  r.psi = solve(H, Sf);
  return r;
}

struct SecurityResult {
  bool secure = true;
  std::optional<EdgeSet> violating;
  std::optional<Matrix> witness;  // nonzero vector in <H_W> and <S>
  std::size_t checked = 0;
};

inline SecurityResult check_security_subspace(const LinearSecureCode& c, const Matrix& S,
                                              const std::vector<EdgeSet>& wiretaps) {
  SecurityResult r;
  for (EdgeSet W : wiretaps) {
    ++r.checked;
    if (!W) continue;
    Matrix I = intersect_spans(c.stack(W), S);
    if (I.cols() > 0) {
      r.secure = false;
      r.violating = W;
      r.witness = I.select_cols({0});
      return r;
    }
  }
  return r;
}

}  // namespace snc
