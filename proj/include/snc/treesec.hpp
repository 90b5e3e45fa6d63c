#pragma once

#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "codes.hpp"

namespace snc {

struct TreeSpec {
  std::size_t U = 1, V = 1, alpha = 1;
  elem q = 2;
  Matrix F, G;  // UV rows, source (i, j) at row i*V + j
};

inline std::string tree_source(std::size_t i, std::size_t j) {
  return "s" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
}
inline std::string tree_middle(std::size_t i) { return "v" + std::to_string(i + 1); }
inline std::string tree_src_edge(std::size_t i, std::size_t j, std::size_t k) {
  return "e" + std::to_string(i + 1) + "." + std::to_string(j + 1) + "." + std::to_string(k + 1);
}
inline std::string tree_mid_edge(std::size_t i, std::size_t k) {
  return "d" + std::to_string(i + 1) + "." + std::to_string(k + 1);
}

// the branches in `which`, in order, as one network (all branches gives the whole tree)
inline Network tree_network(const TreeSpec& t, const std::vector<std::size_t>& which) {
  std::vector<std::string> nodes, sources;
  std::vector<std::tuple<std::string, std::string, std::string>> edges;
  for (auto i : which)
    for (std::size_t j = 0; j < t.V; ++j) {
      nodes.push_back(tree_source(i, j));
      sources.push_back(tree_source(i, j));
    }
  for (auto i : which) nodes.push_back(tree_middle(i));
  nodes.push_back("gamma");
  for (auto i : which) {
    for (std::size_t j = 0; j < t.V; ++j)
      for (std::size_t k = 0; k < t.alpha; ++k) edges.emplace_back(tree_src_edge(i, j, k), tree_source(i, j), tree_middle(i));
    for (std::size_t k = 0; k < t.alpha; ++k) edges.emplace_back(tree_mid_edge(i, k), tree_middle(i), "gamma");
  }
  return Network::build(nodes, edges, sources, "gamma");
}

inline Network materialize(const TreeSpec& t) {
  std::vector<std::size_t> all(t.U);
  std::iota(all.begin(), all.end(), 0);
  return tree_network(t, all);
}

struct BranchProblem {
  std::size_t index = 0, V = 1, alpha = 1;
  Network net;
  Matrix F, G;            // V-row local restrictions
  Matrix F_full, G_full;  // UV-row truncations, rows outside the branch zeroed
  std::vector<std::size_t> edge_map;  // branch edge -> tree edge
  std::size_t source_offset = 0;      // first tree source of this branch

  std::size_t src_edge(std::size_t j, std::size_t k) const { return j * alpha + k; }
  std::size_t mid_edge(std::size_t k) const { return V * alpha + k; }
};

inline std::vector<BranchProblem> decompose_branches(const TreeSpec& t) {
  if (t.F.rows() != t.U * t.V || t.G.rows() != t.U * t.V) throw Error("ShapeError", "F and G need UV rows");
  Network whole = materialize(t);
  std::vector<BranchProblem> out;
  for (std::size_t i = 0; i < t.U; ++i) {
    BranchProblem b;
    b.index = i;
    b.V = t.V;
    b.alpha = t.alpha;
    b.net = tree_network(t, {i});
    std::vector<std::size_t> rows;
    for (std::size_t j = 0; j < t.V; ++j) rows.push_back(i * t.V + j);
    b.F = t.F.select_rows(rows);
    b.G = t.G.select_rows(rows);
    SourceSet mask = 0;
    for (auto r : rows) mask |= bit(r);
    b.F_full = restrict_rows(t.F, mask);
    b.G_full = restrict_rows(t.G, mask);
    for (auto& e : b.net.edges()) b.edge_map.push_back(whole.edge_index(e.id));
    b.source_offset = i * t.V;
    out.push_back(std::move(b));
  }
  return out;
}

// branch problem built directly from a single-branch description
inline BranchProblem single_branch(std::size_t V, std::size_t alpha, const Matrix& F, const Matrix& G) {
  TreeSpec t{1, V, alpha, F.q(), F, G};
  return decompose_branches(t)[0];
}

struct BranchCode {
  LinearSecureCode code;  // over the branch network
  std::string kind;       // case1 | case2 | given
  std::size_t l = 0, n = 1, t = 0, r = 0;
  std::optional<Matrix> A, D, Umat;
};

// global matrices from per-source Out blocks ((l+z) x n alpha) and the In(gamma) matrix in source-block row order
inline LinearSecureCode assemble_branch(const BranchProblem& b, elem q, std::size_t l, std::size_t n,
                                        const std::vector<std::size_t>& z, const std::vector<Matrix>& out_blocks,
                                        const Matrix& in_gamma) {
  LinearSecureCode c{q, l, n, z, {}};
  c.global.assign(b.net.num_edges(), Matrix(q, c.total_rows(), n));
  for (std::size_t j = 0; j < b.V; ++j) {
    if (out_blocks[j].rows() != l + z[j] || out_blocks[j].cols() != n * b.alpha)
      throw Error("ShapeError", "Out block shape");
    for (std::size_t k = 0; k < b.alpha; ++k) {
      Matrix H(q, c.total_rows(), n);
      H.put(c.block_offset(j), 0, out_blocks[j].block(0, k * n, l + z[j], n));
      c.global[b.src_edge(j, k)] = H;
    }
  }
  if (in_gamma.rows() != c.total_rows() || in_gamma.cols() != n * b.alpha) throw Error("ShapeError", "In(gamma) shape");
  for (std::size_t k = 0; k < b.alpha; ++k) c.global[b.mid_edge(k)] = in_gamma.block(0, k * n, c.total_rows(), n);
  return c;
}

// interleave message rows (V l) and key rows (V z) into source blocks
inline Matrix interleave_blocks(const Matrix& M, const Matrix& K, std::size_t V, std::size_t l, std::size_t z) {
  Matrix R(M.q(), V * (l + z), M.cols());
  for (std::size_t j = 0; j < V; ++j) {
    R.put(j * (l + z), 0, M.block(j * l, 0, l, M.cols()));
    R.put(j * (l + z) + l, 0, K.block(j * z, 0, z, K.cols()));
  }
  return R;
}

inline Rational branch_upper_bound(const BranchProblem& b, std::size_t r, BoundReport* rep = nullptr) {
  BoundReport x = specialized_bounds(b.net, b.F, b.G, r, Corollary::branch);
  if (rep) *rep = x;
  return x.value;
}

// quotient-space construction of an invertible A such that any r columns of Fp A avoid <Gp>
inline Matrix lift_A_matrix(const Matrix& Fp, const Matrix& Gp, std::size_t r, bool check_hypothesis = false) {
  std::size_t n1 = Fp.cols();
  if (rank(Fp) != n1 || rank(Gp) != Gp.cols()) throw Error("DegenerateInput", "lift needs full column rank inputs");
  Matrix Ub = intersect_spans(Fp, Gp);
  std::size_t t = Ub.cols();
  elem q = Fp.q();
  if (r == 0 || t == 0) return Matrix::identity(q, n1);
  if (r > n1 - t) throw Error("DegenerateInput", "lift needs r <= n1 - t");
  if (check_hypothesis) {
    long double lhs = std::pow(static_cast<long double>(q), static_cast<long double>(n1 - t - r + 1));
    long double binom = 1;
    for (std::size_t i = 0; i < r - 1; ++i) binom = binom * static_cast<long double>(n1 - 1 - i) / static_cast<long double>(i + 1);
    if (!(lhs > binom)) throw Error("FieldTooSmall", "lift hypothesis q^(n1-t-r+1) > C(n1-1,r-1) fails");
  }
  // complement of U inside <Fp>, taken from the columns of Fp
  Matrix comp(q, Fp.rows(), 0);
  for (std::size_t j = 0; j < n1 && comp.cols() < n1 - t; ++j) {
    Matrix c = Fp.select_cols({j});
    if (!in_span(c, Ub.hcat(comp))) comp = comp.hcat(c);
  }
  std::size_t d = n1 - t;
  std::vector<Matrix> w;
  for (std::size_t i = 0; i < d; ++i) {
    Matrix e(q, d, 1);
    e.at(i, 0) = 1;
    w.push_back(e);
  }
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= q;
  auto fits = [&](const Matrix& v) {
    return for_each_combination(w.size(), r - 1, [&](const std::vector<std::size_t>& c) {
      Matrix span(q, d, 0);
      for (auto i : c) span = span.hcat(w[i]);
      return !in_span(v, span);
    });
  };
  for (std::size_t j = 0; j < t; ++j) {
    bool placed = false;
    // moment curve points first, the plain scan only reaches dense vectors after ~q^(d-1) steps
    for (elem a = 1; a < q && !placed; ++a) {
      Matrix v(q, d, 1);
      elem p = 1;
      for (std::size_t k = 0; k < d; ++k, p = p * a % q) v.at(k, 0) = p;
      if (fits(v)) {
        w.push_back(v);
        placed = true;
      }
    }
    for (std::uint64_t idx = 1; idx < total && !placed; ++idx) {
      Matrix v(q, d, 1);
      std::uint64_t x = idx;
      for (std::size_t k = d; k-- > 0;) {
        v.at(k, 0) = x % q;
        x /= q;
      }
      if (fits(v)) {
        w.push_back(v);
        placed = true;
      }
    }
    if (!placed) throw Error("FieldTooSmall", "lift greedy stuck at column " + std::to_string(d + j + 1));
  }
  Matrix cols = comp;
  for (std::size_t j = 0; j < t; ++j) cols = cols.hcat(comp * w[d + j] + Ub.select_cols({j}));
  auto A = solve(Fp, cols);
  if (!A || !inverse(*A)) throw Error("ConstructionBug", "lifted columns do not form a basis of <Fp>");
  return *A;
}

inline bool columns_avoid(const Matrix& M, const Matrix& Gp, std::size_t r) {
  if (r == 0) return true;
  return for_each_combination(M.cols(), std::min(r, M.cols()), [&](const std::vector<std::size_t>& c) {
    return intersect_spans(M.select_cols(c), Gp).cols() == 0;
  });
}

struct ConditionReport {
  std::vector<std::pair<std::string, bool>> items;
  bool all() const {
    for (auto& [n, ok] : items)
      if (!ok) return false;
    return true;
  }
};

struct Verification {
  std::vector<std::string> structure;
  bool decodable = false;
  bool secure = false;
  std::optional<EdgeSet> violating;
  bool ok() const { return structure.empty() && decodable && secure; }
};

inline Verification verify_code(const Network& net, const LinearSecureCode& c, const Matrix& F, const Matrix& G,
                                std::size_t r) {
  Verification v;
  v.structure = check_structure(net, c);
  if (!v.structure.empty()) return v;
  v.decodable = check_decodability(net, c, F).decodable;
  auto s = check_security_subspace(c, build_S(G, c), enumerate_wiretap_sets(net, r));
  v.secure = s.secure;
  v.violating = s.violating;
  return v;
}

// Case 1 pieces
inline Matrix case1_out_block(elem q, std::size_t alpha, std::size_t rf, std::size_t r) {
  Matrix M(q, alpha, alpha * rf);
  M.put(0, 0, Matrix::identity(q, alpha));
  Matrix K = r * rf > 0 ? vandermonde(q, range_points(1, alpha * rf), r * rf) : Matrix(q, 0, alpha * rf);
  return M.vcat(K);
}

inline ConditionReport case1_conditions(const BranchProblem& b, const BranchCode& bc) {
  ConditionReport rep;
  const auto& c = bc.code;
  Matrix Fr = column_basis(b.F), Gr = column_basis(b.G);
  std::size_t rf = Fr.cols(), alpha = b.alpha, l = c.l;
  bool rows_ok = true, mds_ok = true;
  for (std::size_t j = 0; j < b.V; ++j) {
    Matrix out(c.q, l + c.z[j], 0);
    for (std::size_t k = 0; k < alpha; ++k)
      out = out.hcat(c.global[b.src_edge(j, k)].block(c.block_offset(j), 0, l + c.z[j], c.n));
    rows_ok = rows_ok && rank(out) == out.rows();
    if (c.z[j]) mds_ok = mds_ok && is_mds(out.block(l, 0, c.z[j], out.cols()));
  }
  rep.items.push_back({"Out blocks have full row rank", rows_ok});
  rep.items.push_back({"key block is MDS", mds_ok});
  Matrix In = c.stack(b.net.in_mask(b.net.sink()));
  Matrix M(c.q, b.V * l, In.cols()), K(c.q, c.total_keys(), In.cols());
  std::size_t ko = 0;
  for (std::size_t j = 0; j < b.V; ++j) {
    M.put(j * l, 0, In.block(c.block_offset(j), 0, l, In.cols()));
    if (c.z[j]) K.put(ko, 0, In.block(c.block_offset(j) + l, 0, c.z[j], In.cols()));
    ko += c.z[j];
  }
  Matrix FI = kronecker(Fr, Matrix::identity(c.q, alpha));
  auto A = solve(FI, M);
  rep.items.push_back({"In(gamma) messages equal (F x I) A with A invertible", A && inverse(*A) && K.is_zero()});
  Matrix S = build_S(Gr, c);
  rep.items.push_back({"every r r_f columns of In(gamma) avoid <S>", columns_avoid(In, S, bc.r * rf)});
  (void)l;
  return rep;
}

inline BranchCode branch_case1(const BranchProblem& b, std::size_t r, bool check_bound = true) {
  Matrix Fr = column_basis(b.F), Gr = column_basis(b.G);
  std::size_t rf = Fr.cols();
  elem q = b.F.q();
  if (rf == 0) throw Error("DegenerateInput", "branch target is zero");
  if (check_bound) {
    Rational bound = branch_upper_bound(b, r);
    if (bound != Rational(static_cast<long long>(b.alpha), static_cast<long long>(rf)))
      throw Error("WrongCase", "branch bound " + bound.str() + " differs from alpha/r_f");
  }
  std::size_t alpha = b.alpha;
  if (r * rf > 0 && static_cast<elem>(alpha * rf) >= q) throw Error("FieldTooSmall", "Vandermonde points exceed the field");
  Matrix I = Matrix::identity(q, alpha);
  Matrix FI = kronecker(Fr, I), GI = Gr.cols() ? kronecker(Gr, I) : Matrix(q, Fr.rows() * alpha, 0);
  Matrix A = GI.cols() ? lift_A_matrix(FI, GI, r * rf) : Matrix::identity(q, alpha * rf);
  std::size_t z = r * rf;
  Matrix out = case1_out_block(q, alpha, rf, r);
  Matrix M = FI * A;
  Matrix K(q, b.V * z, alpha * rf);
  Matrix In = interleave_blocks(M, K, b.V, alpha, z);
  BranchCode bc;
  bc.code = assemble_branch(b, q, alpha, rf, std::vector<std::size_t>(b.V, z), std::vector<Matrix>(b.V, out), In);
  bc.kind = "case1";
  bc.l = alpha;
  bc.n = rf;
  bc.t = intersection_dim(Fr, Gr);
  bc.r = r;
  bc.A = A;
  auto cond = case1_conditions(b, bc);
  if (!cond.all()) throw Error("ConstructionBug", "case 1 conditions fail");
  auto v = verify_code(b.net, bc.code, b.F, b.G, r);
  if (!v.ok()) throw Error("ConstructionBug", "case 1 code fails verification");
  return bc;
}

// Case 2 pieces
struct FSplit {
  Matrix F1, F2;
};

inline FSplit split_F(const Matrix& F, const Matrix& G) {
  Matrix Fr = column_basis(F);
  Matrix F1 = G.cols() ? intersect_spans(Fr, G) : Matrix(F.q(), F.rows(), 0);
  Matrix F2(F.q(), F.rows(), 0);
  for (std::size_t j = 0; j < Fr.cols() && F1.cols() + F2.cols() < Fr.cols(); ++j) {
    Matrix c = Fr.select_cols({j});
    if (!in_span(c, F1.hcat(F2))) F2 = F2.hcat(c);
  }
  return {F1, F2};
}

inline Matrix case2_out_block(elem q, std::size_t l, std::size_t n, std::size_t alpha) {
  std::size_t w = n * alpha;
  Matrix M(q, l, w);
  M.put(0, 0, Matrix::identity(q, l));
  return M.vcat(vandermonde(q, range_points(1, w), w - l));
}

inline Matrix case2_U(elem q, std::size_t V, std::size_t l, std::size_t n, std::size_t alpha, std::size_t rf) {
  std::size_t w = n * alpha, fresh = w - rf * l, z = w - l;
  Matrix Um(q, V * z, fresh);
  for (std::size_t j = 0; j < V; ++j) Um.put(j * z, 0, Matrix::identity(q, fresh));
  return Um;
}

inline Matrix case2_D(elem q, std::size_t l, std::size_t n, std::size_t alpha, std::size_t rf, std::size_t t,
                      long long first_point) {
  std::size_t w = n * alpha, fresh = w - rf * l;
  Matrix D1(q, t * l, w);
  D1.put(0, 0, Matrix::identity(q, t * l));
  Matrix Z(q, w - t * l, fresh);
  Z.put(rf * l - t * l, 0, Matrix::identity(q, fresh));
  Matrix D2 = Z.hcat(vandermonde(q, range_points(first_point, rf * l), w - t * l));
  return D1.vcat(D2);
}

// In(gamma) = [[Fs (x) I_l, 0], [0, U]] D, rows re-blocked per source
inline Matrix case2_in(const Matrix& Fs, const Matrix& Um, const Matrix& D, std::size_t V, std::size_t l,
                       std::size_t z) {
  elem q = Fs.q();
  Matrix FI = kronecker(Fs, Matrix::identity(q, l));
  Matrix top = FI.hcat(Matrix(q, FI.rows(), Um.cols()));
  Matrix bot = Matrix(q, Um.rows(), FI.cols()).hcat(Um);
  Matrix full = top.vcat(bot) * D;
  return interleave_blocks(full.block(0, 0, V * l, D.cols()), full.block(V * l, 0, Um.rows(), D.cols()), V, l, z);
}

inline ConditionReport case2_conditions(const BranchProblem& b, const BranchCode& bc) {
  ConditionReport rep;
  const auto& c = bc.code;
  std::size_t l = c.l, n = c.n, alpha = b.alpha, w = n * alpha;
  bool rows_ok = true, mds_ok = true;
  Matrix outK(c.q, c.total_keys(), 0);
  for (std::size_t j = 0; j < b.V; ++j) {
    Matrix out(c.q, l + c.z[j], 0);
    for (std::size_t k = 0; k < alpha; ++k)
      out = out.hcat(c.global[b.src_edge(j, k)].block(c.block_offset(j), 0, l + c.z[j], n));
    rows_ok = rows_ok && out.rows() == out.cols() && rank(out) == out.rows();
    if (c.z[j]) mds_ok = mds_ok && is_mds(out.block(l, 0, c.z[j], out.cols()));
    for (std::size_t k = 0; k < alpha; ++k) {
      Matrix col(c.q, c.total_keys(), n);
      std::size_t ko = 0;
      for (std::size_t jj = 0; jj < j; ++jj) ko += c.z[jj];
      col.put(ko, 0, c.global[b.src_edge(j, k)].block(c.block_offset(j) + l, 0, c.z[j], n));
      outK = outK.hcat(col);
    }
  }
  rep.items.push_back({"Out blocks are invertible", rows_ok});
  rep.items.push_back({"Out key blocks are MDS", mds_ok});
  bool d_ok = bc.D && inverse(*bc.D).has_value();
  rep.items.push_back({"D is invertible", d_ok});
  bool d2_ok = false;
  if (bc.D) {
    Matrix D2 = bc.D->block(bc.t * l, 0, w - bc.t * l, w);
    d2_ok = D2.rows() == 0 || is_mds(D2);
  }
  rep.items.push_back({"lower rows of D are MDS", d2_ok});
  // condition 5: a In-key columns plus n r - a Out-key columns are independent
  Matrix In = c.stack(b.net.in_mask(b.net.sink()));
  Matrix inK(c.q, c.total_keys(), In.cols());
  std::size_t ko = 0;
  for (std::size_t j = 0; j < b.V; ++j) {
    if (c.z[j]) inK.put(ko, 0, In.block(c.block_offset(j) + l, 0, c.z[j], In.cols()));
    ko += c.z[j];
  }
  std::size_t rf = rank(b.F);
  std::size_t amax = w >= rf * l ? w - rf * l : 0;
  std::size_t need = n * bc.r;
  bool c5 = true;
  for (std::size_t a = 0; a <= std::min(amax, need) && c5; ++a) {
    for_each_combination(inK.cols(), a, [&](const std::vector<std::size_t>& ca) {
      Matrix left = inK.select_cols(ca);
      return for_each_combination(outK.cols(), need - a, [&](const std::vector<std::size_t>& cb) {
        Matrix all = left.hcat(outK.select_cols(cb));
        if (rank(all) != all.cols()) c5 = false;
        return c5;
      });
    });
  }
  rep.items.push_back({"In/Out key column mixtures are independent", c5});
  return rep;
}

inline BranchCode branch_case2(const BranchProblem& b, std::size_t l, std::size_t n, std::size_t r,
                               bool check_bound = true, long long first_point = 0) {
  elem q = b.F.q();
  Matrix Fr = column_basis(b.F), Gr = column_basis(b.G);
  std::size_t rf = Fr.cols(), alpha = b.alpha, w = n * alpha;
  if (rf == 0 || l == 0) throw Error("DegenerateInput", "case 2 needs a nonzero target and rate");
  Rational rate(static_cast<long long>(l), static_cast<long long>(n));
  if (!(rate < Rational(static_cast<long long>(alpha), static_cast<long long>(rf))))
    throw Error("WrongCase", "case 2 needs l/n < alpha/r_f");
  if (check_bound) {
    Rational bound = branch_upper_bound(b, r);
    if (bound != rate) throw Error("WrongCase", "requested rate differs from the branch bound " + bound.str());
  }
  auto sp = split_F(b.F, Gr);
  std::size_t t = sp.F1.cols();
  Matrix Fs = sp.F1.hcat(sp.F2);
  if (first_point == 0) first_point = static_cast<long long>(w) + 1;
  if (static_cast<elem>(first_point) + rf * l - 1 >= q || w >= q) throw Error("FieldTooSmall", "evaluation points exceed the field");
  std::size_t z = w - l;
  Matrix Um = case2_U(q, b.V, l, n, alpha, rf);
  Matrix D = case2_D(q, l, n, alpha, rf, t, first_point);
  Matrix In = case2_in(Fs, Um, D, b.V, l, z);
  BranchCode bc;
  bc.code = assemble_branch(b, q, l, n, std::vector<std::size_t>(b.V, z),
                            std::vector<Matrix>(b.V, case2_out_block(q, l, n, alpha)), In);
  bc.kind = "case2";
  bc.l = l;
  bc.n = n;
  bc.t = t;
  bc.r = r;
  bc.D = D;
  bc.Umat = Um;
  auto cond = case2_conditions(b, bc);
  if (!cond.all()) throw Error("ConstructionBug", "case 2 conditions fail");
  auto v = verify_code(b.net, bc.code, b.F, b.G, r);
  if (!v.ok()) throw Error("ConstructionBug", "case 2 code fails verification");
  return bc;
}

// the construction matching the branch bound; nothing when the bound is zero
inline std::optional<BranchCode> branch_auto(const BranchProblem& b, std::size_t r) {
  Rational bound = branch_upper_bound(b, r);
  std::size_t rf = rank(b.F);
  if (bound.inf || bound.num == 0) return std::nullopt;
  if (bound == Rational(static_cast<long long>(b.alpha), static_cast<long long>(rf))) return branch_case1(b, r, false);
  return branch_case2(b, static_cast<std::size_t>(bound.num), static_cast<std::size_t>(bound.den), r, false);
}

// p-fold reuse of a code: copy c uses messages c*l.., keys c*z.., columns c*n..
inline LinearSecureCode repeat_code(const LinearSecureCode& c, std::size_t p) {
  std::vector<std::size_t> z;
  for (auto x : c.z) z.push_back(x * p);
  LinearSecureCode o{c.q, c.l * p, c.n * p, z, {}};
  for (auto& H : c.global) {
    Matrix R(c.q, o.total_rows(), o.n);
    for (std::size_t i = 0; i < c.z.size(); ++i)
      for (std::size_t cp = 0; cp < p; ++cp)
        for (std::size_t col = 0; col < c.n; ++col) {
          for (std::size_t j = 0; j < c.l; ++j) R.at(o.msg_row(i, cp * c.l + j), cp * c.n + col) = H(c.msg_row(i, j), col);
          for (std::size_t j = 0; j < c.z[i]; ++j)
            R.at(o.key_row(i, cp * c.z[i] + j), cp * c.n + col) = H(c.key_row(i, j), col);
        }
    o.global.push_back(R);
  }
  return o;
}

// fix message symbols l_keep.. to zero by deleting their rows
inline LinearSecureCode truncate_messages(const LinearSecureCode& c, std::size_t l_keep) {
  LinearSecureCode o{c.q, l_keep, c.n, c.z, {}};
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < c.z.size(); ++i) {
    for (std::size_t j = 0; j < l_keep; ++j) rows.push_back(c.msg_row(i, j));
    for (std::size_t j = 0; j < c.z[i]; ++j) rows.push_back(c.key_row(i, j));
  }
  for (auto& H : c.global) o.global.push_back(H.select_rows(rows));
  return o;
}

inline std::vector<BranchCode> rate_match(const std::vector<BranchCode>& codes) {
  if (codes.empty()) return {};
  Rational target = Rational::infinity();
  for (auto& b : codes) {
    Rational x(static_cast<long long>(b.code.l), static_cast<long long>(b.code.n));
    if (x < target) target = x;
  }
  long long nc = target.den;
  for (auto& b : codes) nc = std::lcm(nc, static_cast<long long>(b.code.n));
  std::size_t lc = static_cast<std::size_t>(target.num * (nc / target.den));
  std::vector<BranchCode> out;
  for (auto& b : codes) {
    BranchCode m = b;
    std::size_t p = static_cast<std::size_t>(nc) / b.code.n;
    m.code = truncate_messages(repeat_code(b.code, p), lc);
    m.l = lc;
    m.n = static_cast<std::size_t>(nc);
    out.push_back(m);
  }
  return out;
}

// largest level r' <= r at which the branch code is secure for its branch security function
inline std::size_t branch_security_level(const BranchProblem& b, const LinearSecureCode& c, std::size_t r) {
  Matrix S = build_S(b.G, c);
  std::size_t level = 0;
  for (std::size_t k = 1; k <= r && k <= b.net.num_edges(); ++k) {
    std::vector<EdgeSet> exact;
    for (EdgeSet W : enumerate_wiretap_sets(b.net, k))
      if (popcount(W) == k) exact.push_back(W);
    if (!check_security_subspace(c, S, exact).secure) break;
    level = k;
  }
  return level;
}

struct Allocation {
  std::vector<std::size_t> r;
  std::optional<std::vector<std::size_t>> T;
};

struct Composition {
  LinearSecureCode code;
  bool certified = false;
  std::string mode;
  std::vector<std::size_t> levels;  // per-branch security level
  std::vector<Allocation> allocations;
};

inline void for_each_allocation(std::size_t U, std::size_t r, const std::function<void(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> a(U, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t left) {
    if (i + 1 == U) {
      a[i] = left;
      f(a);
      return;
    }
    for (std::size_t x = left + 1; x-- > 0;) {
      a[i] = x;
      rec(i + 1, left - x);
    }
  };
  if (U) rec(0, r);
}

// (sum over i outside T of <G_i>) meets <G> only at zero
inline bool outside_T_condition(const std::vector<BranchProblem>& bs, const Matrix& G, const std::vector<std::size_t>& T) {
  Matrix sum(G.q(), G.rows(), 0);
  for (std::size_t i = 0; i < bs.size(); ++i)
    if (std::find(T.begin(), T.end(), i) == T.end()) sum = sum.hcat(bs[i].G_full);
  return intersection_dim(sum, G) == 0;
}

inline Composition compose_tree(const TreeSpec& t, const std::vector<BranchCode>& codes, std::size_t r,
                                const std::string& mode) {
  auto bs = decompose_branches(t);
  if (codes.size() != bs.size()) throw Error("ShapeError", "one code per branch expected");
  for (auto& c : codes)
    if (c.code.l != codes[0].code.l || c.code.n != codes[0].code.n)
      throw Error("ShapeError", "branch codes must share (l, n); run rate matching first");
  Network whole = materialize(t);
  Composition out;
  out.mode = mode;
  std::vector<std::size_t> z;
  for (auto& c : codes) z.insert(z.end(), c.code.z.begin(), c.code.z.end());
  LinearSecureCode code{t.q, codes[0].code.l, codes[0].code.n, z, {}};
  code.global.assign(whole.num_edges(), Matrix(t.q, code.total_rows(), code.n));
  for (std::size_t i = 0; i < bs.size(); ++i) {
    const auto& bc = codes[i].code;
    std::size_t off = code.block_offset(bs[i].source_offset);
    for (std::size_t e = 0; e < bs[i].net.num_edges(); ++e) {
      Matrix H(t.q, code.total_rows(), code.n);
      H.put(off, 0, bc.global[e]);
      code.global[bs[i].edge_map[e]] = H;
    }
    out.levels.push_back(branch_security_level(bs[i], bc, r));
  }
  out.code = code;
  out.certified = true;
  for_each_allocation(t.U, r, [&](const std::vector<std::size_t>& a) {
    Allocation al{a, std::nullopt};
    if (mode == "all-secure") {
      bool ok = true;
      for (std::size_t i = 0; i < t.U; ++i) ok = ok && a[i] <= out.levels[i];
      if (ok) {
        std::vector<std::size_t> T(t.U);
        std::iota(T.begin(), T.end(), 0);
        al.T = T;
      }
    } else {
      for (std::size_t k = 0; k <= t.U && !al.T; ++k)
        for_each_combination(t.U, k, [&](const std::vector<std::size_t>& T) {
          for (auto i : T)
            if (a[i] > out.levels[i]) return true;
          if (!outside_T_condition(bs, t.G, T)) return true;
          al.T = T;
          return false;
        });
    }
    if (!al.T) out.certified = false;
    out.allocations.push_back(al);
  });
  return out;
}

struct TreeAttempt {
  Rational rate;
  bool certified = false;
  std::vector<std::size_t> levels;
};

struct TreeResult {
  std::optional<Composition> composition;
  Rational rate;
  std::vector<TreeAttempt> attempts;
  std::vector<BranchCode> branch_codes;
};

// try candidate rates from the top; each branch contributes its most secure code reaching the rate
inline TreeResult construct_tree(const TreeSpec& t, std::size_t r) {
  auto bs = decompose_branches(t);
  std::vector<std::vector<std::optional<BranchCode>>> cand(bs.size());
  std::vector<Rational> rates;
  for (std::size_t i = 0; i < bs.size(); ++i)
    for (std::size_t k = 0; k <= r; ++k) {
      cand[i].push_back(branch_auto(bs[i], k));
      if (cand[i].back())
        rates.push_back(Rational(static_cast<long long>(cand[i].back()->code.l), static_cast<long long>(cand[i].back()->code.n)));
    }
  std::sort(rates.begin(), rates.end(), [](const Rational& a, const Rational& b) { return b < a; });
  rates.erase(std::unique(rates.begin(), rates.end()), rates.end());
  TreeResult res;
  for (auto& rho : rates) {
    std::vector<BranchCode> pick;
    bool all = true;
    for (std::size_t i = 0; i < bs.size() && all; ++i) {
      std::optional<BranchCode> best;
      for (std::size_t k = 0; k <= r; ++k)
        if (cand[i][k] && rho <= Rational(static_cast<long long>(cand[i][k]->code.l), static_cast<long long>(cand[i][k]->code.n)))
          best = cand[i][k];
      if (!best) all = false;
      else pick.push_back(*best);
    }
    if (!all) continue;
    auto matched = rate_match(pick);
    auto comp = compose_tree(t, matched, r, "subset-T");
    res.attempts.push_back({rho, comp.certified, comp.levels});
    if (comp.certified) {
      res.composition = comp;
      res.rate = rho;
      res.branch_codes = matched;
      return res;
    }
  }
  res.rate = Rational(0);
  return res;
}

}  // namespace snc
