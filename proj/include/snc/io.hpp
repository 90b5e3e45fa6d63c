#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "sumsec.hpp"
#include "treesec.hpp"

namespace snc::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kBundleTag = "secnet.bundle.v1";
inline constexpr const char* kNetworkTag = "secnet.network.v1";
inline constexpr const char* kFunctionsTag = "secnet.functions.v1";
inline constexpr const char* kCodeTag = "secnet.code.v1";
inline constexpr const char* kTreeTag = "secnet.treespec.v1";

[[noreturn]] inline void fail(const std::string& where, const std::string& msg) {
  throw Error("ParseError", where + ": " + msg);
}

inline const json& need(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) fail(where, "missing \"" + key + "\"");
  return j.at(key);
}

inline void check_tag(const json& j, const char* tag, const std::string& where) {
  if (j.contains("format") && j.at("format") != tag) fail(where, "expected format " + std::string(tag));
}

inline Matrix matrix_from(const json& j, elem q, const std::string& where, std::size_t cols_if_empty = 0) {
  if (!j.is_array()) fail(where, "matrix must be a nested array");
  std::vector<std::vector<long long>> rows;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array()) fail(where + "[" + std::to_string(i) + "]", "row must be an array");
    std::vector<long long> row;
    for (auto& x : j[i]) {
      if (!x.is_number_integer()) fail(where + "[" + std::to_string(i) + "]", "entries must be integers");
      row.push_back(x.get<long long>());
    }
    if (!rows.empty() && row.size() != rows[0].size()) fail(where, "ragged matrix");
    rows.push_back(row);
  }
  return Matrix::from_rows(q, rows, cols_if_empty);
}

inline json matrix_to(const Matrix& M) {
  json a = json::array();
  for (auto& row : M.to_rows()) a.push_back(row);
  return a;
}

inline elem modulus(const json& j, const std::string& where) {
  const json& q = need(j, "q", where);
  if (!q.is_number_integer() || q.get<long long>() < 2 || !is_prime(q.get<elem>())) fail(where + ".q", "q must be a prime");
  return q.get<elem>();
}

inline Network network_from(const json& j, const std::string& where = "network") {
  check_tag(j, kNetworkTag, where);
  std::vector<std::string> nodes = need(j, "nodes", where).get<std::vector<std::string>>();
  std::vector<std::tuple<std::string, std::string, std::string>> edges;
  const json& ej = need(j, "edges", where);
  for (std::size_t i = 0; i < ej.size(); ++i) {
    if (!ej[i].is_array() || ej[i].size() != 3) fail(where + ".edges[" + std::to_string(i) + "]", "edge is [id, tail, head]");
    edges.emplace_back(ej[i][0].get<std::string>(), ej[i][1].get<std::string>(), ej[i][2].get<std::string>());
  }
  auto sources = need(j, "sources", where).get<std::vector<std::string>>();
  auto sink = need(j, "sink", where).get<std::string>();
  Network n = Network::build(nodes, edges, sources, sink);
  auto bad = validate_network(n);
  if (!bad.empty()) fail(where, "invalid network: " + bad[0]);
  return n;
}

inline json network_to(const Network& n, elem q) {
  json j;
  j["format"] = kNetworkTag;
  j["q"] = q;
  j["nodes"] = n.nodes();
  json e = json::array();
  for (auto& x : n.edges()) e.push_back({x.id, n.nodes()[x.tail], n.nodes()[x.head]});
  j["edges"] = e;
  j["sources"] = n.source_names(n.all_sources());
  j["sink"] = n.nodes()[n.sink()];
  return j;
}

struct Functions {
  Matrix F, G;
  std::size_t r = 0;
};

inline Functions functions_from(const json& j, elem q, std::size_t s, const std::string& where = "functions") {
  check_tag(j, kFunctionsTag, where);
  if (j.contains("q") && modulus(j, where) != q) throw Error("FieldMismatch", where + ": modulus differs from the network");
  Functions f;
  f.F = matrix_from(need(j, "F", where), q, where + ".F");
  f.G = matrix_from(need(j, "G", where), q, where + ".G");
  if (f.F.rows() != s || f.G.rows() != s) throw Error("ShapeError", where + ": F and G need one row per source");
  f.r = j.value("r", std::size_t{0});
  return f;
}

inline json functions_to(const Functions& f) {
  json j;
  j["format"] = kFunctionsTag;
  j["q"] = f.F.q();
  j["F"] = matrix_to(f.F);
  j["G"] = matrix_to(f.G);
  j["r"] = f.r;
  return j;
}

inline LinearSecureCode code_from(const json& j, const Network& n, elem q, const std::string& where = "code") {
  check_tag(j, kCodeTag, where);
  if (j.contains("q") && modulus(j, where) != q) throw Error("FieldMismatch", where + ": modulus differs from the network");
  std::size_t l = need(j, "l", where).get<std::size_t>();
  std::size_t nn = need(j, "n", where).get<std::size_t>();
  auto z = need(j, "z", where).get<std::vector<std::size_t>>();
  if (z.size() != n.num_sources()) throw Error("ShapeError", where + ".z: one key length per source");
  std::optional<LinearSecureCode> local;
  if (j.contains("local")) {
    const json& lj = j.at("local");
    LocalCode lc{q, l, nn, z, {}, {}, {}};
    for (auto& [id, m] : need(lj, "msg", where + ".local").items())
      lc.msg[n.edge_index(id)] = matrix_from(m, q, where + ".local.msg." + id, nn);
    if (lj.contains("key"))
      for (auto& [id, m] : lj.at("key").items())
        lc.key[n.edge_index(id)] = matrix_from(m, q, where + ".local.key." + id, nn);
    if (lj.contains("mix"))
      for (auto& mx : lj.at("mix")) {
        auto d = n.edge_index(need(mx, "from", where + ".local.mix").get<std::string>());
        auto e = n.edge_index(need(mx, "to", where + ".local.mix").get<std::string>());
        lc.mix[{d, e}] = matrix_from(need(mx, "matrix", where + ".local.mix"), q, where + ".local.mix");
      }
    local = derive_global(n, lc);
  }
  LinearSecureCode c{q, l, nn, z, {}};
  if (j.contains("global")) {
    const json& g = j.at("global");
    c.global.assign(n.num_edges(), Matrix(q, c.total_rows(), nn));
    std::vector<bool> seen(n.num_edges(), false);
    for (auto& [id, m] : g.items()) {
      auto e = n.edge_index(id);
      c.global[e] = matrix_from(m, q, where + ".global." + id, nn);
      if (c.global[e].rows() != c.total_rows() || c.global[e].cols() != nn)
        throw Error("ShapeError", where + ".global." + id + ": expected " + std::to_string(c.total_rows()) + "x" +
                                      std::to_string(nn));
      seen[e] = true;
    }
    for (std::size_t e = 0; e < n.num_edges(); ++e)
      if (!seen[e]) throw Error("IncompleteCode", where + ".global: no matrix for " + n.edges()[e].id);
    if (local)
      for (std::size_t e = 0; e < n.num_edges(); ++e)
        if (!(local->global[e] == c.global[e]))
          fail(where, "global and local encodings disagree at " + n.edges()[e].id);
    return c;
  }
  if (!local) fail(where, "code needs \"global\" or \"local\"");
  return *local;
}

inline json code_to(const LinearSecureCode& c, const Network& n) {
  json j;
  j["format"] = kCodeTag;
  j["q"] = c.q;
  j["l"] = c.l;
  j["n"] = c.n;
  j["z"] = c.z;
  json g = json::object();
  for (std::size_t e = 0; e < n.num_edges(); ++e) g[n.edges()[e].id] = matrix_to(c.global[e]);
  j["global"] = g;
  return j;
}

inline TreeSpec tree_from(const json& j, const std::string& where = "tree") {
  check_tag(j, kTreeTag, where);
  TreeSpec t;
  t.q = modulus(j, where);
  t.U = need(j, "U", where).get<std::size_t>();
  t.V = need(j, "V", where).get<std::size_t>();
  t.alpha = need(j, "alpha", where).get<std::size_t>();
  t.F = matrix_from(need(j, "F", where), t.q, where + ".F");
  t.G = matrix_from(need(j, "G", where), t.q, where + ".G");
  if (t.F.rows() != t.U * t.V || t.G.rows() != t.U * t.V) throw Error("ShapeError", where + ": F and G need U*V rows");
  return t;
}

inline json tree_to(const TreeSpec& t) {
  json j;
  j["format"] = kTreeTag;
  j["q"] = t.q;
  j["U"] = t.U;
  j["V"] = t.V;
  j["alpha"] = t.alpha;
  j["F"] = matrix_to(t.F);
  j["G"] = matrix_to(t.G);
  return j;
}

// a job file: network (or tree), functions, optional code and base code
struct Bundle {
  std::string name;
  elem q = 2;
  Network net;
  Functions fn;
  std::optional<TreeSpec> tree;
  std::optional<LinearSecureCode> code;
  std::optional<BaseSumCode> base;
  std::optional<BranchCode> branch;
  json extra;
};

// branch code given by its construction matrices rather than per-edge encodings
inline BranchCode branch_from(const json& j, const TreeSpec& t, std::size_t r, const std::string& where = "branch") {
  if (t.U != 1) fail(where, "a branch section needs a single-branch tree");
  BranchProblem b = decompose_branches(t)[0];
  elem q = t.q;
  BranchCode bc;
  bc.kind = need(j, "case", where).get<std::string>();
  bc.l = need(j, "l", where).get<std::size_t>();
  bc.n = need(j, "n", where).get<std::size_t>();
  bc.r = r;
  std::size_t z = need(j, "z", where).get<std::size_t>();
  Matrix out = matrix_from(need(j, "out", where), q, where + ".out");
  Matrix In(q, 0, 0);
  if (bc.kind == "case1") {
    Matrix M = matrix_from(need(j, "in_messages", where), q, where + ".in_messages");
    In = interleave_blocks(M, Matrix(q, t.V * z, M.cols()), t.V, bc.l, z);
    bc.t = intersection_dim(b.F, b.G);
  } else if (bc.kind == "case2") {
    Matrix Um = matrix_from(need(j, "U", where), q, where + ".U");
    Matrix D = matrix_from(need(j, "D", where), q, where + ".D");
    if (Um.rows() != t.V * z || D.rows() != D.cols() || D.cols() != bc.n * t.alpha ||
        b.F.cols() * bc.l + Um.cols() != D.rows())
      throw Error("ShapeError", where + ": U and D do not fit the branch");
    In = case2_in(b.F, Um, D, t.V, bc.l, z);
    bc.t = intersection_dim(b.F, b.G);
    bc.D = D;
    bc.Umat = Um;
  } else {
    fail(where + ".case", "expected case1 or case2");
  }
  bc.code = assemble_branch(b, q, bc.l, bc.n, std::vector<std::size_t>(t.V, z), std::vector<Matrix>(t.V, out), In);
  return bc;
}

inline Bundle bundle_from(const json& j) {
  check_tag(j, kBundleTag, "bundle");
  Bundle b;
  b.name = j.value("name", std::string{});
  if (j.contains("tree")) {
    b.tree = tree_from(j.at("tree"));
    b.q = b.tree->q;
    b.net = materialize(*b.tree);
    b.fn.F = b.tree->F;
    b.fn.G = b.tree->G;
    b.fn.r = j.contains("functions") ? j.at("functions").value("r", std::size_t{0}) : j.value("r", std::size_t{0});
  } else {
    const json& nj = need(j, "network", "bundle");
    b.q = modulus(nj, "network");
    b.net = network_from(nj);
    b.fn = functions_from(need(j, "functions", "bundle"), b.q, b.net.num_sources());
  }
  if (j.contains("code")) b.code = code_from(j.at("code"), b.net, b.q);
  if (j.contains("branch")) {
    if (!b.tree) fail("branch", "a branch section needs a tree");
    b.branch = branch_from(j.at("branch"), *b.tree, b.fn.r);
    if (!b.code) b.code = b.branch->code;
  }
  if (j.contains("base")) {
    LinearSecureCode c = code_from(j.at("base"), b.net, b.q, "base");
    if (c.n != 1 || c.total_keys() != 0) fail("base", "base code must be (R,1) without keys");
    b.base = BaseSumCode{c.l, c};
  }
  if (j.contains("expect")) b.extra = j.at("expect");
  return b;
}

inline json parse_text(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(where, e.what());
  }
}

inline json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str(), path);
}

inline Bundle read_bundle(const std::string& path) {
  try {
    return bundle_from(read_json(path));
  } catch (const json::exception& e) {
    fail(path, e.what());
  }
}

}  // namespace snc::io
