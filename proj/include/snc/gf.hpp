#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace snc {

using elem = std::uint64_t;

// every failure carries a short kind tag so callers and the cli can map it
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

inline bool is_prime(elem q) {
  if (q < 2) return false;
  for (elem d = 2; d * d <= q; ++d)
    if (q % d == 0) return false;
  return true;
}

class PrimeField {
 public:
  PrimeField() = default;
  explicit PrimeField(elem q) : q_(q) {
    if (!is_prime(q)) throw Error("NotPrime", "modulus " + std::to_string(q) + " is not prime");
    if (q >= (elem(1) << 32)) throw Error("DegenerateInput", "modulus must fit in 32 bits");
  }
  elem q() const { return q_; }
  elem reduce(long long v) const {
    long long m = static_cast<long long>(q_);
    long long r = v % m;
    return static_cast<elem>(r < 0 ? r + m : r);
  }
  elem add(elem a, elem b) const { return (a + b) % q_; }
  elem sub(elem a, elem b) const { return (a + q_ - b) % q_; }
  elem mul(elem a, elem b) const { return (a * b) % q_; }
  elem neg(elem a) const { return a == 0 ? 0 : q_ - a; }
  elem pow(elem a, elem e) const {
    elem r = 1 % q_;
    a %= q_;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
  elem inv(elem b) const {
    if (b % q_ == 0) throw Error("DivisionByZero", "inverse of zero");
    return pow(b, q_ - 2);
  }

 private:
  elem q_ = 2;
};

enum class FieldOp { add, sub, mul, inv };

inline elem field_ops(const PrimeField& F, elem a, elem b, FieldOp kind) {
  switch (kind) {
    case FieldOp::add: return F.add(a, b);
    case FieldOp::sub: return F.sub(a, b);
    case FieldOp::mul: return F.mul(a, b);
    case FieldOp::inv: return F.inv(b);
  }
  return 0;
}

class Matrix {
 public:
  Matrix() = default;
  Matrix(elem q, std::size_t rows, std::size_t cols)
      : F_(q), rows_(rows), cols_(cols), a_(rows * cols, 0) {}

  static Matrix from_rows(elem q, const std::vector<std::vector<long long>>& rows,
                          std::size_t cols_if_empty = 0) {
    std::size_t c = rows.empty() ? cols_if_empty : rows[0].size();
    Matrix M(q, rows.size(), c);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != c) throw Error("ShapeError", "ragged matrix literal");
      for (std::size_t j = 0; j < c; ++j) M.a_[i * c + j] = M.F_.reduce(rows[i][j]);
    }
    return M;
  }
  static Matrix identity(elem q, std::size_t n) {
    Matrix M(q, n, n);
    for (std::size_t i = 0; i < n; ++i) M.a_[i * n + i] = 1 % q;
    return M;
  }
  static Matrix column(elem q, const std::vector<long long>& v) {
    Matrix M(q, v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) M.a_[i] = M.F_.reduce(v[i]);
    return M;
  }

  elem q() const { return F_.q(); }
  const PrimeField& field() const { return F_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  elem operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
  elem& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  void set(std::size_t i, std::size_t j, long long v) { a_[i * cols_ + j] = F_.reduce(v); }

  bool operator==(const Matrix& o) const {
    return q() == o.q() && rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }
  bool operator!=(const Matrix& o) const { return !(*this == o); }

  bool is_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](elem x) { return x == 0; });
  }

  Matrix operator*(const Matrix& o) const {
    same_field(o);
    if (cols_ != o.rows_) throw Error("ShapeError", "product dimension mismatch");
    Matrix R(q(), rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        elem x = (*this)(i, k);
        if (!x) continue;
        for (std::size_t j = 0; j < o.cols_; ++j)
          R.a_[i * o.cols_ + j] = (R.a_[i * o.cols_ + j] + x * o(k, j)) % q();
      }
    return R;
  }
  Matrix operator+(const Matrix& o) const {
    same_field(o);
    if (rows_ != o.rows_ || cols_ != o.cols_) throw Error("ShapeError", "sum dimension mismatch");
    Matrix R = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) R.a_[i] = F_.add(a_[i], o.a_[i]);
    return R;
  }
  Matrix operator-(const Matrix& o) const {
    same_field(o);
    if (rows_ != o.rows_ || cols_ != o.cols_) throw Error("ShapeError", "difference dimension mismatch");
    Matrix R = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) R.a_[i] = F_.sub(a_[i], o.a_[i]);
    return R;
  }
  Matrix scaled(elem c) const {
    Matrix R = *this;
    for (auto& x : R.a_) x = F_.mul(x, c % q());
    return R;
  }

  Matrix transpose() const {
    Matrix R(q(), cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) R.a_[j * rows_ + i] = (*this)(i, j);
    return R;
  }
  Matrix hcat(const Matrix& o) const {
    same_field(o);
    if (rows_ != o.rows_) throw Error("ShapeError", "hcat row mismatch");
    Matrix R(q(), rows_, cols_ + o.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) R.at(i, j) = (*this)(i, j);
      for (std::size_t j = 0; j < o.cols_; ++j) R.at(i, cols_ + j) = o(i, j);
    }
    return R;
  }
  Matrix vcat(const Matrix& o) const {
    same_field(o);
    if (cols_ != o.cols_) throw Error("ShapeError", "vcat column mismatch");
    Matrix R(q(), rows_ + o.rows_, cols_);
    std::copy(a_.begin(), a_.end(), R.a_.begin());
    std::copy(o.a_.begin(), o.a_.end(), R.a_.begin() + a_.size());
    return R;
  }
  Matrix select_cols(const std::vector<std::size_t>& idx) const {
    Matrix R(q(), rows_, idx.size());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < idx.size(); ++j) R.at(i, j) = (*this)(i, idx[j]);
    return R;
  }
  Matrix select_rows(const std::vector<std::size_t>& idx) const {
    Matrix R(q(), idx.size(), cols_);
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < cols_; ++j) R.at(i, j) = (*this)(idx[i], j);
    return R;
  }
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw Error("ShapeError", "block out of range");
    Matrix R(q(), nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) R.at(i, j) = (*this)(r0 + i, c0 + j);
    return R;
  }
  void put(std::size_t r0, std::size_t c0, const Matrix& B) {
    same_field(B);
    if (r0 + B.rows_ > rows_ || c0 + B.cols_ > cols_) throw Error("ShapeError", "put out of range");
    for (std::size_t i = 0; i < B.rows_; ++i)
      for (std::size_t j = 0; j < B.cols_; ++j) at(r0 + i, c0 + j) = B(i, j);
  }

  std::vector<std::vector<long long>> to_rows() const {
    std::vector<std::vector<long long>> out(rows_, std::vector<long long>(cols_));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out[i][j] = static_cast<long long>((*this)(i, j));
    return out;
  }
  std::string str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < rows_; ++i) {
      os << (i ? ",[" : "[");
      for (std::size_t j = 0; j < cols_; ++j) os << (j ? "," : "") << (*this)(i, j);
      os << "]";
    }
    os << "]";
    return os.str();
  }

  void same_field(const Matrix& o) const {
    if (q() != o.q()) throw Error("FieldMismatch", "moduli differ");
  }

 private:
  PrimeField F_;
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<elem> a_;
};

struct Rref {
  Matrix R;
  std::size_t rank = 0;
  std::vector<std::size_t> pivots;
};

inline Rref rref(const Matrix& M) {
  Rref out{M, 0, {}};
  Matrix& R = out.R;
  const PrimeField& F = M.field();
  std::size_t row = 0;
  for (std::size_t c = 0; c < R.cols() && row < R.rows(); ++c) {
    std::size_t p = row;
    while (p < R.rows() && R(p, c) == 0) ++p;
    if (p == R.rows()) continue;
    if (p != row)
      for (std::size_t j = 0; j < R.cols(); ++j) std::swap(R.at(p, j), R.at(row, j));
    elem iv = F.inv(R(row, c));
    for (std::size_t j = 0; j < R.cols(); ++j) R.at(row, j) = F.mul(R(row, j), iv);
    for (std::size_t i = 0; i < R.rows(); ++i) {
      if (i == row || R(i, c) == 0) continue;
      elem f = R(i, c);
      for (std::size_t j = c; j < R.cols(); ++j) R.at(i, j) = F.sub(R(i, j), F.mul(f, R(row, j)));
    }
    out.pivots.push_back(c);
    ++row;
  }
  out.rank = row;
  return out;
}

inline std::size_t rank(const Matrix& M) { return rref(M).rank; }

// columns form a basis of {x : M x = 0}
inline Matrix right_kernel(const Matrix& M) {
  Rref r = rref(M);
  std::vector<bool> is_pivot(M.cols(), false);
  for (auto p : r.pivots) is_pivot[p] = true;
  std::vector<std::size_t> free;
  for (std::size_t j = 0; j < M.cols(); ++j)
    if (!is_pivot[j]) free.push_back(j);
  Matrix K(M.q(), M.cols(), free.size());
  const PrimeField& F = M.field();
  for (std::size_t k = 0; k < free.size(); ++k) {
    K.at(free[k], k) = 1;
    for (std::size_t i = 0; i < r.pivots.size(); ++i) K.at(r.pivots[i], k) = F.neg(r.R(i, free[k]));
  }
  return K;
}

// rows form a basis of {v : v M = 0}
inline Matrix left_kernel(const Matrix& M) { return right_kernel(M.transpose()).transpose(); }

// a maximal independent subset of the columns of M, in order
inline Matrix column_basis(const Matrix& M) { return M.select_cols(rref(M).pivots); }

inline Matrix span_sum(const Matrix& A, const Matrix& B) { return column_basis(A.hcat(B)); }

// block elimination on [A | B]: kernel vectors (x, y) give A x = -B y
inline Matrix intersect_spans(const Matrix& A, const Matrix& B) {
  if (A.rows() != B.rows()) throw Error("ShapeError", "intersect_spans row mismatch");
  A.same_field(B);
  Matrix Ab = column_basis(A), Bb = column_basis(B);
  Matrix K = right_kernel(Ab.hcat(Bb));
  Matrix X = K.block(0, 0, Ab.cols(), K.cols());
  return column_basis(Ab * X);
}

inline std::size_t intersection_dim(const Matrix& A, const Matrix& B) {
  return rank(A) + rank(B) - rank(A.hcat(B));
}

// X with A X = B, or nothing when some column of B is outside the span of A
inline std::optional<Matrix> solve(const Matrix& A, const Matrix& B) {
  if (A.rows() != B.rows()) throw Error("ShapeError", "solve row mismatch");
  Rref r = rref(A.hcat(B));
  Matrix X(A.q(), A.cols(), B.cols());
  for (std::size_t i = 0; i < r.rank; ++i) {
    std::size_t p = r.pivots[i];
    if (p >= A.cols()) return std::nullopt;
    for (std::size_t j = 0; j < B.cols(); ++j) X.at(p, j) = r.R(i, A.cols() + j);
  }
  return X;
}

inline std::optional<Matrix> solve_membership(const Matrix& v, const Matrix& A) { return solve(A, v); }

inline bool in_span(const Matrix& v, const Matrix& A) { return solve(A, v).has_value(); }

inline std::optional<Matrix> inverse(const Matrix& M) {
  if (M.rows() != M.cols()) return std::nullopt;
  if (rank(M) != M.rows()) return std::nullopt;
  return solve(M, Matrix::identity(M.q(), M.rows()));
}

inline Matrix kronecker(const Matrix& A, const Matrix& B) {
  A.same_field(B);
  Matrix R(A.q(), A.rows() * B.rows(), A.cols() * B.cols());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j) {
      elem x = A(i, j);
      if (!x) continue;
      for (std::size_t k = 0; k < B.rows(); ++k)
        for (std::size_t l = 0; l < B.cols(); ++l)
          R.at(i * B.rows() + k, j * B.cols() + l) = A.field().mul(x, B(k, l));
    }
  return R;
}

// calls f on every k-subset of {0..n-1} in lexicographic order; f returns false to stop
inline bool for_each_combination(std::size_t n, std::size_t k,
                                 const std::function<bool(const std::vector<std::size_t>&)>& f) {
  if (k > n) return true;
  std::vector<std::size_t> c(k);
  for (std::size_t i = 0; i < k; ++i) c[i] = i;
  while (true) {
    if (!f(c)) return false;
    std::size_t i = k;
    while (i > 0 && c[i - 1] == n - k + i - 1) --i;
    if (i == 0) return true;
    ++c[i - 1];
    for (std::size_t j = i; j < k; ++j) c[j] = c[j - 1] + 1;
  }
}

inline bool is_mds(const Matrix& M) {
  if (M.rows() > M.cols()) throw Error("ShapeError", "is_mds needs rows <= cols");
  return for_each_combination(M.cols(), M.rows(), [&](const std::vector<std::size_t>& c) {
    return rank(M.select_cols(c)) == M.rows();
  });
}

inline Matrix vandermonde(elem q, const std::vector<long long>& points, std::size_t rows) {
  PrimeField F(q);
  std::vector<elem> p;
  for (auto x : points) p.push_back(F.reduce(x));
  auto sorted = p;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error("DegenerateInput", "duplicate Vandermonde points");
  Matrix V(q, rows, p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    elem x = 1 % q;
    for (std::size_t i = 0; i < rows; ++i) {
      V.at(i, j) = x;
      x = F.mul(x, p[j]);
    }
  }
  return V;
}

inline std::vector<long long> range_points(long long from, std::size_t count) {
  std::vector<long long> p(count);
  for (std::size_t i = 0; i < count; ++i) p[i] = from + static_cast<long long>(i);
  return p;
}

}  // namespace snc
