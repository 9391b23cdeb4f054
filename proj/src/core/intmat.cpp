#include "core/intmat.hpp"

#include <cstdlib>

#include "core/errors.hpp"

namespace torquot {

namespace {

Int abs_int(const Int& a) { return a < 0 ? Int(-a) : a; }

// Floor division for b > 0; cpp_int's operator/ truncates toward zero.
Int floor_div(const Int& a, const Int& b) {
  Int q = a / b;
  if (a % b != 0 && a < 0) --q;
  return q;
}

Int gcd_int(Int a, Int b) {
  a = abs_int(a);
  b = abs_int(b);
  while (b != 0) {
    Int t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long long>> rows) {
  rows_ = int(rows.size());
  cols_ = rows_ ? int(rows.begin()->size()) : 0;
  data_.resize(size_t(rows_) * cols_);
  int r = 0;
  for (const auto& row : rows) {
    if (int(row.size()) != cols_)
      fail(ErrorClass::InvalidSpec, "invalid_spec", "ragged matrix literal");
    int c = 0;
    for (long long v : row) (*this)(r, c++) = v;
    ++r;
  }
}

IntMatrix IntMatrix::identity(int n) {
  IntMatrix I(n, n);
  for (int i = 0; i < n; ++i) I(i, i) = 1;
  return I;
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix T(cols_, rows_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) T(c, r) = (*this)(r, c);
  return T;
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
  if (cols_ != o.rows_)
    fail(ErrorClass::Internal, "internal", "matrix product dimension mismatch");
  IntMatrix P(rows_, o.cols_);
  for (int r = 0; r < rows_; ++r)
    for (int k = 0; k < cols_; ++k) {
      const Int& a = (*this)(r, k);
      if (a == 0) continue;
      for (int c = 0; c < o.cols_; ++c) P(r, c) += a * o(k, c);
    }
  return P;
}

std::vector<Int> IntMatrix::row(int r) const {
  std::vector<Int> v(cols_);
  for (int c = 0; c < cols_; ++c) v[c] = (*this)(r, c);
  return v;
}

std::vector<Int> IntMatrix::col(int c) const {
  std::vector<Int> v(rows_);
  for (int r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

bool IntMatrix::row_is_zero(int r) const {
  for (int c = 0; c < cols_; ++c)
    if ((*this)(r, c) != 0) return false;
  return true;
}

bool IntMatrix::col_is_zero(int c) const {
  for (int r = 0; r < rows_; ++r)
    if ((*this)(r, c) != 0) return false;
  return true;
}

IntMatrix IntMatrix::select_cols(const std::vector<int>& keep) const {
  IntMatrix S(rows_, int(keep.size()));
  for (int r = 0; r < rows_; ++r)
    for (size_t j = 0; j < keep.size(); ++j) S(r, int(j)) = (*this)(r, keep[j]);
  return S;
}

IntMatrix IntMatrix::drop_col(int c) const {
  std::vector<int> keep;
  for (int j = 0; j < cols_; ++j)
    if (j != c) keep.push_back(j);
  return select_cols(keep);
}

std::string IntMatrix::str() const {
  std::string s = "[";
  for (int r = 0; r < rows_; ++r) {
    s += r ? ",[" : "[";
    for (int c = 0; c < cols_; ++c) {
      if (c) s += ",";
      s += (*this)(r, c).str();
    }
    s += "]";
  }
  return s + "]";
}

std::vector<Int> mul_row_vec(const std::vector<Int>& v, const IntMatrix& A) {
  if (int(v.size()) != A.rows())
    fail(ErrorClass::Internal, "internal", "row-vector product dimension mismatch");
  std::vector<Int> out(A.cols());
  for (int r = 0; r < A.rows(); ++r) {
    if (v[r] == 0) continue;
    for (int c = 0; c < A.cols(); ++c) out[c] += v[r] * A(r, c);
  }
  return out;
}

Int vec_content(const std::vector<Int>& v) {
  Int g = 0;
  for (const Int& x : v) g = gcd_int(g, x);
  return g;
}

HermiteResult hermite_normal_form(const IntMatrix& A) {
  const int rows = A.rows(), cols = A.cols();
  HermiteResult res{A, IntMatrix::identity(rows), 0};
  IntMatrix& H = res.H;
  IntMatrix& U = res.U;

  auto swap_rows = [&](int a, int b) {
    if (a == b) return;
    for (int c = 0; c < cols; ++c) std::swap(H(a, c), H(b, c));
    for (int c = 0; c < rows; ++c) std::swap(U(a, c), U(b, c));
  };
  auto addmul_row = [&](int dst, int src, const Int& q) {
    if (q == 0) return;
    for (int c = 0; c < cols; ++c) H(dst, c) -= q * H(src, c);
    for (int c = 0; c < rows; ++c) U(dst, c) -= q * U(src, c);
  };
  auto negate_row = [&](int r) {
    for (int c = 0; c < cols; ++c) H(r, c) = -H(r, c);
    for (int c = 0; c < rows; ++c) U(r, c) = -U(r, c);
  };

  int p = 0;  // next pivot row
  for (int col = 0; col < cols && p < rows; ++col) {
    // Euclidean reduction below the pivot until one nonzero entry remains.
    for (;;) {
      int best = -1;
      for (int r = p; r < rows; ++r)
        if (H(r, col) != 0 && (best < 0 || abs_int(H(r, col)) < abs_int(H(best, col))))
          best = r;
      if (best < 0) break;
      swap_rows(p, best);
      bool clean = true;
      for (int r = p + 1; r < rows; ++r) {
        if (H(r, col) == 0) continue;
        addmul_row(r, p, H(r, col) / H(p, col));
        if (H(r, col) != 0) clean = false;
      }
      if (clean) break;
    }
    if (H(p, col) == 0) continue;
    if (H(p, col) < 0) negate_row(p);
    for (int r = 0; r < p; ++r) addmul_row(r, p, floor_div(H(r, col), H(p, col)));
    ++p;
  }
  res.rank = p;
  return res;
}

SmithResult smith_normal_form(const IntMatrix& A) {
  const int rows = A.rows(), cols = A.cols();
  SmithResult res{IntMatrix::identity(rows), A, IntMatrix::identity(cols), {}, 0};
  IntMatrix& U = res.U;
  IntMatrix& D = res.D;
  IntMatrix& V = res.V;

  auto swap_rows = [&](int a, int b) {
    if (a == b) return;
    for (int c = 0; c < cols; ++c) std::swap(D(a, c), D(b, c));
    for (int c = 0; c < rows; ++c) std::swap(U(a, c), U(b, c));
  };
  auto swap_cols = [&](int a, int b) {
    if (a == b) return;
    for (int r = 0; r < rows; ++r) std::swap(D(r, a), D(r, b));
    for (int r = 0; r < cols; ++r) std::swap(V(r, a), V(r, b));
  };
  auto addmul_row = [&](int dst, int src, const Int& q) {  // row dst -= q*row src
    if (q == 0) return;
    for (int c = 0; c < cols; ++c) D(dst, c) -= q * D(src, c);
    for (int c = 0; c < rows; ++c) U(dst, c) -= q * U(src, c);
  };
  auto addmul_col = [&](int dst, int src, const Int& q) {  // col dst -= q*col src
    if (q == 0) return;
    for (int r = 0; r < rows; ++r) D(r, dst) -= q * D(r, src);
    for (int r = 0; r < cols; ++r) V(r, dst) -= q * V(r, src);
  };

  int t = 0;
  const int bound = std::min(rows, cols);
  while (t < bound) {
    // Smallest nonzero entry of the trailing submatrix becomes the pivot seed.
    int pi = -1, pj = -1;
    for (int r = t; r < rows; ++r)
      for (int c = t; c < cols; ++c)
        if (D(r, c) != 0 &&
            (pi < 0 || abs_int(D(r, c)) < abs_int(D(pi, pj)))) {
          pi = r;
          pj = c;
        }
    if (pi < 0) break;
    swap_rows(t, pi);
    swap_cols(t, pj);

    for (;;) {
      // Clear column t, restarting whenever a remainder undercuts the pivot.
      bool restart = false;
      for (int r = t + 1; r < rows && !restart; ++r) {
        if (D(r, t) == 0) continue;
        addmul_row(r, t, D(r, t) / D(t, t));
        if (D(r, t) != 0) {
          swap_rows(r, t);
          restart = true;
        }
      }
      if (restart) continue;
      for (int c = t + 1; c < cols && !restart; ++c) {
        if (D(t, c) == 0) continue;
        addmul_col(c, t, D(t, c) / D(t, t));
        if (D(t, c) != 0) {
          swap_cols(c, t);
          restart = true;
        }
      }
      if (restart) continue;

      // Pivot must divide the whole trailing block for the divisor chain.
      int br = -1;
      for (int r = t + 1; r < rows && br < 0; ++r)
        for (int c = t + 1; c < cols; ++c)
          if (D(r, c) % D(t, t) != 0) {
            br = r;
            break;
          }
      if (br < 0) break;
      addmul_row(t, br, Int(-1));  // fold offending row into the pivot row
    }
    if (D(t, t) < 0) {
      for (int c = 0; c < cols; ++c) D(t, c) = -D(t, c);
      for (int c = 0; c < rows; ++c) U(t, c) = -U(t, c);
    }
    ++t;
  }
  res.rank = t;
  for (int i = 0; i < t; ++i) res.diagonal.push_back(D(i, i));
  return res;
}

Int bareiss_determinant(const IntMatrix& A) {
  if (A.rows() != A.cols())
    fail(ErrorClass::Internal, "internal", "determinant of non-square matrix");
  const int n = A.rows();
  if (n == 0) return 1;
  IntMatrix M = A;
  Int prev = 1;
  int sign = 1;
  for (int k = 0; k + 1 < n; ++k) {
    if (M(k, k) == 0) {
      int sw = -1;
      for (int r = k + 1; r < n; ++r)
        if (M(r, k) != 0) {
          sw = r;
          break;
        }
      if (sw < 0) return 0;
      for (int c = 0; c < n; ++c) std::swap(M(k, c), M(sw, c));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j)
        M(i, j) = (M(i, j) * M(k, k) - M(i, k) * M(k, j)) / prev;
    prev = M(k, k);
  }
  return sign > 0 ? M(n - 1, n - 1) : Int(-M(n - 1, n - 1));
}

int rational_rank(const IntMatrix& A) { return hermite_normal_form(A).rank; }

IntMatrix rational_kernel(const IntMatrix& A) {
  HermiteResult h = hermite_normal_form(A);
  const int k = A.rows();
  const int s = k - h.rank;
  IntMatrix basis(s, k);
  for (int i = 0; i < s; ++i)
    for (int c = 0; c < k; ++c) basis(i, c) = h.U(h.rank + i, c);
  // Rows of a unimodular matrix are already primitive; Hermite-reduce the
  // basis so the result is canonical regardless of elimination order.
  if (s == 0) return basis;
  HermiteResult hb = hermite_normal_form(basis);
  IntMatrix out(s, k);
  for (int i = 0; i < s; ++i)
    for (int c = 0; c < k; ++c) out(i, c) = hb.H(i, c);
  return out;
}

IntMatrix saturate_rows(const IntMatrix& A) {
  // Saturation = integer vectors orthogonal to the rational right kernel.
  IntMatrix right_kernel = rational_kernel(A.transpose());  // rows span {c : A c = 0}
  return rational_kernel(right_kernel.transpose());
}

bool hermite_lattice_contains(const IntMatrix& B, const std::vector<Int>& c) {
  if (int(c.size()) != B.cols())
    fail(ErrorClass::Internal, "internal", "lattice membership dimension mismatch");
  std::vector<Int> x = c;
  for (int i = 0; i < B.rows(); ++i) {
    int piv = -1;
    for (int j = 0; j < B.cols(); ++j)
      if (B(i, j) != 0) {
        piv = j;
        break;
      }
    if (piv < 0) fail(ErrorClass::Internal, "internal", "zero row in Hermite basis");
    if (x[piv] % B(i, piv) != 0) return false;
    Int q = x[piv] / B(i, piv);
    if (q != 0)
      for (int j = 0; j < B.cols(); ++j) x[j] -= q * B(i, j);
  }
  for (const Int& v : x)
    if (v != 0) return false;
  return true;
}

}  // namespace torquot
