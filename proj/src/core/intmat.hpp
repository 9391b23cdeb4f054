#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <initializer_list>
#include <string>
#include <vector>

namespace torquot {

using Int = boost::multiprecision::cpp_int;

// Dense arbitrary-precision integer matrix, row-major. Sized for lattice work
// on small weight matrices; no attempt at sparse or blocked storage.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(size_t(rows) * cols) {}
  IntMatrix(std::initializer_list<std::initializer_list<long long>> rows);

  static IntMatrix identity(int n);
  static IntMatrix zero(int rows, int cols) { return IntMatrix(rows, cols); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Int& operator()(int r, int c) { return data_[size_t(r) * cols_ + c]; }
  const Int& operator()(int r, int c) const { return data_[size_t(r) * cols_ + c]; }

  bool operator==(const IntMatrix& o) const = default;

  IntMatrix transpose() const;
  IntMatrix operator*(const IntMatrix& o) const;
  std::vector<Int> row(int r) const;
  std::vector<Int> col(int c) const;
  bool row_is_zero(int r) const;
  bool col_is_zero(int c) const;

  // Columns listed in `keep`, in the given order.
  IntMatrix select_cols(const std::vector<int>& keep) const;
  IntMatrix drop_col(int c) const;

  std::string str() const;  // "[[a,b],[c,d]]", for messages and tests

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<Int> data_;
};

std::vector<Int> mul_row_vec(const std::vector<Int>& v, const IntMatrix& A);  // v*A

struct HermiteResult {
  IntMatrix H;  // row-style Hermite form: staircase, positive pivots,
                // entries above a pivot reduced into [0, pivot)
  IntMatrix U;  // unimodular, U*A == H
  int rank = 0;
};

struct SmithResult {
  IntMatrix U, D, V;              // U*A*V == D, U and V unimodular
  std::vector<Int> diagonal;      // d_1, ..., d_r > 0 with d_i | d_{i+1}
  int rank = 0;
};

HermiteResult hermite_normal_form(const IntMatrix& A);
SmithResult smith_normal_form(const IntMatrix& A);

// Exact determinant (square input), Bareiss fraction-free elimination.
Int bareiss_determinant(const IntMatrix& A);

int rational_rank(const IntMatrix& A);

// Canonical primitive basis (as rows) of the left kernel lattice
// { c in Z^rows : c * A = 0 }. The lattice is saturated, so every basis row is
// primitive; rows are returned in Hermite form for reproducibility.
IntMatrix rational_kernel(const IntMatrix& A);

// Canonical basis (as rows) of the saturation of the row lattice of A:
// (rowspace_Q(A)) ∩ Z^cols. Result has rational_rank(A) rows.
IntMatrix saturate_rows(const IntMatrix& A);

// True iff c lies in the lattice spanned (over Z) by the rows of the Hermite
// basis B. B must be a matrix in row Hermite form with no zero rows.
bool hermite_lattice_contains(const IntMatrix& B, const std::vector<Int>& c);

Int vec_content(const std::vector<Int>& v);  // gcd of entries, 0 for zero vector

}  // namespace torquot
