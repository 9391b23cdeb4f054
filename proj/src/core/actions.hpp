#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "core/intmat.hpp"

namespace torquot {

// Torus action on R^m, m = 2n + f: coordinates are n rotation planes
// (x_1,y_1,...,x_n,y_n) followed by f fixed coordinates. Parameter theta in
// R^k rotates plane i by the angle sum_a theta_a * W(a,i).
//
// Construction validates rank_Q(W) = k and that no row is zero. If the row
// lattice of W is not saturated the parametrization has a finite acting
// kernel; its invariant factors are reported and W_eff re-parametrizes the
// effective quotient torus. Group-structure computations (isotropy factors,
// canonical split bases, local reductions) use W_eff; orbit-level geometry
// (rotations, Killing fields, distances, curvature) is identical for both.
class TorusAction {
 public:
  static TorusAction create(int k, int n, int f, IntMatrix W);

  int k() const { return k_; }
  int n() const { return n_; }
  int f() const { return f_; }
  int m() const { return 2 * n_ + f_; }
  const IntMatrix& W() const { return W_; }
  const IntMatrix& W_eff() const { return W_eff_; }
  const Eigen::MatrixXd& Wd() const { return Wd_; }
  const std::vector<Int>& kernel_factors() const { return kernel_factors_; }

  // Block rotation by angles theta * W.
  Eigen::MatrixXd rotation(const Eigen::VectorXd& theta) const;

  // Skew generator S(c) with S(c) x = d/dt|_0 rotation(t c) x.
  Eigen::MatrixXd killing_generator(const Eigen::VectorXd& c) const;
  Eigen::VectorXd killing_field(const Eigen::VectorXd& c, const Eigen::VectorXd& x) const;

  // m x k matrix whose column a is the Killing field of the a-th circle
  // factor at x. Linear in x.
  Eigen::MatrixXd killing_basis(const Eigen::VectorXd& x) const;

  // Orthonormal basis of the orbit tangent space at x. Rank is decided by
  // singular values relative to the largest one; empty at fixed points.
  Eigen::MatrixXd vertical_space(const Eigen::VectorXd& x, double tol = 1e-9) const;

  // Orthonormal basis of the orthogonal complement of the orbit tangent.
  Eigen::MatrixXd horizontal_space(const Eigen::VectorXd& x, double tol = 1e-9) const;

  bool is_principal(const Eigen::VectorXd& x, double tol = 1e-9) const;

 private:
  TorusAction() = default;
  int k_ = 0, n_ = 0, f_ = 0;
  IntMatrix W_, W_eff_;
  std::vector<Int> kernel_factors_;
  Eigen::MatrixXd Wd_, Wd_eff_;
};

// Finite subgroup of O(dim). Elements are orthogonal within `tol`; the set
// contains the identity (stored first) and is closed under products up to
// element-matching at `tol`.
struct FiniteOrthGroup {
  int dim = 0;
  double tol = 1e-9;
  std::vector<Eigen::MatrixXd> elements;

  int order() const { return int(elements.size()); }
  // Index of the element matching g within tol (Frobenius), -1 if absent.
  int find(const Eigen::MatrixXd& g) const;
  static FiniteOrthGroup trivial(int dim, double tol = 1e-9);
};

// BFS closure of the generated group. Throws not_closed once the element
// count exceeds max_order (e.g. for irrational rotations).
FiniteOrthGroup close_group(int dim, const std::vector<Eigen::MatrixXd>& generators,
                            double tol = 1e-9, int max_order = 4096);

// Validates an explicit element list: orthogonality, identity, closure.
FiniteOrthGroup group_from_elements(int dim, std::vector<Eigen::MatrixXd> elements,
                                    double tol = 1e-9);

// Torus action together with a finite group of isometries normalizing it.
// Construction checks the normalization on sampled torus elements: for each
// finite g, the conjugate g rotation(theta) g^T must again lie in the torus.
struct ExtendedAction {
  TorusAction torus;
  FiniteOrthGroup finite;
};

ExtendedAction make_extended(TorusAction torus, FiniteOrthGroup finite, double tol = 1e-9);

}  // namespace torquot
