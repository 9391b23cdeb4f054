#include "core/actions.hpp"

#include <cmath>
#include <numbers>

#include "core/errors.hpp"

namespace torquot {

namespace {

Eigen::MatrixXd to_double(const IntMatrix& A) {
  Eigen::MatrixXd M(A.rows(), A.cols());
  for (int r = 0; r < A.rows(); ++r)
    for (int c = 0; c < A.cols(); ++c) M(r, c) = double(A(r, c));
  return M;
}

}  // namespace

TorusAction TorusAction::create(int k, int n, int f, IntMatrix W) {
  if (k < 0 || n < 0 || f < 0)
    fail(ErrorClass::InvalidSpec, "invalid_spec", "negative dimension parameter");
  if (W.rows() != k || W.cols() != n)
    fail(ErrorClass::InvalidSpec, "invalid_spec", "weight matrix must be k x n");
  for (int r = 0; r < k; ++r)
    if (W.row_is_zero(r))
      fail(ErrorClass::InvalidSpec, "invalid_spec",
           "weight row " + std::to_string(r + 1) + " is zero: that circle factor acts trivially");
  if (rational_rank(W) != k)
    fail(ErrorClass::InvalidSpec, "invalid_spec",
         "weight matrix rank " + std::to_string(rational_rank(W)) + " < k = " +
             std::to_string(k) + ": torus has a positive-dimensional acting kernel");

  TorusAction a;
  a.k_ = k;
  a.n_ = n;
  a.f_ = f;
  a.W_ = W;
  a.W_eff_ = saturate_rows(W);
  SmithResult s = smith_normal_form(W);
  for (const Int& d : s.diagonal)
    if (d > 1) a.kernel_factors_.push_back(d);
  a.Wd_ = to_double(a.W_);
  a.Wd_eff_ = to_double(a.W_eff_);
  return a;
}

Eigen::MatrixXd TorusAction::rotation(const Eigen::VectorXd& theta) const {
  if (theta.size() != k_)
    fail(ErrorClass::InvalidSpec, "invalid_spec", "rotation parameter has wrong length");
  Eigen::MatrixXd R = Eigen::MatrixXd::Identity(m(), m());
  Eigen::VectorXd alpha = Wd_.transpose() * theta;  // angle per plane
  for (int i = 0; i < n_; ++i) {
    double c = std::cos(alpha[i]), s = std::sin(alpha[i]);
    R(2 * i, 2 * i) = c;
    R(2 * i, 2 * i + 1) = -s;
    R(2 * i + 1, 2 * i) = s;
    R(2 * i + 1, 2 * i + 1) = c;
  }
  return R;
}

Eigen::MatrixXd TorusAction::killing_generator(const Eigen::VectorXd& c) const {
  if (c.size() != k_)
    fail(ErrorClass::InvalidSpec, "invalid_spec", "generator parameter has wrong length");
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(m(), m());
  Eigen::VectorXd w = Wd_.transpose() * c;
  for (int i = 0; i < n_; ++i) {
    S(2 * i, 2 * i + 1) = -w[i];
    S(2 * i + 1, 2 * i) = w[i];
  }
  return S;
}

Eigen::VectorXd TorusAction::killing_field(const Eigen::VectorXd& c,
                                           const Eigen::VectorXd& x) const {
  return killing_generator(c) * x;
}

Eigen::MatrixXd TorusAction::killing_basis(const Eigen::VectorXd& x) const {
  if (x.size() != m())
    fail(ErrorClass::InvalidSpec, "invalid_spec", "point has wrong dimension");
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m(), k_);
  for (int a = 0; a < k_; ++a)
    for (int i = 0; i < n_; ++i) {
      double w = Wd_(a, i);
      if (w == 0.0) continue;
      K(2 * i, a) = -w * x[2 * i + 1];
      K(2 * i + 1, a) = w * x[2 * i];
    }
  return K;
}

namespace {

// Split the SVD of K into range (vertical) and null complement (horizontal).
struct SplitFrames {
  Eigen::MatrixXd vertical, horizontal;
};

SplitFrames orbit_frames(const Eigen::MatrixXd& K, double tol) {
  if (K.cols() == 0) {
    return {Eigen::MatrixXd::Zero(K.rows(), 0),
            Eigen::MatrixXd::Identity(K.rows(), K.rows())};
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(K, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  double top = sv.size() ? sv[0] : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > tol * top && sv[i] > 0.0) ++rank;
  SplitFrames out;
  out.vertical = svd.matrixU().leftCols(rank);
  out.horizontal = svd.matrixU().rightCols(K.rows() - rank);
  return out;
}

}  // namespace

Eigen::MatrixXd TorusAction::vertical_space(const Eigen::VectorXd& x, double tol) const {
  return orbit_frames(killing_basis(x), tol).vertical;
}

Eigen::MatrixXd TorusAction::horizontal_space(const Eigen::VectorXd& x, double tol) const {
  return orbit_frames(killing_basis(x), tol).horizontal;
}

bool TorusAction::is_principal(const Eigen::VectorXd& x, double tol) const {
  return vertical_space(x, tol).cols() == k_;
}

int FiniteOrthGroup::find(const Eigen::MatrixXd& g) const {
  double best = tol * std::max(1, dim);
  int idx = -1;
  for (size_t i = 0; i < elements.size(); ++i) {
    double d = (elements[i] - g).norm();
    if (d < best) {
      best = d;
      idx = int(i);
    }
  }
  return idx;
}

FiniteOrthGroup FiniteOrthGroup::trivial(int dim, double tol) {
  return {dim, tol, {Eigen::MatrixXd::Identity(dim, dim)}};
}

namespace {

void require_orthogonal(const Eigen::MatrixXd& g, int dim, double tol, const char* what) {
  if (g.rows() != dim || g.cols() != dim)
    fail(ErrorClass::InvalidSpec, "invalid_spec", std::string(what) + " has wrong shape");
  double dev = (g.transpose() * g - Eigen::MatrixXd::Identity(dim, dim)).norm();
  if (dev > std::max(tol, 1e-12) * dim)
    fail(ErrorClass::InvalidSpec, "invalid_spec",
         std::string(what) + " is not orthogonal (deviation " + std::to_string(dev) + ")");
}

}  // namespace

FiniteOrthGroup close_group(int dim, const std::vector<Eigen::MatrixXd>& generators,
                            double tol, int max_order) {
  FiniteOrthGroup G;
  G.dim = dim;
  G.tol = tol;
  G.elements.push_back(Eigen::MatrixXd::Identity(dim, dim));
  for (const auto& g : generators) require_orthogonal(g, dim, tol, "generator");

  // Product-closure BFS; a finite set of invertible matrices closed under
  // products contains inverses automatically.
  size_t next = 0;
  while (next < G.elements.size()) {
    Eigen::MatrixXd base = G.elements[next++];
    for (const auto& g : generators) {
      Eigen::MatrixXd p = base * g;
      if (G.find(p) < 0) {
        if (int(G.elements.size()) >= max_order)
          fail(ErrorClass::ResourceLimit, "not_closed",
               "group closure exceeded max_order = " + std::to_string(max_order));
        G.elements.push_back(std::move(p));
      }
    }
  }
  return G;
}

FiniteOrthGroup group_from_elements(int dim, std::vector<Eigen::MatrixXd> elements,
                                    double tol) {
  FiniteOrthGroup G;
  G.dim = dim;
  G.tol = tol;
  for (const auto& g : elements) require_orthogonal(g, dim, tol, "group element");
  // Identity first, then the rest, rejecting duplicates.
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(dim, dim);
  G.elements.push_back(I);
  for (auto& g : elements) {
    if (G.find(g) < 0) G.elements.push_back(std::move(g));
  }
  for (const auto& a : G.elements)
    for (const auto& b : G.elements)
      if (G.find(a * b) < 0)
        fail(ErrorClass::InvalidSpec, "invalid_spec", "element list is not closed under products");
  return G;
}

ExtendedAction make_extended(TorusAction torus, FiniteOrthGroup finite, double tol) {
  if (finite.dim != torus.m())
    fail(ErrorClass::InvalidSpec, "invalid_spec", "finite part dimension != 2n + f");

  // Characters vanishing on the torus image: integer relations among plane
  // angles. h lies in the image iff h is block-rotation shaped and its angle
  // vector satisfies every relation mod 2pi.
  IntMatrix relations = rational_kernel(torus.W().transpose());  // rows c: W c^T = 0
  const int n = torus.n();
  const int m = torus.m();
  const double pi = std::numbers::pi;
  const double check_tol = std::max(1e-7, 100.0 * tol);

  std::vector<Eigen::VectorXd> thetas;
  for (int s = 0; s < 2; ++s) {
    Eigen::VectorXd th(torus.k());
    for (int a = 0; a < torus.k(); ++a) th[a] = 0.31 + 0.17 * (a + 1) + 0.43 * s;
    thetas.push_back(th);
  }

  for (const auto& g : finite.elements) {
    for (const auto& th : thetas) {
      Eigen::MatrixXd h = g * torus.rotation(th) * g.transpose();
      // Block-rotation shape: 2x2 rotation blocks on the planes, identity on
      // the fixed coordinates, zero elsewhere.
      Eigen::MatrixXd mask = h;
      Eigen::VectorXd alpha(n);
      for (int i = 0; i < n; ++i) {
        double c = h(2 * i, 2 * i), sn = h(2 * i + 1, 2 * i);
        alpha[i] = std::atan2(sn, c);
        double cc = std::cos(alpha[i]), ss = std::sin(alpha[i]);
        mask(2 * i, 2 * i) -= cc;
        mask(2 * i, 2 * i + 1) -= -ss;
        mask(2 * i + 1, 2 * i) -= ss;
        mask(2 * i + 1, 2 * i + 1) -= cc;
      }
      for (int z = 2 * n; z < m; ++z) mask(z, z) -= 1.0;
      if (mask.norm() > check_tol)
        fail(ErrorClass::InvalidSpec, "invalid_spec",
             "finite generator does not normalize the torus (conjugate is not a torus rotation)");
      for (int r = 0; r < relations.rows(); ++r) {
        double s = 0.0, scale = 1.0;
        for (int i = 0; i < n; ++i) {
          double c = double(relations(r, i));
          s += c * alpha[i];
          scale += std::abs(c);
        }
        double frac = s - 2.0 * pi * std::round(s / (2.0 * pi));
        if (std::abs(frac) > check_tol * scale)
          fail(ErrorClass::InvalidSpec, "invalid_spec",
               "finite generator does not normalize the torus (conjugate angles leave the image)");
      }
    }
  }
  return ExtendedAction{std::move(torus), std::move(finite)};
}

}  // namespace torquot
