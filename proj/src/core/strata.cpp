#include "core/strata.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <random>

#include "core/errors.hpp"
#include "core/split.hpp"

namespace torquot {

namespace {

std::vector<int> complement(const std::vector<int>& pattern, int n) {
  std::vector<int> active;
  active.reserve(n);
  std::size_t at = 0;
  for (int j = 0; j < n; ++j) {
    if (at < pattern.size() && pattern[at] == j) {
      ++at;
    } else {
      active.push_back(j);
    }
  }
  return active;
}

void check_pattern(const std::vector<int>& pattern, int n) {
  for (std::size_t t = 0; t < pattern.size(); ++t) {
    if (pattern[t] < 0 || pattern[t] >= n)
      fail(ErrorClass::InvalidSpec, "invalid_spec", "pattern plane index out of range");
    if (t > 0 && pattern[t] <= pattern[t - 1])
      fail(ErrorClass::InvalidSpec, "invalid_spec", "pattern must be strictly increasing");
  }
}

}  // namespace

Stratum stratum_for_pattern(const TorusAction& action, const std::vector<int>& pattern) {
  check_pattern(pattern, action.n());
  const IntMatrix& We = action.W_eff();
  const int k = We.rows();

  Stratum s;
  s.pattern = pattern;
  s.dim_in_total = action.m() - 2 * int(pattern.size());

  IntMatrix active = We.select_cols(complement(pattern, action.n()));
  SmithResult snf = smith_normal_form(active);
  s.isotropy.dim = k - snf.rank;
  for (const Int& d : snf.diagonal)
    if (d > 1) s.isotropy.invariant_factors.push_back(d);

  // Weight matrix of the stabilizer's identity component on the vanishing
  // planes: saturated kernel basis of the active columns, applied to the
  // vanishing columns.
  IntMatrix kernel = rational_kernel(active);
  if (kernel.rows() != s.isotropy.dim)
    fail(ErrorClass::Internal, "internal", "stabilizer kernel rank mismatch");
  s.isotropy.slice_weights = kernel * We.select_cols(pattern);

  s.dim_in_quotient = s.dim_in_total - (k - s.isotropy.dim);
  return s;
}

std::vector<Stratum> enumerate_strata(const TorusAction& action, int max_planes) {
  const int n = action.n();
  if (n > max_planes)
    fail(ErrorClass::ResourceLimit, "too_many_planes",
         "stratum enumeration over " + std::to_string(n) + " planes exceeds the cap of " +
             std::to_string(max_planes));
  std::vector<Stratum> out;
  out.reserve(std::size_t(1) << n);
  for (std::uint32_t mask = 0; mask < (std::uint32_t(1) << n); ++mask) {
    std::vector<int> pattern;
    for (int j = 0; j < n; ++j)
      if (mask & (std::uint32_t(1) << j)) pattern.push_back(j);
    out.push_back(stratum_for_pattern(action, pattern));
  }
  return out;
}

StratumVerdict classify_stratum(const TorusAction& action, const Stratum& stratum) {
  check_pattern(stratum.pattern, action.n());
  StratumVerdict v;
  if (stratum.isotropy.dim == 0) return v;  // finite stabilizer: orbifold point
  SplitVerdict slice = analyze_split(stratum.isotropy.slice_weights);
  if (slice.split) return v;
  v.cls = StratumClass::NonOrbifold;
  v.witness_plane = stratum.pattern[*slice.witness_plane];
  return v;
}

SingularDimension singular_set_dimension(const TorusAction& action, int max_planes) {
  SingularDimension out;
  out.bound = std::min(action.m() - 4, (action.m() - action.k()) - 3);
  for (const Stratum& s : enumerate_strata(action, max_planes)) {
    if (classify_stratum(action, s).cls != StratumClass::NonOrbifold) continue;
    if (!out.dim_B || s.dim_in_quotient > *out.dim_B) out.dim_B = s.dim_in_quotient;
  }
  out.satisfied = !out.dim_B || *out.dim_B <= out.bound;
  return out;
}

ReductionPair local_reduction(const TorusAction& action, double tol) {
  CanonicalSplitForm form = canonical_split_form(action);
  if (!form.split) {
    std::string which = form.witness_plane ? std::to_string(*form.witness_plane) : "?";
    fail(ErrorClass::Precondition, "not_split",
         "local reduction requires a split action (plane " + which + " has no dedicated circle)");
  }
  const int n = action.n(), m = action.m();
  const IntMatrix& We = form.W_used;

  std::vector<int> rotated;
  for (int j = 0; j < n; ++j)
    if (!We.col_is_zero(j)) rotated.push_back(j);
  if (rotated.size() > 20)
    fail(ErrorClass::ResourceLimit, "too_many_planes",
         "half-turn group order 2^" + std::to_string(rotated.size()) + " exceeds the cap");

  // For a split effective action every rotated plane carries a certificate
  // row, so the canonical U rows biject with the rotated planes and theta =
  // (pi/d_r) * U_row(r) realizes the half-turn of that plane exactly (the
  // integer identity U_row(r) * We = d_r * e_plane leaves every other angle
  // at an exact multiple of 2*pi ... in fact exactly zero).
  if (int(rotated.size()) != form.U.rows())
    fail(ErrorClass::Internal, "internal", "rotated plane count != certificate count");

  ReductionPair red;
  red.rotated_planes = rotated;
  for (int j = 0; j < n; ++j) {
    const bool rot = std::binary_search(rotated.begin(), rotated.end(), j);
    Eigen::VectorXd ex = Eigen::VectorXd::Zero(m);
    ex[2 * j] = 1.0;
    red.subspace_basis.push_back(ex);
    if (!rot) {
      Eigen::VectorXd ey = Eigen::VectorXd::Zero(m);
      ey[2 * j + 1] = 1.0;
      red.subspace_basis.push_back(ey);
    }
  }
  for (int z = 2 * n; z < m; ++z) {
    Eigen::VectorXd ez = Eigen::VectorXd::Zero(m);
    ez[z] = 1.0;
    red.subspace_basis.push_back(ez);
  }

  red.gamma.dim = m;
  red.gamma.tol = tol;
  const std::uint32_t count = std::uint32_t(1) << rotated.size();
  red.gamma.elements.reserve(count);
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Identity(m, m);
    for (std::size_t t = 0; t < rotated.size(); ++t) {
      if (!(mask & (std::uint32_t(1) << t))) continue;
      int j = rotated[t];
      g(2 * j, 2 * j) = -1.0;
      g(2 * j + 1, 2 * j + 1) = -1.0;
    }
    red.gamma.elements.push_back(std::move(g));
  }
  return red;
}

double quotient_distance_finite(const FiniteOrthGroup& group, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& y) {
  if (x.size() != group.dim || y.size() != group.dim)
    fail(ErrorClass::InvalidSpec, "invalid_spec", "point dimension != group dimension");
  if (group.elements.empty())
    fail(ErrorClass::InvalidSpec, "invalid_spec", "group has no elements");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& g : group.elements) best = std::min(best, (x - g * y).norm());
  return best;
}

namespace {

// theta -> |x - rotation(theta) y| in reduced form: squared distance equals
// base - 2 * sum_i (A_i cos a_i + B_i sin a_i) with a = W^T theta.
struct DistanceObjective {
  Eigen::MatrixXd W;  // k x n
  Eigen::VectorXd A, B;
  double base = 0;
  Eigen::VectorXd axis_lip;  // per-axis Lipschitz constants of the distance
  Eigen::MatrixXd hess_bound;  // entrywise bound on the squared-distance Hessian

  double value(const Eigen::VectorXd& theta) const {
    Eigen::VectorXd alpha = W.transpose() * theta;
    double s = 0;
    for (int i = 0; i < alpha.size(); ++i)
      s += A[i] * std::cos(alpha[i]) + B[i] * std::sin(alpha[i]);
    return std::sqrt(std::max(0.0, base - 2.0 * s));
  }

  // Certified lower bound over the box center +- half, the sharper of a
  // first-order Lipschitz bound and a Taylor bound on the squared distance
  // (the latter closes quadratically around smooth minima).
  double lower_bound(const Eigen::VectorXd& center, const Eigen::VectorXd& half,
                     double center_value) const {
    double lb = center_value - axis_lip.dot(half);
    Eigen::VectorXd g;
    Eigen::MatrixXd H;
    grad_hess(center, g, H);
    double q = center_value * center_value - 2.0 * g.cwiseAbs().dot(half) -
               0.5 * half.dot(hess_bound * half);
    lb = std::max(lb, q > 0 ? std::sqrt(q) : 0.0);
    return std::max(lb, 0.0);
  }

  // Gradient and Hessian of the negated rotational term, the only
  // theta-dependent part of the squared distance (up to the factor 2).
  void grad_hess(const Eigen::VectorXd& theta, Eigen::VectorXd& g, Eigen::MatrixXd& H) const {
    const int k = int(W.rows());
    Eigen::VectorXd alpha = W.transpose() * theta;
    g = Eigen::VectorXd::Zero(k);
    H = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < alpha.size(); ++i) {
      double c = std::cos(alpha[i]), s = std::sin(alpha[i]);
      double d1 = A[i] * s - B[i] * c;   // d/da of -(A cos + B sin)
      double d2 = A[i] * c + B[i] * s;   // second derivative
      g += d1 * W.col(i);
      H += d2 * (W.col(i) * W.col(i).transpose());
    }
  }
};

DistanceObjective make_objective(const TorusAction& action, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& y) {
  const int n = action.n(), k = action.k(), m = action.m();
  DistanceObjective obj;
  obj.W = action.Wd();
  obj.A.resize(n);
  obj.B.resize(n);
  double fixed = 0;
  for (int z = 2 * n; z < m; ++z) fixed += x[z] * y[z];
  obj.base = x.squaredNorm() + y.squaredNorm() - 2.0 * fixed;
  Eigen::VectorXd xlip = Eigen::VectorXd::Zero(k), ylip = Eigen::VectorXd::Zero(k);
  obj.hess_bound = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < n; ++i) {
    double xx = x[2 * i], xy = x[2 * i + 1], yx = y[2 * i], yy = y[2 * i + 1];
    obj.A[i] = xx * yx + xy * yy;
    obj.B[i] = xy * yx - xx * yy;
    double xn = std::hypot(xx, xy), yn = std::hypot(yx, yy);
    Eigen::VectorXd wabs = obj.W.col(i).cwiseAbs();
    xlip += xn * wabs;
    ylip += yn * wabs;
    obj.hess_bound += 2.0 * xn * yn * (wabs * wabs.transpose());
  }
  // |x - R(theta) y| is per-axis Lipschitz with either point's plane norms.
  obj.axis_lip = xlip.cwiseMin(ylip);
  return obj;
}

// A few damped Newton steps on the rotational term, used only to improve
// incumbents; certification never depends on the polish.
void polish(const DistanceObjective& obj, Eigen::VectorXd theta, double& best,
            Eigen::VectorXd& best_theta) {
  const int k = int(theta.size());
  double cur = obj.value(theta);
  Eigen::VectorXd g;
  Eigen::MatrixXd H;
  for (int it = 0; it < 20; ++it) {
    obj.grad_hess(theta, g, H);
    if (g.norm() < 1e-14) break;
    Eigen::VectorXd step =
        (H + 1e-12 * Eigen::MatrixXd::Identity(k, k)).ldlt().solve(-g);
    bool moved = false;
    for (int bt = 0; bt < 2 && !moved; ++bt) {
      Eigen::VectorXd cand = theta + step;
      double val = obj.value(cand);
      if (val < cur) {
        theta = cand;
        cur = val;
        moved = true;
      } else {
        step = -0.25 * g / (1.0 + H.norm());  // fallback: short gradient step
      }
    }
    if (!moved) break;
  }
  if (cur < best) {
    best = cur;
    best_theta = theta;
  }
}

struct Cell {
  Eigen::VectorXd center, half;
  double lb = 0;
  bool operator<(const Cell& o) const { return lb > o.lb; }  // min-heap
};

}  // namespace

TorusDistance quotient_distance_torus(const TorusAction& action, const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& y, int grid, int refinements,
                                      double gap_tol, long long max_cells) {
  const int k = action.k();
  if (x.size() != action.m() || y.size() != action.m())
    fail(ErrorClass::InvalidSpec, "invalid_spec", "point dimension != action dimension");
  if (grid < 1 || refinements < 0 || !(gap_tol > 0) || max_cells < 1)
    fail(ErrorClass::InvalidSpec, "invalid_spec", "bad search parameters");
  if (k == 0) return {(x - y).norm(), 0.0, Eigen::VectorXd(0)};
  if (double(k) * std::log2(double(grid)) > std::log2(double(max_cells)))
    fail(ErrorClass::Numerical, "grid_too_coarse",
         "initial grid exceeds the cell budget; lower the grid resolution");

  DistanceObjective obj = make_objective(action, x, y);
  const double pi = std::numbers::pi;
  const double h0 = pi / grid;                       // initial half-width
  const double min_half = h0 / std::pow(2.0, refinements);

  double best = obj.value(Eigen::VectorXd::Zero(k));
  Eigen::VectorXd best_theta = Eigen::VectorXd::Zero(k);
  polish(obj, best_theta, best, best_theta);

  std::priority_queue<Cell> heap;
  long long cells = 0;
  std::vector<int> idx(k, 0);
  for (;;) {  // odometer over the grid^k initial cells
    Cell c;
    c.center.resize(k);
    c.half = Eigen::VectorXd::Constant(k, h0);
    for (int a = 0; a < k; ++a) c.center[a] = (2 * idx[a] + 1) * h0;
    double fc = obj.value(c.center);
    if (fc < best) polish(obj, c.center, best, best_theta);
    c.lb = obj.lower_bound(c.center, c.half, fc);
    ++cells;
    if (c.lb < best) heap.push(std::move(c));
    int a = 0;
    while (a < k && ++idx[a] == grid) idx[a++] = 0;
    if (a == k) break;
  }

  while (!heap.empty()) {
    Cell top = heap.top();
    double gap = best - top.lb;  // no other cell can undercut the top's bound
    if (gap <= gap_tol) return {best, std::max(0.0, gap), best_theta};
    heap.pop();

    int axis = -1;
    double score = -1;
    for (int a = 0; a < k; ++a) {
      if (top.half[a] <= min_half) continue;
      double t = obj.axis_lip[a] * top.half[a];
      if (t > score) {
        score = t;
        axis = a;
      }
    }
    if (axis < 0)
      fail(ErrorClass::Numerical, "grid_too_coarse",
           "refinement depth exhausted with certified gap " + std::to_string(gap) +
               " > " + std::to_string(gap_tol));
    cells += 2;
    if (cells > max_cells)
      fail(ErrorClass::Numerical, "grid_too_coarse",
           "cell budget exhausted with certified gap " + std::to_string(gap) + " > " +
               std::to_string(gap_tol));

    for (int side = 0; side < 2; ++side) {
      Cell child;
      child.half = top.half;
      child.half[axis] *= 0.5;
      child.center = top.center;
      child.center[axis] += (side ? 1.0 : -1.0) * child.half[axis];
      double fc = obj.value(child.center);
      if (fc < best) polish(obj, child.center, best, best_theta);
      child.lb = std::max(top.lb, obj.lower_bound(child.center, child.half, fc));
      if (child.lb < best) heap.push(std::move(child));
    }
  }
  // Every cell was pruned at a moment when its bound already exceeded the
  // (only ever decreasing) incumbent, so the incumbent is the exact minimum.
  return {best, 0.0, best_theta};
}

ReductionCheck reduction_isometry_check(const TorusAction& action, int pairs, std::uint64_t seed,
                                        double gap_tol) {
  if (pairs < 1) fail(ErrorClass::InvalidSpec, "invalid_spec", "pair count must be positive");
  ReductionPair red = local_reduction(action);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto sample = [&]() {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(action.m());
    for (const auto& b : red.subspace_basis) p += gauss(rng) * b;
    return p;
  };
  ReductionCheck out;
  for (int t = 0; t < pairs; ++t) {
    Eigen::VectorXd px = sample(), py = sample();
    double df = quotient_distance_finite(red.gamma, px, py);
    TorusDistance dt = quotient_distance_torus(action, px, py, 8, 40, gap_tol);
    out.max_deviation = std::max(out.max_deviation, std::abs(df - dt.value));
    out.max_gap = std::max(out.max_gap, dt.gap);
    ++out.pairs;
  }
  return out;
}

}  // namespace torquot
