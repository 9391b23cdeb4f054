#include "core/curvature.hpp"

#include <cmath>
#include <random>

#include "core/errors.hpp"
#include "core/split.hpp"

namespace torquot {

namespace {

constexpr double kFlatCutoff = 1e-6;  // below this, a scan counts as flat

void check_point_dim(const TorusAction& a, const Eigen::VectorXd& x, const char* what) {
  if (int(x.size()) != a.m())
    fail(ErrorClass::InvalidSpec, "dimension_mismatch",
         std::string(what) + " has length " + std::to_string(x.size()) + ", ambient dimension is " +
             std::to_string(a.m()));
}

// Gram matrix eigen-split with a relative rank test; tiny/huge ratio guards
// against calling any of this at non-principal points.
struct GramData {
  Eigen::MatrixXd K;      // m x k Killing frame at the point
  Eigen::MatrixXd T;      // K G^{-1}
  Eigen::LDLT<Eigen::MatrixXd> ldlt;
  bool principal = true;
};

GramData gram_at(const TorusAction& a, const Eigen::VectorXd& x, double tol) {
  GramData out;
  out.K = a.killing_basis(x);
  if (a.k() == 0) return out;
  Eigen::MatrixXd G = out.K.transpose() * out.K;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
  double lmax = es.eigenvalues().maxCoeff();
  double lmin = es.eigenvalues().minCoeff();
  double cutoff = std::max(tol * tol, 1e-13);
  if (lmax <= 0 || lmin <= cutoff * lmax) {
    out.principal = false;
    return out;
  }
  out.ldlt.compute(G);
  out.T = out.ldlt.solve(out.K.transpose()).transpose();
  return out;
}

GramData principal_gram(const TorusAction& a, const Eigen::VectorXd& x, double tol) {
  GramData g = gram_at(a, x, tol);
  if (!g.principal)
    fail(ErrorClass::Numerical, "singular_gram",
         "Killing frame is rank-deficient: the point is not on the principal stratum");
  return g;
}

Eigen::MatrixXd projector_from(const GramData& g, int m) {
  if (g.T.size() == 0) return Eigen::MatrixXd::Zero(m, m);
  return g.T * g.K.transpose();
}

Eigen::MatrixXd projector_derivative_from(const TorusAction& a, const GramData& g,
                                          const Eigen::VectorXd& u) {
  const int m = a.m();
  if (a.k() == 0) return Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd Ku = a.killing_basis(u);  // dK along u, by linearity in the point
  Eigen::MatrixXd dG = Ku.transpose() * g.K + g.K.transpose() * Ku;
  return Ku * g.T.transpose() - g.T * dG * g.T.transpose() + g.T * Ku.transpose();
}

double sec_from_gram(const TorusAction& a, const GramData& g, const Eigen::VectorXd& v,
                     const Eigen::VectorXd& w, double tol) {
  const int m = a.m();
  Eigen::MatrixXd P = projector_from(g, m);
  Eigen::VectorXd vh = v - P * v;
  Eigen::VectorXd wh = w - P * w;
  double vv = vh.squaredNorm(), ww = wh.squaredNorm(), vw = vh.dot(wh);
  double gram = vv * ww - vw * vw;
  double scale = vv * ww;
  if (gram <= std::max(tol * scale, 1e-300))
    fail(ErrorClass::Numerical, "degenerate_plane",
         "horizontal parts of the plane vectors are numerically parallel");
  Eigen::MatrixXd dPv = projector_derivative_from(a, g, vh);
  Eigen::MatrixXd dPw = projector_derivative_from(a, g, wh);
  Eigen::VectorXd bracket = dPw * vh - dPv * wh;
  return 0.75 * (P * bracket).squaredNorm() / gram;
}

// Rotation generator of plane i alone: maps x_i -> y_i circularly.
Eigen::MatrixXd plane_rotation_generator(int m, int i) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  J(2 * i, 2 * i + 1) = -1;
  J(2 * i + 1, 2 * i) = 1;
  return J;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t idx) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (idx + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

Eigen::MatrixXd vertical_projector(const TorusAction& action, const Eigen::VectorXd& x,
                                   double tol) {
  check_point_dim(action, x, "point");
  GramData g = principal_gram(action, x, tol);
  return projector_from(g, action.m());
}

Eigen::MatrixXd vertical_projector_derivative(const TorusAction& action, const Eigen::VectorXd& x,
                                              const Eigen::VectorXd& u, double tol) {
  check_point_dim(action, x, "point");
  check_point_dim(action, u, "direction");
  GramData g = principal_gram(action, x, tol);
  return projector_derivative_from(action, g, u);
}

double sec_quotient(const TorusAction& action, const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                    const Eigen::VectorXd& w, double tol) {
  check_point_dim(action, x, "point");
  check_point_dim(action, v, "first plane vector");
  check_point_dim(action, w, "second plane vector");
  GramData g = principal_gram(action, x, tol);
  return sec_from_gram(action, g, v, w, tol);
}

BracketWitness bracket_witness(const TorusAction& action, double tol) {
  SplitVerdict verdict = analyze_split(action);
  if (verdict.split)
    fail(ErrorClass::Precondition, "is_split",
         "the action is split; no curvature witness exists");
  const int m = action.m(), n = action.n();
  const int p = *verdict.witness_plane;

  BracketWitness out;
  out.plane_p = p;

  // Base point: every plane component nonzero (the maximal torus acts freely
  // there), with x*x' - y*y' != 0 for the witness plane against every other.
  Eigen::VectorXd xbar = Eigen::VectorXd::Zero(m);
  xbar[2 * p] = 1.0;
  xbar[2 * p + 1] = 0.5;
  int denom = 4;
  for (int j = 0; j < n; ++j) {
    if (j == p) continue;
    xbar[2 * j] = 1.0;
    xbar[2 * j + 1] = 1.0 / double(denom++);
  }
  out.x = xbar;

  GramData g = principal_gram(action, xbar, tol);
  Eigen::MatrixXd P = projector_from(g, m);

  // Vertical field matched to the witness-plane rotation at xbar.
  Eigen::VectorXd vbar = Eigen::VectorXd::Zero(m);
  vbar[2 * p] = -xbar[2 * p + 1];
  vbar[2 * p + 1] = xbar[2 * p];
  Eigen::VectorXd cstar = g.ldlt.solve(g.K.transpose() * vbar);
  Eigen::VectorXd lambda = action.Wd().transpose() * cstar;  // per-plane speeds
  out.lambda = lambda;

  double lp = lambda[p];
  if (!(lp > 100 * tol && lp < 1.0 - 100 * tol))
    fail(ErrorClass::Internal, "internal",
         "witness projection speed must lie strictly between 0 and 1; got " + std::to_string(lp));

  int q = -1;
  double best = 0;
  for (int j = 0; j < n; ++j) {
    if (j == p) continue;
    if (std::abs(lambda[j]) > best) {
      best = std::abs(lambda[j]);
      q = j;
    }
  }
  if (q < 0 || best <= 100 * tol)
    fail(ErrorClass::Internal, "internal",
         "no coupled plane: the projected rotation moves only the witness plane");
  out.plane_q = q;

  // v = plane rotation field minus its frozen vertical match; linear field A y.
  Eigen::MatrixXd Sc = action.killing_generator(cstar);
  Eigen::MatrixXd A = plane_rotation_generator(m, p) - Sc;
  Eigen::VectorXd v = A * xbar;

  double best_value = -1;
  for (char type : {'x', 'y'}) {
    int off = type == 'x' ? 0 : 1;
    // Mixing rotation between the witness and coupled planes (x-rows or y-rows).
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(m, m);
    Q(2 * p + off, 2 * q + off) = -1;
    Q(2 * q + off, 2 * p + off) = 1;
    Eigen::VectorXd wbar = Q * xbar;
    // Subtract the maximal-torus Killing field matching its vertical part.
    Eigen::MatrixXd B = Q;
    for (int i = 0; i < n; ++i) {
      double rho2 = xbar[2 * i] * xbar[2 * i] + xbar[2 * i + 1] * xbar[2 * i + 1];
      double mu = (-xbar[2 * i + 1] * wbar[2 * i] + xbar[2 * i] * wbar[2 * i + 1]) / rho2;
      if (mu != 0) B -= mu * plane_rotation_generator(m, i);
    }
    Eigen::VectorXd w = B * xbar;
    Eigen::VectorXd bracket = (B * A - A * B) * xbar;  // exact linear-field bracket
    double value = (P * bracket).norm();
    if (value > best_value) {
      best_value = value;
      out.w_type = type;
      out.v = v;
      out.w = w;
      out.bracket = bracket;
      out.value = value;
      out.pairing = bracket.dot(Sc * xbar);
      Eigen::MatrixXd dPv = projector_derivative_from(action, g, v);
      Eigen::MatrixXd dPw = projector_derivative_from(action, g, w);
      out.value_projection = (P * (dPw * v - dPv * w)).norm();
    }
  }
  if (!(out.value > 100 * tol))
    fail(ErrorClass::Internal, "internal",
         "both mixing fields produced a vanishing vertical bracket component");
  return out;
}

RayScan ray_scan(const TorusAction& action, const Eigen::VectorXd& direction,
                 const std::vector<double>& radii, int planes_per_point, std::uint64_t seed,
                 double tol) {
  check_point_dim(action, direction, "direction");
  if (planes_per_point <= 0)
    fail(ErrorClass::InvalidSpec, "invalid_spec", "planes_per_point must be positive");
  for (double r : radii)
    if (!(r > 0)) fail(ErrorClass::InvalidSpec, "invalid_spec", "radii must be positive");
  double dn = direction.norm();
  if (!(dn > 0)) fail(ErrorClass::InvalidSpec, "invalid_spec", "direction must be nonzero");
  Eigen::VectorXd unit = direction / dn;

  GramData g = principal_gram(action, unit, tol);
  (void)g;
  RayScan out;
  Eigen::MatrixXd H = action.horizontal_space(unit, tol);
  const int d = int(H.cols());
  if (d < 2 || radii.empty()) return out;  // quotient locally <= 1-dimensional: nothing to sample

  // One plane per index, drawn in horizontal-frame coordinates and shared
  // across radii (the vertical space is scale-invariant along the ray).
  std::vector<Eigen::VectorXd> vs(planes_per_point), ws(planes_per_point);
  for (int j = 0; j < planes_per_point; ++j) {
    std::mt19937_64 rng(mix_seed(seed, std::uint64_t(j)));
    std::normal_distribution<double> gauss;
    Eigen::VectorXd a(d), b(d);
    for (;;) {
      for (int t = 0; t < d; ++t) a[t] = gauss(rng);
      for (int t = 0; t < d; ++t) b[t] = gauss(rng);
      if (a.norm() < 1e-6) continue;
      a.normalize();
      b -= a.dot(b) * a;
      if (b.norm() < 1e-6) continue;
      b.normalize();
      break;
    }
    vs[j] = H * a;
    ws[j] = H * b;
  }

  std::vector<double> max_at_radius(radii.size(), 0.0);
  for (size_t ri = 0; ri < radii.size(); ++ri) {
    double r = radii[ri];
    Eigen::VectorXd x = r * unit;
    GramData gr = principal_gram(action, x, tol);
    for (int j = 0; j < planes_per_point; ++j) {
      CurvatureSample s;
      s.radius = r;
      s.plane_index = j;
      s.v = vs[j];
      s.w = ws[j];
      s.sec = sec_from_gram(action, gr, vs[j], ws[j], tol);
      s.sec_r2 = s.sec * r * r;
      max_at_radius[ri] = std::max(max_at_radius[ri], std::abs(s.sec));
      out.max_abs_sec = std::max(out.max_abs_sec, std::abs(s.sec));
      out.samples.push_back(std::move(s));
    }
  }

  if (out.max_abs_sec >= kFlatCutoff && radii.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (size_t ri = 0; ri < radii.size(); ++ri) {
      if (max_at_radius[ri] <= 0) continue;
      double lx = std::log(radii[ri]), ly = std::log(max_at_radius[ri]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++cnt;
    }
    double var = cnt * sxx - sx * sx;
    if (cnt >= 2 && var > 1e-18) out.fitted_exponent = (double(cnt) * sxy - sx * sy) / var;
  }
  return out;
}

double TransversalCurvature::sec_of(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  Eigen::VectorXd rc = Eigen::VectorXd::Zero(d);  // R(a,b) b
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double aibj = a[i] * b[j];
      if (aibj == 0) continue;
      for (int kk = 0; kk < d; ++kk) {
        double f = aibj * b[kk];
        if (f == 0) continue;
        for (int l = 0; l < d; ++l) rc[l] += f * r_component(i, j, kk, l);
      }
    }
  double num = rc.dot(g * a);
  double aa = a.dot(g * a), bb = b.dot(g * b), ab = a.dot(g * b);
  double den = aa * bb - ab * ab;
  if (den <= 1e-300)
    fail(ErrorClass::Numerical, "degenerate_plane", "chart plane vectors are parallel");
  return num / den;
}

double TransversalCurvature::sec_ambient(const Eigen::VectorXd& v, const Eigen::VectorXd& w) const {
  if (frame.size() == 0)
    fail(ErrorClass::Precondition, "no_frame", "this chart has no ambient frame attached");
  return sec_of(frame.transpose() * v, frame.transpose() * w);
}

namespace {

// R^l_{ijk} by central differences at a fixed step (no extrapolation).
std::vector<double> curvature_components_at_step(
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& metric, int d, double s) {
  auto gamma_at = [&](const Eigen::VectorXd& u) {
    Eigen::MatrixXd g0 = metric(u);
    Eigen::MatrixXd ginv = g0.inverse();
    std::vector<Eigen::MatrixXd> dg(d);
    for (int j = 0; j < d; ++j) {
      Eigen::VectorXd up = u, um = u;
      up[j] += s;
      um[j] -= s;
      dg[j] = (metric(up) - metric(um)) / (2 * s);
    }
    // Gamma[l](j,k) = Gamma^l_{jk}
    std::vector<Eigen::MatrixXd> Gm(d, Eigen::MatrixXd::Zero(d, d));
    for (int l = 0; l < d; ++l)
      for (int j = 0; j < d; ++j)
        for (int kk = 0; kk < d; ++kk) {
          double sum = 0;
          for (int pp = 0; pp < d; ++pp)
            sum += ginv(l, pp) * (dg[j](pp, kk) + dg[kk](pp, j) - dg[pp](j, kk));
          Gm[l](j, kk) = 0.5 * sum;
        }
    return Gm;
  };

  Eigen::VectorXd zero = Eigen::VectorXd::Zero(d);
  std::vector<Eigen::MatrixXd> G0 = gamma_at(zero);
  std::vector<std::vector<Eigen::MatrixXd>> dG(d);
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXd up = zero, um = zero;
    up[i] += s;
    um[i] -= s;
    auto Gp = gamma_at(up);
    auto Gmn = gamma_at(um);
    dG[i].resize(d);
    for (int l = 0; l < d; ++l) dG[i][l] = (Gp[l] - Gmn[l]) / (2 * s);
  }

  std::vector<double> R(size_t(d) * d * d * d, 0.0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int kk = 0; kk < d; ++kk)
        for (int l = 0; l < d; ++l) {
          double val = dG[i][l](j, kk) - dG[j][l](i, kk);
          for (int pp = 0; pp < d; ++pp)
            val += G0[l](i, pp) * G0[pp](j, kk) - G0[l](j, pp) * G0[pp](i, kk);
          R[((size_t(i) * d + j) * d + kk) * d + l] = val;
        }
  return R;
}

}  // namespace

TransversalCurvature curvature_from_metric(
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& metric, int d, double step) {
  TransversalCurvature out;
  out.d = d;
  out.g = metric(Eigen::VectorXd::Zero(d));
  std::vector<double> coarse = curvature_components_at_step(metric, d, step);
  std::vector<double> fine = curvature_components_at_step(metric, d, step / 2);
  out.R.resize(coarse.size());
  for (size_t t = 0; t < coarse.size(); ++t) out.R[t] = (4 * fine[t] - coarse[t]) / 3;
  return out;
}

TransversalCurvature finite_difference_oracle(const TorusAction& action, const Eigen::VectorXd& x,
                                              double step, double tol) {
  check_point_dim(action, x, "point");
  if (!(step > 0)) fail(ErrorClass::InvalidSpec, "invalid_spec", "step must be positive");
  principal_gram(action, x, tol);  // center must be principal: singular_gram otherwise
  Eigen::MatrixXd H = action.horizontal_space(x, tol);
  const int d = int(H.cols());
  const int m = action.m();

  auto metric = [&action, &x, &H, tol, m](const Eigen::VectorXd& u) {
    Eigen::VectorXd y = x + H * u;
    GramData g = gram_at(action, y, tol);
    if (!g.principal)
      fail(ErrorClass::Numerical, "step_too_large",
           "transversal stencil left the principal stratum; reduce the step");
    return Eigen::MatrixXd(H.transpose() * (Eigen::MatrixXd::Identity(m, m) - projector_from(g, m)) * H);
  };

  TransversalCurvature out = curvature_from_metric(metric, d, step);
  out.frame = H;
  return out;
}

}  // namespace torquot
