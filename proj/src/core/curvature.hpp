#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "core/actions.hpp"

namespace torquot {

// Orthogonal projector onto the orbit tangent (vertical) space at x.
// Throws singular_gram when x is not principal (Killing frame rank < k).
Eigen::MatrixXd vertical_projector(const TorusAction& action, const Eigen::VectorXd& x,
                                   double tol = 1e-9);

// Closed-form directional derivative u -> dP_x[u] of the vertical projector,
// using that the Killing frame is linear in the base point.
Eigen::MatrixXd vertical_projector_derivative(const TorusAction& action, const Eigen::VectorXd& x,
                                              const Eigen::VectorXd& u, double tol = 1e-9);

// Sectional curvature of the quotient metric at the image of a principal
// point x, for the plane spanned by the horizontal parts of v and w. Inputs
// are projected onto the horizontal space first; the value is
//   (3/4) |P_V([v~,w~])|^2 / (|v|^2 |w|^2 - <v,w>^2)
// with v~(y) = (I - P_V(y)) v the horizontal projection-field extensions.
// Always >= 0 (flat total space). Throws degenerate_plane when the projected
// vectors are (numerically) parallel and singular_gram off the principal
// stratum.
double sec_quotient(const TorusAction& action, const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                    const Eigen::VectorXd& w, double tol = 1e-9);

// Constructive certificate that a non-split action has curvature at a smooth
// quotient point: a principal point and two orthogonal horizontal vectors
// whose bracket has a nonzero vertical component.
//
// v is the rotation field of the witness plane minus the torus Killing field
// matching its vertical part at x (coefficients frozen at x); w is a rotation
// mixing the witness plane with a coupled plane, minus the maximal-torus
// Killing field matching its vertical part. Both candidate mixing fields
// (x-row and y-row) are evaluated and the stronger one is returned; at least
// one is always nonzero at the chosen point.
//
// The bracket is evaluated two ways and both results are reported: `value`
// uses the frozen Killing-difference fields above with the exact linear-field
// bracket [Ay, By] = (BA - AB) y; `value_projection` uses the horizontal
// projection-field extensions (the ones sec_quotient integrates). They are
// not assumed equal.
struct BracketWitness {
  Eigen::VectorXd x;       // principal base point, every plane component nonzero
  Eigen::VectorXd v, w;    // horizontal at x, orthogonal to each other
  Eigen::VectorXd bracket;  // [v,w] at x from the frozen Killing-difference fields
  double value = 0;        // |P_V([v,w])| via frozen Killing-difference fields
  double value_projection = 0;  // |P_V([v~,w~])| via projection-field extensions
  double pairing = 0;      // <[v,w], vertical field matched to the plane rotation>
  int plane_p = -1;        // witness plane without a dedicated circle (0-based)
  int plane_q = -1;        // coupled plane the vertical field also rotates
  char w_type = 'x';       // which mixing field won: 'x' or 'y'
  Eigen::VectorXd lambda;  // per-plane speeds of the frozen vertical field
};

// Throws is_split when the action is split (no witness exists).
BracketWitness bracket_witness(const TorusAction& action, double tol = 1e-9);

struct CurvatureSample {
  double radius = 0;
  int plane_index = 0;
  double sec = 0;
  double sec_r2 = 0;  // sec * radius^2; constant along a ray (cone geometry)
  Eigen::VectorXd v, w;
};

struct RayScan {
  std::vector<CurvatureSample> samples;  // ordered by (radius index, plane index)
  double max_abs_sec = 0;
  // Least-squares slope of log max|sec| against log radius; -2 along a ray
  // with curvature (cone scaling). Absent when all samples are flat
  // (max |sec| < 1e-6) or fewer than two distinct radii were given.
  std::optional<double> fitted_exponent;
};

// Samples |sec| over seeded random horizontal planes at each radius along the
// ray through `direction`. Planes are drawn once per plane index from a
// per-index substream and reused across radii, so the r^-2 law is exact on
// the samples. Throws singular_gram if the direction is not principal.
RayScan ray_scan(const TorusAction& action, const Eigen::VectorXd& direction,
                 const std::vector<double>& radii, int planes_per_point, std::uint64_t seed,
                 double tol = 1e-9);

// Curvature tensor of a metric chart, computed by central differences with
// one Richardson extrapolation level. Independent of the closed-form
// projector pipeline; used as a test oracle.
struct TransversalCurvature {
  int d = 0;
  Eigen::MatrixXd frame;  // m x d orthonormal horizontal frame (empty for raw charts)
  Eigen::MatrixXd g;      // chart metric at the center
  std::vector<double> R;  // R^l_{ijk} at the center, index ((i*d+j)*d+k)*d+l

  double r_component(int i, int j, int k, int l) const { return R[((size_t(i) * d + j) * d + k) * d + l]; }
  // Sectional curvature of the plane spanned by chart vectors a, b.
  double sec_of(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
  // Same, for ambient vectors expressed through the stored frame.
  double sec_ambient(const Eigen::VectorXd& v, const Eigen::VectorXd& w) const;
};

// Curvature of an explicit d-dimensional metric field at chart origin.
TransversalCurvature curvature_from_metric(
    const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& metric, int d, double step);

// Full curvature tensor of the quotient metric in an affine transversal chart
// u -> x + H u through a principal point x (H an orthonormal horizontal
// frame), with the degenerate directions projected out. Throws singular_gram
// when x itself is not principal and step_too_large when a stencil point
// leaves the principal stratum.
TransversalCurvature finite_difference_oracle(const TorusAction& action, const Eigen::VectorXd& x,
                                              double step = 1e-4, double tol = 1e-9);

}  // namespace torquot
