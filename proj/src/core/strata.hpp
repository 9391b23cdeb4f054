#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "core/actions.hpp"

namespace torquot {

//Isotropy data of a vanishing pattern, computed on the effective torus:
// dim is the dimension of the stabilizer subtorus, invariant_factors are the
// orders (> 1 only, divisor chain) of its finite cyclic components, and
// slice_weights is the weight matrix of the identity component acting on the
// vanishing planes.
struct IsotropyDescriptor {
  int dim = 0;
  std::vector<Int> invariant_factors;
  IntMatrix slice_weights;
};

// Points whose plane components vanish exactly on `pattern` (0-based plane
// indices, ascending).
struct Stratum {
  std::vector<int> pattern;
  int dim_in_total = 0;
  int dim_in_quotient = 0;
  IsotropyDescriptor isotropy;
};

// Stratum data for one vanishing pattern.
Stratum stratum_for_pattern(const TorusAction& action, const std::vector<int>& pattern);

// All 2^n strata, ordered by the pattern bitmask (bit i set = plane i
// vanishes). Throws too_many_planes when n exceeds max_planes.
std::vector<Stratum> enumerate_strata(const TorusAction& action, int max_planes = 12);

enum class StratumClass { Orbifold, NonOrbifold };

struct StratumVerdict {
  StratumClass cls = StratumClass::Orbifold;
  // For NonOrbifold: a vanishing plane (original numbering) that the
  // stabilizer's identity component rotates without a dedicated circle.
  std::optional<int> witness_plane;
};

// A stratum point is an orbifold point exactly when the slice action of the
// stabilizer's identity component is split; finite isotropy parts never
// break (or repair) that.
StratumVerdict classify_stratum(const TorusAction& action, const Stratum& stratum);

struct SingularDimension {
  std::optional<int> dim_B;  // max quotient dimension over non-orbifold strata
  int bound = 0;             // min(m - 4, (m - k) - 3)
  bool satisfied = true;
};

SingularDimension singular_set_dimension(const TorusAction& action, int max_planes = 12);

// Local model (S, Gamma) of the quotient of a split action: S is spanned by
// the first axis of every rotated plane, both axes of torus-fixed planes and
// all fixed coordinates; Gamma is the group of per-plane half-turn rotations
// (order 2^{rotated planes}), each realized inside the torus through the
// canonical split basis.
struct ReductionPair {
  std::vector<Eigen::VectorXd> subspace_basis;
  FiniteOrthGroup gamma;
  std::vector<int> rotated_planes;
};

// Throws not_split for non-split actions and too_many_planes when the group
// order 2^{rotated planes} would be unmanageable.
ReductionPair local_reduction(const TorusAction& action, double tol = 1e-9);

// Exact minimum of |x - g y| over the finite element list.
double quotient_distance_finite(const FiniteOrthGroup& group, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& y);

struct TorusDistance {
  double value = 0;  // attained upper bound |x - rotation(theta) y|
  double gap = 0;    // certified: the true distance lies in [value - gap, value]
  Eigen::VectorXd theta;
};

// Certified global minimization of theta -> |x - rotation(theta) y| over the
// parameter torus: branch-and-bound on an initial grid^k subdivision with
// per-axis Lipschitz bounds, local polish of incumbents, and binary splits
// (up to `refinements` per axis). Throws grid_too_coarse when the certified
// gap cannot be driven below gap_tol within the budget.
TorusDistance quotient_distance_torus(const TorusAction& action, const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& y, int grid = 8, int refinements = 40,
                                      double gap_tol = 1e-6, long long max_cells = 2000000);

struct ReductionCheck {
  double max_deviation = 0;  // worst |finite-model distance - torus distance|
  double max_gap = 0;        // worst certified torus-distance gap
  int pairs = 0;
};

// Samples seeded point pairs in the reduction subspace S and compares the
// finite-model distance under Gamma with the certified torus distance.
ReductionCheck reduction_isometry_check(const TorusAction& action, int pairs, std::uint64_t seed,
                                        double gap_tol = 1e-6);

}  // namespace torquot
