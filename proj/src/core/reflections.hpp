#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "core/actions.hpp"
#include "core/strata.hpp"

namespace torquot {

// A reflection is an orthogonal element with eigenvalue spectrum
// {-1, +1^(m-1)}; the -1 eigenvector is the mirror normal. Detection uses the
// symmetric-part spectrum (determinant -1 alone admits non-reflections once
// m >= 3).
struct Reflection {
  int element_index = -1;      // into group.elements
  Eigen::VectorXd normal;      // unit length, largest-magnitude entry positive
};

std::vector<Reflection> find_reflections(const FiniteOrthGroup& group, double tol = 1e-8);

// Mirror arrangement of the reflection subgroup R: chamber representatives,
// the chamber count (computed as the number of distinct sign vectors over the
// R-orbit of a generic point, which equals |R|), and the number of distinct
// codimension-2 fixed subspaces of non-reflection elements that meet the open
// chamber of the representative (the rank of the free part of the regular
// set's fundamental group).
struct ChamberComplex {
  FiniteOrthGroup group;
  std::vector<Reflection> reflections;
  std::vector<Eigen::VectorXd> mirror_normals;  // one per reflection
  FiniteOrthGroup reflection_subgroup;
  Eigen::VectorXd chamber_rep;
  int chamber_count = 1;
  int codim2_count = 0;
};

// Throws degenerate_arrangement when no sampled point stays clear of every
// mirror by the margin after bounded retries.
ChamberComplex chamber_complex(const FiniteOrthGroup& group, std::uint64_t seed = 12001,
                               double tol = 1e-8);

enum class ChamberMapStatus { Valid, WallMismatch, BNotFixed, NotIsomorphism };

// Result of extending the affine chamber map x -> A x + b to a group
// isomorphism r -> A r A^T between reflection groups.
struct ChamberMapResult {
  ChamberMapStatus status = ChamberMapStatus::Valid;
  std::vector<std::pair<int, int>> pairing;  // element index in R1 -> index in R2
  std::string detail;
};

// Checks, in order: every reflection of R1 conjugates into R2 (WallMismatch),
// every reflection of R2 fixes b (BNotFixed), and conjugation induces a
// bijection R1 -> R2 (NotIsomorphism). A must be orthogonal (precondition).
ChamberMapResult extend_chamber_map(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                    const FiniteOrthGroup& R1, const FiniteOrthGroup& R2,
                                    double tol = 1e-8);

enum class ConjugacyStatus { Conjugate, NotConjugate, Inconclusive };

struct ConjugacyResult {
  ConjugacyStatus status = ConjugacyStatus::Inconclusive;
  Eigen::MatrixXd conjugator;   // orthogonal A with A G1 A^T = G2 when Conjugate
  double residual = 0;          // max over g of min over h |A g A^T - h|_F
  long long pairings_tried = 0;
};

// Decides whether G2 = A G1 A^T for some orthogonal A. Fast rejection by
// order and by the multiset of per-element invariants (element order, traces
// of powers); otherwise searches generator pairings with matching invariants,
// solving each intertwiner system exactly and projecting onto the orthogonal
// group. Every returned conjugator is verified within tol; NotConjugate is
// only reported after the full pairing space is exhausted, Inconclusive once
// `budget` pairings were tried.
ConjugacyResult conjugacy_test(const FiniteOrthGroup& G1, const FiniteOrthGroup& G2,
                               long long budget = 1000000, double tol = 1e-8,
                               std::uint64_t seed = 7);

// A finite isometry group on top of the torus neither repairs a non-split
// torus part nor breaks an orbifold one, so the verdict is the torus verdict
// at the origin.
StratumClass finite_extension_classify(const ExtendedAction& extended);

}  // namespace torquot
