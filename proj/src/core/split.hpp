#pragma once

#include <optional>
#include <vector>

#include "core/actions.hpp"
#include "core/intmat.hpp"

namespace torquot {

// An action is split when every rotated coordinate plane has a dedicated
// circle subgroup rotating that plane alone. The certificate for plane i is a
// primitive c in Z^k with (c*W)_j = 0 for all j != i and (c*W)_i != 0; the
// check is exact integer arithmetic throughout.

enum class PlaneStatus { Fixed, Circle, NoCircle };

struct PlaneVerdict {
  PlaneStatus status = PlaneStatus::Fixed;
  std::vector<Int> certificate;  // nonempty iff status == Circle
};

struct SplitVerdict {
  bool split = true;
  std::vector<PlaneVerdict> planes;
  std::optional<int> witness_plane;  // first NoCircle plane (0-based)
};

// Dedicated-circle certificate for plane i, or nullopt when no circle exists.
// Throws fixed_column when column i of W is zero (plane is not rotated).
// The certificate is primitive with positive leading entry.
std::optional<std::vector<Int>> circle_for_plane(const IntMatrix& W, int i);

SplitVerdict analyze_split(const IntMatrix& W);
// Certificates are reported in the caller's torus coordinates (raw W); the
// verdict itself is invariant under passing to the effective torus.
SplitVerdict analyze_split(const TorusAction& action);

// Stack of per-plane certificates for the nonzero columns of W, in column
// order. U*W then has exactly one nonzero column per row. U is unimodular
// exactly when the nonzero columns define an effective action; the flag
// reports the exact integer determinant test.
struct SplitBasis {
  bool split = false;
  IntMatrix U, UW;
  std::optional<int> witness_plane;
  bool unimodular = false;
};

SplitBasis assemble_split_basis(const IntMatrix& W);

// Action-level canonical form: certificates assembled against the effective
// weight matrix, where unimodularity of U is guaranteed (and asserted).
struct CanonicalSplitForm {
  bool split = false;
  IntMatrix U;       // unimodular when split
  IntMatrix W_used;  // effective weight matrix the certificates refer to
  IntMatrix UW;      // one nonzero column per row when split
  std::optional<int> witness_plane;
};

CanonicalSplitForm canonical_split_form(const TorusAction& action);

}  // namespace torquot
