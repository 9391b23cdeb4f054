#include "core/split.hpp"

#include "core/errors.hpp"

namespace torquot {

namespace {

Int abs_int(const Int& a) { return a < 0 ? Int(-a) : a; }

// x with x . t = gcd(t), by folding the extended Euclid pairwise.
std::vector<Int> gcd_combination(const std::vector<Int>& t) {
  std::vector<Int> x(t.size(), 0);
  Int g = 0;
  for (size_t j = 0; j < t.size(); ++j) {
    if (t[j] == 0) continue;
    if (g == 0) {
      g = abs_int(t[j]);
      x.assign(t.size(), 0);
      x[j] = t[j] > 0 ? 1 : -1;
      continue;
    }
    // extended gcd of (g, t[j])
    Int a = g, b = t[j], ua = 1, ub = 0;  // ua*g + ?*t_j = a invariantly
    Int va = 0, vb = 1;
    while (b != 0) {
      Int q = a / b;
      Int r = a - q * b;
      Int ur = ua - q * ub;
      Int vr = va - q * vb;
      a = b;
      ua = ub;
      va = vb;
      b = r;
      ub = ur;
      vb = vr;
    }
    if (a < 0) {
      a = -a;
      ua = -ua;
      va = -va;
    }
    for (Int& xi : x) xi *= ua;
    x[j] += va;
    g = a;
  }
  return x;
}

void canonicalize(std::vector<Int>& c) {
  Int content = vec_content(c);
  if (content > 1)
    for (Int& v : c) v /= content;
  for (const Int& v : c) {
    if (v == 0) continue;
    if (v < 0)
      for (Int& w : c) w = -w;
    break;
  }
}

}  // namespace

std::optional<std::vector<Int>> circle_for_plane(const IntMatrix& W, int i) {
  if (i < 0 || i >= W.cols())
    fail(ErrorClass::InvalidSpec, "invalid_spec", "plane index out of range");
  if (W.col_is_zero(i))
    fail(ErrorClass::Precondition, "fixed_column",
         "plane " + std::to_string(i + 1) + " is not rotated by the action");

  // Lattice of parameters fixing every other plane, then a combination that
  // still moves plane i.
  IntMatrix others = W.drop_col(i);
  IntMatrix B = rational_kernel(others);  // rows span {c : c*others = 0}
  if (B.rows() == 0) return std::nullopt;
  std::vector<Int> wi = W.col(i);
  std::vector<Int> t(B.rows());
  bool all_zero = true;
  for (int r = 0; r < B.rows(); ++r) {
    Int s = 0;
    for (int a = 0; a < W.rows(); ++a) s += B(r, a) * wi[a];
    t[r] = s;
    if (s != 0) all_zero = false;
  }
  if (all_zero) return std::nullopt;

  std::vector<Int> x = gcd_combination(t);
  std::vector<Int> c = mul_row_vec(x, B);
  canonicalize(c);

  // Exactness guard: the certificate conditions hold by construction.
  std::vector<Int> img = mul_row_vec(c, W);
  for (int j = 0; j < W.cols(); ++j)
    if (j != i && img[j] != 0)
      fail(ErrorClass::Internal, "internal", "circle certificate leaks onto plane " +
                                                 std::to_string(j + 1));
  if (img[i] == 0) fail(ErrorClass::Internal, "internal", "circle certificate is degenerate");
  return c;
}

SplitVerdict analyze_split(const IntMatrix& W) {
  SplitVerdict v;
  v.planes.resize(W.cols());
  for (int i = 0; i < W.cols(); ++i) {
    if (W.col_is_zero(i)) {
      v.planes[i].status = PlaneStatus::Fixed;
      continue;
    }
    auto c = circle_for_plane(W, i);
    if (c) {
      v.planes[i].status = PlaneStatus::Circle;
      v.planes[i].certificate = std::move(*c);
    } else {
      v.planes[i].status = PlaneStatus::NoCircle;
      if (!v.witness_plane) v.witness_plane = i;
      v.split = false;
    }
  }
  return v;
}

SplitVerdict analyze_split(const TorusAction& action) { return analyze_split(action.W()); }

SplitBasis assemble_split_basis(const IntMatrix& W) {
  SplitBasis out;
  SplitVerdict v = analyze_split(W);
  if (!v.split) {
    out.witness_plane = v.witness_plane;
    return out;
  }
  std::vector<int> rotated;
  for (int i = 0; i < W.cols(); ++i)
    if (v.planes[i].status == PlaneStatus::Circle) rotated.push_back(i);
  out.split = true;
  out.U = IntMatrix(int(rotated.size()), W.rows());
  for (size_t r = 0; r < rotated.size(); ++r) {
    const auto& c = v.planes[rotated[r]].certificate;
    for (int a = 0; a < W.rows(); ++a) out.U(int(r), a) = c[a];
  }
  out.UW = out.U * W;
  if (out.U.rows() == out.U.cols() && out.U.rows() > 0) {
    Int det = bareiss_determinant(out.U);
    out.unimodular = (det == 1 || det == -1);
  } else if (out.U.rows() == 0 && W.rows() == 0) {
    out.unimodular = true;  // empty basis for the trivial torus
  }
  return out;
}

CanonicalSplitForm canonical_split_form(const TorusAction& action) {
  CanonicalSplitForm out;
  SplitBasis basis = assemble_split_basis(action.W_eff());
  out.W_used = action.W_eff();
  if (!basis.split) {
    // Verdicts agree between W and W_eff; report the witness in user planes.
    SplitVerdict raw = analyze_split(action.W());
    out.witness_plane = raw.witness_plane ? raw.witness_plane : basis.witness_plane;
    return out;
  }
  if (!basis.unimodular)
    fail(ErrorClass::Internal, "internal",
         "effective split basis must be unimodular; got det != +-1 for U = " + basis.U.str());
  out.split = true;
  out.U = std::move(basis.U);
  out.UW = std::move(basis.UW);
  return out;
}

}  // namespace torquot
