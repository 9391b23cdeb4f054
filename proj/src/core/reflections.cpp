#include "core/reflections.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

#include "core/errors.hpp"

namespace torquot {

namespace {

int canonical_sign_index(const Eigen::VectorXd& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  return best;
}

}  // namespace

std::vector<Reflection> find_reflections(const FiniteOrthGroup& group, double tol) {
  std::vector<Reflection> out;
  const int m = group.dim;
  for (int idx = 0; idx < group.order(); ++idx) {
    const Eigen::MatrixXd& g = group.elements[idx];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (g + g.transpose()));
    const Eigen::VectorXd& ev = es.eigenvalues();  // ascending
    bool refl = std::abs(ev[0] + 1.0) <= tol;
    for (int i = 1; i < m && refl; ++i)
      if (std::abs(ev[i] - 1.0) > tol) refl = false;
    if (!refl) continue;
    Eigen::VectorXd n = es.eigenvectors().col(0);
    n.normalize();
    if (n[canonical_sign_index(n)] < 0) n = -n;
    out.push_back({idx, n});
  }
  return out;
}

namespace {

// Strict feasibility of <row_j, y> > 0 for all j (Fourier-Motzkin elimination
// down to dimensions with closed-form answers). Rows must be unit length.
bool strictly_feasible(std::vector<Eigen::VectorXd> rows, int dim) {
  if (rows.empty()) return true;
  if (dim == 0) return false;
  if (dim == 1) {
    bool pos = true, neg = true;
    for (const auto& r : rows) {
      if (r[0] < 1e-9) pos = false;
      if (r[0] > -1e-9) neg = false;
    }
    return pos || neg;
  }
  if (dim == 2) {
    // Feasible iff every row direction fits in one open half-plane: the
    // largest circular gap between sorted row angles exceeds pi.
    std::vector<double> ang;
    for (const auto& r : rows) ang.push_back(std::atan2(r[1], r[0]));
    std::sort(ang.begin(), ang.end());
    double gap = ang.front() + 2 * std::numbers::pi - ang.back();
    for (std::size_t i = 1; i < ang.size(); ++i) gap = std::max(gap, ang[i] - ang[i - 1]);
    return gap > std::numbers::pi + 1e-9;
  }
  std::vector<Eigen::VectorXd> pos, neg, keep;
  for (const auto& r : rows) {
    if (r[dim - 1] > 1e-9) {
      pos.push_back(r);
    } else if (r[dim - 1] < -1e-9) {
      neg.push_back(r);
    } else {
      keep.push_back(r.head(dim - 1));
    }
  }
  if (!pos.empty() && !neg.empty()) {
    for (const auto& p : pos) {
      for (const auto& q : neg) {
        // alpha*q' + beta*p' with alpha = p_d > 0, beta = -q_d > 0 encodes
        // "the lower bound from p stays below the upper bound from q".
        Eigen::VectorXd comb =
            p[dim - 1] * q.head(dim - 1) - q[dim - 1] * p.head(dim - 1);
        double norm = comb.norm();
        if (norm < 1e-12) return false;  // contradictory pair: 0 > 0
        keep.push_back(comb / norm);
      }
    }
  }
  for (auto& r : keep) {
    double norm = r.norm();
    if (norm < 1e-12) return false;
    r /= norm;
  }
  return strictly_feasible(std::move(keep), dim - 1);
}

}  // namespace

ChamberComplex chamber_complex(const FiniteOrthGroup& group, std::uint64_t seed, double tol) {
  const int m = group.dim;
  ChamberComplex cc;
  cc.group = group;
  cc.reflections = find_reflections(group, tol);
  for (const auto& r : cc.reflections) cc.mirror_normals.push_back(r.normal);

  std::vector<Eigen::MatrixXd> gens;
  for (const auto& r : cc.reflections) gens.push_back(group.elements[r.element_index]);
  cc.reflection_subgroup = gens.empty() ? FiniteOrthGroup::trivial(m, group.tol)
                                        : close_group(m, gens, group.tol, group.order());

  // Conjugates of reflections are reflections and stay in the (closed) group,
  // so the reflection subgroup is normal; a breach means corrupt input.
  for (const auto& g : group.elements)
    for (const auto& r : cc.reflection_subgroup.elements)
      if (cc.reflection_subgroup.find(g * r * g.transpose()) < 0)
        fail(ErrorClass::Internal, "internal",
             "reflection subgroup is not normal; the element list cannot be a closed group");

  // Generic chamber representative: clear of every mirror by the margin, as
  // is its whole reflection orbit.
  const double margin = 1e-6;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  bool found = false;
  for (int attempt = 0; attempt < 64 && !found; ++attempt) {
    Eigen::VectorXd p(m);
    for (int i = 0; i < m; ++i) p[i] = gauss(rng);
    if (p.norm() < 1e-3) continue;
    p.normalize();
    bool ok = true;
    for (const auto& g : cc.reflection_subgroup.elements) {
      Eigen::VectorXd q = g * p;
      for (const auto& n : cc.mirror_normals)
        if (std::abs(n.dot(q)) < margin) ok = false;
    }
    if (!ok) continue;
    found = true;
    cc.chamber_rep = p;
  }
  if (!found)
    fail(ErrorClass::Numerical, "degenerate_arrangement",
         "no generic point clears every mirror by the margin");

  std::set<std::vector<int>> sign_vectors;
  for (const auto& g : cc.reflection_subgroup.elements) {
    Eigen::VectorXd q = g * cc.chamber_rep;
    std::vector<int> sv;
    for (const auto& n : cc.mirror_normals) sv.push_back(n.dot(q) > 0 ? 1 : -1);
    sign_vectors.insert(std::move(sv));
  }
  cc.chamber_count = int(sign_vectors.size());

  // Distinct codimension-2 fixed subspaces of non-reflection elements that
  // meet the open chamber of the representative.
  std::vector<int> refl_index(group.order(), 0);
  for (const auto& r : cc.reflections) refl_index[r.element_index] = 1;
  std::vector<Eigen::MatrixXd> projectors;
  std::vector<Eigen::MatrixXd> bases;
  for (int idx = 1; idx < group.order(); ++idx) {  // identity sits at 0
    if (refl_index[idx]) continue;
    Eigen::MatrixXd d = group.elements[idx] - Eigen::MatrixXd::Identity(m, m);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(d, Eigen::ComputeFullV);
    int rank = 0;
    for (int i = 0; i < m; ++i)
      if (svd.singularValues()[i] > 100 * tol) ++rank;
    if (rank != 2) continue;
    Eigen::MatrixXd B = svd.matrixV().rightCols(m - 2);  // fixed subspace basis
    Eigen::MatrixXd P = B * B.transpose();
    bool dup = false;
    for (const auto& Q : projectors)
      if ((P - Q).norm() < 1e-6) dup = true;
    if (dup) continue;
    projectors.push_back(P);
    bases.push_back(B);
  }
  for (const auto& B : bases) {
    bool meets = true;
    std::vector<Eigen::VectorXd> rows;
    for (const auto& n : cc.mirror_normals) {
      Eigen::VectorXd row = B.transpose() * n;
      if (row.norm() < 1e-8) {
        meets = false;  // the subspace lies inside this mirror
        break;
      }
      double s = n.dot(cc.chamber_rep) > 0 ? 1.0 : -1.0;
      rows.push_back(s * row / row.norm());
    }
    if (meets && strictly_feasible(std::move(rows), m - 2)) ++cc.codim2_count;
  }
  return cc;
}

ChamberMapResult extend_chamber_map(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                    const FiniteOrthGroup& R1, const FiniteOrthGroup& R2,
                                    double tol) {
  const int m = R1.dim;
  if (R2.dim != m || A.rows() != m || A.cols() != m || b.size() != m)
    fail(ErrorClass::InvalidSpec, "invalid_spec", "chamber map dimensions disagree");
  if ((A.transpose() * A - Eigen::MatrixXd::Identity(m, m)).norm() > 100 * tol)
    fail(ErrorClass::InvalidSpec, "invalid_spec", "chamber map matrix is not orthogonal");

  ChamberMapResult res;
  for (const Reflection& r : find_reflections(R1, tol)) {
    Eigen::MatrixXd img = A * R1.elements[r.element_index] * A.transpose();
    if (R2.find(img) < 0) {
      res.status = ChamberMapStatus::WallMismatch;
      res.detail = "conjugated wall reflection " + std::to_string(r.element_index) +
                   " is not an element of the target group";
      return res;
    }
  }
  for (const Reflection& r : find_reflections(R2, tol)) {
    if ((R2.elements[r.element_index] * b - b).norm() > tol * (1.0 + b.norm())) {
      res.status = ChamberMapStatus::BNotFixed;
      res.detail = "translation part is moved by target reflection " +
                   std::to_string(r.element_index);
      return res;
    }
  }
  if (R1.order() != R2.order()) {
    res.status = ChamberMapStatus::NotIsomorphism;
    res.detail = "group orders differ";
    return res;
  }
  std::vector<int> used(R2.order(), 0);
  for (int i = 0; i < R1.order(); ++i) {
    int j = R2.find(A * R1.elements[i] * A.transpose());
    if (j < 0 || used[j]) {
      res.status = ChamberMapStatus::NotIsomorphism;
      res.detail = j < 0 ? "element " + std::to_string(i) + " has no conjugate in the target"
                         : "conjugation is not injective on the element list";
      res.pairing.clear();
      return res;
    }
    used[j] = 1;
    res.pairing.push_back({i, j});
  }
  return res;
}

namespace {

struct ElementKey {
  int order = 0;
  std::vector<double> power_traces;  // tr(g), tr(g^2), ..., tr(g^m)

  bool matches(const ElementKey& o, double tol) const {
    if (order != o.order) return false;
    for (std::size_t i = 0; i < power_traces.size(); ++i)
      if (std::abs(power_traces[i] - o.power_traces[i]) > tol) return false;
    return true;
  }
};

ElementKey element_key(const Eigen::MatrixXd& g, int group_order) {
  const int m = int(g.rows());
  ElementKey key;
  Eigen::MatrixXd p = g;
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(m, m);
  for (int j = 1; j <= std::max(m, group_order); ++j) {
    if (j <= m) key.power_traces.push_back(p.trace());
    if (key.order == 0 && (p - eye).norm() < 1e-6) key.order = j;
    if (key.order != 0 && j >= m) break;
    p = p * g;
  }
  if (key.order == 0)
    fail(ErrorClass::InvalidSpec, "invalid_spec",
         "element order exceeds the group order; the element list is not a closed group");
  return key;
}

// Greedy minimal generating sequence: repeatedly adjoin the first element
// outside the subgroup generated so far.
std::vector<int> generator_indices(const FiniteOrthGroup& G) {
  std::vector<int> gens;
  FiniteOrthGroup span = FiniteOrthGroup::trivial(G.dim, G.tol);
  while (span.order() < G.order()) {
    int next = -1;
    for (int i = 0; i < G.order() && next < 0; ++i)
      if (span.find(G.elements[i]) < 0) next = i;
    if (next < 0)
      fail(ErrorClass::Internal, "internal", "generator search exhausted the element list");
    gens.push_back(next);
    std::vector<Eigen::MatrixXd> mats;
    for (int i : gens) mats.push_back(G.elements[i]);
    span = close_group(G.dim, mats, G.tol, G.order());
  }
  return gens;
}

}  // namespace

ConjugacyResult conjugacy_test(const FiniteOrthGroup& G1, const FiniteOrthGroup& G2,
                               long long budget, double tol, std::uint64_t seed) {
  if (G1.dim != G2.dim)
    fail(ErrorClass::InvalidSpec, "invalid_spec", "groups act on different dimensions");
  const int m = G1.dim;
  ConjugacyResult res;
  if (G1.order() != G2.order()) {
    res.status = ConjugacyStatus::NotConjugate;
    return res;
  }

  std::vector<ElementKey> keys1, keys2;
  for (const auto& g : G1.elements) keys1.push_back(element_key(g, G1.order()));
  for (const auto& g : G2.elements) keys2.push_back(element_key(g, G2.order()));

  // The multiset of per-element invariants is conjugation-invariant.
  {
    std::vector<int> taken(keys2.size(), 0);
    for (const auto& k : keys1) {
      int hit = -1;
      for (std::size_t j = 0; j < keys2.size() && hit < 0; ++j)
        if (!taken[j] && k.matches(keys2[j], 1e-6)) hit = int(j);
      if (hit < 0) {
        res.status = ConjugacyStatus::NotConjugate;
        return res;
      }
      taken[hit] = 1;
    }
  }

  std::vector<int> gens = generator_indices(G1);
  const int s = int(gens.size());
  std::vector<std::vector<int>> candidates(s);
  for (int j = 0; j < s; ++j) {
    for (int h = 0; h < G2.order(); ++h)
      if (keys1[gens[j]].matches(keys2[h], 1e-6)) candidates[j].push_back(h);
    if (candidates[j].empty()) {
      res.status = ConjugacyStatus::NotConjugate;
      return res;
    }
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(m, m);

  auto verify = [&](const Eigen::MatrixXd& Q, double& residual) {
    std::vector<int> used(G2.order(), 0);
    residual = 0;
    for (const auto& g : G1.elements) {
      Eigen::MatrixXd img = Q * g * Q.transpose();
      int best = -1;
      double dist = std::numeric_limits<double>::infinity();
      for (int h = 0; h < G2.order(); ++h) {
        double d = (img - G2.elements[h]).norm();
        if (d < dist) {
          dist = d;
          best = h;
        }
      }
      if (dist > tol || used[best]) return false;
      used[best] = 1;
      residual = std::max(residual, dist);
    }
    return true;
  };

  std::vector<std::size_t> pick(s, 0);
  for (;;) {  // lexicographic odometer over candidate assignments
    if (res.pairings_tried >= budget) {
      res.status = ConjugacyStatus::Inconclusive;
      return res;
    }
    ++res.pairings_tried;

    // Solve X g_j = h_j X for all assigned generator pairs.
    Eigen::MatrixXd sys(s * m * m, m * m);
    for (int j = 0; j < s; ++j) {
      const Eigen::MatrixXd& g = G1.elements[gens[j]];
      const Eigen::MatrixXd& h = G2.elements[candidates[j][pick[j]]];
      // vec(X g) = (g^T kron I) vec(X), vec(h X) = (I kron h) vec(X)
      for (int c = 0; c < m; ++c)
        for (int rr = 0; rr < m; ++rr)
          for (int cc = 0; cc < m; ++cc)
            for (int r2 = 0; r2 < m; ++r2)
              sys(j * m * m + c * m + r2, cc * m + rr) =
                  (r2 == rr ? g(cc, c) : 0.0) - (cc == c ? h(r2, rr) : 0.0);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
    lu.setThreshold(1e-8);
    Eigen::MatrixXd K = lu.kernel();
    if (lu.dimensionOfKernel() > 0) {
      for (int attempt = 0; attempt < 3; ++attempt) {
        Eigen::VectorXd combo(K.cols());
        for (int i = 0; i < K.cols(); ++i) combo[i] = gauss(rng);
        Eigen::VectorXd v = K * combo;
        Eigen::MatrixXd M(m, m);
        for (int c = 0; c < m; ++c) M.col(c) = v.segment(c * m, m);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
        if (svd.singularValues()[m - 1] < 1e-8 * svd.singularValues()[0]) continue;
        Eigen::MatrixXd Q = svd.matrixU() * svd.matrixV().transpose();
        double residual = 0;
        if (verify(Q, residual)) {
          res.status = ConjugacyStatus::Conjugate;
          res.conjugator = Q;
          res.residual = residual;
          return res;
        }
      }
    }

    int a = 0;
    while (a < s && ++pick[a] == candidates[a].size()) pick[a++] = 0;
    if (a == s || s == 0) break;
  }
  res.status = ConjugacyStatus::NotConjugate;
  return res;
}

StratumClass finite_extension_classify(const ExtendedAction& extended) {
  const TorusAction& torus = extended.torus;
  std::vector<int> all(torus.n());
  std::iota(all.begin(), all.end(), 0);
  return classify_stratum(torus, stratum_for_pattern(torus, all)).cls;
}

}  // namespace torquot
