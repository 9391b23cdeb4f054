#include "core/jsonio.hpp"

#include <chrono>
#include <cstdio>
#include <limits>
#include <set>
#include <string>

#include <json.hpp>

#include "core/curvature.hpp"
#include "core/errors.hpp"
#include "core/reflections.hpp"
#include "core/split.hpp"
#include "core/strata.hpp"

namespace torquot {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& detail) {
  fail(ErrorClass::InvalidSpec, "invalid_spec", detail);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) bad(where + " must be a JSON object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) known = true;
    if (!known) bad("unknown key \"" + item.key() + "\" in " + where);
  }
}

const json& need(const json& obj, const std::string& where, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) bad(where + " is missing required key \"" + key + "\"");
  return *it;
}

long long get_int(const json& v, const std::string& where, long long lo, long long hi) {
  if (!v.is_number_integer()) bad(where + " must be an integer");
  long long x = v.get<long long>();
  if (x < lo || x > hi)
    bad(where + " = " + std::to_string(x) + " is outside [" + std::to_string(lo) + ", " +
        std::to_string(hi) + "]");
  return x;
}

std::uint64_t get_seed(const json& v, const std::string& where) {
  if (!(v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0)))
    bad(where + " must be a non-negative integer");
  return v.get<std::uint64_t>();
}

double get_num(const json& v, const std::string& where) {
  if (!v.is_number()) bad(where + " must be a number");
  return v.get<double>();
}

Eigen::VectorXd get_vector(const json& v, const std::string& where, int want_size) {
  if (!v.is_array()) bad(where + " must be an array of numbers");
  if (want_size >= 0 && int(v.size()) != want_size)
    bad(where + " must have length " + std::to_string(want_size) + ", got " +
        std::to_string(v.size()));
  Eigen::VectorXd out(int(v.size()));
  for (int i = 0; i < int(v.size()); ++i)
    out[i] = get_num(v[i], where + "[" + std::to_string(i) + "]");
  return out;
}

Eigen::MatrixXd get_matrix(const json& v, const std::string& where, int rows, int cols) {
  if (!v.is_array() || int(v.size()) != rows)
    bad(where + " must be an array of " + std::to_string(rows) + " rows");
  Eigen::MatrixXd out(rows, cols);
  for (int r = 0; r < rows; ++r)
    out.row(r) = get_vector(v[r], where + "[" + std::to_string(r) + "]", cols).transpose();
  return out;
}

json json_int(const Int& v) {
  static const Int lo = std::numeric_limits<long long>::min();
  static const Int hi = std::numeric_limits<long long>::max();
  if (v >= lo && v <= hi) return v.convert_to<long long>();
  return v.str();  // decimal string once past 64 bits
}

json json_ints(const std::vector<Int>& v) {
  json a = json::array();
  for (const Int& x : v) a.push_back(json_int(x));
  return a;
}

json json_intmat(const IntMatrix& A) {
  json rows = json::array();
  for (int r = 0; r < A.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < A.cols(); ++c) row.push_back(json_int(A(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json json_vec(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json json_mat(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (int r = 0; r < M.rows(); ++r) rows.push_back(json_vec(M.row(r).transpose()));
  return rows;
}

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("malformed JSON: ") + e.what());
  }
}

TorusAction torus_from_json(const json& doc) {
  int k = int(get_int(need(doc, "spec", "k"), "\"k\"", 0, 64));
  int n = int(get_int(need(doc, "spec", "n"), "\"n\"", 0, 4096));
  int f = int(get_int(need(doc, "spec", "f"), "\"f\"", 0, 4096));
  const json& wj = need(doc, "spec", "W");
  if (!wj.is_array() || int(wj.size()) != k)
    bad("\"W\" must be an array of k = " + std::to_string(k) + " rows");
  IntMatrix W(k, n);
  for (int r = 0; r < k; ++r) {
    const json& row = wj[r];
    if (!row.is_array() || int(row.size()) != n)
      bad("\"W\"[" + std::to_string(r) + "] must have n = " + std::to_string(n) + " entries");
    for (int c = 0; c < n; ++c)
      W(r, c) = get_int(row[c], "\"W\"[" + std::to_string(r) + "][" + std::to_string(c) + "]",
                        std::numeric_limits<long long>::min(),
                        std::numeric_limits<long long>::max());
  }
  return TorusAction::create(k, n, f, std::move(W));
}

std::vector<Eigen::MatrixXd> matrices_from_json(const json& v, const std::string& where,
                                                int dim) {
  if (!v.is_array()) bad(where + " must be an array of matrices");
  std::vector<Eigen::MatrixXd> out;
  for (int i = 0; i < int(v.size()); ++i)
    out.push_back(get_matrix(v[i], where + "[" + std::to_string(i) + "]", dim, dim));
  return out;
}

ScanSection scan_from_json(const json& v, int m) {
  check_keys(v, "\"scan\"", {"direction", "radii", "planes", "seed"});
  ScanSection s;
  s.direction = get_vector(need(v, "\"scan\"", "direction"), "\"scan\".\"direction\"", m);
  const json& rj = need(v, "\"scan\"", "radii");
  if (!rj.is_array() || rj.empty()) bad("\"scan\".\"radii\" must be a nonempty array");
  for (int i = 0; i < int(rj.size()); ++i) {
    double r = get_num(rj[i], "\"scan\".\"radii\"[" + std::to_string(i) + "]");
    if (!(r > 0)) bad("\"scan\".\"radii\" entries must be positive");
    s.radii.push_back(r);
  }
  if (auto it = v.find("planes"); it != v.end())
    s.planes = int(get_int(*it, "\"scan\".\"planes\"", 1, 4096));
  s.seed = get_seed(need(v, "\"scan\"", "seed"), "\"scan\".\"seed\"");
  return s;
}

PairsSection pairs_from_json(const json& v) {
  check_keys(v, "\"pairs\"", {"count", "seed"});
  PairsSection p;
  p.count = int(get_int(need(v, "\"pairs\"", "count"), "\"pairs\".\"count\"", 1, 1000000));
  p.seed = get_seed(need(v, "\"pairs\"", "seed"), "\"pairs\".\"seed\"");
  return p;
}

const char* stratum_class_name(StratumClass c) {
  return c == StratumClass::Orbifold ? "orbifold" : "non_orbifold";
}

json split_json(const SplitVerdict& sv) {
  json planes = json::array();
  for (int i = 0; i < int(sv.planes.size()); ++i) {
    const PlaneVerdict& p = sv.planes[i];
    json e;
    e["plane"] = i;
    e["status"] = p.status == PlaneStatus::Fixed    ? "fixed"
                  : p.status == PlaneStatus::Circle ? "circle"
                                                    : "no_circle";
    e["certificate"] = p.status == PlaneStatus::Circle ? json_ints(p.certificate) : json();
    planes.push_back(std::move(e));
  }
  json out;
  out["split"] = sv.split;
  out["witness_plane"] = sv.witness_plane ? json(*sv.witness_plane) : json();
  out["planes"] = std::move(planes);
  return out;
}

json strata_json(const TorusAction& action, int max_planes) {
  json out = json::array();
  for (const Stratum& s : enumerate_strata(action, max_planes)) {
    StratumVerdict v = classify_stratum(action, s);
    json e;
    e["pattern"] = s.pattern;
    e["dim_total"] = s.dim_in_total;
    e["dim_quotient"] = s.dim_in_quotient;
    e["isotropy"] = {{"dim", s.isotropy.dim},
                     {"invariant_factors", json_ints(s.isotropy.invariant_factors)},
                     {"slice_weights", json_intmat(s.isotropy.slice_weights)}};
    e["class"] = stratum_class_name(v.cls);
    e["witness_plane"] = v.witness_plane ? json(*v.witness_plane) : json();
    out.push_back(std::move(e));
  }
  return out;
}

json singular_json(const SingularDimension& sd) {
  json out;
  out["dim_B"] = sd.dim_B ? json(*sd.dim_B) : json();
  out["bound"] = sd.bound;
  out["satisfied"] = sd.satisfied;
  return out;
}

json witness_json(const BracketWitness& w) {
  json out;
  out["value"] = w.value;
  out["value_projection"] = w.value_projection;
  out["pairing"] = w.pairing;
  out["plane_without_circle"] = w.plane_p;
  out["coupled_plane"] = w.plane_q;
  out["mixing_row"] = std::string(1, w.w_type);
  out["point"] = json_vec(w.x);
  out["v"] = json_vec(w.v);
  out["w"] = json_vec(w.w);
  return out;
}

json reduction_json(const ReductionPair& red) {
  json basis = json::array();
  for (const auto& b : red.subspace_basis) basis.push_back(json_vec(b));
  json out;
  out["reducible"] = true;
  out["subspace_dim"] = int(red.subspace_basis.size());
  out["subspace_basis"] = std::move(basis);
  out["group_order"] = red.gamma.order();
  out["rotated_planes"] = red.rotated_planes;
  return out;
}

json action_json(const TorusAction& a) {
  json out;
  out["k"] = a.k();
  out["n"] = a.n();
  out["f"] = a.f();
  out["m"] = a.m();
  out["effective"] = a.kernel_factors().empty();
  out["kernel_factors"] = json_ints(a.kernel_factors());
  return out;
}

json report_head(const std::string& input_text) {
  json r;
  r["tool"] = kToolName;
  r["version"] = kToolVersion;
  r["input_hash"] = content_hash(input_text);
  return r;
}

std::string report_finish(json r, std::chrono::steady_clock::time_point t0) {
  r["stable_hash"] = content_hash(r.dump(2));
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                  .count();
  r["meta"] = {{"elapsed_ms", ms}};
  return r.dump(2) + "\n";
}

std::string csv_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ActionSpec parse_action_spec(const std::string& text, double tol) {
  json doc = parse_json_text(text);
  check_keys(doc, "the action spec", {"k", "n", "f", "W", "finite_generators", "scan", "pairs"});
  TorusAction torus = torus_from_json(doc);
  const int m = torus.m();

  bool has_finite = doc.find("finite_generators") != doc.end();
  FiniteOrthGroup finite = FiniteOrthGroup::trivial(m, tol);
  if (has_finite) {
    auto gens = matrices_from_json(doc["finite_generators"], "\"finite_generators\"", m);
    finite = close_group(m, gens, tol);
  }
  ExtendedAction extended =
      has_finite ? make_extended(std::move(torus), std::move(finite), tol)
                 : ExtendedAction{std::move(torus), std::move(finite)};

  ActionSpec spec{std::move(extended), has_finite, std::nullopt, std::nullopt};
  if (auto it = doc.find("scan"); it != doc.end()) spec.scan = scan_from_json(*it, m);
  if (auto it = doc.find("pairs"); it != doc.end()) spec.pairs = pairs_from_json(*it);
  return spec;
}

FiniteOrthGroup parse_group_spec(const std::string& text, double tol) {
  json doc = parse_json_text(text);
  check_keys(doc, "the group spec", {"dim", "generators"});
  int dim = int(get_int(need(doc, "the group spec", "dim"), "\"dim\"", 1, 64));
  auto gens = matrices_from_json(need(doc, "the group spec", "generators"), "\"generators\"", dim);
  return close_group(dim, gens, tol);
}

std::string analyze_report(const ActionSpec& spec, const std::string& input_text, double tol,
                           int max_planes) {
  auto t0 = std::chrono::steady_clock::now();
  const TorusAction& a = spec.extended.torus;
  json r = report_head(input_text);
  r["action"] = action_json(a);
  SplitVerdict sv = analyze_split(a);
  r["split"] = split_json(sv);
  r["strata"] = strata_json(a, max_planes);
  r["singular_set"] = singular_json(singular_set_dimension(a, max_planes));
  r["curvature_witness"] = sv.split ? json() : witness_json(bracket_witness(a, tol));
  if (sv.split) {
    r["reduction"] = reduction_json(local_reduction(a, tol));
  } else {
    r["reduction"] = {{"reducible", false},
                      {"witness_plane", sv.witness_plane ? json(*sv.witness_plane) : json()}};
  }
  if (spec.has_finite) {
    r["finite"] = {
        {"order", spec.extended.finite.order()},
        {"origin_class", stratum_class_name(finite_extension_classify(spec.extended))}};
  } else {
    r["finite"] = json();
  }
  return report_finish(std::move(r), t0);
}

std::string split_report(const ActionSpec& spec, const std::string& input_text) {
  auto t0 = std::chrono::steady_clock::now();
  json r = report_head(input_text);
  r["action"] = action_json(spec.extended.torus);
  r["split"] = split_json(analyze_split(spec.extended.torus));
  return report_finish(std::move(r), t0);
}

std::string strata_report(const ActionSpec& spec, const std::string& input_text, double tol,
                          int max_planes) {
  (void)tol;
  auto t0 = std::chrono::steady_clock::now();
  const TorusAction& a = spec.extended.torus;
  json r = report_head(input_text);
  r["action"] = action_json(a);
  r["strata"] = strata_json(a, max_planes);
  r["singular_set"] = singular_json(singular_set_dimension(a, max_planes));
  return report_finish(std::move(r), t0);
}

std::string reduce_report(const ActionSpec& spec, const std::string& input_text, double tol) {
  auto t0 = std::chrono::steady_clock::now();
  const TorusAction& a = spec.extended.torus;
  json r = report_head(input_text);
  r["action"] = action_json(a);
  SplitVerdict sv = analyze_split(a);
  if (sv.split) {
    r["reduction"] = reduction_json(local_reduction(a, tol));
    if (spec.pairs) {
      ReductionCheck chk = reduction_isometry_check(a, spec.pairs->count, spec.pairs->seed);
      r["check"] = {{"pairs", chk.pairs},
                    {"max_deviation", chk.max_deviation},
                    {"max_gap", chk.max_gap}};
    } else {
      r["check"] = json();
    }
  } else {
    // Non-existence is a result for a non-split action, not a failure.
    r["reduction"] = {{"reducible", false},
                      {"witness_plane", sv.witness_plane ? json(*sv.witness_plane) : json()}};
    r["check"] = json();
  }
  return report_finish(std::move(r), t0);
}

std::string reflect_report(const FiniteOrthGroup& group, const std::string& input_text,
                           double tol) {
  auto t0 = std::chrono::steady_clock::now();
  ChamberComplex cc = chamber_complex(group, 12001, tol);
  json refl = json::array();
  for (const auto& rf : cc.reflections)
    refl.push_back({{"element_index", rf.element_index}, {"normal", json_vec(rf.normal)}});
  json r = report_head(input_text);
  r["group"] = {{"dim", group.dim}, {"order", group.order()}};
  r["reflections"] = std::move(refl);
  r["reflection_subgroup_order"] = cc.reflection_subgroup.order();
  r["chamber_count"] = cc.chamber_count;
  r["chamber_rep"] = json_vec(cc.chamber_rep);
  r["codim2_count"] = cc.codim2_count;
  // pi_1 of a regular chamber is Z^codim2_count extended by Gamma/R.
  r["regular_pi1_rank"] = cc.codim2_count;
  r["quotient_by_reflections_order"] = group.order() / cc.reflection_subgroup.order();
  return report_finish(std::move(r), t0);
}

std::string conjugacy_report(const FiniteOrthGroup& g1, const FiniteOrthGroup& g2,
                             long long budget, double tol) {
  auto t0 = std::chrono::steady_clock::now();
  ConjugacyResult res = conjugacy_test(g1, g2, budget, tol);
  json r;
  r["tool"] = kToolName;
  r["version"] = kToolVersion;
  r["status"] = res.status == ConjugacyStatus::Conjugate      ? "conjugate"
                : res.status == ConjugacyStatus::NotConjugate ? "not_conjugate"
                                                              : "inconclusive";
  r["residual"] = res.residual;
  r["pairings_tried"] = res.pairings_tried;
  r["conjugator"] =
      res.status == ConjugacyStatus::Conjugate ? json_mat(res.conjugator) : json();
  return report_finish(std::move(r), t0);
}

std::string distance_report(const ActionSpec& spec, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& y, int grid, int refinements,
                            double gap_tol) {
  auto t0 = std::chrono::steady_clock::now();
  const TorusAction& a = spec.extended.torus;
  const FiniteOrthGroup& finite = spec.extended.finite;
  if (x.size() != a.m() || y.size() != a.m())
    bad("points must have dimension m = " + std::to_string(a.m()));

  // Distance in the full quotient: minimize over the finite part outside,
  // the torus inside. Each torus distance is certified, so the combined
  // bracket [value - gap, value] is too.
  double value = std::numeric_limits<double>::infinity();
  double lower = std::numeric_limits<double>::infinity();
  int best_elem = 0;
  Eigen::VectorXd best_theta;
  for (int e = 0; e < finite.order(); ++e) {
    TorusDistance d =
        quotient_distance_torus(a, x, finite.elements[e] * y, grid, refinements, gap_tol);
    if (d.value < value) {
      value = d.value;
      best_elem = e;
      best_theta = d.theta;
    }
    lower = std::min(lower, d.value - d.gap);
  }
  json r;
  r["tool"] = kToolName;
  r["version"] = kToolVersion;
  r["value"] = value;
  r["gap"] = value - lower;
  r["theta"] = json_vec(best_theta);
  r["finite_element"] = spec.has_finite ? json(best_elem) : json();
  return report_finish(std::move(r), t0);
}

ScanOutput curvature_csv(const ActionSpec& spec, double tol) {
  if (!spec.scan) bad("the action spec has no \"scan\" section");
  const ScanSection& s = *spec.scan;
  ScanOutput out;
  out.csv = "radius,plane_index,sec,sec_r2\n";
  try {
    RayScan rs =
        ray_scan(spec.extended.torus, s.direction, s.radii, s.planes, s.seed, tol);
    for (const CurvatureSample& c : rs.samples)
      out.csv += csv_num(c.radius) + "," + std::to_string(c.plane_index) + "," +
                 csv_num(c.sec) + "," + csv_num(c.sec_r2) + "\n";
    out.csv += rs.fitted_exponent
                   ? "# fitted_exponent," + csv_num(*rs.fitted_exponent) + "\n"
                   : "# fitted_exponent,undefined\n";
  } catch (const Error& e) {
    if (e.cls() != ErrorClass::Numerical) throw;
    out.csv += "# error," + e.name() + "," + e.what() + "\n";
    out.error_class = int(e.cls());
    out.error_name = e.name();
  }
  return out;
}

}  // namespace torquot
