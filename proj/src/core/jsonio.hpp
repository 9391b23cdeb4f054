#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "core/actions.hpp"

namespace torquot {

inline constexpr const char* kToolName = "torquot";
inline constexpr const char* kToolVersion = "0.1.0";

// Curvature ray-scan request: sample planes at each radius along the ray
// through `direction`. Seeds are mandatory for every sampled operation.
struct ScanSection {
  Eigen::VectorXd direction;
  std::vector<double> radii;
  int planes = 6;
  std::uint64_t seed = 0;
};

// Sampled-pair request for reduction isometry checks.
struct PairsSection {
  int count = 0;
  std::uint64_t seed = 0;
};

// Parsed action specification: the action (with optional finite extension)
// plus the optional sampling sections.
struct ActionSpec {
  ExtendedAction extended;
  bool has_finite = false;
  std::optional<ScanSection> scan;
  std::optional<PairsSection> pairs;
};

// Parses {"k","n","f","W"[, "finite_generators"][, "scan"][, "pairs"]}.
// Strict: malformed JSON, missing keys, wrong types and unknown keys all
// raise invalid_spec with the offending key named.
ActionSpec parse_action_spec(const std::string& text, double tol = 1e-9);

// Parses {"dim": int, "generators": [[[number]]]} and closes the group.
FiniteOrthGroup parse_group_spec(const std::string& text, double tol = 1e-9);

// 64-bit FNV-1a over the raw bytes, formatted "fnv1a:%016x".
std::string content_hash(const std::string& bytes);

// Report builders. Output is deterministic byte-for-byte for fixed inputs;
// each report carries a "stable_hash" of everything outside the trailing
// "meta" block (the only part allowed to vary run-to-run).
std::string analyze_report(const ActionSpec& spec, const std::string& input_text, double tol,
                           int max_planes);
std::string split_report(const ActionSpec& spec, const std::string& input_text);
std::string strata_report(const ActionSpec& spec, const std::string& input_text, double tol,
                          int max_planes);
std::string reduce_report(const ActionSpec& spec, const std::string& input_text, double tol);
std::string reflect_report(const FiniteOrthGroup& group, const std::string& input_text,
                           double tol);
std::string conjugacy_report(const FiniteOrthGroup& g1, const FiniteOrthGroup& g2,
                             long long budget, double tol);
std::string distance_report(const ActionSpec& spec, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& y, int grid, int refinements, double gap_tol);

// Ray-scan CSV: header, one row per (radius, plane) sample, and a trailing
// "# fitted_exponent,..." summary line. A numerical failure at scan time
// (off-principal direction) is surfaced as a named "# error,..." row with
// the error class in `error_class` instead of a throw, so callers can both
// keep the partial output and report the failure.
struct ScanOutput {
  std::string csv;
  int error_class = 0;  // 0 ok; otherwise the ErrorClass value
  std::string error_name;
};

ScanOutput curvature_csv(const ActionSpec& spec, double tol = 1e-9);

}  // namespace torquot
