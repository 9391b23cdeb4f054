#include "torquot.h"

#include <cstdlib>
#include <cstring>
#include <string>
#include <utility>

#include "core/errors.hpp"
#include "core/jsonio.hpp"
#include "core/strata.hpp"

struct tq_action {
  torquot::ActionSpec spec;
  std::string text;
};

struct tq_group {
  torquot::FiniteOrthGroup group;
  std::string text;
};

namespace {

thread_local std::string g_last_error;

int failure(int code, const std::string& message) {
  g_last_error = message;
  return code;
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

// Runs the body, translating exceptions into status codes and the
// thread-local message.
template <typename F>
int guarded(F&& body) {
  try {
    int rc = body();
    if (rc == TQ_OK) g_last_error.clear();
    return rc;
  } catch (const torquot::Error& e) {
    return failure(int(e.cls()), e.what());
  } catch (const std::exception& e) {
    return failure(TQ_ERR_INTERNAL, std::string("internal: ") + e.what());
  }
}

}  // namespace

extern "C" {

const char* tq_version(void) { return torquot::kToolVersion; }

const char* tq_last_error(void) { return g_last_error.c_str(); }

void tq_string_free(char* s) { std::free(s); }

int tq_action_parse(const char* json_text, double tol, tq_action** out) {
  if (!json_text || !out) return failure(TQ_ERR_BAD_HANDLE, "null argument");
  *out = nullptr;
  return guarded([&] {
    std::string text(json_text);
    *out = new tq_action{torquot::parse_action_spec(text, tol), std::move(text)};
    return TQ_OK;
  });
}

void tq_action_free(tq_action* action) { delete action; }

int tq_group_parse(const char* json_text, double tol, tq_group** out) {
  if (!json_text || !out) return failure(TQ_ERR_BAD_HANDLE, "null argument");
  *out = nullptr;
  return guarded([&] {
    std::string text(json_text);
    *out = new tq_group{torquot::parse_group_spec(text, tol), std::move(text)};
    return TQ_OK;
  });
}

void tq_group_free(tq_group* group) { delete group; }

int tq_analyze(const tq_action* action, double tol, int max_planes, char** out_json) {
  if (!action || !out_json) return failure(TQ_ERR_BAD_HANDLE, "null argument");
  return guarded([&] {
    *out_json = dup_string(torquot::analyze_report(action->spec, action->text, tol, max_planes));
    return TQ_OK;
  });
}

int tq_split_verdict(const tq_action* action, char** out_json) {
  if (!action || !out_json) return failure(TQ_ERR_BAD_HANDLE, "null argument");
  return guarded([&] {
    *out_json = dup_string(torquot::split_report(action->spec, action->text));
    return TQ_OK;
  });
}

int tq_strata(const tq_action* action, int max_planes, char** out_json) {
  if (!action || !out_json) return failure(TQ_ERR_BAD_HANDLE, "null argument");
  return guarded([&] {
    *out_json =
        dup_string(torquot::strata_report(action->spec, action->text, 1e-9, max_planes));
    return TQ_OK;
  });
}

int tq_reduce(const tq_action* action, double tol, char** out_json) {
  if (!action || !out_json) return failure(TQ_ERR_BAD_HANDLE, "null argument");
  return guarded([&] {
    *out_json = dup_string(torquot::reduce_report(action->spec, action->text, tol));
    return TQ_OK;
  });
}

int tq_curvature_scan(const tq_action* action, double tol, char** out_csv) {
  if (!action || !out_csv) return failure(TQ_ERR_BAD_HANDLE, "null argument");
  return guarded([&]() -> int {
    torquot::ScanOutput out = torquot::curvature_csv(action->spec, tol);
    *out_csv = dup_string(out.csv);
    if (out.error_class != 0)
      return failure(out.error_class, "scan failed with " + out.error_name +
                                          "; CSV carries the named error row");
    return TQ_OK;
  });
}

int tq_reflect(const tq_group* group, double tol, char** out_json) {
  if (!group || !out_json) return failure(TQ_ERR_BAD_HANDLE, "null argument");
  return guarded([&] {
    *out_json = dup_string(torquot::reflect_report(group->group, group->text, tol));
    return TQ_OK;
  });
}

int tq_conjugacy(const tq_group* g1, const tq_group* g2, long long budget, double tol,
                 char** out_json) {
  if (!g1 || !g2 || !out_json) return failure(TQ_ERR_BAD_HANDLE, "null argument");
  return guarded([&] {
    *out_json = dup_string(torquot::conjugacy_report(g1->group, g2->group, budget, tol));
    return TQ_OK;
  });
}

int tq_distance_finite(const tq_group* group, const double* x, const double* y, int len,
                       double* out_value) {
  if (!group || !x || !y || !out_value) return failure(TQ_ERR_BAD_HANDLE, "null argument");
  return guarded([&] {
    if (len != group->group.dim)
      torquot::fail(torquot::ErrorClass::InvalidSpec, "invalid_spec",
                    "points must have the group dimension " +
                        std::to_string(group->group.dim));
    Eigen::Map<const Eigen::VectorXd> vx(x, len), vy(y, len);
    *out_value = torquot::quotient_distance_finite(group->group, vx, vy);
    return TQ_OK;
  });
}

int tq_distance_torus(const tq_action* action, const double* x, const double* y, int len,
                      int grid, int refinements, double gap_tol, char** out_json) {
  if (!action || !x || !y || !out_json) return failure(TQ_ERR_BAD_HANDLE, "null argument");
  return guarded([&] {
    Eigen::Map<const Eigen::VectorXd> vx(x, len), vy(y, len);
    *out_json = dup_string(
        torquot::distance_report(action->spec, vx, vy, grid, refinements, gap_tol));
    return TQ_OK;
  });
}

}  // extern "C"
