// torquot command-line tool. A thin shell over the C API: reads JSON specs,
// writes JSON reports or CSV scans, and maps status codes to exit codes
// (0 ok, 2 invalid spec, 3 resource limit exceeded, 4 numerical degeneracy;
// anything else folds to 1).
#include <cctype>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "torquot.h"

namespace {

int fold_exit(int rc) {
  switch (rc) {
    case TQ_OK:
    case TQ_ERR_INVALID_SPEC:
    case TQ_ERR_RESOURCE_LIMIT:
    case TQ_ERR_NUMERICAL:
      return rc;
    default:
      return 1;
  }
}

bool read_file(const std::string& path, std::string& out, std::string& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err = "cannot read \"" + path + "\"";
    return false;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  out = buf.str();
  return true;
}

bool write_output(const std::string& path, const std::string& content, std::string& err) {
  if (path.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
    return true;
  }
  std::ofstream out(path, std::ios::binary);
  out.write(content.data(), std::streamsize(content.size()));
  if (!out) {
    err = "cannot write \"" + path + "\"";
    return false;
  }
  return true;
}

int report_rc(int rc) {
  if (rc != TQ_OK) std::fprintf(stderr, "error: %s\n", tq_last_error());
  return fold_exit(rc);
}

int invalid(const std::string& message) {
  std::fprintf(stderr, "error: %s\n", message.c_str());
  return TQ_ERR_INVALID_SPEC;
}

struct ActionGuard {
  tq_action* h = nullptr;
  ~ActionGuard() { tq_action_free(h); }
};

struct GroupGuard {
  tq_group* h = nullptr;
  ~GroupGuard() { tq_group_free(h); }
};

struct StringGuard {
  char* s = nullptr;
  ~StringGuard() { tq_string_free(s); }
};

int load_action(const std::string& path, double tol, ActionGuard& guard) {
  std::string text, err;
  if (!read_file(path, text, err)) return invalid(err);
  return report_rc(tq_action_parse(text.c_str(), tol, &guard.h));
}

int load_group(const std::string& path, double tol, GroupGuard& guard) {
  std::string text, err;
  if (!read_file(path, text, err)) return invalid(err);
  return report_rc(tq_group_parse(text.c_str(), tol, &guard.h));
}

int emit(const std::string& out_path, const char* content) {
  std::string err;
  if (!write_output(out_path, content ? content : "", err)) return invalid(err);
  return 0;
}

bool parse_point(const std::string& text, std::vector<double>& out) {
  out.clear();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      while (used < item.size() && std::isspace((unsigned char)item[used])) ++used;
      if (used != item.size()) return false;
    } catch (const std::exception&) {
      return false;
    }
  }
  return !out.empty();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"torus and finite-group quotient geometry toolkit"};
  app.require_subcommand(1);

  std::string spec_path, spec2_path, out_path, x_text, y_text;
  double tol = 1e-9, gap_tol = 1e-6;
  int max_planes = 12, grid = 8, refinements = 40;
  long long budget = 1000000;

  auto add_common = [&](CLI::App* cmd, bool needs_spec = true) {
    if (needs_spec)
      cmd->add_option("--spec", spec_path, "input spec file (JSON)")->required();
    cmd->add_option("--out", out_path, "output file (default: stdout)");
    cmd->add_option("--tol", tol, "numerical tolerance");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "full analysis report (JSON)");
  add_common(analyze);
  analyze->add_option("--max-planes", max_planes, "stratification plane cap");

  CLI::App* curvature = app.add_subcommand("curvature", "curvature ray scan (CSV)");
  add_common(curvature);

  CLI::App* strata = app.add_subcommand("strata", "stratification table (JSON)");
  add_common(strata);
  strata->add_option("--max-planes", max_planes, "stratification plane cap");

  CLI::App* reduce = app.add_subcommand("reduce", "local reduction (JSON)");
  add_common(reduce);

  CLI::App* reflect = app.add_subcommand("reflect", "chamber complex of a group (JSON)");
  add_common(reflect);

  CLI::App* conjugacy =
      app.add_subcommand("conjugacy", "orthogonal conjugacy of two groups (JSON)");
  add_common(conjugacy);
  conjugacy->add_option("--spec2", spec2_path, "second group spec file")->required();
  conjugacy->add_option("--budget", budget, "pairing search budget");

  CLI::App* distance = app.add_subcommand("distance", "certified quotient distance (JSON)");
  add_common(distance);
  distance->add_option("--x", x_text, "first point, comma-separated")->required();
  distance->add_option("--y", y_text, "second point, comma-separated")->required();
  distance->add_option("--grid", grid, "initial grid resolution per angle");
  distance->add_option("--refinements", refinements, "max refinement levels per axis");
  distance->add_option("--gap-tol", gap_tol, "certified gap tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : TQ_ERR_INVALID_SPEC;  // bad invocation reads as a bad spec
  }

  if (app.got_subcommand(reflect)) {
    GroupGuard g;
    if (int rc = load_group(spec_path, tol, g)) return rc;
    StringGuard out;
    if (int rc = report_rc(tq_reflect(g.h, tol, &out.s))) return rc;
    return emit(out_path, out.s);
  }

  if (app.got_subcommand(conjugacy)) {
    GroupGuard g1, g2;
    if (int rc = load_group(spec_path, tol, g1)) return rc;
    if (int rc = load_group(spec2_path, tol, g2)) return rc;
    StringGuard out;
    if (int rc = report_rc(tq_conjugacy(g1.h, g2.h, budget, tol, &out.s))) return rc;
    return emit(out_path, out.s);
  }

  ActionGuard action;
  if (int rc = load_action(spec_path, tol, action)) return rc;

  if (app.got_subcommand(analyze)) {
    StringGuard out;
    if (int rc = report_rc(tq_analyze(action.h, tol, max_planes, &out.s))) return rc;
    return emit(out_path, out.s);
  }
  if (app.got_subcommand(strata)) {
    StringGuard out;
    if (int rc = report_rc(tq_strata(action.h, max_planes, &out.s))) return rc;
    return emit(out_path, out.s);
  }
  if (app.got_subcommand(reduce)) {
    StringGuard out;
    if (int rc = report_rc(tq_reduce(action.h, tol, &out.s))) return rc;
    return emit(out_path, out.s);
  }
  if (app.got_subcommand(curvature)) {
    StringGuard out;
    int rc = tq_curvature_scan(action.h, tol, &out.s);
    // A numerical ray failure still yields a CSV with the named error row;
    // write it, then exit with the numerical code.
    if (out.s) {
      if (int wrc = emit(out_path, out.s)) return wrc;
    }
    return report_rc(rc);
  }
  if (app.got_subcommand(distance)) {
    std::vector<double> x, y;
    if (!parse_point(x_text, x)) return invalid("--x must be comma-separated numbers");
    if (!parse_point(y_text, y)) return invalid("--y must be comma-separated numbers");
    if (x.size() != y.size()) return invalid("--x and --y must have the same length");
    StringGuard out;
    if (int rc = report_rc(tq_distance_torus(action.h, x.data(), y.data(), int(x.size()),
                                             grid, refinements, gap_tol, &out.s)))
      return rc;
    return emit(out_path, out.s);
  }
  return 1;  // unreachable: require_subcommand(1)
}
