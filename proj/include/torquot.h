/* torquot — torus and finite-group quotient geometry toolkit.
 *
 * C surface over the analysis core: opaque handles, integer status codes,
 * JSON/CSV string results. Every function is thread-safe; the last error
 * message is kept per thread. Strings returned through char** are heap
 * allocated and must be released with tq_string_free.
 */
#ifndef TORQUOT_H
#define TORQUOT_H

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. 0 and 2..4 line up with the CLI exit codes. */
typedef enum tq_status {
  TQ_OK = 0,
  TQ_ERR_INVALID_SPEC = 2,   /* malformed JSON, schema violation, bad dims */
  TQ_ERR_RESOURCE_LIMIT = 3, /* plane cap, closure cap, search budget */
  TQ_ERR_NUMERICAL = 4,      /* singular Gram, degenerate data, coarse grid */
  TQ_ERR_PRECONDITION = 5,   /* call outside the documented domain */
  TQ_ERR_BAD_HANDLE = 6,     /* null handle or output pointer */
  TQ_ERR_INTERNAL = 7        /* invariant breached; always a bug */
} tq_status;

/* Parsed action specification (torus weights + optional finite extension,
 * optional scan/pairs sections). */
typedef struct tq_action tq_action;

/* Finite orthogonal matrix group, closed under products. */
typedef struct tq_group tq_group;

/* Library version, static storage. */
const char* tq_version(void);

/* Message from the last failing call on the calling thread ("" if none).
 * Valid until the next failing call on the same thread. */
const char* tq_last_error(void);

/* Releases a string returned through any char** output. NULL is a no-op. */
void tq_string_free(char* s);

/* --- handles ------------------------------------------------------------ */

/* Parses {"k","n","f","W"[, "finite_generators"][, "scan"][, "pairs"]}. */
int tq_action_parse(const char* json_text, double tol, tq_action** out);
void tq_action_free(tq_action* action);

/* Parses {"dim", "generators"} and closes the generated group. */
int tq_group_parse(const char* json_text, double tol, tq_group** out);
void tq_group_free(tq_group* group);

/* --- analyses (JSON reports) -------------------------------------------- */

/* Full pipeline: split verdict, strata table, singular-set dimension vs
 * bound, curvature witness (non-split) or local reduction (split). */
int tq_analyze(const tq_action* action, double tol, int max_planes, char** out_json);

/* Split verdict with per-plane certificates. */
int tq_split_verdict(const tq_action* action, char** out_json);

/* Stratification table and singular-set dimension. */
int tq_strata(const tq_action* action, int max_planes, char** out_json);

/* Local reduction (S, Gamma) for split actions; {"reducible": false} with
 * the witness plane otherwise. Runs the sampled isometry check when the
 * spec carries a "pairs" section. */
int tq_reduce(const tq_action* action, double tol, char** out_json);

/* Curvature ray scan as CSV (requires the action spec's "scan" section). On a
 * numerical failure along the ray the CSV is still produced with a named
 * "# error,..." row and the return value is TQ_ERR_NUMERICAL. */
int tq_curvature_scan(const tq_action* action, double tol, char** out_csv);

/* Reflections, mirrors, chamber count and codimension-2 count. */
int tq_reflect(const tq_group* group, double tol, char** out_json);

/* Orthogonal conjugacy of two groups. "inconclusive" (budget exhausted) is
 * a result: the return value is TQ_OK with the status in the JSON. */
int tq_conjugacy(const tq_group* g1, const tq_group* g2, long long budget, double tol,
                 char** out_json);

/* --- quotient distances -------------------------------------------------- */

/* min over group elements g of |x - g y|; len must equal the group dim. */
int tq_distance_finite(const tq_group* group, const double* x, const double* y, int len,
                       double* out_value);

/* Certified quotient distance for the action (torus and finite part); len
 * must equal the ambient dimension 2n + f. JSON carries value, certified
 * gap, the minimizing angles and the finite element index. */
int tq_distance_torus(const tq_action* action, const double* x, const double* y, int len,
                      int grid, int refinements, double gap_tol, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* TORQUOT_H */
