/* C interface to the sparsity-invariance toolkit. Every function returns a
 * status code; 0 means success. Outputs are written through pointers and own
 * their memory: release strings with sisyn_string_free, double buffers with
 * sisyn_buffer_free, patterns with sisyn_pattern_free / sisyn_pattern_list_free.
 * On failure the thread-local message from sisyn_last_error() explains why. */
#ifndef SISYN_H
#define SISYN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes (mirrored by the CLI exit codes). */
#define SISYN_OK 0
#define SISYN_INFEASIBLE 2 /* well-posed problem, negative outcome */
#define SISYN_INVALID 3    /* bad arguments, malformed input, failed precondition */
#define SISYN_NUMERIC 4    /* numerical breakdown, retry exhaustion, budget exceeded */

/* Message describing the most recent failure on this thread; never NULL. */
const char* sisyn_last_error(void);

void sisyn_string_free(char* s);
void sisyn_buffer_free(double* buf);

/* ---- boolean patterns ---- */

typedef struct sisyn_pattern sisyn_pattern;

/* row_major holds rows*cols entries, nonzero = 1. */
int sisyn_pattern_create(int rows, int cols, const uint8_t* row_major, sisyn_pattern** out);
int sisyn_pattern_parse(const char* text, sisyn_pattern** out);
int sisyn_pattern_read_file(const char* path, sisyn_pattern** out);
int sisyn_pattern_write_file(const sisyn_pattern* pat, const char* path);
int sisyn_pattern_format(const sisyn_pattern* pat, char** out_text);
int sisyn_pattern_dims(const sisyn_pattern* pat, int* rows, int* cols);
/* out_row_major must hold rows*cols bytes. */
int sisyn_pattern_data(const sisyn_pattern* pat, uint8_t* out_row_major);
void sisyn_pattern_free(sisyn_pattern* pat);
void sisyn_pattern_list_free(sisyn_pattern** list, size_t count);

/* Algorithm 1: the maximal R with R >= I and T R^(p-1) <= T. */
int sisyn_r_star(const sisyn_pattern* t, sisyn_pattern** out);

/* Sparsity-invariance test; *holds gets 1 or 0. When it fails, triple gets a
 * violating (i, j, k); otherwise (-1, -1, -1). triple may be NULL. */
int sisyn_si_check(const sisyn_pattern* t, const sisyn_pattern* r, const sisyn_pattern* s,
                   int* holds, int triple[3]);

/* Quadratic-invariance test S delta S <= S; *holds gets 1 or 0. */
int sisyn_qi_check(const sisyn_pattern* s, const sisyn_pattern* delta, int* holds);

/* Least QI superset of S. */
int sisyn_qi_superset(const sisyn_pattern* s, const sisyn_pattern* delta, sisyn_pattern** out);

/* Nearest QI subsets of S (first nonempty distance class, lexicographic).
 * budget 0 selects the default candidate cap (10^6, overridable through the
 * SI_SYNTH_MAX_SUBSET_CANDIDATES environment variable); exceeding it returns
 * SISYN_NUMERIC. count may be 0 with *out = NULL when no subset exists. */
int sisyn_qi_subsets(const sisyn_pattern* s, const sisyn_pattern* delta, int max_dist,
                     uint64_t budget, sisyn_pattern*** out, size_t* count);

/* ---- constructive witnesses ---- */

/* Invertible X in Sparse(R) with Struct(X^-1) exactly R^(p-1); *x gets a
 * malloc'd n*n row-major buffer, *n the side length. */
int sisyn_witness_inverse(const sisyn_pattern* r, uint64_t seed, double** x, int* n);

/* For a triple failing the SI test: Y in Sparse(T), invertible X in Sparse(R)
 * with Struct(Y X^-1) escaping S. Returns SISYN_INVALID if SI actually holds.
 * *y is m*p row-major, *x is p*p row-major. */
int sisyn_witness_counterexample(const sisyn_pattern* t, const sisyn_pattern* r,
                                 const sisyn_pattern* s, uint64_t seed, double** y, double** x,
                                 int* m, int* p);

/* ---- synthesis ---- */

/* problem_json follows the problem schema (see README). The canonical report
 * JSON is always produced when the program parses; the status is
 * SISYN_INFEASIBLE for an infeasible program and SISYN_NUMERIC when the
 * solution failed a verification check. */
int sisyn_synth_json(const char* problem_json, char** report_json);
int sisyn_synth_file(const char* path, char** report_json);

/* Horizon sweep over the same problem schema; horizons must be strictly
 * increasing positives. */
int sisyn_sweep_json(const char* problem_json, const int* horizons, size_t count,
                     char** table_json);

/* ---- reproductions ---- */

/* variant: "si", "qi-subset" or "superset". Status SISYN_OK when the pinned
 * criterion passes ("qi-subset" passes with SISYN_INFEASIBLE instead, since
 * blanket infeasibility is the expected outcome); SISYN_NUMERIC otherwise.
 * The JSON report is produced in every case. */
int sisyn_repro_example1(const char* variant, char** report_json);

int sisyn_repro_lqr(int size, uint64_t seed, char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* SISYN_H */
