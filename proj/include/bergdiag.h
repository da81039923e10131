/* bergdiag C API: numerical Bergman-norm and diagonal derivative-series
 * toolkit for the unit-square / sector geometry.
 *
 * Conventions:
 *   - every fallible call returns a bd_status; BD_OK is 0;
 *   - bd_last_error() returns a thread-local message for the last failure;
 *   - objects are opaque handles released with the matching bd_*_free;
 *   - complex numbers travel as (re, im) double pairs; coefficient arrays
 *     are interleaved re,im,re,im,...
 */
#ifndef BERGDIAG_H
#define BERGDIAG_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bd_status {
  BD_OK = 0,
  BD_ERR_INVALID_ARGUMENT,
  BD_ERR_PARSE,
  BD_ERR_SINGULARITY_TOO_CLOSE,
  BD_ERR_SINGULARITY_IN_DOMAIN,
  BD_ERR_DIVISION_BY_ZERO_JET,
  BD_ERR_OUTSIDE_SECTOR,
  BD_ERR_EMPTY_INTERSECTION,
  BD_ERR_OUTSIDE_RANGE,
  BD_ERR_SERIES_NOT_CONVERGED,
  BD_ERR_DEGENERATE_JET,
  BD_ERR_OUTSIDE_ATLAS,
  BD_ERR_SLOW_CONVERGENCE,
  BD_ERR_INCONSISTENT_OVERLAP,
  BD_ERR_CROSSING_MISMATCH,
  BD_ERR_UNKNOWN_EXPERIMENT,
  BD_ERR_IO,
  BD_ERR_INTERNAL
} bd_status;

const char* bd_status_name(bd_status status);
/* Message of the most recent failure on this thread ("" if none). */
const char* bd_last_error(void);

/* ------------------------------------------------------------- special */

/* w_n = 2^{2n}(n!)^2/(2n+1)!; returns NaN on invalid n. */
double bd_weight_w(int n);
/* Gamma(n + 1/2); returns NaN on invalid n. */
double bd_gamma_half_integer(int n);
/* w_n * sqrt(n+1); tends to sqrt(pi)/2. Returns NaN on invalid n. */
double bd_asymptotic_ratio(int n);
/* Fills log c_n and log w_n for n = 0..n_max (arrays of n_max+1 doubles). */
bd_status bd_coefficient_table(int n_max, double* log_c, double* log_w);

/* ------------------------------------------------------------ geometry */

typedef struct bd_domain bd_domain;

/* Spec strings: "square", "omega", "sector <xmax>", "disk <re> <im> <r>",
 * "unit-disk", "omega-a <a>", "ellipse-q <q>", "omega-q <q>",
 * "omega-q-rot <q>". */
bd_status bd_domain_create(const char* spec, bd_domain** out);
void bd_domain_free(bd_domain* d);
/* 1 if the point belongs to the open domain, 0 otherwise. */
int bd_domain_contains(const bd_domain* d, double re, double im);
bd_status bd_domain_bbox(const bd_domain* d, double* xmin, double* xmax, double* ymin,
                         double* ymax);
/* Boundary polylines as CSV ("x,y" rows, blank-line-separated components);
 * caller frees with bd_string_free. */
bd_status bd_domain_boundary_csv(const bd_domain* d, int arc_samples, char** csv_out);

/* Roots x1 <= x2 of x^2 - 4x Re z + 2|z|^2 (membership interval of the
 * disk family D(x, x/sqrt2)). */
bd_status bd_disk_roots(double re, double im, double* x1, double* x2);
/* h(x) = x^2/2 - |z - x|^2 (positive inside D(x, x/sqrt2)). */
double bd_kernel_h(double re, double im, double x);
/* Grid scan: how many interior points of the square (margin from the
 * boundary) escape OmegaQ ∪ rotated OmegaQ, and how many escape Omega. */
bd_status bd_coverage_scan(double q, double step, double margin, int threads,
                           long long* tested, long long* uncovered,
                           long long* omega_uncovered);
/* r^a_{1/2} = a/(2 sqrt(1+a^2)) and gap = 1/2 - r (positive for all a >= 1). */
bd_status bd_omega_a_gap(double a, double* radius_at_half, double* gap);
/* y(1/2)+1 margin of the lower-bound argument; requires Re z in (1/4,1/2). */
bd_status bd_prop2_margin(double re, double im, double q, double* margin);

/* ------------------------------------------------------- test functions */

typedef struct bd_function bd_function;

/* Prefix grammar, e.g. "pole -1 2", "sum (poly 1 0 2) (exp 1)". */
bd_status bd_function_parse(const char* text, bd_function** out);
void bd_function_free(bd_function* f);
bd_status bd_function_eval(const bd_function* f, double re, double im, double* out_re,
                           double* out_im);
/* coeffs: interleaved array of 2*(order+1) doubles; coefficient n is
 * f^(n)(center)/n! * scale^n. */
bd_status bd_function_jet(const bd_function* f, double re, double im, int order, double scale,
                          double* coeffs);
bd_status bd_function_derivative(const bd_function* f, double re, double im, int n,
                                 double* out_re, double* out_im);

/* ----------------------------------------------------------- quadrature */

typedef struct bd_quad_options {
  double abs_tol;
  double rel_tol;
  int max_depth;
  int gauss_order;
  double boundary_cell_limit;
} bd_quad_options;

void bd_quad_options_default(bd_quad_options* opts);

typedef struct bd_integral {
  double value;
  double error_estimate;
  long cells_used;
  double boundary_fraction;
  int tolerance_reached;
} bd_integral;

/* Integral of |f|^2 over d (adaptive quadtree over the implicit domain). */
bd_status bd_bergman_norm_sq(const bd_function* f, const bd_domain* d,
                             const bd_quad_options* opts, bd_integral* out);
/* Same, over d minus the disk D(center, radius); all poles of f must lie
 * inside the exclusion. */
bd_status bd_truncated_norm_sq(const bd_function* f, const bd_domain* d, double ex_re,
                               double ex_im, double ex_radius, const bd_quad_options* opts,
                               bd_integral* out);
/* Closed-form line integral of (x^2/2-|z-x|^2)^{-1/2} over
 * [lower,upper] ∩ root interval; sqrt(2) pi over the full interval. */
bd_status bd_kernel_line_integral(double re, double im, double lower, double upper,
                                  double* out);
/* Both sides of the weighted-disk identity for polynomial coefficients
 * (interleaved, n_coeffs complex entries). */
bd_status bd_weighted_disk_norm_sq(const double* coeffs, int n_coeffs, double* coefficient_sum,
                                   double* quadrature_value);

/* --------------------------------------------------------------- series */

typedef struct bd_series_options {
  int n_max;
  int tail_window;
  double tail_ratio_tol;
  double tail_rel_bound;
  int x_gauss_order;
  int x_panels;
} bd_series_options;

void bd_series_options_default(bd_series_options* opts);

typedef struct bd_series_result bd_series_result;

/* ghat(n) = (x/sqrt2)^n f^(n)(x)/n!. */
bd_status bd_ghat(const bd_function* f, double x, int n, double* out_re, double* out_im);
/* x * sum_n w_n |ghat(n)|^2. */
bd_status bd_pointwise(const bd_function* f, double x, const bd_series_options* opts,
                       double* value, int* n_used);
/* Half-line series sum_n c_n int_0^xmax x^{2n+1} |f^(n)(x)|^2 dx. */
bd_status bd_series_halfline(const bd_function* f, double x_max, const bd_series_options* opts,
                             bd_series_result** out);
/* One-diagonal interval sum over (0,1/2) with both endpoints' derivatives. */
bd_status bd_series_one_diagonal(const bd_function* f, const bd_series_options* opts,
                                 bd_series_result** out);
/* Two-diagonal sum of the norm equivalence. */
bd_status bd_series_two_diagonals(const bd_function* f, const bd_series_options* opts,
                                  bd_series_result** out);
/* Tabulated-jets variants: JSON in the TabulatedJets schema. */
bd_status bd_series_one_diagonal_tabulated(const char* jets_json, const bd_series_options* opts,
                                           bd_series_result** out);
bd_status bd_series_two_diagonals_tabulated(const char* jets_json, const bd_series_options* opts,
                                            bd_series_result** out);

double bd_series_value(const bd_series_result* r);
int bd_series_terms_used(const bd_series_result* r);
/* 1 when the tail criterion was met everywhere. */
int bd_series_truncation_ok(const bd_series_result* r);
/* Copies up to cap per-n contributions; returns the number written. */
int bd_series_copy_terms(const bd_series_result* r, double* buf, int cap);
void bd_series_result_free(bd_series_result* r);

/* ---------------------------------------------------------- reconstruct */

typedef struct bd_atlas bd_atlas;

/* Chebyshev grid of `grid_points` charts per diagonal with order-`order`
 * jets of f. */
bd_status bd_atlas_build(const bd_function* f, int order, int grid_points, bd_atlas** out);
/* Builds from a TabulatedJets JSON document (both diagonals required). */
bd_status bd_atlas_build_from_json(const char* jets_json, bd_atlas** out);
bd_status bd_atlas_extend(const bd_atlas* a, double re, double im, double* out_re,
                          double* out_im);
int bd_atlas_chart_count(const bd_atlas* a);
/* Worst observed chart-overlap and crossing disagreements (diagnostics). */
bd_status bd_atlas_diagnostics(const bd_atlas* a, double* overlap_disagreement,
                               double* crossing_disagreement);
void bd_atlas_free(bd_atlas* a);

/* Root-test radius estimate from an interleaved jet (n_coeffs complex
 * entries, order = n_coeffs-1 >= 8). Infinite for polynomial-like jets. */
bd_status bd_radius_estimate(const double* coeffs, int n_coeffs, double* out);

/* ---------------------------------------------------------- experiments */

/* Runs an experiment from a JSON spec, e.g.
 *   {"experiment":"verify-ahs","function":"pole -1 2","xmax":50}
 * and returns the JSON report (caller frees with bd_string_free).
 * Returns BD_OK even when the report's assertions fail; *passed reports
 * the outcome. Hard errors (bad spec, ...) return a status. */
bd_status bd_experiment_run(const char* spec_json, char** report_json, int* passed);

void bd_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* BERGDIAG_H */
