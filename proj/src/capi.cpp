#include "bergdiag.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include "bergdiag/errors.hpp"
#include "bergdiag/experiments.hpp"
#include "bergdiag/function_expr.hpp"
#include "bergdiag/geometry.hpp"
#include "bergdiag/quadrature.hpp"
#include "bergdiag/reconstruct.hpp"
#include "bergdiag/series.hpp"
#include "bergdiag/special.hpp"

using namespace bergdiag;

struct bd_domain {
  geometry::Domain domain;
};
struct bd_function {
  FunctionExpr expr;
};
struct bd_series_result {
  series::SeriesResult result;
};
struct bd_atlas {
  reconstruct::ExtensionAtlas atlas;
};

namespace {

thread_local std::string g_last_error;

bd_status map_code(errc code) {
  switch (code) {
    case errc::ok: return BD_OK;
    case errc::invalid_argument: return BD_ERR_INVALID_ARGUMENT;
    case errc::parse_error: return BD_ERR_PARSE;
    case errc::singularity_too_close: return BD_ERR_SINGULARITY_TOO_CLOSE;
    case errc::singularity_in_domain: return BD_ERR_SINGULARITY_IN_DOMAIN;
    case errc::division_by_zero_jet: return BD_ERR_DIVISION_BY_ZERO_JET;
    case errc::outside_sector: return BD_ERR_OUTSIDE_SECTOR;
    case errc::empty_intersection: return BD_ERR_EMPTY_INTERSECTION;
    case errc::outside_range: return BD_ERR_OUTSIDE_RANGE;
    case errc::series_not_converged: return BD_ERR_SERIES_NOT_CONVERGED;
    case errc::degenerate_jet: return BD_ERR_DEGENERATE_JET;
    case errc::outside_atlas: return BD_ERR_OUTSIDE_ATLAS;
    case errc::slow_convergence: return BD_ERR_SLOW_CONVERGENCE;
    case errc::inconsistent_overlap: return BD_ERR_INCONSISTENT_OVERLAP;
    case errc::crossing_mismatch: return BD_ERR_CROSSING_MISMATCH;
    case errc::unknown_experiment: return BD_ERR_UNKNOWN_EXPERIMENT;
    case errc::io_error: return BD_ERR_IO;
    case errc::internal: return BD_ERR_INTERNAL;
  }
  return BD_ERR_INTERNAL;
}

template <typename Fn>
bd_status guarded(Fn&& fn) {
  try {
    fn();
    return BD_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BD_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return BD_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

quadrature::QuadConfig to_config(const bd_quad_options* opts) {
  quadrature::QuadConfig cfg;
  if (opts) {
    cfg.abs_tol = opts->abs_tol;
    cfg.rel_tol = opts->rel_tol;
    cfg.max_depth = opts->max_depth;
    cfg.gauss_order = opts->gauss_order;
    cfg.boundary_cell_limit = opts->boundary_cell_limit;
  }
  return cfg;
}

series::SeriesConfig to_config(const bd_series_options* opts) {
  series::SeriesConfig cfg;
  if (opts) {
    cfg.n_max = opts->n_max;
    cfg.tail_window = opts->tail_window;
    cfg.tail_ratio_tol = opts->tail_ratio_tol;
    cfg.tail_rel_bound = opts->tail_rel_bound;
    cfg.x_gauss_order = opts->x_gauss_order;
    cfg.x_panels = opts->x_panels;
  }
  return cfg;
}

void fill(bd_integral* out, const quadrature::IntegralResult& r) {
  out->value = r.value;
  out->error_estimate = r.error_estimate;
  out->cells_used = r.cells_used;
  out->boundary_fraction = r.boundary_fraction;
  out->tolerance_reached = r.tolerance_reached ? 1 : 0;
}

bd_status require_c(bool ok, const char* msg) {
  if (!ok) {
    g_last_error = msg;
    return BD_ERR_INVALID_ARGUMENT;
  }
  return BD_OK;
}

}  // namespace

extern "C" {

const char* bd_status_name(bd_status status) {
  switch (status) {
    case BD_OK: return "ok";
    case BD_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case BD_ERR_PARSE: return "parse_error";
    case BD_ERR_SINGULARITY_TOO_CLOSE: return "singularity_too_close";
    case BD_ERR_SINGULARITY_IN_DOMAIN: return "singularity_in_domain";
    case BD_ERR_DIVISION_BY_ZERO_JET: return "division_by_zero_jet";
    case BD_ERR_OUTSIDE_SECTOR: return "outside_sector";
    case BD_ERR_EMPTY_INTERSECTION: return "empty_intersection";
    case BD_ERR_OUTSIDE_RANGE: return "outside_range";
    case BD_ERR_SERIES_NOT_CONVERGED: return "series_not_converged";
    case BD_ERR_DEGENERATE_JET: return "degenerate_jet";
    case BD_ERR_OUTSIDE_ATLAS: return "outside_atlas";
    case BD_ERR_SLOW_CONVERGENCE: return "slow_convergence";
    case BD_ERR_INCONSISTENT_OVERLAP: return "inconsistent_overlap";
    case BD_ERR_CROSSING_MISMATCH: return "crossing_mismatch";
    case BD_ERR_UNKNOWN_EXPERIMENT: return "unknown_experiment";
    case BD_ERR_IO: return "io_error";
    case BD_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* bd_last_error(void) { return g_last_error.c_str(); }

/* ------------------------------------------------------------- special */

double bd_weight_w(int n) {
  double out = std::numeric_limits<double>::quiet_NaN();
  guarded([&] { out = special::weight_w(n); });
  return out;
}

double bd_gamma_half_integer(int n) {
  double out = std::numeric_limits<double>::quiet_NaN();
  guarded([&] { out = special::gamma_half_integer(n); });
  return out;
}

double bd_asymptotic_ratio(int n) {
  double out = std::numeric_limits<double>::quiet_NaN();
  guarded([&] { out = special::asymptotic_ratio(n); });
  return out;
}

bd_status bd_coefficient_table(int n_max, double* log_c, double* log_w) {
  if (bd_status s = require_c(log_c && log_w, "bd_coefficient_table: null output")) return s;
  return guarded([&] {
    special::CoefficientTable table(n_max);
    for (int n = 0; n <= n_max; ++n) {
      log_c[n] = table.log_c(n);
      log_w[n] = table.log_w(n);
    }
  });
}

/* ------------------------------------------------------------ geometry */

bd_status bd_domain_create(const char* spec, bd_domain** out) {
  if (bd_status s = require_c(spec && out, "bd_domain_create: null argument")) return s;
  return guarded([&] { *out = new bd_domain{geometry::Domain::parse(spec)}; });
}

void bd_domain_free(bd_domain* d) { delete d; }

int bd_domain_contains(const bd_domain* d, double re, double im) {
  if (!d) return 0;
  return d->domain.contains(Complex(re, im)) ? 1 : 0;
}

bd_status bd_domain_bbox(const bd_domain* d, double* xmin, double* xmax, double* ymin,
                         double* ymax) {
  if (bd_status s = require_c(d && xmin && xmax && ymin && ymax, "bd_domain_bbox: null argument"))
    return s;
  const geometry::Rect& b = d->domain.bbox();
  *xmin = b.xmin;
  *xmax = b.xmax;
  *ymin = b.ymin;
  *ymax = b.ymax;
  return BD_OK;
}

bd_status bd_domain_boundary_csv(const bd_domain* d, int arc_samples, char** csv_out) {
  if (bd_status s = require_c(d && csv_out, "bd_domain_boundary_csv: null argument")) return s;
  return guarded([&] {
    std::string csv;
    char buf[64];
    for (const auto& line : d->domain.boundary_polylines(arc_samples)) {
      for (const Complex& p : line) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", p.real(), p.imag());
        csv += buf;
      }
      csv += "\n";
    }
    *csv_out = dup_string(csv);
    require(*csv_out != nullptr, errc::internal, "out of memory");
  });
}

bd_status bd_disk_roots(double re, double im, double* x1, double* x2) {
  if (bd_status s = require_c(x1 && x2, "bd_disk_roots: null output")) return s;
  return guarded([&] {
    const geometry::DiskRoots r = geometry::disk_roots(Complex(re, im));
    *x1 = r.x1;
    *x2 = r.x2;
  });
}

double bd_kernel_h(double re, double im, double x) {
  return geometry::kernel_h(Complex(re, im), x);
}

bd_status bd_coverage_scan(double q, double step, double margin, int threads, long long* tested,
                           long long* uncovered, long long* omega_uncovered) {
  if (bd_status s = require_c(tested && uncovered && omega_uncovered,
                              "bd_coverage_scan: null output"))
    return s;
  return guarded([&] {
    const geometry::CoverageReport rep = geometry::coverage_report(q, step, margin, threads);
    *tested = rep.tested;
    *uncovered = rep.uncovered;
    *omega_uncovered = rep.omega_uncovered;
  });
}

bd_status bd_omega_a_gap(double a, double* radius_at_half, double* gap) {
  if (bd_status s = require_c(radius_at_half && gap, "bd_omega_a_gap: null output")) return s;
  return guarded([&] {
    const geometry::OmegaAGap g = geometry::omega_a_gap_check(a);
    *radius_at_half = g.radius_at_half;
    *gap = g.gap;
  });
}

bd_status bd_prop2_margin(double re, double im, double q, double* margin) {
  if (bd_status s = require_c(margin != nullptr, "bd_prop2_margin: null output")) return s;
  return guarded([&] { *margin = series::prop2_margin(Complex(re, im), q); });
}

/* ------------------------------------------------------- test functions */

bd_status bd_function_parse(const char* text, bd_function** out) {
  if (bd_status s = require_c(text && out, "bd_function_parse: null argument")) return s;
  return guarded([&] { *out = new bd_function{FunctionExpr::parse(text)}; });
}

void bd_function_free(bd_function* f) { delete f; }

bd_status bd_function_eval(const bd_function* f, double re, double im, double* out_re,
                           double* out_im) {
  if (bd_status s = require_c(f && out_re && out_im, "bd_function_eval: null argument")) return s;
  return guarded([&] {
    const Complex v = f->expr.value(Complex(re, im));
    *out_re = v.real();
    *out_im = v.imag();
  });
}

bd_status bd_function_jet(const bd_function* f, double re, double im, int order, double scale,
                          double* coeffs) {
  if (bd_status s = require_c(f && coeffs, "bd_function_jet: null argument")) return s;
  return guarded([&] {
    const Jet j = f->expr.jet(Complex(re, im), order, scale);
    for (size_t k = 0; k < j.coeffs.size(); ++k) {
      coeffs[2 * k] = j.coeffs[k].real();
      coeffs[2 * k + 1] = j.coeffs[k].imag();
    }
  });
}

bd_status bd_function_derivative(const bd_function* f, double re, double im, int n,
                                 double* out_re, double* out_im) {
  if (bd_status s = require_c(f && out_re && out_im, "bd_function_derivative: null argument"))
    return s;
  return guarded([&] {
    const Complex v = f->expr.derivative(Complex(re, im), n);
    *out_re = v.real();
    *out_im = v.imag();
  });
}

/* ----------------------------------------------------------- quadrature */

void bd_quad_options_default(bd_quad_options* opts) {
  if (!opts) return;
  const quadrature::QuadConfig cfg;
  opts->abs_tol = cfg.abs_tol;
  opts->rel_tol = cfg.rel_tol;
  opts->max_depth = cfg.max_depth;
  opts->gauss_order = cfg.gauss_order;
  opts->boundary_cell_limit = cfg.boundary_cell_limit;
}

bd_status bd_bergman_norm_sq(const bd_function* f, const bd_domain* d,
                             const bd_quad_options* opts, bd_integral* out) {
  if (bd_status s = require_c(f && d && out, "bd_bergman_norm_sq: null argument")) return s;
  return guarded([&] { fill(out, quadrature::bergman_norm_sq(f->expr, d->domain, to_config(opts))); });
}

bd_status bd_truncated_norm_sq(const bd_function* f, const bd_domain* d, double ex_re,
                               double ex_im, double ex_radius, const bd_quad_options* opts,
                               bd_integral* out) {
  if (bd_status s = require_c(f && d && out, "bd_truncated_norm_sq: null argument")) return s;
  return guarded([&] {
    fill(out, quadrature::truncated_norm_sq(f->expr, d->domain, Complex(ex_re, ex_im), ex_radius,
                                            to_config(opts)));
  });
}

bd_status bd_kernel_line_integral(double re, double im, double lower, double upper, double* out) {
  if (bd_status s = require_c(out != nullptr, "bd_kernel_line_integral: null output")) return s;
  return guarded([&] { *out = quadrature::kernel_line_integral(Complex(re, im), lower, upper); });
}

bd_status bd_weighted_disk_norm_sq(const double* coeffs, int n_coeffs, double* coefficient_sum,
                                   double* quadrature_value) {
  if (bd_status s = require_c(coeffs && coefficient_sum && quadrature_value && n_coeffs > 0,
                              "bd_weighted_disk_norm_sq: bad arguments"))
    return s;
  return guarded([&] {
    std::vector<Complex> g(static_cast<size_t>(n_coeffs));
    for (int k = 0; k < n_coeffs; ++k) g[static_cast<size_t>(k)] = Complex(coeffs[2 * k], coeffs[2 * k + 1]);
    const quadrature::WeightedDiskNorm r = quadrature::weighted_disk_norm_sq(g);
    *coefficient_sum = r.coefficient_sum;
    *quadrature_value = r.quadrature;
  });
}

/* --------------------------------------------------------------- series */

void bd_series_options_default(bd_series_options* opts) {
  if (!opts) return;
  const series::SeriesConfig cfg;
  opts->n_max = cfg.n_max;
  opts->tail_window = cfg.tail_window;
  opts->tail_ratio_tol = cfg.tail_ratio_tol;
  opts->tail_rel_bound = cfg.tail_rel_bound;
  opts->x_gauss_order = cfg.x_gauss_order;
  opts->x_panels = cfg.x_panels;
}

bd_status bd_ghat(const bd_function* f, double x, int n, double* out_re, double* out_im) {
  if (bd_status s = require_c(f && out_re && out_im, "bd_ghat: null argument")) return s;
  return guarded([&] {
    const Complex v = series::ghat(f->expr, x, n);
    *out_re = v.real();
    *out_im = v.imag();
  });
}

bd_status bd_pointwise(const bd_function* f, double x, const bd_series_options* opts,
                       double* value, int* n_used) {
  if (bd_status s = require_c(f && value, "bd_pointwise: null argument")) return s;
  return guarded([&] {
    *value = series::ahs_pointwise(f->expr, x, to_config(opts));
    if (n_used) *n_used = 0;  // not tracked by the scalar entry point
  });
}

bd_status bd_series_halfline(const bd_function* f, double x_max, const bd_series_options* opts,
                             bd_series_result** out) {
  if (bd_status s = require_c(f && out, "bd_series_halfline: null argument")) return s;
  return guarded([&] {
    *out = new bd_series_result{series::ahs_halfline(f->expr, x_max, to_config(opts))};
  });
}

bd_status bd_series_one_diagonal(const bd_function* f, const bd_series_options* opts,
                                 bd_series_result** out) {
  if (bd_status s = require_c(f && out, "bd_series_one_diagonal: null argument")) return s;
  return guarded([&] {
    *out = new bd_series_result{series::ahs_one_diagonal(f->expr, to_config(opts))};
  });
}

bd_status bd_series_two_diagonals(const bd_function* f, const bd_series_options* opts,
                                  bd_series_result** out) {
  if (bd_status s = require_c(f && out, "bd_series_two_diagonals: null argument")) return s;
  return guarded([&] {
    *out = new bd_series_result{series::ahs_two_diagonals(f->expr, to_config(opts))};
  });
}

bd_status bd_series_one_diagonal_tabulated(const char* jets_json, const bd_series_options* opts,
                                           bd_series_result** out) {
  if (bd_status s = require_c(jets_json && out, "bd_series_one_diagonal_tabulated: null argument"))
    return s;
  return guarded([&] {
    series::DiagonalData data = reconstruct::tabulated_jets_from_json(jets_json);
    *out = new bd_series_result{series::ahs_one_diagonal(data, to_config(opts))};
  });
}

bd_status bd_series_two_diagonals_tabulated(const char* jets_json, const bd_series_options* opts,
                                            bd_series_result** out) {
  if (bd_status s = require_c(jets_json && out, "bd_series_two_diagonals_tabulated: null argument"))
    return s;
  return guarded([&] {
    series::DiagonalData data = reconstruct::tabulated_jets_from_json(jets_json);
    *out = new bd_series_result{series::ahs_two_diagonals(data, to_config(opts))};
  });
}

double bd_series_value(const bd_series_result* r) { return r ? r->result.value : 0.0; }

int bd_series_terms_used(const bd_series_result* r) { return r ? r->result.n_used : 0; }

int bd_series_truncation_ok(const bd_series_result* r) {
  return r && r->result.truncation_ok ? 1 : 0;
}

int bd_series_copy_terms(const bd_series_result* r, double* buf, int cap) {
  if (!r || !buf || cap <= 0) return 0;
  const int n = std::min<int>(cap, static_cast<int>(r->result.per_n_terms.size()));
  for (int k = 0; k < n; ++k) buf[k] = r->result.per_n_terms[static_cast<size_t>(k)];
  return n;
}

void bd_series_result_free(bd_series_result* r) { delete r; }

/* ---------------------------------------------------------- reconstruct */

bd_status bd_atlas_build(const bd_function* f, int order, int grid_points, bd_atlas** out) {
  if (bd_status s = require_c(f && out, "bd_atlas_build: null argument")) return s;
  return guarded([&] {
    const std::vector<double> grid = reconstruct::chebyshev_grid(grid_points);
    series::DiagonalData data = f->expr;
    *out = new bd_atlas{reconstruct::build_atlas(data, order, grid)};
  });
}

bd_status bd_atlas_build_from_json(const char* jets_json, bd_atlas** out) {
  if (bd_status s = require_c(jets_json && out, "bd_atlas_build_from_json: null argument"))
    return s;
  return guarded([&] {
    series::DiagonalData data = reconstruct::tabulated_jets_from_json(jets_json);
    *out = new bd_atlas{reconstruct::build_atlas(data, 8, {})};
  });
}

bd_status bd_atlas_extend(const bd_atlas* a, double re, double im, double* out_re,
                          double* out_im) {
  if (bd_status s = require_c(a && out_re && out_im, "bd_atlas_extend: null argument")) return s;
  return guarded([&] {
    const Complex v = reconstruct::extend(a->atlas, Complex(re, im));
    *out_re = v.real();
    *out_im = v.imag();
  });
}

int bd_atlas_chart_count(const bd_atlas* a) {
  return a ? static_cast<int>(a->atlas.charts.size()) : 0;
}

bd_status bd_atlas_diagnostics(const bd_atlas* a, double* overlap_disagreement,
                               double* crossing_disagreement) {
  if (bd_status s = require_c(a && overlap_disagreement && crossing_disagreement,
                              "bd_atlas_diagnostics: null argument"))
    return s;
  *overlap_disagreement = a->atlas.overlap_disagreement;
  *crossing_disagreement = a->atlas.crossing_disagreement;
  return BD_OK;
}

void bd_atlas_free(bd_atlas* a) { delete a; }

bd_status bd_radius_estimate(const double* coeffs, int n_coeffs, double* out) {
  if (bd_status s = require_c(coeffs && out && n_coeffs > 0, "bd_radius_estimate: bad arguments"))
    return s;
  return guarded([&] {
    Jet j(Complex(0, 0), n_coeffs - 1);
    for (int k = 0; k < n_coeffs; ++k)
      j.coeffs[static_cast<size_t>(k)] = Complex(coeffs[2 * k], coeffs[2 * k + 1]);
    *out = reconstruct::radius_estimate(j);
  });
}

/* ---------------------------------------------------------- experiments */

bd_status bd_experiment_run(const char* spec_json, char** report_json, int* passed) {
  if (bd_status s = require_c(spec_json && report_json, "bd_experiment_run: null argument"))
    return s;
  return guarded([&] {
    const experiments::Report rep = experiments::run_json(spec_json);
    *report_json = dup_string(rep.json());
    require(*report_json != nullptr, errc::internal, "out of memory");
    if (passed) *passed = rep.passed ? 1 : 0;
  });
}

void bd_string_free(char* s) { std::free(s); }

}  // extern "C"
