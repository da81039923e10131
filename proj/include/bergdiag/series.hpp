#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bergdiag/function_expr.hpp"

namespace bergdiag::series {

struct SeriesConfig {
  int n_max = 50000;             // series truncation cap
  int tail_window = 5;           // K consecutive terms for the ratio rule
  double tail_ratio_tol = 0.9;   // accept once ratios drop below this ...
  double tail_rel_bound = 1e-10; // ... and the geometric tail is this small
  int x_gauss_order = 16;
  int x_panels = 32;             // composite panels, geometrically refined toward 0
  double panel_ratio = 0.75;     // geometric panel growth away from 0

  void validate() const;
};

struct SeriesResult {
  double value = 0;
  std::vector<double> per_n_terms;  // value == sum of these (fixed order)
  bool truncation_ok = true;
  int n_used = 0;
};

// Tabulated jets on the two diagonals of the square: raw Taylor coefficients
// f^(n)(p)/n! of the holomorphic extension at each point, where the point is
// t on the horizontal diagonal and 1/2 + i(t - 1/2) on the vertical one.
struct TabulatedJets {
  struct Point {
    double t = 0;                  // arc position in (0,1)
    std::vector<Complex> coeffs;   // a_0 .. a_N
  };
  std::vector<Point> horizontal;
  std::vector<Point> vertical;
};

// Diagonal data source: a symbolic function or tabulated jets.
using DiagonalData = std::variant<FunctionExpr, TabulatedJets>;

// ghat(n) = (x/sqrt2)^n f^(n)(x)/n!: the n-th Taylor coefficient of f
// precomposed with the affine map of the unit disk onto D(x, x/sqrt2).
Complex ghat(const FunctionExpr& f, double x, int n);

// x * sum_n w_n |ghat(n)|^2 : the weighted-disk norm of f on D_x times x.
// Throws series_not_converged when the tail rule fails through n_max.
double ahs_pointwise(const FunctionExpr& f, double x, const SeriesConfig& cfg = {});

// sum_n c_n int_0^{x_max} x^{2n+1} |f^(n)(x)|^2 dx, computed pointwise-first
// (one scaled jet per x node yields all n) and integrated by composite Gauss.
SeriesResult ahs_halfline(const FunctionExpr& f, double x_max, const SeriesConfig& cfg = {});

// One-diagonal interval sum: the same weight against
// |f^(n)(x)|^2 + |f^(n)(1-x)|^2 over (0, 1/2).
SeriesResult ahs_one_diagonal(const DiagonalData& data, const SeriesConfig& cfg = {});

// Two-diagonal sum of the norm equivalence: adds the vertical-diagonal terms
// |f^(n)(1/2 + i(1/2-x))|^2 + |f^(n)(1/2 + i(x-1/2))|^2. Derivatives on the
// vertical diagonal are complex derivatives of the holomorphic extension.
SeriesResult ahs_two_diagonals(const DiagonalData& data, const SeriesConfig& cfg = {});

// y(1/2) + 1 = (1/2 - x1)/sqrt(2(a^2-b^2)): the margin by which the root
// interval of z reaches below 1/2; certifies the uniform lower-bound constant.
// Requires q in (0,8), Re z in (1/4, 1/2), z in Omega inside the open sector.
double prop2_margin(Complex z, double q);

// Per-term diagnostics of the counterexample bound: largest observed
// consecutive-term ratio at each x node (compared against 2x in tests).
struct NodeDiagnostics {
  double x = 0;
  double max_tail_ratio = 0;
  int n_used = 0;
};

struct DiagnosedResult {
  SeriesResult result;
  std::vector<NodeDiagnostics> nodes;
};

DiagnosedResult ahs_one_diagonal_diagnosed(const DiagonalData& data, const SeriesConfig& cfg = {});

}  // namespace bergdiag::series
