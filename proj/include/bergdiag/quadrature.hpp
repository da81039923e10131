#pragma once

#include <span>
#include <vector>

#include "bergdiag/function_expr.hpp"
#include "bergdiag/geometry.hpp"

namespace bergdiag::quadrature {

// Gauss-Legendre nodes/weights on [-1, 1]; cached per order.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussRule& gauss_legendre(int order);

struct QuadConfig {
  double abs_tol = 1e-9;
  double rel_tol = 1e-6;
  int max_depth = 26;
  int gauss_order = 12;
  double boundary_cell_limit = 1e-3;  // minimum straddle-cell diameter
  long max_cells = 500'000;

  void validate() const;
};

struct IntegralResult {
  double value = 0;
  double error_estimate = 0;
  long cells_used = 0;
  double boundary_fraction = 0;   // straddle-leaf area / total contributing area
  bool tolerance_reached = true;  // false: best value returned with flag
};

// Integral of |f|^2 over the implicit domain d by adaptive quadtree
// subdivision. Cells entirely inside use tensor Gauss; straddling cells
// subdivide until boundary_cell_limit, then are scored by exact polygon
// clipping (polygonal domains) or 16x16 midpoint subsampling.
// Throws singularity_in_domain when a pole of f lies in the closure of d.
IntegralResult bergman_norm_sq(const FunctionExpr& f, const geometry::Domain& d,
                               const QuadConfig& cfg = {});

// Same integral over d minus the exclusion disk; every singularity of f must
// lie inside the exclusion.
IntegralResult truncated_norm_sq(const FunctionExpr& f, const geometry::Domain& d,
                                 Complex exclusion_center, double exclusion_radius,
                                 const QuadConfig& cfg = {});

// Closed form of  int chi_{D_x}(z) (x^2/2 - |z-x|^2)^{-1/2} dx  over
// [lower, upper]:  sqrt2 (asin y(u2) - asin y(u1)), y(x) = 2(x-x1)/(x2-x1)-1,
// limits clipped to the root interval. Over the full interval the value is
// sqrt2 * pi independently of z.
double kernel_line_integral(Complex z, double lower, double upper);

// Both sides of the weighted-disk identity for a polynomial g = sum g_n u^n:
// coefficient sum  sum w_n |g_n|^2  and the polar quadrature of
// int_D |g|^2 (1-|u|^2)^{-1/2} dA/(2pi). The endpoint singularity is removed
// analytically by the substitution s = sqrt(1-r^2).
struct WeightedDiskNorm {
  double coefficient_sum = 0;
  double quadrature = 0;
};

WeightedDiskNorm weighted_disk_norm_sq(std::span<const Complex> g_coeffs);

}  // namespace bergdiag::quadrature
