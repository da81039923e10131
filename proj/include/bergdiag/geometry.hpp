#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bergdiag/jet.hpp"

namespace bergdiag::geometry {

struct Rect {
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }
};

// Roots of x^2 - 4x Re z + 2|z|^2: z lies in the disk D(x, x/sqrt2) exactly
// for x in (x1, x2). Real roots exist iff |Im z| <= Re z.
struct DiskRoots {
  double x1 = 0, x2 = 0;
};

// Throws outside_sector when Re z <= 0 or |Im z| > Re z.
DiskRoots disk_roots(Complex z);

// h(x) = x^2/2 - |z - x|^2 = (x - x1)(x2 - x)/2; positive iff z in D(x, x/sqrt2).
double kernel_h(Complex z, double x);

// Planar domains of the construction: all memberships are open (strict
// inequalities); boundary behavior is irrelevant to the area integrals.
class Domain {
 public:
  enum class Kind {
    Sector,        // {0 < Re z < xmax, |Im z| < Re z}  (truncated at xmax)
    SquareD,       // open square with vertices 0, 1, 1/2 +- i/2
    Disk,          // D(center, radius)
    Rectangle,     // axis-aligned open rectangle
    Omega,         // union of D(x, x/sqrt2), x in (0,1/2], and its 1-z mirror
    OmegaA,        // same with disks D(x, x a/sqrt(1+a^2)), a >= 1
    EllipseQ,      // {q (x-1/2)^2 + (16-q) y^2 < 1}, q in (0,8)
    OmegaQ,        // (Omega ∩ {Re<1/4}) ∪ (Omega ∩ EllipseQ) ∪ (Omega ∩ {Re>3/4})
    OmegaQRot,     // OmegaQ rotated by pi/2 about 1/2
    Union,
    Intersection,
    Difference,
  };

  static Domain sector(double xmax);
  static Domain square_d();
  static Domain disk(Complex center, double radius);
  static Domain rectangle(Rect r);
  static Domain omega();
  static Domain omega_a(double a);
  static Domain ellipse_q(double q);
  static Domain omega_q(double q);
  static Domain omega_q_rotated(double q);
  static Domain union_of(Domain a, Domain b);
  static Domain intersection_of(Domain a, Domain b);
  static Domain difference(Domain a, Domain b);

  // Textual form used by the C API / CLI, e.g. "square", "omega",
  // "sector 50", "disk 0.5 0 0.25", "ellipse-q 4", "omega-q 4",
  // "omega-q-rot 4", "omega-a 2", "unit-disk".
  static Domain parse(const std::string& spec);
  std::string describe() const;

  Kind kind() const { return kind_; }
  bool contains(Complex z) const;
  const Rect& bbox() const { return bbox_; }

  // Exact inside-area fraction of an axis-aligned cell, available for
  // polygon-bounded kinds (sector, square, rectangle). nullopt otherwise.
  std::optional<double> clip_fraction(const Rect& cell) const;
  // Centroid of the clipped region (valid when clip_fraction applies and > 0).
  Complex clip_centroid(const Rect& cell) const;

  // Boundary polylines (one vector per component) for CSV export.
  std::vector<std::vector<Complex>> boundary_polylines(int samples_per_arc = 256) const;

  double param() const { return param_; }

 private:
  Domain() = default;
  Kind kind_ = Kind::SquareD;
  double param_ = 0;       // xmax / a / q / radius
  Complex center_{};       // disk center
  Rect bbox_{};
  std::vector<Domain> children_;
  // Convex polygon (ccw) for kinds supporting exact clipping.
  std::vector<Complex> polygon_;
};

// Grid scan of the open square D: counts interior grid points (margin away
// from the boundary) not covered by OmegaQ ∪ OmegaQRot, and the analogous
// count for Omega alone (expected non-empty: Omega is strictly smaller).
struct CoverageReport {
  long long tested = 0;
  long long uncovered = 0;
  long long omega_uncovered = 0;
  std::vector<Complex> uncovered_samples;  // at most 16, deterministic order
};

CoverageReport coverage_report(double q, double grid_step, double margin, int threads = 1);

// r^a_{1/2} = a/(2 sqrt(1+a^2)) and the gap 1/2 - r^a_{1/2} > 0: the largest
// disk of the Omega^a family never reaches the corner 1/2 + i/2.
struct OmegaAGap {
  double radius_at_half = 0;
  double gap = 0;
};

OmegaAGap omega_a_gap_check(double a);

}  // namespace bergdiag::geometry
