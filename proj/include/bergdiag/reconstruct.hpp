#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bergdiag/series.hpp"

namespace bergdiag::reconstruct {

// Root-test estimate 1/limsup |a_n|^{1/n} from the top half of the jet
// coefficients (least-squares slope of log|a_n| against n, zeros skipped).
// Polynomial-like jets return +infinity; an all-zero jet is degenerate_jet.
double radius_estimate(const Jet& jet);

// Per-n remainder bounds |R_n|^2 <= eps^{2n} (2n+3)! / ((n!)^2 (x0-eps)^{2n+3} 2^{n+1})
// times gamma_n. The bound sequence contracts geometrically exactly when
// eps < x0/(sqrt2 + 1).
std::vector<double> taylor_remainder_bound(double x0, double eps,
                                           std::span<const double> gamma_seq);

struct Chart {
  Complex center{};
  Jet jet;             // scale-1 Taylor coefficients at center
  double radius = 0;   // validity radius: min(0.8 * radius_estimate, geometric cap)
  bool vertical = false;
  double t = 0;        // arc position on its diagonal
};

struct ExtensionAtlas {
  std::vector<Chart> charts;
  Jet crossing_jet;            // shared germ at 1/2
  double crossing_disagreement = 0;  // worst relative coefficient mismatch observed
  double overlap_disagreement = 0;   // worst relative midpoint mismatch observed
};

struct ExtendStats {
  int chart_index = -1;
  int terms_used = 0;
  double tail_estimate = 0;
  std::optional<double> chart_discrepancy;  // vs second-best covering chart
};

// Chebyshev-distributed default grid on (0,1): denser near the endpoints
// where the disk radii shrink.
std::vector<double> chebyshev_grid(int count);

// Builds charts at the grid arc-positions on both diagonals, verifies that
// neighboring charts agree at midpoints (inconsistent_overlap otherwise) and
// that the two diagonals share a Taylor germ at 1/2 (crossing_mismatch).
ExtensionAtlas build_atlas(const series::DiagonalData& data, int order,
                           std::span<const double> grid);

// Evaluates the atlas at z from the best-conditioned covering chart
// (outside_atlas if none; slow_convergence if the series cannot certify
// 1e-9 relative truncation).
Complex extend(const ExtensionAtlas& atlas, Complex z, ExtendStats* stats = nullptr);

// TabulatedJets JSON: {"diagonal": "horizontal"|"vertical",
//                      "points": [{"t": .., "coeffs": [[re, im], ..]}, ..]}
// A file holds one such object or an array of them.
series::TabulatedJets tabulated_jets_from_json(const std::string& json_text);
std::string tabulated_jets_to_json(const series::TabulatedJets& tab);

}  // namespace bergdiag::reconstruct
