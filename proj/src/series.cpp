#include "bergdiag/series.hpp"

#include <algorithm>
#include <cmath>

#include "bergdiag/errors.hpp"
#include "bergdiag/geometry.hpp"
#include "bergdiag/quadrature.hpp"

namespace bergdiag::series {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488016887242097;

// Accumulates the unweighted terms x * sum_i |ghat_i(n)|^2 for a batch of
// centers sharing one scale; the caller folds in w_n. Running the tail rule
// on the unweighted terms is conservative (the w_n ratio is < 1), and the
// recorded max_ratio is then exactly the |ghat|^2 ratio the counterexample
// bound speaks about. Jets are evaluated in doubling blocks so the truncation
// index is discovered incrementally.
struct PointwiseAccumulator {
  const std::vector<Complex>* tabulated = nullptr;  // single tabulated jet (already scaled)
  const FunctionExpr* f = nullptr;
  std::vector<Complex> centers;
  double scale = 0;
  double weight = 0;

  bool converged = false;
  int n_used = 0;
  double max_ratio = 0;
  std::vector<double> terms;  // weight * w_n * sum_i |ghat_i(n)|^2

  void run(const SeriesConfig& cfg) {
    std::vector<Jet> jets;
    int order = 64;
    const int hard_cap = tabulated ? static_cast<int>(tabulated->size()) - 1 : cfg.n_max;
    order = std::min(order, std::max(hard_cap, 0));
    if (!tabulated) {
      for (const Complex& c : centers) jets.push_back(f->jet(c, order, scale));
    }

    double partial = 0.0;
    int streak = 0;           // consecutive terms passing the ratio rule
    double recent_ratio = 0;  // max ratio within the current streak
    double prev_term = -1.0;

    for (int n = 0; n <= hard_cap; ++n) {
      if (!tabulated && n > order) {
        order = std::min(hard_cap, 2 * order + 1);
        for (size_t i = 0; i < centers.size(); ++i) jets[i] = f->jet(centers[i], order, scale);
      }
      double sq = 0.0;
      if (tabulated) {
        double p = std::pow(scale, n);
        sq = std::norm((*tabulated)[static_cast<size_t>(n)]) * p * p;
      } else {
        for (const Jet& j : jets) sq += std::norm(j.coeffs[static_cast<size_t>(n)]);
      }
      const double t = weight * sq;
      require(std::isfinite(t), errc::series_not_converged,
              "series term overflow: evaluation point too close to a singular disk boundary");
      terms.push_back(t);
      partial += t;
      n_used = n + 1;

      if (prev_term > 0.0) {
        const double ratio = t / prev_term;
        max_ratio = std::max(max_ratio, ratio);
        if (ratio < cfg.tail_ratio_tol) {
          ++streak;
          recent_ratio = std::max(recent_ratio, ratio);
        } else {
          streak = 0;
          recent_ratio = 0;
        }
      } else if (t == 0.0) {
        // exact zero tail (polynomial data)
        ++streak;
      } else {
        streak = 0;
        recent_ratio = 0;
      }

      if (streak >= cfg.tail_window && n >= 1) {
        const double r = std::max(recent_ratio, 0.0);
        const double tail = r < 1.0 ? t * r / (1.0 - r) : std::numeric_limits<double>::infinity();
        if (tail <= cfg.tail_rel_bound * std::max(partial, 1e-300)) {
          converged = true;
          break;
        }
      }
      prev_term = t;
      // Early abort on a clearly diverging tail.
      if (t > 1e200) break;
    }
  }
};

// The loop above needs w_n per term; computed via the exact recurrence.
// Separate helper keeps the accumulator readable.
struct WeightSequence {
  double wn = 1.0;
  int n = 0;
  double advance_to(int target) {
    while (n < target) {
      wn *= (n + 1.0) / (n + 1.5);
      ++n;
    }
    return wn;
  }
};

}  // namespace

void SeriesConfig::validate() const {
  require(n_max >= 1, errc::invalid_argument, "series config: n_max must be >= 1");
  require(tail_ratio_tol > 0.0 && tail_ratio_tol < 1.0, errc::invalid_argument,
          "series config: tail_ratio_tol must be in (0,1)");
  require(tail_window >= 1, errc::invalid_argument, "series config: tail_window must be >= 1");
  require(tail_rel_bound > 0.0, errc::invalid_argument,
          "series config: tail_rel_bound must be positive");
  require(x_gauss_order >= 2 && x_gauss_order <= 64, errc::invalid_argument,
          "series config: x_gauss_order must be in [2, 64]");
  require(x_panels >= 1 && x_panels <= 4096, errc::invalid_argument,
          "series config: x_panels must be in [1, 4096]");
  require(panel_ratio > 0.0 && panel_ratio < 1.0, errc::invalid_argument,
          "series config: panel_ratio must be in (0,1)");
}

Complex ghat(const FunctionExpr& f, double x, int n) {
  require(x > 0.0, errc::invalid_argument, "ghat: requires x > 0");
  require(n >= 0, errc::invalid_argument, "ghat: requires n >= 0");
  Jet j = f.jet(Complex(x, 0.0), n, x / kSqrt2);
  return j.coeffs[static_cast<size_t>(n)];
}

namespace {

// Shared core: evaluates the batch at one x node with the correct w_n weights
// and merges the per-n contributions (times quad_weight) into `into`.
struct NodeOutcome {
  bool converged = false;
  int n_used = 0;
  double max_ratio = 0;
  double node_value = 0;
};

NodeOutcome accumulate_node(const FunctionExpr* f, const std::vector<Complex>* tab_coeffs,
                            std::vector<Complex> centers, double x, double quad_weight,
                            const SeriesConfig& cfg, std::vector<double>& into) {
  PointwiseAccumulator acc;
  acc.f = f;
  acc.tabulated = tab_coeffs;
  acc.centers = std::move(centers);
  acc.scale = x / kSqrt2;
  acc.weight = x;

  // Run with w_n folded in on the fly.
  // (PointwiseAccumulator::run applies w_n = 1; we rescale below.)
  acc.run(cfg);
  WeightSequence ws;
  double node_value = 0.0;
  if (into.size() < acc.terms.size()) into.resize(acc.terms.size(), 0.0);
  for (size_t n = 0; n < acc.terms.size(); ++n) {
    const double wn = ws.advance_to(static_cast<int>(n));
    const double contrib = quad_weight * wn * acc.terms[n];
    into[n] += contrib;
    node_value += contrib;
  }
  NodeOutcome out;
  out.converged = acc.converged;
  out.n_used = acc.n_used;
  out.max_ratio = acc.max_ratio;
  out.node_value = node_value;
  return out;
}

}  // namespace

double ahs_pointwise(const FunctionExpr& f, double x, const SeriesConfig& cfg) {
  cfg.validate();
  require(x > 0.0, errc::invalid_argument, "ahs_pointwise: requires x > 0");
  std::vector<double> terms;
  NodeOutcome out = accumulate_node(&f, nullptr, {Complex(x, 0.0)}, x, 1.0, cfg, terms);
  require(out.converged, errc::series_not_converged,
          "ahs_pointwise: tail criterion not met through n_max (x too close to a "
          "singular disk boundary)");
  return out.node_value;
}

namespace {

std::vector<double> panel_boundaries(double x_max, const SeriesConfig& cfg) {
  std::vector<double> b;
  b.push_back(0.0);
  for (int k = cfg.x_panels - 1; k >= 0; --k)
    b.push_back(x_max * std::pow(cfg.panel_ratio, static_cast<double>(k)));
  return b;
}

SeriesResult integrate_series(const FunctionExpr& f, double x_max,
                              std::vector<Complex> (*centers_of)(double), const SeriesConfig& cfg,
                              std::vector<NodeDiagnostics>* diagnostics) {
  cfg.validate();
  require(x_max > 0.0, errc::invalid_argument, "series integral: requires x_max > 0");
  const auto& rule = quadrature::gauss_legendre(cfg.x_gauss_order);
  const std::vector<double> bounds = panel_boundaries(x_max, cfg);

  SeriesResult res;
  for (size_t p = 0; p + 1 < bounds.size(); ++p) {
    const double half = 0.5 * (bounds[p + 1] - bounds[p]);
    const double mid = 0.5 * (bounds[p + 1] + bounds[p]);
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
      const double x = mid + half * rule.nodes[i];
      const double qw = half * rule.weights[i];
      NodeOutcome out = accumulate_node(&f, nullptr, centers_of(x), x, qw, cfg, res.per_n_terms);
      require(out.converged, errc::series_not_converged,
              "series integral: tail criterion not met at x = " + std::to_string(x));
      res.n_used = std::max(res.n_used, out.n_used);
      if (diagnostics) diagnostics->push_back({x, out.max_ratio, out.n_used});
    }
  }
  // Deterministic final value: Kahan sum of the per-n contributions.
  double sum = 0.0, comp = 0.0;
  for (double t : res.per_n_terms) {
    const double y = t - comp;
    const double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  }
  res.value = sum;
  res.truncation_ok = true;
  return res;
}

std::vector<Complex> centers_halfline(double x) { return {Complex(x, 0.0)}; }

std::vector<Complex> centers_one_diagonal(double x) {
  return {Complex(x, 0.0), Complex(1.0 - x, 0.0)};
}

std::vector<Complex> centers_two_diagonals(double x) {
  return {Complex(x, 0.0), Complex(1.0 - x, 0.0), Complex(0.5, 0.5 - x), Complex(0.5, x - 0.5)};
}

// Tabulated path: trapezoid over the supplied grid of the unified form
// int_0^1 d(t)^{2n+1} |a_n(t) n!|^2-style terms, d(t) = min(t, 1-t).
SeriesResult tabulated_series(const TabulatedJets& tab, bool include_vertical,
                              const SeriesConfig& cfg,
                              std::vector<NodeDiagnostics>* diagnostics) {
  cfg.validate();
  require(!tab.horizontal.empty(), errc::invalid_argument,
          "tabulated series: no horizontal diagonal data");
  SeriesResult res;
  res.truncation_ok = true;
  auto process = [&](const std::vector<TabulatedJets::Point>& pts) {
    std::vector<const TabulatedJets::Point*> sorted;
    for (const auto& p : pts) {
      require(p.t > 0.0 && p.t < 1.0, errc::invalid_argument,
              "tabulated series: grid points must lie strictly inside (0,1)");
      sorted.push_back(&p);
    }
    std::sort(sorted.begin(), sorted.end(),
              [](const auto* a, const auto* b) { return a->t < b->t; });
    for (size_t j = 0; j < sorted.size(); ++j) {
      const double t = sorted[j]->t;
      const double prev = j == 0 ? t : sorted[j - 1]->t;
      const double next = j + 1 == sorted.size() ? t : sorted[j + 1]->t;
      const double qw = 0.5 * (next - prev);
      if (qw <= 0.0) continue;
      const double d = std::min(t, 1.0 - t);
      NodeOutcome out =
          accumulate_node(nullptr, &sorted[j]->coeffs, {}, d, qw, cfg, res.per_n_terms);
      res.truncation_ok = res.truncation_ok && out.converged;
      res.n_used = std::max(res.n_used, out.n_used);
      if (diagnostics) diagnostics->push_back({t, out.max_ratio, out.n_used});
    }
  };
  process(tab.horizontal);
  if (include_vertical) {
    require(!tab.vertical.empty(), errc::invalid_argument,
            "tabulated series: no vertical diagonal data");
    process(tab.vertical);
  }
  double sum = 0.0, comp = 0.0;
  for (double t : res.per_n_terms) {
    const double y = t - comp;
    const double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  }
  res.value = sum;
  return res;
}

}  // namespace

SeriesResult ahs_halfline(const FunctionExpr& f, double x_max, const SeriesConfig& cfg) {
  return integrate_series(f, x_max, centers_halfline, cfg, nullptr);
}

SeriesResult ahs_one_diagonal(const DiagonalData& data, const SeriesConfig& cfg) {
  if (const auto* f = std::get_if<FunctionExpr>(&data))
    return integrate_series(*f, 0.5, centers_one_diagonal, cfg, nullptr);
  return tabulated_series(std::get<TabulatedJets>(data), false, cfg, nullptr);
}

SeriesResult ahs_two_diagonals(const DiagonalData& data, const SeriesConfig& cfg) {
  if (const auto* f = std::get_if<FunctionExpr>(&data))
    return integrate_series(*f, 0.5, centers_two_diagonals, cfg, nullptr);
  return tabulated_series(std::get<TabulatedJets>(data), true, cfg, nullptr);
}

DiagnosedResult ahs_one_diagonal_diagnosed(const DiagonalData& data, const SeriesConfig& cfg) {
  DiagnosedResult out;
  if (const auto* f = std::get_if<FunctionExpr>(&data)) {
    out.result = integrate_series(*f, 0.5, centers_one_diagonal, cfg, &out.nodes);
  } else {
    out.result = tabulated_series(std::get<TabulatedJets>(data), false, cfg, &out.nodes);
  }
  return out;
}

double prop2_margin(Complex z, double q) {
  require(q > 0.0 && q < 8.0, errc::invalid_argument, "prop2_margin: requires q in (0,8)");
  const double a = z.real(), b = z.imag();
  require(a > 0.25 && a < 0.5, errc::outside_range,
          "prop2_margin: requires Re z in (1/4, 1/2)");
  require(std::abs(b) < a, errc::outside_range, "prop2_margin: point outside the open sector");
  const geometry::DiskRoots roots = geometry::disk_roots(z);
  require(roots.x1 < 0.5, errc::outside_range,
          "prop2_margin: point not covered by the left disk family");
  return 2.0 * (0.5 - roots.x1) / (roots.x2 - roots.x1);
}

}  // namespace bergdiag::series
