#include "bergdiag/reconstruct.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "bergdiag/errors.hpp"
#include "bergdiag/special.hpp"

namespace bergdiag::reconstruct {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488016887242097;
constexpr double kSafety = 0.8;
constexpr double kOverlapTol = 1e-6;
constexpr double kCrossingTol = 1e-6;
}  // namespace

double radius_estimate(const Jet& jet) {
  const int n = jet.order();
  require(n >= 8, errc::invalid_argument, "radius_estimate: jet order must be >= 8");
  bool any_nonzero = false;
  for (const Complex& c : jet.coeffs)
    if (std::abs(c) > 1e-300) {
      any_nonzero = true;
      break;
    }
  require(any_nonzero, errc::degenerate_jet, "radius_estimate: all coefficients vanish");

  // Least-squares slope of log|a_k| vs k over the top half, zeros ignored.
  std::vector<std::pair<double, double>> pts;
  for (int k = n / 2; k <= n; ++k) {
    const double m = std::abs(jet.coeffs[static_cast<size_t>(k)]);
    if (m > 1e-300) pts.emplace_back(static_cast<double>(k), std::log(m));
  }
  if (pts.size() < 2) return std::numeric_limits<double>::infinity();  // polynomial-like
  double sx = 0, sy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
  }
  const double mx = sx / pts.size(), my = sy / pts.size();
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx <= 0.0) return std::numeric_limits<double>::infinity();
  const double slope = sxy / sxx;
  return std::exp(-slope);
}

std::vector<double> taylor_remainder_bound(double x0, double eps,
                                           std::span<const double> gamma_seq) {
  require(x0 > 0.0, errc::invalid_argument, "taylor_remainder_bound: x0 must be positive");
  require(eps > 0.0 && eps < x0, errc::invalid_argument,
          "taylor_remainder_bound: requires 0 < eps < x0");
  constexpr double kLn2 = 0.6931471805599453094172321214581766;
  std::vector<double> bounds;
  bounds.reserve(gamma_seq.size());
  const double log_eps = std::log(eps);
  const double log_rest = std::log(x0 - eps);
  for (size_t n = 0; n < gamma_seq.size(); ++n) {
    require(gamma_seq[n] >= 0.0, errc::invalid_argument,
            "taylor_remainder_bound: gamma_n must be non-negative");
    const double dn = static_cast<double>(n);
    const double log_factor = 2.0 * dn * log_eps + special::log_gamma(2.0 * dn + 4.0) -
                              2.0 * special::log_gamma(dn + 1.0) - (2.0 * dn + 3.0) * log_rest -
                              (dn + 1.0) * kLn2;
    bounds.push_back(gamma_seq[n] == 0.0 ? 0.0 : std::exp(log_factor) * gamma_seq[n]);
  }
  return bounds;
}

std::vector<double> chebyshev_grid(int count) {
  require(count >= 1, errc::invalid_argument, "chebyshev_grid: count must be >= 1");
  std::vector<double> grid(static_cast<size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double theta = M_PI * (2.0 * k + 1.0) / (2.0 * count);
    grid[static_cast<size_t>(k)] = 0.5 * (1.0 - std::cos(theta));
  }
  return grid;
}

namespace {

Complex diagonal_point(bool vertical, double t) {
  return vertical ? Complex(0.5, t - 0.5) : Complex(t, 0.0);
}

Chart make_chart(bool vertical, double t, Jet jet) {
  Chart c;
  c.vertical = vertical;
  c.t = t;
  c.center = diagonal_point(vertical, t);
  const double geo = std::min(t, 1.0 - t) / kSqrt2;
  double est = std::numeric_limits<double>::infinity();
  try {
    est = radius_estimate(jet);
  } catch (const Error& e) {
    if (e.code() != errc::degenerate_jet) throw;
    est = 0.0;  // zero data: chart carries no information but stays valid
  }
  c.radius = std::isinf(est) ? geo : std::min(kSafety * est, geo);
  if (est == 0.0) c.radius = geo;  // zero jet evaluates to zero everywhere
  c.jet = std::move(jet);
  return c;
}

// Evaluate a chart's series at z with a truncation certificate.
Complex evaluate_chart(const Chart& c, Complex z, int* terms_used, double* tail_estimate) {
  const Complex h = z - c.center;
  Complex sum{};
  Complex hp = 1.0;
  double last = 0.0, prev = 0.0;
  int used = 0;
  for (size_t k = 0; k < c.jet.coeffs.size(); ++k) {
    const Complex term = c.jet.coeffs[k] * hp;
    sum += term;
    hp *= h;
    prev = last;
    last = std::abs(term);
    used = static_cast<int>(k) + 1;
    if (k >= 8 && last <= 1e-14 * std::abs(sum) && prev <= 1e-14 * std::abs(sum)) break;
  }
  double tail = 0.0;
  if (used == static_cast<int>(c.jet.coeffs.size()) && last > 0.0 && prev > 0.0) {
    const double r = std::min(last / std::max(prev, 1e-300), 0.999999);
    if (r >= 0.99)
      fail(errc::slow_convergence,
           "extend: term ratio >= 0.99, evaluation point too close to the chart boundary");
    tail = last * r / (1.0 - r);
  }
  if (terms_used) *terms_used = used;
  if (tail_estimate) *tail_estimate = tail;
  return sum;
}

struct JetSource {
  const FunctionExpr* f = nullptr;
  const series::TabulatedJets* tab = nullptr;
};

Jet jet_at(const JetSource& src, bool vertical, double t, int order) {
  if (src.f) return src.f->jet(diagonal_point(vertical, t), order);
  const auto& pts = vertical ? src.tab->vertical : src.tab->horizontal;
  for (const auto& p : pts) {
    if (std::abs(p.t - t) < 1e-12) {
      Jet j(diagonal_point(vertical, t), std::min<int>(order, static_cast<int>(p.coeffs.size()) - 1));
      for (size_t k = 0; k < j.coeffs.size(); ++k) j.coeffs[k] = p.coeffs[k];
      return j;
    }
  }
  fail(errc::invalid_argument, "build_atlas: tabulated data has no jet at requested grid point");
}

}  // namespace

ExtensionAtlas build_atlas(const series::DiagonalData& data, int order,
                           std::span<const double> grid) {
  require(order >= 8, errc::invalid_argument, "build_atlas: order must be >= 8");
  JetSource src;
  std::vector<double> h_grid, v_grid;
  if (const auto* f = std::get_if<FunctionExpr>(&data)) {
    src.f = f;
    require(!grid.empty(), errc::invalid_argument, "build_atlas: empty grid");
    h_grid.assign(grid.begin(), grid.end());
    v_grid = h_grid;
  } else {
    src.tab = &std::get<series::TabulatedJets>(data);
    for (const auto& p : src.tab->horizontal) h_grid.push_back(p.t);
    for (const auto& p : src.tab->vertical) v_grid.push_back(p.t);
    require(!h_grid.empty() && !v_grid.empty(), errc::invalid_argument,
            "build_atlas: tabulated data must cover both diagonals");
  }
  for (double t : h_grid)
    require(t > 0.0 && t < 1.0, errc::invalid_argument,
            "build_atlas: grid points must lie strictly inside (0,1)");
  for (double t : v_grid)
    require(t > 0.0 && t < 1.0, errc::invalid_argument,
            "build_atlas: grid points must lie strictly inside (0,1)");
  std::sort(h_grid.begin(), h_grid.end());
  std::sort(v_grid.begin(), v_grid.end());

  ExtensionAtlas atlas;
  for (double t : h_grid) atlas.charts.push_back(make_chart(false, t, jet_at(src, false, t, order)));
  const size_t h_count = atlas.charts.size();
  for (double t : v_grid) atlas.charts.push_back(make_chart(true, t, jet_at(src, true, t, order)));

  // Overlap consistency along each diagonal: neighboring charts must agree at
  // the midpoint of their centers.
  auto check_pair = [&](const Chart& a, const Chart& b) {
    const double dist = std::abs(a.center - b.center);
    if (dist >= 0.5 * std::min(a.radius, b.radius)) return;
    const Complex mid = 0.5 * (a.center + b.center);
    const Complex va = evaluate_chart(a, mid, nullptr, nullptr);
    const Complex vb = evaluate_chart(b, mid, nullptr, nullptr);
    const double scale = std::max({std::abs(va), std::abs(vb), 1e-12});
    const double rel = std::abs(va - vb) / scale;
    atlas.overlap_disagreement = std::max(atlas.overlap_disagreement, rel);
    require(rel <= kOverlapTol, errc::inconsistent_overlap,
            "build_atlas: neighboring charts disagree (data is not the trace of a "
            "single holomorphic function)");
  };
  for (size_t i = 0; i + 1 < h_count; ++i) check_pair(atlas.charts[i], atlas.charts[i + 1]);
  for (size_t i = h_count; i + 1 < atlas.charts.size(); ++i)
    check_pair(atlas.charts[i], atlas.charts[i + 1]);

  // Crossing germ at 1/2: shift the nearest chart of each diagonal to 1/2 and
  // compare low-order coefficients.
  auto nearest = [&](bool vertical) -> const Chart& {
    const Chart* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const Chart& c : atlas.charts) {
      if (c.vertical != vertical) continue;
      const double d = std::abs(c.t - 0.5);
      if (d < best_d) {
        best_d = d;
        best = &c;
      }
    }
    return *best;
  };
  const Chart& ch = nearest(false);
  const Chart& cv = nearest(true);
  const Complex crossing(0.5, 0.0);
  Jet sh = jets::shift(ch.jet, crossing - ch.center);
  Jet sv = jets::shift(cv.jet, crossing - cv.center);
  const int compare_orders = std::max(1, std::min(sh.order(), sv.order()) / 4);
  double worst = 0.0;
  for (int k = 0; k <= compare_orders; ++k) {
    const Complex a = sh.coeffs[static_cast<size_t>(k)];
    const Complex b = sv.coeffs[static_cast<size_t>(k)];
    const double scale = std::max({std::abs(a), std::abs(b), 1e-12});
    worst = std::max(worst, std::abs(a - b) / scale);
  }
  atlas.crossing_disagreement = worst;
  require(worst <= kCrossingTol, errc::crossing_mismatch,
          "build_atlas: the two diagonals do not share a holomorphic germ at 1/2");
  // Shared germ: average the two shifted jets (symmetrizes roundoff).
  const int cross_order = std::min(sh.order(), sv.order());
  Jet cross(crossing, cross_order);
  for (int k = 0; k <= cross_order; ++k)
    cross.coeffs[static_cast<size_t>(k)] =
        0.5 * (sh.coeffs[static_cast<size_t>(k)] + sv.coeffs[static_cast<size_t>(k)]);
  atlas.crossing_jet = std::move(cross);
  return atlas;
}

Complex extend(const ExtensionAtlas& atlas, Complex z, ExtendStats* stats) {
  int best = -1, second = -1;
  double best_ratio = std::numeric_limits<double>::infinity();
  double second_ratio = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < atlas.charts.size(); ++i) {
    const Chart& c = atlas.charts[i];
    if (c.radius <= 0.0) continue;
    const double ratio = std::abs(z - c.center) / c.radius;
    if (ratio >= 1.0) continue;
    if (ratio < best_ratio) {
      second = best;
      second_ratio = best_ratio;
      best = static_cast<int>(i);
      best_ratio = ratio;
    } else if (ratio < second_ratio) {
      second = static_cast<int>(i);
      second_ratio = ratio;
    }
  }
  require(best >= 0, errc::outside_atlas, "extend: no chart covers the evaluation point");
  int used = 0;
  double tail = 0.0;
  const Complex value = evaluate_chart(atlas.charts[static_cast<size_t>(best)], z, &used, &tail);
  if (stats) {
    stats->chart_index = best;
    stats->terms_used = used;
    stats->tail_estimate = tail;
    stats->chart_discrepancy.reset();
    if (second >= 0) {
      const Complex other = evaluate_chart(atlas.charts[static_cast<size_t>(second)], z, nullptr, nullptr);
      const double scale = std::max({std::abs(value), std::abs(other), 1e-12});
      stats->chart_discrepancy = std::abs(value - other) / scale;
    }
  }
  return value;
}

namespace {

series::TabulatedJets::Point point_from_json(const nlohmann::json& jp) {
  series::TabulatedJets::Point p;
  require(jp.contains("t") && jp.contains("coeffs"), errc::parse_error,
          "tabulated jets: point needs 't' and 'coeffs'");
  p.t = jp.at("t").get<double>();
  for (const auto& pair : jp.at("coeffs")) {
    require(pair.is_array() && pair.size() == 2, errc::parse_error,
            "tabulated jets: coefficient must be [re, im]");
    p.coeffs.emplace_back(pair[0].get<double>(), pair[1].get<double>());
  }
  require(!p.coeffs.empty(), errc::parse_error, "tabulated jets: empty coefficient list");
  return p;
}

void load_diagonal(const nlohmann::json& obj, series::TabulatedJets& tab) {
  require(obj.contains("diagonal") && obj.contains("points"), errc::parse_error,
          "tabulated jets: object needs 'diagonal' and 'points'");
  const std::string which = obj.at("diagonal").get<std::string>();
  require(which == "horizontal" || which == "vertical", errc::parse_error,
          "tabulated jets: diagonal must be 'horizontal' or 'vertical'");
  auto& dst = which == "horizontal" ? tab.horizontal : tab.vertical;
  for (const auto& jp : obj.at("points")) dst.push_back(point_from_json(jp));
}

}  // namespace

series::TabulatedJets tabulated_jets_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const std::exception& e) {
    fail(errc::parse_error, std::string("tabulated jets: invalid JSON: ") + e.what());
  }
  series::TabulatedJets tab;
  if (j.is_array()) {
    for (const auto& obj : j) load_diagonal(obj, tab);
  } else {
    load_diagonal(j, tab);
  }
  return tab;
}

std::string tabulated_jets_to_json(const series::TabulatedJets& tab) {
  nlohmann::json out = nlohmann::json::array();
  auto emit = [&](const char* name, const std::vector<series::TabulatedJets::Point>& pts) {
    nlohmann::json obj;
    obj["diagonal"] = name;
    obj["points"] = nlohmann::json::array();
    for (const auto& p : pts) {
      nlohmann::json jp;
      jp["t"] = p.t;
      jp["coeffs"] = nlohmann::json::array();
      for (const Complex& c : p.coeffs)
        jp["coeffs"].push_back(nlohmann::json::array({c.real(), c.imag()}));
      obj["points"].push_back(std::move(jp));
    }
    out.push_back(std::move(obj));
  };
  if (!tab.horizontal.empty()) emit("horizontal", tab.horizontal);
  if (!tab.vertical.empty()) emit("vertical", tab.vertical);
  return out.dump(2);
}

}  // namespace bergdiag::reconstruct
