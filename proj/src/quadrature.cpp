#include "bergdiag/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>

#include "bergdiag/errors.hpp"
#include "bergdiag/special.hpp"

namespace bergdiag::quadrature {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488016887242097;
constexpr double kPi = 3.1415926535897932384626433832795;
}  // namespace

const GaussRule& gauss_legendre(int order) {
  require(order >= 1 && order <= 128, errc::invalid_argument,
          "gauss_legendre: order must be in [1, 128]");
  static std::map<int, GaussRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  GaussRule rule;
  rule.nodes.resize(static_cast<size_t>(order));
  rule.weights.resize(static_cast<size_t>(order));
  const int m = (order + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Newton iteration from the Chebyshev-based initial guess.
    double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < order; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = order * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[static_cast<size_t>(i)] = -x;
    rule.nodes[static_cast<size_t>(order - 1 - i)] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[static_cast<size_t>(i)] = w;
    rule.weights[static_cast<size_t>(order - 1 - i)] = w;
  }
  if (order % 2 == 1) rule.nodes[static_cast<size_t>(order / 2)] = 0.0;
  return cache.emplace(order, std::move(rule)).first->second;
}

void QuadConfig::validate() const {
  require(abs_tol > 0.0 && rel_tol > 0.0, errc::invalid_argument,
          "quad config: tolerances must be positive");
  require(max_depth >= 1 && max_depth <= 40, errc::invalid_argument,
          "quad config: max_depth must be in [1, 40]");
  require(gauss_order >= 2 && gauss_order <= 64, errc::invalid_argument,
          "quad config: gauss_order must be in [2, 64]");
  require(boundary_cell_limit > 0.0, errc::invalid_argument,
          "quad config: boundary_cell_limit must be positive");
}

namespace {

using geometry::Domain;
using geometry::Rect;

enum class CellClass { Inside, Outside, Straddle };

struct Cell {
  Rect r;
  int depth = 0;
  long id = 0;
  CellClass cls = CellClass::Straddle;
  bool exact_clip = false;
  bool final_leaf = false;  // straddle leaf at the size/depth limit
  double value = 0;
  double err = 0;
};

struct CellOrder {
  bool operator()(const Cell& a, const Cell& b) const {
    if (a.err != b.err) return a.err < b.err;
    return a.id > b.id;  // deterministic tie-break: older cell first
  }
};

class QuadtreeIntegrator {
 public:
  QuadtreeIntegrator(const FunctionExpr& f, const Domain& d, const QuadConfig& cfg)
      : f_(f), d_(d), cfg_(cfg) {}

  IntegralResult run() {
    seed_cells();
    refine_loop();
    return finalize();
  }

 private:
  double f2(Complex z) const {
    const double a = std::abs(f_.value(z));
    return a * a;
  }

  // Inside/outside decisions probe the cell dilated by 1/8 of its size. A
  // cheap 5x5 pass settles mixed cells; uniform-looking cells are confirmed
  // on a 17x17 grid so that a boundary arc cannot slip between probes and be
  // silently discarded (the residual sliver per cell is O(s^3/R), negligible
  // against every tolerance in use).
  CellClass classify(const Cell& c, double& frac) const {
    if (auto exact = d_.clip_fraction(c.r)) {
      frac = *exact;
      if (frac >= 1.0 - 1e-14) return CellClass::Inside;
      if (frac <= 1e-14) return CellClass::Outside;
      return CellClass::Straddle;
    }
    frac = -1.0;
    const double mx = 0.125 * c.r.width(), my = 0.125 * c.r.height();
    const double x0 = c.r.xmin - mx, x1 = c.r.xmax + mx;
    const double y0 = c.r.ymin - my, y1 = c.r.ymax + my;
    auto count_inside = [&](int kp) {
      int inside = 0;
      for (int i = 0; i < kp; ++i) {
        const double x = x0 + (x1 - x0) * i / (kp - 1);
        for (int j = 0; j < kp; ++j) {
          const double y = y0 + (y1 - y0) * j / (kp - 1);
          inside += d_.contains(Complex(x, y)) ? 1 : 0;
        }
      }
      return inside;
    };
    const int c5 = count_inside(5);
    if (c5 > 0 && c5 < 25) return CellClass::Straddle;
    const int c17 = count_inside(17);
    if (c17 == 17 * 17) return CellClass::Inside;
    if (c17 == 0) return CellClass::Outside;
    return CellClass::Straddle;
  }

  void eval_inside(Cell& c) const {
    const double v_hi = tensor_gauss(c.r, cfg_.gauss_order);
    const double v_lo = tensor_gauss(c.r, std::max(2, cfg_.gauss_order / 2));
    c.value = v_hi;
    c.err = std::abs(v_hi - v_lo);
  }

  double tensor_gauss(const Rect& r, int order) const {
    const GaussRule& g = gauss_legendre(order);
    const double hx = 0.5 * (r.xmax - r.xmin), cx = 0.5 * (r.xmax + r.xmin);
    const double hy = 0.5 * (r.ymax - r.ymin), cy = 0.5 * (r.ymax + r.ymin);
    double total = 0.0;
    for (int i = 0; i < order; ++i) {
      const double x = cx + hx * g.nodes[static_cast<size_t>(i)];
      double row = 0.0;
      for (int j = 0; j < order; ++j) {
        const double y = cy + hy * g.nodes[static_cast<size_t>(j)];
        row += g.weights[static_cast<size_t>(j)] * f2(Complex(x, y));
      }
      total += g.weights[static_cast<size_t>(i)] * row;
    }
    return total * hx * hy;
  }

  // Straddle leaf at the refinement limit: exact polygon clip when available,
  // else 16x16 midpoint subsampling with a mixed-block uncertainty estimate.
  void eval_straddle_leaf(Cell& c) const {
    if (auto exact = d_.clip_fraction(c.r)) {
      const double area = c.r.area() * *exact;
      if (area <= 0.0) {
        c.value = 0.0;
        c.err = 0.0;
        return;
      }
      const Complex centroid = d_.clip_centroid(c.r);
      const double fc = f2(centroid);
      c.value = fc * area;
      // spread of |f|^2 over the cell corners bounds the midpoint-rule error
      double lo = fc, hi = fc;
      for (const Complex p : {Complex(c.r.xmin, c.r.ymin), Complex(c.r.xmax, c.r.ymin),
                              Complex(c.r.xmin, c.r.ymax), Complex(c.r.xmax, c.r.ymax)}) {
        const double v = f2(p);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      c.err = (hi - lo) * area;
      return;
    }
    constexpr int kN = 16;
    const double dx = (c.r.xmax - c.r.xmin) / kN;
    const double dy = (c.r.ymax - c.r.ymin) / kN;
    const double da = dx * dy;
    bool in[kN][kN];
    double sum = 0.0;
    double max_f = 0.0;
    for (int i = 0; i < kN; ++i) {
      const double x = c.r.xmin + (i + 0.5) * dx;
      for (int j = 0; j < kN; ++j) {
        const double y = c.r.ymin + (j + 0.5) * dy;
        const Complex z(x, y);
        in[i][j] = d_.contains(z);
        if (in[i][j]) {
          const double v = f2(z);
          sum += v * da;
          max_f = std::max(max_f, v);
        }
      }
    }
    int mixed = 0;
    for (int i = 0; i < kN; ++i)
      for (int j = 0; j < kN; ++j) {
        const bool ref = in[i][j];
        if ((i + 1 < kN && in[i + 1][j] != ref) || (j + 1 < kN && in[i][j + 1] != ref)) ++mixed;
      }
    c.value = sum;
    c.err = max_f * da * mixed;
  }

  void eval_straddle_refinable(Cell& c) const {
    // Pre-refinement estimate: drives the priority queue toward the boundary.
    // max|f|^2 is taken over every probe, member or not: a straddle cell with
    // no interior midpoint still holds a boundary sliver, and a zero error
    // here would park the cell in the queue forever with its sliver dropped.
    constexpr int kN = 4;
    const double dx = (c.r.xmax - c.r.xmin) / kN;
    const double dy = (c.r.ymax - c.r.ymin) / kN;
    const double da = dx * dy;
    double sum = 0.0, max_f = 0.0;
    int inside = 0;
    for (int i = 0; i < kN; ++i)
      for (int j = 0; j < kN; ++j) {
        const Complex z(c.r.xmin + (i + 0.5) * dx, c.r.ymin + (j + 0.5) * dy);
        double v;
        try {
          v = f2(z);
        } catch (const Error&) {
          v = 1e300;  // probe landed on a pole: force refinement
        }
        max_f = std::max(max_f, v);
        if (d_.contains(z)) {
          sum += v * da;
          ++inside;
        }
      }
    c.value = sum;
    const int boundary_cells = std::min(kN * kN - inside, inside) + 1;
    c.err = max_f * da * (2.0 * boundary_cells) + 1e-300;
  }

  bool at_straddle_limit(const Cell& c) const {
    const double diam = std::hypot(c.r.width(), c.r.height());
    return diam <= cfg_.boundary_cell_limit || c.depth >= cfg_.max_depth;
  }

  void add_cell(Cell c) {
    double frac = -1.0;
    c.cls = classify(c, frac);
    c.id = next_id_++;
    c.exact_clip = frac >= 0.0;
    switch (c.cls) {
      case CellClass::Outside:
        return;  // discarded; forced initial refinement guards small lobes
      case CellClass::Inside:
        eval_inside(c);
        break;
      case CellClass::Straddle:
        if (at_straddle_limit(c)) {
          eval_straddle_leaf(c);
          c.final_leaf = true;
        } else if (c.exact_clip) {
          // refinable, scored like a leaf so the f-variation error shows up
          eval_straddle_leaf(c);
        } else {
          eval_straddle_refinable(c);
        }
        break;
    }
    total_value_ += c.value;
    total_err_ += c.err;
    if (c.final_leaf || (c.cls == CellClass::Inside && c.depth >= cfg_.max_depth)) {
      err_finalized_ += c.err;
      done_.push_back(c);
    } else {
      heap_.push(c);
    }
  }

  void seed_cells() {
    constexpr int kInitDepth = 4;  // unconditional refinement before pruning
    const Rect& b = d_.bbox();
    require(b.width() > 0.0 && b.height() > 0.0, errc::invalid_argument,
            "integration domain has an empty bounding box");
    const int n = 1 << kInitDepth;
    const double dx = b.width() / n, dy = b.height() / n;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Cell c;
        c.r = {b.xmin + i * dx, b.xmin + (i + 1) * dx, b.ymin + j * dy, b.ymin + (j + 1) * dy};
        c.depth = kInitDepth;
        add_cell(c);
      }
  }

  void refine_loop() {
    long popped = 0;
    double checkpoint_err = std::numeric_limits<double>::infinity();
    while (!heap_.empty()) {
      const double target = std::max(cfg_.abs_tol, cfg_.rel_tol * std::abs(total_value_));
      if (total_err_ <= target) return;
      // Finalized leaves put a floor under the reachable estimate. Refining
      // past the point where the refinable part is a few percent of that
      // floor cannot improve the result; stop there with the flag cleared.
      if (err_finalized_ > target && total_err_ <= 1.05 * err_finalized_) {
        tolerance_reached_ = false;
        return;
      }
      if (popped >= cfg_.max_cells) {
        tolerance_reached_ = false;
        return;
      }
      // Stall guard: abandon refinement that stops reducing the estimate.
      if (popped % 8192 == 0 && popped > 0) {
        if (total_err_ > 0.999 * checkpoint_err) {
          tolerance_reached_ = false;
          return;
        }
        checkpoint_err = total_err_;
      }
      Cell c = heap_.top();
      heap_.pop();
      ++popped;
      total_value_ -= c.value;
      total_err_ -= c.err;
      const double xm = 0.5 * (c.r.xmin + c.r.xmax);
      const double ym = 0.5 * (c.r.ymin + c.r.ymax);
      const Rect quads[4] = {{c.r.xmin, xm, c.r.ymin, ym},
                             {xm, c.r.xmax, c.r.ymin, ym},
                             {c.r.xmin, xm, ym, c.r.ymax},
                             {xm, c.r.xmax, ym, c.r.ymax}};
      for (const Rect& q : quads) {
        Cell child;
        child.r = q;
        child.depth = c.depth + 1;
        add_cell(child);
      }
    }
    // Heap exhausted: every remaining cell is a finalized leaf.
    const double target = std::max(cfg_.abs_tol, cfg_.rel_tol * std::abs(total_value_));
    if (total_err_ > target) tolerance_reached_ = false;
  }

  IntegralResult finalize() {
    std::vector<Cell> leaves = std::move(done_);
    while (!heap_.empty()) {
      leaves.push_back(heap_.top());
      heap_.pop();
    }
    std::sort(leaves.begin(), leaves.end(), [](const Cell& a, const Cell& b) { return a.id < b.id; });
    // Kahan summation in fixed id order: bit-stable for a given config.
    double sum = 0.0, comp = 0.0, err = 0.0, err_comp = 0.0;
    double straddle_area = 0.0, total_area = 0.0;
    for (const Cell& c : leaves) {
      double y = c.value - comp;
      double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
      y = c.err - err_comp;
      t = err + y;
      err_comp = (t - err) - y;
      err = t;
      total_area += c.r.area();
      if (c.cls == CellClass::Straddle) straddle_area += c.r.area();
    }
    IntegralResult res;
    res.value = sum;
    res.error_estimate = err;
    res.cells_used = static_cast<long>(leaves.size());
    res.boundary_fraction = total_area > 0.0 ? std::clamp(straddle_area / total_area, 0.0, 1.0) : 0.0;
    res.tolerance_reached =
        tolerance_reached_ && err <= std::max(cfg_.abs_tol, cfg_.rel_tol * std::abs(sum));
    return res;
  }

  const FunctionExpr& f_;
  const Domain& d_;
  const QuadConfig& cfg_;
  std::priority_queue<Cell, std::vector<Cell>, CellOrder> heap_;
  std::vector<Cell> done_;
  double total_value_ = 0.0;
  double total_err_ = 0.0;
  double err_finalized_ = 0.0;
  long next_id_ = 0;
  bool tolerance_reached_ = true;
};

void check_singularities_outside(const FunctionExpr& f, const Domain& d) {
  for (const Complex& s : f.singularities()) {
    require(!d.contains(s), errc::singularity_in_domain,
            "bergman_norm_sq: pole inside the integration domain");
    // Closure contact: probe small circles around the pole.
    for (const double r : {1e-9, 1e-7}) {
      for (int k = 0; k < 16; ++k) {
        const double t = 2.0 * kPi * k / 16.0;
        require(!d.contains(s + Complex(r * std::cos(t), r * std::sin(t))),
                errc::singularity_in_domain,
                "bergman_norm_sq: pole on the boundary of the integration domain");
      }
    }
  }
}

}  // namespace

IntegralResult bergman_norm_sq(const FunctionExpr& f, const geometry::Domain& d,
                               const QuadConfig& cfg) {
  cfg.validate();
  check_singularities_outside(f, d);
  QuadtreeIntegrator integrator(f, d, cfg);
  return integrator.run();
}

IntegralResult truncated_norm_sq(const FunctionExpr& f, const geometry::Domain& d,
                                 Complex exclusion_center, double exclusion_radius,
                                 const QuadConfig& cfg) {
  cfg.validate();
  require(exclusion_radius > 0.0, errc::invalid_argument,
          "truncated_norm_sq: exclusion radius must be positive");
  for (const Complex& s : f.singularities()) {
    require(std::abs(s - exclusion_center) <= exclusion_radius, errc::invalid_argument,
            "truncated_norm_sq: every singularity must lie inside the exclusion disk");
  }
  geometry::Domain cut =
      geometry::Domain::difference(d, geometry::Domain::disk(exclusion_center, exclusion_radius));
  QuadtreeIntegrator integrator(f, cut, cfg);
  return integrator.run();
}

double kernel_line_integral(Complex z, double lower, double upper) {
  require(lower <= upper, errc::invalid_argument, "kernel_line_integral: empty interval");
  const geometry::DiskRoots roots = geometry::disk_roots(z);  // outside_sector on bad z
  const double lo = std::max(lower, roots.x1);
  const double hi = std::min(upper, roots.x2);
  require(lo < hi, errc::empty_intersection,
          "kernel_line_integral: interval does not meet the root interval");
  const double half = 0.5 * (roots.x2 - roots.x1);
  require(half > 0.0, errc::empty_intersection,
          "kernel_line_integral: degenerate root interval");
  auto y_of = [&](double x) {
    return std::clamp((x - roots.x1) / half - 1.0, -1.0, 1.0);
  };
  return kSqrt2 * (std::asin(y_of(hi)) - std::asin(y_of(lo)));
}

WeightedDiskNorm weighted_disk_norm_sq(std::span<const Complex> g_coeffs) {
  WeightedDiskNorm out;
  if (g_coeffs.empty()) return out;
  const int deg = static_cast<int>(g_coeffs.size()) - 1;

  for (int n = 0; n <= deg; ++n) {
    const double m = std::abs(g_coeffs[static_cast<size_t>(n)]);
    out.coefficient_sum += special::weight_w(n) * m * m;
  }

  // (1/2pi) int_0^{2pi} int_0^1 |g(sqrt(1-s^2) e^{i t})|^2 ds dt.
  // Radial: Gauss (integrand is polynomial in s^2). Angular: uniform grid,
  // exact for trigonometric polynomials of degree <= 2*deg.
  const GaussRule& g = gauss_legendre(48);
  const int m_ang = std::max(16, 2 * deg + 4);
  double total = 0.0;
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    const double s = 0.5 * (g.nodes[i] + 1.0);
    const double r = std::sqrt(std::max(0.0, 1.0 - s * s));
    double ring = 0.0;
    for (int k = 0; k < m_ang; ++k) {
      const double t = 2.0 * kPi * k / m_ang;
      const Complex u = std::polar(r, t);
      Complex acc{};
      for (size_t n = g_coeffs.size(); n-- > 0;) acc = acc * u + g_coeffs[n];
      ring += std::norm(acc);
    }
    total += 0.5 * g.weights[i] * ring / m_ang;
  }
  out.quadrature = total;
  return out;
}

}  // namespace bergdiag::quadrature
