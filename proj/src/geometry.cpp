#include "bergdiag/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>
#include <thread>

#include "bergdiag/errors.hpp"

namespace bergdiag::geometry {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488016887242097;

// Smallest root of x^2 - 4ax + 2(a^2-b^2)... guarded: returns +inf when the
// point is outside the closed sector (no real roots).
double x1_root(double a, double b) {
  if (a <= 0.0) return std::numeric_limits<double>::infinity();
  const double disc = 2.0 * (a * a - b * b);
  if (disc < 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * a - std::sqrt(disc);
}

// Left half of Omega: z in the open sector with x1(z) < 1/2, i.e. z lies in
// D(x, x/sqrt2) for some x in (0, 1/2). Equivalent to the half-open union of
// the definition (the split convention at 1/2 does not change the open set).
bool omega_left(Complex z) {
  const double a = z.real(), b = z.imag();
  if (a <= 0.0 || std::abs(b) >= a) return false;
  return x1_root(a, b) < 0.5;
}

bool omega_contains(Complex z) { return omega_left(z) || omega_left(1.0 - z); }

// Left half of Omega^a: slope-a sector and smallest root of
// x^2 - 2(1+a^2) Re z x + (1+a^2)|z|^2 below 1/2.
bool omega_a_left(Complex z, double a) {
  const double u = z.real(), v = z.imag();
  if (u <= 0.0 || std::abs(v) >= a * u) return false;
  const double s = 1.0 + a * a;
  const double disc = s * (a * a * u * u - v * v);
  if (disc < 0.0) return false;
  return s * u - std::sqrt(disc) < 0.5;
}

bool ellipse_q_contains(Complex z, double q) {
  const double dx = z.real() - 0.5;
  return q * dx * dx + (16.0 - q) * z.imag() * z.imag() < 1.0;
}

// Inverse of the pi/2 rotation about 1/2: z -> 1/2 - i (z - 1/2).
Complex rotate_back(Complex z) { return Complex(0.5 + z.imag(), 0.5 - z.real()); }

bool omega_q_contains(Complex z, double q) {
  if (!omega_contains(z)) return false;
  const double a = z.real();
  if (a < 0.25 || a > 0.75) return true;
  return ellipse_q_contains(z, q);
}

// Sutherland-Hodgman clip of a convex polygon by an axis-aligned cell,
// followed by the shoelace area/centroid.
struct ClippedPoly {
  std::vector<Complex> pts;
  double area() const {
    double s = 0;
    const size_t n = pts.size();
    for (size_t i = 0; i < n; ++i) {
      const Complex& p = pts[i];
      const Complex& r = pts[(i + 1) % n];
      s += p.real() * r.imag() - r.real() * p.imag();
    }
    return 0.5 * s;
  }
  Complex centroid() const {
    double a6 = 0;
    double cx = 0, cy = 0;
    const size_t n = pts.size();
    for (size_t i = 0; i < n; ++i) {
      const Complex& p = pts[i];
      const Complex& r = pts[(i + 1) % n];
      const double cross = p.real() * r.imag() - r.real() * p.imag();
      a6 += cross;
      cx += (p.real() + r.real()) * cross;
      cy += (p.imag() + r.imag()) * cross;
    }
    if (std::abs(a6) < 1e-300) return pts.empty() ? Complex{} : pts[0];
    return Complex(cx / (3.0 * a6), cy / (3.0 * a6));
  }
};

ClippedPoly clip_polygon(const std::vector<Complex>& poly, const Rect& cell) {
  // inside(p) tests for each of the four half-planes of the cell.
  auto clip_edge = [](const std::vector<Complex>& in, auto inside, auto intersect) {
    std::vector<Complex> out;
    const size_t n = in.size();
    for (size_t i = 0; i < n; ++i) {
      const Complex& cur = in[i];
      const Complex& nxt = in[(i + 1) % n];
      const bool cin = inside(cur), nin = inside(nxt);
      if (cin) out.push_back(cur);
      if (cin != nin) out.push_back(intersect(cur, nxt));
    }
    return out;
  };
  std::vector<Complex> pts = poly;
  auto lerp_x = [](const Complex& p, const Complex& q, double x) {
    const double t = (x - p.real()) / (q.real() - p.real());
    return Complex(x, p.imag() + t * (q.imag() - p.imag()));
  };
  auto lerp_y = [](const Complex& p, const Complex& q, double y) {
    const double t = (y - p.imag()) / (q.imag() - p.imag());
    return Complex(p.real() + t * (q.real() - p.real()), y);
  };
  pts = clip_edge(pts, [&](const Complex& p) { return p.real() >= cell.xmin; },
                  [&](const Complex& p, const Complex& q) { return lerp_x(p, q, cell.xmin); });
  if (pts.empty()) return {};
  pts = clip_edge(pts, [&](const Complex& p) { return p.real() <= cell.xmax; },
                  [&](const Complex& p, const Complex& q) { return lerp_x(p, q, cell.xmax); });
  if (pts.empty()) return {};
  pts = clip_edge(pts, [&](const Complex& p) { return p.imag() >= cell.ymin; },
                  [&](const Complex& p, const Complex& q) { return lerp_y(p, q, cell.ymin); });
  if (pts.empty()) return {};
  pts = clip_edge(pts, [&](const Complex& p) { return p.imag() <= cell.ymax; },
                  [&](const Complex& p, const Complex& q) { return lerp_y(p, q, cell.ymax); });
  return {pts};
}

}  // namespace

DiskRoots disk_roots(Complex z) {
  const double a = z.real(), b = z.imag();
  require(a > 0.0 && std::abs(b) <= a, errc::outside_sector,
          "disk_roots: point outside the closed sector");
  const double s = std::sqrt(2.0 * (a * a - b * b));
  return {2.0 * a - s, 2.0 * a + s};
}

double kernel_h(Complex z, double x) {
  const double dx = z.real() - x, dy = z.imag();
  return 0.5 * x * x - (dx * dx + dy * dy);
}

Domain Domain::sector(double xmax) {
  require(xmax > 0.0, errc::invalid_argument, "sector: xmax must be positive");
  Domain d;
  d.kind_ = Kind::Sector;
  d.param_ = xmax;
  d.bbox_ = {0.0, xmax, -xmax, xmax};
  d.polygon_ = {Complex(0, 0), Complex(xmax, -xmax), Complex(xmax, xmax)};
  return d;
}

Domain Domain::square_d() {
  Domain d;
  d.kind_ = Kind::SquareD;
  d.bbox_ = {0.0, 1.0, -0.5, 0.5};
  d.polygon_ = {Complex(0, 0), Complex(0.5, -0.5), Complex(1, 0), Complex(0.5, 0.5)};
  return d;
}

Domain Domain::disk(Complex center, double radius) {
  require(radius > 0.0, errc::invalid_argument, "disk: radius must be positive");
  Domain d;
  d.kind_ = Kind::Disk;
  d.center_ = center;
  d.param_ = radius;
  d.bbox_ = {center.real() - radius, center.real() + radius, center.imag() - radius,
             center.imag() + radius};
  return d;
}

Domain Domain::rectangle(Rect r) {
  require(r.xmin < r.xmax && r.ymin < r.ymax, errc::invalid_argument, "rectangle: empty");
  Domain d;
  d.kind_ = Kind::Rectangle;
  d.bbox_ = r;
  d.polygon_ = {Complex(r.xmin, r.ymin), Complex(r.xmax, r.ymin), Complex(r.xmax, r.ymax),
                Complex(r.xmin, r.ymax)};
  return d;
}

Domain Domain::omega() {
  Domain d;
  d.kind_ = Kind::Omega;
  const double h = 0.5 / kSqrt2;  // max |Im| over Omega, attained at Re = 1/2
  d.bbox_ = {0.0, 1.0, -h, h};
  return d;
}

Domain Domain::omega_a(double a) {
  require(a >= 1.0, errc::invalid_argument, "omega_a: requires a >= 1");
  Domain d;
  d.kind_ = Kind::OmegaA;
  d.param_ = a;
  const double h = 0.5 * a / std::sqrt(1.0 + a * a);
  d.bbox_ = {0.0, 1.0, -h, h};
  return d;
}

Domain Domain::ellipse_q(double q) {
  require(q > 0.0 && q < 8.0, errc::invalid_argument, "ellipse_q: requires q in (0,8)");
  Domain d;
  d.kind_ = Kind::EllipseQ;
  d.param_ = q;
  const double ax = 1.0 / std::sqrt(q), ay = 1.0 / std::sqrt(16.0 - q);
  d.bbox_ = {0.5 - ax, 0.5 + ax, -ay, ay};
  return d;
}

Domain Domain::omega_q(double q) {
  require(q > 0.0 && q < 8.0, errc::invalid_argument, "omega_q: requires q in (0,8)");
  Domain d;
  d.kind_ = Kind::OmegaQ;
  d.param_ = q;
  const double h = 0.5 / kSqrt2;
  d.bbox_ = {0.0, 1.0, -h, h};
  return d;
}

Domain Domain::omega_q_rotated(double q) {
  require(q > 0.0 && q < 8.0, errc::invalid_argument, "omega_q_rotated: requires q in (0,8)");
  Domain d;
  d.kind_ = Kind::OmegaQRot;
  d.param_ = q;
  const double h = 0.5 / kSqrt2;
  d.bbox_ = {0.5 - h, 0.5 + h, -0.5, 0.5};
  return d;
}

Domain Domain::union_of(Domain a, Domain b) {
  Domain d;
  d.kind_ = Kind::Union;
  d.bbox_ = {std::min(a.bbox_.xmin, b.bbox_.xmin), std::max(a.bbox_.xmax, b.bbox_.xmax),
             std::min(a.bbox_.ymin, b.bbox_.ymin), std::max(a.bbox_.ymax, b.bbox_.ymax)};
  d.children_ = {std::move(a), std::move(b)};
  return d;
}

Domain Domain::intersection_of(Domain a, Domain b) {
  Domain d;
  d.kind_ = Kind::Intersection;
  d.bbox_ = {std::max(a.bbox_.xmin, b.bbox_.xmin), std::min(a.bbox_.xmax, b.bbox_.xmax),
             std::max(a.bbox_.ymin, b.bbox_.ymin), std::min(a.bbox_.ymax, b.bbox_.ymax)};
  if (d.bbox_.xmin >= d.bbox_.xmax || d.bbox_.ymin >= d.bbox_.ymax)
    d.bbox_ = {0, 0, 0, 0};
  d.children_ = {std::move(a), std::move(b)};
  return d;
}

Domain Domain::difference(Domain a, Domain b) {
  Domain d;
  d.kind_ = Kind::Difference;
  d.bbox_ = a.bbox_;
  d.children_ = {std::move(a), std::move(b)};
  return d;
}

bool Domain::contains(Complex z) const {
  switch (kind_) {
    case Kind::Sector:
      return z.real() > 0.0 && z.real() < param_ && std::abs(z.imag()) < z.real();
    case Kind::SquareD:
      return std::abs(z.real() - 0.5) + std::abs(z.imag()) < 0.5;
    case Kind::Disk:
      return std::abs(z - center_) < param_;
    case Kind::Rectangle:
      return z.real() > bbox_.xmin && z.real() < bbox_.xmax && z.imag() > bbox_.ymin &&
             z.imag() < bbox_.ymax;
    case Kind::Omega:
      return omega_contains(z);
    case Kind::OmegaA:
      return omega_a_left(z, param_) || omega_a_left(1.0 - z, param_);
    case Kind::EllipseQ:
      return ellipse_q_contains(z, param_);
    case Kind::OmegaQ:
      return omega_q_contains(z, param_);
    case Kind::OmegaQRot:
      return omega_q_contains(rotate_back(z), param_);
    case Kind::Union:
      return children_[0].contains(z) || children_[1].contains(z);
    case Kind::Intersection:
      return children_[0].contains(z) && children_[1].contains(z);
    case Kind::Difference:
      return children_[0].contains(z) && !children_[1].contains(z);
  }
  return false;
}

std::optional<double> Domain::clip_fraction(const Rect& cell) const {
  if (polygon_.empty()) return std::nullopt;
  const double ca = cell.area();
  if (ca <= 0.0) return 0.0;
  ClippedPoly clipped = clip_polygon(polygon_, cell);
  if (clipped.pts.size() < 3) return 0.0;
  return std::clamp(clipped.area() / ca, 0.0, 1.0);
}

Complex Domain::clip_centroid(const Rect& cell) const {
  ClippedPoly clipped = clip_polygon(polygon_, cell);
  if (clipped.pts.size() < 3)
    return Complex(0.5 * (cell.xmin + cell.xmax), 0.5 * (cell.ymin + cell.ymax));
  return clipped.centroid();
}

namespace {

// Upper boundary height of Omega at abscissa a (0 outside [0,1]).
double omega_height(double a) {
  if (a <= 0.0 || a >= 1.0) return 0.0;
  if (a <= 0.25) return a;
  if (a >= 0.75) return 1.0 - a;
  const double v = a - a * a - 0.125;
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

double omega_a_height(double x, double a) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double c = 1.0 / (4.0 * (1.0 + a * a));
  const double xt = 0.5 / (1.0 + a * a);  // tangency abscissa
  if (x <= xt) return a * x;
  if (x >= 1.0 - xt) return a * (1.0 - x);
  const double v = x - x * x - c;
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

double ellipse_height(double x, double q) {
  const double v = (1.0 - q * (x - 0.5) * (x - 0.5)) / (16.0 - q);
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

double omega_q_height(double x, double q) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  if (x <= 0.25) return x;
  if (x >= 0.75) return 1.0 - x;
  return std::min(ellipse_height(x, q), omega_height(x));
}

std::vector<Complex> symmetric_closed_outline(const std::vector<Complex>& upper) {
  // upper runs left to right with endpoints on the axis; mirror it below.
  std::vector<Complex> out = upper;
  for (size_t i = upper.size() - 1; i-- > 1;) out.push_back(std::conj(upper[i]));
  out.push_back(upper.front());
  return out;
}

}  // namespace

std::vector<std::vector<Complex>> Domain::boundary_polylines(int samples_per_arc) const {
  require(samples_per_arc >= 8, errc::invalid_argument, "boundary_polylines: too few samples");
  const int m = samples_per_arc;
  switch (kind_) {
    case Kind::Sector:
      return {{Complex(0, 0), Complex(param_, -param_), Complex(param_, param_), Complex(0, 0)}};
    case Kind::SquareD:
      return {{Complex(0, 0), Complex(0.5, -0.5), Complex(1, 0), Complex(0.5, 0.5), Complex(0, 0)}};
    case Kind::Rectangle:
      return {{Complex(bbox_.xmin, bbox_.ymin), Complex(bbox_.xmax, bbox_.ymin),
               Complex(bbox_.xmax, bbox_.ymax), Complex(bbox_.xmin, bbox_.ymax),
               Complex(bbox_.xmin, bbox_.ymin)}};
    case Kind::Disk:
    case Kind::EllipseQ: {
      std::vector<Complex> pts;
      const double ax = kind_ == Kind::Disk ? param_ : 1.0 / std::sqrt(param_);
      const double ay = kind_ == Kind::Disk ? param_ : 1.0 / std::sqrt(16.0 - param_);
      const Complex c = kind_ == Kind::Disk ? center_ : Complex(0.5, 0.0);
      for (int i = 0; i <= m; ++i) {
        const double t = 2.0 * M_PI * i / m;
        pts.push_back(c + Complex(ax * std::cos(t), ay * std::sin(t)));
      }
      return {pts};
    }
    case Kind::Omega:
    case Kind::OmegaA:
    case Kind::OmegaQ: {
      auto height = [&](double x) {
        if (kind_ == Kind::Omega) return omega_height(x);
        if (kind_ == Kind::OmegaA) return omega_a_height(x, param_);
        return omega_q_height(x, param_);
      };
      std::vector<Complex> upper;
      upper.push_back(Complex(0, 0));
      for (int i = 1; i < m; ++i) {
        const double x = static_cast<double>(i) / m;
        upper.push_back(Complex(x, height(x)));
      }
      upper.push_back(Complex(1, 0));
      return {symmetric_closed_outline(upper)};
    }
    case Kind::OmegaQRot: {
      Domain base = Domain::omega_q(param_);
      auto lines = base.boundary_polylines(samples_per_arc);
      for (auto& line : lines)
        for (auto& p : line) p = Complex(0.5 - p.imag(), p.real() - 0.5);  // rotate by +pi/2
      return lines;
    }
    case Kind::Union:
    case Kind::Intersection:
    case Kind::Difference: {
      auto a = children_[0].boundary_polylines(samples_per_arc);
      auto b = children_[1].boundary_polylines(samples_per_arc);
      a.insert(a.end(), b.begin(), b.end());
      return a;
    }
  }
  return {};
}

Domain Domain::parse(const std::string& spec) {
  std::istringstream is(spec);
  std::string name;
  is >> name;
  auto read_double = [&](const char* what) {
    double v;
    require(static_cast<bool>(is >> v), errc::parse_error,
            std::string("domain syntax: expected number for ") + what);
    return v;
  };
  Domain d;
  if (name == "square" || name == "squareD") {
    d = square_d();
  } else if (name == "sector") {
    d = sector(read_double("sector xmax"));
  } else if (name == "disk") {
    const double re = read_double("disk center re");
    const double im = read_double("disk center im");
    const double r = read_double("disk radius");
    d = disk(Complex(re, im), r);
  } else if (name == "unit-disk") {
    d = disk(Complex(0, 0), 1.0);
  } else if (name == "omega") {
    d = omega();
  } else if (name == "omega-a") {
    d = omega_a(read_double("omega-a parameter"));
  } else if (name == "ellipse-q") {
    d = ellipse_q(read_double("ellipse-q parameter"));
  } else if (name == "omega-q") {
    d = omega_q(read_double("omega-q parameter"));
  } else if (name == "omega-q-rot") {
    d = omega_q_rotated(read_double("omega-q-rot parameter"));
  } else {
    fail(errc::parse_error, "domain syntax: unknown domain '" + name + "'");
  }
  std::string extra;
  require(!(is >> extra), errc::parse_error, "domain syntax: trailing tokens");
  return d;
}

std::string Domain::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::Sector: os << "sector " << param_; break;
    case Kind::SquareD: os << "square"; break;
    case Kind::Disk:
      os << "disk " << center_.real() << " " << center_.imag() << " " << param_;
      break;
    case Kind::Rectangle:
      os << "rectangle " << bbox_.xmin << " " << bbox_.xmax << " " << bbox_.ymin << " "
         << bbox_.ymax;
      break;
    case Kind::Omega: os << "omega"; break;
    case Kind::OmegaA: os << "omega-a " << param_; break;
    case Kind::EllipseQ: os << "ellipse-q " << param_; break;
    case Kind::OmegaQ: os << "omega-q " << param_; break;
    case Kind::OmegaQRot: os << "omega-q-rot " << param_; break;
    case Kind::Union:
      os << "union(" << children_[0].describe() << ", " << children_[1].describe() << ")";
      break;
    case Kind::Intersection:
      os << "intersection(" << children_[0].describe() << ", " << children_[1].describe() << ")";
      break;
    case Kind::Difference:
      os << "difference(" << children_[0].describe() << ", " << children_[1].describe() << ")";
      break;
  }
  return os.str();
}

CoverageReport coverage_report(double q, double grid_step, double margin, int threads) {
  require(q > 0.0 && q < 8.0, errc::invalid_argument, "coverage_report: requires q in (0,8)");
  require(grid_step > 0.0 && margin > 0.0, errc::invalid_argument,
          "coverage_report: step and margin must be positive");
  const Domain square = Domain::square_d();
  const Domain oq = Domain::omega_q(q);
  const Domain oqr = Domain::omega_q_rotated(q);

  const long long ny = static_cast<long long>(std::floor(0.5 / grid_step));
  const long long nx = static_cast<long long>(std::floor(1.0 / grid_step));
  // Interior points at distance > margin from the square's boundary:
  // dist(z, boundary) = (1/2 - |x-1/2| - |y|)/sqrt(2).
  const double need = margin * kSqrt2;

  struct RowResult {
    long long tested = 0, uncovered = 0, omega_unc = 0;
    std::vector<Complex> samples;
  };
  auto scan_rows = [&](long long j_begin, long long j_end) {
    RowResult r;
    for (long long j = j_begin; j < j_end; ++j) {
      const double y = static_cast<double>(j) * grid_step;
      for (long long i = 1; i < nx; ++i) {
        const double x = static_cast<double>(i) * grid_step;
        if (0.5 - std::abs(x - 0.5) - std::abs(y) <= need) continue;
        const Complex z(x, y);
        if (!square.contains(z)) continue;
        ++r.tested;
        if (!(oq.contains(z) || oqr.contains(z))) {
          ++r.uncovered;
          if (r.samples.size() < 16) r.samples.push_back(z);
        }
        if (!omega_contains(z)) ++r.omega_unc;
      }
    }
    return r;
  };

  const int nthreads = std::max(1, threads);
  std::vector<std::future<RowResult>> futures;
  const long long j_lo = -ny, j_hi = ny + 1;
  const long long total_rows = j_hi - j_lo;
  const long long chunk = (total_rows + nthreads - 1) / nthreads;
  for (int t = 0; t < nthreads; ++t) {
    const long long b = j_lo + t * chunk;
    const long long e = std::min(j_hi, b + chunk);
    if (b >= e) break;
    futures.push_back(std::async(std::launch::async, scan_rows, b, e));
  }
  CoverageReport rep;
  for (auto& f : futures) {
    RowResult r = f.get();  // aggregated in chunk order: deterministic
    rep.tested += r.tested;
    rep.uncovered += r.uncovered;
    rep.omega_uncovered += r.omega_unc;
    for (const auto& s : r.samples)
      if (rep.uncovered_samples.size() < 16) rep.uncovered_samples.push_back(s);
  }
  return rep;
}

OmegaAGap omega_a_gap_check(double a) {
  require(a >= 1.0, errc::invalid_argument, "omega_a_gap_check: requires a >= 1");
  OmegaAGap g;
  const double s = std::sqrt(1.0 + a * a);
  g.radius_at_half = 0.5 * a / s;
  // 1/2 - a/(2 sqrt(1+a^2)) rationalized: stays positive in double even when
  // the naive difference would cancel to zero (a ~ 1e8).
  g.gap = 0.5 / (s * (s + a));
  require(g.gap > 0.0, errc::internal, "omega_a_gap_check: gap must be positive");
  return g;
}

}  // namespace bergdiag::geometry
