#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bergdiag/errors.hpp"
#include "bergdiag/quadrature.hpp"

using namespace bergdiag;
using namespace bergdiag::quadrature;
using geometry::Domain;

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kSqrt2 = 1.4142135623730950488016887242097;

// Frozen high-precision references (30-digit quadrature of the slice
// integrals, independent of the quadtree code path):
constexpr double kIntOmegaAbsZ2 = 0.14469256484875898252;      // int_Omega |z|^2
constexpr double kIntSquarePole2 = 0.23130657338640774936;     // int_D |1/(2-z)|^2
constexpr double kIntOmegaPole2 = 0.20878373933868348269;      // int_Omega |1/(2-z)|^2
constexpr double kKernelPartial = 1.8640976253133615028;       // z=0.3+0.1i over [0,1/2]

std::mt19937_64 rng(90210ULL);

Complex random_sector_point() {
  std::uniform_real_distribution<double> ua(0.05, 3.0);
  const double a = ua(rng);
  std::uniform_real_distribution<double> ub(-0.995 * a, 0.995 * a);
  return Complex(a, ub(rng));
}

// Test oracle: the singular integrand (x^2/2 - |z-x|^2)^{-1/2} integrated by
// panels graded geometrically into both endpoint singularities.
double graded_singular_quadrature(Complex z, double lo, double hi) {
  const auto roots = geometry::disk_roots(z);
  const double a = std::max(lo, roots.x1), b = std::min(hi, roots.x2);
  const GaussRule& rule = gauss_legendre(12);
  // kernel evaluated through the root factorization (x-x1)(x2-x)/2: the
  // naive x^2/2 - |z-x|^2 cancels to <= 0 next to the singular endpoints.
  auto integrate_panel = [&](double p, double q) {
    const double half = 0.5 * (q - p), mid = 0.5 * (p + q);
    double acc = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
      const double x = mid + half * rule.nodes[i];
      const double h = 0.5 * (x - roots.x1) * (roots.x2 - x);
      acc += rule.weights[i] / std::sqrt(h);
    }
    return acc * half;
  };
  // Split at the midpoint and grade dyadically into each singular endpoint.
  // The innermost sliver of width delta is dropped: its mass is
  // ~ 2 sqrt(2 delta / (x2-x1)), below 1e-7 relative, and descending further
  // would put Gauss nodes inside one ulp of the root.
  const double mid = 0.5 * (a + b);
  const double delta = 1e-14 * std::max(1.0, roots.x2);
  double total = 0.0;
  const double left = mid - a, right = b - mid;
  double t = a + delta;
  for (int k = 0;; ++k) {
    const double next = a + std::min(left, delta * std::pow(2.0, k));
    if (next > t) total += integrate_panel(t, next);
    t = next;
    if (next >= mid) break;
  }
  t = b - delta;
  for (int k = 0;; ++k) {
    const double next = b - std::min(right, delta * std::pow(2.0, k));
    if (next < t) total += integrate_panel(next, t);
    t = next;
    if (next <= mid) break;
  }
  return total;
}
}  // namespace

TEST_CASE("gauss rules integrate monomials exactly") {
  for (int order : {2, 5, 12, 33, 64}) {
    const GaussRule& r = gauss_legendre(order);
    for (int k = 0; k + 1 <= 2 * order - 1; k += 2) {
      double acc = 0.0;
      for (size_t i = 0; i < r.nodes.size(); ++i)
        acc += r.weights[i] * std::pow(r.nodes[i], k);
      REQUIRE(acc == doctest::Approx(2.0 / (k + 1)).epsilon(1e-12));
    }
  }
}

TEST_CASE("area of the square: exact clipping reaches 1e-12") {
  const FunctionExpr one = FunctionExpr::constant(Complex(1, 0));
  QuadConfig cfg;
  cfg.abs_tol = 1e-12;
  cfg.rel_tol = 1e-12;
  const IntegralResult r = bergman_norm_sq(one, Domain::square_d(), cfg);
  CHECK(std::abs(r.value - 0.5) <= 1e-12);
  CHECK(r.tolerance_reached);
}

TEST_CASE("area of the disk D(1/2, 1/(2 sqrt2)) = pi/8") {
  const FunctionExpr one = FunctionExpr::constant(Complex(1, 0));
  QuadConfig cfg;
  cfg.rel_tol = 1e-6;
  cfg.abs_tol = 1e-9;
  cfg.boundary_cell_limit = 2e-4;
  const IntegralResult r = bergman_norm_sq(one, Domain::disk(Complex(0.5, 0), 0.5 / kSqrt2), cfg);
  CHECK(std::abs(r.value - kPi / 8.0) <= 3e-6);
}

TEST_CASE("norm of z over the unit disk = pi/2") {
  const FunctionExpr z = FunctionExpr::identity();
  QuadConfig cfg;
  cfg.rel_tol = 1e-6;
  cfg.abs_tol = 1e-9;
  cfg.boundary_cell_limit = 4e-4;
  const IntegralResult r = bergman_norm_sq(z, Domain::parse("unit-disk"), cfg);
  CHECK(std::abs(r.value - kPi / 2.0) <= 1e-5);
}

TEST_CASE("area of Omega = 1/4 + pi/16") {
  const FunctionExpr one = FunctionExpr::constant(Complex(1, 0));
  QuadConfig cfg;
  cfg.rel_tol = 1e-5;
  cfg.abs_tol = 1e-8;
  cfg.boundary_cell_limit = 2e-4;
  const IntegralResult r = bergman_norm_sq(one, Domain::omega(), cfg);
  CHECK(std::abs(r.value - (0.25 + kPi / 16.0)) <= 5e-6);
}

TEST_CASE("polynomial and pole norms against frozen slice-integral references") {
  QuadConfig cfg;
  cfg.rel_tol = 1e-5;
  cfg.abs_tol = 1e-8;
  cfg.boundary_cell_limit = 2e-4;
  const FunctionExpr z = FunctionExpr::identity();
  const FunctionExpr zc = FunctionExpr::parse("poly -0.5 1");
  const FunctionExpr pole2 = FunctionExpr::pole(Complex(2, 0), 1);

  CHECK(std::abs(bergman_norm_sq(z, Domain::square_d(), cfg).value - 1.0 / 6.0) <= 1e-6);
  CHECK(std::abs(bergman_norm_sq(zc, Domain::square_d(), cfg).value - 1.0 / 24.0) <= 1e-6);
  CHECK(std::abs(bergman_norm_sq(z, Domain::omega(), cfg).value - kIntOmegaAbsZ2) <= 5e-6);
  CHECK(std::abs(bergman_norm_sq(pole2, Domain::square_d(), cfg).value - kIntSquarePole2) <= 5e-6);
  CHECK(std::abs(bergman_norm_sq(pole2, Domain::omega(), cfg).value - kIntOmegaPole2) <= 5e-6);
}

TEST_CASE("additivity over a partition of the square") {
  QuadConfig cfg;
  cfg.rel_tol = 1e-4;
  cfg.abs_tol = 1e-7;
  const FunctionExpr f = FunctionExpr::pole(Complex(-1, 0), 2);
  const Domain square = Domain::square_d();
  const Domain left = Domain::intersection_of(square, Domain::rectangle({0.0, 0.5, -0.5, 0.5}));
  const Domain right = Domain::intersection_of(square, Domain::rectangle({0.5, 1.0, -0.5, 0.5}));
  const double whole = bergman_norm_sq(f, square, cfg).value;
  const double parts = bergman_norm_sq(f, left, cfg).value + bergman_norm_sq(f, right, cfg).value;
  CHECK(std::abs(whole - parts) <= 2e-4 * std::abs(whole));
}

TEST_CASE("monotonicity: norm over Omega <= norm over the square") {
  QuadConfig cfg;
  cfg.rel_tol = 1e-4;
  for (const char* text : {"pole 2 1", "poly 0 1", "exp 1"}) {
    const FunctionExpr f = FunctionExpr::parse(text);
    const IntegralResult no = bergman_norm_sq(f, Domain::omega(), cfg);
    const IntegralResult nd = bergman_norm_sq(f, Domain::square_d(), cfg);
    CHECK(no.value <= nd.value + no.error_estimate + nd.error_estimate);
  }
}

TEST_CASE("refinement convergence: halving the boundary cell limit stays within the estimate") {
  const FunctionExpr f = FunctionExpr::pole(Complex(2, 0), 1);
  QuadConfig coarse;
  coarse.rel_tol = 1e-5;
  coarse.abs_tol = 1e-8;
  coarse.boundary_cell_limit = 8e-4;
  QuadConfig fine = coarse;
  fine.boundary_cell_limit = 4e-4;
  const IntegralResult rc = bergman_norm_sq(f, Domain::omega(), coarse);
  const IntegralResult rf = bergman_norm_sq(f, Domain::omega(), fine);
  CHECK(std::abs(rc.value - rf.value) <= rc.error_estimate + rf.error_estimate);
}

TEST_CASE("singularity in the domain or on its boundary is rejected") {
  QuadConfig cfg;
  const FunctionExpr inside = FunctionExpr::pole(Complex(0.5, 0.1), 1);
  CHECK_THROWS_AS(bergman_norm_sq(inside, Domain::square_d(), cfg), Error);
  // the counterexample pole sits exactly on the boundary of Omega
  const FunctionExpr on_boundary = FunctionExpr::pole(Complex(0.5, 0.5 / kSqrt2), 1);
  try {
    bergman_norm_sq(on_boundary, Domain::omega(), cfg);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::singularity_in_domain);
  }
}

TEST_CASE("truncated norm: constant function over square minus a disk") {
  QuadConfig cfg;
  cfg.rel_tol = 1e-5;
  cfg.abs_tol = 1e-8;
  cfg.boundary_cell_limit = 2e-4;
  const FunctionExpr one = FunctionExpr::constant(Complex(1, 0));
  const IntegralResult r =
      truncated_norm_sq(one, Domain::square_d(), Complex(0.5, 0.0), 0.1, cfg);
  CHECK(std::abs(r.value - (0.5 - kPi * 0.01)) <= 1e-5);
}

TEST_CASE("truncated norm: self-consistency at a large exclusion radius") {
  // With the exclusion so large that it caps the singular mass, the result
  // must agree with independent slice integration of the remaining region.
  QuadConfig cfg;
  cfg.rel_tol = 2e-4;
  cfg.abs_tol = 1e-7;
  cfg.boundary_cell_limit = 1e-4;
  const Complex z0(0.5, 0.5 / kSqrt2);
  const FunctionExpr f = FunctionExpr::pole(z0, 1);
  const IntegralResult quad = truncated_norm_sq(f, Domain::omega(), z0, 0.25, cfg);
  // slice oracle: 2D midpoint integration on a fine grid restricted to the set
  double oracle = 0.0;
  const double h = 5e-4;
  const Domain omega = Domain::omega();
  for (double x = h / 2; x < 1.0; x += h) {
    for (double y = h / 2 - 0.5; y < 0.5; y += h) {
      const Complex z(x, y);
      if (!omega.contains(z) || std::abs(z - z0) < 0.25) continue;
      oracle += h * h / std::norm(z0 - z);
    }
  }
  CHECK(std::abs(quad.value - oracle) <= 0.01 * oracle);
}

TEST_CASE("truncated norm requires singularities inside the exclusion") {
  QuadConfig cfg;
  const FunctionExpr f = FunctionExpr::pole(Complex(0.5, 0.5 / kSqrt2), 1);
  CHECK_THROWS_AS(truncated_norm_sq(f, Domain::omega(), Complex(0.2, 0.0), 0.05, cfg), Error);
}

TEST_CASE("tolerance-not-reached flag on an exhausted budget") {
  QuadConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-15;
  cfg.max_cells = 64;
  const FunctionExpr f = FunctionExpr::pole(Complex(2, 0), 1);
  const IntegralResult r = bergman_norm_sq(f, Domain::omega(), cfg);
  CHECK(!r.tolerance_reached);
  CHECK(std::isfinite(r.value));
}

TEST_CASE("kernel line integral: sqrt(2) pi over the full interval, 1000 random points") {
  for (int k = 0; k < 1000; ++k) {
    const Complex z = random_sector_point();
    const auto roots = geometry::disk_roots(z);
    const double full = kernel_line_integral(z, roots.x1 - 1.0, roots.x2 + 1.0);
    REQUIRE(std::abs(full - kSqrt2 * kPi) <= 1e-12 * kSqrt2 * kPi);
  }
}

TEST_CASE("kernel line integral: lower half gives sqrt(2) pi / 2") {
  for (int k = 0; k < 100; ++k) {
    const Complex z = random_sector_point();
    const auto roots = geometry::disk_roots(z);
    const double mid = 2.0 * z.real();  // midpoint of the root interval
    const double half = kernel_line_integral(z, roots.x1 - 1.0, mid);
    REQUIRE(std::abs(half - kSqrt2 * kPi / 2.0) <= 1e-12 * kSqrt2 * kPi);
  }
}

TEST_CASE("kernel line integral: frozen partial value and clipping") {
  const Complex z(0.3, 0.1);
  CHECK(kernel_line_integral(z, 0.0, 0.5) ==
        doctest::Approx(kKernelPartial).epsilon(1e-12));
  CHECK_THROWS_AS(kernel_line_integral(z, 1.5, 2.0), Error);  // beyond x2 = 1.0
  try {
    kernel_line_integral(z, 1.5, 2.0);
  } catch (const Error& e) {
    CHECK(e.code() == errc::empty_intersection);
  }
  CHECK_THROWS_AS(kernel_line_integral(Complex(-1, 0), 0.0, 1.0), Error);
}

TEST_CASE("kernel line integral agrees with graded singular quadrature") {
  // full interval and generic partial intervals, 1e-6 agreement
  for (int k = 0; k < 50; ++k) {
    const Complex z = random_sector_point();
    const auto roots = geometry::disk_roots(z);
    const double full = kernel_line_integral(z, roots.x1, roots.x2);
    const double oracle = graded_singular_quadrature(z, roots.x1, roots.x2);
    REQUIRE(std::abs(full - oracle) <= 1e-6 * std::abs(full));
  }
  const Complex z(0.3, 0.1);
  const double partial = kernel_line_integral(z, 0.0, 0.5);
  CHECK(std::abs(partial - graded_singular_quadrature(z, 0.0, 0.5)) <= 1e-6 * partial);
}

TEST_CASE("weighted disk norm: monomials and cross terms") {
  using quadrature::weighted_disk_norm_sq;
  {
    const std::vector<Complex> one = {Complex(1, 0)};
    const auto r = weighted_disk_norm_sq(one);
    CHECK(r.coefficient_sum == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(r.quadrature - 1.0) <= 1e-8);
  }
  {
    const std::vector<Complex> u = {Complex(0, 0), Complex(1, 0)};
    const auto r = weighted_disk_norm_sq(u);
    CHECK(r.coefficient_sum == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(std::abs(r.quadrature - 2.0 / 3.0) <= 1e-8);
  }
  {
    const std::vector<Complex> u2 = {Complex(0, 0), Complex(0, 0), Complex(1, 0)};
    const auto r = weighted_disk_norm_sq(u2);
    CHECK(r.coefficient_sum == doctest::Approx(8.0 / 15.0).epsilon(1e-14));
    CHECK(std::abs(r.quadrature - 8.0 / 15.0) <= 1e-8);
  }
  {
    const std::vector<Complex> g = {Complex(1, 0), Complex(1, 0)};
    const auto r = weighted_disk_norm_sq(g);
    CHECK(r.coefficient_sum == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
    CHECK(std::abs(r.quadrature - r.coefficient_sum) <= 1e-8);
  }
}

TEST_CASE("weighted disk norm: random polynomials, both sides agree") {
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 25; ++trial) {
    std::uniform_int_distribution<int> deg(0, 12);
    std::vector<Complex> g(static_cast<size_t>(deg(rng)) + 1);
    for (auto& c : g) c = Complex(u(rng), u(rng));
    const auto r = quadrature::weighted_disk_norm_sq(g);
    REQUIRE(std::abs(r.coefficient_sum - r.quadrature) <=
            1e-8 * std::max(1.0, r.coefficient_sum));
  }
}

TEST_CASE("quad config validation") {
  QuadConfig bad;
  bad.gauss_order = 1;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = QuadConfig{};
  bad.max_depth = 99;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = QuadConfig{};
  bad.abs_tol = -1;
  CHECK_THROWS_AS(bad.validate(), Error);
}
