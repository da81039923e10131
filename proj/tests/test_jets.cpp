#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bergdiag/errors.hpp"
#include "bergdiag/function_expr.hpp"

using namespace bergdiag;

namespace {

double rel_err(Complex got, Complex want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

// n-th central difference with one Richardson extrapolation (test oracle,
// independent of jet arithmetic):
//   D_n(h) = h^-n sum_k (-1)^k C(n,k) f(x + (n/2-k) h) = f^(n) + a h^2 + ...
//   (4 D_n(h/2) - D_n(h)) / 3 = f^(n) + O(h^4).
Complex finite_difference(const FunctionExpr& f, Complex x, int n) {
  if (n == 0) return f.value(x);
  auto central = [&](double step) {
    Complex acc{};
    double binom = 1.0;
    for (int k = 0; k <= n; ++k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      acc += sign * binom * f.value(x + (0.5 * n - k) * step);
      binom = binom * (n - k) / (k + 1);
    }
    return acc / std::pow(step, n);
  };
  auto richardson = [&](double step) {
    return (4.0 * central(0.5 * step) - central(step)) / 3.0;
  };
  // Step selection by mutual agreement: walk down until two successive
  // extrapolations stop improving (truncation left, roundoff right).
  const double steps[] = {0.2, 0.1, 0.05, 0.025, 0.02, 0.0125, 0.01};
  Complex best{};
  double best_diff = std::numeric_limits<double>::infinity();
  Complex prev = richardson(steps[0]);
  for (size_t i = 1; i < std::size(steps); ++i) {
    const Complex cur = richardson(steps[i]);
    const double diff = std::abs(cur - prev);
    if (diff < best_diff) {
      best_diff = diff;
      best = cur;
    }
    prev = cur;
  }
  return best;
}

std::mt19937_64 rng(20240917ULL);

Complex random_complex(double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return Complex(u(rng), u(rng));
}

FunctionExpr random_expression(int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 6 : 3);
  switch (pick(rng)) {
    case 0:
      return FunctionExpr::constant(random_complex(-2, 2));
    case 1:
      return FunctionExpr::identity();
    case 2: {
      std::vector<Complex> coeffs;
      std::uniform_int_distribution<int> deg(1, 4);
      const int d = deg(rng);
      for (int k = 0; k <= d; ++k) coeffs.push_back(random_complex(-1, 1));
      return FunctionExpr::poly(std::move(coeffs));
    }
    case 3: {
      // poles kept away from the sampling box around the origin
      const Complex z0 = random_complex(2.0, 4.0);
      std::uniform_int_distribution<int> ord(1, 3);
      return FunctionExpr::pole(z0, ord(rng));
    }
    case 4:
      return FunctionExpr::sum({random_expression(depth - 1), random_expression(depth - 1)});
    case 5:
      return FunctionExpr::product({random_expression(depth - 1), random_expression(depth - 1)});
    default:
      return FunctionExpr::exponential(random_complex(-1, 1));
  }
}

}  // namespace

TEST_CASE("pole jet closed form: geometric series of 1/(2-z) at 0") {
  const FunctionExpr f = FunctionExpr::pole(Complex(2, 0), 1);
  const Jet j = f.jet(Complex(0, 0), 2);
  CHECK(rel_err(j.coeffs[0], Complex(0.5, 0)) < 1e-15);
  CHECK(rel_err(j.coeffs[1], Complex(0.25, 0)) < 1e-15);
  CHECK(rel_err(j.coeffs[2], Complex(0.125, 0)) < 1e-15);
}

TEST_CASE("constant jets vanish beyond order zero") {
  const FunctionExpr f = FunctionExpr::constant(Complex(1, 0));
  const Jet j = f.jet(Complex(0.3, 0.1), 5);
  CHECK(j.coeffs[0] == Complex(1, 0));
  for (int k = 1; k <= 5; ++k) CHECK(std::abs(j.coeffs[static_cast<size_t>(k)]) == 0.0);
}

TEST_CASE("boundary pole family: coeffs[n] = 1/(z0-x)^{n+1}") {
  const Complex z0(0.5, 0.5 / std::sqrt(2.0));
  const FunctionExpr f = FunctionExpr::pole(z0, 1);
  for (double x : {0.1, 0.3, 0.45}) {
    const Jet j = f.jet(Complex(x, 0), 40);
    Complex expect = 1.0 / (z0 - x);
    for (int n = 0; n <= 40; ++n) {
      REQUIRE(rel_err(j.coeffs[static_cast<size_t>(n)], expect) < 1e-12);
      expect /= (z0 - x);
    }
  }
}

TEST_CASE("scaled jets stay bounded where raw coefficients overflow") {
  const Complex z0(0.5, 0.5 / std::sqrt(2.0));
  const FunctionExpr f = FunctionExpr::pole(z0, 1);
  const double x = 0.499;
  const double scale = x / std::sqrt(2.0);
  const Jet j = f.jet(Complex(x, 0), 5000, scale);
  // |ghat(n)| = (x/sqrt2)^n / |z0-x|^{n+1}: ratio < 1, so terms shrink.
  CHECK(std::isfinite(std::abs(j.coeffs[5000])));
  CHECK(std::abs(j.coeffs[5000]) < std::abs(j.coeffs[0]));
  // while the unscaled coefficient would be ~ |z0-x|^{-5001} ~ e^{5200}.
  CHECK(5001.0 * std::log(1.0 / std::abs(z0 - Complex(x, 0))) > 709.0);
}

TEST_CASE("derivative examples") {
  CHECK(rel_err(FunctionExpr::exponential(Complex(1, 0)).derivative(Complex(0, 0), 3),
                Complex(1, 0)) < 1e-14);
  CHECK(rel_err(FunctionExpr::pole(Complex(1, 0), 1).derivative(Complex(0, 0), 1),
                Complex(1, 0)) < 1e-14);
  const FunctionExpr z2 = FunctionExpr::power(FunctionExpr::identity(), 2);
  CHECK(rel_err(z2.derivative(Complex(3, 0), 2), Complex(2, 0)) < 1e-14);
}

TEST_CASE("derivative agrees with finite differences for n <= 6") {
  const std::vector<FunctionExpr> cases = {
      FunctionExpr::pole(Complex(1, 0.5), 2),
      FunctionExpr::exponential(Complex(2, 0)),
      FunctionExpr::parse("sum (poly 1 0 2) (exp 1)"),
      FunctionExpr::parse("quot (poly 0 1) (poly 1 1)"),
  };
  for (const auto& f : cases) {
    const Complex x(0.25, 0.1);
    for (int n = 1; n <= 6; ++n) {
      const Complex want = f.derivative(x, n);
      const Complex got = finite_difference(f, x, n);
      REQUIRE(rel_err(got, want) < 1e-5);
    }
  }
}

TEST_CASE("linearity of jets") {
  for (int trial = 0; trial < 50; ++trial) {
    const FunctionExpr f = random_expression(2);
    const FunctionExpr g = random_expression(2);
    const Complex alpha = random_complex(-2, 2), beta = random_complex(-2, 2);
    const FunctionExpr combo =
        FunctionExpr::sum({FunctionExpr::product({FunctionExpr::constant(alpha), f}),
                           FunctionExpr::product({FunctionExpr::constant(beta), g})});
    const Complex c = random_complex(-0.4, 0.4);
    const Jet jf = f.jet(c, 12), jg = g.jet(c, 12), jc = combo.jet(c, 12);
    double scale = 0.0;
    for (int k = 0; k <= 12; ++k)
      scale = std::max({scale, std::abs(jf.coeffs[static_cast<size_t>(k)]),
                        std::abs(jg.coeffs[static_cast<size_t>(k)])});
    for (int k = 0; k <= 12; ++k) {
      const Complex want =
          alpha * jf.coeffs[static_cast<size_t>(k)] + beta * jg.coeffs[static_cast<size_t>(k)];
      REQUIRE(std::abs(jc.coeffs[static_cast<size_t>(k)] - want) <=
              1e-13 * std::max(1.0, 4.0 * scale));
    }
  }
}

TEST_CASE("Leibniz: product jet equals the Cauchy product") {
  for (int trial = 0; trial < 50; ++trial) {
    const FunctionExpr f = random_expression(2);
    const FunctionExpr g = random_expression(2);
    const Complex c = random_complex(-0.4, 0.4);
    const Jet jf = f.jet(c, 10), jg = g.jet(c, 10);
    const Jet jp = FunctionExpr::product({f, g}).jet(c, 10);
    const Jet want = jets::multiply(jf, jg);
    double scale = 1.0;
    for (int k = 0; k <= 10; ++k)
      scale = std::max(scale, std::abs(want.coeffs[static_cast<size_t>(k)]));
    for (int k = 0; k <= 10; ++k)
      REQUIRE(std::abs(jp.coeffs[static_cast<size_t>(k)] - want.coeffs[static_cast<size_t>(k)]) <=
              1e-12 * scale);
  }
}

TEST_CASE("division inverse: jet(f) * jet(1/f) is the unit jet") {
  for (int trial = 0; trial < 30; ++trial) {
    FunctionExpr f = random_expression(2);
    const Complex c = random_complex(-0.4, 0.4);
    Complex v;
    try {
      v = f.value(c);
    } catch (const Error&) {
      continue;
    }
    if (std::abs(v) < 1e-3) continue;  // stay away from zeros of f
    const FunctionExpr inv = FunctionExpr::quotient(FunctionExpr::constant(Complex(1, 0)), f);
    const Jet prod = jets::multiply(f.jet(c, 10), inv.jet(c, 10));
    CHECK(std::abs(prod.coeffs[0] - Complex(1, 0)) < 1e-12);
    for (int k = 1; k <= 10; ++k) CHECK(std::abs(prod.coeffs[static_cast<size_t>(k)]) < 1e-9);
  }
}

TEST_CASE("recentering: jet summed at x+h converges to f(x+h)") {
  const FunctionExpr f = FunctionExpr::pole(Complex(2, 0), 1);
  const Complex x(0.5, 0.0);
  const Complex h(0.6, 0.3);  // |h| = 0.67 < half the distance to the pole
  const Jet j = f.jet(x, 60);
  const Complex got = jets::evaluate(j, h);
  CHECK(rel_err(got, f.value(x + h)) < 1e-8);
}

TEST_CASE("taylor shift reproduces the recentered expansion") {
  const FunctionExpr f = FunctionExpr::parse("sum (pole 3+1i 2) (poly 0.5 0 1)");
  const Complex c0(0.2, 0.0), h(0.3, -0.1);
  const Jet base = f.jet(c0, 30);
  const Jet shifted = jets::shift(base, h);
  const Jet direct = f.jet(c0 + h, 30);
  for (int k = 0; k <= 12; ++k)
    REQUIRE(std::abs(shifted.coeffs[static_cast<size_t>(k)] -
                     direct.coeffs[static_cast<size_t>(k)]) <
            1e-10 * std::max(1.0, std::abs(direct.coeffs[static_cast<size_t>(k)])));
}

TEST_CASE("singularity guards") {
  const FunctionExpr f = FunctionExpr::pole(Complex(1, 0), 1);
  CHECK_THROWS_AS(f.value(Complex(1.0, 0.0)), Error);
  CHECK_THROWS_AS(f.jet(Complex(1.0, 1e-14), 3), Error);
  try {
    f.jet(Complex(1.0, 1e-14), 3);
  } catch (const Error& e) {
    CHECK(e.code() == errc::singularity_too_close);
  }
  const FunctionExpr bad =
      FunctionExpr::quotient(FunctionExpr::constant(Complex(1, 0)), FunctionExpr::identity());
  try {
    bad.jet(Complex(0, 0), 3);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::division_by_zero_jet);
  }
}

TEST_CASE("parser round trip and grammar forms") {
  const std::vector<std::string> inputs = {
      "pole -1 2",
      "sum (poly 1 0 2) (exp 1)",
      "pole 0.5+0.353553i 1",
      "prod z (pole 2 1)",
      "quot (poly 0 1) (poly 1 1)",
      "pow (sum z 1) 3",
      "-1.5+2e-3i",
      "z",
  };
  for (const auto& text : inputs) {
    const FunctionExpr f = FunctionExpr::parse(text);
    const FunctionExpr g = FunctionExpr::parse(f.to_string());
    const Complex p(0.3, 0.2);
    CHECK(rel_err(g.value(p), f.value(p)) < 1e-14);
  }
}

TEST_CASE("parser: complex literal forms") {
  CHECK(FunctionExpr::parse("i").value(Complex(0, 0)) == Complex(0, 1));
  CHECK(FunctionExpr::parse("-i").value(Complex(0, 0)) == Complex(0, -1));
  CHECK(FunctionExpr::parse("2i").value(Complex(0, 0)) == Complex(0, 2));
  CHECK(FunctionExpr::parse("1+2i").value(Complex(0, 0)) == Complex(1, 2));
  CHECK(FunctionExpr::parse("0.5-0.25i").value(Complex(0, 0)) == Complex(0.5, -0.25));
  CHECK(FunctionExpr::parse("1e-3+2e-3i").value(Complex(0, 0)) == Complex(1e-3, 2e-3));
}

TEST_CASE("parser rejects malformed input") {
  for (const std::string bad :
       {"", "pole", "pole 1", "sum z", "frob 1", "pole 1 2 3", "sum (z", "1+2j"}) {
    CHECK_THROWS_AS(FunctionExpr::parse(bad), Error);
  }
}

TEST_CASE("singularities are collected from pole nodes") {
  const FunctionExpr f = FunctionExpr::parse("sum (pole 2 1) (prod (pole -1+1i 2) z)");
  const auto sing = f.singularities();
  REQUIRE(sing.size() == 2);
  CHECK(sing[0] == Complex(2, 0));
  CHECK(sing[1] == Complex(-1, 1));
}
