#pragma once

#include <complex>
#include <vector>

namespace bergdiag {

using Complex = std::complex<double>;

// Truncated power series: coeffs[n] = f^(n)(center)/n! * scale^n for the
// scale the jet was built with (scale 1 gives plain Taylor coefficients).
// Arithmetic is exact truncation at the stored order.
struct Jet {
  Complex center{};
  std::vector<Complex> coeffs;

  Jet() = default;
  Jet(Complex c, int order) : center(c), coeffs(static_cast<size_t>(order) + 1) {}

  int order() const { return static_cast<int>(coeffs.size()) - 1; }
};

namespace jets {

Jet add(const Jet& a, const Jet& b);
Jet scale(const Jet& a, Complex factor);
// Cauchy product truncated at the common order.
Jet multiply(const Jet& a, const Jet& b);
// Recursive division; requires b.coeffs[0] != 0 (DivisionByZeroJet otherwise).
Jet divide(const Jet& a, const Jet& b);
// Integer power, exponent >= 0, by binary exponentiation.
Jet power(const Jet& a, int exponent);

// Evaluate the truncated series at center + h (h in the scaled variable).
Complex evaluate(const Jet& a, Complex h);

// Taylor shift: jet of the same series recentered at center + h, same order.
// Top coefficients lose accuracy when |h| is a sizable fraction of the
// convergence radius; callers compare only low orders after a shift.
Jet shift(const Jet& a, Complex h);

}  // namespace jets
}  // namespace bergdiag
