#include "bergdiag/jet.hpp"

#include <algorithm>
#include <cmath>

#include "bergdiag/errors.hpp"

namespace bergdiag::jets {

namespace {
void check_same(const Jet& a, const Jet& b) {
  require(a.coeffs.size() == b.coeffs.size() && a.center == b.center, errc::invalid_argument,
          "jet arithmetic requires matching center and order");
}
}  // namespace

Jet add(const Jet& a, const Jet& b) {
  check_same(a, b);
  Jet out = a;
  for (size_t k = 0; k < out.coeffs.size(); ++k) out.coeffs[k] += b.coeffs[k];
  return out;
}

Jet scale(const Jet& a, Complex factor) {
  Jet out = a;
  for (auto& c : out.coeffs) c *= factor;
  return out;
}

Jet multiply(const Jet& a, const Jet& b) {
  check_same(a, b);
  Jet out(a.center, a.order());
  const size_t n = out.coeffs.size();
  for (size_t k = 0; k < n; ++k) {
    Complex acc{};
    for (size_t j = 0; j <= k; ++j) acc += a.coeffs[j] * b.coeffs[k - j];
    out.coeffs[k] = acc;
  }
  return out;
}

Jet divide(const Jet& a, const Jet& b) {
  check_same(a, b);
  const Complex b0 = b.coeffs[0];
  require(std::abs(b0) > 1e-300, errc::division_by_zero_jet,
          "jet division: denominator constant term is zero");
  Jet out(a.center, a.order());
  const size_t n = out.coeffs.size();
  for (size_t k = 0; k < n; ++k) {
    Complex acc = a.coeffs[k];
    for (size_t j = 1; j <= k; ++j) acc -= b.coeffs[j] * out.coeffs[k - j];
    out.coeffs[k] = acc / b0;
  }
  return out;
}

Jet power(const Jet& a, int exponent) {
  require(exponent >= 0, errc::invalid_argument, "jet power: exponent must be >= 0");
  Jet result(a.center, a.order());
  result.coeffs[0] = 1.0;
  Jet base = a;
  int e = exponent;
  while (e > 0) {
    if (e & 1) result = multiply(result, base);
    e >>= 1;
    if (e > 0) base = multiply(base, base);
  }
  return result;
}

Complex evaluate(const Jet& a, Complex h) {
  // Horner from the top coefficient.
  Complex acc{};
  for (size_t k = a.coeffs.size(); k-- > 0;) acc = acc * h + a.coeffs[k];
  return acc;
}

Jet shift(const Jet& a, Complex h) {
  // Synthetic-division Taylor shift: repeated Horner passes.
  Jet out = a;
  out.center += h;
  const size_t n = out.coeffs.size();
  for (size_t i = 0; i + 1 < n; ++i) {
    for (size_t k = n - 1; k > i; --k) {
      out.coeffs[k - 1] += h * out.coeffs[k];
    }
  }
  return out;
}

}  // namespace bergdiag::jets
