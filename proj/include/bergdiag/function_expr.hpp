#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bergdiag/jet.hpp"

namespace bergdiag {

// Symbolic holomorphic test function: an immutable expression tree over
// constants, z, polynomials, poles 1/(z0 - z)^k, exponentials exp(lambda z)
// and sums/products/quotients/integer powers. Shareable across threads;
// evaluation is pure.
//
// Textual form (prefix notation, parentheses around non-atomic arguments):
//   1.5          constant
//   z            identity
//   poly 1 0 2   1 + 2 z^2
//   pole -1 2    1/((-1) - z)^2
//   exp 1+0.5i   exp((1+0.5i) z)
//   sum (poly 1 0 2) (exp 1)
//   prod z (pole 2 1)
//   quot (poly 0 1) (poly 1 1)
//   pow (sum z 1) 3
// Complex literals: 1, -2.5, i, -i, 2i, 1+2i, 0.5-0.353553i, 1e-3+2e-3i.
class FunctionExpr {
 public:
  static FunctionExpr constant(Complex c);
  static FunctionExpr identity();
  static FunctionExpr poly(std::vector<Complex> coeffs);  // sum c_k z^k
  static FunctionExpr pole(Complex z0, int order);        // 1/(z0 - z)^order
  static FunctionExpr exponential(Complex lambda);        // exp(lambda z)
  static FunctionExpr sum(std::vector<FunctionExpr> terms);
  static FunctionExpr product(std::vector<FunctionExpr> factors);
  static FunctionExpr quotient(FunctionExpr num, FunctionExpr den);
  static FunctionExpr power(FunctionExpr base, int exponent);

  // Parses the prefix grammar above; throws parse_error.
  static FunctionExpr parse(const std::string& text);
  std::string to_string() const;

  // Pointwise value; rejects points within `tol` of a recorded pole.
  Complex value(Complex z, double tol = 1e-12) const;

  // Jet at `center`: coeffs[n] = f^(n)(center)/n! * scale^n. The scale is
  // folded into the leaf rules so scaled coefficients stay in double range
  // even when the raw derivatives overflow (high order near a pole).
  Jet jet(Complex center, int order, double scale = 1.0, double tol = 1e-12) const;

  // n! * coeffs[n] of the scale-1 jet: the n-th complex derivative.
  Complex derivative(Complex z, int n, double tol = 1e-12) const;

  // Singularities recorded by Pole nodes (quotient zeros are detected at
  // evaluation time through the division guard instead).
  std::vector<Complex> singularities() const;

  struct Node;

 private:
  explicit FunctionExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

}  // namespace bergdiag
