#pragma once

#include <vector>

namespace bergdiag::special {

// log Gamma(x) for x > 0. Thin wrapper over the C library implementation;
// accuracy on [0.5, 1e7] is pinned by the test suite, not by the choice of
// method.
double log_gamma(double x);

// w_n = 2^{2n} (n!)^2 / (2n+1)!  =  Gamma(1+n) Gamma(3/2) / Gamma(n+3/2).
// Monomial moments of the (1-|u|^2)^{-1/2} disk weight. w_0 = 1 exactly.
double weight_w(int n);

// Gamma(n + 1/2) = (2n)!/(2^{2n} n!) sqrt(pi), evaluated in log domain.
double gamma_half_integer(int n);

// w_n * sqrt(n+1); tends to Gamma(3/2) = sqrt(pi)/2 from above.
double asymptotic_ratio(int n);

// Log-domain table of c_n = 2^n/(2n+1)! and w_n, built by the exact rational
// recurrence w_{n+1} = w_n (n+1)/(n+3/2). (2n+1)! overflows double precision
// near n = 85, hence the log representation.
// Immutable after construction; safe for concurrent reads.
class CoefficientTable {
 public:
  explicit CoefficientTable(int n_max);

  int n_max() const { return n_max_; }
  double log_c(int n) const { return log_c_[static_cast<size_t>(n)]; }
  double log_w(int n) const { return log_w_[static_cast<size_t>(n)]; }
  double c(int n) const;
  double w(int n) const;

 private:
  int n_max_;
  std::vector<double> log_c_;
  std::vector<double> log_w_;
};

}  // namespace bergdiag::special
