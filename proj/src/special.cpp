#include "bergdiag/special.hpp"

#include <cmath>

#include "bergdiag/errors.hpp"

namespace bergdiag::special {

namespace {
constexpr double kLn2 = 0.6931471805599453094172321214581766;
constexpr double kLnSqrtPi = 0.5723649429247000870717136756765294;  // ln sqrt(pi)
}  // namespace

double log_gamma(double x) {
  require(x > 0.0, errc::invalid_argument, "log_gamma: argument must be positive");
  return std::lgamma(x);
}

double weight_w(int n) {
  require(n >= 0, errc::invalid_argument, "weight_w: n must be non-negative");
  if (n == 0) return 1.0;
  // log w_n = 2n ln2 + 2 lgamma(n+1) - lgamma(2n+2)
  const double lw = 2.0 * n * kLn2 + 2.0 * std::lgamma(n + 1.0) - std::lgamma(2.0 * n + 2.0);
  return std::exp(lw);
}

double gamma_half_integer(int n) {
  require(n >= 0, errc::invalid_argument, "gamma_half_integer: n must be non-negative");
  // log Gamma(n+1/2) = lgamma(2n+1) - 2n ln2 - lgamma(n+1) + ln sqrt(pi)
  const double lg = std::lgamma(2.0 * n + 1.0) - 2.0 * n * kLn2 - std::lgamma(n + 1.0) + kLnSqrtPi;
  return std::exp(lg);
}

double asymptotic_ratio(int n) {
  require(n >= 0, errc::invalid_argument, "asymptotic_ratio: n must be non-negative");
  if (n == 0) return 1.0;
  const double lw = 2.0 * n * kLn2 + 2.0 * std::lgamma(n + 1.0) - std::lgamma(2.0 * n + 2.0);
  return std::exp(lw + 0.5 * std::log(n + 1.0));
}

CoefficientTable::CoefficientTable(int n_max) : n_max_(n_max) {
  require(n_max >= 0, errc::invalid_argument, "CoefficientTable: n_max must be non-negative");
  const size_t count = static_cast<size_t>(n_max) + 1;
  log_w_.resize(count);
  log_c_.resize(count);
  log_w_[0] = 0.0;  // w_0 = 1
  log_c_[0] = 0.0;  // c_0 = 1
  long double lgamma_np1 = 0.0L;  // lgamma(n+1), accumulated as sum of ln k
  for (int n = 0; n < n_max; ++n) {
    // w_{n+1} = w_n (n+1)/(n+3/2)
    log_w_[static_cast<size_t>(n) + 1] =
        log_w_[static_cast<size_t>(n)] + std::log((n + 1.0) / (n + 1.5));
    lgamma_np1 += std::log(static_cast<long double>(n + 1));
    // c_n = w_n / (2^n (n!)^2)
    log_c_[static_cast<size_t>(n) + 1] = static_cast<double>(
        log_w_[static_cast<size_t>(n) + 1] - (n + 1.0L) * kLn2 - 2.0L * lgamma_np1);
  }
}

double CoefficientTable::c(int n) const {
  require(n >= 0 && n <= n_max_, errc::invalid_argument, "CoefficientTable::c: n out of range");
  return std::exp(log_c_[static_cast<size_t>(n)]);
}

double CoefficientTable::w(int n) const {
  require(n >= 0 && n <= n_max_, errc::invalid_argument, "CoefficientTable::w: n out of range");
  return std::exp(log_w_[static_cast<size_t>(n)]);
}

}  // namespace bergdiag::special

namespace bergdiag {

const char* errc_name(errc code) {
  switch (code) {
    case errc::ok: return "ok";
    case errc::invalid_argument: return "invalid_argument";
    case errc::parse_error: return "parse_error";
    case errc::singularity_too_close: return "singularity_too_close";
    case errc::singularity_in_domain: return "singularity_in_domain";
    case errc::division_by_zero_jet: return "division_by_zero_jet";
    case errc::outside_sector: return "outside_sector";
    case errc::empty_intersection: return "empty_intersection";
    case errc::outside_range: return "outside_range";
    case errc::series_not_converged: return "series_not_converged";
    case errc::degenerate_jet: return "degenerate_jet";
    case errc::outside_atlas: return "outside_atlas";
    case errc::slow_convergence: return "slow_convergence";
    case errc::inconsistent_overlap: return "inconsistent_overlap";
    case errc::crossing_mismatch: return "crossing_mismatch";
    case errc::unknown_experiment: return "unknown_experiment";
    case errc::io_error: return "io_error";
    case errc::internal: return "internal";
  }
  return "unknown";
}

}  // namespace bergdiag
