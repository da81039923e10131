#pragma once

#include <stdexcept>
#include <string>

namespace bergdiag {

// Error conditions surfaced by the library. Mirrored one-to-one by the
// BD_ERR_* codes of the C API.
enum class errc {
  ok = 0,
  invalid_argument,
  parse_error,
  singularity_too_close,
  singularity_in_domain,
  division_by_zero_jet,
  outside_sector,
  empty_intersection,
  outside_range,
  series_not_converged,
  degenerate_jet,
  outside_atlas,
  slow_convergence,
  inconsistent_overlap,
  crossing_mismatch,
  unknown_experiment,
  io_error,
  internal
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace bergdiag
