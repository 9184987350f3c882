#pragma once

#include <stdexcept>
#include <string>

namespace kirchhoff {

enum class errc {
  invalid_grid,
  shape_mismatch,
  invalid_scale,
  invalid_exponent,
  trivial_function,
  degenerate_fiber,
  flat_fiber,
  convergence_failure,
  incomplete_spec,
  collapse,
  out_of_hypothesis,
  division_by_zero,
  singular_system,
  invalid_input,
  io_error,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::invalid_grid: return "invalid-grid";
    case errc::shape_mismatch: return "shape";
    case errc::invalid_scale: return "invalid-scale";
    case errc::invalid_exponent: return "invalid-exponent";
    case errc::trivial_function: return "trivial-function";
    case errc::degenerate_fiber: return "degenerate-fiber";
    case errc::flat_fiber: return "flat-fiber";
    case errc::convergence_failure: return "convergence-failure";
    case errc::incomplete_spec: return "incomplete-spec";
    case errc::collapse: return "collapse";
    case errc::out_of_hypothesis: return "out-of-hypothesis";
    case errc::division_by_zero: return "division-by-zero";
    case errc::singular_system: return "singular-system";
    case errc::invalid_input: return "invalid-input";
    case errc::io_error: return "io";
  }
  return "unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace kirchhoff
