#pragma once

#include <stdexcept>
#include <string>

namespace hfsc {

/// Failure classes. Grouped by how the CLI maps them to exit codes:
/// validation/config problems exit 1, numerical failures exit 2
/// (tolerance failures are not exceptions; the verify command reports
/// them and exits 3).
enum class Errc {
  // validation / configuration
  invalid_parameter,
  degenerate_model,
  halfplane_violation,
  simple_zero_violation,
  degenerate_vector,
  config_parse,
  config_value,
  // numerical / runtime
  domain_too_large,   // phase overflow guard |Re theta| > 300
  conditioning,
  domain_too_small,
  blow_up,
  nonfinite_sample,
  tracking,
  peak_count,
  io_failure,
};

inline bool is_validation_error(Errc c) {
  switch (c) {
    case Errc::invalid_parameter:
    case Errc::degenerate_model:
    case Errc::halfplane_violation:
    case Errc::simple_zero_violation:
    case Errc::degenerate_vector:
    case Errc::config_parse:
    case Errc::config_value:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message, double detail = 0.0)
      : std::runtime_error(std::move(message)), code_(code), detail_(detail) {}

  Errc code() const noexcept { return code_; }

  /// Context-dependent numeric payload: condition estimate for
  /// Errc::conditioning, suggested half-width for Errc::domain_too_small.
  double detail() const noexcept { return detail_; }

 private:
  Errc code_;
  double detail_;
};

}  // namespace hfsc
