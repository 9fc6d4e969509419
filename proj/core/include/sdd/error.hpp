#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sdd {

enum class ErrorCode {
    invalid_argument,
    on_discontinuity,
    zero_density,
    zero_mass,
    phi_out_of_range,
    packing_failed,
    stuck_particle,
    window_too_short,
    zero_density_at_current,
    drift_undefined,
    unaligned_discontinuity,
    nonconservative_step,
    sample_out_of_range,
    low_count,
    parse_error,
    config_error,
    io_error,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this type; `code()` identifies
// the failure class so callers can branch without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace sdd
