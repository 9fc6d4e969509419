#include "sdd/rng.hpp"
#include "sdd/error.hpp"

namespace sdd {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::on_discontinuity: return "OnDiscontinuity";
    case ErrorCode::zero_density: return "ZeroDensity";
    case ErrorCode::zero_mass: return "ZeroMass";
    case ErrorCode::phi_out_of_range: return "PhiOutOfRange";
    case ErrorCode::packing_failed: return "PackingFailed";
    case ErrorCode::stuck_particle: return "StuckParticle";
    case ErrorCode::window_too_short: return "WindowTooShort";
    case ErrorCode::zero_density_at_current: return "ZeroDensityAtCurrent";
    case ErrorCode::drift_undefined: return "DriftUndefined";
    case ErrorCode::unaligned_discontinuity: return "UnalignedDiscontinuity";
    case ErrorCode::nonconservative_step: return "NonconservativeStep";
    case ErrorCode::sample_out_of_range: return "SampleOutOfRange";
    case ErrorCode::low_count: return "LowCount";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::config_error: return "ConfigError";
    case ErrorCode::io_error: return "IoError";
    }
    return "Unknown";
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    const std::uint64_t a = splitmix64(s);
    const std::uint64_t b = splitmix64(s);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    engine_.seed(seq);
}

Rng Rng::stream(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t s = master_seed ^ 0x5851f42d4c957f2dULL;
    const std::uint64_t mixed = splitmix64(s) ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    std::uint64_t t = mixed;
    return Rng(splitmix64(t));
}

std::uint64_t Rng::below(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
}

} // namespace sdd
