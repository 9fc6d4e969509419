#pragma once

#include <cstdint>
#include <random>

namespace sdd {

// Seedable generator with deterministic stream splitting. Stream `i` of a
// master seed is independent of the order in which streams are created, so
// ensembles give identical results for any worker count.
class Rng {
public:
    using engine_type = std::mt19937_64;
    using result_type = engine_type::result_type;

    explicit Rng(std::uint64_t seed = 0);

    static Rng stream(std::uint64_t master_seed, std::uint64_t index);

    static constexpr result_type min() { return engine_type::min(); }
    static constexpr result_type max() { return engine_type::max(); }
    result_type operator()() { return engine_(); }

    // Uniform on [0, 1).
    double uniform() { return std::generate_canonical<double, 53>(engine_); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal() { return normal_(engine_); }
    std::uint64_t below(std::uint64_t n);

    engine_type& engine() { return engine_; }

private:
    engine_type engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t& state);

} // namespace sdd
