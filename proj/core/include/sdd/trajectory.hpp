#pragma once

#include "sdd/analysis.hpp"
#include "sdd/vec2.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace sdd {

// Output of one sampler chain. Positions are stored every `stride` steps
// (stride 0 disables storage); bin statistics are accumulated online over
// every post-burn-in step regardless of stride.
struct SampledTrajectory {
    int dim = 1;
    double h = 0.0;
    std::uint64_t stride = 1;
    std::uint64_t first_step = 0;  // index of positions[0]
    std::vector<Vec2> positions;
    std::vector<std::uint8_t> accepted;  // flag of the step that produced positions[i]; 1 for positions[0]
    std::uint64_t proposals = 0;
    std::uint64_t acceptances = 0;
    std::uint64_t wall_folds = 0;
    std::optional<BinAccumulator> bins;
    std::uint64_t burn_in = 0;
    Vec2 initial_position;
    Vec2 final_position;
    // Set when folded maem proposals meet a non-constant D near a wall, where
    // the Metropolis ratio is exact only for the unfolded kernel.
    bool folded_kernel_inexact = false;

    double acceptance_fraction() const {
        return proposals == 0 ? 1.0 : static_cast<double>(acceptances) / static_cast<double>(proposals);
    }
};

} // namespace sdd
