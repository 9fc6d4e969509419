#pragma once

#include "sdd/analysis.hpp"
#include "sdd/model.hpp"
#include "sdd/rng.hpp"
#include "sdd/trajectory.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace sdd {

enum class Scheme {
    em_driftfree,   // X + sqrt(2 h D(X)) N, mirror-folded at walls
    em_full_drift,  // X + a(X) h + sqrt(2 h D(X)) N with a from drift_from_model
    maem,           // drift-free proposal + Metropolis acceptance against rho_eq
};

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view text);

// How maem treats proposals that leave the domain.
enum class WallMode {
    reject,  // rho_eq is zero outside the domain, so they are rejected
    fold,    // mirror-fold into the domain, then Metropolis-correct
};

struct SamplerConfig {
    double h = 1e-3;
    std::uint64_t steps = 0;
    std::uint64_t seed = 0;
    std::uint64_t chain = 0;  // stream index under `seed`
    Scheme scheme = Scheme::maem;
    WallMode wall_mode = WallMode::reject;
    std::uint64_t stride = 0;  // store every stride-th position; 0 stores nothing
    Vec2 x0;
    bool x0_from_rho_eq = false;
    // Steps discarded before any statistics; defaults to 1% of `steps` unless
    // x0 is drawn from rho_eq.
    std::optional<std::uint64_t> burn_in;
    std::optional<BinEdges> bins;
    int bin_axis = 0;
    std::size_t batches = 0;  // batch count for the bin-count overdispersion estimate
};

// Euler-Maruyama trial step x + sqrt(2 h D(x)) * noise; noise holds standard normals.
Vec2 em_step(Vec2 x, double h, const DiffusionModel& model, Vec2 noise);

// Gaussian kernel q_h(x, y) of the drift-free trial step.
double transition_density(Vec2 x, Vec2 y, double h, const DiffusionModel& model);
double log_transition_density(Vec2 x, Vec2 y, double h, const DiffusionModel& model);

// Metropolis acceptance min(1, q_h(y,x) rho(y) / (q_h(x,y) rho(x))); zero
// outside the domain or where rho_eq vanishes.
double accept_prob(Vec2 x, Vec2 y, double h, const DiffusionModel& model);

// Mirror-folds p into the box; returns the number of reflections applied.
int fold_into(Vec2& p, const Region& box);

Vec2 sample_rho_eq(const DiffusionModel& model, Rng& rng);

SampledTrajectory run(const DiffusionModel& model, const SamplerConfig& config);

} // namespace sdd
