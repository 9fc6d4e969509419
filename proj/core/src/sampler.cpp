#include "sdd/sampler.hpp"
#include "sdd/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sdd {

std::string_view to_string(Scheme s) {
    switch (s) {
    case Scheme::em_driftfree: return "em-driftfree";
    case Scheme::em_full_drift: return "em-full-drift";
    case Scheme::maem: return "maem";
    }
    return "?";
}

Scheme parse_scheme(std::string_view text) {
    if (text == "em-driftfree") return Scheme::em_driftfree;
    if (text == "em-full-drift") return Scheme::em_full_drift;
    if (text == "maem") return Scheme::maem;
    throw Error(ErrorCode::parse_error, "unknown scheme '" + std::string(text) + "'");
}

Vec2 em_step(Vec2 x, double h, const DiffusionModel& model, Vec2 noise) {
    const double s = std::sqrt(2.0 * h * model.diffusion()(x));
    Vec2 y = x + s * noise;
    if (model.dim() == 1) y.y = 0.0;
    return y;
}

double log_transition_density(Vec2 x, Vec2 y, double h, const DiffusionModel& model) {
    const double d = model.diffusion()(x);
    const double var2 = 4.0 * h * d;
    const Vec2 dz = y - x;
    const double r2 = model.dim() == 1 ? dz.x * dz.x : norm2(dz);
    return -0.5 * model.dim() * std::log(std::numbers::pi * var2) - r2 / var2;
}

double transition_density(Vec2 x, Vec2 y, double h, const DiffusionModel& model) {
    return std::exp(log_transition_density(x, y, h, model));
}

double accept_prob(Vec2 x, Vec2 y, double h, const DiffusionModel& model) {
    const double rho_x = model.rho_eq()(x);
    if (!(rho_x > 0.0)) throw Error(ErrorCode::zero_density_at_current, "chain state has rho_eq = 0");
    if (!model.domain().contains(y)) return 0.0;
    const double rho_y = model.rho_eq()(y);
    if (!(rho_y > 0.0)) return 0.0;
    const double log_ratio = log_transition_density(y, x, h, model) + std::log(rho_y) -
                             log_transition_density(x, y, h, model) - std::log(rho_x);
    return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

int fold_into(Vec2& p, const Region& box) {
    int folds = 0;
    for (int a = 0; a < box.dim; ++a) {
        const double lo = box.lo[a];
        const double hi = box.hi[a];
        double v = p[a];
        while (v < lo || v > hi) {
            v = v < lo ? 2.0 * lo - v : 2.0 * hi - v;
            ++folds;
        }
        p[a] = v;
    }
    return folds;
}

Vec2 sample_rho_eq(const DiffusionModel& model, Rng& rng) {
    const Region& dom = model.domain();
    double bound = 0.0;
    constexpr int probes = 64;
    for (const auto& piece : model.rho_eq().pieces()) {
        const Region& r = piece.region;
        for (int i = 0; i <= probes; ++i) {
            for (int j = 0; j <= (r.dim == 2 ? probes : 0); ++j) {
                const Vec2 p{r.lo[0] + r.width(0) * i / probes, r.dim == 2 ? r.lo[1] + r.width(1) * j / probes : 0.0};
                bound = std::max(bound, piece.expr(p));
            }
        }
    }
    if (!(bound > 0.0)) throw Error(ErrorCode::zero_mass, "rho_eq vanishes on the domain");
    bound *= 1.25;
    for (int attempt = 0; attempt < 10'000'000; ++attempt) {
        Vec2 p{rng.uniform(dom.lo[0], dom.hi[0]), dom.dim == 2 ? rng.uniform(dom.lo[1], dom.hi[1]) : 0.0};
        if (rng.uniform() * bound < model.rho_eq()(p)) return p;
    }
    throw Error(ErrorCode::zero_mass, "rejection sampling of rho_eq did not terminate");
}

namespace {

Vec2 draw_noise(Rng& rng, int dim) {
    const double a = rng.normal();
    return {a, dim == 2 ? rng.normal() : 0.0};
}

Vec2 safe_drift(const DiffusionModel& model, Vec2 x) {
    // Folded states may sit exactly on a wall; evaluate just inside.
    const Region& d = model.domain();
    Vec2 p = x;
    for (int a = 0; a < d.dim; ++a) {
        const double eps = 1e-9 * d.width(a);
        p[a] = std::clamp(p[a], d.lo[a] + eps, d.hi[a] - eps);
    }
    return drift_from_model(model, p);
}

} // namespace

SampledTrajectory run(const DiffusionModel& model, const SamplerConfig& cfg) {
    if (!(cfg.h > 0.0)) throw Error(ErrorCode::invalid_argument, "step h must be positive");
    if (cfg.scheme == Scheme::em_full_drift && model.has_discontinuities()) {
        throw Error(ErrorCode::drift_undefined, "em-full-drift needs smooth D and rho_eq");
    }
    Rng rng = Rng::stream(cfg.seed, cfg.chain);
    const int dim = model.dim();
    const Region& box = model.domain();

    Vec2 x = cfg.x0_from_rho_eq ? sample_rho_eq(model, rng) : cfg.x0;
    if (dim == 1) x.y = 0.0;
    if (!box.contains(x)) throw Error(ErrorCode::invalid_argument, "x0 outside the domain");
    if (cfg.scheme == Scheme::maem && !(model.rho_eq()(x) > 0.0)) {
        throw Error(ErrorCode::zero_density_at_current, "maem needs rho_eq(x0) > 0");
    }

    SampledTrajectory traj;
    traj.dim = dim;
    traj.h = cfg.h;
    traj.stride = cfg.stride;
    traj.initial_position = x;
    const std::uint64_t burn = cfg.burn_in.value_or(cfg.x0_from_rho_eq ? 0 : cfg.steps / 100);
    traj.burn_in = std::min(burn, cfg.steps);
    traj.first_step = traj.burn_in;
    if (cfg.bins) {
        const std::uint64_t recorded = cfg.steps - traj.burn_in;
        const std::uint64_t batch_len = cfg.batches > 0 ? std::max<std::uint64_t>(1, recorded / cfg.batches) : 0;
        traj.bins.emplace(*cfg.bins, cfg.bin_axis, cfg.batches, batch_len);
    }
    if (cfg.stride > 0) {
        const std::uint64_t stored = (cfg.steps - traj.burn_in) / cfg.stride + 1;
        traj.positions.reserve(stored);
        traj.accepted.reserve(stored);
    }

    const bool fold_proposals = cfg.scheme != Scheme::maem || cfg.wall_mode == WallMode::fold;
    const double inv_2h_dim = 1.0 / (2.0 * cfg.h * dim);
    const bool d_constant = model.diffusion().pieces().size() == 1 && model.diffusion().pieces()[0].expr.is_constant();

    auto record_position = [&](std::uint64_t n, Vec2 p, bool accepted) {
        if (cfg.stride == 0 || n < traj.burn_in) return;
        if ((n - traj.burn_in) % cfg.stride != 0) return;
        traj.positions.push_back(p);
        traj.accepted.push_back(accepted ? 1 : 0);
    };
    record_position(0, x, true);

    for (std::uint64_t n = 0; n < cfg.steps; ++n) {
        const Vec2 noise = draw_noise(rng, dim);
        Vec2 y = em_step(x, cfg.h, model, noise);
        if (cfg.scheme == Scheme::em_full_drift) y += cfg.h * safe_drift(model, x);
        if (fold_proposals) {
            const int folds = fold_into(y, box);
            traj.wall_folds += static_cast<std::uint64_t>(folds);
            if (folds > 0 && cfg.scheme == Scheme::maem && !d_constant) traj.folded_kernel_inexact = true;
        }

        bool accepted = true;
        ++traj.proposals;
        if (cfg.scheme == Scheme::maem) {
            const double u = rng.uniform();
            accepted = u < accept_prob(x, y, cfg.h, model);
        }
        if (accepted) ++traj.acceptances;

        if (traj.bins && n >= traj.burn_in) {
            double sample = 0.0;
            if (accepted) {
                const Vec2 d = y - x;
                sample = (dim == 1 ? d.x * d.x : norm2(d)) * inv_2h_dim;
            }
            traj.bins->add(x[cfg.bin_axis], sample);
        }
        if (accepted) x = y;
        record_position(n + 1, x, accepted);
    }
    traj.final_position = x;
    return traj;
}

} // namespace sdd
