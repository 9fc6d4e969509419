#include "sdd/packing.hpp"
#include "sdd/error.hpp"
#include "sdd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sdd {

namespace {

// Cell list over centres for the packer. Cells are at least one final
// diameter wide, so overlap tests only look at the 3x3 neighbourhood.
class Packer {
public:
    Packer(const PackingRegion& spec, double cell_min) : spec_(spec) {
        const Region& g = spec.region;
        nx_ = std::max(1, static_cast<int>(std::floor(g.width(0) / cell_min)));
        ny_ = std::max(1, static_cast<int>(std::floor(g.width(1) / cell_min)));
        if (spec.mode == GeometryMode::periodic) {
            // wrapping needs three distinct cells per axis
            if (nx_ < 3 || ny_ < 3) nx_ = ny_ = 1;
        }
        cw_ = g.width(0) / nx_;
        ch_ = g.width(1) / ny_;
        cells_.assign(static_cast<std::size_t>(nx_) * ny_, {});
    }

    std::size_t size() const { return centres_.size(); }
    const std::vector<Vec2>& centres() const { return centres_; }

    Vec2 wrap(Vec2 p) const {
        if (spec_.mode != GeometryMode::periodic) return p;
        const Region& g = spec_.region;
        p.x -= g.width(0) * std::floor((p.x - g.lo[0]) / g.width(0));
        p.y -= g.width(1) * std::floor((p.y - g.lo[1]) / g.width(1));
        if (p.x >= g.hi[0]) p.x = g.lo[0];
        if (p.y >= g.hi[1]) p.y = g.lo[1];
        return p;
    }

    Vec2 separation(Vec2 a, Vec2 b) const {
        Vec2 d = b - a;
        if (spec_.mode == GeometryMode::periodic) {
            const double lx = spec_.region.width(0), ly = spec_.region.width(1);
            d.x -= lx * std::round(d.x / lx);
            d.y -= ly * std::round(d.y / ly);
        }
        return d;
    }

    // Centre constraints at radius r (line clearance, staying in the region).
    bool placeable(Vec2 p, double r) const {
        const Region& g = spec_.region;
        if (spec_.mode == GeometryMode::periodic) return true;
        const double x_lo = g.lo[0] + (spec_.clear_lo_x ? r : 0.0);
        const double x_hi = g.hi[0] - (spec_.clear_hi_x ? r : 0.0);
        return p.x >= x_lo && p.x <= x_hi && p.y >= g.lo[1] && p.y <= g.hi[1];
    }

    // Distance from p to the nearest other centre, capped at `cap`.
    double nearest(Vec2 p, std::size_t skip, double cap) const {
        double best = cap * cap;
        visit(p, [&](std::size_t j) {
            if (j == skip) return;
            best = std::min(best, norm2(separation(p, centres_[j])));
        });
        return std::sqrt(best);
    }

    bool free_at(Vec2 p, double r, std::size_t skip) const {
        bool ok = true;
        const double d2 = 4.0 * r * r;
        visit(p, [&](std::size_t j) {
            if (ok && j != skip && norm2(separation(p, centres_[j])) < d2) ok = false;
        });
        return ok;
    }

    void add(Vec2 p) {
        centres_.push_back(p);
        cell_of_.push_back(cell(p));
        cells_[cell_of_.back()].push_back(centres_.size() - 1);
    }

    void move(std::size_t i, Vec2 p) {
        const std::size_t from = cell_of_[i], to = cell(p);
        centres_[i] = p;
        if (from == to) return;
        auto& v = cells_[from];
        v.erase(std::find(v.begin(), v.end(), i));
        cells_[to].push_back(i);
        cell_of_[i] = to;
    }

    // Largest radius the current centres admit.
    double feasible_radius() const {
        double r = std::numeric_limits<double>::infinity();
        const Region& g = spec_.region;
        for (std::size_t i = 0; i < centres_.size(); ++i) {
            const Vec2 p = centres_[i];
            r = std::min(r, 0.5 * nearest(p, i, 2.0 * spec_.r + 1.0));
            if (spec_.mode == GeometryMode::box) {
                if (spec_.clear_lo_x) r = std::min(r, p.x - g.lo[0]);
                if (spec_.clear_hi_x) r = std::min(r, g.hi[0] - p.x);
            }
        }
        return r;
    }

private:
    std::size_t cell(Vec2 p) const {
        const Region& g = spec_.region;
        const int ix = std::clamp(static_cast<int>(std::floor((p.x - g.lo[0]) / cw_)), 0, nx_ - 1);
        const int iy = std::clamp(static_cast<int>(std::floor((p.y - g.lo[1]) / ch_)), 0, ny_ - 1);
        return static_cast<std::size_t>(iy) * nx_ + ix;
    }

    template <class Fn>
    void visit(Vec2 p, Fn&& fn) const {
        if (nx_ == 1 && ny_ == 1) {
            for (std::size_t j : cells_[0]) fn(j);
            return;
        }
        const std::size_t c = cell(p);
        const int cx = static_cast<int>(c % nx_), cy = static_cast<int>(c / nx_);
        const bool periodic = spec_.mode == GeometryMode::periodic;
        for (int dy = -1; dy <= 1; ++dy) {
            int iy = cy + dy;
            if (periodic) iy = (iy + ny_) % ny_;
            if (iy < 0 || iy >= ny_) continue;
            for (int dx = -1; dx <= 1; ++dx) {
                int ix = cx + dx;
                if (periodic) ix = (ix + nx_) % nx_;
                if (ix < 0 || ix >= nx_) continue;
                for (std::size_t j : cells_[static_cast<std::size_t>(iy) * nx_ + ix]) fn(j);
            }
        }
    }

    const PackingRegion& spec_;
    int nx_ = 1, ny_ = 1;
    double cw_ = 0.0, ch_ = 0.0;
    std::vector<Vec2> centres_;
    std::vector<std::size_t> cell_of_;
    std::vector<std::vector<std::size_t>> cells_;
};

Vec2 random_point(const PackingRegion& spec, double r, Rng& rng) {
    const Region& g = spec.region;
    double x_lo = g.lo[0], x_hi = g.hi[0];
    if (spec.mode == GeometryMode::box) {
        if (spec.clear_lo_x) x_lo += r;
        if (spec.clear_hi_x) x_hi -= r;
    }
    return {rng.uniform(x_lo, x_hi), rng.uniform(g.lo[1], g.hi[1])};
}

double clipped_area(const PackingRegion& spec, Vec2 c, double r) {
    if (spec.mode == GeometryMode::periodic) return std::numbers::pi * r * r;
    const Region& g = spec.region;
    return disc_rect_area(c, r, g.lo[0], g.hi[0], g.lo[1], g.hi[1]);
}

std::vector<Disc> to_discs(const Packer& p, const PackingRegion& spec) {
    std::vector<Disc> out;
    out.reserve(p.size());
    for (Vec2 c : p.centres()) out.push_back({c, spec.r, spec.side});
    return out;
}

// Single-disc Metropolis moves of the hard-disc ensemble, with the trial
// step tuned towards an acceptance rate between 0.3 and 0.5.
class HardDiscMoves {
public:
    explicit HardDiscMoves(const PackingRegion& spec) : r_(spec.r), step_(0.25 * spec.r) {}

    void sweep(Packer& p, double radius, Rng& rng) {
        const std::size_t n = p.size();
        if (n == 0) return;
        std::size_t accepted = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t i = rng.below(n);
            const Vec2 trial = p.wrap(p.centres()[i] + Vec2{rng.uniform(-step_, step_), rng.uniform(-step_, step_)});
            if (p.placeable(trial, radius) && p.free_at(trial, radius, i)) {
                p.move(i, trial);
                ++accepted;
            }
        }
        const double rate = static_cast<double>(accepted) / static_cast<double>(n);
        if (rate > 0.5) step_ = std::min(step_ * 1.1, r_);
        if (rate < 0.3) step_ = std::max(step_ * 0.9, 1e-9 * r_);
    }

private:
    double r_;
    double step_;
};

// Dilute RSA seed at a reduced radius, then hard-disc MC sweeps with the
// radius grown after each sweep to the largest value the centres admit.
std::vector<Disc> pack_growth(const PackingRegion& spec, std::size_t n, Rng& rng, const PackingOptions& opt,
                              PackingReport& rep) {
    const double area = spec.region.measure();
    const double seed_cov = 0.35;
    const double r_seed = std::min(spec.r, std::sqrt(seed_cov * area / (std::numbers::pi * static_cast<double>(n))));
    Packer p(spec, 2.0 * spec.r);
    std::uint64_t failures = 0;
    while (p.size() < n) {
        const Vec2 c = random_point(spec, r_seed, rng);
        if (!p.free_at(c, r_seed, std::numeric_limits<std::size_t>::max())) {
            if (++failures > 50'000'000) throw Error(ErrorCode::packing_failed, "could not place the dilute seed");
            continue;
        }
        p.add(c);
    }

    double r = std::min(spec.r, p.feasible_radius());
    HardDiscMoves moves(spec);
    auto sweep = [&](double radius) { moves.sweep(p, radius, rng); };

    int sweeps = 0;
    while (r < spec.r) {
        if (sweeps >= opt.max_sweeps) {
            throw Error(ErrorCode::packing_failed, "radius growth stalled at " + std::to_string(r) + " of " +
                                                       std::to_string(spec.r) + " after " +
                                                       std::to_string(sweeps) + " sweeps");
        }
        sweep(r);
        ++sweeps;
        r = std::min(spec.r, p.feasible_radius());
    }
    for (int s = 0; s < opt.equilibration_sweeps; ++s) sweep(spec.r);
    rep.method = sweeps == 0 ? "rsa" : "growth";
    rep.growth_sweeps = sweeps;
    return to_discs(p, spec);
}

double realized_phi(const PackingRegion& spec, const std::vector<Disc>& discs) {
    double covered = 0.0;
    for (const auto& d : discs) covered += clipped_area(spec, d.c, d.r);
    return 1.0 - covered / spec.region.measure();
}

void check_phi(double phi) {
    if (!(phi > phi_min && phi < 1.0)) {
        throw Error(ErrorCode::phi_out_of_range,
                    "free fraction " + std::to_string(phi) + " outside (" + std::to_string(phi_min) + ", 1)");
    }
}

} // namespace

std::vector<Disc> pack_discs(const PackingRegion& spec, Rng& rng, const PackingOptions& opt, PackingReport* report) {
    check_phi(spec.phi);
    const Region& g = spec.region;
    if (!(spec.r > 0.0)) throw Error(ErrorCode::invalid_argument, "disc radius must be positive");
    const double usable_w = g.width(0) - (spec.clear_lo_x ? spec.r : 0.0) - (spec.clear_hi_x ? spec.r : 0.0);
    if (!(usable_w > 0.0) || 2.0 * spec.r > std::min(g.width(0), g.width(1))) {
        throw Error(ErrorCode::invalid_argument, "region too small for discs of this radius");
    }
    PackingReport rep;
    const double area = g.measure();
    const double coverage = 1.0 - spec.phi;
    const double disc_area = std::numbers::pi * spec.r * spec.r;
    std::vector<Disc> discs;

    // Expected share of disc area lost through walls the discs may cross.
    double exposed = 0.0;
    if (spec.mode == GeometryMode::box) {
        exposed = 2.0 * g.width(0) + (spec.clear_lo_x ? 0.0 : g.width(1)) + (spec.clear_hi_x ? 0.0 : g.width(1));
    }
    const double loss = 2.0 * exposed * spec.r / (3.0 * std::numbers::pi * area);
    auto n = static_cast<long>(std::llround(coverage * area / (disc_area * (1.0 - loss))));
    n = std::max(1L, n);
    std::vector<Disc> best;
    double best_err = std::numeric_limits<double>::infinity();
    for (int attempt = 1; attempt <= opt.max_attempts; ++attempt) {
        auto trial = pack_growth(spec, static_cast<std::size_t>(n), rng, opt, rep);
        rep.attempts = attempt;
        const double err = realized_phi(spec, trial) - spec.phi;
        if (std::abs(err) < std::abs(best_err)) {
            best_err = err;
            best = std::move(trial);
        }
        if (std::abs(best_err) <= opt.phi_aim || spec.mode == GeometryMode::periodic) break;
        const double mean_area = (1.0 - spec.phi - err) * area / static_cast<double>(n);
        long dn = std::lround(err * area / mean_area);
        if (dn == 0) dn = err > 0 ? 1 : -1;
        n = std::max(1L, n + dn);
    }
    discs = std::move(best);
    rep.discs = discs.size();
    rep.realized_phi = realized_phi(spec, discs);
    if (std::abs(rep.realized_phi - spec.phi) > opt.phi_tolerance) {
        throw Error(ErrorCode::packing_failed, "realized free fraction " + std::to_string(rep.realized_phi) +
                                                   " misses target " + std::to_string(spec.phi));
    }
    if (report) *report = rep;
    return discs;
}

DiscField generate_field(const Region& box, double r, double phi, std::uint64_t seed, int max_sweeps,
                         PackingReport* report) {
    check_phi(phi);
    Rng rng = Rng::stream(seed, 0);
    PackingOptions opt;
    opt.max_sweeps = max_sweeps;
    PackingRegion spec{box, r, phi, GeometryMode::box, false, false, 0};
    DiscField field(box, GeometryMode::box, pack_discs(spec, rng, opt, report));
    return field;
}

DiscField generate_two_domain(const Region& box, double x_mid, double r1, double phi1, double r2, double phi2,
                              std::uint64_t seed, const PackingOptions& options, PackingReport* left,
                              PackingReport* right) {
    check_phi(phi1);
    check_phi(phi2);
    Region lr = box, rr = box;
    lr.hi[0] = x_mid;
    rr.lo[0] = x_mid;
    Rng rng_l = Rng::stream(seed, 0);
    Rng rng_r = Rng::stream(seed, 1);
    auto discs = pack_discs({lr, r1, phi1, GeometryMode::box, false, true, 0}, rng_l, options, left);
    auto right_discs = pack_discs({rr, r2, phi2, GeometryMode::box, true, false, 1}, rng_r, options, right);
    discs.insert(discs.end(), right_discs.begin(), right_discs.end());
    return DiscField(box, GeometryMode::box, std::move(discs), x_mid);
}

DiscField generate_periodic(double side, double r, double phi, std::uint64_t seed, const PackingOptions& options,
                            PackingReport* report) {
    check_phi(phi);
    const Region cell = Region::rect(0.0, side, 0.0, side);
    Rng rng = Rng::stream(seed, 0);
    PackingOptions opt = options;
    PackingRegion spec{cell, r, phi, GeometryMode::periodic, false, false, 0};
    const double disc_area = std::numbers::pi * r * r;
    const auto n = std::llround((1.0 - phi) * cell.measure() / disc_area);
    std::vector<Disc> discs;
    PackingReport rep;
    if (1.0 - phi <= opt.rsa_max_coverage || n == 0) {
        // Exact count: place n discs by RSA directly.
        Packer p(spec, 2.0 * r);
        std::uint64_t failures = 0;
        while (p.size() < static_cast<std::size_t>(n)) {
            const Vec2 c = random_point(spec, r, rng);
            if (!p.free_at(c, r, std::numeric_limits<std::size_t>::max())) {
                if (++failures > 50'000'000) throw Error(ErrorCode::packing_failed, "periodic RSA saturated");
                continue;
            }
            p.add(c);
        }
        HardDiscMoves moves(spec);
        for (int s = 0; s < opt.equilibration_sweeps; ++s) moves.sweep(p, r, rng);
        discs = to_discs(p, spec);
        rep.method = "rsa";
        rep.attempts = 1;
    } else {
        discs = pack_growth(spec, static_cast<std::size_t>(n), rng, opt, rep);
        rep.attempts = 1;
    }
    rep.discs = discs.size();
    rep.realized_phi = 1.0 - static_cast<double>(discs.size()) * disc_area / cell.measure();
    if (std::abs(rep.realized_phi - phi) > opt.phi_tolerance) {
        throw Error(ErrorCode::packing_failed, "cell too small to reach the target free fraction");
    }
    if (report) *report = rep;
    return DiscField(cell, GeometryMode::periodic, std::move(discs));
}

} // namespace sdd
