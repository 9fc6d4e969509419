#pragma once

#include "sdd/disc_field.hpp"
#include "sdd/rng.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

namespace sdd {

// Densest free fraction of equal discs (hexagonal packing).
inline const double phi_min = 1.0 - std::numbers::pi / std::sqrt(12.0);

struct PackingOptions {
    int max_sweeps = 20000;            // growth sweeps before PackingFailed
    int equilibration_sweeps = 100;    // hard-disc MC sweeps at full radius
    double rsa_max_coverage = 0.45;    // periodic cells: above this, grow from a dilute seed
    double phi_tolerance = 0.005;
    double phi_aim = 0.002;            // disc-count corrections stop once this close
    int max_attempts = 16;             // disc-count corrections
};

struct PackingReport {
    std::string method;  // "rsa" or "growth"
    std::size_t discs = 0;
    int growth_sweeps = 0;
    int attempts = 0;
    double realized_phi = 1.0;
};

// One rectangle of equal discs with target free fraction phi. Centres lie in
// the rectangle; discs may cross its edges except the ones flagged `clear_*`,
// which no disc may touch. Periodic mode wraps both axes instead.
struct PackingRegion {
    Region region;
    double r = 0.0;
    double phi = 1.0;
    GeometryMode mode = GeometryMode::box;
    bool clear_lo_x = false;
    bool clear_hi_x = false;
    int side = 0;
};

std::vector<Disc> pack_discs(const PackingRegion& spec, Rng& rng, const PackingOptions& options = {},
                             PackingReport* report = nullptr);

// Single box with walls.
DiscField generate_field(const Region& box, double r, double phi, std::uint64_t seed, int max_sweeps = 20000,
                         PackingReport* report = nullptr);

// Box split at x_mid; each side packed independently and kept clear of the line.
DiscField generate_two_domain(const Region& box, double x_mid, double r1, double phi1, double r2, double phi2,
                              std::uint64_t seed, const PackingOptions& options = {},
                              PackingReport* left = nullptr, PackingReport* right = nullptr);

// Square periodic cell [0, side]^2.
DiscField generate_periodic(double side, double r, double phi, std::uint64_t seed,
                            const PackingOptions& options = {}, PackingReport* report = nullptr);

} // namespace sdd
