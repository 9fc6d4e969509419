#pragma once

#include "sdd/analysis.hpp"
#include "sdd/disc_field.hpp"
#include "sdd/packing.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace sdd {

// Mean free path of a point among discs of radius r at free fraction phi.
double mean_free_path(double r, double phi);

// Two equal halves of a width x height box, split at the vertical midline.
struct TwoDomainSetup {
    double r1 = 0.3;
    double phi1 = 0.5;
    double r2 = 0.6;
    double phi2 = 0.5;
    double width = 60.0;
    double height = 30.0;

    Region box() const { return Region::rect(0.0, width, 0.0, height); }
    double x_mid() const { return 0.5 * width; }
};

DiscField make_two_domain_field(const TwoDomainSetup& setup, std::uint64_t seed, const PackingOptions& packing = {},
                                PackingReport* left = nullptr, PackingReport* right = nullptr);

struct OccupationOptions {
    std::size_t trajectories = 1;  // independent starts on the same field
    std::size_t batches = 20;      // minimum number of batch-means blocks
    unsigned workers = 1;
    double sample_period = 0.0;    // > 0 also counts periodic position samples per side
    PackingOptions packing;
};

struct OccupationResult {
    double time_left = 0.0;
    double time_right = 0.0;
    double ratio = 0.0;      // right / left
    double std_error = 0.0;  // batch means
    double trajectory_time = 0.0;
    std::size_t trajectories = 0;
    std::size_t batches = 0;
    std::uint64_t seed = 0;
    std::uint64_t events = 0;
    std::uint64_t line_crossings = 0;
    double phi_left = 0.0;   // realized
    double phi_right = 0.0;
    std::uint64_t samples_left = 0;
    std::uint64_t samples_right = 0;
    std::optional<double> sampled_ratio;
    std::vector<double> batch_ratios;

    double total_time() const { return time_left + time_right; }
};

// Occupation times per side, accounted exactly at line crossings. Each of
// `trajectories` runs for `trajectory_time` from an independent uniform start.
OccupationResult occupation_ratio(const DiscField& field, double trajectory_time, std::uint64_t seed,
                                  const OccupationOptions& options = {});
OccupationResult occupation_ratio(const TwoDomainSetup& setup, double trajectory_time, std::uint64_t seed,
                                  const OccupationOptions& options = {});

struct DiffusionOptions {
    // Each member runs run_multiple * T; the MSD at lag t averages over all
    // checkpoint origins with origin + t inside the run.
    std::size_t run_multiple = 1;
    std::size_t checkpoints = 40;  // checkpoints per horizon T
    double fit_from = 0.25;        // window [fit_from * T, T]
    double cell_side = 0.0;        // 0: max(40 r, 20 mean free paths)
    std::size_t min_members = 100;
    unsigned workers = 1;
    PackingOptions packing;
};

struct DiffusionEstimate {
    double d_hat = 0.0;
    double std_error = 0.0;          // spread of per-member slopes / sqrt(M)
    double regression_stderr = 0.0;  // least-squares slope error of the mean curve / 4
    double t_lo = 0.0;
    double t_hi = 0.0;
    std::size_t members = 0;
    std::size_t window_points = 0;
    double r = 0.0;
    double phi = 0.0;
    double cell_side = 0.0;
    double d_x = 0.0;  // from <x^2> = 2 D t
    double d_y = 0.0;
    double std_error_x = 0.0;
    double std_error_y = 0.0;
    std::vector<MsdPoint> msd;
    std::uint64_t events = 0;

    double f() const { return d_hat / r; }
    bool isotropic(double sigmas = 3.0) const;
};

DiffusionEstimate estimate_D(double r, double phi, std::size_t members, double horizon, std::uint64_t seed,
                             const DiffusionOptions& options = {});

struct FCurvePoint {
    double phi = 0.0;
    double f = 0.0;
    double f_stderr = 0.0;
    DiffusionEstimate estimate;
    bool increasing = true;  // f above the previous point (flag only)
};

std::vector<FCurvePoint> f_curve(const std::vector<double>& phis, double r_ref, std::size_t members, double horizon,
                                 std::uint64_t seed, const DiffusionOptions& options = {});

// Equilibrium density per side: phi_i / (A (phi1 + phi2)) for sides of area A.
std::pair<double, double> rho_eq_from_phis(double phi1, double phi2, double area);

} // namespace sdd
