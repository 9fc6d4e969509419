#pragma once

#include "sdd/vec2.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sdd {

class ScalarField;
struct SampledTrajectory;

struct BinEdges {
    double lo = -1.0;
    double hi = 1.0;
    std::size_t count = 20;

    static BinEdges uniform(double lo, double hi, std::size_t count) { return {lo, hi, count}; }

    double width() const { return (hi - lo) / static_cast<double>(count); }
    double edge(std::size_t i) const { return lo + width() * static_cast<double>(i); }
    double center(std::size_t i) const { return lo + width() * (static_cast<double>(i) + 0.5); }
    // Throws SampleOutOfRange outside [lo, hi]; x == hi maps to the last bin.
    std::size_t index(double x) const;
};

struct BinnedStats {
    BinEdges edges;
    std::uint64_t total = 0;
    std::vector<std::uint64_t> counts;
    std::vector<double> density;
    std::vector<double> density_stderr;   // binomial, iid samples
    std::vector<double> d_eff;            // mean of (dX)^2 / (2 h dim) per bin; NaN if no samples
    std::vector<double> d_eff_stderr;
    std::vector<std::uint64_t> d_eff_samples;
    // Variance inflation of bin counts relative to iid sampling, estimated
    // from batch counts (1 when no batches were recorded).
    double count_inflation = 1.0;
    // Second-order correction of the Pearson statistic from the batch
    // covariance of bin fractions: X^2 / chi_square_scale is compared with
    // chi-square on effective_dof degrees of freedom (0: bins - 1).
    double chi_square_scale = 1.0;
    double effective_dof = 0.0;
};

// Online per-bin accumulator over one coordinate axis. Mergeable; merge is
// associative and commutative.
class BinAccumulator {
public:
    BinAccumulator(BinEdges edges, int axis = 0, std::size_t batches = 0, std::uint64_t batch_length = 0);

    // One sample at `coord`; `d_eff_sample` is (X_{n+1} - X_n)^2 / (2 h dim).
    void add(double coord, double d_eff_sample);
    void add_position(double coord);
    void merge(const BinAccumulator& other);

    const BinEdges& edges() const { return edges_; }
    int axis() const { return axis_; }
    std::uint64_t total() const { return total_; }
    const std::vector<std::uint64_t>& counts() const { return counts_; }
    const std::vector<std::vector<std::uint64_t>>& batch_counts() const { return batch_counts_; }

    BinnedStats finish() const;

private:
    void count(std::size_t bin);
    void batch_correction(BinnedStats& s) const;

    BinEdges edges_;
    int axis_;
    std::uint64_t batch_length_;
    std::uint64_t total_ = 0;
    std::uint64_t seen_ = 0;
    std::vector<std::uint64_t> counts_;
    std::vector<double> deff_sum_;
    std::vector<double> deff_sum2_;
    std::vector<std::uint64_t> deff_n_;
    std::vector<std::vector<std::uint64_t>> batch_counts_;
};

enum class DeffMode { all_steps, accepted_only };

// Bins a stored trajectory. D_eff uses every step starting in the bin; with
// all_steps, rejected steps contribute zero displacement.
BinnedStats bin_trajectory(const SampledTrajectory& traj, const BinEdges& edges, int axis = 0,
                           DeffMode mode = DeffMode::all_steps);

struct MsdPoint {
    double t = 0.0;
    double msd = 0.0;
    double std_error = 0.0;
    double msd_x = 0.0;
    double msd_y = 0.0;
    double std_error_x = 0.0;
    double std_error_y = 0.0;
};

// Ensemble MSD: displacements[m][k] is member m's displacement x(t_k) - x(0).
std::vector<MsdPoint> msd_curve(const std::vector<std::vector<Vec2>>& displacements, std::span<const double> times);

struct ChiSquareResult {
    double statistic = 0.0;
    std::size_t dof = 0;
    double effective_dof = 0.0;
    double p_value = 1.0;
};

// Pearson chi-square of observed bin counts against expected bin
// probabilities. `inflation` divides the statistic to account for serially
// correlated samples (1 for iid draws).
ChiSquareResult compare_chi_square(const BinnedStats& observed, std::span<const double> expected_probabilities,
                                   double inflation = 1.0);
ChiSquareResult compare_chi_square(const BinnedStats& observed, const ScalarField& expected, double inflation = 1.0);

// Same comparison for serially correlated samples, using the observed
// chi_square_scale and effective_dof.
ChiSquareResult compare_chi_square_batched(const BinnedStats& observed, std::span<const double> expected_probabilities);
ChiSquareResult compare_chi_square_batched(const BinnedStats& observed, const ScalarField& expected);

// Probability mass of a (not necessarily normalized) density in each bin,
// normalized over the binned range.
std::vector<double> bin_probabilities(const ScalarField& density, const BinEdges& edges);

double chi_square_survival(double statistic, double dof);

struct BatchMeans {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t batches = 0;
};

// Mean and batch-means standard error of a series split into `batches`
// contiguous equal blocks (a trailing remainder is dropped).
BatchMeans batch_means(std::span<const double> series, std::size_t batches);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

} // namespace sdd
