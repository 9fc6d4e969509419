#include "sdd/analysis.hpp"
#include "sdd/error.hpp"
#include "sdd/model.hpp"
#include "sdd/trajectory.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sdd {

std::size_t BinEdges::index(double x) const {
    if (!(x >= lo && x <= hi)) throw Error(ErrorCode::sample_out_of_range, "sample outside the binned range");
    const auto i = static_cast<std::size_t>((x - lo) / width());
    return std::min(i, count - 1);
}

BinAccumulator::BinAccumulator(BinEdges edges, int axis, std::size_t batches, std::uint64_t batch_length)
    : edges_(edges), axis_(axis), batch_length_(batches > 0 ? batch_length : 0), counts_(edges.count, 0),
      deff_sum_(edges.count, 0.0), deff_sum2_(edges.count, 0.0), deff_n_(edges.count, 0) {
    if (edges.count == 0 || !(edges.hi > edges.lo)) throw Error(ErrorCode::invalid_argument, "bad bin edges");
    if (batches > 0) {
        if (batch_length == 0) throw Error(ErrorCode::invalid_argument, "batch length must be positive");
        batch_counts_.assign(batches, std::vector<std::uint64_t>(edges.count, 0));
    }
}

void BinAccumulator::count(std::size_t bin) {
    ++counts_[bin];
    ++total_;
    if (batch_length_ > 0) {
        const std::uint64_t b = seen_ / batch_length_;
        if (b < batch_counts_.size()) ++batch_counts_[b][bin];
    }
    ++seen_;
}

void BinAccumulator::add(double coord, double d_eff_sample) {
    const std::size_t bin = edges_.index(coord);
    count(bin);
    deff_sum_[bin] += d_eff_sample;
    deff_sum2_[bin] += d_eff_sample * d_eff_sample;
    ++deff_n_[bin];
}

void BinAccumulator::add_position(double coord) {
    count(edges_.index(coord));
}

void BinAccumulator::merge(const BinAccumulator& other) {
    if (other.edges_.count != edges_.count || other.edges_.lo != edges_.lo || other.edges_.hi != edges_.hi) {
        throw Error(ErrorCode::invalid_argument, "merging accumulators with different bins");
    }
    total_ += other.total_;
    seen_ += other.seen_;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        counts_[i] += other.counts_[i];
        deff_sum_[i] += other.deff_sum_[i];
        deff_sum2_[i] += other.deff_sum2_[i];
        deff_n_[i] += other.deff_n_[i];
    }
    // Batches of independent chains are exchangeable, so they are pooled.
    batch_counts_.insert(batch_counts_.end(), other.batch_counts_.begin(), other.batch_counts_.end());
}

BinnedStats BinAccumulator::finish() const {
    BinnedStats s;
    s.edges = edges_;
    s.total = total_;
    s.counts = counts_;
    const std::size_t n = edges_.count;
    s.density.assign(n, 0.0);
    s.density_stderr.assign(n, 0.0);
    s.d_eff.assign(n, std::numeric_limits<double>::quiet_NaN());
    s.d_eff_stderr.assign(n, std::numeric_limits<double>::quiet_NaN());
    s.d_eff_samples = deff_n_;
    const double w = edges_.width();
    const double total = static_cast<double>(total_);
    for (std::size_t i = 0; i < n; ++i) {
        if (total_ > 0) {
            const double p = static_cast<double>(counts_[i]) / total;
            s.density[i] = p / w;
            s.density_stderr[i] = std::sqrt(p * (1.0 - p) / total) / w;
        }
        if (deff_n_[i] > 0) {
            const double m = static_cast<double>(deff_n_[i]);
            const double mean = deff_sum_[i] / m;
            s.d_eff[i] = mean;
            if (deff_n_[i] > 1) {
                const double var = std::max(0.0, (deff_sum2_[i] - m * mean * mean) / (m - 1.0));
                s.d_eff_stderr[i] = std::sqrt(var / m);
            }
        }
    }

    // Overdispersion of batch counts relative to the multinomial variance.
    if (batch_counts_.size() >= 2) {
        const double nb = static_cast<double>(batch_counts_.size());
        double ratio_sum = 0.0;
        std::size_t used = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double mean_count = 0.0;
            double mean_total = 0.0;
            for (const auto& b : batch_counts_) {
                mean_count += static_cast<double>(b[i]);
                mean_total += static_cast<double>(std::accumulate(b.begin(), b.end(), std::uint64_t{0}));
            }
            mean_count /= nb;
            mean_total /= nb;
            if (mean_total <= 0.0) continue;
            const double p = mean_count / mean_total;
            if (p <= 0.0 || p >= 1.0) continue;
            double var = 0.0;
            for (const auto& b : batch_counts_) {
                const double d = static_cast<double>(b[i]) - mean_count;
                var += d * d;
            }
            var /= nb - 1.0;
            ratio_sum += var / (mean_total * p * (1.0 - p));
            ++used;
        }
        if (used > 0) s.count_inflation = std::max(1.0, ratio_sum / static_cast<double>(used));
        batch_correction(s);
    }
    return s;
}

void BinAccumulator::batch_correction(BinnedStats& s) const {
    // A = N Cov(fractions) scaled by 1 / sqrt(p_i p_j); the Pearson statistic
    // is approximately sum_k lambda_k z_k^2 over the eigenvalues of A.
    const std::size_t n = counts_.size();
    const std::size_t nb = batch_counts_.size();
    std::vector<std::vector<double>> f(nb, std::vector<double>(n, 0.0));
    double batched_total = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
        const double t = static_cast<double>(std::accumulate(batch_counts_[b].begin(), batch_counts_[b].end(), std::uint64_t{0}));
        if (t <= 0.0) return;
        batched_total += t;
        for (std::size_t i = 0; i < n; ++i) f[b][i] = static_cast<double>(batch_counts_[b][i]) / t;
    }
    std::vector<double> mean(n, 0.0);
    for (const auto& row : f)
        for (std::size_t i = 0; i < n; ++i) mean[i] += row[i] / static_cast<double>(nb);
    std::vector<std::size_t> used;
    for (std::size_t i = 0; i < n; ++i)
        if (mean[i] > 0.0) used.push_back(i);
    if (used.size() < 2) return;
    const double dof_b = static_cast<double>(nb - 1);
    double tr = 0.0, tr2 = 0.0;
    for (std::size_t a = 0; a < used.size(); ++a) {
        for (std::size_t c = 0; c < used.size(); ++c) {
            const std::size_t i = used[a], j = used[c];
            double cov = 0.0;
            for (const auto& row : f) cov += (row[i] - mean[i]) * (row[j] - mean[j]);
            // Covariance of the pooled fraction over nb batches, in units of the iid variance.
            const double aij = batched_total * cov / dof_b / static_cast<double>(nb) / std::sqrt(mean[i] * mean[j]);
            if (i == j) tr += aij;
            tr2 += aij * aij;
        }
    }
    if (!(tr > 0.0)) return;
    // Unbiased tr(A^2) under normal batch means, floored where A would be
    // a multiple of the identity.
    const double k = dof_b;
    if (k > 2.0) tr2 = k * k / ((k - 1.0) * (k + 2.0)) * (tr2 - tr * tr / k);
    const double bins_dof = static_cast<double>(used.size() - 1);
    tr2 = std::max(tr2, tr * tr / bins_dof);
    s.chi_square_scale = tr2 / tr;
    s.effective_dof = tr * tr / tr2;
}

BinnedStats bin_trajectory(const SampledTrajectory& traj, const BinEdges& edges, int axis, DeffMode mode) {
    if (traj.positions.empty()) throw Error(ErrorCode::invalid_argument, "trajectory has no stored positions");
    if (mode == DeffMode::accepted_only && traj.accepted.size() != traj.positions.size()) {
        throw Error(ErrorCode::invalid_argument, "accepted-only D_eff needs per-step acceptance flags");
    }
    BinAccumulator acc(edges, axis);
    const double scale = 1.0 / (2.0 * traj.h * static_cast<double>(traj.stride) * traj.dim);
    const std::size_t n = traj.positions.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const Vec2 x = traj.positions[i];
        const Vec2 d = traj.positions[i + 1] - x;
        const double sample = (traj.dim == 1 ? d.x * d.x : norm2(d)) * scale;
        if (mode == DeffMode::accepted_only && traj.accepted[i + 1] == 0) {
            acc.add_position(x[axis]);
        } else {
            acc.add(x[axis], sample);
        }
    }
    acc.add_position(traj.positions.back()[axis]);
    return acc.finish();
}

std::vector<MsdPoint> msd_curve(const std::vector<std::vector<Vec2>>& displacements, std::span<const double> times) {
    if (times.size() < 2) throw Error(ErrorCode::invalid_argument, "MSD needs at least two checkpoints");
    if (displacements.size() < 2) throw Error(ErrorCode::invalid_argument, "MSD needs an ensemble of at least two");
    for (const auto& d : displacements) {
        if (d.size() != times.size()) throw Error(ErrorCode::invalid_argument, "checkpoint count mismatch");
    }
    const double m = static_cast<double>(displacements.size());
    std::vector<MsdPoint> out(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        double s = 0.0, s2 = 0.0, sx = 0.0, sx2 = 0.0, sy = 0.0, sy2 = 0.0;
        for (const auto& d : displacements) {
            const double x2 = d[k].x * d[k].x;
            const double y2 = d[k].y * d[k].y;
            s += x2 + y2;
            s2 += (x2 + y2) * (x2 + y2);
            sx += x2;
            sx2 += x2 * x2;
            sy += y2;
            sy2 += y2 * y2;
        }
        auto se = [m](double sum, double sum2) {
            const double mean = sum / m;
            return std::sqrt(std::max(0.0, (sum2 / m - mean * mean) * m / (m - 1.0)) / m);
        };
        out[k] = {times[k], s / m, se(s, s2), sx / m, sy / m, se(sx, sx2), se(sy, sy2)};
    }
    return out;
}

double chi_square_survival(double statistic, double dof) {
    if (!(dof > 0.0)) return 1.0;
    if (statistic <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

ChiSquareResult compare_chi_square(const BinnedStats& observed, std::span<const double> expected_probabilities,
                                   double inflation) {
    const std::size_t n = observed.counts.size();
    if (expected_probabilities.size() != n) throw Error(ErrorCode::invalid_argument, "bin count mismatch");
    if (!(inflation >= 1.0)) throw Error(ErrorCode::invalid_argument, "inflation factor must be >= 1");
    const double total = static_cast<double>(observed.total);
    double stat = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = expected_probabilities[i];
        if (observed.counts[i] < 5) throw Error(ErrorCode::low_count, "fewer than 5 samples in a bin");
        if (!(p > 0.0)) throw Error(ErrorCode::invalid_argument, "expected probability must be positive on occupied bins");
        const double e = total * p;
        const double d = static_cast<double>(observed.counts[i]) - e;
        stat += d * d / e;
    }
    stat /= inflation;
    ChiSquareResult r;
    r.statistic = stat;
    r.dof = n - 1;
    r.effective_dof = static_cast<double>(r.dof);
    r.p_value = chi_square_survival(stat, r.effective_dof);
    return r;
}

ChiSquareResult compare_chi_square_batched(const BinnedStats& observed, std::span<const double> expected_probabilities) {
    ChiSquareResult r = compare_chi_square(observed, expected_probabilities, 1.0);
    r.statistic /= observed.chi_square_scale;
    if (observed.effective_dof > 0.0) r.effective_dof = std::min(observed.effective_dof, static_cast<double>(r.dof));
    r.p_value = chi_square_survival(r.statistic, r.effective_dof);
    return r;
}

ChiSquareResult compare_chi_square_batched(const BinnedStats& observed, const ScalarField& expected) {
    return compare_chi_square_batched(observed, bin_probabilities(expected, observed.edges));
}

std::vector<double> bin_probabilities(const ScalarField& density, const BinEdges& edges) {
    std::vector<double> p(edges.count);
    double sum = 0.0;
    for (std::size_t i = 0; i < edges.count; ++i) {
        Region bin = density.bounds();
        bin.lo[0] = edges.edge(i);
        bin.hi[0] = edges.edge(i + 1);
        p[i] = density.integrate(bin);
        sum += p[i];
    }
    if (!(sum > 0.0)) throw Error(ErrorCode::zero_mass, "density has no mass over the bins");
    for (auto& v : p) v /= sum;
    return p;
}

ChiSquareResult compare_chi_square(const BinnedStats& observed, const ScalarField& expected, double inflation) {
    const auto p = bin_probabilities(expected, observed.edges);
    return compare_chi_square(observed, p, inflation);
}

BatchMeans batch_means(std::span<const double> series, std::size_t batches) {
    if (batches < 2 || series.size() < batches) throw Error(ErrorCode::invalid_argument, "need at least two non-empty batches");
    const std::size_t len = series.size() / batches;
    std::vector<double> means(batches);
    for (std::size_t b = 0; b < batches; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < len; ++i) s += series[b * len + i];
        means[b] = s / static_cast<double>(len);
    }
    const double nb = static_cast<double>(batches);
    const double mean = std::accumulate(means.begin(), means.end(), 0.0) / nb;
    double var = 0.0;
    for (double m : means) var += (m - mean) * (m - mean);
    var /= nb - 1.0;
    return {mean, std::sqrt(var / nb), batches};
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw Error(ErrorCode::invalid_argument, "line fit needs matching series of length >= 2");
    const double nn = static_cast<double>(n);
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / nn;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / nn;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw Error(ErrorCode::invalid_argument, "degenerate abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (n > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - (f.intercept + f.slope * x[i]);
            rss += r * r;
        }
        f.slope_stderr = std::sqrt(rss / (nn - 2.0) / sxx);
    }
    return f;
}

} // namespace sdd
