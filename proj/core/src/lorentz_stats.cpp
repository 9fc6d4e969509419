#include "sdd/lorentz_stats.hpp"
#include "sdd/billiard.hpp"
#include "sdd/error.hpp"
#include "sdd/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace sdd {

double mean_free_path(double r, double phi) {
    return std::numbers::pi * phi * r / (2.0 * (1.0 - phi));
}

DiscField make_two_domain_field(const TwoDomainSetup& s, std::uint64_t seed, const PackingOptions& packing,
                                PackingReport* left, PackingReport* right) {
    const double half = 0.5 * s.width;
    for (double r : {s.r1, s.r2}) {
        if (std::min(half, s.height) < 20.0 * r) {
            throw Error(ErrorCode::invalid_argument, "each side must be at least 20 disc radii across");
        }
    }
    return generate_two_domain(s.box(), s.x_mid(), s.r1, s.phi1, s.r2, s.phi2, seed, packing, left, right);
}

OccupationResult occupation_ratio(const DiscField& field, double trajectory_time, std::uint64_t seed,
                                  const OccupationOptions& opt) {
    if (!field.two_domain()) throw Error(ErrorCode::invalid_argument, "occupation needs a field with a dividing line");
    if (!(trajectory_time > 0.0)) throw Error(ErrorCode::invalid_argument, "trajectory time must be positive");
    if (opt.trajectories == 0) throw Error(ErrorCode::invalid_argument, "need at least one trajectory");
    const std::size_t k = opt.trajectories;
    const std::size_t chunks = std::max<std::size_t>(1, (opt.batches + k - 1) / k);

    struct Unit {
        double left = 0.0, right = 0.0;
    };
    struct Member {
        std::vector<Unit> units;
        std::uint64_t events = 0, crossings = 0, samples[2] = {0, 0};
    };
    std::vector<Member> members(k);

    parallel_for(k, opt.workers, [&](std::size_t m) {
        Rng rng = Rng::stream(seed, 1 + m);
        Billiard<double> b(field, random_start(field, rng));
        Member& out = members[m];
        BasicObservers<double> obs;
        if (opt.sample_period > 0.0) {
            obs.sample_period = opt.sample_period;
            obs.on_sample = [&out](const double&, const BVec<double>&, int side) { ++out.samples[side]; };
        }
        double prev_l = 0.0, prev_r = 0.0;
        for (std::size_t c = 1; c <= chunks; ++c) {
            b.advance(trajectory_time * static_cast<double>(c) / static_cast<double>(chunks), &obs);
            out.units.push_back({b.side_time(0) - prev_l, b.side_time(1) - prev_r});
            prev_l = b.side_time(0);
            prev_r = b.side_time(1);
        }
        out.events = b.events();
        out.crossings = b.count(EventKind::line_cross);
    });

    OccupationResult res;
    res.trajectory_time = trajectory_time;
    res.trajectories = k;
    res.seed = seed;
    res.phi_left = field.free_fraction(0);
    res.phi_right = field.free_fraction(1);
    std::vector<Unit> units;
    for (const auto& m : members) {
        units.insert(units.end(), m.units.begin(), m.units.end());
        res.events += m.events;
        res.line_crossings += m.crossings;
        res.samples_left += m.samples[0];
        res.samples_right += m.samples[1];
    }
    for (const auto& u : units) {
        res.time_left += u.left;
        res.time_right += u.right;
    }
    res.ratio = res.time_right / res.time_left;
    res.batches = units.size();
    // Ratio estimator error by the delta method over the blocks.
    const double n = static_cast<double>(units.size());
    const double mean_left = res.time_left / n;
    double ss = 0.0;
    for (const auto& u : units) {
        const double d = u.right - res.ratio * u.left;
        ss += d * d;
        res.batch_ratios.push_back(u.left > 0.0 ? u.right / u.left : std::numeric_limits<double>::infinity());
    }
    res.std_error = units.size() > 1 ? std::sqrt(ss / (n * (n - 1.0))) / mean_left : 0.0;
    if (opt.sample_period > 0.0 && res.samples_left > 0) {
        res.sampled_ratio = static_cast<double>(res.samples_right) / static_cast<double>(res.samples_left);
    }
    return res;
}

OccupationResult occupation_ratio(const TwoDomainSetup& setup, double trajectory_time, std::uint64_t seed,
                                  const OccupationOptions& options) {
    const DiscField field = make_two_domain_field(setup, seed, options.packing);
    return occupation_ratio(field, trajectory_time, seed, options);
}

bool DiffusionEstimate::isotropic(double sigmas) const {
    return std::abs(d_x - d_y) <= sigmas * std::hypot(std_error_x, std_error_y);
}

namespace {

struct MemberMsd {
    std::vector<double> msd, msd_x, msd_y;  // per lag 1..checkpoints
    std::uint64_t events = 0;
};

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_error_of_mean(const std::vector<double>& v) {
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    const double n = static_cast<double>(v.size());
    return std::sqrt(ss / (n - 1.0) / n);
}

} // namespace

DiffusionEstimate estimate_D(double r, double phi, std::size_t members, double horizon, std::uint64_t seed,
                             const DiffusionOptions& opt) {
    if (!(phi > phi_min && phi < 1.0)) {
        throw Error(ErrorCode::phi_out_of_range, "free fraction " + std::to_string(phi) + " out of range");
    }
    if (!(r > 0.0) || !(horizon > 0.0)) throw Error(ErrorCode::invalid_argument, "need r > 0 and T > 0");
    if (members < std::max<std::size_t>(2, opt.min_members)) {
        throw Error(ErrorCode::invalid_argument, "ensemble has " + std::to_string(members) + " members, needs " +
                                                     std::to_string(std::max<std::size_t>(2, opt.min_members)));
    }
    if (opt.run_multiple == 0 || opt.checkpoints == 0) throw Error(ErrorCode::invalid_argument, "empty checkpoint grid");
    const double cell = opt.cell_side > 0.0 ? opt.cell_side : std::max(40.0 * r, 20.0 * mean_free_path(r, phi));
    if (cell < 40.0 * r * (1.0 - 1e-12)) throw Error(ErrorCode::invalid_argument, "periodic cell must be at least 40 r");

    const std::size_t lags = opt.checkpoints;
    const double dt = horizon / static_cast<double>(lags);
    std::vector<double> lag_t(lags);
    for (std::size_t k = 0; k < lags; ++k) lag_t[k] = dt * static_cast<double>(k + 1);
    std::vector<std::size_t> window;
    for (std::size_t k = 0; k < lags; ++k) {
        if (lag_t[k] >= opt.fit_from * horizon * (1.0 - 1e-12)) window.push_back(k);
    }
    if (window.size() < 10) {
        throw Error(ErrorCode::window_too_short, "only " + std::to_string(window.size()) + " checkpoints in the fit window");
    }

    std::vector<MemberMsd> per(members);
    parallel_for(members, opt.workers, [&](std::size_t m) {
        const std::uint64_t member_seed = Rng::stream(seed, m)();
        const DiscField field = generate_periodic(cell, r, phi, member_seed, opt.packing);
        Rng rng = Rng::stream(member_seed, 1);
        Billiard<double> b(field, random_start(field, rng));
        const std::size_t points = opt.run_multiple * lags;
        std::vector<Vec2> x(points + 1);
        x[0] = b.unfolded().to_vec2();
        for (std::size_t j = 1; j <= points; ++j) {
            b.advance(dt * static_cast<double>(j));
            x[j] = b.unfolded().to_vec2();
        }
        MemberMsd& out = per[m];
        out.msd.assign(lags, 0.0);
        out.msd_x.assign(lags, 0.0);
        out.msd_y.assign(lags, 0.0);
        for (std::size_t k = 1; k <= lags; ++k) {
            double sx = 0.0, sy = 0.0;
            const std::size_t origins = points - k + 1;
            for (std::size_t j = 0; j < origins; ++j) {
                const Vec2 d = x[j + k] - x[j];
                sx += d.x * d.x;
                sy += d.y * d.y;
            }
            out.msd_x[k - 1] = sx / static_cast<double>(origins);
            out.msd_y[k - 1] = sy / static_cast<double>(origins);
            out.msd[k - 1] = out.msd_x[k - 1] + out.msd_y[k - 1];
        }
        out.events = b.events();
    });

    DiffusionEstimate est;
    est.r = r;
    est.phi = phi;
    est.cell_side = cell;
    est.members = members;
    est.t_lo = lag_t[window.front()];
    est.t_hi = lag_t[window.back()];
    est.window_points = window.size();

    std::vector<double> wt;
    for (std::size_t k : window) wt.push_back(lag_t[k]);
    std::vector<double> d_all, d_x, d_y;
    for (const auto& p : per) {
        std::vector<double> y, yx, yy;
        for (std::size_t k : window) {
            y.push_back(p.msd[k]);
            yx.push_back(p.msd_x[k]);
            yy.push_back(p.msd_y[k]);
        }
        d_all.push_back(fit_line(wt, y).slope / 4.0);
        d_x.push_back(fit_line(wt, yx).slope / 2.0);
        d_y.push_back(fit_line(wt, yy).slope / 2.0);
        est.events += p.events;
    }
    est.d_hat = mean(d_all);
    est.std_error = std_error_of_mean(d_all);
    est.d_x = mean(d_x);
    est.d_y = mean(d_y);
    est.std_error_x = std_error_of_mean(d_x);
    est.std_error_y = std_error_of_mean(d_y);

    std::vector<double> curve;
    for (std::size_t k = 0; k < lags; ++k) {
        std::vector<double> v, vx, vy;
        for (const auto& p : per) {
            v.push_back(p.msd[k]);
            vx.push_back(p.msd_x[k]);
            vy.push_back(p.msd_y[k]);
        }
        est.msd.push_back({lag_t[k], mean(v), std_error_of_mean(v), mean(vx), mean(vy), std_error_of_mean(vx),
                           std_error_of_mean(vy)});
    }
    for (std::size_t k : window) curve.push_back(est.msd[k].msd);
    est.regression_stderr = fit_line(wt, curve).slope_stderr / 4.0;
    if (!(est.d_hat > 0.0)) throw Error(ErrorCode::invalid_argument, "non-positive diffusion estimate");
    return est;
}

std::vector<FCurvePoint> f_curve(const std::vector<double>& phis, double r_ref, std::size_t members, double horizon,
                                 std::uint64_t seed, const DiffusionOptions& options) {
    std::vector<FCurvePoint> out;
    for (std::size_t i = 0; i < phis.size(); ++i) {
        FCurvePoint p;
        p.phi = phis[i];
        p.estimate = estimate_D(r_ref, phis[i], members, horizon, Rng::stream(seed, i)(), options);
        p.f = p.estimate.f();
        p.f_stderr = p.estimate.std_error / r_ref;
        p.increasing = out.empty() || (phis[i] > out.back().phi) == (p.f > out.back().f);
        out.push_back(std::move(p));
    }
    return out;
}

std::pair<double, double> rho_eq_from_phis(double phi1, double phi2, double area) {
    if (!(phi1 > 0.0 && phi2 > 0.0 && area > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "need positive free fractions and area");
    }
    const double denom = area * (phi1 + phi2);
    return {phi1 / denom, phi2 / denom};
}

} // namespace sdd
