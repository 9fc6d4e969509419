// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. `acceptance 4 7` runs a subset.

#include "sdd/billiard.hpp"
#include "sdd/fokker_planck.hpp"
#include "sdd/lorentz_stats.hpp"
#include "sdd/model.hpp"
#include "sdd/packing.hpp"
#include "sdd/sampler.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

using namespace sdd;

namespace {

// ---- pinned tolerances -----------------------------------------------------

constexpr double c1_target = 1.00, c1_tol = 0.05;
constexpr double c2_target = 0.50, c2_tol = 0.06;
constexpr double c3_tol = 0.05;
constexpr double c4_target = 2.0, c4_tol = 0.1;
constexpr double c5_f05 = 0.30, c5_f05_rel = 0.15;
constexpr double c5_f06 = 0.52, c5_f06_rel = 0.15;
constexpr double c5_f03 = 0.124, c5_f03_rel = 0.20;
constexpr double c5_f095_rel = 0.25;
constexpr double c6_target = 0.50, c6_tol = 0.03;
constexpr double c7_p_min = 1e-3, c7_deff_rel = 0.05;
constexpr double c8_tol = 1e-12;
constexpr double c9_speed = 1e-9, c9_penetration = 1e-9, c9_reversal = 1e-6;
constexpr double c10_steady = 1e-12, c10_cosine = 1e-6, c10_sigmas = 3.0;
constexpr double c11_symbolic = 1e-12, c11_flux = 1e-10, c11_p_min = 1e-3;

// ---- run sizes --------------------------------------------------------------

constexpr double c1_time = 1e5;
constexpr std::size_t c1_trajectories = 1024;
constexpr double c2_time = 1e6;
constexpr std::size_t c2_trajectories = 64;
constexpr double c3_time = 1e5;
constexpr std::size_t c3_trajectories = 1024;
constexpr std::size_t c4_members = 200;
constexpr double c4_horizon = 2000.0;
constexpr std::size_t run_multiple = 16;
constexpr std::uint64_t c6_steps = 10'000'000;
constexpr std::uint64_t c7_samples = 10'000'000;
constexpr std::uint64_t c9_events = 1'000'000;
constexpr std::uint64_t c9_reversal_events = 1000;
constexpr unsigned c9_mp_bits = 4096;
constexpr int c9_instances = 1000;
constexpr std::size_t c10_chains = 40'000;
constexpr double c10_h = 1e-4;

constexpr std::uint64_t seed = 20240611;
constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

DiffusionModel two_valued_1d() {
    const Region dom = Region::interval(-1, 1);
    return DiffusionModel(dom, ScalarField::two_piece(dom, 0.0, 1.0, 2.0), ScalarField::constant(dom, 0.5));
}

Outcome occupation_check(const TwoDomainSetup& s, double time, std::size_t trajectories, double target, double tol,
                         std::uint64_t run_seed) {
    PackingReport left, right;
    const DiscField field = make_two_domain_field(s, run_seed, {}, &left, &right);
    OccupationOptions opt;
    opt.trajectories = trajectories;
    const auto r = occupation_ratio(field, time, run_seed, opt);
    return {std::abs(r.ratio - target) <= tol,
            fmt("ratio %.4f +- %.4f (target %.2f +- %.2f; realized phi %.4f / %.4f; %zu x %.0e time units; %llu events)",
                r.ratio, r.std_error, target, tol, r.phi_left, r.phi_right, trajectories, time,
                static_cast<unsigned long long>(r.events))};
}

DiffusionOptions diffusion_options() {
    DiffusionOptions o;
    o.run_multiple = run_multiple;
    return o;
}

// 1-3: occupation ratios
Outcome c1() {
    TwoDomainSetup s;  // r 0.3 / 0.6, phi 0.5 / 0.5, 60 wide x 30 high
    return occupation_check(s, c1_time, c1_trajectories, c1_target, c1_tol, seed + 1);
}

Outcome c2() {
    TwoDomainSetup s{0.09, 0.60, 0.75, 0.30, 40.0, 20.0};
    return occupation_check(s, c2_time, c2_trajectories, c2_target, c2_tol, seed + 2);
}

Outcome c3() {
    TwoDomainSetup s{0.3, 0.5, 0.5, 0.25, 60.0, 30.0};
    return occupation_check(s, c3_time, c3_trajectories, 0.25 / 0.5, c3_tol, seed + 3);
}

// 4: D proportional to r at fixed phi
Outcome c4() {
    const auto a = estimate_D(0.3, 0.5, c4_members, c4_horizon, seed + 41, diffusion_options());
    const auto b = estimate_D(0.6, 0.5, c4_members, c4_horizon, seed + 42, diffusion_options());
    const double ratio = b.d_hat / a.d_hat;
    const double se = ratio * std::hypot(a.std_error / a.d_hat, b.std_error / b.d_hat);
    return {std::abs(ratio - c4_target) <= c4_tol,
            fmt("D(0.6)/D(0.3) = %.4f +- %.4f (D = %.4f, %.4f; target %.1f +- %.1f)", ratio, se, b.d_hat, a.d_hat,
                c4_target, c4_tol)};
}

// 5: f(phi) anchors
Outcome c5() {
    struct Anchor {
        double phi, target, rel;
    };
    const Anchor anchors[] = {{0.5, c5_f05, c5_f05_rel},
                              {0.6, c5_f06, c5_f06_rel},
                              {0.3, c5_f03, c5_f03_rel},
                              {0.95, 3 * pi / (16 * 0.05), c5_f095_rel}};
    Outcome out{true, ""};
    std::uint64_t k = 0;
    for (const auto& a : anchors) {
        const auto e = estimate_D(0.5, a.phi, c4_members, c4_horizon, seed + 50 + k++, diffusion_options());
        const double f = e.f();
        const bool ok = std::abs(f - a.target) <= a.rel * a.target;
        out.pass = out.pass && ok;
        out.detail += fmt("%sf(%.2f) = %.4f +- %.4f vs %.3f +- %.0f%%%s", out.detail.empty() ? "" : "; ", a.phi, f,
                          e.std_error / 0.5, a.target, 100 * a.rel, ok ? "" : " [out]");
    }
    return out;
}

// 6: drift-free Euler-Maruyama in the two-valued box
Outcome c6() {
    const Region dom = Region::rect(-20, 20, -10, 10);
    const DiffusionModel m(dom, ScalarField::parse("[-20, 0]x[-10, 10]: 1 | [0, 20]x[-10, 10]: 2"),
                           ScalarField::constant(dom, 1.0 / dom.measure()));
    SamplerConfig c;
    c.scheme = Scheme::em_driftfree;
    c.h = 0.5;
    c.steps = c6_steps;
    c.seed = seed + 6;
    c.bins = BinEdges{-20, 20, 2};
    c.batches = 50;
    const auto t = run(m, c);
    const auto& acc = *t.bins;
    const double left = static_cast<double>(acc.counts()[0]), right = static_cast<double>(acc.counts()[1]);
    const double ratio = right / left;
    double ss = 0.0;
    const auto& blocks = acc.batch_counts();
    for (const auto& b : blocks) {
        const double d = static_cast<double>(b[1]) - ratio * static_cast<double>(b[0]);
        ss += d * d;
    }
    const double nb = static_cast<double>(blocks.size());
    const double se = std::sqrt(ss / (nb * (nb - 1))) / (left / nb);
    return {std::abs(ratio - c6_target) <= c6_tol,
            fmt("ratio %.4f +- %.4f over %.0e steps at h = 0.5 (target %.2f +- %.2f)", ratio, se,
                static_cast<double>(c6_steps), c6_target, c6_tol)};
}

// 7: maem flatness and D_eff across the h sweep
Outcome c7() {
    const auto m = two_valued_1d();
    const BinEdges edges{-1, 1, 20};
    const auto flat = bin_probabilities(m.rho_eq(), edges);
    Outcome out{true, ""};
    std::vector<double> errors;
    for (double h : {1e-2, 1e-3, 1e-4}) {
        SamplerConfig c;
        c.scheme = Scheme::maem;
        c.h = h;
        c.steps = c7_samples;
        c.burn_in = 0;
        c.x0_from_rho_eq = true;
        c.seed = seed + 7;
        c.bins = edges;
        c.batches = 50;
        const auto s = run(m, c).bins->finish();
        const auto chi = compare_chi_square_batched(s, flat);
        double err = 0.0;
        for (std::size_t i = 1; i + 1 < edges.count; ++i) {
            if (i == 9 || i == 10) continue;
            const double d = edges.center(i) < 0 ? 1.0 : 2.0;
            err = std::max(err, std::abs(s.d_eff[i] - d) / d);
        }
        errors.push_back(err);
        out.pass = out.pass && chi.p_value > c7_p_min;
        out.detail += fmt("h=%.0e: p=%.3g (effective dof %.1f), D_eff err %.2f%%; ", h, chi.p_value, chi.effective_dof,
                          100 * err);
    }
    const bool decreasing = errors[0] > errors[1] && errors[1] > errors[2];
    out.pass = out.pass && errors[2] <= c7_deff_rel && decreasing;
    out.detail += fmt("decreasing: %s (limits p > %g, err <= %.0f%% at h=1e-4)", decreasing ? "yes" : "no", c7_p_min,
                      100 * c7_deff_rel);
    return out;
}

// 8: detailed balance of the maem kernel
Outcome c8() {
    const Region dom = Region::interval(-1, 1);
    const DiffusionModel models[] = {
        two_valued_1d(),
        DiffusionModel(dom, ScalarField::parse("[-1, 0]: 1 + x^2 | [0, 1]: 3"),
                       ScalarField::parse("[-1, 0.5]: exp(-x) | [0.5, 1]: 0.2")),
    };
    Rng rng(seed + 8);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const auto& m = models[i % 2];
        const Vec2 x{rng.uniform(-1, 1), 0}, y{rng.uniform(-1, 1), 0};
        const double h = std::pow(10.0, rng.uniform(-4, -1));
        const double lhs = m.rho_eq()(x) * transition_density(x, y, h, m) * accept_prob(x, y, h, m);
        const double rhs = m.rho_eq()(y) * transition_density(y, x, h, m) * accept_prob(y, x, h, m);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return {worst <= c8_tol, fmt("max |flux imbalance| = %.3g over 1e4 pairs (limit %.0e)", worst, c8_tol)};
}

// 9: billiard invariants
using mp = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>, boost::multiprecision::et_off>;

// log10 of the distance between the start and the position after running
// forward, reversing and running back for the same time.
template <class Real>
double reversal_log10_error(const DiscField& field, const ParticleState& s0, std::uint64_t events) {
    using std::sqrt;
    BasicParticleState<Real> start;
    start.pos = {Real(s0.pos.x), Real(s0.pos.y)};
    const Real len = sqrt(Real(s0.vel.x) * Real(s0.vel.x) + Real(s0.vel.y) * Real(s0.vel.y));
    start.vel = {Real(s0.vel.x) / len, Real(s0.vel.y) / len};
    start.side = s0.side;
    Billiard<Real> b(field, start);
    b.advance_events(events);
    const Real t = b.state().time;
    b.reverse();
    b.advance(2 * t);
    using std::log10;
    const Real dx = b.state().pos.x - start.pos.x, dy = b.state().pos.y - start.pos.y;
    return static_cast<double>(log10(sqrt(dx * dx + dy * dy)));
}

Outcome c9() {
    TwoDomainSetup s;
    const DiscField field = make_two_domain_field(s, seed + 9);
    Rng rng(seed + 90);
    Billiard<double> b(field, random_start(field, rng));
    double speed = 0.0, pen = 0.0;
    BasicObservers<double> obs;
    obs.on_event = [&](const Event&, const ParticleState& st) {
        speed = std::max(speed, std::abs(std::sqrt(dot(st.vel, st.vel)) - 1.0));
        pen = std::max(pen, field.penetration(st.pos.to_vec2(), st.side));
    };
    b.advance_events(c9_events, &obs);

    const ParticleState s0 = random_start(field, rng);
    mp::default_precision(static_cast<unsigned>(std::ceil(c9_mp_bits * std::log10(2.0))));
    const double rev_mp = reversal_log10_error<mp>(field, s0, c9_reversal_events);
    const double rev_double = reversal_log10_error<double>(field, s0, c9_reversal_events);

    int mismatches = 0;
    std::uint64_t compared = 0;
    for (int inst = 0; inst < c9_instances; ++inst) {
        const bool periodic = inst % 2 == 0;
        const double r = rng.uniform(0.2, 0.5);
        const double phi = rng.uniform(0.4, 0.9);
        // Side chosen so that an integer disc count gives exactly phi.
        const auto discs = static_cast<double>(20 + rng.below(161));
        const double side = std::sqrt(discs * pi * r * r / (1 - phi));
        const DiscField f = periodic ? generate_periodic(std::max(side, 4 * r), r, phi, rng())
                                     : generate_field(Region::rect(0, side, 0, side), r, phi, rng());
        if (f.discs().size() > 200) continue;
        Billiard<double> p(f, random_start(f, rng));
        for (int k = 0; k < 20; ++k) {
            const auto fast = p.next_event(1e9);
            const auto slow = p.next_event_brute_force(1e9);
            ++compared;
            if (fast.kind != slow.kind || fast.time != slow.time ||
                (fast.kind == EventKind::disc_hit && fast.disc != slow.disc)) {
                ++mismatches;
                break;
            }
            p.apply(fast);
        }
    }
    const bool ok = speed <= c9_speed && pen <= c9_penetration && rev_mp <= std::log10(c9_reversal) && mismatches == 0;
    return {ok, fmt("speed drift %.2g, penetration %.2g over %.0e events; reversal after %llu events 1e%.0f at %u bits "
                    "(double: %.2g); next_event vs brute force %d mismatches in %llu queries over %d instances",
                    speed, pen, static_cast<double>(c9_events), static_cast<unsigned long long>(c9_reversal_events),
                    rev_mp, c9_mp_bits, std::pow(10.0, rev_double), mismatches, static_cast<unsigned long long>(compared),
                    c9_instances)};
}

// 10: Fokker-Planck oracles
Outcome c10() {
    Outcome out{true, ""};
    {
        const Region dom = Region::interval(-1, 1);
        const DiffusionModel m(dom, ScalarField::parse("[-1, 0]: 1 | [0, 1]: 2"),
                               ScalarField::parse("[-1, -0.5]: 0.8 | [-0.5, 1]: 0.4*exp(-x)"));
        const Grid1D g = Grid1D::over(m, 400);
        const auto s = steady_state(m, g);
        double worst = 0.0;
        for (std::size_t i = 0; i < g.cells; ++i) worst = std::max(worst, std::abs(s.rho[i] - m.rho_eq()({g.center(i), 0})));
        const auto e = evolve(m, s, 1.0, 1e-3, {0.5});
        for (std::size_t i = 0; i < g.cells; ++i) worst = std::max(worst, std::abs(e.rho[i] - s.rho[i]));
        out.pass = out.pass && worst <= c10_steady;
        out.detail += fmt("steady %.2g (limit %.0e); ", worst, c10_steady);
    }
    {
        const Region dom = Region::interval(-1, 1);
        const DiffusionModel m(dom, ScalarField::constant(dom, 1.0), ScalarField::constant(dom, 0.5));
        const Grid1D g = Grid1D::over(m, 400);
        auto oracle = [](double x, double t) { return 0.5 + 0.25 * std::exp(-pi * pi * t / 4) * std::cos(pi * (x + 1) / 2); };
        DensityProfile p = steady_state(m, g);
        for (std::size_t i = 0; i < g.cells; ++i) p.rho[i] = oracle(g.center(i), 0.0);
        double worst = 0.0;
        for (double t : {0.1, 0.5, 1.0}) {
            const auto e = evolve(m, p, t, 1e-3, {0.5});
            for (std::size_t i = 0; i < g.cells; ++i) worst = std::max(worst, std::abs(e.rho[i] - oracle(g.center(i), t)));
        }
        out.pass = out.pass && worst <= c10_cosine;
        out.detail += fmt("cosine mode %.2g (limit %.0e); ", worst, c10_cosine);
    }
    {
        const auto m = two_valued_1d();
        const BinEdges edges{-1, 1, 20};
        const double t = 0.5;
        auto fp_probs = [&](std::size_t cells) {
            const Grid1D g = Grid1D::over(m, cells);
            const auto p0 = sample_profile(ScalarField::parse("[-1, 0]: 1 | [0, 1]: 0"), g);
            return bin_probabilities(evolve(m, p0, t, 1e-3, {0.5}), edges);
        };
        const auto p400 = fp_probs(400), p800 = fp_probs(800);
        const auto steps = static_cast<std::uint64_t>(std::llround(t / c10_h));
        std::vector<double> counts(edges.count, 0.0);
        for (std::size_t c = 0; c < c10_chains; ++c) {
            Rng start = Rng::stream(seed + 10, c);
            SamplerConfig sc;
            sc.scheme = Scheme::maem;
            sc.h = c10_h;
            sc.steps = steps;
            sc.burn_in = 0;
            sc.seed = seed + 11;
            sc.chain = c;
            sc.x0 = {start.uniform(-1.0, 0.0), 0.0};
            counts[edges.index(run(m, sc).final_position.x)] += 1.0;
        }
        const double n = static_cast<double>(c10_chains);
        double worst = 0.0;
        for (std::size_t i = 0; i < edges.count; ++i) {
            const double p = counts[i] / n;
            const double mc = std::sqrt(std::max(p400[i] * (1 - p400[i]), 1e-12) / n);
            const double disc = std::abs(p400[i] - p800[i]);
            worst = std::max(worst, std::abs(p - p400[i]) / std::hypot(mc, disc));
        }
        out.pass = out.pass && worst <= c10_sigmas;
        out.detail += fmt("maem vs evolve at t = 0.5: worst bin %.2f combined SE (limit %.0f; %zu chains, h = %.0e)", worst,
                          c10_sigmas, c10_chains, c10_h);
    }
    return out;
}

// 11: convention algebra
Outcome c11() {
    Outcome out{true, ""};
    Rng rng(seed + 111);
    double worst_sym = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        // a = a0 + a1 x + a2 x^2, b = 2 + b1 x + b2 x^2 (positive on [-1, 1])
        const double a0 = rng.uniform(-1, 1), a1 = rng.uniform(-1, 1), a2 = rng.uniform(-1, 1);
        const double b1 = rng.uniform(-0.5, 0.5), b2 = rng.uniform(-0.5, 0.5);
        const auto a = ScalarField::parse(fmt("[-1, 1]: %.17g %+.17g*x %+.17g*x^2", a0, a1, a2));
        const auto b = ScalarField::parse(fmt("[-1, 1]: 2 %+.17g*x %+.17g*x^2", b1, b2));
        // b b' = (2 + b1 x + b2 x^2)(b1 + 2 b2 x) expanded by coefficients.
        const double c[4] = {2 * b1, b1 * b1 + 4 * b2, 3 * b1 * b2, 2 * b2 * b2};
        for (double alpha : {0.0, 0.5, 1.0}) {
            const ConventionSpec conv(alpha, a, b);
            for (int k = 0; k < 20; ++k) {
                const double x = rng.uniform(-1, 1);
                const double bb = c[0] + x * (c[1] + x * (c[2] + x * c[3]));
                const double expected = a0 + a1 * x + a2 * x * x + alpha * bb;
                worst_sym = std::max(worst_sym, std::abs(to_ito_drift(conv, x) - expected) / std::max(1.0, std::abs(expected)));
            }
        }
    }
    out.pass = out.pass && worst_sym <= c11_symbolic;
    out.detail += fmt("to_ito_drift %.2g (limit %.0e); ", worst_sym, c11_symbolic);

    const auto b = ScalarField::parse("[-1, 1]: sqrt(2 + 2*x^2)");
    double worst_flux = 0.0;
    for (double alpha : {0.0, 0.5, 1.0}) {
        const auto p = stationary_density_driftfree(alpha, b);
        for (int k = 0; k <= 200; ++k) {
            const Vec2 q{-1 + 2.0 * k / 200, 0};
            const double bv = b(q), db = b.gradient(q).x, pv = p(q);
            const double drift_part = alpha * bv * db * pv;
            const double diff_part = 0.5 * (2 * bv * db * pv + bv * bv * p.gradient(q).x);
            const double scale = std::max({1.0, std::abs(drift_part), std::abs(bv * db * pv)});
            worst_flux = std::max(worst_flux, std::abs(drift_part - diff_part) / scale);
        }
    }
    out.pass = out.pass && worst_flux <= c11_flux;
    out.detail += fmt("zero-flux residual %.2g (limit %.0e); ", worst_flux, c11_flux);

    const Region dom = Region::interval(-1, 1);
    const DiffusionModel m(dom, ScalarField::parse("[-1, 1]: 1 + x^2"), ScalarField::constant(dom, 0.5));
    SamplerConfig sc;
    sc.scheme = Scheme::em_driftfree;
    sc.h = 1e-3;
    sc.steps = 10'000'000;
    sc.seed = seed + 112;
    sc.bins = BinEdges{-1, 1, 20};
    sc.batches = 50;
    const auto s = run(m, sc).bins->finish();
    // Expected bin masses of 1 / b^2 = 1 / (2 (1 + x^2)): arctangent differences.
    std::vector<double> expected(20);
    for (std::size_t i = 0; i < 20; ++i) {
        expected[i] = (std::atan(s.edges.edge(i + 1)) - std::atan(s.edges.edge(i))) / (pi / 2);
    }
    const auto chi = compare_chi_square_batched(s, expected);
    out.pass = out.pass && chi.p_value > c11_p_min;
    out.detail += fmt("Ito drift-free chain vs 1/b^2: p = %.3g (effective dof %.1f, limit p > %g)", chi.p_value,
                      chi.effective_dof, c11_p_min);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"occupation set-up 1", c1},          {"occupation set-up 2", c2},
        {"occupation phi ratio", c3},         {"D scales with r", c4},
        {"f(phi) anchors", c5},               {"drift-free EM box", c6},
        {"maem h sweep", c7},                 {"detailed balance", c8},
        {"billiard invariants", c9},          {"Fokker-Planck oracles", c10},
        {"convention algebra", c11},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        if (!only.empty() && !only.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s [%2d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
