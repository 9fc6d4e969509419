#include "sdd/billiard.hpp"
#include "sdd/packing.hpp"

#include <boost/multiprecision/mpfr.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace sdd;

namespace {

using mp = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>, boost::multiprecision::et_off>;

// Position of a free particle in [0, a]: triangle wave of the unfolded coordinate.
double mirror(double u, double a) {
    double m = std::fmod(u, 2 * a);
    if (m < 0) m += 2 * a;
    return m <= a ? m : 2 * a - m;
}

ParticleState state_at(Vec2 p, double angle, int side = 0) {
    ParticleState s;
    s.pos = BVec<double>::from(p);
    s.vel = {std::cos(angle), std::sin(angle)};
    s.side = side;
    return s;
}

} // namespace

TEST(Reflect, PreservesSpeedAndFlipsNormalComponent) {
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        const double a = rng.uniform(0, 7), b = rng.uniform(0, 7);
        const Vec2 v{std::cos(a), std::sin(a)}, n{std::cos(b), std::sin(b)};
        const Vec2 w = reflect(v, n);
        EXPECT_NEAR(norm2(w), 1.0, 1e-15);
        EXPECT_NEAR(dot(w, n), -dot(v, n), 1e-15);
        const Vec2 t{-n.y, n.x};
        EXPECT_NEAR(dot(w, t), dot(v, t), 1e-15);
    }
}

TEST(Billiard, EmptyBoxFollowsMirrorUnfolding) {
    const DiscField f(Region::rect(0, 3, 0, 2), GeometryMode::box, {});
    const double angle = 0.7;
    Billiard<double> b(f, state_at({0.4, 1.1}, angle));
    for (double t : {0.5, 3.3, 17.9, 101.0}) {
        b.advance(t);
        EXPECT_NEAR(b.state().pos.x, mirror(0.4 + t * std::cos(angle), 3.0), 1e-11);
        EXPECT_NEAR(b.state().pos.y, mirror(1.1 + t * std::sin(angle), 2.0), 1e-11);
    }
    EXPECT_EQ(b.count(EventKind::disc_hit), 0u);
}

TEST(Billiard, SingleDiscDeflectionAngle) {
    // Impact parameter p gives deflection pi - 2 asin(p / r).
    const DiscField f(Region::rect(0, 20, 0, 20), GeometryMode::box, {{{10, 10}, 1.0, 0}});
    for (double p : {0.0, 0.3, 0.75, 0.99}) {
        Billiard<double> b(f, state_at({5, 10 + p}, 0.0));
        b.advance_events(1);
        ASSERT_EQ(b.count(EventKind::disc_hit), 1u);
        const double angle = std::atan2(b.state().vel.y, b.state().vel.x);
        EXPECT_NEAR(std::abs(angle), std::numbers::pi - 2 * std::asin(p), 1e-12) << p;
        EXPECT_NEAR(b.state().time, 5 - std::sqrt(1 - p * p), 1e-12);
    }
}

TEST(Billiard, InvariantsHoldOverManyEvents) {
    PackingReport rep;
    const DiscField f = generate_two_domain(Region::rect(0, 24, 0, 12), 12.0, 0.3, 0.5, 0.6, 0.5, 3, {}, &rep);
    Rng rng(4);
    Billiard<double> b(f, random_start(f, rng));
    double worst_speed = 0.0, worst_pen = 0.0;
    BasicObservers<double> obs;
    obs.on_event = [&](const Event&, const ParticleState& s) {
        worst_speed = std::max(worst_speed, std::abs(std::sqrt(dot(s.vel, s.vel)) - 1.0));
        worst_pen = std::max(worst_pen, f.penetration(s.pos.to_vec2(), s.side));
        if (std::abs(s.pos.x - 12.0) > 1e-12) EXPECT_EQ(s.side, f.side_of(s.pos.to_vec2()));
    };
    b.advance_events(100000, &obs);
    EXPECT_LE(worst_speed, 1e-12);
    EXPECT_LE(worst_pen, 1e-9);
    EXPECT_NEAR(b.side_time(0) + b.side_time(1), b.state().time, 1e-9 * b.state().time);
    EXPECT_GT(b.count(EventKind::line_cross), 0u);
}

TEST(Billiard, GridSearchMatchesBruteForce) {
    Rng rng(5);
    for (int inst = 0; inst < 60; ++inst) {
        const bool periodic = inst % 2 == 0;
        const double r = rng.uniform(0.2, 0.6);
        const double phi = rng.uniform(0.55, 0.9);
        const DiscField f = periodic ? generate_periodic(10.0, r, phi, rng())
                                     : generate_field(Region::rect(0, 12, 0, 10), r, phi, rng());
        Billiard<double> b(f, random_start(f, rng));
        for (int k = 0; k < 30; ++k) {
            const auto fast = b.next_event(1e6);
            const auto slow = b.next_event_brute_force(1e6);
            ASSERT_EQ(fast.kind, slow.kind);
            ASSERT_EQ(fast.time, slow.time);
            if (fast.kind == EventKind::disc_hit) ASSERT_EQ(fast.disc, slow.disc);
            b.apply(fast);
        }
    }
}

TEST(Billiard, PeriodicUnfoldedMotionIsStraightWithoutDiscs) {
    const DiscField f(Region::rect(0, 5, 0, 5), GeometryMode::periodic, {});
    const double angle = 1.1;
    Billiard<double> b(f, state_at({1, 2}, angle));
    b.advance(123.0);
    const auto u = b.unfolded();
    EXPECT_NEAR(u.x, 1 + 123 * std::cos(angle), 1e-10);
    EXPECT_NEAR(u.y, 2 + 123 * std::sin(angle), 1e-10);
    EXPECT_GT(b.count(EventKind::cell_wrap), 20u);
}

TEST(Billiard, DoublePrecisionReversalOverShortRuns) {
    const DiscField f = generate_periodic(12.0, 0.5, 0.6, 8);
    Rng rng(9);
    const ParticleState s0 = random_start(f, rng);
    Billiard<double> b(f, s0);
    b.advance(10.0);
    b.reverse();
    b.advance(20.0);
    const auto u = b.unfolded();
    EXPECT_NEAR(u.x, s0.pos.x, 1e-8);
    EXPECT_NEAR(u.y, s0.pos.y, 1e-8);
}

TEST(Billiard, MultiprecisionReversal) {
    mp::default_precision(200);
    const DiscField f = generate_periodic(12.0, 0.5, 0.6, 8);
    Rng rng(10);
    const ParticleState s0 = random_start(f, rng);
    BasicParticleState<mp> start;
    start.pos = {mp(s0.pos.x), mp(s0.pos.y)};
    // Unit speed in working precision; reflections renormalize, so the start must match.
    const mp len = sqrt(mp(s0.vel.x) * s0.vel.x + mp(s0.vel.y) * s0.vel.y);
    start.vel = {mp(s0.vel.x) / len, mp(s0.vel.y) / len};
    Billiard<mp> b(f, start);
    b.advance_events(100);
    const mp t = b.state().time;
    b.reverse();
    b.advance(2 * t);
    const auto u = b.unfolded();
    EXPECT_LT(static_cast<double>(abs(u.x - start.pos.x)), 1e-40);
    EXPECT_LT(static_cast<double>(abs(u.y - start.pos.y)), 1e-40);
}

TEST(Billiard, AdvanceRejectsPastTargets) {
    const DiscField f(Region::rect(0, 3, 0, 2), GeometryMode::box, {});
    Billiard<double> b(f, state_at({1, 1}, 0.3));
    b.advance(2.0);
    EXPECT_THROW(b.advance(1.0), Error);
}

TEST(Billiard, SamplesAtFixedPeriod) {
    const DiscField f(Region::rect(0, 3, 0, 2), GeometryMode::box, {});
    Billiard<double> b(f, state_at({1, 1}, 0.3));
    BasicObservers<double> obs;
    obs.sample_period = 0.25;
    int n = 0;
    obs.on_sample = [&](const double& t, const BVec<double>& p, int) {
        EXPECT_NEAR(t, 0.25 * n, 1e-12);
        EXPECT_NEAR(p.x, mirror(1 + t * std::cos(0.3), 3.0), 1e-11);
        ++n;
    };
    b.advance(10.0, &obs);
    EXPECT_GE(n, 40);
}
