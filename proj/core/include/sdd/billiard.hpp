#pragma once

#include "sdd/disc_field.hpp"
#include "sdd/error.hpp"
#include "sdd/rng.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>

namespace sdd {

inline constexpr double eps_guard = 1e-12;
inline constexpr double grazing_discriminant = 1e-14;
inline constexpr std::uint64_t renormalize_every = 10'000;

template <class Real>
struct BVec {
    Real x{};
    Real y{};

    friend BVec operator+(const BVec& a, const BVec& b) { return {a.x + b.x, a.y + b.y}; }
    friend BVec operator-(const BVec& a, const BVec& b) { return {a.x - b.x, a.y - b.y}; }
    friend BVec operator*(const Real& s, const BVec& a) { return {s * a.x, s * a.y}; }
    friend Real dot(const BVec& a, const BVec& b) { return a.x * b.x + a.y * b.y; }

    static BVec from(Vec2 v) { return {Real(v.x), Real(v.y)}; }
    Vec2 to_vec2() const { return {static_cast<double>(x), static_cast<double>(y)}; }
};

enum class EventKind { disc_hit, wall_hit, line_cross, cell_wrap, horizon };

// Walls: 0 left (x = lo), 1 right, 2 bottom (y = lo), 3 top.
template <class Real>
struct BasicEvent {
    EventKind kind = EventKind::horizon;
    Real time{};
    std::uint32_t disc = 0;
    int wall = -1;
    int direction = 0;        // +1 / -1 along x for line crossings, along `wall / 2` axis for wraps
    BVec<Real> normal;        // outward disc normal at the hit point, or inward wall normal
    BVec<Real> centre;        // image centre of the hit disc
};

template <class Real>
struct BasicParticleState {
    BVec<Real> pos;
    BVec<Real> vel;
    Real time{};
    int side = 0;
    std::array<long long, 2> winding{0, 0};  // periodic cell crossings per axis
};

using Event = BasicEvent<double>;
using ParticleState = BasicParticleState<double>;

template <class Real>
BVec<Real> reflect(const BVec<Real>& v, const BVec<Real>& n) {
    using std::sqrt;
    const Real vn = dot(v, n);
    BVec<Real> out{v.x - 2 * vn * n.x, v.y - 2 * vn * n.y};
    const Real len = sqrt(dot(out, out));
    return {out.x / len, out.y / len};
}

inline Vec2 reflect(Vec2 v, Vec2 n) {
    return reflect(BVec<double>::from(v), BVec<double>::from(n)).to_vec2();
}

template <class Real>
struct BasicObservers {
    std::function<void(const BasicEvent<Real>&, const BasicParticleState<Real>&)> on_event;
    // Called at times t0 + k * sample_period with the in-cell position and side.
    double sample_period = 0.0;
    std::function<void(const Real&, const BVec<Real>&, int)> on_sample;
};

// Uniform start in free space with a uniform direction.
ParticleState random_start(const DiscField& field, Rng& rng);

// Exact event-driven motion of a unit-speed point among the discs of a field.
template <class Real>
class Billiard {
public:
    using Vec = BVec<Real>;
    using State = BasicParticleState<Real>;
    using Ev = BasicEvent<Real>;

    Billiard(const DiscField& field, State start) : field_(&field), s_(std::move(start)) {
        if (field.mode() == GeometryMode::periodic) s_.side = 0;
    }

    const State& state() const { return s_; }
    const DiscField& field() const { return *field_; }
    std::uint64_t events() const { return events_; }
    std::uint64_t count(EventKind k) const { return counts_[static_cast<std::size_t>(k)]; }
    const Real& side_time(int side) const { return side_time_[static_cast<std::size_t>(side)]; }

    // Position with periodic windings added back.
    Vec unfolded() const {
        const Real lx(field_->box().width(0)), ly(field_->box().width(1));
        return {s_.pos.x + Real(static_cast<double>(s_.winding[0])) * lx,
                s_.pos.y + Real(static_cast<double>(s_.winding[1])) * ly};
    }

    void reverse() {
        s_.vel = {-s_.vel.x, -s_.vel.y};
        last_disc_ = none;
    }

    // Earliest event before `horizon` (absolute time).
    Ev next_event(const Real& horizon) const;
    // Same search over every disc and image, without the cell index.
    Ev next_event_brute_force(const Real& horizon) const;

    // Moves to the event and applies its collision rule.
    void apply(const Ev& ev);

    void advance(const Real& t_end, const BasicObservers<Real>* obs = nullptr);
    void advance_events(std::uint64_t n, const BasicObservers<Real>* obs = nullptr);

private:
    static constexpr std::uint32_t none = std::numeric_limits<std::uint32_t>::max();

    void boundary_event(Ev& best) const;
    void consider(const Disc& d, std::uint32_t index, const Vec& shift, Ev& best) const;
    void emit_samples(const Real& t_event, const BasicObservers<Real>* obs);

    const DiscField* field_;
    State s_;
    std::array<Real, 2> side_time_{};
    std::uint64_t events_ = 0;
    std::array<std::uint64_t, 5> counts_{};
    std::uint32_t last_disc_ = none;
    std::uint64_t zero_steps_ = 0;
    double next_sample_ = -1.0;
};

template <class Real>
void Billiard<Real>::consider(const Disc& d, std::uint32_t index, const Vec& shift, Ev& best) const {
    using std::sqrt;
    const Vec c{Real(d.c.x) + shift.x, Real(d.c.y) + shift.y};
    const Vec rel = s_.pos - c;
    const Real b = dot(rel, s_.vel);
    if (!(b < 0)) return;  // moving away or tangential
    const Real r(d.r);
    const Real cc = dot(rel, rel) - r * r;
    const Real disc = b * b - cc;
    if (!(disc > grazing_discriminant)) return;
    const Real q = sqrt(disc) - b;  // > 0
    Real dt = cc / q;
    if (dt < 0) dt = 0;
    if (index == last_disc_ && dt <= eps_guard) return;
    const Real t = s_.time + dt;
    if (t < best.time || (t == best.time && best.kind == EventKind::disc_hit && index < best.disc)) {
        best.kind = EventKind::disc_hit;
        best.time = t;
        best.disc = index;
        best.centre = c;
    }
}

template <class Real>
void Billiard<Real>::boundary_event(Ev& best) const {
    const Region& box = field_->box();
    const bool periodic = field_->mode() == GeometryMode::periodic;
    double x_lo = box.lo[0], x_hi = box.hi[0];
    if (field_->x_mid()) (s_.side == 0 ? x_hi : x_lo) = *field_->x_mid();
    auto offer = [&](const Real& dt, int wall, int dir) {
        const Real t = s_.time + (dt < 0 ? Real(0) : dt);
        if (!(t < best.time)) return;
        best.time = t;
        best.wall = wall;
        best.direction = dir;
        if (periodic) {
            best.kind = EventKind::cell_wrap;
        } else if (field_->x_mid() && wall < 2 && (wall == 1) == (s_.side == 0)) {
            best.kind = EventKind::line_cross;
        } else {
            best.kind = EventKind::wall_hit;
        }
    };
    if (s_.vel.x > 0) offer((Real(x_hi) - s_.pos.x) / s_.vel.x, 1, +1);
    if (s_.vel.x < 0) offer((Real(x_lo) - s_.pos.x) / s_.vel.x, 0, -1);
    if (s_.vel.y > 0) offer((Real(box.hi[1]) - s_.pos.y) / s_.vel.y, 3, +1);
    if (s_.vel.y < 0) offer((Real(box.lo[1]) - s_.pos.y) / s_.vel.y, 2, -1);
}

template <class Real>
BasicEvent<Real> Billiard<Real>::next_event(const Real& horizon) const {
    Ev best;
    best.kind = EventKind::horizon;
    best.time = horizon;
    boundary_event(best);

    // Amanatides-Woo walk through the side's cell index, in double precision;
    // candidate discs are then solved in Real.
    const CellIndex& idx = field_->index(s_.side);
    const double px = static_cast<double>(s_.pos.x), py = static_cast<double>(s_.pos.y);
    const double vx = static_cast<double>(s_.vel.x), vy = static_cast<double>(s_.vel.y);
    const double t0 = static_cast<double>(s_.time);
    const double limit = static_cast<double>(best.time) - t0;
    int ix = idx.cell_x(px), iy = idx.cell_y(py);
    const int step_x = vx > 0 ? 1 : -1, step_y = vy > 0 ? 1 : -1;
    const double inf = std::numeric_limits<double>::infinity();
    const Region& a = idx.area();
    double t_max_x = vx == 0 ? inf : (a.lo[0] + (ix + (vx > 0 ? 1 : 0)) * idx.cell_w() - px) / vx;
    double t_max_y = vy == 0 ? inf : (a.lo[1] + (iy + (vy > 0 ? 1 : 0)) * idx.cell_h() - py) / vy;
    const double dt_x = vx == 0 ? inf : idx.cell_w() / std::abs(vx);
    const double dt_y = vy == 0 ? inf : idx.cell_h() / std::abs(vy);
    constexpr double slack = 1e-9;
    for (;;) {
        for (const auto& e : idx.at(ix, iy)) consider(field_->discs()[e.disc], e.disc, Vec::from(e.shift), best);
        const double t_exit = std::min(t_max_x, t_max_y);
        if (best.kind == EventKind::disc_hit && static_cast<double>(best.time) - t0 + slack < t_exit) break;
        if (t_exit > limit + slack) break;
        if (t_max_x < t_max_y) {
            ix += step_x;
            t_max_x += dt_x;
        } else {
            iy += step_y;
            t_max_y += dt_y;
        }
        if (ix < 0 || ix >= idx.nx() || iy < 0 || iy >= idx.ny()) break;
    }
    if (best.kind == EventKind::disc_hit) {
        using std::sqrt;
        const Vec hit = s_.pos + (best.time - s_.time) * s_.vel;
        const Vec n = hit - best.centre;
        const Real len = sqrt(dot(n, n));
        best.normal = {n.x / len, n.y / len};
    }
    return best;
}

template <class Real>
BasicEvent<Real> Billiard<Real>::next_event_brute_force(const Real& horizon) const {
    Ev best;
    best.kind = EventKind::horizon;
    best.time = horizon;
    boundary_event(best);
    const bool periodic = field_->mode() == GeometryMode::periodic;
    const double lx = field_->box().width(0), ly = field_->box().width(1);
    const auto& discs = field_->discs();
    for (std::uint32_t i = 0; i < discs.size(); ++i) {
        if (field_->x_mid() && discs[i].side != s_.side) continue;
        if (!periodic) {
            consider(discs[i], i, Vec{}, best);
            continue;
        }
        for (int sy = -1; sy <= 1; ++sy) {
            for (int sx = -1; sx <= 1; ++sx) consider(discs[i], i, Vec::from(Vec2{sx * lx, sy * ly}), best);
        }
    }
    if (best.kind == EventKind::disc_hit) {
        using std::sqrt;
        const Vec hit = s_.pos + (best.time - s_.time) * s_.vel;
        const Vec n = hit - best.centre;
        const Real len = sqrt(dot(n, n));
        best.normal = {n.x / len, n.y / len};
    }
    return best;
}

template <class Real>
void Billiard<Real>::apply(const Ev& ev) {
    using std::sqrt;
    const Real dt = ev.time - s_.time;
    s_.pos = s_.pos + dt * s_.vel;
    side_time_[static_cast<std::size_t>(s_.side)] += dt;
    s_.time = ev.time;
    if (ev.kind == EventKind::horizon) return;

    ++events_;
    ++counts_[static_cast<std::size_t>(ev.kind)];
    last_disc_ = none;
    const Region& box = field_->box();
    switch (ev.kind) {
    case EventKind::disc_hit:
        s_.vel = reflect(s_.vel, ev.normal);
        last_disc_ = ev.disc;
        break;
    case EventKind::wall_hit:
        if (ev.wall < 2) {
            s_.pos.x = Real(ev.wall == 0 ? box.lo[0] : box.hi[0]);
            s_.vel.x = -s_.vel.x;
        } else {
            s_.pos.y = Real(ev.wall == 2 ? box.lo[1] : box.hi[1]);
            s_.vel.y = -s_.vel.y;
        }
        break;
    case EventKind::line_cross:
        s_.pos.x = Real(*field_->x_mid());
        s_.side = 1 - s_.side;
        break;
    case EventKind::cell_wrap: {
        const int axis = ev.wall / 2;
        Real& coord = axis == 0 ? s_.pos.x : s_.pos.y;
        coord = Real(ev.direction > 0 ? box.lo[axis] : box.hi[axis]);
        s_.winding[static_cast<std::size_t>(axis)] += ev.direction;
        break;
    }
    case EventKind::horizon:
        break;
    }
    if (dt == 0) {
        if (++zero_steps_ > 1000) throw Error(ErrorCode::stuck_particle, "particle makes no progress between events");
    } else {
        zero_steps_ = 0;
    }
    if (events_ % renormalize_every == 0) {
        const Real len = sqrt(dot(s_.vel, s_.vel));
        s_.vel = {s_.vel.x / len, s_.vel.y / len};
    }
}

template <class Real>
void Billiard<Real>::emit_samples(const Real& t_event, const BasicObservers<Real>* obs) {
    if (!obs || !(obs->sample_period > 0.0) || !obs->on_sample) return;
    if (next_sample_ < 0.0) next_sample_ = static_cast<double>(s_.time);
    while (Real(next_sample_) <= t_event) {
        const Real ts(next_sample_);
        const Vec p = s_.pos + (ts - s_.time) * s_.vel;
        obs->on_sample(ts, p, s_.side);
        next_sample_ += obs->sample_period;
    }
}

template <class Real>
void Billiard<Real>::advance(const Real& t_end, const BasicObservers<Real>* obs) {
    if (!(t_end >= s_.time)) throw Error(ErrorCode::invalid_argument, "advance target precedes the current time");
    while (s_.time < t_end) {
        const Ev ev = next_event(t_end);
        emit_samples(ev.time, obs);
        apply(ev);
        if (ev.kind != EventKind::horizon && obs && obs->on_event) obs->on_event(ev, s_);
    }
}

template <class Real>
void Billiard<Real>::advance_events(std::uint64_t n, const BasicObservers<Real>* obs) {
    const Real far(std::numeric_limits<double>::max());
    const std::uint64_t stop = events_ + n;
    while (events_ < stop) {
        const Ev ev = next_event(far);
        if (ev.kind == EventKind::horizon) throw Error(ErrorCode::stuck_particle, "no event ahead of the particle");
        emit_samples(ev.time, obs);
        apply(ev);
        if (obs && obs->on_event) obs->on_event(ev, s_);
    }
}

extern template class Billiard<double>;

} // namespace sdd
