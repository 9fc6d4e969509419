#include "sdd/billiard.hpp"

namespace sdd {

template class Billiard<double>;

ParticleState random_start(const DiscField& field, Rng& rng) {
    const Region& box = field.box();
    for (int attempt = 0; attempt < 10'000'000; ++attempt) {
        const Vec2 p{rng.uniform(box.lo[0], box.hi[0]), rng.uniform(box.lo[1], box.hi[1])};
        if (field.in_any_disc(p)) continue;
        const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
        ParticleState s;
        s.pos = BVec<double>::from(p);
        s.vel = {std::cos(angle), std::sin(angle)};
        s.side = field.mode() == GeometryMode::periodic ? 0 : field.side_of(p);
        return s;
    }
    throw Error(ErrorCode::stuck_particle, "no free space found for the initial position");
}

} // namespace sdd
