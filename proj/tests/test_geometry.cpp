#include "sdd/disc_field.hpp"
#include "sdd/error.hpp"
#include "sdd/geometry.hpp"
#include "sdd/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace sdd;

namespace {

// Chord length of the disc inside [y0, y1] at abscissa x, integrated by composite Simpson.
double area_by_quadrature(Vec2 c, double r, double x0, double x1, double y0, double y1) {
    const double a = std::max(x0, c.x - r), b = std::min(x1, c.x + r);
    if (!(b > a)) return 0.0;
    auto chord = [&](double x) {
        const double h = std::sqrt(std::max(0.0, r * r - (x - c.x) * (x - c.x)));
        return std::max(0.0, std::min(y1, c.y + h) - std::max(y0, c.y - h));
    };
    const int n = 200000;
    const double w = (b - a) / n;
    double s = chord(a) + chord(b);
    for (int i = 1; i < n; ++i) s += chord(a + i * w) * (i % 2 ? 4.0 : 2.0);
    return s * w / 3.0;
}

} // namespace

TEST(DiscRectArea, FullAndEmptyCases) {
    const double pi = std::numbers::pi;
    EXPECT_NEAR(disc_rect_area({5, 5}, 1, 0, 10, 0, 10), pi, 1e-14);
    EXPECT_EQ(disc_rect_area({5, 5}, 1, 7, 10, 0, 10), 0.0);
    EXPECT_NEAR(disc_rect_area({0, 0}, 1, 0, 10, -10, 10), pi / 2, 1e-14);
    EXPECT_NEAR(disc_rect_area({0, 0}, 1, 0, 10, 0, 10), pi / 4, 1e-14);
}

TEST(DiscRectArea, MatchesQuadratureOnRandomPlacements) {
    Rng rng(31);
    for (int i = 0; i < 200; ++i) {
        const Vec2 c{rng.uniform(-1.5, 2.5), rng.uniform(-1.5, 2.5)};
        const double r = rng.uniform(0.05, 1.5);
        const double exact = disc_rect_area(c, r, 0, 1, 0, 1.5);
        EXPECT_NEAR(exact, area_by_quadrature(c, r, 0, 1, 0, 1.5), 2e-7) << c.x << " " << c.y << " " << r;
    }
}

TEST(DiscRectArea, AdditiveOverSplitRectangles) {
    Rng rng(32);
    for (int i = 0; i < 500; ++i) {
        const Vec2 c{rng.uniform(-1, 3), rng.uniform(-1, 3)};
        const double r = rng.uniform(0.1, 2.0);
        const double cut = rng.uniform(0, 2);
        const double whole = disc_rect_area(c, r, 0, 2, 0, 2);
        EXPECT_NEAR(whole, disc_rect_area(c, r, 0, cut, 0, 2) + disc_rect_area(c, r, cut, 2, 0, 2), 1e-12);
    }
}

TEST(FreeFraction, ClipsDiscsAtEdgesAndWrapsPeriodic) {
    const Region box = Region::rect(0, 10, 0, 10);
    const std::vector<Disc> discs{{{0.0, 5.0}, 1.0, 0}, {{5, 5}, 1.0, 0}};
    const double pi = std::numbers::pi;
    EXPECT_NEAR(free_fraction(discs, box, GeometryMode::box), 1.0 - 1.5 * pi / 100.0, 1e-14);
    EXPECT_NEAR(free_fraction(discs, box, GeometryMode::periodic), 1.0 - 2.0 * pi / 100.0, 1e-14);
}

TEST(DiscField, SideQueriesAndValidation) {
    const Region box = Region::rect(0, 20, 0, 10);
    std::vector<Disc> discs{{{5, 5}, 1.0, 0}, {{15, 5}, 0.5, 1}};
    const DiscField f(box, GeometryMode::box, discs, 10.0);
    EXPECT_EQ(f.side_of({3, 3}), 0);
    EXPECT_EQ(f.side_of({12, 3}), 1);
    EXPECT_TRUE(f.in_any_disc({5.5, 5}));
    EXPECT_FALSE(f.in_any_disc({7, 5}));
    EXPECT_NEAR(f.penetration({5.25, 5}, 0), 0.75, 1e-15);
    EXPECT_NO_THROW(f.validate());
    EXPECT_NEAR(f.free_fraction(0), 1.0 - std::numbers::pi / 100.0, 1e-14);

    discs.push_back({{9.5, 5}, 1.0, 0});  // crosses the dividing line
    EXPECT_THROW(DiscField(box, GeometryMode::box, discs, 10.0).validate(), Error);
    std::vector<Disc> overlap{{{5, 5}, 1.0, 0}, {{6.5, 5}, 1.0, 0}};
    EXPECT_THROW(DiscField(box, GeometryMode::box, overlap).validate(), Error);
}

TEST(DiscField, PeriodicSeparationUsesMinimumImage) {
    const DiscField f(Region::rect(0, 10, 0, 10), GeometryMode::periodic, {{{0.2, 0.5}, 0.4, 0}});
    const Vec2 d = f.separation({9.5, 9.5}, {0.5, 0.5});
    EXPECT_NEAR(d.x, 1.0, 1e-14);
    EXPECT_NEAR(d.y, 1.0, 1e-14);
    EXPECT_TRUE(f.in_any_disc({9.95, 0.5}));
    EXPECT_FALSE(f.in_any_disc({9.5, 0.5}));
}

TEST(DiscField, CsvRoundTrip) {
    Rng rng(1);
    std::vector<Disc> discs;
    for (int i = 0; i < 30; ++i) discs.push_back({{1 + 2 * (i % 5) + rng.uniform(-0.1, 0.1), 1 + 2.0 * (i / 5)}, 0.3, 0});
    const DiscField f(Region::rect(0, 10, 0, 12), GeometryMode::box, discs);
    const auto path = std::filesystem::temp_directory_path() / "sdd_field_test.csv";
    f.save_csv(path);
    const DiscField g = DiscField::load_csv(path);
    ASSERT_EQ(g.discs().size(), discs.size());
    for (std::size_t i = 0; i < discs.size(); ++i) {
        EXPECT_EQ(g.discs()[i].c.x, discs[i].c.x);
        EXPECT_EQ(g.discs()[i].r, discs[i].r);
    }
    EXPECT_EQ(g.box(), f.box());
    EXPECT_EQ(g.mode(), f.mode());
    std::filesystem::remove(path);
}
