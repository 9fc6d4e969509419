#pragma once

#include "sdd/model.hpp"
#include "sdd/vec2.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace sdd {

inline constexpr double overlap_tol = 1e-12;

enum class GeometryMode { box, periodic };

struct Disc {
    Vec2 c;
    double r = 0.0;
    int side = 0;  // 0 left / single region, 1 right of the dividing line
};

// Uniform cell index over one rectangle. A disc is listed in every cell its
// bounding box touches; periodic images carry the shift to apply to the centre.
class CellIndex {
public:
    struct Entry {
        std::uint32_t disc;
        Vec2 shift;
    };

    CellIndex() = default;
    CellIndex(Region area, double min_cell);

    const Region& area() const { return area_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double cell_w() const { return cw_; }
    double cell_h() const { return ch_; }
    int cell_x(double x) const;
    int cell_y(double y) const;
    const std::vector<Entry>& at(int ix, int iy) const { return cells_[static_cast<std::size_t>(iy) * nx_ + ix]; }

    void insert(std::uint32_t disc, Vec2 c, double r, Vec2 shift = {});

private:
    Region area_;
    int nx_ = 0;
    int ny_ = 0;
    double cw_ = 0.0;
    double ch_ = 0.0;
    std::vector<std::vector<Entry>> cells_;
};

// Immutable set of non-overlapping discs in a box (optionally split into two
// sides at x = x_mid) or in a periodic cell.
class DiscField {
public:
    DiscField(Region box, GeometryMode mode, std::vector<Disc> discs, std::optional<double> x_mid = std::nullopt);

    const Region& box() const { return box_; }
    GeometryMode mode() const { return mode_; }
    const std::vector<Disc>& discs() const { return discs_; }
    std::optional<double> x_mid() const { return x_mid_; }
    bool two_domain() const { return x_mid_.has_value(); }
    int sides() const { return two_domain() ? 2 : 1; }

    // Rectangle of one side (the whole box when there is no dividing line).
    Region side_region(int side) const;
    int side_of(Vec2 p) const;
    // Search index used while the particle is on `side`.
    const CellIndex& index(int side) const { return index_[static_cast<std::size_t>(side)]; }

    double free_fraction() const;
    double free_fraction(int side) const;
    double max_radius() const { return max_r_; }

    // Minimum-image separation vector b - a (plain difference in box mode).
    Vec2 separation(Vec2 a, Vec2 b) const;
    bool in_any_disc(Vec2 p, double tol = 0.0) const;
    // Depth max(0, r - |p - c|) of the deepest disc around p, searched in the
    // index of `side`.
    double penetration(Vec2 p, int side) const;

    // Throws InvalidArgument on overlap or a disc touching the dividing line.
    void validate() const;

    void save_csv(const std::filesystem::path& path) const;
    static DiscField load_csv(const std::filesystem::path& path);

private:
    void build_index();

    Region box_;
    GeometryMode mode_;
    std::vector<Disc> discs_;
    std::optional<double> x_mid_;
    double max_r_ = 0.0;
    std::vector<CellIndex> index_;
};

// Free-volume fraction 1 - (disc area inside the region) / area, with disc
// area clipped to the region.
double free_fraction(const std::vector<Disc>& discs, const Region& region, GeometryMode mode);

} // namespace sdd
