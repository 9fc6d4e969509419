#include "sdd/disc_field.hpp"
#include "sdd/csv.hpp"
#include "sdd/error.hpp"
#include "sdd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace sdd {

CellIndex::CellIndex(Region area, double min_cell) : area_(area) {
    const double w = area.width(0);
    const double h = area.width(1);
    constexpr double max_cells = 4e6;
    double cell = std::max(min_cell, std::sqrt(w * h / max_cells));
    nx_ = std::max(1, static_cast<int>(std::floor(w / cell)));
    ny_ = std::max(1, static_cast<int>(std::floor(h / cell)));
    cw_ = w / nx_;
    ch_ = h / ny_;
    cells_.resize(static_cast<std::size_t>(nx_) * ny_);
}

int CellIndex::cell_x(double x) const {
    return std::clamp(static_cast<int>(std::floor((x - area_.lo[0]) / cw_)), 0, nx_ - 1);
}

int CellIndex::cell_y(double y) const {
    return std::clamp(static_cast<int>(std::floor((y - area_.lo[1]) / ch_)), 0, ny_ - 1);
}

void CellIndex::insert(std::uint32_t disc, Vec2 c, double r, Vec2 shift) {
    const Vec2 p = c + shift;
    if (p.x + r < area_.lo[0] || p.x - r > area_.hi[0] || p.y + r < area_.lo[1] || p.y - r > area_.hi[1]) return;
    const int x0 = cell_x(p.x - r), x1 = cell_x(p.x + r);
    const int y0 = cell_y(p.y - r), y1 = cell_y(p.y + r);
    for (int iy = y0; iy <= y1; ++iy) {
        for (int ix = x0; ix <= x1; ++ix) cells_[static_cast<std::size_t>(iy) * nx_ + ix].push_back({disc, shift});
    }
}

DiscField::DiscField(Region box, GeometryMode mode, std::vector<Disc> discs, std::optional<double> x_mid)
    : box_(box), mode_(mode), discs_(std::move(discs)), x_mid_(x_mid) {
    if (box_.dim != 2 || !(box_.width(0) > 0.0) || !(box_.width(1) > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "disc field needs a 2D box");
    }
    if (x_mid_ && mode_ == GeometryMode::periodic) {
        throw Error(ErrorCode::invalid_argument, "a periodic cell has no dividing line");
    }
    if (x_mid_ && !(*x_mid_ > box_.lo[0] && *x_mid_ < box_.hi[0])) {
        throw Error(ErrorCode::invalid_argument, "dividing line outside the box");
    }
    for (const auto& d : discs_) {
        if (!(d.r > 0.0)) throw Error(ErrorCode::invalid_argument, "disc radius must be positive");
        max_r_ = std::max(max_r_, d.r);
    }
    build_index();
}

Region DiscField::side_region(int side) const {
    if (!x_mid_) return box_;
    Region r = box_;
    (side == 0 ? r.hi[0] : r.lo[0]) = *x_mid_;
    return r;
}

int DiscField::side_of(Vec2 p) const {
    return x_mid_ && p.x >= *x_mid_ ? 1 : 0;
}

void DiscField::build_index() {
    index_.clear();
    for (int s = 0; s < sides(); ++s) {
        const Region area = side_region(s);
        double r_side = 0.0;
        std::size_t n_side = 0;
        for (const auto& d : discs_) {
            if (d.side == s || !x_mid_) {
                r_side = std::max(r_side, d.r);
                ++n_side;
            }
        }
        const double spacing = std::sqrt(area.measure() / static_cast<double>(std::max<std::size_t>(n_side, 1)));
        CellIndex idx(area, std::max(2.0 * r_side, spacing));
        for (std::uint32_t i = 0; i < discs_.size(); ++i) {
            const Disc& d = discs_[i];
            if (x_mid_ && d.side != s) continue;
            if (mode_ == GeometryMode::box) {
                idx.insert(i, d.c, d.r);
                continue;
            }
            const double lx = box_.width(0), ly = box_.width(1);
            for (int sy = -1; sy <= 1; ++sy) {
                for (int sx = -1; sx <= 1; ++sx) idx.insert(i, d.c, d.r, Vec2{sx * lx, sy * ly});
            }
        }
        index_.push_back(std::move(idx));
    }
}

Vec2 DiscField::separation(Vec2 a, Vec2 b) const {
    Vec2 d = b - a;
    if (mode_ == GeometryMode::periodic) {
        const double lx = box_.width(0), ly = box_.width(1);
        d.x -= lx * std::round(d.x / lx);
        d.y -= ly * std::round(d.y / ly);
    }
    return d;
}

bool DiscField::in_any_disc(Vec2 p, double tol) const {
    const int s = side_of(p);
    const CellIndex& idx = index_[static_cast<std::size_t>(s)];
    for (const auto& e : idx.at(idx.cell_x(p.x), idx.cell_y(p.y))) {
        const Disc& d = discs_[e.disc];
        const double rr = d.r + tol;
        if (norm2(p - (d.c + e.shift)) < rr * rr) return true;
    }
    return false;
}

double DiscField::penetration(Vec2 p, int side) const {
    const CellIndex& idx = index_[static_cast<std::size_t>(side)];
    double depth = 0.0;
    for (const auto& e : idx.at(idx.cell_x(p.x), idx.cell_y(p.y))) {
        const Disc& d = discs_[e.disc];
        depth = std::max(depth, d.r - norm(p - (d.c + e.shift)));
    }
    return depth;
}

void DiscField::validate() const {
    for (std::size_t i = 0; i < discs_.size(); ++i) {
        const Disc& a = discs_[i];
        if (x_mid_ && std::abs(a.c.x - *x_mid_) < a.r - overlap_tol) {
            throw Error(ErrorCode::invalid_argument, "disc " + std::to_string(i) + " crosses the dividing line");
        }
        if (x_mid_ && a.side != side_of(a.c)) throw Error(ErrorCode::invalid_argument, "disc side tag mismatch");
        const CellIndex& idx = index_[static_cast<std::size_t>(x_mid_ ? a.side : 0)];
        const int x0 = idx.cell_x(a.c.x - a.r), x1 = idx.cell_x(a.c.x + a.r);
        const int y0 = idx.cell_y(a.c.y - a.r), y1 = idx.cell_y(a.c.y + a.r);
        for (int iy = y0; iy <= y1; ++iy) {
            for (int ix = x0; ix <= x1; ++ix) {
                for (const auto& e : idx.at(ix, iy)) {
                    if (e.disc == i && e.shift == Vec2{}) continue;
                    const Disc& b = discs_[e.disc];
                    const double dist = norm(b.c + e.shift - a.c);
                    if (dist < a.r + b.r - overlap_tol) {
                        throw Error(ErrorCode::invalid_argument,
                                    "discs " + std::to_string(i) + " and " + std::to_string(e.disc) + " overlap");
                    }
                }
            }
        }
    }
}

double free_fraction(const std::vector<Disc>& discs, const Region& region, GeometryMode mode) {
    double covered = 0.0;
    for (const auto& d : discs) {
        covered += mode == GeometryMode::periodic
                       ? std::numbers::pi * d.r * d.r
                       : disc_rect_area(d.c, d.r, region.lo[0], region.hi[0], region.lo[1], region.hi[1]);
    }
    return 1.0 - covered / region.measure();
}

double DiscField::free_fraction() const {
    return sdd::free_fraction(discs_, box_, mode_);
}

double DiscField::free_fraction(int side) const {
    if (!x_mid_) return free_fraction();
    std::vector<Disc> own;
    for (const auto& d : discs_) {
        if (d.side == side) own.push_back(d);
    }
    return sdd::free_fraction(own, side_region(side), mode_);
}

void DiscField::save_csv(const std::filesystem::path& path) const {
    CsvWriter w(path);
    w.meta("box", format_region(box_));
    w.meta("mode", mode_ == GeometryMode::box ? "box" : "periodic");
    if (x_mid_) w.meta("x_mid", format_double(*x_mid_));
    w.meta("discs", std::to_string(discs_.size()));
    w.meta("free_fraction", format_double(free_fraction()));
    for (int s = 0; s < sides() && x_mid_; ++s) {
        w.meta("free_fraction_" + std::string(s == 0 ? "left" : "right"), format_double(free_fraction(s)));
    }
    w.header({"cx", "cy", "r", "side"});
    for (const auto& d : discs_) {
        w.cell(d.c.x).cell(d.c.y).cell(d.r).cell(d.side);
        w.end_row();
    }
}

DiscField DiscField::load_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    std::optional<Region> box;
    GeometryMode mode = GeometryMode::box;
    std::optional<double> x_mid;
    for (const auto& [k, v] : t.meta) {
        if (k == "box") box = parse_region(v);
        if (k == "mode") {
            if (v != "box" && v != "periodic") throw Error(ErrorCode::parse_error, "unknown geometry mode '" + v + "'");
            mode = v == "box" ? GeometryMode::box : GeometryMode::periodic;
        }
        if (k == "x_mid") x_mid = parse_double(v);
    }
    if (!box) throw Error(ErrorCode::parse_error, "disc file lacks a box line");
    const std::size_t cx = t.column("cx"), cy = t.column("cy"), cr = t.column("r"), cs = t.column("side");
    std::vector<Disc> discs;
    discs.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        discs.push_back({{parse_double(row[cx]), parse_double(row[cy])}, parse_double(row[cr]),
                         static_cast<int>(parse_double(row[cs]))});
    }
    return DiscField(*box, mode, std::move(discs), x_mid);
}

} // namespace sdd
