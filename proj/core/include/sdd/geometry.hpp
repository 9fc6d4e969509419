#pragma once

#include "sdd/vec2.hpp"

namespace sdd {

// Area of the disc |p - c| <= r inside the rectangle [x0, x1] x [y0, y1].
// Exact up to rounding (circular-segment closed form).
double disc_rect_area(Vec2 c, double r, double x0, double x1, double y0, double y1);

} // namespace sdd
