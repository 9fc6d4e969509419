#include "sdd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sdd {

namespace {

// G(t) = integral_0^t sqrt(r^2 - x^2) dx for |t| <= r.
double quarter_integral(double t, double r) {
    t = std::clamp(t, -r, r);
    const double s = std::sqrt(std::max(0.0, r * r - t * t));
    return 0.5 * (t * s + r * r * std::asin(t / r));
}

// Area of the disc (centred at the origin) in {x < a, y < b}.
double corner_area(double a, double b, double r) {
    if (a <= -r || b <= -r) return 0.0;
    // half of the area in {x < a}
    const double left = quarter_integral(a, r) + quarter_integral(r, r);
    if (b < 0.0) return 2.0 * left - corner_area(a, -b, r);
    if (b >= r) return 2.0 * left;
    // integral over x in [-r, A] of min(b, s(x)); s(x) > b for |x| < xb
    const double A = std::min(a, r);
    const double xb = std::sqrt(r * r - b * b);
    double capped = quarter_integral(std::min(A, -xb), r) + quarter_integral(r, r);
    if (A > -xb) capped += b * (std::min(A, xb) + xb);
    if (A > xb) capped += quarter_integral(A, r) - quarter_integral(xb, r);
    return left + capped;
}

} // namespace

double disc_rect_area(Vec2 c, double r, double x0, double x1, double y0, double y1) {
    if (!(r > 0.0) || x1 <= x0 || y1 <= y0) return 0.0;
    const double a0 = x0 - c.x, a1 = x1 - c.x, b0 = y0 - c.y, b1 = y1 - c.y;
    const double area = corner_area(a1, b1, r) - corner_area(a0, b1, r) - corner_area(a1, b0, r) + corner_area(a0, b0, r);
    return std::clamp(area, 0.0, std::numbers::pi * r * r);
}

} // namespace sdd
