#pragma once

#include "sdd/vec2.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace sdd {

// Distance below which a point counts as lying on a piece boundary.
inline constexpr double discontinuity_tol = 1e-12;

// Closed axis-aligned cell: an interval (dim 1) or a rectangle (dim 2).
struct Region {
    int dim = 1;
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> hi{0.0, 0.0};

    static Region interval(double a, double b) { return {1, {a, 0.0}, {b, 0.0}}; }
    static Region rect(double x0, double x1, double y0, double y1) { return {2, {x0, y0}, {x1, y1}}; }

    bool contains(Vec2 p, double tol = 0.0) const;
    bool strictly_inside(Vec2 p, double tol) const;
    double measure() const;
    double width(int axis) const { return hi[axis] - lo[axis]; }
    double diameter() const;
    Vec2 center() const { return {0.5 * (lo[0] + hi[0]), dim == 2 ? 0.5 * (lo[1] + hi[1]) : 0.0}; }
    friend bool operator==(const Region&, const Region&) = default;
};

std::string format_region(const Region& r);
Region parse_region(const std::string& text);

struct Monomial {
    double coef = 0.0;
    int px = 0;
    int py = 0;
};

// Polynomial in (x, y) stored as a list of monomials with distinct exponents.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<Monomial> terms);

    static Polynomial constant(double c) { return Polynomial({{c, 0, 0}}); }
    // c0 + c1 x + c2 x^2 + ...
    static Polynomial in_x(std::vector<double> coeffs);

    double operator()(Vec2 p) const;
    Vec2 gradient(Vec2 p) const;
    Polynomial derivative(int axis) const;
    int degree() const;
    int max_power(int axis) const;
    bool is_constant() const { return degree() <= 0; }
    double constant_term() const;
    const std::vector<Monomial>& terms() const { return terms_; }

    // Exact integral of the monomials over a region.
    double integrate(const Region& r) const;

    friend Polynomial operator*(double s, const Polynomial& p);
    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend bool operator==(const Polynomial& a, const Polynomial& b);

private:
    std::vector<Monomial> terms_;
};

// Closed-form piece expression:
//   power form: scale * P(x)^power   (power 1 is a plain polynomial)
//   exp form:   scale * exp(Q(x))    (Q at most quadratic)
// Each form has an analytic gradient.
class Expression {
public:
    enum class Kind { power, exp };

    Expression() : Expression(constant(0.0)) {}

    static Expression constant(double c);
    static Expression polynomial(Polynomial p);
    static Expression power(double scale, Polynomial base, double exponent);
    static Expression exp_quadratic(double scale, Polynomial q);

    Kind kind() const { return kind_; }
    double scale() const { return scale_; }
    const Polynomial& poly() const { return poly_; }
    double exponent() const { return exponent_; }

    double operator()(Vec2 p) const;
    Vec2 gradient(Vec2 p) const;
    bool is_constant() const;

    // Integral over a region: exact for polynomials, adaptive Gauss-Kronrod
    // otherwise (relative accuracy ~1e-14).
    double integrate(const Region& r) const;

    // scale * e(x)^k within the same closed family.
    Expression raised(double k) const;
    Expression scaled(double s) const;

    friend bool operator==(const Expression&, const Expression&) = default;

private:
    Expression(Kind kind, double scale, Polynomial poly, double exponent)
        : kind_(kind), scale_(scale), poly_(std::move(poly)), exponent_(exponent) {}

    Kind kind_;
    double scale_;
    Polynomial poly_;
    double exponent_;
};

struct Piece {
    Region region;
    Expression expr;
};

// Piecewise-smooth field on a union of axis-aligned cells. Evaluation picks the
// first piece (in list order) whose closed cell contains the point; points in
// no piece evaluate to zero. The internal faces between pieces form the
// discontinuity set.
class ScalarField {
public:
    ScalarField() = default;
    ScalarField(int dim, std::vector<Piece> pieces);

    static ScalarField constant(const Region& r, double c);
    // Two constant pieces split at x = split.
    static ScalarField two_piece(const Region& r, double split, double left, double right);
    static ScalarField parse(const std::string& text);

    int dim() const { return dim_; }
    std::span<const Piece> pieces() const { return pieces_; }
    const Piece* piece_at(Vec2 p) const;

    double operator()(Vec2 p) const;
    // Analytic gradient of the containing piece. Throws OnDiscontinuity on the
    // discontinuity set and InvalidArgument outside the support.
    Vec2 gradient(Vec2 p) const;
    bool on_discontinuity(Vec2 p, double tol = discontinuity_tol) const;
    // Sorted coordinates of internal faces normal to `axis`.
    std::vector<double> breakpoints(int axis) const;
    bool is_smooth() const { return breakpoints(0).empty() && breakpoints(1).empty(); }

    double integrate() const;
    double integrate(const Region& over) const;
    Region bounds() const;

    ScalarField scaled(double s) const;
    ScalarField raised(double k) const;

    std::string to_string() const;

private:
    bool face_is_internal(int axis, double coord, const Piece& owner) const;

    int dim_ = 1;
    std::vector<Piece> pieces_;
};

enum class BoundaryCondition { reflecting };

// The modelling pair (D, rho_eq) on a box with reflecting faces.
class DiffusionModel {
public:
    DiffusionModel(Region domain, ScalarField diffusion, ScalarField rho_eq, double c_norm = 1.0);

    int dim() const { return domain_.dim; }
    const Region& domain() const { return domain_; }
    const ScalarField& diffusion() const { return diffusion_; }
    const ScalarField& rho_eq() const { return rho_eq_; }
    double c_norm() const { return c_norm_; }
    BoundaryCondition boundary(int face) const { return faces_[face]; }
    bool has_discontinuities() const { return !diffusion_.is_smooth() || !rho_eq_.is_smooth(); }
    bool on_discontinuity(Vec2 p, double tol = discontinuity_tol) const {
        return diffusion_.on_discontinuity(p, tol) || rho_eq_.on_discontinuity(p, tol);
    }

private:
    Region domain_;
    ScalarField diffusion_;
    ScalarField rho_eq_;
    double c_norm_;
    std::array<BoundaryCondition, 4> faces_{BoundaryCondition::reflecting, BoundaryCondition::reflecting,
                                            BoundaryCondition::reflecting, BoundaryCondition::reflecting};
};

// a(x) = grad D + D grad(ln rho_eq): the Ito drift whose zero-flux equilibrium is rho_eq.
Vec2 drift_from_model(const DiffusionModel& model, Vec2 x);

// Rescales rho_eq to unit mass over the domain; D untouched. c_norm records the factor applied.
DiffusionModel normalize(const DiffusionModel& model);

// b(x) = sqrt(2 D(x)), piece by piece.
ScalarField noise_from_diffusion(const ScalarField& diffusion);

// One-dimensional SDE dX = a dt + b dB read with evaluation point alpha
// (0 Ito, 1/2 Stratonovich, 1 isothermal).
class ConventionSpec {
public:
    ConventionSpec(double alpha, ScalarField drift, ScalarField noise);

    double alpha() const { return alpha_; }
    const ScalarField& drift() const { return drift_; }
    const ScalarField& noise() const { return noise_; }

private:
    double alpha_;
    ScalarField drift_;
    ScalarField noise_;
};

// Drift of the equivalent Ito SDE: a(x) + alpha b(x) b'(x).
double to_ito_drift(const ConventionSpec& conv, double x);

// Unnormalized stationary density of dX = b dB read with convention alpha on a
// reflecting interval: proportional to b^(2 alpha - 2).
ScalarField stationary_density_driftfree(double alpha, const ScalarField& noise);

} // namespace sdd
