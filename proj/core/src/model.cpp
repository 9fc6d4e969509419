#include "sdd/model.hpp"
#include "sdd/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

namespace sdd {

namespace {

double ipow(double base, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

double integrate_1d(const auto& f, double a, double b) {
    if (a == b) return 0.0;
    double error = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, 1e-14, &error);
}

} // namespace

// ---------------------------------------------------------------------------
// Region

bool Region::contains(Vec2 p, double tol) const {
    for (int a = 0; a < dim; ++a) {
        if (p[a] < lo[a] - tol || p[a] > hi[a] + tol) return false;
    }
    return true;
}

bool Region::strictly_inside(Vec2 p, double tol) const {
    for (int a = 0; a < dim; ++a) {
        if (p[a] <= lo[a] + tol || p[a] >= hi[a] - tol) return false;
    }
    return true;
}

double Region::measure() const {
    double m = 1.0;
    for (int a = 0; a < dim; ++a) m *= hi[a] - lo[a];
    return m;
}

double Region::diameter() const {
    return dim == 1 ? hi[0] - lo[0] : std::hypot(hi[0] - lo[0], hi[1] - lo[1]);
}

// ---------------------------------------------------------------------------
// Polynomial

Polynomial::Polynomial(std::vector<Monomial> terms) {
    std::map<std::pair<int, int>, double> merged;
    for (const auto& t : terms) {
        if (t.px < 0 || t.py < 0) throw Error(ErrorCode::invalid_argument, "negative monomial exponent");
        merged[{t.px, t.py}] += t.coef;
    }
    for (const auto& [key, coef] : merged) {
        if (coef != 0.0) terms_.push_back({coef, key.first, key.second});
    }
}

Polynomial Polynomial::in_x(std::vector<double> coeffs) {
    std::vector<Monomial> terms;
    for (std::size_t i = 0; i < coeffs.size(); ++i) terms.push_back({coeffs[i], static_cast<int>(i), 0});
    return Polynomial(std::move(terms));
}

double Polynomial::operator()(Vec2 p) const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.coef * ipow(p.x, t.px) * ipow(p.y, t.py);
    return s;
}

Vec2 Polynomial::gradient(Vec2 p) const {
    Vec2 g;
    for (const auto& t : terms_) {
        if (t.px > 0) g.x += t.coef * t.px * ipow(p.x, t.px - 1) * ipow(p.y, t.py);
        if (t.py > 0) g.y += t.coef * t.py * ipow(p.x, t.px) * ipow(p.y, t.py - 1);
    }
    return g;
}

Polynomial Polynomial::derivative(int axis) const {
    std::vector<Monomial> out;
    for (const auto& t : terms_) {
        if (axis == 0 && t.px > 0) out.push_back({t.coef * t.px, t.px - 1, t.py});
        if (axis == 1 && t.py > 0) out.push_back({t.coef * t.py, t.px, t.py - 1});
    }
    return Polynomial(std::move(out));
}

int Polynomial::degree() const {
    int d = terms_.empty() ? -1 : 0;
    for (const auto& t : terms_) d = std::max(d, t.px + t.py);
    return d;
}

int Polynomial::max_power(int axis) const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, axis == 0 ? t.px : t.py);
    return d;
}

double Polynomial::constant_term() const {
    for (const auto& t : terms_) {
        if (t.px == 0 && t.py == 0) return t.coef;
    }
    return 0.0;
}

double Polynomial::integrate(const Region& r) const {
    double s = 0.0;
    for (const auto& t : terms_) {
        const double ix = (ipow(r.hi[0], t.px + 1) - ipow(r.lo[0], t.px + 1)) / (t.px + 1);
        if (r.dim == 1) {
            if (t.py == 0) s += t.coef * ix;
        } else {
            const double iy = (ipow(r.hi[1], t.py + 1) - ipow(r.lo[1], t.py + 1)) / (t.py + 1);
            s += t.coef * ix * iy;
        }
    }
    return s;
}

Polynomial operator*(double s, const Polynomial& p) {
    std::vector<Monomial> terms = p.terms_;
    for (auto& t : terms) t.coef *= s;
    return Polynomial(std::move(terms));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<Monomial> terms = a.terms_;
    terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
    return Polynomial(std::move(terms));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    std::vector<Monomial> terms;
    for (const auto& s : a.terms_) {
        for (const auto& t : b.terms_) terms.push_back({s.coef * t.coef, s.px + t.px, s.py + t.py});
    }
    return Polynomial(std::move(terms));
}

bool operator==(const Polynomial& a, const Polynomial& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i) {
        const auto& s = a.terms_[i];
        const auto& t = b.terms_[i];
        if (s.coef != t.coef || s.px != t.px || s.py != t.py) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Expression

Expression Expression::constant(double c) {
    return Expression(Kind::power, c, Polynomial::constant(1.0), 1.0);
}

Expression Expression::polynomial(Polynomial p) {
    if (p.is_constant()) return constant(p.constant_term());
    return Expression(Kind::power, 1.0, std::move(p), 1.0);
}

Expression Expression::power(double scale, Polynomial base, double exponent) {
    if (!std::isfinite(scale) || !std::isfinite(exponent)) {
        throw Error(ErrorCode::invalid_argument, "non-finite power expression");
    }
    if (exponent == 0.0 || base.is_constant()) {
        const double b = base.constant_term();
        return constant(exponent == 0.0 ? scale : scale * std::pow(b, exponent));
    }
    return Expression(Kind::power, scale, std::move(base), exponent);
}

Expression Expression::exp_quadratic(double scale, Polynomial q) {
    if (q.degree() > 2) throw Error(ErrorCode::invalid_argument, "exp expression needs a polynomial of degree <= 2");
    if (q.is_constant()) return constant(scale * std::exp(q.constant_term()));
    return Expression(Kind::exp, scale, std::move(q), 1.0);
}

double Expression::operator()(Vec2 p) const {
    const double v = poly_(p);
    if (kind_ == Kind::exp) return scale_ * std::exp(v);
    if (exponent_ == 1.0) return scale_ * v;
    return scale_ * std::pow(v, exponent_);
}

Vec2 Expression::gradient(Vec2 p) const {
    const Vec2 g = poly_.gradient(p);
    if (kind_ == Kind::exp) return (scale_ * std::exp(poly_(p))) * g;
    if (exponent_ == 1.0) return scale_ * g;
    return (scale_ * exponent_ * std::pow(poly_(p), exponent_ - 1.0)) * g;
}

bool Expression::is_constant() const {
    return scale_ == 0.0 || poly_.is_constant();
}

double Expression::integrate(const Region& r) const {
    if (is_constant()) return (*this)(r.center()) * r.measure();
    if (kind_ == Kind::power && exponent_ == 1.0) return scale_ * poly_.integrate(r);
    if (r.dim == 1) {
        return integrate_1d([this](double x) { return (*this)(Vec2{x, 0.0}); }, r.lo[0], r.hi[0]);
    }
    return integrate_1d(
        [this, &r](double x) {
            return integrate_1d([this, x](double y) { return (*this)(Vec2{x, y}); }, r.lo[1], r.hi[1]);
        },
        r.lo[0], r.hi[0]);
}

Expression Expression::raised(double k) const {
    if (kind_ == Kind::exp) return exp_quadratic(std::pow(scale_, k), k * poly_);
    if (is_constant()) return constant(std::pow((*this)(Vec2{}), k));
    return power(std::pow(scale_, k), poly_, exponent_ * k);
}

Expression Expression::scaled(double s) const {
    Expression e = *this;
    e.scale_ *= s;
    return e;
}

// ---------------------------------------------------------------------------
// ScalarField

ScalarField::ScalarField(int dim, std::vector<Piece> pieces) : dim_(dim), pieces_(std::move(pieces)) {
    if (dim_ != 1 && dim_ != 2) throw Error(ErrorCode::invalid_argument, "field dimension must be 1 or 2");
    if (pieces_.empty()) throw Error(ErrorCode::invalid_argument, "field needs at least one piece");
    for (const auto& p : pieces_) {
        if (p.region.dim != dim_) throw Error(ErrorCode::invalid_argument, "piece dimension mismatch");
        for (int a = 0; a < dim_; ++a) {
            if (!(p.region.lo[a] < p.region.hi[a])) throw Error(ErrorCode::invalid_argument, "empty piece region");
        }
    }
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        for (std::size_t j = i + 1; j < pieces_.size(); ++j) {
            bool overlap = true;
            for (int a = 0; a < dim_; ++a) {
                const double lo = std::max(pieces_[i].region.lo[a], pieces_[j].region.lo[a]);
                const double hi = std::min(pieces_[i].region.hi[a], pieces_[j].region.hi[a]);
                if (hi - lo <= discontinuity_tol) overlap = false;
            }
            if (overlap) throw Error(ErrorCode::invalid_argument, "field pieces overlap");
        }
    }
}

ScalarField ScalarField::constant(const Region& r, double c) {
    return ScalarField(r.dim, {{r, Expression::constant(c)}});
}

ScalarField ScalarField::two_piece(const Region& r, double split, double left, double right) {
    Region a = r;
    Region b = r;
    a.hi[0] = split;
    b.lo[0] = split;
    return ScalarField(r.dim, {{a, Expression::constant(left)}, {b, Expression::constant(right)}});
}

const Piece* ScalarField::piece_at(Vec2 p) const {
    for (const auto& piece : pieces_) {
        if (piece.region.contains(p)) return &piece;
    }
    return nullptr;
}

double ScalarField::operator()(Vec2 p) const {
    const Piece* piece = piece_at(p);
    return piece ? piece->expr(p) : 0.0;
}

Vec2 ScalarField::gradient(Vec2 p) const {
    if (on_discontinuity(p)) throw Error(ErrorCode::on_discontinuity, "gradient requested on a piece boundary");
    const Piece* piece = piece_at(p);
    if (!piece) throw Error(ErrorCode::invalid_argument, "gradient requested outside the field support");
    Vec2 g = piece->expr.gradient(p);
    if (dim_ == 1) g.y = 0.0;
    return g;
}

bool ScalarField::face_is_internal(int axis, double coord, const Piece& owner) const {
    const int other = 1 - axis;
    for (const auto& piece : pieces_) {
        if (&piece == &owner) continue;
        const bool touches = std::abs(piece.region.lo[axis] - coord) <= discontinuity_tol ||
                             std::abs(piece.region.hi[axis] - coord) <= discontinuity_tol;
        if (!touches) continue;
        if (dim_ == 1) return true;
        const double lo = std::max(piece.region.lo[other], owner.region.lo[other]);
        const double hi = std::min(piece.region.hi[other], owner.region.hi[other]);
        if (hi > lo) return true;
    }
    return false;
}

bool ScalarField::on_discontinuity(Vec2 p, double tol) const {
    for (const auto& piece : pieces_) {
        if (!piece.region.contains(p, tol)) continue;
        for (int a = 0; a < dim_; ++a) {
            for (double face : {piece.region.lo[a], piece.region.hi[a]}) {
                if (std::abs(p[a] - face) <= tol && face_is_internal(a, face, piece)) return true;
            }
        }
    }
    return false;
}

std::vector<double> ScalarField::breakpoints(int axis) const {
    std::vector<double> out;
    if (axis >= dim_) return out;
    for (const auto& piece : pieces_) {
        for (double face : {piece.region.lo[axis], piece.region.hi[axis]}) {
            if (face_is_internal(axis, face, piece)) out.push_back(face);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](double a, double b) { return std::abs(a - b) <= discontinuity_tol; }),
              out.end());
    return out;
}

double ScalarField::integrate() const {
    double s = 0.0;
    for (const auto& piece : pieces_) s += piece.expr.integrate(piece.region);
    return s;
}

double ScalarField::integrate(const Region& over) const {
    double s = 0.0;
    for (const auto& piece : pieces_) {
        Region cut = piece.region;
        bool empty = false;
        for (int a = 0; a < dim_; ++a) {
            cut.lo[a] = std::max(cut.lo[a], over.lo[a]);
            cut.hi[a] = std::min(cut.hi[a], over.hi[a]);
            if (cut.hi[a] <= cut.lo[a]) empty = true;
        }
        if (!empty) s += piece.expr.integrate(cut);
    }
    return s;
}

Region ScalarField::bounds() const {
    Region b = pieces_.front().region;
    for (const auto& piece : pieces_) {
        for (int a = 0; a < dim_; ++a) {
            b.lo[a] = std::min(b.lo[a], piece.region.lo[a]);
            b.hi[a] = std::max(b.hi[a], piece.region.hi[a]);
        }
    }
    return b;
}

ScalarField ScalarField::scaled(double s) const {
    std::vector<Piece> out = pieces_;
    for (auto& p : out) p.expr = p.expr.scaled(s);
    return ScalarField(dim_, std::move(out));
}

ScalarField ScalarField::raised(double k) const {
    std::vector<Piece> out = pieces_;
    for (auto& p : out) p.expr = p.expr.raised(k);
    return ScalarField(dim_, std::move(out));
}

// ---------------------------------------------------------------------------
// DiffusionModel

namespace {

// Probe points covering each piece: a lattice including the corners.
template <class Fn>
void for_each_probe(const Region& domain, const ScalarField& field, Fn&& fn) {
    constexpr int n = 16;
    const int ny = domain.dim == 2 ? n : 0;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= ny; ++j) {
            Vec2 p{domain.lo[0] + domain.width(0) * i / n, domain.dim == 2 ? domain.lo[1] + domain.width(1) * j / n : 0.0};
            fn(p);
        }
    }
    for (const auto& piece : field.pieces()) {
        const Region& r = piece.region;
        for (int i = 0; i <= 4; ++i) {
            for (int j = 0; j <= (r.dim == 2 ? 4 : 0); ++j) {
                Vec2 p{r.lo[0] + r.width(0) * i / 4, r.dim == 2 ? r.lo[1] + r.width(1) * j / 4 : 0.0};
                if (domain.contains(p)) fn(p);
            }
        }
    }
}

} // namespace

DiffusionModel::DiffusionModel(Region domain, ScalarField diffusion, ScalarField rho_eq, double c_norm)
    : domain_(domain), diffusion_(std::move(diffusion)), rho_eq_(std::move(rho_eq)), c_norm_(c_norm) {
    if (domain_.dim != 1 && domain_.dim != 2) throw Error(ErrorCode::invalid_argument, "domain must be 1D or 2D");
    for (int a = 0; a < domain_.dim; ++a) {
        if (!(domain_.lo[a] < domain_.hi[a])) throw Error(ErrorCode::invalid_argument, "empty domain");
    }
    if (diffusion_.dim() != domain_.dim || rho_eq_.dim() != domain_.dim) {
        throw Error(ErrorCode::invalid_argument, "field and domain dimensions differ");
    }
    for_each_probe(domain_, diffusion_, [&](Vec2 p) {
        const double d = diffusion_(p);
        if (!(d > 0.0) || !std::isfinite(d)) throw Error(ErrorCode::invalid_argument, "D must be positive on the domain");
    });
    for_each_probe(domain_, rho_eq_, [&](Vec2 p) {
        const double r = rho_eq_(p);
        if (!(r >= 0.0) || !std::isfinite(r)) throw Error(ErrorCode::invalid_argument, "rho_eq must be nonnegative");
    });
}

Vec2 drift_from_model(const DiffusionModel& model, Vec2 x) {
    if (!model.domain().strictly_inside(x, discontinuity_tol)) {
        throw Error(ErrorCode::invalid_argument, "drift requested outside the open domain");
    }
    if (model.on_discontinuity(x)) throw Error(ErrorCode::on_discontinuity, "drift undefined on a field boundary");
    const double rho = model.rho_eq()(x);
    if (rho == 0.0) throw Error(ErrorCode::zero_density, "rho_eq vanishes at the query point");
    const double d = model.diffusion()(x);
    return model.diffusion().gradient(x) + (d / rho) * model.rho_eq().gradient(x);
}

DiffusionModel normalize(const DiffusionModel& model) {
    const double mass = model.rho_eq().integrate(model.domain());
    if (!(mass > 0.0) || !std::isfinite(mass)) throw Error(ErrorCode::zero_mass, "rho_eq has no positive finite mass");
    return DiffusionModel(model.domain(), model.diffusion(), model.rho_eq().scaled(1.0 / mass),
                          model.c_norm() / mass);
}

ScalarField noise_from_diffusion(const ScalarField& diffusion) {
    return diffusion.raised(0.5).scaled(std::sqrt(2.0));
}

// ---------------------------------------------------------------------------
// Conventions

ConventionSpec::ConventionSpec(double alpha, ScalarField drift, ScalarField noise)
    : alpha_(alpha), drift_(std::move(drift)), noise_(std::move(noise)) {
    if (!(alpha_ >= 0.0 && alpha_ <= 1.0)) throw Error(ErrorCode::invalid_argument, "alpha must lie in [0, 1]");
    if (drift_.dim() != 1 || noise_.dim() != 1) {
        throw Error(ErrorCode::invalid_argument, "convention conversions are one-dimensional");
    }
    for_each_probe(noise_.bounds(), noise_, [&](Vec2 p) {
        if (!(noise_(p) > 0.0)) throw Error(ErrorCode::invalid_argument, "noise b(x) must be positive");
    });
}

double to_ito_drift(const ConventionSpec& conv, double x) {
    const Vec2 p{x, 0.0};
    if (conv.noise().on_discontinuity(p)) throw Error(ErrorCode::on_discontinuity, "b' undefined at a piece boundary");
    const double a = conv.drift()(p);
    if (conv.alpha() == 0.0) return a;
    return a + conv.alpha() * conv.noise()(p) * conv.noise().gradient(p).x;
}

ScalarField stationary_density_driftfree(double alpha, const ScalarField& noise) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::invalid_argument, "alpha must lie in [0, 1]");
    if (noise.dim() != 1) throw Error(ErrorCode::invalid_argument, "convention densities are one-dimensional");
    return noise.raised(2.0 * alpha - 2.0);
}

} // namespace sdd
