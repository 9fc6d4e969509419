#include "sdd/fokker_planck.hpp"
#include "sdd/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sdd {

namespace {

constexpr double align_tol = 1e-12;

// Thomas algorithm; sub[0] and sup[n-1] are ignored.
std::vector<double> solve_tridiagonal(std::vector<double> sub, std::vector<double> diag, std::vector<double> sup,
                                      std::vector<double> rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - sup[i] * x[i + 1]) / diag[i];
    return x;
}

struct Operator {
    std::vector<double> inv_eq;  // 1 / rho_eq per cell
    std::vector<double> face_k;  // harmonic mean of D rho_eq, interior faces 1..n-1 (index i = face between i-1 and i)
    double inv_dx2 = 0.0;

    // (L rho)_i = [K_{i+1}(u_{i+1} - u_i) - K_i(u_i - u_{i-1})] / dx^2
    std::vector<double> apply(const std::vector<double>& rho) const {
        const std::size_t n = rho.size();
        std::vector<double> out(n, 0.0);
        for (std::size_t f = 1; f < n; ++f) {
            const double flux = face_k[f] * (rho[f] * inv_eq[f] - rho[f - 1] * inv_eq[f - 1]) * inv_dx2;
            out[f - 1] += flux;
            out[f] -= flux;
        }
        return out;
    }
};

Operator build_operator(const DiffusionModel& model, const Grid1D& grid) {
    const std::size_t n = grid.cells;
    Operator op;
    op.inv_eq.resize(n);
    std::vector<double> k(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 c{grid.center(i), 0.0};
        const double e = model.rho_eq()(c);
        if (!(e > 0.0)) throw Error(ErrorCode::zero_density, "rho_eq vanishes in a grid cell");
        op.inv_eq[i] = 1.0 / e;
        k[i] = model.diffusion()(c) * e;
    }
    op.face_k.assign(n, 0.0);
    for (std::size_t f = 1; f < n; ++f) op.face_k[f] = 2.0 * k[f - 1] * k[f] / (k[f - 1] + k[f]);
    op.inv_dx2 = 1.0 / (grid.dx() * grid.dx());
    return op;
}

} // namespace

Grid1D Grid1D::over(const DiffusionModel& model, std::size_t cells) {
    if (model.dim() != 1) throw Error(ErrorCode::invalid_argument, "the Fokker-Planck solver is one-dimensional");
    if (cells < 2) throw Error(ErrorCode::invalid_argument, "grid needs at least two cells");
    Grid1D g{model.domain().lo[0], model.domain().hi[0], cells};
    g.check_aligned(model);
    return g;
}

void Grid1D::check_aligned(const DiffusionModel& model) const {
    const double scale = std::max(1.0, std::max(std::abs(a), std::abs(b)));
    auto check = [&](const ScalarField& f) {
        for (double x : f.breakpoints(0)) {
            const double k = (x - a) / dx();
            if (std::abs(k - std::round(k)) * dx() > align_tol * scale) {
                throw Error(ErrorCode::unaligned_discontinuity,
                            "breakpoint " + std::to_string(x) + " does not lie on a grid face");
            }
        }
    };
    check(model.diffusion());
    check(model.rho_eq());
}

double DensityProfile::mass() const {
    double s = 0.0;
    for (double v : rho) s += v;
    return s * grid.dx();
}

DensityProfile sample_profile(const ScalarField& f, const Grid1D& grid, double time) {
    DensityProfile p{grid, std::vector<double>(grid.cells), time};
    for (std::size_t i = 0; i < grid.cells; ++i) p.rho[i] = f(Vec2{grid.center(i), 0.0});
    return p;
}

double explicit_step_limit(const DiffusionModel& model, const Grid1D& grid) {
    const Operator op = build_operator(model, grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.cells; ++i) {
        const double left = i > 0 ? op.face_k[i] : 0.0;
        const double right = i + 1 < grid.cells ? op.face_k[i + 1] : 0.0;
        worst = std::max(worst, (left + right) * op.inv_eq[i] * op.inv_dx2);
    }
    return worst > 0.0 ? 1.0 / worst : std::numeric_limits<double>::infinity();
}

DensityProfile evolve(const DiffusionModel& model, const DensityProfile& rho0, double t, double dt,
                      const EvolveOptions& options) {
    if (!(t >= 0.0) || !(dt > 0.0)) throw Error(ErrorCode::invalid_argument, "need t >= 0 and dt > 0");
    if (rho0.rho.size() != rho0.grid.cells) throw Error(ErrorCode::invalid_argument, "profile size mismatch");
    const double theta = options.theta;
    if (!(theta >= 0.0 && theta <= 1.0)) throw Error(ErrorCode::invalid_argument, "theta must lie in [0, 1]");
    const Grid1D& grid = rho0.grid;
    grid.check_aligned(model);
    const Operator op = build_operator(model, grid);
    const std::size_t n = grid.cells;

    if (theta < 0.5 && dt > explicit_step_limit(model, grid) / (1.0 - 2.0 * theta)) {
        throw Error(ErrorCode::invalid_argument, "time step exceeds the explicit stability bound");
    }

    // -theta L as a tridiagonal matrix.
    std::vector<double> sub(n, 0.0), diag(n, 0.0), sup(n, 0.0);
    if (theta > 0.0) {
        for (std::size_t f = 1; f < n; ++f) {
            const double c = theta * op.face_k[f] * op.inv_dx2;
            // flux into cell f-1 depends on +u_f - u_{f-1}
            diag[f - 1] += c * op.inv_eq[f - 1];
            sup[f - 1] -= c * op.inv_eq[f];
            diag[f] += c * op.inv_eq[f];
            sub[f] -= c * op.inv_eq[f - 1];
        }
    }

    DensityProfile out = rho0;
    const double mass0 = rho0.mass();
    const auto steps = static_cast<std::size_t>(std::ceil(t / dt - 1e-9));
    if (steps == 0) return out;
    const double h = t / static_cast<double>(steps);
    for (std::size_t i = 0; i < n; ++i) {
        diag[i] = 1.0 + diag[i] * h;
        sub[i] *= h;
        sup[i] *= h;
    }
    for (std::size_t s = 0; s < steps; ++s) {
        std::vector<double> rhs = out.rho;
        if (theta < 1.0) {
            const auto lr = op.apply(out.rho);
            for (std::size_t i = 0; i < n; ++i) rhs[i] += (1.0 - theta) * h * lr[i];
        }
        out.rho = theta > 0.0 ? solve_tridiagonal(sub, diag, sup, std::move(rhs)) : std::move(rhs);
    }
    out.time = rho0.time + t;
    const double drift = std::abs(out.mass() - mass0);
    if (drift > options.mass_tolerance * std::max(1.0, std::abs(mass0))) {
        throw Error(ErrorCode::nonconservative_step, "mass changed by " + std::to_string(drift));
    }
    return out;
}

DensityProfile steady_state(const DiffusionModel& model, const Grid1D& grid) {
    grid.check_aligned(model);
    return sample_profile(model.rho_eq(), grid);
}

DensityProfile driftfree_ito_steady(const ScalarField& diffusion, const Grid1D& grid) {
    if (diffusion.dim() != 1) throw Error(ErrorCode::invalid_argument, "expected a 1D diffusion field");
    const ScalarField inv = diffusion.raised(-1.0);
    const double mass = inv.integrate(Region::interval(grid.a, grid.b));
    if (!(mass > 0.0)) throw Error(ErrorCode::zero_mass, "1/D has no mass on the interval");
    DensityProfile p = sample_profile(inv, grid);
    for (auto& v : p.rho) v /= mass;
    return p;
}

std::vector<double> bin_probabilities(const DensityProfile& profile, const BinEdges& edges) {
    std::vector<double> p(edges.count, 0.0);
    const Grid1D& g = profile.grid;
    for (std::size_t i = 0; i < g.cells; ++i) p[edges.index(g.center(i))] += profile.rho[i] * g.dx();
    double sum = 0.0;
    for (double v : p) sum += v;
    if (!(sum > 0.0)) throw Error(ErrorCode::zero_mass, "profile has no mass over the bins");
    for (auto& v : p) v /= sum;
    return p;
}

} // namespace sdd
