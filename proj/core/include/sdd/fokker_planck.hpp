#pragma once

#include "sdd/analysis.hpp"
#include "sdd/model.hpp"

#include <cstddef>
#include <vector>

namespace sdd {

// Uniform cell-centred grid on [a, b].
struct Grid1D {
    double a = -1.0;
    double b = 1.0;
    std::size_t cells = 400;

    double dx() const { return (b - a) / static_cast<double>(cells); }
    double face(std::size_t i) const { return a + dx() * static_cast<double>(i); }
    double center(std::size_t i) const { return a + dx() * (static_cast<double>(i) + 0.5); }

    // Grid over the model's interval. Throws UnalignedDiscontinuity when a
    // breakpoint of D or rho_eq falls off a face.
    static Grid1D over(const DiffusionModel& model, std::size_t cells);
    void check_aligned(const DiffusionModel& model) const;
};

struct DensityProfile {
    Grid1D grid;
    std::vector<double> rho;  // value per cell
    double time = 0.0;

    double mass() const;
};

// Cell-centre samples of a field.
DensityProfile sample_profile(const ScalarField& f, const Grid1D& grid, double time = 0.0);

struct EvolveOptions {
    // 1 implicit Euler, 0.5 Crank-Nicolson, 0 explicit Euler.
    double theta = 1.0;
    double mass_tolerance = 1e-10;
};

// Advances rho_t = d/dx [ D rho_eq d/dx (rho / rho_eq) ] with zero-flux ends
// from rho0.time to rho0.time + t. Face coefficients are harmonic means of
// D rho_eq in the adjacent cells.
DensityProfile evolve(const DiffusionModel& model, const DensityProfile& rho0, double t, double dt,
                      const EvolveOptions& options = {});

// Largest stable step of the explicit scheme on this grid.
double explicit_step_limit(const DiffusionModel& model, const Grid1D& grid);

// Stationary solution of the scheme: rho_eq sampled at cell centres.
DensityProfile steady_state(const DiffusionModel& model, const Grid1D& grid);

// Normalized C / D(x) on the grid (zero-flux equilibrium of rho_t = (D rho)_xx).
DensityProfile driftfree_ito_steady(const ScalarField& diffusion, const Grid1D& grid);

// Mass of a profile in each bin (cells must nest inside bins), normalized.
std::vector<double> bin_probabilities(const DensityProfile& profile, const BinEdges& edges);

} // namespace sdd
