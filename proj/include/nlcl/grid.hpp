#pragma once

#include <optional>
#include <span>
#include <vector>

namespace nlcl {

/// Uniform 1-D grid on [x_min, x_max] with M cells of width dx.
/// Cell i is [x_min + i*dx, x_min + (i+1)*dx); interface e sits at x_min + e*dx
/// for e = 0..M. The state is zero-extended outside the domain.
struct GridSpec {
    double x_min = 0.0;
    double x_max = 0.0;
    double dx = 0.0;
    int cells = 0;

    double x_center(int i) const { return x_min + (i + 0.5) * dx; }
    double x_interface(int e) const { return x_min + e * dx; }
    double span() const { return x_max - x_min; }
};

/// Validates that (x_max-x_min)/dx is an integer (1e-9 relative) and M >= 2.
GridSpec make_grid(double x_min, double x_max, double dx);

/// CFL-constrained time discretization; T = n_steps * dt.
struct TimeGrid {
    double dt = 0.0;
    long n_steps = 0;
    double lambda = 0.0; // dt/dx
    double T = 0.0;
    double lambda_max = 0.0; // the CFL bound the grid was built against
};

/// lambda_max = min(1, 4-6*beta, 6*beta) / (1 + 6*lip_f*nu_max).
/// If lambda_user is given it must not exceed the bound and is used as the
/// starting ratio; dt is then shrunk minimally so T/dt is an integer.
TimeGrid cfl_time_grid(double dx, double T, double beta, double lip_f, double nu_max,
                       std::optional<double> lambda_user = std::nullopt);

/// Piecewise-constant function of x with compact support: value vals[i] on
/// (edges[i], edges[i+1]), zero outside [edges.front(), edges.back()].
struct PiecewiseConstant {
    std::vector<double> edges;
    std::vector<double> vals;

    static PiecewiseConstant indicator(double a, double b, double height);
    static PiecewiseConstant zero();

    double value(double x) const;
    /// Exact integral over [a, b].
    double integrate(double a, double b) const;
    double total_mass() const;
    double min_value() const;
    double max_value() const;
    double total_variation() const;
};

/// Cell-averaged states for all components at one time level, stored k-major.
struct StateField {
    int n_components = 0;
    int cells = 0;
    long time_index = 0;
    std::vector<double> data;

    StateField() = default;
    StateField(int n_comp, int cells_)
        : n_components(n_comp), cells(cells_),
          data(static_cast<size_t>(n_comp) * cells_, 0.0) {}

    std::span<double> comp(int k) {
        return {data.data() + static_cast<size_t>(k) * cells, static_cast<size_t>(cells)};
    }
    std::span<const double> comp(int k) const {
        return {data.data() + static_cast<size_t>(k) * cells, static_cast<size_t>(cells)};
    }
    double& at(int k, int i) { return data[static_cast<size_t>(k) * cells + i]; }
    double at(int k, int i) const { return data[static_cast<size_t>(k) * cells + i]; }
};

/// Exact integral averages of piecewise-constant initial data (cells are split
/// at the data's discontinuities, so indicator data projects without error).
/// Rejects data with values outside [0, 1].
StateField project_initial(const std::vector<PiecewiseConstant>& u0, const GridSpec& grid);

} // namespace nlcl
