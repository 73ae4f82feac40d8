#include "nlcl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlcl/errors.hpp"

namespace nlcl {

GridSpec make_grid(double x_min, double x_max, double dx) {
    if (!(dx > 0.0)) throw ModelError("grid: dx must be > 0");
    if (!(x_max > x_min)) throw ModelError("grid: x_max must exceed x_min");
    const double ratio = (x_max - x_min) / dx;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
        throw ModelError("grid: (x_max - x_min)/dx must be an integer");
    const int m = static_cast<int>(rounded);
    if (m < 2) throw ModelError("grid: need at least 2 cells");
    return GridSpec{x_min, x_max, dx, m};
}

TimeGrid cfl_time_grid(double dx, double T, double beta, double lip_f, double nu_max,
                       std::optional<double> lambda_user) {
    if (!(dx > 0.0)) throw ModelError("cfl_time_grid: dx must be > 0");
    if (T < 0.0) throw ModelError("cfl_time_grid: T must be >= 0");
    if (!(beta > 0.0 && beta < 2.0 / 3.0))
        throw ModelError("cfl_time_grid: beta must lie in (0, 2/3)");
    if (lip_f < 0.0 || nu_max < 0.0)
        throw ModelError("cfl_time_grid: Lipschitz and velocity bounds must be >= 0");

    const double lambda_max =
        std::min({1.0, 4.0 - 6.0 * beta, 6.0 * beta}) / (1.0 + 6.0 * lip_f * nu_max);
    double lambda0 = lambda_max;
    if (lambda_user) {
        if (*lambda_user <= 0.0)
            throw ModelError("cfl_time_grid: lambda must be > 0");
        if (*lambda_user > lambda_max * (1.0 + 1e-12))
            throw ModelError("cfl_time_grid: requested lambda exceeds the CFL bound "
                             "min(1,4-6b,6b)/(1+6*Lip(f)*sup|nu|)");
        lambda0 = *lambda_user;
    }

    TimeGrid tg;
    tg.lambda_max = lambda_max;
    if (T == 0.0) {
        tg.dt = lambda0 * dx;
        tg.n_steps = 0;
        tg.lambda = lambda0;
        tg.T = 0.0;
        return tg;
    }
    const long n = static_cast<long>(std::ceil(T / (lambda0 * dx) - 1e-12));
    tg.n_steps = std::max<long>(n, 1);
    tg.dt = T / static_cast<double>(tg.n_steps);
    tg.lambda = tg.dt / dx;
    tg.T = T;
    return tg;
}

PiecewiseConstant PiecewiseConstant::indicator(double a, double b, double height) {
    if (!(b > a)) throw ModelError("indicator: empty interval");
    return PiecewiseConstant{{a, b}, {height}};
}

PiecewiseConstant PiecewiseConstant::zero() { return PiecewiseConstant{{0.0, 1.0}, {0.0}}; }

double PiecewiseConstant::value(double x) const {
    if (x < edges.front() || x >= edges.back()) return 0.0;
    const auto it = std::upper_bound(edges.begin(), edges.end(), x);
    const size_t i = static_cast<size_t>(it - edges.begin());
    return vals[std::min(i - 1, vals.size() - 1)];
}

double PiecewiseConstant::integrate(double a, double b) const {
    if (b <= a) return 0.0;
    double total = 0.0;
    for (size_t i = 0; i < vals.size(); ++i) {
        const double lo = std::max(a, edges[i]);
        const double hi = std::min(b, edges[i + 1]);
        if (hi > lo) total += vals[i] * (hi - lo);
    }
    return total;
}

double PiecewiseConstant::total_mass() const { return integrate(edges.front(), edges.back()); }

double PiecewiseConstant::min_value() const {
    double m = 0.0; // zero extension counts
    for (double v : vals) m = std::min(m, v);
    return m;
}

double PiecewiseConstant::max_value() const {
    double m = 0.0;
    for (double v : vals) m = std::max(m, v);
    return m;
}

double PiecewiseConstant::total_variation() const {
    double tv = std::abs(vals.front()) + std::abs(vals.back());
    for (size_t i = 1; i < vals.size(); ++i) tv += std::abs(vals[i] - vals[i - 1]);
    return tv;
}

StateField project_initial(const std::vector<PiecewiseConstant>& u0, const GridSpec& grid) {
    StateField s(static_cast<int>(u0.size()), grid.cells);
    for (size_t k = 0; k < u0.size(); ++k) {
        const auto& f = u0[k];
        if (f.min_value() < -1e-12 || f.max_value() > 1.0 + 1e-12)
            throw ModelError("project_initial: initial data must take values in [0, 1]");
        auto row = s.comp(static_cast<int>(k));
        for (int i = 0; i < grid.cells; ++i) {
            const double a = grid.x_interface(i);
            const double b = grid.x_interface(i + 1);
            // divide by the realized cell width so fully covered cells average
            // to the piece value exactly
            row[i] = f.integrate(a, b) / (b - a);
        }
    }
    return s;
}

} // namespace nlcl
