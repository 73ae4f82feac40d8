#include "nlcl/studies.hpp"

#include <cmath>

#include "nlcl/errors.hpp"

namespace nlcl {

bool ErrorTable::rates_above_floor(double floor) const {
    for (const auto& r : rows)
        if (r.rate && *r.rate < floor) return false;
    return true;
}

double l1_distance(const StateField& a, const GridSpec& grid_a, const StateField& b,
                   const GridSpec& grid_b) {
    if (a.n_components != b.n_components)
        throw ModelError("l1_distance: component counts differ");
    if (std::abs(grid_a.x_min - grid_b.x_min) > 1e-12 ||
        std::abs(grid_a.x_max - grid_b.x_max) > 1e-12)
        throw ModelError("l1_distance: domains differ");

    // Identify the finer grid and the refinement factor.
    const bool a_coarser = grid_a.dx > grid_b.dx;
    const GridSpec& gc = a_coarser ? grid_a : grid_b;
    const GridSpec& gf = a_coarser ? grid_b : grid_a;
    const StateField& uc = a_coarser ? a : b;
    const StateField& uf = a_coarser ? b : a;
    const double ratio = gc.dx / gf.dx;
    const long r = std::lround(ratio);
    if (r < 1 || std::abs(ratio - static_cast<double>(r)) > 1e-9)
        throw ModelError("l1_distance: grids are not nested (dx ratio " +
                         std::to_string(ratio) + " is not an integer)");
    if (gc.cells * r != gf.cells)
        throw ModelError("l1_distance: cell counts are not nested");

    double total = 0.0;
    for (int k = 0; k < a.n_components; ++k) {
        const auto cc = uc.comp(k);
        const auto cf = uf.comp(k);
        double s = 0.0;
        for (int i = 0; i < gc.cells; ++i) {
            const double v = cc[static_cast<size_t>(i)];
            for (long q = 0; q < r; ++q)
                s += std::abs(v - cf[static_cast<size_t>(i * r + q)]);
        }
        total += s * gf.dx;
    }
    return total;
}

double observed_rate(double e_coarse, double e_fine) {
    if (!(e_coarse > 0.0) || !(e_fine > 0.0))
        throw ModelError("observed_rate: errors must be positive");
    return std::log2(e_coarse / e_fine);
}

namespace {

TimeGrid study_time_grid(const ModelSpec& model, double dx, const StudyParams& sp) {
    return cfl_time_grid(dx, sp.T, sp.beta, model.lip_f, model.nu_sup, sp.lambda);
}

constexpr double kDegenerateError = 1e-13;

} // namespace

ErrorTable delta_study(const DeltaModelFactory& family, const GridSpec& grid,
                       const StudyParams& sp, double delta0, int n_halvings) {
    ErrorTable table;
    table.parameter_name = "delta";

    const ModelSpec ref_model = family(delta0);
    const TimeGrid tg = study_time_grid(ref_model, grid.dx, sp);
    const SchemeParams params{sp.beta, tg.lambda};
    const Trajectory ref = run_memoryless(ref_model, grid, tg, params);

    double prev_error = 0.0;
    bool prev_valid = false;
    for (int r = 0; r <= n_halvings; ++r) {
        const double delta = delta0 * std::pow(2.0, -r);
        const ModelSpec model = family(delta);
        const Trajectory sol = run(model, grid, tg, params);
        const double e = l1_distance(sol.final_state, grid, ref.final_state, grid);

        ErrorTableRow row;
        row.parameter = delta;
        row.error = e;
        row.lambda_used = tg.lambda;
        row.degenerate = e <= kDegenerateError;
        if (prev_valid && !row.degenerate)
            row.rate = observed_rate(prev_error, e);
        table.rows.push_back(row);
        prev_valid = !row.degenerate;
        prev_error = e;
    }
    return table;
}

ErrorTable mesh_study(const MeshModelFactory& family, double x_min, double x_max,
                      const StudyParams& sp, double dx0, int n_halvings, double ratio,
                      double dx_fine) {
    ErrorTable table;
    table.parameter_name = "dx";

    const GridSpec fine_grid = make_grid(x_min, x_max, dx_fine);
    const ModelSpec fine_model = family(dx_fine, ratio * dx_fine);
    const TimeGrid fine_tg = study_time_grid(fine_model, dx_fine, sp);
    const Trajectory ref =
        run_memoryless(fine_model, fine_grid, fine_tg, {sp.beta, fine_tg.lambda});

    double prev_error = 0.0;
    bool prev_valid = false;
    for (int r = 0; r <= n_halvings; ++r) {
        const double dx = dx0 * std::pow(2.0, -r);
        const double delta = ratio * dx;
        const GridSpec grid = make_grid(x_min, x_max, dx);
        const ModelSpec model = family(dx, delta);
        const TimeGrid tg = study_time_grid(model, dx, sp);
        const Trajectory sol = run(model, grid, tg, {sp.beta, tg.lambda});
        const double e = l1_distance(sol.final_state, grid, ref.final_state, fine_grid);

        ErrorTableRow row;
        row.parameter = dx;
        row.error = e;
        row.lambda_used = tg.lambda;
        row.degenerate = e <= kDegenerateError;
        if (prev_valid && !row.degenerate)
            row.rate = observed_rate(prev_error, e);
        table.rows.push_back(row);
        prev_valid = !row.degenerate;
        prev_error = e;
    }
    return table;
}

} // namespace nlcl
