#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nlcl/grid.hpp"
#include "nlcl/scheme.hpp"

namespace nlcl {

/// One convergence-study row. `rate` is absent on the first row and on rows
/// flagged degenerate (error below the measurable floor).
struct ErrorTableRow {
    double parameter = 0.0; // delta or dx
    double error = 0.0;
    std::optional<double> rate;
    double lambda_used = 0.0;
    bool degenerate = false;
};

struct ErrorTable {
    std::string parameter_name; // "delta" or "dx"
    std::vector<ErrorTableRow> rows;
    /// Every computed rate clears the theoretical floor 0.5 minus slack 0.15.
    bool rates_above_floor(double floor = 0.5 - 0.15) const;
};

/// Exact L1 distance between piecewise-constant solutions on nested grids:
/// the coarser field is expanded onto the finer grid and the difference is
/// integrated exactly, summed over components. Grids must cover the same
/// interval and one dx must be an integer multiple of the other.
double l1_distance(const StateField& a, const GridSpec& grid_a, const StateField& b,
                   const GridSpec& grid_b);

/// log2(e_coarse / e_fine); both must be positive.
double observed_rate(double e_coarse, double e_fine);

/// Builds the model for a given memory radius delta (grid and scheme fixed).
using DeltaModelFactory = std::function<ModelSpec(double delta)>;

struct StudyParams {
    double T = 0.5;
    double beta = 0.3333;
    std::optional<double> lambda; // user ratio; reduced per rung so T/dt is integral
};

/// Memory-to-memoryless sweep at fixed grid: runs the memory solver for each
/// delta in {delta0 * 2^-r} and measures the L1 distance to one memoryless
/// reference run on the same grid.
ErrorTable delta_study(const DeltaModelFactory& family, const GridSpec& grid,
                       const StudyParams& sp, double delta0, int n_halvings);

/// Builds the model for a given mesh width (delta = ratio * dx follows it).
using MeshModelFactory = std::function<ModelSpec(double dx, double delta)>;

/// Asymptotic-compatibility sweep: dx ladder {dx0 * 2^-r} with delta/dx fixed,
/// each rung measured against one memoryless reference at dx_fine.
ErrorTable mesh_study(const MeshModelFactory& family, double x_min, double x_max,
                      const StudyParams& sp, double dx0, int n_halvings, double ratio,
                      double dx_fine);

} // namespace nlcl
