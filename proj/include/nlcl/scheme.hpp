#pragma once

#include <span>
#include <vector>

#include "nlcl/convolution.hpp"
#include "nlcl/grid.hpp"
#include "nlcl/models.hpp"

namespace nlcl {

/// Lax-Friedrichs extension parameters: beta in (0, 2/3), lambda = dt/dx.
struct SchemeParams {
    double beta = 1.0 / 3.0;
    double lambda = 0.1;
};

/// F(v, a, b) = v*(f(a)+f(b))/2 - beta*(b-a)/(2*lambda).
double lf_flux(double v, double u_left, double u_right, const ScalarFlux& f,
               const SchemeParams& params);

/// Per-component scalars tracked at every time level.
struct StepScalars {
    double mass = 0.0;    // dx * sum_i U_i
    double min = 0.0;
    double max = 0.0;
    double tv = 0.0;      // total variation including the zero-extension jumps
    double outflow = 0.0; // cumulative boundary outflux up to this level
};

struct StepContext {
    long n;                  // index of the completed step (next is level n)
    double t;                // n * dt
    const StateField& prev;  // level n-1
    const StateField& next;  // level n
    const ConvField& conv;   // memory convolution at level n-1 used by the step
    const GridSpec& grid;
    const SchemeParams& params;
    double dt;
    const ModelSpec& model;
    const ConvolutionEngine& engine;
    std::span<const double> velocities; // k-major, (M+1) interface values per component

    std::span<const double> velocity(int k) const {
        const size_t m1 = static_cast<size_t>(grid.cells) + 1;
        return velocities.subspan(static_cast<size_t>(k) * m1, m1);
    }
};

/// Streaming hook evaluated after each completed step, before eviction of any
/// history. Observers must not mutate the run.
class StepObserver {
public:
    virtual ~StepObserver() = default;
    virtual void on_run_start(const ModelSpec&, const GridSpec&, const TimeGrid&,
                              const SchemeParams&) {}
    virtual void on_step(const StepContext&) {}
};

struct RunOptions {
    std::vector<double> record_times;
    StepObserver* observer = nullptr;
    bool enforce_invariant = true;
    double invariant_tol = 1e-12;
};

/// Recorded states plus per-step diagnostic scalars.
struct Trajectory {
    GridSpec grid;
    double dt = 0.0;
    long n_steps = 0;
    std::vector<double> record_times;          // actual times n*dt
    std::vector<StateField> states;            // one per recorded time
    std::vector<std::vector<StepScalars>> scalars; // [level][component], level 0..n_steps
    std::vector<double> cumulative_outflow;    // per component, at the final time
    StateField final_state;
};

/// One explicit update from `state` using the ring's history for the memory
/// convolution at the current level. Aborts (throws NumericsError) if the
/// result leaves [0,1] by more than 1e-12.
StateField step(const StateField& state, const HistoryRing& ring, const ModelSpec& model,
                const GridSpec& grid, const TimeGrid& tg, const SchemeParams& params);

/// Full memory-solver trajectory: after each step the new spatial-convolution
/// snapshot is pushed into the history ring.
Trajectory run(const ModelSpec& model, const GridSpec& grid, const TimeGrid& tg,
               const SchemeParams& params, const RunOptions& options = {});

/// Reference solver: identical scheme, but the convolution argument is the
/// spatial convolution of the current state only (no time history).
Trajectory run_memoryless(const ModelSpec& model, const GridSpec& grid, const TimeGrid& tg,
                          const SchemeParams& params, const RunOptions& options = {});

} // namespace nlcl
