#include "nlcl/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "nlcl/errors.hpp"
#include "nlcl/parallel.hpp"

namespace nlcl {

int worker_count() {
    static const int n = [] {
        if (const char* env = std::getenv("NLCL_THREADS")) {
            const int v = std::atoi(env);
            if (v >= 1) return v;
        }
        const unsigned hw = std::thread::hardware_concurrency();
        return static_cast<int>(std::min(4u, hw == 0 ? 1u : hw));
    }();
    return n;
}

void parallel_for(int n, const std::function<void(int, int)>& fn) {
    const int workers = std::min(worker_count(), n);
    if (workers <= 1 || n < 256) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers - 1));
    const int chunk = (n + workers - 1) / workers;
    for (int w = 1; w < workers; ++w) {
        const int lo = w * chunk;
        const int hi = std::min(n, lo + chunk);
        if (lo < hi) pool.emplace_back(fn, lo, hi);
    }
    fn(0, std::min(chunk, n));
    for (auto& t : pool) t.join();
}

double lf_flux(double v, double u_left, double u_right, const ScalarFlux& f,
               const SchemeParams& params) {
    return 0.5 * v * (f(u_left) + f(u_right)) -
           params.beta * (u_right - u_left) / (2.0 * params.lambda);
}

namespace {

struct Workspace {
    std::vector<double> velocity; // k-major, (M+1) per component
    std::vector<double> flux;     // k-major, (M+1) per component
    std::vector<double> args;     // scratch for nu arguments
};

void compute_velocities(const ModelSpec& model, const ConvolutionEngine& engine,
                        const ConvField& conv, Workspace& ws) {
    const int m1 = conv.interfaces;
    const int n = model.n;
    ws.velocity.resize(static_cast<size_t>(n) * m1);
    for (int k = 0; k < n; ++k) {
        const auto& nu = model.velocity[static_cast<size_t>(k)];
        double* out = ws.velocity.data() + static_cast<size_t>(k) * m1;
        std::vector<const double*> rows(static_cast<size_t>(n));
        for (int j = 0; j < n; ++j)
            rows[static_cast<size_t>(j)] = conv.row(engine.channel_of(j, k)).data();
        std::vector<double> args(static_cast<size_t>(n));
        for (int e = 0; e < m1; ++e) {
            for (int j = 0; j < n; ++j) args[static_cast<size_t>(j)] = rows[static_cast<size_t>(j)][e];
            out[e] = nu(args);
        }
    }
}

// One explicit update of every component given interface velocities.
// Ghost states are zero on both sides. Returns per-component net outflux
// dt*(F_right_boundary - F_left_boundary).
void advance(const StateField& prev, StateField& next, const ModelSpec& model,
             const SchemeParams& params, double dt, Workspace& ws,
             std::vector<double>& step_outflow) {
    const int m = prev.cells;
    const int m1 = m + 1;
    const double lam = params.lambda;
    ws.flux.resize(static_cast<size_t>(model.n) * m1);
    step_outflow.assign(static_cast<size_t>(model.n), 0.0);
    for (int k = 0; k < model.n; ++k) {
        const auto& f = model.flux[static_cast<size_t>(k)];
        const auto u = prev.comp(k);
        auto un = next.comp(k);
        const double* v = ws.velocity.data() + static_cast<size_t>(k) * m1;
        double* fv = ws.flux.data() + static_cast<size_t>(k) * m1;
        for (int e = 0; e < m1; ++e) {
            const double ul = e > 0 ? u[static_cast<size_t>(e - 1)] : 0.0;
            const double ur = e < m ? u[static_cast<size_t>(e)] : 0.0;
            fv[e] = 0.5 * v[e] * (f(ul) + f(ur)) - params.beta * (ur - ul) / (2.0 * lam);
        }
        for (int i = 0; i < m; ++i)
            un[static_cast<size_t>(i)] = u[static_cast<size_t>(i)] - lam * (fv[i + 1] - fv[i]);
        step_outflow[static_cast<size_t>(k)] = dt * (fv[m] - fv[0]);
    }
}

void enforce_invariant(const StateField& s, double tol, long step) {
    for (int k = 0; k < s.n_components; ++k) {
        const auto u = s.comp(k);
        for (int i = 0; i < s.cells; ++i) {
            const double v = u[static_cast<size_t>(i)];
            if (!(v >= -tol && v <= 1.0 + tol)) {
                throw NumericsError(
                    "invariant region violated (check the CFL condition and kernel "
                    "configuration)",
                    step, i, v);
            }
        }
    }
}

StepScalars scalars_of(std::span<const double> u, double dx) {
    StepScalars s;
    s.mass = 0.0;
    s.min = u.empty() ? 0.0 : u[0];
    s.max = s.min;
    double tv = 0.0;
    double prev = 0.0; // zero extension on the left
    for (double v : u) {
        s.mass += v;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
        tv += std::abs(v - prev);
        prev = v;
    }
    tv += std::abs(prev); // jump back to zero on the right
    s.mass *= dx;
    s.tv = tv;
    return s;
}

} // namespace

StateField step(const StateField& state, const HistoryRing& ring, const ModelSpec& model,
                const GridSpec& grid, const TimeGrid& tg, const SchemeParams& params) {
    ConvolutionEngine engine(model, grid, tg.dt);
    ConvField conv;
    engine.memory_conv(ring, conv);
    Workspace ws;
    compute_velocities(model, engine, conv, ws);
    StateField next(state.n_components, state.cells);
    next.time_index = state.time_index + 1;
    std::vector<double> outflow;
    advance(state, next, model, params, tg.dt, ws, outflow);
    enforce_invariant(next, 1e-12, next.time_index);
    return next;
}

Trajectory run_driver(const ModelSpec& model, const GridSpec& grid, const TimeGrid& tg,
                      const SchemeParams& params, const RunOptions& options,
                      bool memoryless) {
    Trajectory traj;
    traj.grid = grid;
    traj.dt = tg.dt;
    traj.n_steps = tg.n_steps;

    StateField state = project_initial(model.initial, grid);
    ConvolutionEngine engine(model, grid, tg.dt);
    HistoryRing ring(engine.ring_depth());

    // Map requested record times onto step indices.
    std::vector<long> record_steps;
    for (double t : options.record_times) {
        long n = tg.dt > 0.0 ? std::lround(t / tg.dt) : 0;
        n = std::clamp<long>(n, 0, tg.n_steps);
        record_steps.push_back(n);
    }

    const int n_comp = model.n;
    traj.scalars.reserve(static_cast<size_t>(tg.n_steps) + 1);
    traj.cumulative_outflow.assign(static_cast<size_t>(n_comp), 0.0);

    auto push_scalars = [&](const StateField& s) {
        std::vector<StepScalars> row(static_cast<size_t>(n_comp));
        for (int k = 0; k < n_comp; ++k) {
            row[static_cast<size_t>(k)] = scalars_of(s.comp(k), grid.dx);
            row[static_cast<size_t>(k)].outflow = traj.cumulative_outflow[static_cast<size_t>(k)];
        }
        traj.scalars.push_back(std::move(row));
    };
    auto record_if_requested = [&](const StateField& s, long n) {
        for (size_t r = 0; r < record_steps.size(); ++r) {
            if (record_steps[r] == n) {
                traj.record_times.push_back(n * tg.dt);
                traj.states.push_back(s);
            }
        }
    };

    push_scalars(state);
    record_if_requested(state, 0);
    if (!memoryless) ring.push(engine.spatial_conv(state));

    StateField next(n_comp, grid.cells);
    ConvField conv;
    Workspace ws;
    std::vector<double> step_outflow;
    SpatialConvSnapshot snap;

    if (options.observer) options.observer->on_run_start(model, grid, tg, params);

    for (long n = 1; n <= tg.n_steps; ++n) {
        if (memoryless) {
            snap = engine.spatial_conv(state);
            engine.memoryless_field(snap, conv);
        } else {
            engine.memory_conv(ring, conv);
        }
        compute_velocities(model, engine, conv, ws);
        next.time_index = n;
        advance(state, next, model, params, tg.dt, ws, step_outflow);

        for (int k = 0; k < n_comp; ++k)
            traj.cumulative_outflow[static_cast<size_t>(k)] += step_outflow[static_cast<size_t>(k)];

        if (options.observer) {
            StepContext ctx{n,    n * tg.dt, state, next, conv,
                            grid, params,    tg.dt, model, engine,
                            {ws.velocity.data(), ws.velocity.size()}};
            options.observer->on_step(ctx);
        }

        state.data.swap(next.data);
        state.time_index = n;
        push_scalars(state);

        if (options.enforce_invariant)
            enforce_invariant(state, options.invariant_tol, n);
        for (double v : state.data)
            if (!std::isfinite(v))
                throw NumericsError("state became non-finite", n, -1, v);

        if (!memoryless) ring.push(engine.spatial_conv(state));
        record_if_requested(state, n);
    }

    traj.final_state = std::move(state);
    return traj;
}

Trajectory run(const ModelSpec& model, const GridSpec& grid, const TimeGrid& tg,
               const SchemeParams& params, const RunOptions& options) {
    return run_driver(model, grid, tg, params, options, /*memoryless=*/false);
}

Trajectory run_memoryless(const ModelSpec& model, const GridSpec& grid, const TimeGrid& tg,
                          const SchemeParams& params, const RunOptions& options) {
    return run_driver(model, grid, tg, params, options, /*memoryless=*/true);
}

} // namespace nlcl
