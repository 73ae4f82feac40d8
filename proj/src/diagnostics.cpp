#include "nlcl/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlcl/errors.hpp"

namespace nlcl {

const CheckResult* DiagnosticsReport::find(const std::string& name, int component) const {
    for (const auto& e : entries)
        if (e.check == name && e.component == component) return &e;
    return nullptr;
}

DiagnosticsCollector::DiagnosticsCollector(DiagnosticsConfig cfg) : cfg_(std::move(cfg)) {}

void DiagnosticsCollector::on_run_start(const ModelSpec&, const GridSpec&,
                                        const TimeGrid&, const SchemeParams&) {
    inv_min_ = 0.0;
    inv_max_ = 1.0;
    inv_step_ = inv_cell_ = -1;
    entropy_worst_ = -1e300;
    entropy_step_ = entropy_cell_ = -1;
    conv_low_ = 0.0;
    conv_high_ = 1.0;
    conv_d1_ratio_ = conv_d2_ratio_ = 0.0;
    conv_step_ = -1;
    modulus_ = 0.0;
    channel_constants_ready_ = false;
}

void DiagnosticsCollector::on_step(const StepContext& ctx) {
    const int m = ctx.grid.cells;
    const int m1 = m + 1;
    const double dx = ctx.grid.dx;

    // Invariant region, streamed over the new level.
    for (int k = 0; k < ctx.model.n; ++k) {
        const auto u = ctx.next.comp(k);
        for (int i = 0; i < m; ++i) {
            const double v = u[static_cast<size_t>(i)];
            if (v < inv_min_) {
                inv_min_ = v;
                inv_step_ = ctx.n;
                inv_cell_ = i;
            }
            if (v > inv_max_) {
                inv_max_ = v;
                inv_step_ = ctx.n;
                inv_cell_ = i;
            }
        }
    }

    // L1 modulus of the single step.
    double diff = 0.0;
    for (size_t idx = 0; idx < ctx.prev.data.size(); ++idx)
        diff += std::abs(ctx.next.data[idx] - ctx.prev.data[idx]);
    modulus_ = std::max(modulus_, diff * dx / ctx.dt);

    // Convolution bounds (eq. c1-c3) against the per-channel constants.
    if (cfg_.check_conv_bounds) {
        if (!channel_constants_ready_) {
            const auto cc = conv_constants(ctx.model);
            c5_channel_.assign(static_cast<size_t>(ctx.conv.channels), 0.0);
            c6_channel_.assign(static_cast<size_t>(ctx.conv.channels), 0.0);
            for (int j = 0; j < ctx.model.n; ++j)
                for (int k = 0; k < ctx.model.n; ++k) {
                    const int ch = ctx.engine.channel_of(j, k);
                    c5_channel_[static_cast<size_t>(ch)] =
                        std::max(c5_channel_[static_cast<size_t>(ch)], cc.c5_at(j, k));
                    c6_channel_[static_cast<size_t>(ch)] =
                        std::max(c6_channel_[static_cast<size_t>(ch)], cc.c6_at(j, k));
                }
            channel_constants_ready_ = true;
        }
        for (int ch = 0; ch < ctx.conv.channels; ++ch) {
            const auto c = ctx.conv.row(ch);
            const double b1 = c5_channel_[static_cast<size_t>(ch)] * dx;
            const double b2 = c6_channel_[static_cast<size_t>(ch)] * dx * dx;
            double worst1 = 0.0, worst2 = 0.0;
            for (int e = 0; e < m1; ++e) {
                const double v = c[static_cast<size_t>(e)];
                if (v < conv_low_ || v > conv_high_) {
                    conv_low_ = std::min(conv_low_, v);
                    conv_high_ = std::max(conv_high_, v);
                    conv_step_ = ctx.n;
                }
                if (e + 1 < m1)
                    worst1 = std::max(worst1, std::abs(c[static_cast<size_t>(e + 1)] - v));
                if (e + 2 < m1)
                    worst2 = std::max(worst2,
                                      std::abs(c[static_cast<size_t>(e + 2)] -
                                               2.0 * c[static_cast<size_t>(e + 1)] + v));
            }
            if (b1 > 0.0) conv_d1_ratio_ = std::max(conv_d1_ratio_, worst1 / b1);
            if (b2 > 0.0) conv_d2_ratio_ = std::max(conv_d2_ratio_, worst2 / b2);
        }
    }

    // Discrete entropy condition at every cell and every alpha in the grid.
    if (cfg_.check_entropy) {
        const double lam = ctx.params.lambda;
        for (int k = 0; k < ctx.model.n; ++k) {
            const auto& f = ctx.model.flux[static_cast<size_t>(k)];
            const auto u = ctx.prev.comp(k);
            const auto un = ctx.next.comp(k);
            const auto v = ctx.velocity(k);
            for (double alpha : cfg_.entropy_alphas) {
                const double fa = f(alpha);
                for (int i = 0; i < m; ++i) {
                    const double ul = i > 0 ? u[static_cast<size_t>(i - 1)] : 0.0;
                    const double uc = u[static_cast<size_t>(i)];
                    const double ur = i + 1 < m ? u[static_cast<size_t>(i + 1)] : 0.0;
                    const double vl = v[static_cast<size_t>(i)];
                    const double vr = v[static_cast<size_t>(i + 1)];
                    const auto G = [&](double vv, double a, double b) {
                        return lf_flux(vv, std::max(a, alpha), std::max(b, alpha), f, ctx.params) -
                               lf_flux(vv, std::min(a, alpha), std::min(b, alpha), f, ctx.params);
                    };
                    const double unew = un[static_cast<size_t>(i)];
                    const double sgn = unew > alpha ? 1.0 : (unew < alpha ? -1.0 : 0.0);
                    const double resid = std::abs(unew - alpha) - std::abs(uc - alpha) +
                                         lam * (G(vr, uc, ur) - G(vl, ul, uc)) +
                                         lam * sgn * fa * (vr - vl);
                    if (resid > entropy_worst_) {
                        entropy_worst_ = resid;
                        entropy_step_ = ctx.n;
                        entropy_cell_ = i;
                    }
                }
            }
        }
    }
}

double bv_envelope(double tv0, double c7, double c8, double t) {
    const double x = std::min(c7 * t, 700.0);
    const double ex = std::exp(x);
    const double phi = x == 0.0 ? 1.0 : (ex - 1.0) / x;
    return tv0 * ex + c8 * t * phi;
}

void stability_constants(const ModelSpec& model, const ConvConstants& conv,
                         std::vector<double>& c7, std::vector<double>& c8) {
    c7.assign(static_cast<size_t>(model.n), 0.0);
    c8.assign(static_cast<size_t>(model.n), 0.0);
    for (int k = 0; k < model.n; ++k) {
        double c5 = 0.0, c6 = 0.0;
        for (int j = 0; j < model.n; ++j) {
            c5 += conv.c5_at(j, k);
            c6 += conv.c6_at(j, k);
        }
        const double lip = model.flux[static_cast<size_t>(k)].lipschitz;
        const double mass0 = model.initial_mass(k);
        c7[static_cast<size_t>(k)] = c5 * lip * model.grad_nu_sup;
        c8[static_cast<size_t>(k)] =
            c6 * lip * model.grad_nu_sup * mass0 +
            2.0 * c5 * c5 * lip * model.grad_nu_lip * mass0;
    }
}

DiagnosticsReport DiagnosticsCollector::report(const Trajectory& traj,
                                               const ModelSpec& model) const {
    DiagnosticsReport rep;
    rep.conv = conv_constants(model);
    stability_constants(model, rep.conv, rep.c7, rep.c8);
    rep.c9_empirical = modulus_;

    // Invariant region.
    {
        CheckResult r;
        r.check = "invariant_region";
        r.tolerance = cfg_.invariant_tol;
        r.worst = std::max(-inv_min_, inv_max_ - 1.0); // positive = outside [0,1]
        r.pass = r.worst <= cfg_.invariant_tol;
        r.step = inv_step_;
        r.cell = inv_cell_;
        rep.entries.push_back(r);
    }

    // Conservation, per component, with boundary outflow bookkeeping.
    for (int k = 0; k < model.n; ++k) {
        CheckResult r;
        r.check = "conservation";
        r.component = k;
        const double mass0 = traj.scalars.front()[static_cast<size_t>(k)].mass;
        double worst = 0.0;
        long at = -1;
        for (size_t n = 0; n < traj.scalars.size(); ++n) {
            const auto& s = traj.scalars[n][static_cast<size_t>(k)];
            const double drift = std::abs(s.mass - mass0 + s.outflow);
            if (drift > worst) {
                worst = drift;
                at = static_cast<long>(n);
            }
        }
        r.worst = mass0 > 0.0 ? worst / mass0 : worst;
        r.tolerance = cfg_.conservation_rel_tol;
        r.pass = r.worst <= r.tolerance;
        r.step = at;
        rep.entries.push_back(r);
    }

    // BV envelope, per component.
    for (int k = 0; k < model.n; ++k) {
        CheckResult r;
        r.check = "bv_bound";
        r.component = k;
        const double tv0 = traj.scalars.front()[static_cast<size_t>(k)].tv;
        double worst = -1e300;
        long at = -1;
        for (size_t n = 0; n < traj.scalars.size(); ++n) {
            const double t = traj.dt * static_cast<double>(n);
            const double env = bv_envelope(tv0, rep.c7[static_cast<size_t>(k)],
                                           rep.c8[static_cast<size_t>(k)], t);
            const double margin = traj.scalars[n][static_cast<size_t>(k)].tv -
                                  env * (1.0 + cfg_.bv_rel_slack);
            if (margin > worst) {
                worst = margin;
                at = static_cast<long>(n);
            }
        }
        r.worst = worst; // <= 0 means inside the envelope
        r.tolerance = 0.0;
        r.pass = worst <= 0.0;
        r.step = at;
        rep.entries.push_back(r);
    }

    // Discrete entropy.
    if (cfg_.check_entropy) {
        CheckResult r;
        r.check = "entropy";
        r.worst = entropy_worst_ == -1e300 ? 0.0 : entropy_worst_;
        r.tolerance = cfg_.entropy_tol;
        r.pass = r.worst <= cfg_.entropy_tol;
        r.step = entropy_step_;
        r.cell = entropy_cell_;
        rep.entries.push_back(r);
    }

    // Convolution bounds.
    if (cfg_.check_conv_bounds) {
        CheckResult r1;
        r1.check = "conv_range";
        r1.worst = std::max(-conv_low_, conv_high_ - 1.0);
        r1.tolerance = cfg_.conv_value_tol;
        r1.pass = r1.worst <= r1.tolerance;
        r1.step = conv_step_;
        rep.entries.push_back(r1);

        CheckResult r2;
        r2.check = "conv_first_difference";
        r2.worst = conv_d1_ratio_; // ratio to C5*dx
        r2.tolerance = 1.0 + cfg_.conv_bound_slack;
        r2.pass = r2.worst <= r2.tolerance;
        rep.entries.push_back(r2);

        CheckResult r3;
        r3.check = "conv_second_difference";
        r3.worst = conv_d2_ratio_; // ratio to C6*dx^2
        r3.tolerance = 1.0 + cfg_.conv_bound_slack;
        r3.pass = r3.worst <= r3.tolerance;
        rep.entries.push_back(r3);
    }

    // Empirical time modulus. Only finiteness is asserted; no closed-form
    // constant is available to compare against.
    {
        CheckResult r;
        r.check = "time_modulus";
        r.worst = modulus_;
        r.tolerance = std::numeric_limits<double>::infinity();
        r.pass = std::isfinite(modulus_);
        rep.entries.push_back(r);
    }

    return rep;
}

DiagnosticsReport verify_run(const ModelSpec& model, const GridSpec& grid,
                             const TimeGrid& tg, const SchemeParams& params,
                             bool memoryless, DiagnosticsConfig cfg,
                             Trajectory* out_traj) {
    DiagnosticsCollector collector(cfg);
    RunOptions opts;
    opts.observer = &collector;
    opts.enforce_invariant = false; // observe, do not abort; the report decides
    Trajectory traj = memoryless ? run_memoryless(model, grid, tg, params, opts)
                                 : run(model, grid, tg, params, opts);
    DiagnosticsReport rep = collector.report(traj, model);
    if (out_traj) *out_traj = std::move(traj);
    return rep;
}

std::vector<DependenceProbeResult> continuous_dependence_probe(
    const ModelSpec& model, const GridSpec& grid, const TimeGrid& tg,
    const SchemeParams& params, const std::vector<double>& eps_list,
    double bump_lo, double bump_hi, bool memoryless) {
    std::vector<DependenceProbeResult> out;

    Trajectory base = memoryless ? run_memoryless(model, grid, tg, params)
                                 : run(model, grid, tg, params);
    const StateField base0 = project_initial(model.initial, grid);

    // Gronwall constant of the continuous-dependence estimate.
    double theta_sup = 0.0, mu1_sup = 0.0, gammad_sup = 0.0, mu_sup = 0.0;
    for (int j = 0; j < model.n; ++j)
        for (int k = 0; k < model.n; ++k) {
            const auto& mu = model.kernels.mu(j, k);
            const auto& g = model.kernels.gamma(j, k);
            double msup = 0.0;
            for (int s = 0; s <= 2048; ++s)
                msup = std::max(msup, mu.value(mu.support() * s / 2048.0));
            double gsup = 0.0;
            for (int s = 0; s <= 2048; ++s)
                gsup = std::max(gsup, g.value(g.support() * s / 2048.0));
            mu_sup = std::max(mu_sup, msup);
            gammad_sup = std::max(gammad_sup, gsup);
            theta_sup = std::max(theta_sup, msup * gsup);
            mu1_sup = std::max(mu1_sup, mu.sup_deriv());
        }
    double mass0 = 0.0, bv_sup = 0.0;
    for (int k = 0; k < model.n; ++k) mass0 += model.initial_mass(k);
    for (const auto& row : base.scalars)
        for (const auto& s : row) bv_sup = std::max(bv_sup, s.tv);
    const double n = model.n;
    const double T = tg.T;
    const double lip = model.lip_f;
    const double c_gronwall =
        n * T * lip * model.grad_nu_sup * theta_sup * bv_sup +
        n * T * lip * mass0 * model.grad_nu_sup * gammad_sup * mu1_sup +
        n * T * lip * mass0 * (T * mass0) * gammad_sup * mu1_sup * model.grad_nu_lip *
            theta_sup;
    const double bound = std::exp(std::min(c_gronwall * T, 700.0));

    for (double eps : eps_list) {
        DependenceProbeResult r;
        r.eps = eps;
        r.bound = bound;
        if (eps == 0.0) {
            r.pass = true;
            out.push_back(r);
            continue;
        }
        ModelSpec pert = model;
        for (int k = 0; k < model.n; ++k) {
            auto& u0 = pert.initial[static_cast<size_t>(k)];
            std::vector<double> edges = u0.edges;
            edges.push_back(bump_lo);
            edges.push_back(bump_hi);
            std::sort(edges.begin(), edges.end());
            edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
            std::vector<double> vals;
            for (size_t i = 0; i + 1 < edges.size(); ++i) {
                const double mid = 0.5 * (edges[i] + edges[i + 1]);
                double v = u0.value(mid);
                if (mid > bump_lo && mid < bump_hi) v = std::clamp(v + eps, 0.0, 1.0);
                vals.push_back(v);
            }
            u0 = PiecewiseConstant{std::move(edges), std::move(vals)};
        }
        const StateField pert0 = project_initial(pert.initial, grid);
        double d0 = 0.0;
        for (size_t i = 0; i < pert0.data.size(); ++i)
            d0 += std::abs(pert0.data[i] - base0.data[i]);
        d0 *= grid.dx;
        r.initial_distance = d0;
        if (d0 <= 0.0) {
            r.pass = true;
            out.push_back(r);
            continue;
        }
        Trajectory ptraj = memoryless ? run_memoryless(pert, grid, tg, params)
                                      : run(pert, grid, tg, params);
        double dT = 0.0;
        for (size_t i = 0; i < ptraj.final_state.data.size(); ++i)
            dT += std::abs(ptraj.final_state.data[i] - base.final_state.data[i]);
        dT *= grid.dx;
        r.final_distance = dT;
        r.ratio = dT / d0;
        r.pass = r.ratio <= r.bound;
        out.push_back(r);
    }
    return out;
}

double l1_time_modulus(const Trajectory& traj) {
    double worst = 0.0;
    for (size_t r = 1; r < traj.states.size(); ++r) {
        const double dt = traj.record_times[r] - traj.record_times[r - 1];
        if (dt <= 0.0) continue;
        double d = 0.0;
        for (size_t i = 0; i < traj.states[r].data.size(); ++i)
            d += std::abs(traj.states[r].data[i] - traj.states[r - 1].data[i]);
        worst = std::max(worst, d * traj.grid.dx / dt);
    }
    return worst;
}

} // namespace nlcl
