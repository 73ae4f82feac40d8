// nlcl: finite-volume solver for systems of nonlocal conservation laws with
// space-time memory kernels.
//
// Subcommands:
//   simulate     march the memory solver (or --memoryless) and emit profiles
//   study-delta  memory-to-memoryless sweep at fixed grid
//   study-mesh   mesh sweep at fixed delta/dx against a fine reference
//   verify       simulate plus the stability diagnostics suite
//
// Exit codes: 0 success, 1 config error, 2 runtime numeric failure,
// 3 study rate assertion failed.

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "nlcl/config.hpp"
#include "nlcl/csv_io.hpp"
#include "nlcl/diagnostics.hpp"
#include "nlcl/errors.hpp"
#include "nlcl/studies.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir; // optional override
};

nlcl::RunConfig load_or_exit(const CommonArgs& args) {
    auto parsed = nlcl::parse_config(args.config_path);
    if (!parsed.ok()) {
        std::fprintf(stderr, "config errors in %s:\n", args.config_path.c_str());
        for (const auto& e : parsed.errors) std::fprintf(stderr, "  %s\n", e.c_str());
        std::exit(1);
    }
    auto cfg = *parsed.config;
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    return cfg;
}

int run_simulate(const CommonArgs& args, bool memoryless) {
    const auto cfg = load_or_exit(args);
    try {
        const auto model = nlcl::build_model(cfg);
        const auto grid = nlcl::make_grid(cfg.x_min, cfg.x_max, cfg.dx);
        const auto tg =
            nlcl::cfl_time_grid(cfg.dx, cfg.T, cfg.beta, model.lip_f, model.nu_sup, cfg.lambda);
        nlcl::RunOptions opts;
        opts.record_times = cfg.record_times.empty() ? std::vector<double>{0.0, cfg.T}
                                                     : cfg.record_times;
        const auto traj = memoryless
                              ? nlcl::run_memoryless(model, grid, tg, {cfg.beta, tg.lambda}, opts)
                              : nlcl::run(model, grid, tg, {cfg.beta, tg.lambda}, opts);
        const auto files = nlcl::emit_profile_csv(traj, cfg.out_dir, cfg.precision);
        std::printf("ran %ld steps (dt = %.6g, lambda = %.6g)\n", traj.n_steps, traj.dt,
                    tg.lambda);
        for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
        return 0;
    } catch (const nlcl::NumericsError& e) {
        std::fprintf(stderr, "numeric failure at step %ld cell %ld (value %.6g): %s\n",
                     e.step, e.cell, e.value, e.what());
        return 2;
    } catch (const nlcl::ModelError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

int run_verify(const CommonArgs& args, bool memoryless) {
    const auto cfg = load_or_exit(args);
    try {
        const auto model = nlcl::build_model(cfg);
        const auto grid = nlcl::make_grid(cfg.x_min, cfg.x_max, cfg.dx);
        const auto tg =
            nlcl::cfl_time_grid(cfg.dx, cfg.T, cfg.beta, model.lip_f, model.nu_sup, cfg.lambda);
        nlcl::Trajectory traj;
        const auto rep = nlcl::verify_run(model, grid, tg, {cfg.beta, tg.lambda}, memoryless,
                                          {}, &traj);
        if (!cfg.record_times.empty()) {
            nlcl::RunOptions opts;
            opts.record_times = cfg.record_times;
            opts.enforce_invariant = false;
            const auto rec = memoryless
                                 ? nlcl::run_memoryless(model, grid, tg, {cfg.beta, tg.lambda}, opts)
                                 : nlcl::run(model, grid, tg, {cfg.beta, tg.lambda}, opts);
            nlcl::emit_profile_csv(rec, cfg.out_dir, cfg.precision);
        }
        std::printf("%s", nlcl::render_diagnostics_table(rep).c_str());
        const auto csv = nlcl::emit_diagnostics_csv(rep, cfg.out_dir, cfg.precision);
        std::printf("wrote %s\n", csv.c_str());
        return rep.all_pass() ? 0 : 2;
    } catch (const nlcl::NumericsError& e) {
        std::fprintf(stderr, "numeric failure at step %ld: %s\n", e.step, e.what());
        return 2;
    } catch (const nlcl::ModelError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

int run_study(const CommonArgs& args, const std::string& kind) {
    const auto cfg = load_or_exit(args);
    if (cfg.study_kind != kind) {
        std::fprintf(stderr, "config error: [study] kind = %s required by this subcommand\n",
                     kind.c_str());
        return 1;
    }
    try {
        nlcl::StudyParams sp;
        sp.T = cfg.T;
        sp.beta = cfg.beta;
        sp.lambda = cfg.lambda;
        nlcl::ErrorTable table;
        if (kind == "delta") {
            const auto grid = nlcl::make_grid(cfg.x_min, cfg.x_max, cfg.dx);
            const auto family = [&](double delta) { return nlcl::build_model(cfg, delta); };
            table = nlcl::delta_study(family, grid, sp, cfg.delta0, cfg.halvings);
        } else {
            const auto family = [&](double, double delta) {
                return nlcl::build_model(cfg, delta);
            };
            table = nlcl::mesh_study(family, cfg.x_min, cfg.x_max, sp, cfg.dx0, cfg.halvings,
                                     cfg.ratio, cfg.dx_fine);
        }
        for (const auto& row : table.rows) {
            std::printf("%s=%-10.6g error=%-12.8g rate=%-8s lambda=%.6g%s\n",
                        table.parameter_name.c_str(), row.parameter, row.error,
                        row.rate ? std::to_string(*row.rate).c_str() : "-", row.lambda_used,
                        row.degenerate ? " (degenerate)" : "");
        }
        const auto files = nlcl::emit_rate_table(table, cfg.out_dir, cfg.precision);
        for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
        if (!table.rates_above_floor()) {
            std::fprintf(stderr,
                         "study assertion failed: an observed rate fell below the 0.35 floor\n");
            return 3;
        }
        return 0;
    } catch (const nlcl::NumericsError& e) {
        std::fprintf(stderr, "numeric failure at step %ld: %s\n", e.step, e.what());
        return 2;
    } catch (const nlcl::ModelError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-volume solver for nonlocal conservation laws with memory"};
    app.require_subcommand(1);

    CommonArgs args;
    bool memoryless = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", args.config_path, "path to the run configuration")
            ->required();
        cmd->add_option("--out", args.out_dir, "output directory override");
    };

    auto* sim = app.add_subcommand("simulate", "march the solver and emit profile CSVs");
    add_common(sim);
    sim->add_flag("--memoryless", memoryless, "use the memoryless reference solver");

    auto* sd = app.add_subcommand("study-delta", "memory-to-memoryless convergence study");
    add_common(sd);

    auto* sm = app.add_subcommand("study-mesh", "mesh convergence study at fixed delta/dx");
    add_common(sm);

    auto* ver = app.add_subcommand("verify", "run with the stability diagnostics suite");
    add_common(ver);
    ver->add_flag("--memoryless", memoryless, "verify the memoryless reference solver");

    CLI11_PARSE(app, argc, argv);

    if (sim->parsed()) return run_simulate(args, memoryless);
    if (sd->parsed()) return run_study(args, "delta");
    if (sm->parsed()) return run_study(args, "mesh");
    if (ver->parsed()) return run_verify(args, memoryless);
    return 64;
}
