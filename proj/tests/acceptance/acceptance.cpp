// Acceptance suite: one criterion per invocation (argv[1] = 1..7 or
// "profiles"), printing one line per sub-check. Exit status is the number of
// failed sub-checks.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "nlcl/csv_io.hpp"
#include "nlcl/diagnostics.hpp"
#include "nlcl/studies.hpp"

using namespace nlcl;

namespace {

int failures = 0;

void check(bool ok, const std::string& label, const std::string& detail) {
    std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", label.c_str(), detail.c_str());
    if (!ok) ++failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// --- reference experiment configuration ------------------------------------

constexpr double kEta = 0.25;
constexpr double kBeta = 0.3333;
constexpr double kLambda = 0.1286;
constexpr double kT = 0.5;

GridSpec reference_grid(double dx = 0.00625) { return make_grid(-5.0, 5.0, dx); }

TimeGrid reference_time_grid(double dx = 0.00625) {
    return cfl_time_grid(dx, kT, kBeta, 1.0, 1.0, kLambda);
}

// --- criterion 1: delta-rate reproduction ----------------------------------

void criterion1() {
    const auto grid = reference_grid();
    StudyParams sp;
    sp.T = kT;
    sp.beta = kBeta;
    sp.lambda = kLambda;
    const auto family = [](double delta) { return keyfitz_kranzer_preset(kEta, delta); };
    const auto table = delta_study(family, grid, sp, 0.8, 6);

    const double expected[6] = {0.71, 0.98, 0.99, 1.00, 1.04, 0.96};
    std::printf("delta ladder (fixed dx = 0.00625):\n");
    for (const auto& row : table.rows) {
        std::printf("  delta=%-8.4g error=%-10.6g rate=%s\n", row.parameter, row.error,
                    row.rate ? fmt(*row.rate).c_str() : "-");
    }
    for (int r = 1; r <= 6; ++r) {
        const auto& row = table.rows[static_cast<size_t>(r)];
        const double got = row.rate.value_or(-1.0);
        check(std::abs(got - expected[r - 1]) <= 0.15,
              "criterion 1: rate " + std::to_string(r),
              fmt(got) + " vs published " + fmt(expected[r - 1]) + " (+-0.15)");
        check(got >= 0.5, "criterion 1: rate " + std::to_string(r) + " floor",
              fmt(got) + " >= 0.5");
    }
}

// --- criterion 2: mesh-rate reproduction -----------------------------------

void criterion2() {
    StudyParams sp;
    sp.T = kT;
    sp.beta = kBeta;
    sp.lambda = kLambda;
    const auto family = [](double, double delta) {
        return keyfitz_kranzer_preset(kEta, delta);
    };
    const auto table = mesh_study(family, -5.0, 5.0, sp, 0.0125, 3, 128.0, 0.0125 / 4.0);

    const double expected_e[4] = {0.63, 0.38, 0.19, 0.096};
    const double expected_a[3] = {0.72, 0.99, 1.00};
    std::printf("mesh ladder (delta/dx = 128, reference dx = 0.0125/4):\n");
    for (const auto& row : table.rows) {
        std::printf("  dx=%-10.6g error=%-10.6g rate=%s\n", row.parameter, row.error,
                    row.rate ? fmt(*row.rate).c_str() : "-");
    }
    for (int r = 0; r < 4; ++r) {
        const double got = table.rows[static_cast<size_t>(r)].error;
        const double want = expected_e[r];
        check(std::abs(got - want) <= 0.25 * want,
              "criterion 2: error " + std::to_string(r + 1),
              fmt(got) + " vs published " + fmt(want) + " (+-25%)");
    }
    for (int r = 1; r <= 3; ++r) {
        const double got = table.rows[static_cast<size_t>(r)].rate.value_or(-1.0);
        check(std::abs(got - expected_a[r - 1]) <= 0.15,
              "criterion 2: rate " + std::to_string(r),
              fmt(got) + " vs published " + fmt(expected_a[r - 1]) + " (+-0.15)");
        check(got >= 0.5, "criterion 2: rate " + std::to_string(r) + " floor",
              fmt(got) + " >= 0.5");
    }
}

// --- criterion 3: stability-lemma suite ------------------------------------

void report_stability(const DiagnosticsReport& rep, const std::string& tag) {
    const auto* inv = rep.find("invariant_region");
    check(inv && inv->pass, "criterion 3: " + tag + " invariant region",
          "violation " + fmt(inv ? inv->worst : 1.0) + " <= 1e-12");
    for (const auto& e : rep.entries) {
        if (e.check == "conservation")
            check(e.pass, "criterion 3: " + tag + " conservation (component " +
                              std::to_string(e.component + 1) + ")",
                  "relative drift " + fmt(e.worst) + " <= 1e-12");
        if (e.check == "bv_bound")
            check(e.pass, "criterion 3: " + tag + " BV envelope (component " +
                              std::to_string(e.component + 1) + ")",
                  "worst margin " + fmt(e.worst) + " <= 0");
    }
    const auto* ent = rep.find("entropy");
    check(ent && ent->pass, "criterion 3: " + tag + " discrete entropy",
          "residual " + fmt(ent ? ent->worst : 1.0) + " <= 1e-12");
    const auto* c1 = rep.find("conv_range");
    check(c1 && c1->pass, "criterion 3: " + tag + " convolution range",
          "excess " + fmt(c1 ? c1->worst : 1.0) + " <= 1e-12");
    const auto* c2 = rep.find("conv_first_difference");
    check(c2 && c2->pass, "criterion 3: " + tag + " convolution first difference",
          "ratio to C5*dx " + fmt(c2 ? c2->worst : 9.0) + " <= 1");
    const auto* c3 = rep.find("conv_second_difference");
    check(c3 && c3->pass, "criterion 3: " + tag + " convolution second difference",
          "ratio to C6*dx^2 " + fmt(c3 ? c3->worst : 9.0) + " <= 1");
}

ModelSpec random_small_model(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    ModelSpec m;
    m.n = n;
    for (int k = 0; k < n; ++k) m.flux.push_back(ScalarFlux::from_name("logistic"));
    for (int k = 0; k < n; ++k)
        m.velocity.push_back(
            VelocityMap::from_name(n == 1 ? "one_minus_mean" : "kk_cubic", n));
    const double eta = 0.15 + 0.3 * uni(rng);
    const double delta = 0.02 + 0.15 * uni(rng);
    if (seed % 2 == 0) {
        m.kernels = KernelMatrix::shared(
            n, std::make_shared<const SpatialKernel>(SpatialKernel::poly_bump(eta)),
            std::make_shared<const ScaledTemporalKernel>(TemporalKernel::poly_decay(), delta));
    } else {
        // distinct kernels per entry
        m.kernels.n = n;
        for (int e = 0; e < n * n; ++e) {
            m.kernels.spatial.push_back(std::make_shared<const SpatialKernel>(
                SpatialKernel::poly_bump(0.15 + 0.3 * uni(rng))));
            m.kernels.temporal.push_back(std::make_shared<const ScaledTemporalKernel>(
                TemporalKernel::poly_decay(), 0.02 + 0.15 * uni(rng)));
        }
    }
    // random BV data on the middle 24 of 64 cells (16th-width blocks), padded
    // with zeros so no mass reaches the boundary
    const double dx = 1.0 / 16.0;
    for (int k = 0; k < n; ++k) {
        std::vector<double> edges, vals;
        edges.push_back(20 * dx);
        for (int b = 0; b < 8; ++b) {
            edges.push_back((20 + 3 * (b + 1)) * dx);
            vals.push_back(uni(rng));
        }
        m.initial.push_back(PiecewiseConstant{edges, vals});
    }
    m.lip_f = 1.0;
    m.nu_sup = 1.0;
    const auto rep = validate_model(m);
    m.lip_f = rep.lip_f;
    m.nu_sup = rep.nu_sup;
    m.grad_nu_sup = rep.grad_nu_sup;
    m.grad_nu_lip = rep.grad_nu_lip;
    return m;
}

void criterion3() {
    {
        const auto model = keyfitz_kranzer_preset(kEta, 0.0125);
        const auto grid = reference_grid();
        const auto tg = reference_time_grid();
        const auto rep = verify_run(model, grid, tg, {kBeta, tg.lambda});
        report_stability(rep, "reference run");
    }
    const unsigned seeds[3] = {11, 12, 15};
    const int dims[3] = {1, 2, 2};
    for (int t = 0; t < 3; ++t) {
        const auto model = random_small_model(dims[t], seeds[t]);
        const auto grid = make_grid(0.0, 4.0, 1.0 / 16.0);
        const auto tg = cfl_time_grid(grid.dx, 0.15, 1.0 / 3.0, model.lip_f, model.nu_sup);
        const auto rep = verify_run(model, grid, tg, {1.0 / 3.0, tg.lambda});
        report_stability(rep, "random model " + std::to_string(t + 1));
    }
}

// --- criterion 4: memoryless-degeneracy oracle ------------------------------

void criterion4() {
    const auto grid = reference_grid();
    const auto tg = reference_time_grid();
    auto model = keyfitz_kranzer_preset(kEta, 0.5 * tg.dt); // n_delta = 0

    RunOptions opts;
    for (long n = 0; n <= tg.n_steps; ++n) opts.record_times.push_back(n * tg.dt);
    const auto a = run(model, grid, tg, {kBeta, tg.lambda}, opts);
    const auto b = run_memoryless(model, grid, tg, {kBeta, tg.lambda}, opts);

    double worst = 0.0;
    for (size_t r = 0; r < a.states.size(); ++r)
        for (size_t i = 0; i < a.states[r].data.size(); ++i)
            worst = std::max(worst, std::abs(a.states[r].data[i] - b.states[r].data[i]));
    check(a.states.size() == b.states.size() && worst <= 1e-14,
          "criterion 4: degenerate memory equals the memoryless solver",
          "max per-cell per-step difference " + fmt(worst) + " <= 1e-14 over " +
              std::to_string(a.states.size()) + " levels");
}

// --- criterion 5: brute-force convolution oracle ----------------------------

void criterion5() {
    const auto grid = make_grid(0.0, 1.0, 1.0 / 16.0);
    const double dt = 0.05;
    ModelSpec m;
    m.n = 2;
    m.flux = {ScalarFlux::from_name("identity"), ScalarFlux::from_name("identity")};
    m.velocity = {VelocityMap::from_name("kk_cubic", 2), VelocityMap::from_name("kk_cubic", 2)};
    m.kernels.n = 2;
    const double etas[4] = {0.2, 0.3, 0.25, 0.35};
    const double deltas[4] = {0.11, 0.17, 0.23, 0.29};
    for (int e = 0; e < 4; ++e) {
        m.kernels.spatial.push_back(
            std::make_shared<const SpatialKernel>(SpatialKernel::poly_bump(etas[e])));
        m.kernels.temporal.push_back(std::make_shared<const ScaledTemporalKernel>(
            TemporalKernel::poly_decay(), deltas[e]));
    }
    m.initial = {PiecewiseConstant::indicator(0.2, 0.8, 0.6),
                 PiecewiseConstant::indicator(0.3, 0.9, 0.9)};

    const ConvolutionEngine engine(m, grid, dt);
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<StateField> levels;
    HistoryRing ring(engine.ring_depth());
    for (int n = 0; n < 5; ++n) {
        StateField s(2, grid.cells);
        for (auto& v : s.data) v = uni(rng);
        s.time_index = n;
        levels.push_back(s);
        ring.push(engine.spatial_conv(s));
    }
    ConvField c;
    engine.memory_conv(ring, c);

    double worst = 0.0;
    for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
            const int ch = engine.channel_of(j, k);
            const auto w = spatial_cell_averages(m.kernels.mu(j, k), grid.dx);
            auto theta = temporal_cell_averages(m.kernels.gamma(j, k), dt);
            double tsum = 0.0;
            for (double& g : theta) {
                g *= dt;
                tsum += g;
            }
            for (double& g : theta) g /= tsum;
            for (int e = 0; e <= grid.cells; ++e) {
                double direct = 0.0;
                for (int n = 4, mlev = 0; mlev <= n; ++mlev) {
                    const int age = n - mlev;
                    if (age >= static_cast<int>(theta.size())) continue;
                    const auto u = levels[static_cast<size_t>(mlev)].comp(j);
                    for (int p = 0; p < grid.cells; ++p) {
                        const int q = p - e;
                        if (q < 0 || q >= static_cast<int>(w.size())) continue;
                        direct += theta[static_cast<size_t>(age)] * grid.dx *
                                  w[static_cast<size_t>(q)] * u[static_cast<size_t>(p)];
                    }
                }
                worst = std::max(worst,
                                 std::abs(direct - c.row(ch)[static_cast<size_t>(e)]));
            }
        }
    }
    check(worst <= 1e-14, "criterion 5: factored convolution vs direct double sum",
          "max interface difference " + fmt(worst) + " <= 1e-14");
}

// --- criterion 6: monotonicity property test ---------------------------------

void criterion6() {
    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const auto f = ScalarFlux::from_name("identity");
    const auto nu = VelocityMap::from_name("kk_cubic", 2);
    const SchemeParams params{kBeta, kLambda};
    const double eps = 1e-6;
    auto H = [&](double vl, double vr, double ul, double uc, double ur) {
        return uc - params.lambda *
                        (lf_flux(vr, uc, ur, f, params) - lf_flux(vl, ul, uc, f, params));
    };
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const double cl[2] = {uni(rng), uni(rng)};
        const double cr[2] = {uni(rng), uni(rng)};
        const double vl = nu(cl), vr = nu(cr);
        const double u[3] = {uni(rng), uni(rng), uni(rng)};
        const double base = H(vl, vr, u[0], u[1], u[2]);
        const double up[3] = {H(vl, vr, std::min(1.0, u[0] + eps), u[1], u[2]),
                              H(vl, vr, u[0], std::min(1.0, u[1] + eps), u[2]),
                              H(vl, vr, u[0], u[1], std::min(1.0, u[2] + eps))};
        for (double v : up) worst = std::max(worst, base - v);
    }
    check(worst <= 1e-15,
          "criterion 6: update nondecreasing in the three state arguments",
          "worst decrease " + fmt(worst) + " over 1000 randomized configurations");
}

// --- criterion 7: kernel analytics -------------------------------------------

void criterion7() {
    const auto mu = SpatialKernel::poly_bump(0.25);
    check(std::abs(mu.amplitude() - 20480.0) <= 1e-9 * 20480.0,
          "criterion 7: normalization amplitude L(eta=0.25)",
          fmt(mu.amplitude()) + " vs 20480 (rel 1e-9)");

    bool moments_ok = true;
    std::string detail;
    for (double d : {1.0, 0.1, 0.0125}) {
        const ScaledTemporalKernel g(TemporalKernel::poly_decay(), d);
        const double err = std::abs(g.scaled_first_moment() - d / 4.0);
        moments_ok = moments_ok && err <= 1e-10;
        detail += fmt(err) + " ";
    }
    check(moments_ok, "criterion 7: scaled first moment = delta/4",
          "absolute errors " + detail + "<= 1e-10 at delta in {1, 0.1, 0.0125}");

    bool norm_ok = true;
    double worst = 0.0;
    for (double dx : {0.0625, 0.00625, 0.0049}) {
        const auto w = spatial_cell_averages(mu, dx);
        double sum = 0.0;
        for (double v : w) sum += v;
        worst = std::max(worst, std::abs(dx * sum - 1.0));
    }
    const auto tgrid = reference_time_grid();
    for (double d : {0.8, 0.0125}) {
        const ScaledTemporalKernel g(TemporalKernel::poly_decay(), d);
        const auto avg = temporal_cell_averages(g, tgrid.dt);
        double sum = 0.0;
        for (double v : avg) sum += v;
        worst = std::max(worst, std::abs(tgrid.dt * sum - 1.0));
    }
    norm_ok = worst <= 1e-10;
    check(norm_ok, "criterion 7: cell-average normalizations",
          "worst |mass - 1| = " + fmt(worst) + " <= 1e-10");
}

// --- profile shape checks ----------------------------------------------------

void profiles() {
    const auto grid = reference_grid();
    const auto tg = reference_time_grid();
    const auto model = keyfitz_kranzer_preset(kEta, 0.0125);
    RunOptions opts;
    opts.record_times = {0.0, 0.017, 0.33, 0.5};
    const auto traj = run(model, grid, tg, {kBeta, tg.lambda}, opts);

    // component ordering is preserved at every recorded time
    double worst = 0.0;
    for (const auto& s : traj.states)
        for (int i = 0; i < grid.cells; ++i)
            worst = std::max(worst, s.at(0, i) - s.at(1, i));
    check(worst <= 1e-12, "profiles: U2 >= U1 at all recorded times",
          "worst U1-U2 = " + fmt(worst));

    const auto& fin = traj.states.back();
    auto u2_at = [&](double x) {
        const int i = static_cast<int>((x - grid.x_min) / grid.dx);
        return fin.at(1, i);
    };
    // mass advances past the initial right edge while the left front holds
    check(u2_at(2.2) > 0.05, "profiles: spreading wave ahead of x = 2",
          "U2(2.2) = " + fmt(u2_at(2.2)));
    check(u2_at(-2.2) < 0.05, "profiles: left front stays at x = -2",
          "U2(-2.2) = " + fmt(u2_at(-2.2)));
    // the left front is the sharp structure, the right side is a spread fan
    double left_jump = 0.0, right_jump = 0.0;
    for (int i = 0; i + 1 < grid.cells; ++i) {
        const double jump = std::abs(fin.at(1, i + 1) - fin.at(1, i));
        if (grid.x_center(i) < 0.0) left_jump = std::max(left_jump, jump);
        else right_jump = std::max(right_jump, jump);
    }
    check(left_jump > right_jump,
          "profiles: sharp front on the left, spread fan on the right",
          "max cell jump left " + fmt(left_jump) + " vs right " + fmt(right_jump));
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <1..7|profiles>\n", argv[0]);
        return 64;
    }
    const std::string which = argv[1];
    if (which == "1") criterion1();
    else if (which == "2") criterion2();
    else if (which == "3") criterion3();
    else if (which == "4") criterion4();
    else if (which == "5") criterion5();
    else if (which == "6") criterion6();
    else if (which == "7") criterion7();
    else if (which == "profiles") profiles();
    else {
        std::fprintf(stderr, "unknown criterion `%s`\n", which.c_str());
        return 64;
    }
    if (failures == 0) std::printf("all sub-checks passed\n");
    else std::printf("%d sub-check(s) failed\n", failures);
    return failures;
}
