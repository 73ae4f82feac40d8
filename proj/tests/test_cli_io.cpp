#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "nlcl/config.hpp"
#include "nlcl/csv_io.hpp"
#include "nlcl/scheme.hpp"

using namespace nlcl;

namespace {

const char* kReferenceConfig = R"(
# reproduction setup
[model]
preset = keyfitz_kranzer
eta = 0.25
delta = 0.0125

[grid]
x_min = -5
x_max = 5
dx = 0.00625
T = 0.5

[scheme]
beta = 0.3333
lambda = 0.1286
record_times = 0, 0.017, 0.33, 0.5

[output]
directory = out
precision = 12
)";

} // namespace

TEST_CASE("parse_config accepts the reproduction setup") {
    const auto r = parse_config_text(kReferenceConfig);
    REQUIRE(r.ok());
    const auto& c = *r.config;
    CHECK(c.preset == "keyfitz_kranzer");
    CHECK(c.shared_kernels.eta == 0.25);
    CHECK(c.delta == 0.0125);
    CHECK(c.dx == 0.00625);
    CHECK(c.beta == 0.3333);
    REQUIRE(c.lambda.has_value());
    CHECK(*c.lambda == 0.1286);
    REQUIRE(c.record_times.size() == 4);
    CHECK(c.record_times[1] == 0.017);
}

TEST_CASE("parse_config rejects beta outside (0, 2/3) with a named key") {
    std::string text = kReferenceConfig;
    const auto pos = text.find("beta = 0.3333");
    text.replace(pos, 13, "beta = 0.7");
    const auto r = parse_config_text(text);
    CHECK_FALSE(r.ok());
    bool found = false;
    for (const auto& e : r.errors)
        if (e.find("scheme.beta") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("empty config lists every missing required key") {
    const auto r = parse_config_text("");
    CHECK_FALSE(r.ok());
    CHECK(r.errors.size() >= 6); // model.preset, grid.{x_min,x_max,dx,T}, scheme.beta
    auto has = [&](const char* key) {
        for (const auto& e : r.errors)
            if (e.find(key) != std::string::npos) return true;
        return false;
    };
    CHECK(has("model.preset"));
    CHECK(has("grid.x_min"));
    CHECK(has("grid.x_max"));
    CHECK(has("grid.dx"));
    CHECK(has("grid.T"));
    CHECK(has("scheme.beta"));
}

TEST_CASE("errors are collected, not short-circuited") {
    const char* text = R"(
[model]
preset = warp_drive

[grid]
x_min = -5
x_max = 5
dx = -1
T = abc

[scheme]
beta = 0.9
)";
    const auto r = parse_config_text(text);
    CHECK_FALSE(r.ok());
    CHECK(r.errors.size() >= 4);
}

TEST_CASE("canonical round trip") {
    const auto r = parse_config_text(kReferenceConfig);
    REQUIRE(r.ok());
    const auto text = emit_canonical_config(*r.config);
    const auto r2 = parse_config_text(text);
    REQUIRE(r2.ok());
    const auto& a = *r.config;
    const auto& b = *r2.config;
    CHECK(a.preset == b.preset);
    CHECK(a.shared_kernels.eta == b.shared_kernels.eta);
    CHECK(a.delta == b.delta);
    CHECK(a.x_min == b.x_min);
    CHECK(a.x_max == b.x_max);
    CHECK(a.dx == b.dx);
    CHECK(a.T == b.T);
    CHECK(a.beta == b.beta);
    CHECK(a.lambda == b.lambda);
    CHECK(a.record_times == b.record_times);
    CHECK(a.out_dir == b.out_dir);
    CHECK(a.precision == b.precision);
}

TEST_CASE("explicit model config builds and validates") {
    const char* text = R"(
[model]
components = 1
flux = logistic
velocity = one_minus_mean
spatial_kernel = poly_bump
eta = 0.3
temporal_kernel = poly_decay
delta = 0.05
initial_1 = indicator:1.0:2.0:0.8

[grid]
x_min = 0
x_max = 4
dx = 0.0625
T = 0.1

[scheme]
beta = 0.3333
)";
    const auto r = parse_config_text(text);
    REQUIRE(r.ok());
    const auto model = build_model(*r.config);
    CHECK(model.n == 1);
    CHECK(model.flux[0].name == "logistic");
    CHECK_FALSE(model.h1_warning);
    CHECK(model.initial[0].total_mass() == doctest::Approx(0.8));
}

TEST_CASE("per-entry kernel overrides") {
    const char* text = R"(
[model]
components = 2
flux = logistic
velocity = kk_cubic
delta = 0.05
spatial_kernel = poly_bump
eta = 0.3
eta_1_2 = 0.4
initial_1 = indicator:1.0:2.0:0.5
initial_2 = indicator:1.5:2.5:0.5

[grid]
x_min = 0
x_max = 4
dx = 0.0625
T = 0.1

[scheme]
beta = 0.3333
)";
    const auto r = parse_config_text(text);
    REQUIRE(r.ok());
    const auto model = build_model(*r.config);
    CHECK(model.kernels.mu(0, 1).support() == doctest::Approx(0.4));
    CHECK(model.kernels.mu(0, 0).support() == doctest::Approx(0.3));
    CHECK(&model.kernels.mu(0, 0) == &model.kernels.mu(1, 1)); // shared elsewhere
}

TEST_CASE("profile CSV emission is deterministic and correctly shaped") {
    const auto grid = make_grid(-1.0, 1.0, 0.25);
    auto model = keyfitz_kranzer_preset(0.25, 0.01);
    model.initial = {PiecewiseConstant::indicator(-0.5, 0.5, 0.25),
                     PiecewiseConstant::indicator(-0.5, 0.5, 1.0)};
    const auto tg = cfl_time_grid(grid.dx, 0.02, 0.3333, 1.0, 1.0);
    RunOptions opts;
    opts.record_times = {0.0, 0.02};
    const auto traj = run(model, grid, tg, {0.3333, tg.lambda}, opts);

    const auto dir = std::filesystem::temp_directory_path() / "nlcl_csv_test";
    std::filesystem::remove_all(dir);
    const auto files = emit_profile_csv(traj, dir.string(), 12);
    REQUIRE(files.size() == 2);

    std::ifstream in(files[0], std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string contents = ss.str();
    CHECK(contents.rfind("x,U1,U2\n", 0) == 0);
    CHECK(contents.find("\r") == std::string::npos); // LF only
    // first data row: x = -1 + dx/2, both components zero there
    CHECK(contents.find("-8.75000000000e-01,0.00000000000e+00,0.00000000000e+00") !=
          std::string::npos);

    // byte-identical on re-emission
    const auto files2 = emit_profile_csv(traj, (dir / "again").string(), 12);
    std::ifstream in2(files2[0], std::ios::binary);
    std::stringstream ss2;
    ss2 << in2.rdbuf();
    CHECK(ss.str() == ss2.str());
    std::filesystem::remove_all(dir);
}

TEST_CASE("rate table emission") {
    ErrorTable t;
    t.parameter_name = "delta";
    t.rows.push_back({0.2, 0.4, std::nullopt, 0.1286, false});
    t.rows.push_back({0.1, 0.2, 1.0, 0.1286, false});
    const auto dir = std::filesystem::temp_directory_path() / "nlcl_rate_test";
    std::filesystem::remove_all(dir);
    const auto files = emit_rate_table(t, dir.string(), 12);
    REQUIRE(files.size() == 2);
    std::ifstream in(files[0]);
    std::string header;
    std::getline(in, header);
    CHECK(header == "parameter,error,rate,lambda_used");
    std::string row1, row2;
    std::getline(in, row1);
    std::getline(in, row2);
    CHECK(row1.find(",,") != std::string::npos); // first row has no rate
    CHECK(row2.find("1.00000000000e+00") != std::string::npos);

    std::ifstream dat(files[1]);
    std::string head;
    std::getline(dat, head);
    CHECK(head.find("slope1_ref") != std::string::npos);
    CHECK(head.find("slope05_ref") != std::string::npos);

    SUBCASE("empty table emits headers only") {
        ErrorTable empty;
        empty.parameter_name = "dx";
        const auto f2 = emit_rate_table(empty, (dir / "empty").string(), 12);
        std::ifstream ein(f2[0]);
        std::string all, line;
        int lines = 0;
        while (std::getline(ein, line)) ++lines;
        CHECK(lines == 1);
    }
    std::filesystem::remove_all(dir);
}
