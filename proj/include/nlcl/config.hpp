#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlcl/grid.hpp"
#include "nlcl/models.hpp"

namespace nlcl {

/// One kernel-matrix entry as configured (shared defaults plus optional
/// per-entry overrides).
struct KernelEntryConfig {
    std::string spatial_kind = "poly_bump"; // poly_bump | tabulated
    double eta = 0.25;
    std::string spatial_table;              // CSV path for tabulated
    std::string temporal_kind = "poly_decay"; // poly_decay | tabulated
    std::string temporal_table;
};

struct RunConfig {
    // [model]
    std::string preset;                       // "keyfitz_kranzer" or empty
    int components = 0;                       // explicit path
    std::vector<std::string> flux_names;
    std::vector<std::string> velocity_names;
    std::vector<double> velocity_params;      // per component, used by `constant`
    double delta = 0.0;                       // shared memory radius
    KernelEntryConfig shared_kernels;
    std::map<std::pair<int, int>, KernelEntryConfig> kernel_overrides; // 0-based (j,k)
    std::vector<PiecewiseConstant> initial;   // explicit path

    // [grid]
    double x_min = 0.0, x_max = 0.0, dx = 0.0, T = 0.0;

    // [scheme]
    double beta = 0.0;
    std::optional<double> lambda;
    std::vector<double> record_times;

    // [study]
    std::string study_kind; // "delta" | "mesh" | empty
    double delta0 = 0.0;
    double dx0 = 0.0;
    double ratio = 0.0;
    double dx_fine = 0.0;
    int halvings = 0;

    // [output]
    std::string out_dir = "out";
    int precision = 12;
};

struct ParseResult {
    std::optional<RunConfig> config;
    std::vector<std::string> errors; // every problem found, "section.key: ..."
    bool ok() const { return errors.empty() && config.has_value(); }
};

/// Parses and fully validates a `key = value` config grouped in [sections].
/// Reports every error found, not just the first.
ParseResult parse_config(const std::string& path);
ParseResult parse_config_text(const std::string& text);

/// Canonical emission; parse_config_text over the result reproduces the config.
std::string emit_canonical_config(const RunConfig& cfg);

/// Builds the model described by a valid config (preset or explicit lists),
/// with the memory radius overridden when `delta_override` is given.
ModelSpec build_model(const RunConfig& cfg, std::optional<double> delta_override = {},
                      std::optional<double> eta_scale = {});

/// Loads a two-column CSV (coordinate, value) for tabulated kernels.
void load_kernel_table(const std::string& path, std::vector<double>& x,
                       std::vector<double>& y);

} // namespace nlcl
