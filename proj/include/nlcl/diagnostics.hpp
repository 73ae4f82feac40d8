#pragma once

#include <string>
#include <vector>

#include "nlcl/convolution.hpp"
#include "nlcl/scheme.hpp"

namespace nlcl {

struct CheckResult {
    std::string check;
    int component = -1;   // -1: applies to the whole system
    double worst = 0.0;   // worst-case violation (signed margin, see each check)
    double tolerance = 0.0;
    bool pass = true;
    long step = -1;
    long cell = -1;
};

struct DiagnosticsReport {
    std::vector<CheckResult> entries;
    // assembled constants, per component for C7/C8, per (j,k) flattened for C5/C6
    ConvConstants conv;
    std::vector<double> c7, c8;
    double c9_empirical = 0.0;

    bool all_pass() const {
        for (const auto& e : entries)
            if (!e.pass) return false;
        return true;
    }
    const CheckResult* find(const std::string& name, int component = -1) const;
};

struct DiagnosticsConfig {
    std::vector<double> entropy_alphas = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                                          0.6, 0.7, 0.8, 0.9, 1.0};
    double invariant_tol = 1e-12;
    double conservation_rel_tol = 1e-12;
    double entropy_tol = 1e-12;
    double conv_value_tol = 1e-12;   // c within [0,1] up to this
    double conv_bound_slack = 1e-9;  // relative slack on the C5/C6 difference bounds
    double bv_rel_slack = 1e-9;
    bool check_entropy = true;
    bool check_conv_bounds = true;
};

/// Streaming implementation of the stability-lemma checks. Attach as the run
/// observer; every check is a pure function of the observed steps.
class DiagnosticsCollector : public StepObserver {
public:
    explicit DiagnosticsCollector(DiagnosticsConfig cfg = {});

    void on_run_start(const ModelSpec&, const GridSpec&, const TimeGrid&,
                      const SchemeParams&) override;
    void on_step(const StepContext&) override;

    /// Finalize against the trajectory's per-level scalars (mass, TV, outflow).
    DiagnosticsReport report(const Trajectory& traj, const ModelSpec& model) const;

private:
    DiagnosticsConfig cfg_;
    // streaming accumulators
    double inv_min_ = 0.0, inv_max_ = 1.0;
    long inv_step_ = -1, inv_cell_ = -1;
    double entropy_worst_ = 0.0;
    long entropy_step_ = -1, entropy_cell_ = -1;
    double conv_low_ = 0.0, conv_high_ = 1.0;
    double conv_d1_ratio_ = 0.0, conv_d2_ratio_ = 0.0;
    long conv_step_ = -1;
    double modulus_ = 0.0;
    std::vector<double> c5_channel_, c6_channel_; // per memory channel
    bool channel_constants_ready_ = false;
};

/// TV envelope of the BV estimate: TV0*exp(C7 t) + C8*t*phi(C7 t) with
/// phi(x) = (e^x - 1)/x, exponent capped to stay finite.
double bv_envelope(double tv0, double c7, double c8, double t);

/// C7^k and C8^k assembled from the convolution constants (summed over the
/// convolved component j), the flux Lipschitz bound and the velocity gradient
/// bounds.
void stability_constants(const ModelSpec& model, const ConvConstants& conv,
                         std::vector<double>& c7, std::vector<double>& c8);

/// Runs the solver with a DiagnosticsCollector attached and reports.
DiagnosticsReport verify_run(const ModelSpec& model, const GridSpec& grid,
                             const TimeGrid& tg, const SchemeParams& params,
                             bool memoryless = false, DiagnosticsConfig cfg = {},
                             Trajectory* out_traj = nullptr);

/// Perturbs the initial data by eps on `bump` (clamped to [0,1]), reruns, and
/// reports the L1 amplification ratio against the Gronwall bound exp(C*T).
struct DependenceProbeResult {
    double eps = 0.0;
    double initial_distance = 0.0;
    double final_distance = 0.0;
    double ratio = 0.0;
    double bound = 0.0;
    bool pass = true;
};
std::vector<DependenceProbeResult> continuous_dependence_probe(
    const ModelSpec& model, const GridSpec& grid, const TimeGrid& tg,
    const SchemeParams& params, const std::vector<double>& eps_list,
    double bump_lo, double bump_hi, bool memoryless = false);

/// Empirical C9: max over consecutive recorded levels of ||U(t2)-U(t1)||_L1 /
/// (t2 - t1), summed over components.
double l1_time_modulus(const Trajectory& traj);

} // namespace nlcl
