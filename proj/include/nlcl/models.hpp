#pragma once

#include <span>
#include <string>
#include <vector>

#include "nlcl/grid.hpp"
#include "nlcl/kernels.hpp"

namespace nlcl {

/// Scalar flux f^k from the named registry. Respects f(0) = 0; f(1) = 0 is a
/// hypothesis of the scheme's invariant-region guarantee and is checked by
/// validate_model (the Keyfitz-Kranzer preset registers `identity`, which
/// violates it and downgrades the check to a warning).
struct ScalarFlux {
    enum class Kind { Identity, Logistic, Zero };
    Kind kind = Kind::Identity;
    std::string name = "identity";
    double lipschitz = 1.0;

    double operator()(double u) const {
        switch (kind) {
            case Kind::Identity: return u;
            case Kind::Logistic: return u * (1.0 - u);
            case Kind::Zero: return 0.0;
        }
        return 0.0;
    }
    static ScalarFlux from_name(const std::string& name);
};

/// Velocity map nu^k: [0,1]^N -> R from the named registry, with certified
/// bounds used by the CFL condition and the stability diagnostics.
struct VelocityMap {
    enum class Kind { KKCubic, Constant, OneMinusMean };
    Kind kind = Kind::KKCubic;
    std::string name = "kk_cubic";
    int arity = 1;
    double param = 1.0; // value for Constant

    double sup_abs = 1.0;      // sup |nu| over [0,1]^N
    double grad_sup = 0.0;     // sup over components of |d nu / d a_j|
    double grad_lip = 0.0;     // Lipschitz constant of the gradient (max Hessian entry)

    double operator()(std::span<const double> a) const;
    static VelocityMap from_name(const std::string& name, int arity, double param = 1.0);
};

struct ValidationIssue {
    std::string hypothesis; // e.g. "H1", "H3"
    std::string message;
    bool blocking = true;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    double lip_f = 0.0;   // max over components
    double nu_sup = 0.0;  // max over components
    double grad_nu_sup = 0.0;
    double grad_nu_lip = 0.0;
    bool ok() const {
        for (const auto& i : issues)
            if (i.blocking) return false;
        return true;
    }
};

/// Problem definition: fluxes, velocities, kernel matrix, initial data.
struct ModelSpec {
    int n = 1;
    std::vector<ScalarFlux> flux;         // size n
    std::vector<VelocityMap> velocity;    // size n, arity n each
    KernelMatrix kernels;
    std::vector<PiecewiseConstant> initial;

    // certified constants (filled by the presets or by validate_model)
    double lip_f = 1.0;
    double nu_sup = 1.0;
    double grad_nu_sup = 0.0;
    double grad_nu_lip = 0.0;
    bool h1_warning = false; // some f^k has f(1) != 0

    double initial_mass(int k) const { return initial[static_cast<size_t>(k)].total_mass(); }
};

/// The 2-component nonlocal Keyfitz-Kranzer system: f = identity,
/// nu(a, b) = (1 - a^2 - b^2)^3, all four kernel entries aliasing
/// mu = L x (eta - x)^3 and the quadratic-decay memory kernel scaled to delta,
/// initial data (0.25, 1.0) times the indicator of (-2, 2).
ModelSpec keyfitz_kranzer_preset(double eta, double delta);

/// Checks (H1)-(H3): flux endpoint zeros, velocity smoothness bounds via
/// sampled maximization on a 1e4-point grid of [0,1]^N, kernel normalization,
/// nonnegativity and moment finiteness. Side-effect free.
ValidationReport validate_model(const ModelSpec& spec);

} // namespace nlcl
