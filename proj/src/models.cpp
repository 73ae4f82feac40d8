#include "nlcl/models.hpp"

#include <cmath>
#include <memory>

#include "nlcl/errors.hpp"

namespace nlcl {

ScalarFlux ScalarFlux::from_name(const std::string& name) {
    if (name == "identity") return {Kind::Identity, "identity", 1.0};
    if (name == "logistic") return {Kind::Logistic, "logistic", 1.0};
    if (name == "zero") return {Kind::Zero, "zero", 0.0};
    throw ModelError("unknown flux `" + name + "`; known: identity, logistic, zero");
}

double VelocityMap::operator()(std::span<const double> a) const {
    switch (kind) {
        case Kind::KKCubic: {
            double s = 1.0;
            for (double v : a) s -= v * v;
            return s * s * s;
        }
        case Kind::Constant:
            return param;
        case Kind::OneMinusMean: {
            double s = 0.0;
            for (double v : a) s += v;
            return 1.0 - s / static_cast<double>(a.size());
        }
    }
    return 0.0;
}

VelocityMap VelocityMap::from_name(const std::string& name, int arity, double param) {
    VelocityMap v;
    v.arity = arity;
    v.name = name;
    if (name == "kk_cubic") {
        v.kind = Kind::KKCubic;
        // |nu| <= max(1, (N-1)^3) on [0,1]^N; gradient bounds sampled below.
        v.sup_abs = std::max(1.0, std::pow(arity - 1.0, 3.0));
    } else if (name == "constant") {
        v.kind = Kind::Constant;
        v.param = param;
        v.sup_abs = std::abs(param);
        v.grad_sup = 0.0;
        v.grad_lip = 0.0;
        return v;
    } else if (name == "one_minus_mean") {
        v.kind = Kind::OneMinusMean;
        v.sup_abs = 1.0;
        v.grad_sup = 1.0 / arity;
        v.grad_lip = 0.0;
        return v;
    } else {
        throw ModelError("unknown velocity `" + name +
                         "`; known: kk_cubic, constant, one_minus_mean");
    }
    // Sampled gradient bounds for the cubic family.
    const int per_axis = arity == 1 ? 10000 : static_cast<int>(std::ceil(
                                                  std::pow(10000.0, 1.0 / arity)));
    std::vector<double> pt(static_cast<size_t>(arity), 0.0);
    double gmax = 0.0, hmax = 0.0;
    std::vector<int> idx(static_cast<size_t>(arity), 0);
    while (true) {
        double s = 1.0;
        for (int d = 0; d < arity; ++d) {
            pt[static_cast<size_t>(d)] = static_cast<double>(idx[static_cast<size_t>(d)]) / per_axis;
            s -= pt[static_cast<size_t>(d)] * pt[static_cast<size_t>(d)];
        }
        for (int d = 0; d < arity; ++d) {
            const double a = pt[static_cast<size_t>(d)];
            gmax = std::max(gmax, std::abs(-6.0 * a * s * s));
            // Hessian entries: d2/da2 = -6 s^2 + 24 a^2 s ; d2/da db = 24 a b s
            hmax = std::max(hmax, std::abs(-6.0 * s * s + 24.0 * a * a * s));
            for (int d2 = d + 1; d2 < arity; ++d2)
                hmax = std::max(hmax, std::abs(24.0 * a * pt[static_cast<size_t>(d2)] * s));
        }
        int d = 0;
        for (; d < arity; ++d) {
            if (++idx[static_cast<size_t>(d)] <= per_axis) break;
            idx[static_cast<size_t>(d)] = 0;
        }
        if (d == arity) break;
    }
    v.grad_sup = gmax;
    v.grad_lip = hmax;
    return v;
}

ModelSpec keyfitz_kranzer_preset(double eta, double delta) {
    if (!(eta > 0.0) || !(delta > 0.0))
        throw ModelError("keyfitz_kranzer_preset: eta and delta must be > 0");
    ModelSpec m;
    m.n = 2;
    m.flux = {ScalarFlux::from_name("identity"), ScalarFlux::from_name("identity")};
    m.velocity = {VelocityMap::from_name("kk_cubic", 2), VelocityMap::from_name("kk_cubic", 2)};
    auto mu = std::make_shared<const SpatialKernel>(SpatialKernel::poly_bump(eta));
    auto gamma = std::make_shared<const ScaledTemporalKernel>(TemporalKernel::poly_decay(), delta);
    m.kernels = KernelMatrix::shared(2, std::move(mu), std::move(gamma));
    m.initial = {PiecewiseConstant::indicator(-2.0, 2.0, 0.25),
                 PiecewiseConstant::indicator(-2.0, 2.0, 1.0)};
    m.lip_f = 1.0;
    m.nu_sup = 1.0;
    m.grad_nu_sup = m.velocity[0].grad_sup;
    m.grad_nu_lip = m.velocity[0].grad_lip;
    m.h1_warning = true; // f(1) = 1 != 0; tolerated for this preset, monitored at runtime
    return m;
}

ValidationReport validate_model(const ModelSpec& spec) {
    ValidationReport r;
    if (spec.n < 1 || spec.flux.size() != static_cast<size_t>(spec.n) ||
        spec.velocity.size() != static_cast<size_t>(spec.n) ||
        spec.initial.size() != static_cast<size_t>(spec.n) || spec.kernels.n != spec.n) {
        r.issues.push_back({"shape", "component counts of flux/velocity/kernels/initial disagree", true});
        return r;
    }

    for (int k = 0; k < spec.n; ++k) {
        const auto& f = spec.flux[static_cast<size_t>(k)];
        if (std::abs(f(0.0)) > 1e-12)
            r.issues.push_back({"H1", "flux " + f.name + " has f(0) != 0", true});
        if (std::abs(f(1.0)) > 1e-12)
            r.issues.push_back({"H1",
                                "flux " + f.name + " has f(1) != 0; the invariant region "
                                "0 <= U <= 1 is not guaranteed and is monitored at runtime",
                                false});
        r.lip_f = std::max(r.lip_f, f.lipschitz);
    }

    // Sampled certification of the velocity bounds on [0,1]^N.
    for (int k = 0; k < spec.n; ++k) {
        const auto& nu = spec.velocity[static_cast<size_t>(k)];
        if (nu.arity != spec.n) {
            r.issues.push_back({"H2", "velocity arity does not match the system dimension", true});
            continue;
        }
        const int per_axis = spec.n == 1 ? 10000
                                         : static_cast<int>(std::ceil(
                                               std::pow(10000.0, 1.0 / spec.n)));
        std::vector<double> pt(static_cast<size_t>(spec.n), 0.0);
        std::vector<int> idx(static_cast<size_t>(spec.n), 0);
        const double h = 1e-5;
        double sup = 0.0, gsup = 0.0;
        std::vector<double> ph(static_cast<size_t>(spec.n), 0.0);
        while (true) {
            for (int d = 0; d < spec.n; ++d)
                pt[static_cast<size_t>(d)] = static_cast<double>(idx[static_cast<size_t>(d)]) / per_axis;
            const double v0 = nu(pt);
            sup = std::max(sup, std::abs(v0));
            for (int d = 0; d < spec.n; ++d) {
                ph = pt;
                ph[static_cast<size_t>(d)] = std::min(1.0, pt[static_cast<size_t>(d)] + h);
                const double dd = ph[static_cast<size_t>(d)] - pt[static_cast<size_t>(d)];
                if (dd > 0.0) gsup = std::max(gsup, std::abs((nu(ph) - v0) / dd));
            }
            int d = 0;
            for (; d < spec.n; ++d) {
                if (++idx[static_cast<size_t>(d)] <= per_axis) break;
                idx[static_cast<size_t>(d)] = 0;
            }
            if (d == spec.n) break;
        }
        if (sup > nu.sup_abs * (1.0 + 1e-9) + 1e-12)
            r.issues.push_back({"H2", "velocity " + nu.name + ": sampled sup exceeds its certified bound", true});
        r.nu_sup = std::max(r.nu_sup, nu.sup_abs);
        r.grad_nu_sup = std::max(r.grad_nu_sup, nu.grad_sup);
        r.grad_nu_lip = std::max(r.grad_nu_lip, nu.grad_lip);
        if (gsup > nu.grad_sup * (1.0 + 1e-6) + 1e-9)
            r.issues.push_back({"H2", "velocity " + nu.name + ": sampled gradient exceeds its certified bound", true});
    }

    // Kernel hypotheses (H3).
    for (int j = 0; j < spec.n; ++j) {
        for (int k = 0; k < spec.n; ++k) {
            const auto& mu = spec.kernels.mu(j, k);
            const auto& g = spec.kernels.gamma(j, k);
            if (std::abs(mu.mass() - 1.0) > 1e-10)
                r.issues.push_back({"H3", "spatial kernel mass differs from 1", true});
            if (std::abs(g.mass() - 1.0) > 1e-10)
                r.issues.push_back({"H3", "temporal kernel mass differs from 1", true});
            for (int s = 0; s <= 64; ++s) {
                const double t = g.support() * s / 64.0;
                if (g.value(t) < -1e-12) {
                    r.issues.push_back({"H3", "temporal kernel takes negative values", true});
                    break;
                }
            }
            if (!std::isfinite(g.scaled_first_moment()))
                r.issues.push_back({"H3", "temporal kernel first moment is not finite", true});
        }
    }

    // Initial data range.
    for (int k = 0; k < spec.n; ++k) {
        const auto& u0 = spec.initial[static_cast<size_t>(k)];
        if (u0.min_value() < -1e-12 || u0.max_value() > 1.0 + 1e-12)
            r.issues.push_back({"data", "initial data leaves [0, 1]", true});
        if (!std::isfinite(u0.total_mass()))
            r.issues.push_back({"data", "initial data has infinite mass", true});
    }

    return r;
}

} // namespace nlcl
