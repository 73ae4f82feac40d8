#include "nlcl/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "nlcl/errors.hpp"
#include "nlcl/quadrature.hpp"

namespace nlcl {

namespace {

double interp_linear(const std::vector<double>& xs, const std::vector<double>& ys,
                     double x) {
    if (x <= xs.front() || x >= xs.back()) {
        if (x == xs.front()) return ys.front();
        if (x == xs.back()) return ys.back();
        return 0.0;
    }
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const size_t i = static_cast<size_t>(it - xs.begin());
    const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

void check_table(const std::vector<double>& x, const std::vector<double>& y,
                 const char* what) {
    if (x.size() < 2 || x.size() != y.size())
        throw ModelError(std::string(what) + ": need at least two (x, y) samples");
    for (size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1]))
            throw ModelError(std::string(what) + ": abscissae must be strictly increasing");
    for (double v : y)
        if (v < 0.0 || !std::isfinite(v))
            throw ModelError(std::string(what) + ": kernel values must be finite and >= 0");
    if (x.front() < 0.0)
        throw ModelError(std::string(what) + ": support must start at or after 0");
}

// Exact integral of a piecewise-linear table over [a, b] clipped to the table range.
double integrate_table(const std::vector<double>& xs, const std::vector<double>& ys,
                       double a, double b) {
    a = std::max(a, xs.front());
    b = std::min(b, xs.back());
    if (b <= a) return 0.0;
    double total = 0.0;
    for (size_t i = 1; i < xs.size(); ++i) {
        const double lo = std::max(a, xs[i - 1]);
        const double hi = std::min(b, xs[i]);
        if (hi <= lo) continue;
        const double ylo = interp_linear(xs, ys, lo);
        const double yhi = interp_linear(xs, ys, hi);
        total += 0.5 * (ylo + yhi) * (hi - lo);
    }
    return total;
}

} // namespace

// ---------------------------------------------------------------------------
// SpatialKernel

SpatialKernel SpatialKernel::poly_bump(double eta) {
    if (!(eta > 0.0)) throw ModelError("poly_bump: support width eta must be > 0");
    SpatialKernel k;
    k.family_ = Family::PolyBump;
    k.family_name_ = "poly_bump";
    k.support_ = eta;
    // integral of x*(eta-x)^3 over (0, eta) is eta^5/20
    k.amplitude_ = 20.0 / std::pow(eta, 5);
    return k;
}

SpatialKernel SpatialKernel::tabulated(std::vector<double> x, std::vector<double> y) {
    check_table(x, y, "spatial kernel table");
    SpatialKernel k;
    k.family_ = Family::Tabulated;
    k.family_name_ = "tabulated";
    k.support_ = x.back();
    k.tab_x_ = std::move(x);
    k.tab_y_ = std::move(y);
    const double raw_mass = integrate_table(k.tab_x_, k.tab_y_, 0.0, k.support_);
    if (!(raw_mass > 0.0))
        throw ModelError("spatial kernel table: raw shape has zero mass");
    k.amplitude_ = 1.0 / raw_mass;
    return k;
}

double SpatialKernel::raw(double x) const {
    if (x < 0.0 || x >= support_) return 0.0;
    switch (family_) {
        case Family::PolyBump: {
            const double d = support_ - x;
            return x * d * d * d;
        }
        case Family::Tabulated:
            return interp_linear(tab_x_, tab_y_, x);
    }
    return 0.0;
}

double SpatialKernel::value(double x) const { return amplitude_ * raw(x); }

double SpatialKernel::integrate(double a, double b) const {
    a = std::max(a, 0.0);
    b = std::min(b, support_);
    if (b <= a) return 0.0;
    if (family_ == Family::Tabulated)
        return amplitude_ * integrate_table(tab_x_, tab_y_, a, b);
    return gauss5([this](double x) { return value(x); }, a, b);
}

double SpatialKernel::mass() const { return integrate(0.0, support_); }

double SpatialKernel::sup_deriv() const {
    if (family_ == Family::PolyBump) {
        // mu'(x) = L (eta-x)^2 (eta-4x); densely sampled maximization
        const double eta = support_;
        double best = 0.0;
        constexpr int n = 100000;
        for (int i = 0; i <= n; ++i) {
            const double x = eta * i / n;
            const double d = eta - x;
            best = std::max(best, std::abs(amplitude_ * d * d * (eta - 4.0 * x)));
        }
        return best;
    }
    double best = 0.0;
    for (size_t i = 1; i < tab_x_.size(); ++i) {
        const double slope = (tab_y_[i] - tab_y_[i - 1]) / (tab_x_[i] - tab_x_[i - 1]);
        best = std::max(best, std::abs(amplitude_ * slope));
    }
    return best;
}

double SpatialKernel::sup_second_deriv() const {
    if (family_ == Family::PolyBump) {
        // mu''(x) = 6 L (eta-x) (2x - eta)
        const double eta = support_;
        double best = 0.0;
        constexpr int n = 100000;
        for (int i = 0; i <= n; ++i) {
            const double x = eta * i / n;
            best = std::max(best, std::abs(6.0 * amplitude_ * (eta - x) * (2.0 * x - eta)));
        }
        return best;
    }
    // Piecewise linear: generalized second derivative lives at the breakpoints.
    // Use slope jumps divided by the neighbor spacing as a usable finite bound.
    double best = 0.0;
    for (size_t i = 1; i + 1 < tab_x_.size(); ++i) {
        const double sl = (tab_y_[i] - tab_y_[i - 1]) / (tab_x_[i] - tab_x_[i - 1]);
        const double sr = (tab_y_[i + 1] - tab_y_[i]) / (tab_x_[i + 1] - tab_x_[i]);
        const double h = 0.5 * (tab_x_[i + 1] - tab_x_[i - 1]);
        best = std::max(best, std::abs(amplitude_ * (sr - sl) / h));
    }
    return best;
}

// ---------------------------------------------------------------------------
// TemporalKernel

TemporalKernel TemporalKernel::poly_decay() {
    TemporalKernel k;
    k.family_ = Family::PolyDecay;
    k.family_name_ = "poly_decay";
    k.support_ = 1.0;
    k.amplitude_ = 3.0;
    return k;
}

TemporalKernel TemporalKernel::tabulated(std::vector<double> x, std::vector<double> y) {
    check_table(x, y, "temporal kernel table");
    if (x.back() > 1.0 + 1e-12)
        throw ModelError(
            "temporal kernel table: support must lie inside [0, 1]; rescale the "
            "kernel and fold the scale into delta");
    TemporalKernel k;
    k.family_ = Family::Tabulated;
    k.family_name_ = "tabulated";
    k.support_ = x.back();
    k.tab_x_ = std::move(x);
    k.tab_y_ = std::move(y);
    const double raw_mass = integrate_table(k.tab_x_, k.tab_y_, 0.0, k.support_);
    if (!(raw_mass > 0.0))
        throw ModelError("temporal kernel table: raw shape has zero mass");
    k.amplitude_ = 1.0 / raw_mass;
    return k;
}

double TemporalKernel::value(double t) const {
    if (t < 0.0 || t >= support_) return 0.0;
    if (family_ == Family::PolyDecay) {
        const double d = 1.0 - t;
        return amplitude_ * d * d;
    }
    return amplitude_ * interp_linear(tab_x_, tab_y_, t);
}

double TemporalKernel::integrate(double a, double b) const {
    a = std::max(a, 0.0);
    b = std::min(b, support_);
    if (b <= a) return 0.0;
    if (family_ == Family::Tabulated)
        return amplitude_ * integrate_table(tab_x_, tab_y_, a, b);
    return gauss5([this](double t) { return value(t); }, a, b);
}

double TemporalKernel::mass() const { return integrate(0.0, support_); }

double TemporalKernel::first_moment() const {
    if (family_ == Family::PolyDecay) return 0.25; // int_0^1 3 t (1-t)^2 dt
    return adaptive_simpson([this](double t) { return t * value(t); }, 0.0, support_);
}

// ---------------------------------------------------------------------------
// ScaledTemporalKernel

ScaledTemporalKernel::ScaledTemporalKernel(TemporalKernel base, double delta)
    : base_(std::move(base)), delta_(delta) {
    if (!(delta > 0.0)) throw ModelError("scaled temporal kernel: delta must be > 0");
}

double ScaledTemporalKernel::integrate(double a, double b) const {
    return base_.integrate(a / delta_, b / delta_);
}

// ---------------------------------------------------------------------------
// Cell averages

std::vector<double> spatial_cell_averages(const SpatialKernel& mu, double dx) {
    if (!(dx > 0.0)) throw ModelError("spatial_cell_averages: dx must be > 0");
    const int n = std::max(1, static_cast<int>(std::ceil(mu.support() / dx - 1e-12)));
    std::vector<double> w(static_cast<size_t>(n));
    for (int q = 0; q < n; ++q) {
        w[static_cast<size_t>(q)] = mu.integrate(q * dx, (q + 1) * dx) / dx;
    }
    return w;
}

std::vector<double> temporal_cell_averages(const ScaledTemporalKernel& g, double dt) {
    if (!(dt > 0.0)) throw ModelError("temporal_cell_averages: dt must be > 0");
    const int n = std::max(1, static_cast<int>(std::ceil(g.support() / dt - 1e-12)));
    std::vector<double> out(static_cast<size_t>(n));
    for (int s = 0; s < n; ++s) {
        out[static_cast<size_t>(s)] = g.integrate(s * dt, (s + 1) * dt) / dt;
    }
    return out;
}

KernelMatrix KernelMatrix::shared(int n, std::shared_ptr<const SpatialKernel> mu,
                                  std::shared_ptr<const ScaledTemporalKernel> gamma) {
    KernelMatrix m;
    m.n = n;
    m.spatial.assign(static_cast<size_t>(n) * n, std::move(mu));
    m.temporal.assign(static_cast<size_t>(n) * n, std::move(gamma));
    return m;
}

} // namespace nlcl
