#pragma once

#include <memory>
#include <string>
#include <vector>

namespace nlcl {

/// Compactly supported, nonnegative spatial convolution kernel, normalized to
/// unit mass on construction.
///
/// The kernel weights the road ahead: in the convolution it is applied to the
/// downstream offset, so support (0, eta) means "the next eta units of space".
/// Built-in family `poly_bump` is L*x*(eta-x)^3 on (0, eta) with L chosen so
/// the integral is 1 (L = 20/eta^5). Tabulated kernels are linearly
/// interpolated between samples and rescaled to unit mass.
class SpatialKernel {
public:
    static SpatialKernel poly_bump(double eta);
    static SpatialKernel tabulated(std::vector<double> x, std::vector<double> y);

    /// Normalized kernel value; 0 outside [0, support).
    double value(double x) const;
    double support() const { return support_; }
    /// Normalization factor applied to the raw shape (the symbol L for poly_bump).
    double amplitude() const { return amplitude_; }
    /// Quadrature of value() over the support; 1 within 1e-12 by construction.
    double mass() const;
    /// Sup of |mu'| and |mu''| over the support. Analytic expressions sampled
    /// densely for poly_bump; second-order finite differences for tabulated.
    double sup_deriv() const;
    double sup_second_deriv() const;

    bool is_poly_bump() const { return family_ == Family::PolyBump; }
    const std::string& family_name() const { return family_name_; }

    /// Integral of the normalized kernel over [a, b] clipped to the support.
    double integrate(double a, double b) const;

private:
    enum class Family { PolyBump, Tabulated };

    SpatialKernel() = default;
    double raw(double x) const;

    Family family_ = Family::PolyBump;
    std::string family_name_;
    double support_ = 0.0;
    double amplitude_ = 1.0;
    std::vector<double> tab_x_, tab_y_;
};

/// Unscaled temporal memory kernel: nonnegative, support inside [0, 1],
/// unit mass, finite first moment.
/// Built-in family `poly_decay` is 3*(1-t)^2 on (0, 1).
class TemporalKernel {
public:
    static TemporalKernel poly_decay();
    static TemporalKernel tabulated(std::vector<double> x, std::vector<double> y);

    double value(double t) const;
    double support_radius() const { return support_; }
    double mass() const;
    /// First moment int t*Gamma(t) dt (the bound C_Gamma).
    double first_moment() const;
    const std::string& family_name() const { return family_name_; }
    bool is_poly_decay() const { return family_ == Family::PolyDecay; }

    double integrate(double a, double b) const;

private:
    enum class Family { PolyDecay, Tabulated };

    TemporalKernel() = default;

    Family family_ = Family::PolyDecay;
    std::string family_name_;
    double support_ = 1.0;
    double amplitude_ = 1.0;
    std::vector<double> tab_x_, tab_y_;
};

/// Gamma_delta(t) = Gamma(t/delta) / delta: same unit mass, support shrunk to
/// [0, delta * base support], first moment scaled linearly in delta.
class ScaledTemporalKernel {
public:
    ScaledTemporalKernel(TemporalKernel base, double delta);

    double value(double t) const { return base_.value(t / delta_) / delta_; }
    double delta() const { return delta_; }
    double support() const { return delta_ * base_.support_radius(); }
    double mass() const { return base_.mass(); }
    double scaled_first_moment() const { return delta_ * base_.first_moment(); }
    const TemporalKernel& base() const { return base_; }

    double integrate(double a, double b) const;

private:
    TemporalKernel base_;
    double delta_;
};

/// w_q = (1/dx) int_{q dx}^{(q+1) dx} mu, q = 0 .. ceil(eta/dx)-1.
/// dx * sum(w) equals the kernel mass whenever dx does not exceed the support.
std::vector<double> spatial_cell_averages(const SpatialKernel& mu, double dx);

/// g_s = (1/dt) int_{s dt}^{(s+1) dt} Gamma_delta, s = 0 .. ceil(support/dt)-1.
/// A single entry [1/dt] when dt >= support. The kernel is evaluated as zero
/// beyond its support; the possibly partial last cell is not renormalized.
std::vector<double> temporal_cell_averages(const ScaledTemporalKernel& g, double dt);

/// N x N matrix of kernel pairs Theta^{j,k} = mu^{j,k}(x) Gamma^{j,k}(t).
/// Entries may alias shared kernels; entry (j, k) convolves component j and
/// feeds the velocity of component k.
struct KernelMatrix {
    int n = 0;
    std::vector<std::shared_ptr<const SpatialKernel>> spatial;   // row-major (j, k)
    std::vector<std::shared_ptr<const ScaledTemporalKernel>> temporal;

    const SpatialKernel& mu(int j, int k) const { return *spatial[j * n + k]; }
    const ScaledTemporalKernel& gamma(int j, int k) const { return *temporal[j * n + k]; }
    const std::shared_ptr<const SpatialKernel>& mu_ptr(int j, int k) const {
        return spatial[j * n + k];
    }
    const std::shared_ptr<const ScaledTemporalKernel>& gamma_ptr(int j, int k) const {
        return temporal[j * n + k];
    }

    /// All entries alias one kernel pair (the Keyfitz-Kranzer layout).
    static KernelMatrix shared(int n, std::shared_ptr<const SpatialKernel> mu,
                               std::shared_ptr<const ScaledTemporalKernel> gamma);
};

} // namespace nlcl
