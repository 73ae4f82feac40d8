#include "nlcl/quadrature.hpp"

#include <cmath>

namespace nlcl {

namespace {

// Nodes/weights for 5-point Gauss-Legendre on [-1, 1].
constexpr double kNodes[5] = {
    -0.906179845938663992797626878299,
    -0.538469310105683091036314420700,
    0.0,
    0.538469310105683091036314420700,
    0.906179845938663992797626878299,
};
constexpr double kWeights[5] = {
    0.236926885056189087514264040720,
    0.478628670499366468041291514836,
    0.568888888888888888888888888889,
    0.478628670499366468041291514836,
    0.236926885056189087514264040720,
};

double simpson(const std::function<double(double)>& f, double a, double fa, double m,
               double fm, double b, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double fa,
                     double b, double fb, double m, double fm, double whole, double tol,
                     int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(f, a, fa, lm, flm, m, fm);
    const double right = simpson(f, m, fm, rm, frm, b, fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

} // namespace

double gauss5(const std::function<double(double)>& f, double a, double b) {
    const double h = 0.5 * (b - a);
    const double c = 0.5 * (a + b);
    double s = 0.0;
    for (int i = 0; i < 5; ++i) {
        s += kWeights[i] * f(c + h * kNodes[i]);
    }
    return s * h;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = simpson(f, a, fa, m, fm, b, fb);
    return adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, 48);
}

} // namespace nlcl
