#pragma once

#include <functional>

namespace nlcl {

/// Fixed 5-point Gauss-Legendre rule on [a, b]. Exact for polynomials up to
/// degree 9, which covers every built-in kernel family.
double gauss5(const std::function<double(double)>& f, double a, double b);

/// Adaptive Simpson to absolute tolerance `tol`; used for tabulated kernels
/// where no polynomial structure is guaranteed.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12);

} // namespace nlcl
