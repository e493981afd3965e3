#pragma once

#include <functional>

namespace desclab {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;   // estimated absolute error
    int evaluations = 0;
};

// Adaptive Gauss7/Kronrod15 panels, bisecting until the panel error passes
// max(abs_tol, rel_tol * |integral|) distributed over the panel widths.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-10, double rel_tol = 1e-8);

// integral of f over [a, infinity): finite part up to a+1 plus the tail
// mapped through x -> 1/u
QuadResult integrate_to_inf(const std::function<double(double)>& f, double a,
                            double abs_tol = 1e-10, double rel_tol = 1e-8);

} // namespace desclab
