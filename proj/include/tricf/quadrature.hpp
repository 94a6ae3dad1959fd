#pragma once

#include <functional>

namespace tricf {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    long panels = 0;
    bool converged = false;
};

// Adaptive Gauss-Kronrod (G7/K15) with worst-panel-first refinement.
// Nodes are interior, so integrable endpoint singularities are safe.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double abs_tol, long max_panels = 1000000);

} // namespace tricf
