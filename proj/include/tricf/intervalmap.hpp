#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "tricf/algebra.hpp"

namespace tricf {

// The interval map T_{m,n,alpha} on I_alpha = [(alpha-1)t, alpha*t).
struct MapParams {
    GroupParams group;
    double alpha = 0.5;

    double lo() const { return (alpha - 1.0) * group.t; }
    double hi() const { return alpha * group.t; }

    static MapParams make(int m, int n, double alpha);
};

// Boundary snap tolerance: values this close to an interval or cylinder
// boundary are treated as sitting on it.
inline constexpr double kSnapTol = 1e-13;

struct Digit {
    int k = 0;
    int l = 1;
};

struct StepResult {
    Digit digit;
    double image = 0.0;
};

struct OrbitPoint {
    double x = 0.0;
    Digit digit;          // branch applied at x
    double log_deriv = 0.0;
};

struct Orbit {
    std::vector<OrbitPoint> points;
    bool truncated = false; // hit a singular point before completing N steps
};

// Branch selection at x: l minimal with C^l x outside I, then
// k = -floor(C^l x / t + 1 - alpha).
StepResult digit_step(const MapParams& params, double x);
Digit digit(const MapParams& params, double x);
double step(const MapParams& params, double x);

Orbit orbit(const MapParams& params, double x, int n_steps);

// ln|T'(x)| = tau(A^k C^l, x); the bottom row comes from C^l alone.
double log_deriv(const MapParams& params, double x);

// Branch matrix A^k C^l of the digit at x, as a word.
std::vector<WordFactor> branch_word(const MapParams& params, double x);
Mat2 branch_matrix(const MapParams& params, double x);

// Least l <= cap with |(T^l)'(x)| > 1; nullopt when not expansive within cap.
std::optional<int> expansive_index(const MapParams& params, double x, int cap = 64);

double first_expansive_power(const MapParams& params, double x, int cap = 64);

// Maximal interval with digit (k, 1); m = 2 only.
std::optional<std::pair<double, double>> cylinder_bounds(const MapParams& params, int k);

} // namespace tricf
