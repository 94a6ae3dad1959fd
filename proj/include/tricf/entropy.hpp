#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tricf/planar.hpp"

namespace tricf {

struct EntropyEstimate {
    double value = 0.0;
    long n_iterations = 0;
    long burn_in = 0;
    double std_error = 0.0;
    std::uint64_t seed = 0;
};

// Closed-form constants of the n-th family (m = 2).
struct Constants {
    double vol = 0.0;
    double rosen_r = 0.0;
    double plateau_lo = 0.0;
    double plateau_hi = 0.0;
    double mass_half = 0.0;
    double h_max = 0.0;
};

double vol_unit_tangent(int m, int n);

// Positive root of x^2 + (2 - 2cos(pi/n))x - 1 = 0 for odd n; 1 for even n.
double rosen_R(int n);

double mass_closed_form(int n); // mu(Omega_{2,n,1/2})
double max_entropy(int n);
std::pair<double, double> plateau(int n);
Constants family_constants(int n);

EntropyEstimate birkhoff_entropy(const MapParams& params, long n_iters, long burn_in,
                                 std::uint64_t seed);

// Integral of the branchwise -2 ln|cx+d| against dmu over the domain.
// Hyperbola-corner rectangles are handled by matched-cutoff regularization;
// the divergent coefficients must cancel across the domain.
double rohlin_integral(const PlanarDomain& dom, const MapParams& params,
                       double abs_tol = 1e-8);

struct CurveRow {
    double alpha = 0.0;
    double entropy = 0.0;
    double std_error = 0.0;
    double mass = 0.0;
    double product = 0.0;
    std::string status = "ok";
};

std::vector<CurveRow> entropy_curve(int n, const std::vector<double>& alphas, long iters,
                                    std::uint64_t seed);

std::string curve_to_csv(const std::vector<CurveRow>& rows);

// Deterministic counter-based generator (splitmix64 stream).
struct SplitMix {
    std::uint64_t state;
    explicit SplitMix(std::uint64_t seed) : state(seed) {}
    std::uint64_t next();
    double uniform01();
};

} // namespace tricf
