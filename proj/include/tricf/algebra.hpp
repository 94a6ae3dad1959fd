#pragma once

#include <span>
#include <vector>

#include "tricf/errors.hpp"

namespace tricf {

// Triangle-group data for G_{m,n}: mu = 2cos(pi/m), nu = 2cos(pi/n), t = mu + nu.
struct GroupParams {
    int m = 2;
    int n = 3;
    double mu = 0.0;
    double nu = 0.0;
    double t = 0.0;

    static GroupParams make(int m, int n);
};

// Real 2x2 matrix (a b; c d), determinant one up to rounding, acting projectively.
struct Mat2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }
    Mat2 inverse() const { return {d, -b, -c, a}; }

    static Mat2 identity() { return {}; }
    static Mat2 translation(double s) { return {1.0, s, 0.0, 1.0}; }
};

Mat2 operator*(const Mat2& lhs, const Mat2& rhs);

// Integer power with determinant renormalization; handles negative exponents.
Mat2 mat_pow(const Mat2& base, int e);

// Extended real line: a value or the point at infinity.
struct ExtReal {
    double value = 0.0;
    bool infinite = false;

    static ExtReal inf() { return {0.0, true}; }
    static ExtReal of(double v) { return {v, false}; }
};

struct Generators {
    Mat2 A, B, C;
};

Generators generators(const GroupParams& params);

// Fractional-linear action; poles map to the infinity marker, never NaN.
ExtReal apply(const Mat2& mat, ExtReal x);
ExtReal apply(const Mat2& mat, double x);

// tau(M, x) = -2 ln|cx + d|, the Rohlin integrand and geodesic return time.
double tau(const Mat2& mat, double x);

// Projective comparison: true iff M ~ +-N entrywise within eps after
// normalizing by the entry of largest magnitude.
bool proj_eq(const Mat2& lhs, const Mat2& rhs, double eps);

// Real fixed points of the Moebius action, ascending; empty when elliptic.
std::vector<double> mobius_fixed_points(const Mat2& mat);

// One factor of a group word: A^power or C^power.
struct WordFactor {
    int power = 1;
    char letter = 'A'; // 'A' or 'C'
};

// Left-to-right product of the factors, renormalizing determinant drift
// every 32 factors.
Mat2 word_to_matrix(std::span<const WordFactor> word, const GroupParams& params);

} // namespace tricf
