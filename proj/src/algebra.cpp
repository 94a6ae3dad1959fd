#include "tricf/algebra.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace tricf {

namespace {

constexpr double kPoleTol = 1e-300;

double max_abs_entry(const Mat2& m) {
    return std::max(std::max(std::abs(m.a), std::abs(m.b)),
                    std::max(std::abs(m.c), std::abs(m.d)));
}

// Keep long products tame. Below 1e6 the computed determinant is reliable
// and drift is squeezed out; above that, ad - bc is pure cancellation noise
// and only a projective rescale is safe.
Mat2 renormalized(const Mat2& m) {
    const double scale = max_abs_entry(m);
    if (scale < 1e6) {
        const double s = std::sqrt(std::abs(m.det()));
        if (s > 0.0) return {m.a / s, m.b / s, m.c / s, m.d / s};
        return m;
    }
    return {m.a / scale, m.b / scale, m.c / scale, m.d / scale};
}

} // namespace

GroupParams GroupParams::make(int m, int n) {
    if (m < 2) throw std::invalid_argument("GroupParams: m must be >= 2");
    if (n < 3 || n < m) throw std::invalid_argument("GroupParams: need n >= 3 and n >= m");
    if (m == 2 && n <= m) throw std::invalid_argument("GroupParams: need n > m when m = 2");
    GroupParams p;
    p.m = m;
    p.n = n;
    p.mu = 2.0 * std::cos(std::numbers::pi / m);
    p.nu = 2.0 * std::cos(std::numbers::pi / n);
    if (m == 2) p.mu = 0.0; // cos(pi/2) exactly
    p.t = p.mu + p.nu;
    return p;
}

Mat2 operator*(const Mat2& lhs, const Mat2& rhs) {
    return {lhs.a * rhs.a + lhs.b * rhs.c, lhs.a * rhs.b + lhs.b * rhs.d,
            lhs.c * rhs.a + lhs.d * rhs.c, lhs.c * rhs.b + lhs.d * rhs.d};
}

Mat2 mat_pow(const Mat2& base, int e) {
    if (e == 0) return Mat2::identity();
    Mat2 b = e > 0 ? base : base.inverse();
    int k = std::abs(e);
    Mat2 acc = Mat2::identity();
    for (int i = 0; i < k; ++i) {
        acc = acc * b;
        if ((i & 3) == 3) acc = renormalized(acc);
    }
    return acc;
}

Generators generators(const GroupParams& params) {
    Generators g;
    g.A = {1.0, params.t, 0.0, 1.0};
    g.B = {params.nu, 1.0, -1.0, 0.0};
    g.C = {-params.mu, 1.0, -1.0, 0.0};
    return g;
}

ExtReal apply(const Mat2& mat, ExtReal x) {
    if (x.infinite) {
        if (std::abs(mat.c) < kPoleTol) return ExtReal::inf();
        return ExtReal::of(mat.a / mat.c);
    }
    return apply(mat, x.value);
}

ExtReal apply(const Mat2& mat, double x) {
    const double den = mat.c * x + mat.d;
    if (den == 0.0) return ExtReal::inf();
    return ExtReal::of((mat.a * x + mat.b) / den);
}

double tau(const Mat2& mat, double x) {
    const double den = std::abs(mat.c * x + mat.d);
    if (den == 0.0) throw PoleError("tau: cx + d = 0");
    return -2.0 * std::log(den);
}

bool proj_eq(const Mat2& lhs, const Mat2& rhs, double eps) {
    auto normalize = [](const Mat2& m) -> Mat2 {
        double best = m.a;
        for (double e : {m.b, m.c, m.d})
            if (std::abs(e) > std::abs(best)) best = e;
        if (best == 0.0) return m;
        return {m.a / best, m.b / best, m.c / best, m.d / best};
    };
    // M ~ +-N: near-equal magnitudes can normalize with either sign
    const Mat2 u = normalize(lhs);
    const Mat2 v = normalize(rhs);
    const bool plus = std::abs(u.a - v.a) < eps && std::abs(u.b - v.b) < eps &&
                      std::abs(u.c - v.c) < eps && std::abs(u.d - v.d) < eps;
    if (plus) return true;
    return std::abs(u.a + v.a) < eps && std::abs(u.b + v.b) < eps &&
           std::abs(u.c + v.c) < eps && std::abs(u.d + v.d) < eps;
}

std::vector<double> mobius_fixed_points(const Mat2& mat) {
    const double scale = max_abs_entry(mat);
    const double tol = 1e-14 * scale;
    // M x = x  <=>  c x^2 + (d - a) x - b = 0
    const double qa = mat.c;
    const double qb = mat.d - mat.a;
    const double qc = -mat.b;
    if (std::abs(qa) <= tol && std::abs(qb) <= tol && std::abs(qc) <= tol)
        throw DegenerateError("mobius_fixed_points: projectively the identity");
    if (std::abs(qa) <= tol) {
        if (std::abs(qb) <= tol) return {}; // parabolic fixing infinity only
        return {-qc / qb};
    }
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) return {};
    if (disc == 0.0) return {-qb / (2.0 * qa)};
    const double root = std::sqrt(disc);
    const double q = -0.5 * (qb + (qb >= 0.0 ? root : -root));
    double x1 = q / qa;
    double x2 = qc / q;
    if (x1 > x2) std::swap(x1, x2);
    return {x1, x2};
}

Mat2 word_to_matrix(std::span<const WordFactor> word, const GroupParams& params) {
    const Generators g = generators(params);
    Mat2 acc = Mat2::identity();
    int count = 0;
    for (const WordFactor& f : word) {
        Mat2 piece;
        if (f.letter == 'A') {
            piece = Mat2::translation(f.power * params.t);
        } else if (f.letter == 'C') {
            piece = mat_pow(g.C, f.power);
        } else {
            throw std::invalid_argument("word_to_matrix: letter must be A or C");
        }
        acc = acc * piece;
        if ((++count & 7) == 0) acc = renormalized(acc);
    }
    return acc;
}

} // namespace tricf
