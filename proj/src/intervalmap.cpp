#include "tricf/intervalmap.hpp"

#include <cmath>
#include <stdexcept>

namespace tricf {

namespace {

// C^l as a Moebius map for the relevant l; bottom-row data drives both the
// branch test and the derivative.
ExtReal c_power_apply(const GroupParams& g, int l, double x) {
    if (g.m == 2) {
        if (x == 0.0) return ExtReal::inf();
        return ExtReal::of(-1.0 / x);
    }
    if (g.m == 3) {
        if (l == 1) {
            if (x == 0.0) return ExtReal::inf();
            return ExtReal::of(1.0 - 1.0 / x); // C = (-1 1; -1 0)
        }
        if (x == 1.0) return ExtReal::inf();
        return ExtReal::of(-1.0 / (x - 1.0)); // C^2 = (0 -1; 1 -1)
    }
    // general m: apply the matrix power
    Mat2 cl = mat_pow(generators(g).C, l);
    return apply(cl, x);
}

bool in_interval(const MapParams& p, double y) {
    return y > p.lo() - kSnapTol && y < p.hi() - kSnapTol;
}

} // namespace

MapParams MapParams::make(int m, int n, double alpha) {
    if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("MapParams: alpha must lie in [0, 1]");
    return MapParams{GroupParams::make(m, n), alpha};
}

StepResult digit_step(const MapParams& params, double x) {
    const GroupParams& g = params.group;
    double cx = 0.0;
    int l = 0;
    for (l = 1; l <= g.m - 1; ++l) {
        ExtReal y = c_power_apply(g, l, x);
        if (y.infinite) throw SingularOrbit("digit: orbit hit a pole of C^l");
        if (!in_interval(params, y.value)) {
            cx = y.value;
            break;
        }
        if (l == g.m - 1)
            throw NoAdmissibleL("digit: every C^l x stays inside the interval");
        // keep searching; y stays inside I
    }
    if (l > g.m - 1) throw NoAdmissibleL("digit: no admissible l");

    double v = cx / g.t + 1.0 - params.alpha;
    const double r = std::round(v);
    if (std::abs(v - r) < 1e-12) v = r;
    const double kd = -std::floor(v);
    if (std::abs(kd) > 2e9)
        throw SingularOrbit("digit: point at the pole within double resolution");
    int k = static_cast<int>(kd);
    double image = cx + k * g.t;
    // snap to the endpoints first, then guard against rounding drift
    if (std::abs(image - params.lo()) < kSnapTol) {
        image = params.lo();
    } else if (std::abs(image - params.hi()) < kSnapTol) {
        k -= 1;
        image = params.lo(); // right endpoint wraps to the closed left one
    } else if (image >= params.hi()) {
        k -= 1;
        image -= g.t;
    } else if (image < params.lo()) {
        k += 1;
        image += g.t;
    }
    return {{k, l}, image};
}

Digit digit(const MapParams& params, double x) { return digit_step(params, x).digit; }

double step(const MapParams& params, double x) { return digit_step(params, x).image; }

Orbit orbit(const MapParams& params, double x, int n_steps) {
    Orbit out;
    out.points.reserve(static_cast<size_t>(n_steps) + 1);
    double cur = x;
    for (int i = 0; i <= n_steps; ++i) {
        OrbitPoint pt;
        pt.x = cur;
        if (i == n_steps) {
            try {
                StepResult s = digit_step(params, cur);
                pt.digit = s.digit;
                pt.log_deriv = log_deriv(params, cur);
            } catch (const SingularOrbit&) {
                out.truncated = true;
            } catch (const NoAdmissibleL&) {
                out.truncated = true;
            }
            out.points.push_back(pt);
            break;
        }
        try {
            StepResult s = digit_step(params, cur);
            pt.digit = s.digit;
            pt.log_deriv = log_deriv(params, cur);
            out.points.push_back(pt);
            cur = s.image;
        } catch (const SingularOrbit&) {
            out.truncated = true;
            out.points.push_back(pt);
            break;
        }
    }
    return out;
}

double log_deriv(const MapParams& params, double x) {
    const GroupParams& g = params.group;
    if (g.m == 2) {
        if (x == 0.0) throw SingularOrbit("log_deriv: x = 0");
        return -2.0 * std::log(std::abs(x));
    }
    const Digit d = digit(params, x);
    if (g.m == 3) {
        const double den = (d.l == 1) ? std::abs(x) : std::abs(x - 1.0);
        if (den == 0.0) throw SingularOrbit("log_deriv: pole of the branch");
        return -2.0 * std::log(den);
    }
    Mat2 cl = mat_pow(generators(g).C, d.l);
    return tau(cl, x);
}

std::vector<WordFactor> branch_word(const MapParams& params, double x) {
    const Digit d = digit(params, x);
    return {WordFactor{d.k, 'A'}, WordFactor{d.l, 'C'}};
}

Mat2 branch_matrix(const MapParams& params, double x) {
    const Digit d = digit(params, x);
    return Mat2::translation(d.k * params.group.t) * mat_pow(generators(params.group).C, d.l);
}

std::optional<int> expansive_index(const MapParams& params, double x, int cap) {
    if (cap < 1) throw std::invalid_argument("expansive_index: cap must be >= 1");
    double sum = 0.0;
    double cur = x;
    for (int l = 1; l <= cap; ++l) {
        sum += log_deriv(params, cur);
        if (sum > 0.0) return l;
        cur = step(params, cur);
    }
    return std::nullopt;
}

double first_expansive_power(const MapParams& params, double x, int cap) {
    auto l = expansive_index(params, x, cap);
    if (!l) throw SingularOrbit("first_expansive_power: not expansive within cap");
    double cur = x;
    for (int i = 0; i < *l; ++i) cur = step(params, cur);
    return cur;
}

std::optional<std::pair<double, double>> cylinder_bounds(const MapParams& params, int k) {
    if (params.group.m != 2)
        throw UnsupportedM("cylinder_bounds: implemented for m = 2 only");
    const double t = params.group.t;
    const double lo = params.lo();
    const double hi = params.hi();
    // digit k  <=>  1/x in (k t - hi, k t - lo]
    const double u = k * t - hi;
    const double v = k * t - lo;
    double a, b;
    if (u >= 0.0) { // positive branch: x in [1/v, 1/u)
        a = 1.0 / v;
        b = (u > 0.0) ? 1.0 / u : hi;
    } else if (v <= 0.0) { // negative branch
        a = (v < 0.0) ? 1.0 / v : lo;
        b = 1.0 / u;
    } else {
        return std::nullopt; // k = 0: preimage straddles infinity, misses I
    }
    a = std::max(a, lo);
    b = std::min(b, hi);
    if (!(a < b)) return std::nullopt;
    return std::make_pair(a, b);
}

} // namespace tricf
