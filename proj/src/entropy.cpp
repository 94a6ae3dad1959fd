#include "tricf/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "tricf/quadrature.hpp"

namespace tricf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double tau_at(const MapParams& params, double x) {
    if (params.group.m == 2) return -2.0 * std::log(std::abs(x));
    return log_deriv(params, x);
}

// Integral over one rectangle of tau(x) dmu, with the inner y-integral done
// in closed form. Rectangles touching xy = -1 at a corner are integrated
// under the matched cutoff 1 + xy > delta; the ln(1/delta) coefficient is
// returned for cross-rectangle cancellation.
struct RectIntegral {
    double value = 0.0;
    double divergence_coeff = 0.0;
    bool converged = true;
};

RectIntegral rohlin_rect(const MapParams& params, const Rect& r, double abs_tol) {
    RectIntegral out;
    if (r.x2 - r.x1 < 1e-15 || r.y2 - r.y1 < 1e-15) return out;

    const double scale = 1.0 + std::max(std::abs(r.x1), std::abs(r.x2)) *
                                   std::max(std::abs(r.y1), std::abs(r.y2));
    const double corner_tol = 1e-9 * scale;
    const bool corner_right = std::abs(1.0 + r.x2 * r.y1) < corner_tol && r.y2 == 0.0;
    const bool corner_left = std::abs(1.0 + r.x1 * r.y2) < corner_tol && r.y1 == 0.0;

    // interior splits where the integrand changes branch or has a log zero
    std::vector<double> cuts = {r.x1, r.x2};
    for (double s : {0.0, 1.0}) {
        if (s > r.x1 + 1e-13 && s < r.x2 - 1e-13) cuts.push_back(s);
    }
    std::sort(cuts.begin(), cuts.end());

    auto integrate_piece = [&](const std::function<double(double)>& f, double a, double b,
                               double tol) {
        QuadResult q = integrate_adaptive(f, a, b, tol);
        if (!q.converged) out.converged = false;
        return q.value;
    };

    const double nudge = 1e-11 * (r.x2 - r.x1);
    if (corner_right) {
        // inner integral equals 1/(x2 - x); subtract tau(x2-) to regularize
        const double tau_star = tau_at(params, r.x2 - nudge);
        out.divergence_coeff = tau_star;
        const double finite_log = tau_star * std::log((r.x2 - r.x1) * std::abs(r.y1));
        double v = finite_log;
        for (size_t i = 0; i + 1 < cuts.size(); ++i) {
            auto f = [&](double x) { return (tau_at(params, x) - tau_star) / (r.x2 - x); };
            v += integrate_piece(f, cuts[i], cuts[i + 1], abs_tol / cuts.size());
        }
        out.value = v;
        return out;
    }
    if (corner_left) {
        const double tau_star = tau_at(params, r.x1 + nudge);
        out.divergence_coeff = tau_star;
        const double finite_log = tau_star * std::log((r.x2 - r.x1) * std::abs(r.y2));
        double v = finite_log;
        for (size_t i = 0; i + 1 < cuts.size(); ++i) {
            auto f = [&](double x) { return (tau_at(params, x) - tau_star) / (x - r.x1); };
            v += integrate_piece(f, cuts[i], cuts[i + 1], abs_tol / cuts.size());
        }
        out.value = v;
        return out;
    }

    auto inner = [&](double x) {
        return (r.y2 - r.y1) / ((1.0 + x * r.y1) * (1.0 + x * r.y2));
    };
    double v = 0.0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto f = [&](double x) { return tau_at(params, x) * inner(x); };
        v += integrate_piece(f, cuts[i], cuts[i + 1], abs_tol / cuts.size());
    }
    out.value = v;
    return out;
}

} // namespace

std::uint64_t SplitMix::next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double SplitMix::uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double vol_unit_tangent(int m, int n) {
    const double pi = std::numbers::pi;
    return 2.0 * pi * pi * (static_cast<double>(m) * n - m - n) / (static_cast<double>(m) * n);
}

double rosen_R(int n) {
    if (n < 3) throw std::invalid_argument("rosen_R: n >= 3");
    if (n % 2 == 0) return 1.0;
    const double b = 2.0 - 2.0 * std::cos(std::numbers::pi / n);
    return 0.5 * (-b + std::sqrt(b * b + 4.0));
}

double mass_closed_form(int n) {
    const double pi = std::numbers::pi;
    if (n % 2 == 0)
        return 2.0 * std::log((1.0 + std::cos(pi / n)) / std::sin(pi / n));
    return 2.0 * std::log((1.0 + rosen_R(n)) / (2.0 * std::sin(pi / (2.0 * n))));
}

double max_entropy(int n) { return vol_unit_tangent(2, n) / mass_closed_form(n); }

std::pair<double, double> plateau(int n) {
    const double t = 2.0 * std::cos(std::numbers::pi / n);
    const double r = rosen_R(n);
    return {1.0 - r / t, r / t};
}

Constants family_constants(int n) {
    Constants c;
    c.vol = vol_unit_tangent(2, n);
    c.rosen_r = rosen_R(n);
    auto p = plateau(n);
    c.plateau_lo = p.first;
    c.plateau_hi = p.second;
    c.mass_half = mass_closed_form(n);
    c.h_max = max_entropy(n);
    return c;
}

EntropyEstimate birkhoff_entropy(const MapParams& params, long n_iters, long burn_in,
                                 std::uint64_t seed) {
    if (n_iters <= burn_in)
        throw std::invalid_argument("birkhoff_entropy: need n_iters > burn_in");
    const double t = params.group.t;
    const double lo = params.lo();
    const bool simple = params.group.m == 2;

    constexpr int kBatches = 16;
    for (int attempt = 0; attempt < 8; ++attempt) {
        SplitMix rng(seed + 0x532471ull * static_cast<std::uint64_t>(attempt));
        double x = lo + t * rng.uniform01();
        bool bad = false;
        const long samples = n_iters - burn_in;
        const long batch_len = samples / kBatches;
        double batch_means[kBatches] = {0.0};
        double sum = 0.0, comp = 0.0;
        long count = 0;
        for (long i = 0; i < n_iters; ++i) {
            if (std::abs(x) < 1e-14) {
                bad = true;
                break;
            }
            double ld;
            double next;
            if (simple) {
                const double cx = -1.0 / x;
                double v = cx / t + 1.0 - params.alpha;
                const double k = -std::floor(v);
                next = cx + k * t;
                ld = -2.0 * std::log(std::abs(x));
            } else {
                ld = log_deriv(params, x);
                next = step(params, x);
            }
            if (i >= burn_in) {
                const double y = ld - comp;
                const double s = sum + y;
                comp = (s - sum) - y;
                sum = s;
                const long j = std::min<long>((i - burn_in) / std::max<long>(batch_len, 1),
                                              kBatches - 1);
                batch_means[j] += ld;
                ++count;
            }
            x = next;
        }
        if (bad || count == 0) continue;
        EntropyEstimate est;
        est.value = sum / static_cast<double>(count);
        est.n_iterations = n_iters;
        est.burn_in = burn_in;
        est.seed = seed;
        double var = 0.0;
        for (int b = 0; b < kBatches; ++b) {
            const double mb = batch_means[b] / static_cast<double>(batch_len);
            var += (mb - est.value) * (mb - est.value);
        }
        est.std_error = std::sqrt(var / (kBatches * (kBatches - 1.0)));
        return est;
    }
    throw SingularOrbit("birkhoff_entropy: repeated singular starts");
}

namespace {

// Integral of the accelerated return-time tau(W^{j(x)}, x) over the W-power
// rectangle of the accelerated alpha = 0 domain. W is parabolic, so
// W^j = I + j(W - I) and the cylinder sizes decay like 1/j^2.
double rohlin_w_region(const MapParams& params, const Rect& r, double abs_tol) {
    const GroupParams& g = params.group;
    const double t = g.t;
    std::vector<WordFactor> wword = {{-2, 'A'}, {1, 'C'}};
    for (int i = 0; i < g.n - 3; ++i) {
        wword.push_back({-1, 'A'});
        wword.push_back({1, 'C'});
    }
    const Mat2 W = word_to_matrix(wword, g);
    const double eps0 = apply(W.inverse(), 0.0).value;

    // parabolic W: W^j = I + j(W - I) exactly, cylinders shrink like 1/j^2
    auto left_of = [&](double j) {
        const double num = (1.0 - j * t * t) * eps0 - j * t * t * t;
        const double den = j * t * eps0 + 1.0 + j * t * t;
        return num / den; // W^{-j} . eps0
    };
    auto tau_j = [&](double j, double x) {
        return -2.0 * std::log(std::abs(-j * t * x + 1.0 - j * t * t));
    };
    auto inner = [&](double x) {
        return (r.y2 - r.y1) / ((1.0 + x * r.y1) * (1.0 + x * r.y2));
    };

    double total = 0.0;
    double right = r.x2; // eps0
    const long quad_cyl = 2000;
    const long mid_cyl = 4000000;
    for (long j = 1; j <= mid_cyl; ++j) {
        const double left = std::max(left_of(static_cast<double>(j)), r.x1);
        if (right - left > 1e-300) {
            if (j <= quad_cyl) {
                auto f = [&](double x) { return tau_j(static_cast<double>(j), x) * inner(x); };
                total += integrate_adaptive(f, left, right, abs_tol * 1e-4, 64).value;
            } else {
                const double mid = 0.5 * (left + right);
                total += tau_j(static_cast<double>(j), mid) * inner(mid) * (right - left);
            }
            if (left <= r.x1 + 1e-15) return total;
        }
        right = left;
    }
    const double rest_mass = rect_mass({r.x1, right, r.y1, r.y2});
    const double rest_bound = rest_mass * (2.0 * std::log(static_cast<double>(mid_cyl)) + 6.0);
    if (rest_bound > abs_tol)
        throw NonConvergent("rohlin_integral: W-region tail did not converge");
    return total + 0.5 * rest_bound;
}

} // namespace

double rohlin_integral(const PlanarDomain& dom, const MapParams& params, double abs_tol) {
    if (dom.m == 3 && dom.kind == DomainKind::one) {
        // square + shift decomposition: tau_3(M1 x) = -2 ln|x| on [0, t_2),
        // so the part right of the unit square pulls back to Omega_{2,n,1},
        // whose corner regularization is self-consistent.
        const Mat2 m1_inv{1.0, -1.0, 0.0, 1.0};
        PlanarDomain square{2, dom.n, 1.0, DomainKind::one, {}, true};
        PlanarDomain pulled{2, dom.n, 1.0, DomainKind::one, {}, true};
        for (const Rect& r : dom.rects) {
            if (r.x2 <= 1.0 + 1e-12) {
                square.rects.push_back(r);
            } else {
                pulled.rects.push_back(push_rect(m1_inv, r));
            }
        }
        const MapParams two{GroupParams::make(2, dom.n), 1.0};
        return rohlin_integral(square, two, 0.5 * abs_tol) +
               rohlin_integral(pulled, two, 0.5 * abs_tol);
    }
    double total = 0.0;
    double coeff = 0.0;
    bool converged = true;
    const double per_rect = abs_tol / std::max<size_t>(dom.rects.size(), 1);

    double w_edge = -std::numeric_limits<double>::infinity();
    if (dom.kind == DomainKind::accel) {
        // rectangles left of W^{-1}.0 carry the W-power branches
        std::vector<WordFactor> wword = {{-2, 'A'}, {1, 'C'}};
        for (int i = 0; i < params.group.n - 3; ++i) {
            wword.push_back({-1, 'A'});
            wword.push_back({1, 'C'});
        }
        const Mat2 W = word_to_matrix(wword, params.group);
        w_edge = apply(W.inverse(), 0.0).value;
    }
    for (const Rect& r : dom.rects) {
        if (dom.kind == DomainKind::accel && r.x2 <= w_edge + 1e-12) {
            total += rohlin_w_region(params, r, abs_tol);
            continue;
        }
        RectIntegral ri = rohlin_rect(params, r, per_rect);
        total += ri.value;
        coeff += ri.divergence_coeff;
        converged = converged && ri.converged;
    }
    if (std::abs(coeff) > 1e-6)
        throw NonConvergent("rohlin_integral: divergent corner coefficients do not cancel");
    if (!converged) throw NonConvergent("rohlin_integral: quadrature budget exhausted");
    return total;
}

std::vector<CurveRow> entropy_curve(int n, const std::vector<double>& alphas, long iters,
                                    std::uint64_t seed) {
    std::vector<CurveRow> rows;
    const GroupParams g = GroupParams::make(2, n);
    std::uint64_t index = 0;
    for (double alpha : alphas) {
        CurveRow row;
        row.alpha = alpha;
        try {
            MapParams mp{g, alpha};
            EntropyEstimate est =
                birkhoff_entropy(mp, iters, std::min<long>(1000, iters / 10),
                                 seed ^ (0x9E3779B97F4A7C15ull * (index + 1)));
            row.entropy = est.value;
            row.std_error = est.std_error;
            auto mi = locate_matching(alpha, g);
            if (mi) {
                PlanarDomain dom = build_omega_matching(mp, *mi);
                row.mass = domain_mass(dom);
                row.product = row.entropy * row.mass;
            } else {
                row.mass = kInf;
                row.product = kInf;
                row.status = "nomatch";
            }
        } catch (const std::exception& e) {
            row.status = std::string("error:") + e.what();
        }
        rows.push_back(row);
        ++index;
    }
    return rows;
}

std::string curve_to_csv(const std::vector<CurveRow>& rows) {
    std::string out = "alpha,entropy,stderr,mass,product,status\n";
    char buf[256];
    for (const CurveRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g,%s\n", r.alpha,
                      r.entropy, r.std_error, r.mass, r.product, r.status.c_str());
        out += buf;
    }
    return out;
}

} // namespace tricf
