#include "tricf/planar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace tricf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> orbit_values(const MapParams& mp, double x0, long steps) {
    std::vector<double> out;
    out.reserve(static_cast<size_t>(steps) + 1);
    out.push_back(x0);
    double x = x0;
    for (long i = 0; i < steps; ++i) {
        try {
            x = step(mp, x);
        } catch (const std::runtime_error& e) {
            throw OrbitOrderViolation(std::string("endpoint orbit broke early: ") + e.what());
        }
        out.push_back(x);
    }
    return out;
}

// ---- coordinate-compressed coverage grid -------------------------------

struct Grid {
    std::vector<double> xs, ys;

    size_t index_x(double v) const { return index_of(xs, v); }
    size_t index_y(double v) const { return index_of(ys, v); }

    static size_t index_of(const std::vector<double>& axis, double v) {
        auto it = std::lower_bound(axis.begin(), axis.end(), v - 1e-11);
        if (it == axis.end()) return axis.size() - 1;
        return static_cast<size_t>(it - axis.begin());
    }
};

Grid make_grid(std::initializer_list<const std::vector<Rect>*> rect_sets) {
    std::vector<double> xs, ys;
    for (const auto* rs : rect_sets)
        for (const Rect& r : *rs) {
            xs.push_back(r.x1);
            xs.push_back(r.x2);
            ys.push_back(r.y1);
            ys.push_back(r.y2);
        }
    auto dedupe = [](std::vector<double>& v) {
        std::sort(v.begin(), v.end());
        std::vector<double> out;
        for (double x : v)
            if (out.empty() || x - out.back() > 1e-11) out.push_back(x);
        v = out;
    };
    dedupe(xs);
    dedupe(ys);
    return {xs, ys};
}

// coverage counts per cell via a 2-D difference array
std::vector<std::vector<int>> cover_counts(const Grid& g, const std::vector<Rect>& rects) {
    const size_t nx = g.xs.size();
    const size_t ny = g.ys.size();
    std::vector<std::vector<int>> diff(nx, std::vector<int>(ny, 0));
    for (const Rect& r : rects) {
        size_t i1 = g.index_x(r.x1), i2 = g.index_x(r.x2);
        size_t j1 = g.index_y(r.y1), j2 = g.index_y(r.y2);
        if (i2 <= i1 || j2 <= j1) continue;
        diff[i1][j1] += 1;
        diff[i2][j1] -= 1;
        diff[i1][j2] -= 1;
        diff[i2][j2] += 1;
    }
    for (size_t i = 0; i + 1 < nx; ++i)
        for (size_t j = 1; j < ny; ++j) diff[i][j] += diff[i][j - 1];
    for (size_t i = 1; i < nx; ++i)
        for (size_t j = 0; j + 1 < ny; ++j) diff[i][j] += diff[i - 1][j];
    return diff;
}

double cell_mass_guarded(double x1, double x2, double y1, double y2) {
    try {
        return rect_mass({x1, x2, y1, y2});
    } catch (const InvalidRect&) {
        return kInf;
    }
}

// The branch digit covering a probe point, as a planar block matrix.
Mat2 branch_at(const MapParams& mp, double x_probe) {
    const Digit d = digit(mp, x_probe);
    return Mat2::translation(d.k * mp.group.t) * mat_pow(generators(mp.group).C, d.l);
}

struct BlockSet {
    std::vector<Rect> images;   // pushed blocks plus analytic tail closures
    bool ok = true;
};

// Blocks of a domain under the plain digit branches: explicit cylinders down
// to the zone where the fiber is constant, then one telescoped closing slab
// per side.
BlockSet digit_blocks(const PlanarDomain& dom, const MapParams& mp, int margin = 24) {
    const double t = mp.group.t;
    const double lo = mp.lo();
    const double hi = mp.hi();
    BlockSet out;

    std::vector<double> edges;
    for (const Rect& r : dom.rects) {
        edges.push_back(r.x1);
        edges.push_back(r.x2);
    }
    std::sort(edges.begin(), edges.end());

    auto fiber_over = [&](double xa, double xb, double& ya, double& yb) {
        ya = 0.0;
        yb = 0.0;
        for (const Rect& r : dom.rects)
            if (r.x1 <= xa + 1e-12 && r.x2 >= xb - 1e-12) {
                ya = std::min(ya, r.y1);
                yb = std::max(yb, r.y2);
            }
    };

    auto push_cylinder = [&](int k) -> bool {
        auto cyl = cylinder_bounds(mp, k);
        if (!cyl) return false;
        const Mat2 M = Mat2::translation(k * t) * mat_pow(generators(mp.group).C, 1);
        bool any = false;
        for (const Rect& r : dom.rects) {
            const double a = std::max(cyl->first, r.x1);
            const double b = std::min(cyl->second, r.x2);
            if (b - a < 1e-13) continue;
            out.images.push_back(push_rect(M, {a, b, r.y1, r.y2}));
            any = true;
        }
        return any;
    };

    // positive side: cylinders accumulate at 0+
    if (hi > 1e-9) {
        double cut = hi; // below this the fiber is constant
        for (double e : edges)
            if (e > 1e-9 && e < cut) cut = e;
        const int k_first = digit(mp, hi - 1e-9 * t).k;
        int k = k_first;
        int extra = 0;
        while (true) {
            auto cyl = cylinder_bounds(mp, k);
            if (!cyl) break;
            push_cylinder(k);
            const bool inside_cut = cyl->second <= cut + 1e-12;
            ++k;
            if (inside_cut && ++extra >= margin) break;
            if (k > k_first + 4000) {
                out.ok = false;
                break;
            }
        }
        // tail k..infinity over the constant fiber
        double ya, yb;
        auto last = cylinder_bounds(mp, k - 1);
        fiber_over(last->first, last->second, ya, yb);
        const double a = -ya;
        const double bottom = -1.0 / (k * t - a);
        out.images.push_back({lo, hi, bottom, 0.0});
    }

    // negative side: cylinders accumulate at 0-
    if (lo < -1e-9) {
        double cut = lo;
        for (double e : edges)
            if (e < -1e-9 && e > cut) cut = e;
        const int k_first = digit(mp, lo + 1e-9 * t).k;
        int k = k_first;
        int extra = 0;
        while (true) {
            auto cyl = cylinder_bounds(mp, k);
            if (!cyl) break;
            push_cylinder(k);
            const bool inside_cut = cyl->first >= cut - 1e-12;
            --k;
            if (inside_cut && ++extra >= margin) break;
            if (k < k_first - 4000) {
                out.ok = false;
                break;
            }
        }
        double ya, yb;
        auto last = cylinder_bounds(mp, k + 1);
        fiber_over(last->first, last->second, ya, yb);
        const double b = yb;
        const double top = 1.0 / (static_cast<double>(-k) * t - b);
        out.images.push_back({lo, hi, 0.0, top});
    }
    return out;
}

// Blocks of the accelerated alpha = 0 system: W-power cylinders on
// [l0, eps0), plain digits on [eps0, 0).
BlockSet accel_blocks(const PlanarDomain& dom, const MapParams& mp0, int levels = 64) {
    const GroupParams& g = mp0.group;
    const double t = g.t;
    BlockSet out;

    std::vector<WordFactor> wword = {{-2, 'A'}, {1, 'C'}};
    for (int i = 0; i < g.n - 3; ++i) {
        wword.push_back({-1, 'A'});
        wword.push_back({1, 'C'});
    }
    const Mat2 W = word_to_matrix(wword, g);
    const double eps0 = apply(W.inverse(), 0.0).value;
    const double y1 = 1.0 / t;

    // plain-digit region [eps0, 0)
    {
        const int k_first = digit(mp0, eps0 + 1e-11).k; // = -1
        int k = k_first;
        while (k >= k_first - levels) {
            auto cyl = cylinder_bounds(mp0, k);
            if (!cyl) break;
            const double a = std::max(cyl->first, eps0);
            const double b = cyl->second;
            if (b - a > 1e-13) {
                const Mat2 M = Mat2::translation(k * t) * generators(g).C;
                for (const Rect& r : dom.rects) {
                    const double xa = std::max(a, r.x1);
                    const double xb = std::min(b, r.x2);
                    if (xb - xa < 1e-13) continue;
                    out.images.push_back(push_rect(M, {xa, xb, r.y1, r.y2}));
                }
            }
            --k;
        }
        // digit tail: full cylinders with fiber [0, t]
        const double top = 1.0 / (static_cast<double>(-k) * t - t);
        out.images.push_back({-t, 0.0, 0.0, top});
    }

    // W-power region [l0, eps0)
    {
        double right = eps0; // W^{-(j-1)} eps0
        Mat2 Wj = Mat2::identity();
        for (int j = 1; j <= levels; ++j) {
            Wj = Wj * W;
            // cylinder of index j is (W^{-j} eps0, W^{-(j-1)} eps0]
            const double cl = apply(mat_pow(W.inverse(), j), eps0).value;
            for (const Rect& r : dom.rects) {
                const double xa = std::max(cl, r.x1);
                const double xb = std::min(right, r.x2);
                if (xb - xa < 1e-13) continue;
                out.images.push_back(push_rect(Wj, {xa, xb, r.y1, r.y2}));
            }
            right = cl;
        }
        const double zJ = apply(conjugate_by_R(mat_pow(W, levels + 1)), 0.0).value;
        out.images.push_back({eps0, 0.0, zJ, y1});
    }
    return out;
}

struct TileStats {
    double mass = 0.0;
    double image_total = 0.0;
    double overlap = 0.0;
    double uncovered = 0.0;
    double escaped = 0.0;
};

TileStats tile_stats(const std::vector<Rect>& domain, const std::vector<Rect>& images) {
    Grid g = make_grid({&domain, &images});
    auto img = cover_counts(g, images);
    auto dom = cover_counts(g, domain);
    TileStats st;
    for (size_t i = 0; i + 1 < g.xs.size(); ++i)
        for (size_t j = 0; j + 1 < g.ys.size(); ++j) {
            const int c = img[i][j];
            const bool in_dom = dom[i][j] > 0;
            if (c == 0 && !in_dom) continue;
            const double m = cell_mass_guarded(g.xs[i], g.xs[i + 1], g.ys[j], g.ys[j + 1]);
            if (in_dom) st.mass += m;
            st.image_total += c * m;
            if (in_dom && c == 0) st.uncovered += m;
            if (in_dom && c > 1) st.overlap += (c - 1) * m;
            if (!in_dom && c > 0) st.escaped += c * m;
        }
    return st;
}

void format_double(std::string& out, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

} // namespace

std::string kind_name(DomainKind k) {
    switch (k) {
    case DomainKind::matching: return "matching";
    case DomainKind::zero: return "zero";
    case DomainKind::accel: return "accel";
    case DomainKind::one: return "one";
    }
    return "matching";
}

DomainKind kind_from_name(const std::string& name) {
    if (name == "matching") return DomainKind::matching;
    if (name == "zero") return DomainKind::zero;
    if (name == "accel") return DomainKind::accel;
    if (name == "one") return DomainKind::one;
    throw std::invalid_argument("unknown domain kind: " + name);
}

double rect_mass(const Rect& r) {
    if (!(r.x1 <= r.x2) || !(r.y1 <= r.y2))
        throw InvalidRect("rect_mass: need x1 <= x2 and y1 <= y2");
    const double c11 = 1.0 + r.x1 * r.y1;
    const double c12 = 1.0 + r.x1 * r.y2;
    const double c21 = 1.0 + r.x2 * r.y1;
    const double c22 = 1.0 + r.x2 * r.y2;
    const double scale = 1.0 + std::max({std::abs(r.x1 * r.y1), std::abs(r.x1 * r.y2),
                                         std::abs(r.x2 * r.y1), std::abs(r.x2 * r.y2)});
    const double tol = 1e-12 * scale;
    if (c11 < -tol || c12 < -tol || c21 < -tol || c22 < -tol)
        throw InvalidRect("rect_mass: rectangle crosses the hyperbola xy = -1");
    if (std::abs(c12) <= tol || std::abs(c21) <= tol) return kInf;
    if (std::abs(c11) <= tol || std::abs(c22) <= tol)
        throw InvalidRect("rect_mass: rectangle touches xy = -1 from the wrong side");
    if (r.x1 == r.x2 || r.y1 == r.y2) return 0.0;
    return std::log(c11) + std::log(c22) - std::log(c12) - std::log(c21);
}

double domain_mass(const PlanarDomain& dom) {
    double total = 0.0;
    for (const Rect& r : dom.rects) {
        const double m = rect_mass(r);
        if (std::isinf(m)) return kInf;
        total += m;
    }
    return total;
}

Mat2 conjugate_by_R(const Mat2& mat) {
    const Mat2 R{0.0, -1.0, 1.0, 0.0};
    const Mat2 Rinv{0.0, 1.0, -1.0, 0.0};
    return R * mat * Rinv;
}

Rect push_rect(const Mat2& mat, const Rect& r) {
    const ExtReal xa = apply(mat, r.x1);
    const ExtReal xb = apply(mat, r.x2);
    const Mat2 conj = conjugate_by_R(mat);
    const ExtReal ya = apply(conj, r.y1);
    const ExtReal yb = apply(conj, r.y2);
    if (xa.infinite || xb.infinite || ya.infinite || yb.infinite)
        throw PoleError("push_rect: rectangle touches a pole of the branch");
    Rect out{std::min(xa.value, xb.value), std::max(xa.value, xb.value),
             std::min(ya.value, yb.value), std::max(ya.value, yb.value)};
    return out;
}

std::pair<double, double> planar_step(const MapParams& params, double x, double y) {
    const Mat2 M = branch_at(params, x);
    const ExtReal xp = apply(M, x);
    const ExtReal yp = apply(conjugate_by_R(M), y);
    if (xp.infinite || yp.infinite) throw SingularOrbit("planar_step: pole");
    return {xp.value, yp.value};
}

std::pair<double, double> accel_planar_step(const MapParams& params, double x, double y) {
    if (params.group.m != 2 || params.group.n <= 3)
        throw UnsupportedM("accel_planar_step: m = 2 and n > 3");
    const GroupParams& g = params.group;
    const MapParams mp0{g, 0.0};
    std::vector<WordFactor> wword = {{-2, 'A'}, {1, 'C'}};
    for (int i = 0; i < g.n - 3; ++i) {
        wword.push_back({-1, 'A'});
        wword.push_back({1, 'C'});
    }
    const Mat2 W = word_to_matrix(wword, g);
    const double eps0 = apply(W.inverse(), 0.0).value;
    if (x >= eps0) return planar_step(mp0, x, y);
    const double t = g.t;
    // parabolic power: W^j = I + j(W - I)
    auto w_apply = [&](double j, double v) {
        return ((1.0 + j * t * t) * v + j * t * t * t) / (-j * t * v + 1.0 - j * t * t);
    };
    // j minimal with W^j x > eps0; closed form via the conjugated translation
    double j = 1.0;
    {
        const double u = 1.0 / (x + t);
        const double u0 = 1.0 / (eps0 + t);
        j = std::ceil((u - u0) / t - 1e-12);
        if (j < 1.0) j = 1.0;
        while (w_apply(j, x) <= eps0) j += 1.0;
    }
    const Mat2 Wj{1.0 + j * t * t, j * t * t * t, -j * t, 1.0 - j * t * t};
    const ExtReal xp = apply(Wj, x);
    const ExtReal yp = apply(conjugate_by_R(Wj), y);
    if (xp.infinite || yp.infinite) throw SingularOrbit("accel_planar_step: pole");
    return {xp.value, yp.value};
}

PlanarDomain build_omega_matching(const MapParams& params, const MatchingInterval& mi) {
    if (params.group.m != 2)
        throw UnsupportedM("build_omega_matching: m = 2 construction");
    if (!(params.alpha >= mi.zeta - 1e-12 && params.alpha < mi.eta))
        throw OrbitOrderViolation("build_omega_matching: alpha outside the matching interval");
    const GroupParams& g = params.group;
    const double t = g.t;

    const std::vector<double> lorb = orbit_values(params, params.lo(), mi.sunder);
    const std::vector<double> rorb = orbit_values(params, params.hi(), mi.sbar);
    const MapParams at_zeta{g, mi.zeta};
    const MapParams at_eta{g, mi.eta};
    const std::vector<double> zorb = orbit_values(at_zeta, (mi.zeta - 1.0) * t, mi.sunder);
    const std::vector<double> eorb = orbit_values(at_eta, mi.eta * t, mi.sbar);

    for (double v : zorb)
        if (v >= -1e-13) throw OrbitOrderViolation("zeta orbit left the negative axis");
    for (double v : eorb)
        if (v <= 1e-13) throw OrbitOrderViolation("eta orbit left the positive axis");

    auto argsort = [](const std::vector<double>& v) {
        std::vector<size_t> idx(v.size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
        for (size_t i = 1; i < idx.size(); ++i)
            if (v[idx[i]] - v[idx[i - 1]] < 1e-12)
                throw OrbitOrderViolation("endpoint orbit has coincident points");
        return idx;
    };

    PlanarDomain dom;
    dom.m = 2;
    dom.n = g.n;
    dom.alpha = params.alpha;
    dom.kind = DomainKind::matching;

    // lower rectangles keyed by the right-orbit point closing each on the right
    {
        const std::vector<size_t> idx = argsort(rorb);
        if (rorb[idx.front()] <= params.lo() + 1e-13)
            throw OrbitOrderViolation("right orbit touched the left endpoint");
        double prev = params.lo();
        double prev_depth = -kInf;
        for (size_t b = 0; b < idx.size(); ++b) {
            const double x2 = rorb[idx[b]];
            const double depth = -eorb[static_cast<size_t>(mi.sbar) - idx[b]];
            if (depth <= prev_depth)
                throw OrbitOrderViolation("lower heights fail to increase");
            prev_depth = depth;
            dom.rects.push_back({prev, x2, depth, 0.0});
            prev = x2;
        }
    }
    // upper rectangles keyed by the left-orbit point opening each on the left
    {
        const std::vector<size_t> idx = argsort(lorb);
        if (lorb[idx.back()] >= params.hi() - 1e-13)
            throw OrbitOrderViolation("left orbit touched the right endpoint");
        double prev_h = -kInf;
        for (size_t a = 0; a < idx.size(); ++a) {
            const double x1 = lorb[idx[a]];
            const double x2 = (a + 1 < idx.size()) ? lorb[idx[a + 1]] : params.hi();
            const double h = -zorb[static_cast<size_t>(mi.sunder) - idx[a]];
            if (h <= prev_h) throw OrbitOrderViolation("upper heights fail to increase");
            prev_h = h;
            dom.rects.push_back({x1, x2, 0.0, h});
        }
    }
    for (const Rect& r : dom.rects)
        if (std::isinf(rect_mass(r)))
            throw OrbitOrderViolation("matching domain rectangle has infinite mass");
    return dom;
}

PlanarDomain build_omega_zero(const MapParams& params) {
    if (params.group.m != 2) throw UnsupportedM("build_omega_zero: m = 2 only");
    const GroupParams& g = params.group;
    const double t = g.t;
    PlanarDomain dom;
    dom.m = 2;
    dom.n = g.n;
    dom.alpha = 0.0;
    dom.kind = DomainKind::zero;
    dom.infinite_mass = true;
    if (g.n == 3) {
        dom.rects.push_back({-1.0, 0.0, 0.0, 1.0});
        return dom;
    }
    const MapParams mp0{g, 0.0};
    const std::vector<double> l = orbit_values(mp0, -t, g.n - 3);
    std::vector<double> y(static_cast<size_t>(g.n - 1), 0.0);
    y[1] = 1.0 / t;
    for (int i = 2; i <= g.n - 2; ++i) y[static_cast<size_t>(i)] = 1.0 / (t - y[static_cast<size_t>(i - 1)]);
    for (int i = 0; i <= g.n - 4; ++i)
        dom.rects.push_back({l[static_cast<size_t>(i)], l[static_cast<size_t>(i + 1)], 0.0,
                             y[static_cast<size_t>(i + 1)]});
    dom.rects.push_back({l[static_cast<size_t>(g.n - 3)], 0.0, 0.0, t});
    return dom;
}

PlanarDomain build_omega_accel(const MapParams& params) {
    if (params.group.m != 2 || params.group.n <= 3)
        throw UnsupportedM("build_omega_accel: m = 2 and n > 3");
    const GroupParams& g = params.group;
    const double t = g.t;
    std::vector<WordFactor> wword = {{-2, 'A'}, {1, 'C'}};
    for (int i = 0; i < g.n - 3; ++i) {
        wword.push_back({-1, 'A'});
        wword.push_back({1, 'C'});
    }
    const Mat2 W = word_to_matrix(wword, g);
    const Mat2 AinvC = Mat2::translation(-t) * generators(g).C;
    const double eps0 = apply(W.inverse(), 0.0).value;
    const double z1 = apply(conjugate_by_R(W), 0.0).value;

    std::vector<double> eps(static_cast<size_t>(g.n - 2), 0.0);
    eps[0] = eps0;
    for (int i = 1; i <= g.n - 3; ++i)
        eps[static_cast<size_t>(i)] = apply(AinvC, eps[static_cast<size_t>(i - 1)]).value;
    std::vector<double> y(static_cast<size_t>(g.n - 1), 0.0);
    y[1] = 1.0 / t;
    for (int i = 2; i <= g.n - 2; ++i) y[static_cast<size_t>(i)] = 1.0 / (t - y[static_cast<size_t>(i - 1)]);

    PlanarDomain dom;
    dom.m = 2;
    dom.n = g.n;
    dom.alpha = 0.0;
    dom.kind = DomainKind::accel;
    dom.rects.push_back({-t, eps0, 0.0, z1});
    for (int i = 0; i <= g.n - 4; ++i)
        dom.rects.push_back({eps[static_cast<size_t>(i)], eps[static_cast<size_t>(i + 1)], 0.0,
                             y[static_cast<size_t>(i + 1)]});
    dom.rects.push_back({eps[static_cast<size_t>(g.n - 3)], 0.0, 0.0, t});
    return dom;
}

std::vector<Rect> deletion_rects(const MapParams& params) {
    if (params.group.m != 2 || params.group.n <= 3)
        throw UnsupportedM("deletion_rects: m = 2 and n > 3");
    const GroupParams& g = params.group;
    const double t = g.t;
    std::vector<WordFactor> wword = {{-2, 'A'}, {1, 'C'}};
    for (int i = 0; i < g.n - 3; ++i) {
        wword.push_back({-1, 'A'});
        wword.push_back({1, 'C'});
    }
    const Mat2 W = word_to_matrix(wword, g);
    const double eps0 = apply(W.inverse(), 0.0).value;
    const double z1 = apply(conjugate_by_R(W), 0.0).value;
    const double y1 = 1.0 / t;
    const MapParams mp0{g, 0.0};

    std::vector<Rect> out;
    Rect d1{-t, eps0, z1, y1};
    Rect d2{-t, eps0, 0.0, z1};
    out.push_back(d1);
    for (int i = 1; i <= g.n - 3; ++i) {
        const Mat2 M1 = branch_at(mp0, 0.5 * (d1.x1 + d1.x2));
        d1 = push_rect(M1, d1);
        out.push_back(d1);
        const Mat2 M2 = branch_at(mp0, 0.5 * (d2.x1 + d2.x2));
        d2 = push_rect(M2, d2);
        out.push_back(d2);
    }
    return out;
}

PlanarDomain build_omega_one(const MapParams& params) {
    const GroupParams& g = params.group;
    const double t = g.t;
    PlanarDomain dom;
    dom.m = g.m;
    dom.n = g.n;
    dom.alpha = 1.0;
    dom.kind = DomainKind::one;
    dom.infinite_mass = true;
    if (g.m == 2) {
        const Mat2 AC = Mat2::translation(t) * generators(g).C;
        std::vector<double> s(static_cast<size_t>(g.n - 1), 0.0);
        s[0] = t;
        for (int i = 1; i <= g.n - 2; ++i) s[static_cast<size_t>(i)] = apply(AC, s[static_cast<size_t>(i - 1)]).value;
        if (std::abs(s[static_cast<size_t>(g.n - 2)]) > 1e-9)
            throw OrbitOrderViolation("build_omega_one: endpoint orbit misses zero");
        s[static_cast<size_t>(g.n - 2)] = 0.0;
        for (int i = 1; i <= g.n - 2; ++i)
            dom.rects.push_back({s[static_cast<size_t>(i)], s[static_cast<size_t>(i - 1)],
                                 -1.0 / s[static_cast<size_t>(i - 1)], 0.0});
        return dom;
    }
    if (g.m != 3) throw UnsupportedM("build_omega_one: m in {2, 3}");
    const Mat2 ACC = Mat2::translation(t) * mat_pow(generators(g).C, 2);
    std::vector<double> r(static_cast<size_t>(g.n - 1), 0.0);
    r[0] = t;
    for (int i = 1; i <= g.n - 2; ++i) r[static_cast<size_t>(i)] = apply(ACC, r[static_cast<size_t>(i - 1)]).value;
    if (std::abs(r[static_cast<size_t>(g.n - 2)] - 1.0) > 1e-9)
        throw OrbitOrderViolation("build_omega_one: endpoint orbit misses one");
    r[static_cast<size_t>(g.n - 2)] = 1.0;
    dom.rects.push_back({0.0, 1.0, -1.0, 0.0});
    for (int i = 1; i <= g.n - 2; ++i)
        dom.rects.push_back({r[static_cast<size_t>(i)], r[static_cast<size_t>(i - 1)],
                             -1.0 / r[static_cast<size_t>(i - 1)], 0.0});
    return dom;
}

BijectivityReport check_bijectivity(const PlanarDomain& dom, const MapParams& params,
                                    double rel_tol) {
    if (dom.infinite_mass)
        throw InvalidRect("check_bijectivity: needs a finite-mass domain");
    BlockSet blocks;
    if (dom.kind == DomainKind::accel) {
        const MapParams mp0{params.group, 0.0};
        blocks = accel_blocks(dom, mp0);
    } else {
        blocks = digit_blocks(dom, params);
    }
    const TileStats st = tile_stats(dom.rects, blocks.images);
    BijectivityReport rep;
    rep.mass = st.mass;
    rep.image_mass = st.image_total;
    rep.overlap_mass = st.overlap;
    rep.uncovered_mass = st.uncovered;
    rep.escaped_mass = st.escaped;
    const double tol = rel_tol * std::max(st.mass, 1e-12);
    rep.pass = blocks.ok && st.overlap < tol && st.uncovered < tol && st.escaped < tol;
    return rep;
}

PlanarDomain symmetry_S(const PlanarDomain& dom) {
    PlanarDomain out = dom;
    out.alpha = 1.0 - dom.alpha;
    if (dom.kind == DomainKind::zero) out.kind = DomainKind::one;
    else if (dom.kind == DomainKind::one) out.kind = DomainKind::zero;
    out.rects.clear();
    for (const Rect& r : dom.rects) out.rects.push_back({-r.x2, -r.x1, -r.y2, -r.y1});
    return out;
}

PlanarDomain shift_M1(const PlanarDomain& dom) {
    const Mat2 M1{1.0, 1.0, 0.0, 1.0};
    PlanarDomain out;
    out.m = 3;
    out.n = dom.n;
    out.alpha = 1.0;
    out.kind = DomainKind::one;
    out.infinite_mass = dom.infinite_mass;
    for (const Rect& r : dom.rects) out.rects.push_back(push_rect(M1, r));
    return out;
}

double arnoux_identity_check(const Mat2& mat, double x, double y) {
    if (std::abs(1.0 + x * y) < 1e-12) throw PoleError("arnoux: 1 + xy = 0");
    const double cxd = mat.c * x + mat.d;
    if (std::abs(cxd) < 1e-12) throw PoleError("arnoux: cx + d = 0");
    const double t0 = tau(mat, x);
    const Mat2 axy{x, x * y - 1.0, 1.0, y};
    const double e = std::exp(0.5 * t0);
    const Mat2 gt{e, 0.0, 0.0, 1.0 / e};
    const Mat2 lhs = mat * axy * gt;

    const double xp = (mat.a * x + mat.b) / cxd;
    const double yp = cxd * cxd * y - mat.c * cxd;
    const Mat2 rhs{xp, xp * yp - 1.0, 1.0, yp};

    auto normalize = [](const Mat2& m) -> Mat2 {
        double best = m.a;
        for (double v : {m.b, m.c, m.d})
            if (std::abs(v) > std::abs(best)) best = v;
        return {m.a / best, m.b / best, m.c / best, m.d / best};
    };
    const Mat2 u = normalize(lhs);
    const Mat2 v = normalize(rhs);
    double res = std::max({std::abs(u.a - v.a), std::abs(u.b - v.b), std::abs(u.c - v.c),
                           std::abs(u.d - v.d)});

    // hat-T must equal Z . T_M . Z^{-1}
    const double w = y / (1.0 - x * y); // Z^{-1}
    const ExtReal ty = apply(conjugate_by_R(mat), w);
    if (!ty.infinite) {
        const double zy = ty.value / (1.0 + xp * ty.value);
        res = std::max(res, std::abs(zy - yp) / std::max(1.0, std::abs(yp)));
    }
    return res;
}

int first_return_digit_bound(const MapParams& params) {
    const int d0 = digit(params, params.lo()).k;
    return std::min(-4, -2 + d0);
}

PlanarDomain first_return_region(const MapParams& params, const MatchingInterval& mi) {
    const PlanarDomain dom = build_omega_matching(params, mi);
    const int d = first_return_digit_bound(params);
    auto cyl = cylinder_bounds(params, d);
    if (!cyl) throw EmptyRegion("first_return_region: empty digit-bound cylinder");
    const double x_d = cyl->first;

    // images of the blocks over cylinders <= d (x in [x_d, 0))
    std::vector<Rect> images;
    const double t = params.group.t;
    int k = d;
    for (int count = 0; count < 200; ++count, --k) {
        auto c = cylinder_bounds(params, k);
        if (!c) break;
        const Mat2 M = Mat2::translation(k * t) * generators(params.group).C;
        for (const Rect& r : dom.rects) {
            const double a = std::max(c->first, r.x1);
            const double b = std::min(c->second, r.x2);
            if (b - a < 1e-13) continue;
            images.push_back(push_rect(M, {a, b, r.y1, r.y2}));
        }
    }
    {
        // tail closure below the last explicit cylinder
        double ya = 0.0, yb = 0.0;
        auto c = cylinder_bounds(params, k + 1);
        for (const Rect& r : dom.rects)
            if (r.x1 <= c->first + 1e-12 && r.x2 >= c->second - 1e-12) {
                ya = std::min(ya, r.y1);
                yb = std::max(yb, r.y2);
            }
        const double top = 1.0 / (static_cast<double>(-k) * t - yb);
        images.push_back({params.lo(), params.hi(), 0.0, top});
    }

    std::vector<Rect> window = {{x_d, 0.0, 0.0, params.group.t}};
    Grid grid = make_grid({&dom.rects, &images, &window});
    auto img = cover_counts(grid, images);
    auto cov = cover_counts(grid, dom.rects);

    PlanarDomain region;
    region.m = 2;
    region.n = params.group.n;
    region.alpha = params.alpha;
    region.kind = DomainKind::matching;
    for (size_t i = 0; i + 1 < grid.xs.size(); ++i) {
        if (grid.xs[i] < x_d - 1e-12 || grid.xs[i + 1] > 1e-12) continue;
        for (size_t j = 0; j + 1 < grid.ys.size(); ++j) {
            if (grid.ys[j] < -1e-12) continue;
            if (cov[i][j] > 0 && img[i][j] > 0)
                region.rects.push_back({grid.xs[i], grid.xs[i + 1], grid.ys[j], grid.ys[j + 1]});
        }
    }
    if (region.rects.empty() || domain_mass(region) <= 0.0)
        throw EmptyRegion("first_return_region: region has no mass");
    return region;
}

double symmetric_difference_mass(const PlanarDomain& a, const PlanarDomain& b) {
    Grid g = make_grid({&a.rects, &b.rects});
    auto ca = cover_counts(g, a.rects);
    auto cb = cover_counts(g, b.rects);
    double total = 0.0;
    for (size_t i = 0; i + 1 < g.xs.size(); ++i)
        for (size_t j = 0; j + 1 < g.ys.size(); ++j) {
            const bool ia = ca[i][j] > 0;
            const bool ib = cb[i][j] > 0;
            if (ia == ib) continue;
            total += cell_mass_guarded(g.xs[i], g.xs[i + 1], g.ys[j], g.ys[j + 1]);
        }
    return total;
}

PlanarDomain half_domain(const PlanarDomain& dom, int side) {
    PlanarDomain out = dom;
    out.rects.clear();
    for (const Rect& r : dom.rects) {
        if (side > 0 && r.y1 >= -1e-12) out.rects.push_back(r);
        if (side < 0 && r.y2 <= 1e-12) out.rects.push_back(r);
    }
    return out;
}

std::string domain_to_json(const PlanarDomain& dom) {
    std::string out = "{\n";
    out += "  \"m\": " + std::to_string(dom.m) + ",\n";
    out += "  \"n\": " + std::to_string(dom.n) + ",\n";
    out += "  \"alpha\": ";
    format_double(out, dom.alpha);
    out += ",\n  \"kind\": \"" + kind_name(dom.kind) + "\",\n";
    out += "  \"rects\": [\n";
    for (size_t i = 0; i < dom.rects.size(); ++i) {
        const Rect& r = dom.rects[i];
        out += "    {\"x1\": ";
        format_double(out, r.x1);
        out += ", \"x2\": ";
        format_double(out, r.x2);
        out += ", \"y1\": ";
        format_double(out, r.y1);
        out += ", \"y2\": ";
        format_double(out, r.y2);
        out += "}";
        if (i + 1 < dom.rects.size()) out += ",";
        out += "\n";
    }
    out += "  ],\n  \"mass\": ";
    const double mass = domain_mass(dom);
    if (std::isinf(mass)) {
        out += "\"inf\"";
    } else {
        format_double(out, mass);
    }
    out += "\n}\n";
    return out;
}

PlanarDomain domain_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    PlanarDomain dom;
    dom.m = j.at("m").get<int>();
    dom.n = j.at("n").get<int>();
    dom.alpha = j.at("alpha").get<double>();
    dom.kind = kind_from_name(j.at("kind").get<std::string>());
    for (const auto& jr : j.at("rects"))
        dom.rects.push_back({jr.at("x1").get<double>(), jr.at("x2").get<double>(),
                             jr.at("y1").get<double>(), jr.at("y2").get<double>()});
    if (j.at("mass").is_string()) dom.infinite_mass = true;
    return dom;
}

} // namespace tricf
