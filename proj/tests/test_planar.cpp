#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "tricf/entropy.hpp"
#include "tricf/planar.hpp"

using namespace tricf;

namespace {

// independent 2-D oracle: tensor Simpson refinement on dx dy/(1+xy)^2
double mass_quadrature(const Rect& r, int cells = 400) {
    auto density = [](double x, double y) {
        const double d = 1.0 + x * y;
        return 1.0 / (d * d);
    };
    double total = 0.0;
    const double hx = (r.x2 - r.x1) / cells;
    const double hy = (r.y2 - r.y1) / cells;
    for (int i = 0; i < cells; ++i)
        for (int j = 0; j < cells; ++j) {
            const double x0 = r.x1 + i * hx, x1 = x0 + hx;
            const double y0 = r.y1 + j * hy, y1 = y0 + hy;
            const double xm = 0.5 * (x0 + x1), ym = 0.5 * (y0 + y1);
            // 2-D Simpson on the cell
            const double s =
                (density(x0, y0) + density(x1, y0) + density(x0, y1) + density(x1, y1)) +
                4.0 * (density(xm, y0) + density(xm, y1) + density(x0, ym) + density(x1, ym)) +
                16.0 * density(xm, ym);
            total += s * hx * hy / 36.0;
        }
    return total;
}

MatchingInterval locate_or_fail(double alpha, const GroupParams& g) {
    auto mi = locate_matching(alpha, g);
    REQUIRE(mi.has_value());
    return *mi;
}

} // namespace

TEST_CASE("rectangle mass closed form") {
    CHECK(rect_mass({0, 1, 0, 1}) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(std::isinf(rect_mass({0, 1, -1, 0})));
    CHECK(rect_mass({0.3, 0.3, -1, 1}) == 0.0);
    CHECK_THROWS_AS(rect_mass({0.5, 2.5, -1.5, -0.5}), InvalidRect);

    SplitMix rng(31);
    for (int i = 0; i < 100; ++i) {
        Rect r;
        r.x1 = 2.0 * rng.uniform01() - 1.0;
        r.x2 = r.x1 + rng.uniform01();
        r.y1 = 2.0 * rng.uniform01() - 1.0;
        r.y2 = r.y1 + rng.uniform01();
        double worst = std::min({1 + r.x1 * r.y1, 1 + r.x1 * r.y2, 1 + r.x2 * r.y1,
                                 1 + r.x2 * r.y2});
        if (worst < 0.05) continue;
        const double closed = rect_mass(r);
        const double quad = mass_quadrature(r);
        CHECK(std::abs(closed - quad) < 1e-9 * std::max(1.0, std::abs(closed)));
    }
}

TEST_CASE("planar step") {
    // negation identity
    SplitMix rng(7);
    int checked = 0;
    while (checked < 2000) {
        const int n = 3 + static_cast<int>(rng.next() % 8);
        const double alpha = 0.05 + 0.9 * rng.uniform01();
        MapParams mp = MapParams::make(2, n, alpha);
        MapParams mirror = MapParams::make(2, n, 1.0 - alpha);
        const double x = mp.lo() + mp.group.t * rng.uniform01();
        const double y = 2.0 * rng.uniform01() - 1.0;
        try {
            auto [tx, ty] = planar_step(mp, x, y);
            if (std::abs(tx - mp.lo()) < 1e-9) continue;
            auto [sx, sy] = planar_step(mirror, -x, -y);
            CHECK(std::abs(sx + tx) < 1e-9);
            CHECK(std::abs(sy + ty) < 1e-9);
            ++checked;
        } catch (const SingularOrbit&) {
            continue;
        }
    }

    // measure invariance: |J| * density ratio = 1
    checked = 0;
    while (checked < 500) {
        MapParams mp = MapParams::make(2, 5, 0.4);
        const double x = mp.lo() + mp.group.t * rng.uniform01();
        const double y = rng.uniform01();
        const double h = 1e-7;
        try {
            const Digit d0 = digit(mp, x - h);
            const Digit d1 = digit(mp, x + h);
            if (d0.k != d1.k) continue;
            auto [tx, ty] = planar_step(mp, x, y);
            auto [txh, tyh] = planar_step(mp, x + h, y);
            auto [txv, tyv] = planar_step(mp, x, y + h);
            const double jac =
                std::abs((txh - tx) / h * (tyv - ty) / h - (tyh - ty) / h * (txv - tx) / h);
            const double dens0 = 1.0 / ((1 + x * y) * (1 + x * y));
            const double dens1 = 1.0 / ((1 + tx * ty) * (1 + tx * ty));
            CHECK(jac * dens1 / dens0 == doctest::Approx(1.0).epsilon(1e-3));
            ++checked;
        } catch (const SingularOrbit&) {
            continue;
        }
    }
}

TEST_CASE("worked domain Omega_{2,3,1/5}") {
    const GroupParams g = GroupParams::make(2, 3);
    MatchingInterval mi = locate_or_fail(0.2, g);
    CHECK(mi.zeta == doctest::Approx(3.0 - 2.0 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(mi.eta == doctest::Approx((std::sqrt(2.0) - 1.0) / 2.0).epsilon(1e-12));

    MapParams mp{g, 0.2};
    PlanarDomain dom = build_omega_matching(mp, mi);
    REQUIRE(dom.rects.size() == 7);

    const double upper[5] = {0.4530818, 0.6464466, 0.7387961, 0.7928932, 0.8284271};
    const double lower[2] = {-0.2071068, -0.1715729};
    int ui = 0, li = 0;
    for (const Rect& r : dom.rects) {
        if (r.y1 == 0.0) {
            REQUIRE(ui < 5);
            CHECK(r.y2 == doctest::Approx(upper[ui]).epsilon(1e-6));
            ++ui;
        } else {
            REQUIRE(li < 2);
            CHECK(r.y1 == doctest::Approx(lower[li]).epsilon(1e-6));
            ++li;
        }
    }
    CHECK(ui == 5);
    CHECK(li == 2);

    // x-breakpoints include l0 = -0.8 and r0 = 0.2
    bool has_l0 = false, has_r0 = false;
    for (const Rect& r : dom.rects) {
        if (std::abs(r.x1 + 0.8) < 1e-12) has_l0 = true;
        if (std::abs(r.x2 - 0.2) < 1e-12) has_r0 = true;
    }
    CHECK(has_l0);
    CHECK(has_r0);

    // the block over the digit-5 cylinder maps onto the bottom strip
    auto c5 = cylinder_bounds(mp, 5);
    REQUIRE(c5.has_value());
    const Mat2 b = branch_matrix(mp, 0.5 * (c5->first + c5->second));
    const Rect img = push_rect(b, {c5->first, c5->second, -0.1715729, 0.8284271});
    CHECK(img.x1 == doctest::Approx(-0.8).epsilon(1e-6));
    CHECK(img.x2 == doctest::Approx(0.0).epsilon(1e-5));
    CHECK(img.y1 == doctest::Approx(-0.2071068).epsilon(1e-6));
    CHECK(img.y2 == doctest::Approx(-0.1715729).epsilon(1e-6));
}

TEST_CASE("alpha = 0 domains") {
    {
        PlanarDomain d = build_omega_zero(MapParams::make(2, 3, 0.0));
        REQUIRE(d.rects.size() == 1);
        CHECK(d.rects[0].x1 == doctest::Approx(-1.0));
        CHECK(d.rects[0].y2 == doctest::Approx(1.0));
        CHECK(std::isinf(domain_mass(d)));
    }
    {
        PlanarDomain d = build_omega_zero(MapParams::make(2, 5, 0.0));
        const double t = GroupParams::make(2, 5).t;
        // vertices (-t, 0), (-1, 1), (0, t)
        CHECK(d.rects.front().x1 == doctest::Approx(-t).epsilon(1e-12));
        CHECK(d.rects.back().y2 == doctest::Approx(t).epsilon(1e-12));
        bool corner_11 = false;
        for (const Rect& r : d.rects)
            if (std::abs(r.x1 + 1.0) < 1e-9 && std::abs(r.y2 - 1.0) < 1e-9) corner_11 = true;
        CHECK(corner_11);
        CHECK(std::isinf(domain_mass(d)));
    }
}

TEST_CASE("accelerated domain") {
    MapParams mp = MapParams::make(2, 5, 0.0);
    PlanarDomain acc = build_omega_accel(mp);
    const double t = mp.group.t;
    CHECK(acc.rects.front().x2 == doctest::Approx(-t * t * t / (1 + t * t)).epsilon(1e-12));
    CHECK(acc.rects.front().x2 == doctest::Approx(-1.17082039).epsilon(1e-7));
    CHECK(acc.rects.front().y2 == doctest::Approx(t / (1 + t * t)).epsilon(1e-12));
    CHECK(acc.rects.front().y2 == doctest::Approx(0.4472136).epsilon(1e-6));
    CHECK(std::isfinite(domain_mass(acc)));

    // accel = zero minus the deletion rectangles
    PlanarDomain zero = build_omega_zero(mp);
    PlanarDomain with_del = acc;
    for (const Rect& r : deletion_rects(mp)) with_del.rects.push_back(r);
    CHECK(symmetric_difference_mass(with_del, zero) < 1e-8);

    CHECK_THROWS_AS(build_omega_accel(MapParams::make(2, 3, 0.0)), UnsupportedM);
}

TEST_CASE("alpha = 1 domains") {
    {
        PlanarDomain d = build_omega_one(MapParams::make(2, 3, 1.0));
        REQUIRE(d.rects.size() == 1);
        CHECK(d.rects[0].x2 == doctest::Approx(1.0));
        CHECK(d.rects[0].y1 == doctest::Approx(-1.0));
    }
    {
        PlanarDomain d = build_omega_one(MapParams::make(2, 5, 1.0));
        const double G = 1.6180339887498949, gg = 0.6180339887498949;
        REQUIRE(d.rects.size() == 3);
        bool vG = false, v11 = false, vgG = false;
        for (const Rect& r : d.rects) {
            if (std::abs(r.x2 - G) < 1e-9 && std::abs(r.y1 + gg) < 1e-9) vG = true;
            if (std::abs(r.x2 - 1.0) < 1e-9 && std::abs(r.y1 + 1.0) < 1e-9) v11 = true;
            if (std::abs(r.x2 - gg) < 1e-9 && std::abs(r.y1 + G) < 1e-9) vgG = true;
        }
        CHECK(vG);
        CHECK(v11);
        CHECK(vgG);
    }
    {
        PlanarDomain d = build_omega_one(MapParams::make(3, 3, 1.0));
        REQUIRE(d.rects.size() == 2);
        CHECK(d.rects[0].x2 == doctest::Approx(1.0));
        CHECK(d.rects[1].x1 == doctest::Approx(1.0));
        CHECK(d.rects[1].x2 == doctest::Approx(2.0));
        CHECK(d.rects[1].y1 == doctest::Approx(-0.5));
    }
}

TEST_CASE("bijectivity verification") {
    {
        const GroupParams g = GroupParams::make(2, 3);
        MapParams mp{g, 0.2};
        PlanarDomain dom = build_omega_matching(mp, locate_or_fail(0.2, g));
        auto rep = check_bijectivity(dom, mp);
        CHECK(rep.pass);
        CHECK(rep.overlap_mass < 1e-8 * rep.mass);
        CHECK(rep.uncovered_mass < 1e-8 * rep.mass);
    }
    {
        const GroupParams g = GroupParams::make(2, 4);
        MapParams mp{g, 0.5};
        PlanarDomain dom = build_omega_matching(mp, locate_or_fail(0.5, g));
        CHECK(check_bijectivity(dom, mp).pass);

        // negative control: one height nudged by 0.01
        PlanarDomain bad = dom;
        bad.rects.back().y2 += 0.01;
        auto rep = check_bijectivity(bad, mp);
        CHECK_FALSE(rep.pass);
        CHECK(rep.uncovered_mass + rep.overlap_mass + rep.escaped_mass > 1e-4);
    }
    {
        MapParams mp = MapParams::make(2, 5, 0.0);
        CHECK(check_bijectivity(build_omega_accel(mp), mp).pass);
    }
}

TEST_CASE("symmetry S") {
    {
        PlanarDomain z = build_omega_zero(MapParams::make(2, 3, 0.0));
        PlanarDomain o = build_omega_one(MapParams::make(2, 3, 1.0));
        CHECK(symmetric_difference_mass(symmetry_S(z), o) < 1e-12);
        // involution
        CHECK(symmetric_difference_mass(symmetry_S(symmetry_S(z)), z) < 1e-12);
    }
    {
        const GroupParams g = GroupParams::make(2, 4);
        PlanarDomain a = build_omega_matching(MapParams{g, 0.3}, locate_or_fail(0.3, g));
        PlanarDomain b = build_omega_matching(MapParams{g, 0.7}, locate_or_fail(0.7, g));
        CHECK(symmetric_difference_mass(symmetry_S(a), b) < 1e-9);
        CHECK(domain_mass(a) == doctest::Approx(domain_mass(b)).epsilon(1e-12));
    }
}

TEST_CASE("shift M1 onto the m = 3 domain") {
    const Mat2 m1{1.0, 1.0, 0.0, 1.0};
    for (int n : {3, 4, 5}) {
        const double t2 = GroupParams::make(2, n).t;
        const double t3 = GroupParams::make(3, n).t;
        const Rect probe{t2 - 1e-3, t2, -1.0 / t2, -1.0 / t2 + 1e-3};
        const Rect img = push_rect(m1, probe);
        CHECK(img.x2 == doctest::Approx(t3).epsilon(1e-12));
        CHECK(img.y1 == doctest::Approx(-1.0 / t3).epsilon(1e-9));

        PlanarDomain o2 = build_omega_one(MapParams::make(2, n, 1.0));
        PlanarDomain o3 = build_omega_one(MapParams::make(3, n, 1.0));
        PlanarDomain shifted = shift_M1(o2);
        shifted.rects.push_back({0.0, 1.0, -1.0, 0.0});
        CHECK(symmetric_difference_mass(shifted, o3) < 1e-8);
    }
}

TEST_CASE("arnoux identity") {
    const GroupParams g = GroupParams::make(2, 5);
    SplitMix rng(4242);
    double worst = 0.0;
    int checked = 0;
    while (checked < 10000) {
        std::vector<WordFactor> w;
        const int len = 1 + static_cast<int>(rng.next() % 4);
        for (int i = 0; i < len; ++i) {
            w.push_back({static_cast<int>(rng.next() % 7) - 3, 'A'});
            w.push_back({1, 'C'});
        }
        const Mat2 m = word_to_matrix(w, g);
        const double x = 4.0 * rng.uniform01() - 2.0;
        const double y = 4.0 * rng.uniform01() - 2.0;
        try {
            worst = std::max(worst, arnoux_identity_check(m, x, y));
            ++checked;
        } catch (const PoleError&) {
            continue;
        }
    }
    CHECK(worst < 1e-9);
    CHECK(arnoux_identity_check(Mat2::identity(), 0.3, 0.4) < 1e-14);

    // Z o Z^{-1} = id
    for (int i = 0; i < 100; ++i) {
        const double x = 2.0 * rng.uniform01() - 1.0;
        const double y = 2.0 * rng.uniform01() - 1.0;
        if (std::abs(1.0 - x * y) < 0.05 || std::abs(1.0 + x * y) < 0.05) continue;
        const double w = y / (1.0 - x * y);
        const double back = w / (1.0 + x * w);
        CHECK(back == doctest::Approx(y).epsilon(1e-12));
    }
}

TEST_CASE("first return region") {
    for (int n : {3, 5}) {
        const GroupParams g = GroupParams::make(2, n);
        for (int k = (n == 3) ? 2 : 1; k <= 3; ++k) {
            for (const Word& w : enumerate_tree(1, k, n, 2)) {
                MatchingInterval mi;
                try {
                    mi = resolve_interval(k, w, g);
                } catch (const std::runtime_error&) {
                    continue;
                }
                MapParams mp{g, 0.5 * (mi.zeta + mi.eta)};
                PlanarDomain region = first_return_region(mp, mi);
                CHECK(domain_mass(region) > 0.0);
            }
        }
    }
}

TEST_CASE("mass monotonicity across matching intervals (n = 5)") {
    const GroupParams g = GroupParams::make(2, 5);
    auto sample_masses = [&](const MatchingInterval& mi) {
        std::vector<double> ms;
        for (double f : {0.2, 0.4, 0.6, 0.8}) {
            MapParams mp{g, mi.zeta + f * (mi.eta - mi.zeta)};
            ms.push_back(domain_mass(build_omega_matching(mp, mi)));
        }
        return ms;
    };
    {
        MatchingInterval left = locate_or_fail(0.2, g); // k = 2, left of the middle
        REQUIRE(left.k == 2);
        auto ms = sample_masses(left);
        for (size_t i = 1; i < ms.size(); ++i) CHECK(ms[i] < ms[i - 1] - 1e-9);

        // mirrored interval on the right increases
        MatchingInterval right = locate_or_fail(0.8, g);
        auto mr = sample_masses(right);
        for (size_t i = 1; i < mr.size(); ++i) CHECK(mr[i] > mr[i - 1] + 1e-9);

        // the middle is flat
        MatchingInterval mid = locate_or_fail(0.5, g);
        auto mm = sample_masses(mid);
        for (size_t i = 1; i < mm.size(); ++i) CHECK(std::abs(mm[i] - mm[0]) < 1e-9);
    }
    {
        // mass-change rate: mu(O_a') - mu(O_a) = (sbar - sunder) mu(D)
        MatchingInterval mi = locate_or_fail(0.2, g);
        const double a = mi.zeta + 0.3 * (mi.eta - mi.zeta);
        const double ap = mi.zeta + 0.6 * (mi.eta - mi.zeta);
        MapParams mpa{g, a}, mpb{g, ap};
        PlanarDomain da = build_omega_matching(mpa, mi);
        PlanarDomain db = build_omega_matching(mpb, mi);
        // D spans the full left-edge fiber
        double ytop = 0.0, ybot = 0.0;
        for (const Rect& r : da.rects)
            if (std::abs(r.x1 - mpa.lo()) < 1e-12) {
                ytop = std::max(ytop, r.y2);
                ybot = std::min(ybot, r.y1);
            }
        const Rect dd{mpa.lo(), mpb.lo(), ybot, ytop};
        const double delta = domain_mass(db) - domain_mass(da);
        CHECK(delta ==
              doctest::Approx((mi.sbar - mi.sunder) * rect_mass(dd)).epsilon(1e-8));
    }
}

TEST_CASE("domain json round trip") {
    const GroupParams g = GroupParams::make(2, 3);
    MapParams mp{g, 0.2};
    PlanarDomain dom = build_omega_matching(mp, locate_or_fail(0.2, g));
    const std::string text = domain_to_json(dom);
    PlanarDomain back = domain_from_json(text);
    REQUIRE(back.rects.size() == dom.rects.size());
    for (size_t i = 0; i < dom.rects.size(); ++i) {
        CHECK(back.rects[i].x1 == dom.rects[i].x1);
        CHECK(back.rects[i].x2 == dom.rects[i].x2);
        CHECK(back.rects[i].y1 == dom.rects[i].y1);
        CHECK(back.rects[i].y2 == dom.rects[i].y2);
    }
    CHECK(back.kind == dom.kind);
    CHECK(domain_mass(back) == domain_mass(dom));
    CHECK(domain_to_json(back) == text);
}
