#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "tricf/entropy.hpp"
#include "tricf/intervalmap.hpp"

using namespace tricf;

TEST_CASE("digits and images at pinned points") {
    {
        MapParams mp = MapParams::make(2, 3, 0.2);
        StepResult s = digit_step(mp, 0.19);
        CHECK(s.digit.k == 5);
        CHECK(s.digit.l == 1);
        CHECK(s.image == doctest::Approx(5.0 - 1.0 / 0.19).epsilon(1e-12)); // -0.2631578...
    }
    {
        MapParams mp = MapParams::make(2, 3, 0.2);
        StepResult s = digit_step(mp, 0.2);
        CHECK(s.digit.k == 5);
        CHECK(std::abs(s.image) < 1e-12);
    }
    {
        MapParams mp = MapParams::make(3, 3, 1.0);
        StepResult s = digit_step(mp, 1.9);
        CHECK(s.digit.k == 1);
        CHECK(s.digit.l == 2);
        CHECK(s.image == doctest::Approx(8.0 / 9.0));
    }
    CHECK_THROWS_AS(digit(MapParams::make(2, 4, 0.5), 0.0), SingularOrbit);
}

TEST_CASE("symmetry T_{2,n,1-a}(-x) = -T_{2,n,a}(x)") {
    SplitMix rng(11);
    int checked = 0;
    while (checked < 10000) {
        const int n = 3 + static_cast<int>(rng.next() % 10);
        const double alpha = 0.05 + 0.9 * rng.uniform01();
        MapParams mp = MapParams::make(2, n, alpha);
        MapParams mirror = MapParams::make(2, n, 1.0 - alpha);
        const double x = mp.lo() + mp.group.t * rng.uniform01();
        if (std::abs(x) < 1e-6) continue;
        double tx, tmx;
        try {
            tx = step(mp, x);
            tmx = step(mirror, -x);
        } catch (const SingularOrbit&) {
            continue;
        }
        if (std::abs(tx - mp.lo()) < 1e-9) continue; // boundary case excluded
        CHECK(std::abs(tmx + tx) < 1e-10);
        ++checked;
    }
}

TEST_CASE("orbit structure at the worked parameters") {
    {
        MapParams mp = MapParams::make(2, 3, 0.2);
        Orbit o = orbit(mp, 0.2, 3);
        REQUIRE(o.points.size() >= 2);
        CHECK(o.points[0].digit.k == 5);
        CHECK(std::abs(o.points[1].x) < 1e-12);
        CHECK(o.truncated); // orbit terminates at the pole x = 0
    }
    {
        MapParams mp = MapParams::make(2, 3, 0.2);
        Orbit o = orbit(mp, -0.8, 4);
        REQUIRE(o.points.size() == 5);
        const double expect[5] = {-0.8, -0.75, -2.0 / 3.0, -0.5, 0.0};
        for (int i = 0; i < 5; ++i) CHECK(o.points[i].x == doctest::Approx(expect[i]).epsilon(1e-12));
        for (int i = 0; i < 4; ++i) CHECK(o.points[i].digit.k == -2);
    }
    {
        // alpha = 0, n = 3: x = -1 is fixed
        MapParams mp = MapParams::make(2, 3, 0.0);
        CHECK(step(mp, -1.0) == doctest::Approx(-1.0));
        // orbit of -t is periodic with period n-2
        for (int n : {4, 5, 7, 8}) {
            MapParams m0 = MapParams::make(2, n, 0.0);
            double x = -m0.group.t;
            for (int i = 0; i < n - 2; ++i) x = step(m0, x);
            CHECK(x == doctest::Approx(-m0.group.t).epsilon(1e-9));
        }
    }
    {
        // (2,5,1): s_i = (AC)^i . t gives 1, g, 0
        MapParams mp = MapParams::make(2, 5, 1.0);
        const double g = 0.6180339887498949;
        double x = mp.group.t;
        x = step(mp, x);
        CHECK(x == doctest::Approx(1.0).epsilon(1e-12));
        x = step(mp, x);
        CHECK(x == doctest::Approx(g).epsilon(1e-12));
        x = step(mp, x);
        CHECK(std::abs(x) < 1e-12);
    }
    {
        MapParams mp = MapParams::make(2, 4, 0.3);
        Orbit o = orbit(mp, 0.37, 0);
        CHECK(o.points.size() == 1);
        CHECK(o.points[0].x == 0.37);
    }
    {
        // m = 3, alpha = 1: the orbit of t reaches 1 after n-2 steps
        for (int n : {3, 4, 5}) {
            MapParams mp = MapParams::make(3, n, 1.0);
            double x = mp.group.t;
            for (int i = 0; i < n - 2; ++i) x = step(mp, x);
            CHECK(x == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("log derivative against finite differences") {
    // m = 2: -2 ln|x| exactly
    SplitMix rng(321);
    for (int i = 0; i < 200; ++i) {
        const int n = 3 + static_cast<int>(rng.next() % 8);
        const double alpha = 0.1 + 0.8 * rng.uniform01();
        MapParams mp = MapParams::make(2, n, alpha);
        const double x = mp.lo() + mp.group.t * rng.uniform01();
        if (std::abs(x) < 1e-3) continue;
        CHECK(log_deriv(mp, x) == doctest::Approx(-2.0 * std::log(std::abs(x))).epsilon(1e-12));
    }
    {
        MapParams mp = MapParams::make(3, 5, 1.0);
        CHECK(log_deriv(mp, 1.5) == doctest::Approx(-2.0 * std::log(0.5)));
    }
    // finite-difference oracle
    int done = 0;
    while (done < 1000) {
        const int m = (rng.next() % 2 == 0) ? 2 : 3;
        const int n = 3 + static_cast<int>(rng.next() % 6);
        const double alpha = 0.1 + 0.8 * rng.uniform01();
        MapParams mp = MapParams::make(m, n, alpha);
        const double x = mp.lo() + mp.group.t * rng.uniform01();
        const double h = 1e-7;
        try {
            const Digit d0 = digit(mp, x - h);
            const Digit d1 = digit(mp, x + h);
            if (d0.k != d1.k || d0.l != d1.l) continue; // straddles a cylinder boundary
            const double fd = std::log(std::abs((step(mp, x + h) - step(mp, x - h)) / (2 * h)));
            CHECK(std::abs(log_deriv(mp, x) - fd) < 1e-5);
            ++done;
        } catch (const SingularOrbit&) {
            continue;
        }
    }
}

TEST_CASE("expansive index and power") {
    {
        MapParams mp = MapParams::make(2, 4, 0.4);
        SplitMix rng(9);
        for (int i = 0; i < 100; ++i) {
            const double x = -0.9 + 1.8 * rng.uniform01();
            if (std::abs(x) >= 1.0 || std::abs(x) < 1e-4) continue;
            if (x < mp.lo() || x >= mp.hi()) continue;
            auto l = expansive_index(mp, x);
            REQUIRE(l.has_value());
            CHECK(*l == 1); // |x| < 1 gives -2 ln|x| > 0 at once
        }
    }
    {
        MapParams mp = MapParams::make(3, 3, 1.0);
        auto l = expansive_index(mp, 1.5);
        REQUIRE(l.has_value());
        CHECK(*l == 1);
        CHECK(first_expansive_power(mp, 1.5) == doctest::Approx(step(mp, 1.5)));
    }
    // partition property: T(E_k) subset of E_1 ... E_{k-1}
    {
        MapParams mp = MapParams::make(3, 5, 0.7);
        SplitMix rng(100);
        int checked = 0;
        while (checked < 10000) {
            const double x = mp.lo() + mp.group.t * rng.uniform01();
            std::optional<int> lx, ltx;
            double tx;
            try {
                lx = expansive_index(mp, x);
                tx = step(mp, x);
                ltx = expansive_index(mp, tx);
            } catch (const SingularOrbit&) {
                continue;
            }
            if (!lx || !ltx) continue;
            if (*lx >= 2) CHECK(*ltx <= *lx - 1);
            // U maps I into I
            double u = first_expansive_power(mp, x);
            CHECK(u >= mp.lo() - 1e-12);
            CHECK(u < mp.hi() + 1e-12);
            ++checked;
        }
    }
}

TEST_CASE("cylinders against a brute-force scan") {
    CHECK_THROWS_AS(cylinder_bounds(MapParams::make(3, 4, 0.5), 2), UnsupportedM);

    auto scan = [](const MapParams& mp, int k) -> std::pair<double, double> {
        double lo = 1e300, hi = -1e300;
        const int grid = 2000000;
        for (int i = 0; i < grid; ++i) {
            const double x = mp.lo() + (i + 0.5) * mp.group.t / grid;
            try {
                if (digit(mp, x).k == k) {
                    lo = std::min(lo, x);
                    hi = std::max(hi, x);
                }
            } catch (const SingularOrbit&) {
            }
        }
        return {lo, hi};
    };

    for (auto [n, alpha, k] : std::vector<std::tuple<int, double, int>>{
             {3, 0.0, -2}, {3, 0.0, -3}, {3, 0.2, 5}, {3, 0.2, -2}, {5, 0.4, 1}, {5, 0.4, -1}}) {
        MapParams mp = MapParams::make(2, n, alpha);
        auto cb = cylinder_bounds(mp, k);
        REQUIRE(cb.has_value());
        auto [slo, shi] = scan(mp, k);
        const double cell = mp.group.t / 2000000;
        CHECK(std::abs(cb->first - slo) < 2 * cell);
        CHECK(std::abs(cb->second - shi) < 2 * cell);
    }

    // (2,3,0): digit -2 on [-1, -1/2), digit -3 on [-1/2, -1/3)
    MapParams m0 = MapParams::make(2, 3, 0.0);
    auto c2 = cylinder_bounds(m0, -2);
    REQUIRE(c2.has_value());
    CHECK(c2->first == doctest::Approx(-1.0));
    CHECK(c2->second == doctest::Approx(-0.5));
    auto c3 = cylinder_bounds(m0, -3);
    REQUIRE(c3.has_value());
    CHECK(c3->first == doctest::Approx(-0.5));
    CHECK(c3->second == doctest::Approx(-1.0 / 3.0));

    // (2,3,1/5): cylinder of digit 5 has right endpoint r0 = 0.2
    MapParams m15 = MapParams::make(2, 3, 0.2);
    auto c5 = cylinder_bounds(m15, 5);
    REQUIRE(c5.has_value());
    CHECK(c5->second == doctest::Approx(0.2));
    CHECK(c5->first <= 0.2);
    CHECK(0.2 - c5->first > 0.01);

    CHECK_FALSE(cylinder_bounds(m15, 0).has_value());
    // far tail: tiny or empty near zero
    auto far = cylinder_bounds(m15, 4000000);
    if (far) CHECK(far->second - far->first < 1e-12);
}

TEST_CASE("cylinder partition covers the interval") {
    for (auto [n, alpha] : std::vector<std::pair<int, double>>{{3, 0.2}, {4, 0.5}, {5, 0.35}}) {
        MapParams mp = MapParams::make(2, n, alpha);
        // adjacency of consecutive cylinders on each side
        for (int k = -40; k <= 40; ++k) {
            auto a = cylinder_bounds(mp, k);
            auto b = cylinder_bounds(mp, k + 1);
            if (!a || !b) continue;
            CHECK(b->second == doctest::Approx(a->first).epsilon(1e-12));
        }
        // uncovered gap around zero beyond |k| = 4e6 is below 1e-6
        const int big = 4000000;
        double gap_lo = 0.0, gap_hi = 0.0;
        for (int k = -big;; --k) {
            auto c = cylinder_bounds(mp, k);
            if (!c) break;
            gap_lo = c->second;
            break;
        }
        for (int k = big;; ++k) {
            auto c = cylinder_bounds(mp, k);
            if (!c) break;
            gap_hi = c->first;
            break;
        }
        CHECK(gap_hi - gap_lo < 1e-6);
    }
}

TEST_CASE("branch consistency: step equals the branch matrix action") {
    SplitMix rng(55);
    int checked = 0;
    while (checked < 2000) {
        const int m = (rng.next() % 2 == 0) ? 2 : 3;
        const int n = 3 + static_cast<int>(rng.next() % 8);
        const double alpha = 0.05 + 0.9 * rng.uniform01();
        MapParams mp = MapParams::make(m, n, alpha);
        const double x = mp.lo() + mp.group.t * rng.uniform01();
        if (std::abs(x) < 0.05 || (m == 3 && std::abs(x - 1.0) < 0.05)) continue;
        try {
            const Mat2 b = branch_matrix(mp, x);
            const ExtReal y = apply(b, x);
            REQUIRE_FALSE(y.infinite);
            CHECK(std::abs(y.value - step(mp, x)) < 1e-12);
            ++checked;
        } catch (const SingularOrbit&) {
            continue;
        }
    }
}
