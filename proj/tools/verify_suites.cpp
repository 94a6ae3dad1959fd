#include "verify_suites.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "tricf/entropy.hpp"
#include "tricf/planar.hpp"

namespace tricf::cli {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void identities_suite(VerifyReport& rep, const std::vector<int>& n_list, const Tolerances& tol) {
    for (int n : n_list) {
        const GroupParams g = GroupParams::make(2, n);
        const Generators gen = generators(g);
        std::vector<WordFactor> wf = {{-2, 'A'}, {1, 'C'}};
        for (int i = 0; i < n - 3; ++i) {
            wf.push_back({-1, 'A'});
            wf.push_back({1, 'C'});
        }
        const Mat2 w = word_to_matrix(wf, g);
        const Mat2 ca = gen.C * gen.A;

        int bad = 0;
        for (int k = -6; k <= 6; ++k)
            if (!proj_eq(Mat2::translation(k * g.t) * ca, ca * mat_pow(w, k), tol.identity))
                ++bad;
        rep.add("lemma-i-n" + std::to_string(n), bad, 0, 0.5);

        const Mat2 conj = gen.C.inverse() * gen.A * gen.C;
        bad = 0;
        for (int k = 1; k <= 4; ++k) {
            if (k == 1 && n == 3) continue;
            for (const Word& v : enumerate_tree(2, k, n, 4)) {
                try {
                    if (!proj_eq(conj * r_word(k, v, g).matrix, l_word(k, v, g).matrix,
                                 tol.identity))
                        ++bad;
                } catch (const std::exception&) {
                    ++bad;
                }
            }
        }
        rep.add("lemma-iv-n" + std::to_string(n), bad, 0, 0.5);

        SplitMix rng(999 + static_cast<std::uint64_t>(n));
        double worst = 0.0;
        for (int i = 0; i < 2000; ++i) {
            std::vector<WordFactor> mw, nw;
            for (int j = 0; j < 3; ++j) {
                mw.push_back({static_cast<int>(rng.next() % 7) - 3, 'A'});
                mw.push_back({1, 'C'});
                nw.push_back({static_cast<int>(rng.next() % 7) - 3, 'A'});
                nw.push_back({1, 'C'});
            }
            const Mat2 m = word_to_matrix(mw, g);
            const Mat2 nn = word_to_matrix(nw, g);
            const double x = 4.0 * rng.uniform01() - 2.0;
            const ExtReal nx = apply(nn, x);
            if (nx.infinite) continue;
            try {
                worst = std::max(worst,
                                 std::abs(tau(m * nn, x) - tau(m, nx.value) - tau(nn, x)));
            } catch (const PoleError&) {
            }
        }
        rep.add("tau-cocycle-n" + std::to_string(n), worst, 0, 1e-9);
    }
    // the worked L-word normal forms
    const GroupParams g3 = GroupParams::make(2, 3);
    const GroupParams g7 = GroupParams::make(2, 7);
    bool forms = l_word(2, {1, 2, 1}, g3).blocks == BlockWord{{-3, -3, -3}, -1} &&
                 l_word(2, {1, 2, 1, 2, 1}, g3).blocks ==
                     BlockWord{{-3, -3, -4, -3, -3}, -1} &&
                 l_word(1, {2, 1, 2}, g7).blocks == BlockWord{{-1, -1, -2, -1, -1}, -1};
    for (int p : {1, 2, 3})
        forms = forms && l_word(2, {p}, g3).blocks == BlockWord{{-(p + 1)}, -1};
    rep.add("l-word-normal-forms", forms ? 1 : 0, 1, 0.5);
    // the worked (2,p) example prints exponent -(p+2); the defining product
    // C^{-1}ACR fixes -(p+1), and the two differ by exactly one power of A
    rep.add("flag-l2p-printed-exponent-off-by-one", 1, 1, 0.5);
}

void domains_suite(VerifyReport& rep, const std::vector<int>& n_list, const Tolerances& tol) {
    for (int n : n_list) {
        const GroupParams g = GroupParams::make(2, n);
        for (double alpha : {0.2, 0.35, 0.5}) {
            const std::string id = "bijectivity-n" + std::to_string(n) + "-a" + fmt(alpha);
            try {
                auto mi = locate_matching(alpha, g);
                if (!mi) {
                    rep.add_skip(id);
                    continue;
                }
                MapParams mp{g, alpha};
                auto r = check_bijectivity(build_omega_matching(mp, *mi), mp,
                                           tol.bijectivity_rel);
                rep.add(id, r.pass ? 1 : 0, 1, 0.5);
            } catch (const std::exception&) {
                rep.add(id, 0, 1, 0.5);
            }
        }
        if (n > 3) {
            MapParams mp0{g, 0.0};
            auto r = check_bijectivity(build_omega_accel(mp0), mp0, tol.bijectivity_rel);
            rep.add("bijectivity-accel-n" + std::to_string(n), r.pass ? 1 : 0, 1, 0.5);

            PlanarDomain with_del = build_omega_accel(mp0);
            for (const Rect& d : deletion_rects(mp0)) with_del.rects.push_back(d);
            rep.add("accel-set-equality-n" + std::to_string(n),
                    symmetric_difference_mass(with_del, build_omega_zero(mp0)), 0, 1e-8);
        }
        try {
            auto a = locate_matching(0.3, g);
            auto b = locate_matching(0.7, g);
            if (a && b) {
                PlanarDomain da = build_omega_matching(MapParams{g, 0.3}, *a);
                PlanarDomain db = build_omega_matching(MapParams{g, 0.7}, *b);
                rep.add("symmetry-n" + std::to_string(n),
                        symmetric_difference_mass(symmetry_S(da), db), 0, tol.symdiff);
            } else {
                rep.add_skip("symmetry-n" + std::to_string(n));
            }
        } catch (const std::exception&) {
            rep.add("symmetry-n" + std::to_string(n), 1, 0, tol.symdiff);
        }
        try {
            auto mid = locate_matching(0.5, g);
            MapParams mp{g, 0.5};
            rep.add("mass-closed-form-n" + std::to_string(n),
                    domain_mass(build_omega_matching(mp, *mid)), mass_closed_form(n), tol.mass);
        } catch (const std::exception&) {
            rep.add("mass-closed-form-n" + std::to_string(n), -1, mass_closed_form(n),
                    tol.mass);
        }
        PlanarDomain shifted = shift_M1(build_omega_one(MapParams::make(2, n, 1.0)));
        shifted.rects.push_back({0.0, 1.0, -1.0, 0.0});
        rep.add("shift-tiling-n" + std::to_string(n),
                symmetric_difference_mass(shifted, build_omega_one(MapParams::make(3, n, 1.0))),
                0, 1e-8);
    }
    {
        const GroupParams g3 = GroupParams::make(2, 3);
        auto mi = locate_matching(0.2, g3);
        if (mi) {
            rep.add("worked-zeta", mi->zeta, 3.0 - 2.0 * std::sqrt(2.0), 1e-12);
            rep.add("worked-eta", mi->eta, (std::sqrt(2.0) - 1.0) / 2.0, 1e-12);
        } else {
            rep.add("worked-zeta", -1, 3.0 - 2.0 * std::sqrt(2.0), 1e-12);
        }
    }
    {
        const GroupParams g = GroupParams::make(2, 4);
        auto mi = locate_matching(0.5, g);
        MapParams mp{g, 0.5};
        PlanarDomain bad = build_omega_matching(mp, *mi);
        bad.rects.back().y2 += 0.01;
        auto r = check_bijectivity(bad, mp, tol.bijectivity_rel);
        rep.add("bijectivity-negative-control-fails", r.pass ? 0 : 1, 1, 0.5);
    }
    {
        // the alternative sign convention puts the Rosen root above one;
        // the masses verify the corrected one
        const double b = 2.0 - 2.0 * std::cos(kPi / 5.0);
        const double intro_root = 0.5 * (b + std::sqrt(b * b + 4.0));
        rep.add("flag-rosen-sign-conventions-differ",
                std::abs(intro_root - rosen_R(5)) > 0.1 ? 1 : 0, 1, 0.5);
    }
}

void entropy_suite(VerifyReport& rep, const std::vector<int>& n_list, long iters,
                   std::uint64_t seed, const Tolerances& tol) {
    for (int n : n_list) {
        const GroupParams g = GroupParams::make(2, n);
        auto p = plateau(n);
        rep.add("plateau-contains-half-n" + std::to_string(n),
                (p.first < 0.5 && 0.5 < p.second) ? 1 : 0, 1, 0.5);
        rep.add("hmax-mass-vol-n" + std::to_string(n), max_entropy(n) * mass_closed_form(n),
                vol_unit_tangent(2, n), 1e-9);

        MapParams mp{g, 0.5};
        EntropyEstimate est =
            birkhoff_entropy(mp, iters, std::min<long>(1000, iters / 10), seed);
        rep.add("birkhoff-plateau-n" + std::to_string(n), est.value, max_entropy(n),
                std::max(tol.entropy_rel * max_entropy(n), 4.0 * est.std_error));

        EntropyEstimate e3 = birkhoff_entropy(MapParams{g, 0.3}, iters, 1000, seed + 1);
        EntropyEstimate e7 = birkhoff_entropy(MapParams{g, 0.7}, iters, 1000, seed + 2);
        rep.add("birkhoff-symmetry-n" + std::to_string(n), e3.value, e7.value,
                std::max(2.0 * (e3.std_error + e7.std_error), 2e-3 * e7.value));

        int done = 0;
        for (double alpha : {0.2, 0.35}) {
            auto mi = locate_matching(alpha, g);
            if (!mi) continue;
            MapParams mpa{g, alpha};
            const double mass = domain_mass(build_omega_matching(mpa, *mi));
            EntropyEstimate ea = birkhoff_entropy(mpa, iters, 1000, seed + 3 + done);
            rep.add("product-n" + std::to_string(n) + "-a" + fmt(alpha), ea.value * mass,
                    vol_unit_tangent(2, n), tol.entropy_rel * vol_unit_tangent(2, n));
            ++done;
        }
    }
}

void conjecture_suite(VerifyReport& rep, const std::vector<int>& n_list,
                      const Tolerances& tol) {
    for (int n : n_list) {
        MapParams m3 = MapParams::make(3, n, 1.0);
        const double target = 2.0 * kPi * kPi * (2.0 * n - 3.0) / (3.0 * n);
        double got = -1.0;
        try {
            got = rohlin_integral(build_omega_one(m3), m3);
        } catch (const std::exception&) {
        }
        rep.add("rohlin-omega3-n" + std::to_string(n), got, target, tol.rohlin_rel * target);
        if (n == 3) rep.add("rohlin-omega3-analytic-n3", got, 2.0 * kPi * kPi / 3.0, 1e-6);
    }
}

} // namespace

void VerifyReport::add(const std::string& id, double value, double target, double tol) {
    Check c{id, std::abs(value - target) <= tol ? "pass" : "fail", value, target, tol};
    if (c.status == "fail") pass = false;
    checks.push_back(c);
}

void VerifyReport::add_skip(const std::string& id) {
    checks.push_back({id, "skip", 0.0, 0.0, 0.0});
}

std::string VerifyReport::to_json() const {
    std::string out = "{\n  \"suite\": \"" + suite + "\",\n  \"checks\": [\n";
    char buf[256];
    for (size_t i = 0; i < checks.size(); ++i) {
        const Check& c = checks[i];
        std::snprintf(buf, sizeof(buf),
                      "    {\"id\": \"%s\", \"status\": \"%s\", \"value\": %.17g, "
                      "\"target\": %.17g, \"tol\": %.17g}%s\n",
                      c.id.c_str(), c.status.c_str(), c.value, c.target, c.tol,
                      i + 1 < checks.size() ? "," : "");
        out += buf;
    }
    out += "  ],\n  \"pass\": ";
    out += pass ? "true" : "false";
    out += "\n}\n";
    return out;
}

VerifyReport run_suite(const std::string& suite, const std::vector<int>& n_list, long iters,
                       std::uint64_t seed, const Tolerances& tol) {
    VerifyReport rep;
    rep.suite = suite;
    if (suite == "identities" || suite == "all") identities_suite(rep, n_list, tol);
    if (suite == "domains" || suite == "all") domains_suite(rep, n_list, tol);
    if (suite == "entropy" || suite == "all") entropy_suite(rep, n_list, iters, seed, tol);
    if (suite == "conjecture" || suite == "all") conjecture_suite(rep, n_list, tol);
    return rep;
}

} // namespace tricf::cli
