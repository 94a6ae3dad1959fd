#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tricf/entropy.hpp"
#include "tricf/planar.hpp"
#include "verify_suites.hpp"

using namespace tricf;

namespace {

// write-once via temp file + rename
void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp);
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

std::vector<int> parse_n_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stoi(item));
    }
    return out;
}

PlanarDomain build_domain(int m, int n, double alpha, const std::string& kind) {
    if (kind == "zero" || (kind == "auto" && alpha == 0.0)) {
        return build_omega_zero(MapParams::make(m, n, 0.0));
    }
    if (kind == "accel") {
        return build_omega_accel(MapParams::make(m, n, 0.0));
    }
    if (kind == "one" || (kind == "auto" && alpha == 1.0)) {
        return build_omega_one(MapParams::make(m, n, 1.0));
    }
    if (kind != "auto" && kind != "matching")
        throw std::invalid_argument("unknown kind: " + kind);
    if (m != 2)
        throw UnsupportedM("matching domains are built for m = 2; use --kind one for m = 3");
    const GroupParams g = GroupParams::make(m, n);
    const int depth_cap = 8;
    auto mi = locate_matching(alpha, g, depth_cap);
    if (!mi)
        throw NoRootInRange("no matching interval found within tree depth " +
                            std::to_string(depth_cap));
    return build_omega_matching(MapParams{g, alpha}, *mi);
}

int cmd_entropy_curve(int n, double amin, double amax, int steps, long iters,
                      std::uint64_t seed, const std::string& out_path) {
    std::vector<double> alphas;
    for (int i = 0; i < steps; ++i)
        alphas.push_back(steps == 1 ? amin : amin + i * (amax - amin) / (steps - 1));
    auto rows = entropy_curve(n, alphas, iters, seed);
    const std::string csv = curve_to_csv(rows);
    if (out_path.empty()) {
        std::cout << csv;
    } else {
        atomic_write(out_path, csv);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"continued-fraction interval maps of triangle groups: domains, "
                 "entropy, and identity checks"};
    app.require_subcommand(1);

    // entropy-curve
    auto* curve = app.add_subcommand("entropy-curve", "Birkhoff entropy sweep to CSV");
    int cn = 3, csteps = 40;
    double camin = 0.1, camax = 0.5;
    long citers = 1000000;
    std::uint64_t cseed = 1;
    std::string cout_path;
    curve->add_option("--n", cn, "index n of the Hecke family")->required();
    curve->add_option("--alpha-min", camin)->required();
    curve->add_option("--alpha-max", camax)->required();
    curve->add_option("--steps", csteps)->required();
    curve->add_option("--iters", citers);
    curve->add_option("--seed", cseed);
    curve->add_option("--out", cout_path);

    // omega
    auto* omega = app.add_subcommand("omega", "planar natural-extension domains");
    std::string oaction, okind = "auto", oout;
    int om = 2, on = 3;
    double oalpha = 0.5;
    omega->add_option("action", oaction, "build | mass | export")->required();
    omega->add_option("--m", om)->required();
    omega->add_option("--n", on)->required();
    omega->add_option("--alpha", oalpha);
    omega->add_option("--kind", okind, "auto | zero | accel | one");
    omega->add_option("--out", oout);

    // matching
    auto* matching = app.add_subcommand("matching", "matching intervals and the word tree");
    std::string maction;
    int mn = 3, mk = 1, mdepth = 2;
    double malpha = 0.2;
    matching->add_option("action", maction, "locate | tree")->required();
    matching->add_option("--n", mn);
    matching->add_option("--alpha", malpha);
    matching->add_option("--k", mk);
    matching->add_option("--depth", mdepth);

    // verify
    auto* verify = app.add_subcommand("verify", "verification suites");
    std::string vsuite = "all", vnlist = "3,4,5", vjson;
    long viters = 1000000;
    std::uint64_t vseed = 1;
    cli::Tolerances tols;
    verify->add_option("--suite", vsuite, "identities | domains | entropy | conjecture | all");
    verify->add_option("--n-list", vnlist);
    verify->add_option("--json-out", vjson);
    verify->add_option("--iters", viters);
    verify->add_option("--seed", vseed);
    verify->add_option("--tol-identity", tols.identity);
    verify->add_option("--tol-mass", tols.mass);
    verify->add_option("--tol-rohlin", tols.rohlin_rel);
    verify->add_option("--tol-bijectivity", tols.bijectivity_rel);
    verify->add_option("--tol-symdiff", tols.symdiff);
    verify->add_option("--tol-entropy", tols.entropy_rel);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        if (curve->parsed()) {
            if (csteps < 1 || !(camin > 0.0) || !(camax < 1.0) || !(camin < camax) ||
                citers < 10000) {
                std::cerr << "entropy-curve: need 0 < alpha-min < alpha-max < 1, steps >= 1, "
                             "iters >= 10000\n";
                return 2;
            }
            return cmd_entropy_curve(cn, camin, camax, csteps, citers, cseed, cout_path);
        }
        if (omega->parsed()) {
            if (oaction != "build" && oaction != "mass" && oaction != "export") {
                std::cerr << "omega: action must be build, mass, or export\n";
                return 2;
            }
            if (oaction == "export" && oout.empty()) {
                std::cerr << "omega export: --out is required\n";
                return 2;
            }
            PlanarDomain dom;
            try {
                dom = build_domain(om, on, oalpha, okind);
            } catch (const NoRootInRange& e) {
                std::cerr << "omega: " << e.what() << "\n";
                return 1;
            }
            const double mass = domain_mass(dom);
            if (oaction == "mass") {
                if (std::isinf(mass)) {
                    std::printf("inf\n");
                } else {
                    std::printf("%.12g\n", mass);
                }
                return 0;
            }
            const std::string json = domain_to_json(dom);
            if (oout.empty()) {
                std::cout << json;
            } else {
                atomic_write(oout, json);
                std::printf("wrote %s (%zu rectangles, mass %s)\n", oout.c_str(),
                            dom.rects.size(),
                            std::isinf(mass) ? "inf" : std::to_string(mass).c_str());
            }
            return 0;
        }
        if (matching->parsed()) {
            if (maction == "locate") {
                const GroupParams g = GroupParams::make(2, mn);
                auto mi = locate_matching(malpha, g);
                if (!mi) {
                    std::cerr << "not matched within tree depth 8\n";
                    return 1;
                }
                std::string word;
                for (size_t i = 0; i < mi->v.size(); ++i) {
                    if (i) word += ",";
                    word += std::to_string(mi->v[i]);
                }
                std::printf("k=%d v=%s zeta=%.8f eta=%.8f sbar=%ld sunder=%ld\n", mi->k,
                            word.c_str(), mi->zeta, mi->eta, mi->sbar, mi->sunder);
                return 0;
            }
            if (maction == "tree") {
                std::queue<std::pair<TreeNode, int>> queue;
                queue.push({TreeNode{{1}, {}}, 0});
                auto admissible = [&](const Word& v) {
                    if (mk != 1) return true;
                    for (size_t i = 0; i < v.size(); i += 2)
                        if (v[i] > mn - 3) return false;
                    return true;
                };
                while (!queue.empty()) {
                    auto [node, d] = queue.front();
                    queue.pop();
                    if (!admissible(node.v)) continue;
                    std::string line(2 * static_cast<size_t>(d), ' ');
                    for (size_t i = 0; i < node.v.size(); ++i) {
                        if (i) line += ",";
                        line += std::to_string(node.v[i]);
                    }
                    std::printf("%s\n", line.c_str());
                    if (d < mdepth)
                        for (const TreeNode& child : tree_children(node, 8))
                            queue.push({child, d + 1});
                }
                return 0;
            }
            std::cerr << "matching: action must be locate or tree\n";
            return 2;
        }
        if (verify->parsed()) {
            if (vsuite != "identities" && vsuite != "domains" && vsuite != "entropy" &&
                vsuite != "conjecture" && vsuite != "all") {
                std::cerr << "verify: unknown suite " << vsuite << "\n";
                return 2;
            }
            const std::vector<int> ns = parse_n_list(vnlist);
            if (ns.empty()) {
                std::cerr << "verify: --n-list must be nonempty\n";
                return 2;
            }
            cli::VerifyReport rep = cli::run_suite(vsuite, ns, viters, vseed, tols);
            for (const auto& c : rep.checks)
                std::printf("[%s] %s value=%.10g target=%.10g tol=%.3g\n", c.status.c_str(),
                            c.id.c_str(), c.value, c.target, c.tol);
            if (!vjson.empty()) atomic_write(vjson, rep.to_json());
            std::printf("suite %s: %s\n", rep.suite.c_str(), rep.pass ? "PASS" : "FAIL");
            return rep.pass ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
