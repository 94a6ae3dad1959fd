#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tricf::cli {

struct Check {
    std::string id;
    std::string status; // pass | fail | skip
    double value = 0.0;
    double target = 0.0;
    double tol = 0.0;
};

struct VerifyReport {
    std::string suite;
    std::vector<Check> checks;
    bool pass = true;

    void add(const std::string& id, double value, double target, double tol);
    void add_skip(const std::string& id);
    std::string to_json() const;
};

struct Tolerances {
    double identity = 1e-9;
    double mass = 1e-8;
    double rohlin_rel = 1e-4;
    double bijectivity_rel = 1e-8;
    double symdiff = 1e-9;
    double entropy_rel = 0.02;
};

VerifyReport run_suite(const std::string& suite, const std::vector<int>& n_list, long iters,
                       std::uint64_t seed, const Tolerances& tol);

} // namespace tricf::cli
