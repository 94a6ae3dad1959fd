#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tricf/intervalmap.hpp"

namespace tricf {

// Alternating word c1 d1 c2 ... d_{s-1} c_s of positive integers, odd length.
using Word = std::vector<int>;

// Group word in normal form A^{p1}C A^{p2}C ... A^{pr}C A^{tail}.
struct BlockWord {
    std::vector<int> blocks;
    int tail = 0;

    bool operator==(const BlockWord&) const = default;
    std::string str() const;
    Mat2 matrix(const GroupParams& g) const;
};

struct MatchingInterval {
    int k = 1;
    Word v;
    double zeta = 0.0;
    double eta = 0.0;
    long sbar = 0;
    long sunder = 0;
    Mat2 R, L;
    std::vector<int> dbar;   // digit prefix of the right endpoint orbit
    std::vector<int> dunder; // digit prefix of the left endpoint orbit
    BlockWord l_blocks;      // normalized symbolic form of L
};

Word v_prime(const Word& v);

// Tree node: the word together with the suffix v'' of its defining
// decomposition v = Theta_p(u) = u v''.
struct TreeNode {
    Word v;
    Word suffix;
};

// Theta_q on base words (v = single letter); composite words need the
// tracked suffix.
Word theta(const Word& v, int q);
TreeNode theta(const TreeNode& node, int q);
std::vector<TreeNode> tree_children(const TreeNode& node, int q_max);

// All words reachable from v = 1 in <= depth operator applications,
// q bounded by q_max; for k = 1 only words with every c_i <= n - 3 survive.
std::vector<Word> enumerate_tree(int depth, int k, int n, int q_max = 8);

struct RWord {
    Mat2 matrix;
    std::vector<int> dbar;
};
RWord r_word(int k, const Word& v, const GroupParams& params);

struct LWord {
    Mat2 matrix;
    BlockWord blocks;
};
LWord l_word(int k, const Word& v, const GroupParams& params);

struct Counts {
    long sbar = 0;
    long sunder = 0;
};
Counts counts(int k, const Word& v, int n);

double solve_zeta(int k, const Word& v, const GroupParams& params);
double solve_eta(int k, const Word& v, const GroupParams& params, double zeta);

// Full resolution of (k, v) into a matching interval record.
MatchingInterval resolve_interval(int k, const Word& v, const GroupParams& params);

// T_alpha^{sbar+1}(r0) == T_alpha^{sunder+1}(l0) within 1e-8, with the
// meet-at-zero degenerate case accepted.
bool verify_sync(const MatchingInterval& mi, double alpha, const GroupParams& params);

std::optional<MatchingInterval> locate_matching(double alpha, const GroupParams& params,
                                                int depth_cap = 8, int q_max = 8);

// The word (n-2)/2 resp. ((n-3)/2, 1, (n-3)/2) of the middle matching
// interval; k = 1 for n > 3 and k = 2 (word 1) for n = 3.
std::pair<int, Word> middle_interval_label(int n);

// Rewrites a T_alpha branch word (first and last digits negative) into the
// projectively equal T_0-admissible branch word.
BlockWord word_process(const std::vector<int>& digits, const MapParams& params);

// Branch-word admissibility for T_{2,n,0}: negative digits with runs of -1
// bounded by n - 3.
bool t0_admissible(const BlockWord& w, int n);

Mat2 digits_to_matrix(const std::vector<int>& digits, const GroupParams& params);

} // namespace tricf
