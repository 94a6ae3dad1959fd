#include "tricf/words.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tricf {

namespace {

// Free-group letters over {A^p, C}; C is projectively an involution (m = 2).
struct Letter {
    char kind; // 'A' or 'C'
    int power; // meaningful for 'A'
};

void push_reduced(std::vector<Letter>& stack, Letter l) {
    if (l.kind == 'A') {
        if (l.power == 0) return;
        if (!stack.empty() && stack.back().kind == 'A') {
            stack.back().power += l.power;
            if (stack.back().power == 0) stack.pop_back();
            return;
        }
        stack.push_back(l);
        return;
    }
    if (!stack.empty() && stack.back().kind == 'C') {
        stack.pop_back(); // C^2 = -I, projectively trivial
        return;
    }
    stack.push_back(l);
}

void append_block(std::vector<Letter>& stack, int a_power) {
    push_reduced(stack, {'A', a_power});
    push_reduced(stack, {'C', 1});
}

// W = A^{-2}C (A^{-1}C)^{n-3}
void append_w(std::vector<Letter>& stack, int n, int count) {
    for (int r = 0; r < count; ++r) {
        append_block(stack, -2);
        for (int i = 0; i < n - 3; ++i) append_block(stack, -1);
    }
}

// Ctil_k, each copy equal to W^{k-1}(A^{-1}C)^{-1}
void append_ctil(std::vector<Letter>& stack, int k, int n, int count) {
    for (int r = 0; r < count; ++r) {
        if (k >= 2) {
            append_w(stack, n, k - 2);
            if (n > 3) {
                append_block(stack, -2);
                for (int i = 0; i < n - 4; ++i) append_block(stack, -1);
            } else {
                push_reduced(stack, {'A', -1});
            }
        } else if (n > 3) {
            // (A^{-1}C)^{-1} = C^{-1}A, projectively CA
            push_reduced(stack, {'C', 1});
            push_reduced(stack, {'A', 1});
        } else {
            throw CancellationFailure("l_word: (k=1, n=3) is inadmissible");
        }
    }
}

BlockWord parse_blocks(const std::vector<Letter>& letters) {
    BlockWord out;
    int pending = 0;
    for (const Letter& l : letters) {
        if (l.kind == 'A') {
            pending = l.power;
        } else {
            out.blocks.push_back(pending);
            pending = 0;
        }
    }
    out.tail = pending;
    return out;
}

void validate_word(const Word& v) {
    if (v.empty() || v.size() % 2 == 0)
        throw std::invalid_argument("word must be nonempty of odd length");
    for (int c : v)
        if (c < 1) throw std::invalid_argument("word letters must be >= 1");
}

Word concat(const Word& a, const Word& b) {
    Word out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

Word repeat(const Word& w, int q) {
    Word out;
    for (int i = 0; i < q; ++i) out.insert(out.end(), w.begin(), w.end());
    return out;
}

// Right-endpoint orbit digits, stopping at a pole or after max_steps.
std::vector<int> endpoint_digits(const MapParams& mp, double x0, int max_steps) {
    std::vector<int> out;
    double x = x0;
    for (int i = 0; i < max_steps; ++i) {
        StepResult s;
        try {
            s = digit_step(mp, x);
        } catch (const SingularOrbit&) {
            break;
        }
        out.push_back(s.digit.k);
        x = s.image;
        if (std::abs(x) < 1e-10 * mp.group.t && mp.group.m == 2) break;
    }
    return out;
}

bool is_prefix(const std::vector<int>& prefix, const std::vector<int>& full) {
    if (prefix.size() > full.size()) return false;
    return std::equal(prefix.begin(), prefix.end(), full.begin());
}

} // namespace

std::string BlockWord::str() const {
    std::ostringstream os;
    size_t i = 0;
    bool first = true;
    while (i < blocks.size()) {
        size_t j = i;
        while (j < blocks.size() && blocks[j] == blocks[i]) ++j;
        const size_t run = j - i;
        if (!first) os << ' ';
        first = false;
        if (run > 1) os << '(';
        os << "A^" << blocks[i] << " C";
        if (run > 1) os << ")^" << run;
        i = j;
    }
    if (tail != 0) {
        if (!first) os << ' ';
        os << "A^" << tail;
        first = false;
    }
    if (first) os << "I";
    return os.str();
}

Mat2 BlockWord::matrix(const GroupParams& g) const {
    std::vector<WordFactor> factors;
    factors.reserve(2 * blocks.size() + 1);
    for (int p : blocks) {
        factors.push_back({p, 'A'});
        factors.push_back({1, 'C'});
    }
    if (tail != 0) factors.push_back({tail, 'A'});
    return word_to_matrix(factors, g);
}

Word v_prime(const Word& v) {
    validate_word(v);
    if (v.size() == 1) {
        if (v[0] == 1) return {1};
        return {1, v[0] - 1};
    }
    if (v[0] != 1) {
        Word out = {1, v[0] - 1};
        out.insert(out.end(), v.begin() + 1, v.end());
        return out;
    }
    Word out = {v[1] + 1};
    out.insert(out.end(), v.begin() + 2, v.end());
    return out;
}

Word theta(const Word& v, int q) { return theta(TreeNode{v, {}}, q).v; }

TreeNode theta(const TreeNode& node, int q) {
    const Word& v = node.v;
    validate_word(v);
    if (v.size() == 1) {
        const int c = v[0];
        if (q == -1) return {{c + 1}, {}};
        if (c == 1) {
            if (q < 1) throw UndefinedTheta("theta: Theta_0(1) is undefined");
            return {{1, q, 1}, {q, 1}};
        }
        if (q < 0) throw UndefinedTheta("theta: q must be >= 0 for c > 1");
        Word suffix = repeat({1, c - 1}, q);
        suffix.push_back(1);
        suffix.push_back(c);
        return {concat({c}, suffix), suffix};
    }
    if (q < 0) throw UndefinedTheta("theta: q must be >= 0 for composite words");
    if (node.suffix.empty())
        throw UndefinedTheta("theta: composite word without tracked suffix");
    const Word vp = v_prime(v);
    Word mid = repeat(vp, q);
    Word suffix = concat(mid, node.suffix);
    return {concat(v, suffix), suffix};
}

std::vector<TreeNode> tree_children(const TreeNode& node, int q_max) {
    std::vector<TreeNode> out;
    if (node.v.size() == 1) {
        out.push_back(theta(node, -1));
        const int q0 = (node.v[0] == 1) ? 1 : 0;
        for (int q = q0; q <= q_max; ++q) out.push_back(theta(node, q));
        return out;
    }
    for (int q = 0; q <= q_max; ++q) out.push_back(theta(node, q));
    return out;
}

std::vector<Word> enumerate_tree(int depth, int k, int n, int q_max) {
    if (depth < 0) throw std::invalid_argument("enumerate_tree: depth must be >= 0");
    auto admissible = [&](const Word& v) {
        if (k != 1) return true;
        for (size_t i = 0; i < v.size(); i += 2)
            if (v[i] > n - 3) return false;
        return true;
    };
    std::set<Word> seen;
    std::vector<Word> out;
    std::queue<std::pair<TreeNode, int>> queue;
    const TreeNode root{{1}, {}};
    if (admissible(root.v)) {
        queue.push({root, 0});
        seen.insert(root.v);
        out.push_back(root.v);
    }
    while (!queue.empty()) {
        auto [node, d] = queue.front();
        queue.pop();
        if (d == depth) continue;
        for (const TreeNode& child : tree_children(node, q_max)) {
            if (!admissible(child.v)) continue; // descendants keep the bad letter
            if (seen.insert(child.v).second) out.push_back(child.v);
            queue.push({child, d + 1});
        }
    }
    return out;
}

RWord r_word(int k, const Word& v, const GroupParams& params) {
    validate_word(v);
    if (k < 1) throw std::invalid_argument("r_word: k must be >= 1");
    RWord out;
    std::vector<WordFactor> factors;
    for (int j = static_cast<int>(v.size()) - 1; j >= 0; --j) {
        const int base = (j % 2 == 0) ? k : k + 1;
        for (int r = 0; r < v[static_cast<size_t>(j)]; ++r) {
            factors.push_back({base, 'A'});
            factors.push_back({1, 'C'});
        }
    }
    out.matrix = word_to_matrix(factors, params);
    for (size_t j = 0; j < v.size(); ++j) {
        const int base = (j % 2 == 0) ? k : k + 1;
        for (int r = 0; r < v[j]; ++r) out.dbar.push_back(base);
    }
    return out;
}

LWord l_word(int k, const Word& v, const GroupParams& params) {
    validate_word(v);
    if (k < 1) throw std::invalid_argument("l_word: k must be >= 1");
    if (params.m != 2) throw UnsupportedM("l_word: matching machinery is for m = 2");
    if (k == 1 && params.n == 3)
        throw CancellationFailure("l_word: the k = 1 family is empty for n = 3");
    const int n = params.n;
    const int s = static_cast<int>(v.size() + 1) / 2;

    std::vector<Letter> letters;
    for (int i = 0; i < n - 3; ++i) append_block(letters, -1);
    if (s == 1) {
        append_ctil(letters, k, n, v[0] - 1);
    } else {
        append_ctil(letters, k, n, v[static_cast<size_t>(2 * s - 2)]); // c_s
        for (int j = s - 1; j >= 1; --j) {
            append_ctil(letters, k + 1, n, v[static_cast<size_t>(2 * j - 1)]); // d_j
            const int c = v[static_cast<size_t>(2 * j - 2)];
            append_ctil(letters, k, n, (j == 1) ? c - 1 : c);
        }
    }
    append_w(letters, n, k - 1);
    push_reduced(letters, {'A', -1});

    LWord out;
    out.blocks = parse_blocks(letters);
    for (int p : out.blocks.blocks)
        if (p >= 0)
            throw CancellationFailure("l_word: normalization left a nonnegative block power");
    out.matrix = out.blocks.matrix(params);
    return out;
}

Counts counts(int k, const Word& v, int n) {
    validate_word(v);
    Counts out;
    long sum_c = 0, sum_d = 0;
    for (size_t i = 0; i < v.size(); ++i)
        ((i % 2 == 0) ? sum_c : sum_d) += v[i];
    out.sbar = sum_c + sum_d;
    out.sunder = (n - 3) + (static_cast<long>(k - 1) * n - 2 * k + 1) * (-1 + sum_c) +
                 (static_cast<long>(k) * n - 2 * k - 1) * sum_d +
                 static_cast<long>(k - 1) * (n - 2);
    return out;
}

double solve_zeta(int k, const Word& v, const GroupParams& params) {
    const RWord rw = r_word(k, v, params);
    const double t = params.t;
    // R (zt) = (z-1)t  <=>  c t^2 z^2 + t(d - a - c t) z - (d t + b) = 0
    const double qa = rw.matrix.c * t * t;
    const double qb = t * (rw.matrix.d - rw.matrix.a - rw.matrix.c * t);
    const double qc = -(rw.matrix.d * t + rw.matrix.b);

    std::vector<double> roots;
    if (std::abs(qa) < 1e-14 * std::max(std::abs(qb), std::abs(qc))) {
        if (qb != 0.0) roots.push_back(-qc / qb);
    } else {
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc >= 0.0) {
            const double r = std::sqrt(disc);
            const double q = -0.5 * (qb + (qb >= 0.0 ? r : -r));
            if (q != 0.0) {
                roots.push_back(q / qa);
                roots.push_back(qc / q);
            } else {
                roots.push_back(0.0);
            }
        }
    }
    auto digits_match = [&](double zeta) {
        MapParams mp{params, zeta};
        const std::vector<int> digits =
            endpoint_digits(mp, mp.hi(), static_cast<int>(rw.dbar.size()));
        return digits.size() == rw.dbar.size() && is_prefix(rw.dbar, digits);
    };
    std::vector<double> in_range;
    for (double r : roots)
        if (r > 1e-12 && r < 1.0 - 1e-12) in_range.push_back(r);
    for (double r : in_range)
        if (digits_match(r)) return r;
    throw NoRootInRange("solve_zeta: no root in (0,1) with the right digit prefix");
}

double solve_eta(int k, const Word& v, const GroupParams& params, double zeta) {
    const LWord lw = l_word(k, v, params);
    const double t = params.t;
    std::vector<double> fixed;
    try {
        fixed = mobius_fixed_points(lw.matrix);
    } catch (const DegenerateError&) {
        throw NoRootInRange("solve_eta: L is projectively the identity");
    }
    std::vector<double> candidates;
    for (double x : fixed) {
        const double eta = x / t;
        if (eta > zeta && eta < 1.0 + 1e-12) candidates.push_back(std::min(eta, 1.0));
    }
    if (candidates.empty()) throw NoRootInRange("solve_eta: no fixed point in (zeta, 1)");
    std::sort(candidates.begin(), candidates.end());

    const Counts ct = counts(k, v, params.n);
    const RWord rw = r_word(k, v, params);
    for (double eta : candidates) {
        MatchingInterval mi;
        mi.k = k;
        mi.v = v;
        mi.zeta = zeta;
        mi.eta = eta;
        mi.sbar = ct.sbar;
        mi.sunder = static_cast<long>(lw.blocks.blocks.size());
        mi.dbar = rw.dbar;
        mi.dunder.assign(lw.blocks.blocks.rbegin(), lw.blocks.blocks.rend());
        if (verify_sync(mi, 0.5 * (zeta + eta), params)) return eta;
    }
    throw ValidationFailure("solve_eta: synchronization failed at the midpoint");
}

MatchingInterval resolve_interval(int k, const Word& v, const GroupParams& params) {
    MatchingInterval mi;
    mi.k = k;
    mi.v = v;
    const RWord rw = r_word(k, v, params);
    const LWord lw = l_word(k, v, params);
    mi.R = rw.matrix;
    mi.L = lw.matrix;
    mi.dbar = rw.dbar;
    mi.l_blocks = lw.blocks;
    mi.dunder.assign(lw.blocks.blocks.rbegin(), lw.blocks.blocks.rend());
    const Counts ct = counts(k, v, params.n);
    mi.sbar = ct.sbar;
    mi.sunder = static_cast<long>(lw.blocks.blocks.size());
    mi.zeta = solve_zeta(k, v, params);
    mi.eta = solve_eta(k, v, params, mi.zeta);
    return mi;
}

bool verify_sync(const MatchingInterval& mi, double alpha, const GroupParams& params) {
    if (!(alpha >= mi.zeta - 1e-12 && alpha < mi.eta)) return false;
    MapParams mp{params, alpha};

    auto run = [&](double x0, long steps, const std::vector<int>& digit_prefix, bool& hit_zero,
                   long& zero_at, double& log_amp, bool& digits_ok) -> double {
        double x = x0;
        hit_zero = false;
        digits_ok = true;
        log_amp = 0.0;
        for (long i = 0; i < steps; ++i) {
            if (params.m == 2 && std::abs(x) < 1e-10 * params.t) {
                hit_zero = true;
                zero_at = i;
                return x;
            }
            StepResult s = digit_step(mp, x);
            if (i < static_cast<long>(digit_prefix.size()) &&
                s.digit.k != digit_prefix[static_cast<size_t>(i)])
                digits_ok = false;
            log_amp += log_deriv(mp, x);
            x = s.image;
        }
        return x;
    };
    bool rz = false, lz = false, rdig = true, ldig = true;
    long rz_at = -1, lz_at = -1;
    double ramp = 0.0, lamp = 0.0;
    const double r_end = run(mp.hi(), mi.sbar + 1, mi.dbar, rz, rz_at, ramp, rdig);
    const double l_end = run(mp.lo(), mi.sunder + 1, mi.dunder, lz, lz_at, lamp, ldig);
    if (rz || lz) {
        // degenerate interior point: both endpoint orbits land on zero together
        return rz && lz && rz_at == mi.sbar && lz_at == mi.sunder;
    }
    if (!rdig || !ldig) return false;
    // landing points carry rounding noise of order exp(sum log|T'|) * eps;
    // the 1e-8 contract is the binding bound whenever doubles can resolve it
    const double noise = 4e-15 * std::exp(std::min(600.0, std::max(ramp, lamp)));
    const double tol = std::min(0.05 * params.t, 1e-8 + noise);
    return std::abs(r_end - l_end) < tol;
}

std::optional<MatchingInterval> locate_matching(double alpha, const GroupParams& params,
                                                int depth_cap, int q_max) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("locate_matching: alpha must lie in (0,1)");
    MapParams mp{params, alpha};
    const std::vector<int> digits = endpoint_digits(mp, mp.hi(), 96);
    if (digits.empty() || digits[0] < 1) return std::nullopt;
    const int k = digits[0];

    auto admissible = [&](const Word& v) {
        if (k != 1) return true;
        for (size_t i = 0; i < v.size(); i += 2)
            if (v[i] > params.n - 3) return false;
        return true;
    };
    auto dbar_of = [&](const Word& v) {
        std::vector<int> d;
        for (size_t j = 0; j < v.size(); ++j) {
            const int base = (j % 2 == 0) ? k : k + 1;
            for (int r = 0; r < v[j]; ++r) d.push_back(base);
        }
        return d;
    };

    std::queue<std::pair<TreeNode, int>> queue;
    queue.push({TreeNode{{1}, {}}, 0});
    while (!queue.empty()) {
        auto [node, d] = queue.front();
        queue.pop();
        if (!admissible(node.v)) continue;
        const std::vector<int> dbar = dbar_of(node.v);
        if (!is_prefix(dbar, digits)) continue;
        try {
            MatchingInterval mi = resolve_interval(k, node.v, params);
            if (alpha >= mi.zeta - 1e-12 && alpha < mi.eta) return mi;
        } catch (const std::runtime_error&) {
            // unresolvable candidate; keep searching deeper
        }
        if (d < depth_cap && dbar.size() < digits.size())
            for (const TreeNode& child : tree_children(node, q_max))
                queue.push({child, d + 1});
    }
    return std::nullopt;
}

std::pair<int, Word> middle_interval_label(int n) {
    if (n == 3) return {2, {1}};
    if (n % 2 == 0) return {1, {(n - 2) / 2}};
    return {1, {(n - 3) / 2, 1, (n - 3) / 2}};
}

BlockWord word_process(const std::vector<int>& digits, const MapParams& params) {
    if (params.group.m != 2) throw UnsupportedM("word_process: m = 2 only");
    const int n = params.group.n;
    if (digits.empty() || digits.front() >= 0 || digits.back() >= 0)
        throw InadmissibleInput("word_process: first and last digits must be negative");
    for (int d : digits)
        if (d == 0) throw InadmissibleInput("word_process: zero digit");

    const long step_bound = 10 * static_cast<long>(digits.size()) + 10;
    long steps = 0;
    auto tick = [&]() {
        if (++steps > step_bound) throw NonHalting("word_process: step bound exceeded");
    };

    std::deque<int> out; // block word, matrix order
    auto prepend_w = [&](int count) {
        for (int r = 0; r < count; ++r) {
            for (int i = 0; i < n - 3; ++i) out.push_front(-1);
            out.push_front(-2);
        }
    };
    auto prepend_ones = [&](int count) {
        for (int i = 0; i < count; ++i) out.push_front(-1);
    };

    enum class State { PostA, Aca, Empty };

    size_t seg_begin = 0;
    while (seg_begin < digits.size()) {
        size_t seg_end = seg_begin; // inclusive
        while (seg_end + 1 < digits.size() &&
               !(digits[seg_end] < 0 && digits[seg_end + 1] < 0))
            ++seg_end;
        const size_t len = seg_end - seg_begin + 1;

        if (len == 1) {
            tick();
            out.push_front(digits[seg_begin]);
            seg_begin = seg_end + 1;
            continue;
        }
        // segment: negative, (positives with isolated negatives), negative
        tick();
        out.push_front(digits[seg_begin] - 1);
        State state = State::PostA;
        int ones = 0;
        for (size_t i = seg_begin + 1; i <= seg_end; ++i) {
            tick();
            const int d = digits[i];
            switch (state) {
            case State::PostA:
                if (d < 1) throw InadmissibleInput("word_process: unexpected digit order");
                prepend_w(d - 1);
                state = State::Aca;
                ones = 0;
                break;
            case State::Aca:
                if (d == 1) {
                    if (++ones > n - 3)
                        throw InadmissibleInput("word_process: digit-1 run exceeds n-3");
                    break;
                }
                if (d < 0) {
                    prepend_ones(n - 3 - ones);
                    out.push_front(d - 1);
                    state = State::Empty;
                } else { // d >= 2
                    prepend_ones(n - 3 - ones);
                    out.front() -= 1;
                    prepend_w(d - 2);
                    state = State::Aca;
                    ones = 0;
                }
                break;
            case State::Empty:
                if (d < 1) throw InadmissibleInput("word_process: unexpected digit order");
                out.front() -= 1;
                prepend_w(d - 1);
                state = State::Aca;
                ones = 0;
                break;
            }
        }
        if (state != State::Empty)
            throw NonHalting("word_process: segment did not close");
        seg_begin = seg_end + 1;
    }
    BlockWord result;
    result.blocks.assign(out.begin(), out.end());
    result.tail = 0;
    return result;
}

bool t0_admissible(const BlockWord& w, int n) {
    if (w.tail != 0) return false;
    int run = 0;
    for (int p : w.blocks) {
        if (p >= 0) return false;
        if (p == -1) {
            if (++run > n - 3) return false;
        } else {
            run = 0;
        }
    }
    return true;
}

Mat2 digits_to_matrix(const std::vector<int>& digits, const GroupParams& params) {
    std::vector<WordFactor> factors;
    factors.reserve(2 * digits.size());
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        factors.push_back({*it, 'A'});
        factors.push_back({1, 'C'});
    }
    return word_to_matrix(factors, params);
}

} // namespace tricf
