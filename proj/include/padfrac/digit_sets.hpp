#pragma once

#include <padfrac/padic.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

// Integer-set specifications and the questions the library asks of them:
// enumeration and exact interval counts, level covers of the p-adic closure,
// closure membership certificates, shift- and dual-closure checks, integer
// limit points, and the JSON schema the CLI ingests.
namespace padfrac {

enum class Domain { N, Z };
enum class Exactness { Exact, LowerBound };
enum class Closure { Yes, No, Unknown };

// Pair admissibility on digit strings: digit u may sit directly below digit v
// when both are allowed and matrix[u][v] = 1.
struct TransitionSystem {
    PrimeBase base;
    std::vector<std::vector<int>> matrix;
    std::vector<int64_t> allowed;  // ascending

    TransitionSystem(PrimeBase b, std::vector<std::vector<int>> m,
                     std::vector<int64_t> digits = {})
        : base(b), matrix(std::move(m)), allowed(std::move(digits)) {
        const auto p = static_cast<std::size_t>(base.p);
        if (matrix.size() != p)
            throw std::invalid_argument("TransitionSystem: matrix must be p x p");
        for (const auto& row : matrix) {
            if (row.size() != p)
                throw std::invalid_argument("TransitionSystem: matrix must be p x p");
            for (int e : row)
                if (e != 0 && e != 1)
                    throw std::invalid_argument("TransitionSystem: entries must be 0 or 1");
        }
        if (allowed.empty())
            for (int64_t d = 0; d < base.p; ++d) allowed.push_back(d);
        std::sort(allowed.begin(), allowed.end());
        allowed.erase(std::unique(allowed.begin(), allowed.end()), allowed.end());
        for (int64_t d : allowed)
            if (d < 0 || d >= base.p)
                throw std::invalid_argument("TransitionSystem: digit outside base");
        mask_.assign(p, 0);
        for (int64_t d : allowed) mask_[static_cast<std::size_t>(d)] = 1;
        bool any = false;
        for (int64_t u = 0; u < base.p && !any; ++u)
            for (int64_t v = 0; v < base.p && !any; ++v) any = edge(u, v);
        if (!any) throw std::invalid_argument("TransitionSystem: no admissible digit pair");
        // digits from which the string can continue upward forever
        surv_ = mask_;
        for (bool changed = true; changed;) {
            changed = false;
            for (int64_t u = 0; u < base.p; ++u) {
                if (!surv_[static_cast<std::size_t>(u)]) continue;
                bool out = false;
                for (int64_t v = 0; v < base.p && !out; ++v)
                    out = edge(u, v) && surv_[static_cast<std::size_t>(v)];
                if (!out) {
                    surv_[static_cast<std::size_t>(u)] = 0;
                    changed = true;
                }
            }
        }
    }

    bool digit_ok(int64_t d) const {
        return d >= 0 && d < base.p && mask_[static_cast<std::size_t>(d)] != 0;
    }
    bool edge(int64_t u, int64_t v) const {
        return digit_ok(u) && digit_ok(v) &&
               matrix[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] == 1;
    }
    bool survives(int64_t d) const {
        return digit_ok(d) && surv_[static_cast<std::size_t>(d)] != 0;
    }

    static TransitionSystem digit_restriction(PrimeBase b, std::vector<int64_t> digits) {
        const auto p = static_cast<std::size_t>(b.p);
        return TransitionSystem(b, std::vector<std::vector<int>>(p, std::vector<int>(p, 1)),
                                std::move(digits));
    }

  private:
    std::vector<char> mask_, surv_;
};

// Alternating refine/freeze schedule: digit positions are grouped into blocks
// split at the cut levels, the first block refined, then alternating. Levels
// count from 1; beyond the last cut (and beyond `depth`) everything freezes.
struct TheoremESchedule {
    PrimeBase base;
    std::vector<uint64_t> levels;
    std::vector<int64_t> refine_digits;  // ascending
    uint64_t depth;

    TheoremESchedule(PrimeBase b, std::vector<uint64_t> cuts, std::vector<int64_t> digits,
                     uint64_t d)
        : base(b), levels(std::move(cuts)), refine_digits(std::move(digits)), depth(d) {
        if (levels.empty() || levels.front() == 0)
            throw std::invalid_argument("TheoremESchedule: need cut levels >= 1");
        for (std::size_t i = 0; i + 1 < levels.size(); ++i)
            if (levels[i] >= levels[i + 1])
                throw std::invalid_argument("TheoremESchedule: cut levels must increase");
        if (depth == 0 || depth > levels.back())
            throw std::invalid_argument("TheoremESchedule: depth must lie within the schedule");
        if (depth > 4096)
            throw std::invalid_argument("TheoremESchedule: depth beyond supported budget");
        std::sort(refine_digits.begin(), refine_digits.end());
        refine_digits.erase(std::unique(refine_digits.begin(), refine_digits.end()),
                            refine_digits.end());
        if (refine_digits.empty())
            throw std::invalid_argument("TheoremESchedule: need at least one refine digit");
        for (int64_t dg : refine_digits)
            if (dg < 0 || dg >= base.p)
                throw std::invalid_argument("TheoremESchedule: refine digit outside base");
    }

    bool refined(uint64_t level) const {
        if (level == 0) throw std::invalid_argument("TheoremESchedule: levels count from 1");
        if (level <= levels.front()) return true;
        if (level > levels.back()) return false;
        const auto it = std::lower_bound(levels.begin(), levels.end(), level);
        return (it - levels.begin()) % 2 == 0;
    }

    uint64_t refined_count(uint64_t n) const {
        const uint64_t top = std::min<uint64_t>(n, levels.back());
        uint64_t c = 0;
        for (uint64_t lv = 1; lv <= top; ++lv) c += refined(lv) ? 1 : 0;
        return c;
    }
};

struct ExplicitSet {
    std::vector<BigInt> elements;  // ascending, deduplicated

    explicit ExplicitSet(std::vector<BigInt> e) : elements(std::move(e)) {
        std::sort(elements.begin(), elements.end());
        elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
    }
};

struct Progression {
    BigInt a, r;

    Progression(BigInt start, BigInt step) : a(std::move(start)), r(std::move(step)) {
        if (r <= 0) throw std::invalid_argument("Progression: step must be positive");
    }
};

struct SftSet {
    TransitionSystem system;
};

struct PrimesSet {
    int64_t bound;
    std::vector<char> flag;        // flag[i] != 0 iff i is prime
    std::vector<int64_t> members;  // ascending

    explicit PrimesSet(int64_t horizon) : bound(horizon) {
        if (bound < 2 || bound > 200'000'000)
            throw std::invalid_argument("PrimesSet: bound out of range");
        flag.assign(static_cast<std::size_t>(bound) + 1, 1);
        flag[0] = flag[1] = 0;
        for (int64_t i = 2; i * i <= bound; ++i)
            if (flag[static_cast<std::size_t>(i)])
                for (int64_t k = i * i; k <= bound; k += i) flag[static_cast<std::size_t>(k)] = 0;
        for (int64_t i = 2; i <= bound; ++i)
            if (flag[static_cast<std::size_t>(i)]) members.push_back(i);
    }
};

struct TotientsSet {
    int64_t bound;
    std::vector<int64_t> values;  // distinct phi(m) for m <= bound, ascending

    explicit TotientsSet(int64_t horizon) : bound(horizon) {
        if (bound < 1 || bound > 200'000'000)
            throw std::invalid_argument("TotientsSet: bound out of range");
        std::vector<int64_t> phi(static_cast<std::size_t>(bound) + 1, 0);
        std::vector<int64_t> primes;
        phi[1] = 1;
        for (int64_t i = 2; i <= bound; ++i) {
            if (phi[static_cast<std::size_t>(i)] == 0) {
                phi[static_cast<std::size_t>(i)] = i - 1;
                primes.push_back(i);
            }
            for (int64_t q : primes) {
                if (q > bound / i) break;
                if (i % q == 0) {
                    phi[static_cast<std::size_t>(i * q)] = phi[static_cast<std::size_t>(i)] * q;
                    break;
                }
                phi[static_cast<std::size_t>(i * q)] = phi[static_cast<std::size_t>(i)] * (q - 1);
            }
        }
        values.assign(phi.begin() + 1, phi.end());
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
    }
};

struct PowersSet {
    BigInt q;
    int64_t bound;  // largest exponent the generator is trusted for
};

struct TheoremESet {
    TheoremESchedule schedule;
};

struct SetSpec {
    PrimeBase base;
    Domain domain;
    std::variant<ExplicitSet, Progression, SftSet, PrimesSet, TotientsSet, PowersSet, TheoremESet>
        body;
};

// Residues mod p^level meeting the closure; exact for constructions whose
// covers are computed, a lower bound for sieve- and table-backed sets.
struct LevelCover {
    PrimeBase base;
    uint64_t level;
    std::vector<BigInt> residues;  // ascending, in [0, p^level)
    Exactness exactness;
};

struct CheckResult {
    bool pass;
    std::optional<BigInt> counterexample;
};

namespace detail {

constexpr int64_t kMaxMaterialize = 2'000'000;

inline BigInt mod_reduce(const BigInt& x, const BigInt& m) { return ((x % m) + m) % m; }

inline std::vector<int64_t> digits_of(BigInt x, int64_t p) {
    std::vector<int64_t> d;
    while (x != 0) {
        d.push_back(static_cast<int64_t>(x % p));
        x /= p;
    }
    return d;
}

inline int64_t to_small(const BigInt& v, const char* what) {
    if (v > std::numeric_limits<int64_t>::max() || v < std::numeric_limits<int64_t>::min())
        throw std::invalid_argument(std::string(what) + ": value too large to serialize");
    return static_cast<int64_t>(v);
}

inline BigInt mod_inverse(const BigInt& a, const BigInt& m) {
    BigInt r0 = m, r1 = mod_reduce(a, m), s0 = 0, s1 = 1;
    while (r1 != 0) {
        const BigInt q = r0 / r1;
        r0 -= q * r1;
        std::swap(r0, r1);
        s0 -= q * s1;
        std::swap(s0, s1);
    }
    return mod_reduce(s0, m);  // callers guarantee gcd(a, m) = 1
}

// Negative integers carry complemented digits; membership and counting reduce
// to the mirrored system applied to -1-x.
inline TransitionSystem complement_system(const TransitionSystem& sys) {
    const auto p = static_cast<std::size_t>(sys.base.p);
    std::vector<std::vector<int>> m(p, std::vector<int>(p, 0));
    for (std::size_t u = 0; u < p; ++u)
        for (std::size_t v = 0; v < p; ++v) m[u][v] = sys.matrix[p - 1 - u][p - 1 - v];
    std::vector<int64_t> digits;
    digits.reserve(sys.allowed.size());
    for (int64_t d : sys.allowed) digits.push_back(sys.base.p - 1 - d);
    return TransitionSystem(sys.base, std::move(m), std::move(digits));
}

inline bool sft_member_nonneg(const TransitionSystem& sys, const BigInt& x) {
    if (!sys.edge(0, 0)) return false;  // the constant tail itself
    const auto d = digits_of(x, sys.base.p);
    int64_t above = 0;
    for (std::size_t i = d.size(); i-- > 0;) {
        if (!sys.edge(d[i], above)) return false;
        above = d[i];
    }
    return true;
}

// paths[L][u]: admissible strings on positions L-1..0 with top digit u, every
// adjacent pair checked, and the position-0 digit satisfying `bottom`.
inline std::vector<std::vector<BigInt>> sft_paths(const TransitionSystem& sys, std::size_t rows,
                                                  const std::vector<char>* bottom) {
    const auto p = static_cast<std::size_t>(sys.base.p);
    std::vector<std::vector<BigInt>> paths(rows + 1, std::vector<BigInt>(p, 0));
    for (std::size_t u = 0; u < p; ++u)
        paths[1][u] = (sys.digit_ok(static_cast<int64_t>(u)) &&
                       (bottom == nullptr || (*bottom)[u] != 0))
                          ? 1
                          : 0;
    for (std::size_t L = 2; L <= rows; ++L)
        for (std::size_t u = 0; u < p; ++u) {
            BigInt acc = 0;
            for (std::size_t v = 0; v < p; ++v)
                if (sys.edge(static_cast<int64_t>(v), static_cast<int64_t>(u)))
                    acc += paths[L - 1][v];
            paths[L][u] = std::move(acc);
        }
    return paths;
}

// members of the nonnegative branch in [0, bound]; `bottom` constrains the
// digit at position 0 (used to glue a forced residue block underneath).
inline BigInt sft_count_upto(const TransitionSystem& sys, const BigInt& bound,
                             const std::vector<char>* bottom = nullptr) {
    if (bound < 0 || !sys.edge(0, 0)) return 0;
    auto bot = [&](int64_t d) {
        return bottom == nullptr || (*bottom)[static_cast<std::size_t>(d)] != 0;
    };
    const auto D = digits_of(bound, sys.base.p);
    const std::size_t W = D.size();
    if (W == 0) return bot(0) ? 1 : 0;
    const auto paths = sft_paths(sys, W, bottom);
    BigInt total = 0;
    int64_t above = 0;
    bool tight = true;
    for (std::size_t j = W; j-- > 0;) {
        for (int64_t cur = 0; cur < D[j]; ++cur)
            if (sys.edge(cur, above)) total += paths[j + 1][static_cast<std::size_t>(cur)];
        if (!sys.edge(D[j], above)) {
            tight = false;
            break;
        }
        above = D[j];
    }
    if (tight && bot(D[0])) total += 1;
    return total;
}

inline BigInt sft_ball_count_upto(const TransitionSystem& sys, const Ball& ball,
                                  const BigInt& bound) {
    if (ball.level == 0) return sft_count_upto(sys, bound);
    const int64_t p = sys.base.p;
    auto f = digits_of(ball.residue, p);
    f.resize(static_cast<std::size_t>(ball.level), 0);
    for (int64_t d : f)
        if (!sys.digit_ok(d)) return 0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i)
        if (!sys.edge(f[i], f[i + 1])) return 0;
    const BigInt ymax = floor_div(bound - ball.residue, ball.modulus());
    std::vector<char> bottom(static_cast<std::size_t>(p), 0);
    for (int64_t d = 0; d < p; ++d)
        bottom[static_cast<std::size_t>(d)] = sys.edge(f.back(), d) ? 1 : 0;
    return sft_count_upto(sys, ymax, &bottom);
}

inline void sft_collect_upto(const TransitionSystem& sys, const BigInt& bound,
                             std::vector<BigInt>& out) {
    if (bound < 0 || !sys.edge(0, 0)) return;
    if (sft_count_upto(sys, bound) > kMaxMaterialize)
        throw std::length_error("enumerate: too many members to materialize");
    const int64_t p = sys.base.p;
    const auto D = digits_of(bound, p);
    const auto W = static_cast<int64_t>(D.size());
    if (W == 0) {
        out.push_back(0);
        return;
    }
    const auto paths = sft_paths(sys, static_cast<std::size_t>(W), nullptr);
    std::vector<BigInt> pw(static_cast<std::size_t>(W));
    pw[0] = 1;
    for (std::size_t i = 1; i < pw.size(); ++i) pw[i] = pw[i - 1] * p;
    std::function<void(int64_t, int64_t, bool, const BigInt&)> rec =
        [&](int64_t pos, int64_t above, bool tight, const BigInt& acc) {
            if (pos < 0) {
                out.push_back(acc);
                return;
            }
            const int64_t limit = tight ? D[static_cast<std::size_t>(pos)] : p - 1;
            for (int64_t cur = 0; cur <= limit; ++cur) {
                if (!sys.edge(cur, above)) continue;
                if (paths[static_cast<std::size_t>(pos) + 1][static_cast<std::size_t>(cur)] == 0)
                    continue;
                rec(pos - 1, cur, tight && cur == limit,
                    acc + BigInt(cur) * pw[static_cast<std::size_t>(pos)]);
            }
        };
    rec(W - 1, 0, true, 0);
}

// blocks[L][u]: admissible digit blocks of length L with top digit u
inline std::vector<std::vector<BigInt>> sft_blocks(const TransitionSystem& sys,
                                                   std::size_t rows) {
    const auto p = static_cast<std::size_t>(sys.base.p);
    std::vector<std::vector<BigInt>> blocks(rows + 1, std::vector<BigInt>(p, 0));
    for (std::size_t u = 0; u < p; ++u)
        blocks[1][u] = sys.digit_ok(static_cast<int64_t>(u)) ? 1 : 0;
    for (std::size_t L = 2; L <= rows; ++L)
        for (std::size_t u = 0; u < p; ++u) {
            BigInt acc = 0;
            for (std::size_t v = 0; v < p; ++v)
                if (sys.edge(static_cast<int64_t>(v), static_cast<int64_t>(u)))
                    acc += blocks[L - 1][v];
            blocks[L][u] = std::move(acc);
        }
    return blocks;
}

inline bool sft_any_survivor(const TransitionSystem& sys) {
    for (int64_t u = 0; u < sys.base.p; ++u)
        if (sys.survives(u)) return true;
    return false;
}

inline BigInt sft_cover_size(const TransitionSystem& sys, uint64_t n) {
    if (n == 0) return sft_any_survivor(sys) ? 1 : 0;
    const auto blocks = sft_blocks(sys, n);
    BigInt total = 0;
    for (int64_t u = 0; u < sys.base.p; ++u)
        if (sys.survives(u)) total += blocks[n][static_cast<std::size_t>(u)];
    return total;
}

inline std::vector<BigInt> sft_cover_residues(const TransitionSystem& sys, uint64_t n) {
    std::vector<BigInt> out;
    if (n == 0) {
        if (sft_any_survivor(sys)) out.push_back(0);
        return out;
    }
    if (sft_cover_size(sys, n) > kMaxMaterialize)
        throw std::length_error("level_cover: too many residues to materialize");
    const int64_t p = sys.base.p;
    const auto blocks = sft_blocks(sys, n);
    std::vector<BigInt> pw(n);
    pw[0] = 1;
    for (std::size_t i = 1; i < n; ++i) pw[i] = pw[i - 1] * p;
    const auto top = static_cast<int64_t>(n) - 1;
    std::function<void(int64_t, int64_t, const BigInt&)> rec = [&](int64_t pos, int64_t above,
                                                                   const BigInt& acc) {
        if (pos < 0) {
            out.push_back(acc);
            return;
        }
        for (int64_t cur = 0; cur < p; ++cur) {
            if (pos == top ? !sys.survives(cur) : !sys.edge(cur, above)) continue;
            if (blocks[static_cast<std::size_t>(pos) + 1][static_cast<std::size_t>(cur)] == 0)
                continue;
            rec(pos - 1, cur, acc + BigInt(cur) * pw[static_cast<std::size_t>(pos)]);
        }
    };
    rec(top, 0, 0);
    return out;
}

// digit sets per position for the refine/freeze construction
inline std::vector<std::vector<int64_t>> te_digit_table(const TheoremESchedule& s,
                                                        uint64_t width) {
    static const std::vector<int64_t> frozen{0};
    std::vector<std::vector<int64_t>> table;
    table.reserve(width);
    for (uint64_t j = 0; j < width; ++j)
        table.push_back(j < s.depth && s.refined(j + 1) ? s.refine_digits : frozen);
    return table;
}

inline bool te_member(const TheoremESchedule& s, const BigInt& x) {
    if (x < 0) return false;
    const auto d = digits_of(x, s.base.p);
    if (d.size() > s.depth) return false;
    for (std::size_t j = 0; j < d.size(); ++j) {
        if (s.refined(static_cast<uint64_t>(j) + 1)) {
            if (!std::binary_search(s.refine_digits.begin(), s.refine_digits.end(), d[j]))
                return false;
        } else if (d[j] != 0) {
            return false;
        }
    }
    return true;
}

// integers in [0, bound] whose digit at position j lies in table[j]; values
// with p^W <= x never qualify, where W = table width
inline BigInt positional_count_upto(int64_t p, const std::vector<std::vector<int64_t>>& table,
                                    const BigInt& bound) {
    if (bound < 0) return 0;
    const std::size_t W = table.size();
    std::vector<BigInt> weight(W + 1);  // weight[j]: free strings on positions < j
    weight[0] = 1;
    for (std::size_t j = 0; j < W; ++j) weight[j + 1] = weight[j] * BigInt(table[j].size());
    if (bound >= ipow(p, static_cast<uint64_t>(W))) return weight[W];
    auto D = digits_of(bound, p);
    D.resize(W, 0);
    BigInt total = 0;
    bool tight = true;
    for (std::size_t j = W; j-- > 0;) {
        const auto& dset = table[j];
        const auto below = std::lower_bound(dset.begin(), dset.end(), D[j]) - dset.begin();
        total += BigInt(below) * weight[j];
        if (!std::binary_search(dset.begin(), dset.end(), D[j])) {
            tight = false;
            break;
        }
    }
    if (tight) total += 1;
    return total;
}

inline void positional_collect_upto(int64_t p, const std::vector<std::vector<int64_t>>& table,
                                    const BigInt& bound, std::vector<BigInt>& out) {
    if (bound < 0) return;
    if (positional_count_upto(p, table, bound) > kMaxMaterialize)
        throw std::length_error("enumerate: too many members to materialize");
    const auto W = static_cast<int64_t>(table.size());
    BigInt b = bound;
    const BigInt top = ipow(p, static_cast<uint64_t>(W));
    if (b >= top) b = top - 1;
    auto D = digits_of(b, p);
    D.resize(static_cast<std::size_t>(W), 0);
    std::vector<BigInt> pw(static_cast<std::size_t>(W));
    if (W > 0) pw[0] = 1;
    for (std::size_t i = 1; i < pw.size(); ++i) pw[i] = pw[i - 1] * p;
    std::function<void(int64_t, bool, const BigInt&)> rec = [&](int64_t pos, bool tight,
                                                                const BigInt& acc) {
        if (pos < 0) {
            out.push_back(acc);
            return;
        }
        for (int64_t d : table[static_cast<std::size_t>(pos)]) {
            if (tight && d > D[static_cast<std::size_t>(pos)]) break;
            rec(pos - 1, tight && d == D[static_cast<std::size_t>(pos)],
                acc + BigInt(d) * pw[static_cast<std::size_t>(pos)]);
        }
    };
    rec(W - 1, true, 0);
}

inline std::vector<BigInt> residues_of_list(const std::vector<int64_t>& xs,
                                            const BigInt& modulus) {
    if (modulus <= std::numeric_limits<int64_t>::max()) {
        const auto m = static_cast<int64_t>(modulus);
        std::set<int64_t> rs;
        for (int64_t x : xs) rs.insert(x % m);  // sources are nonnegative
        return std::vector<BigInt>(rs.begin(), rs.end());
    }
    std::set<BigInt> rs;
    for (int64_t x : xs) rs.insert(mod_reduce(x, modulus));
    return std::vector<BigInt>(rs.begin(), rs.end());
}

// residues of q^m mod p^n for 0 <= m <= bound; the walk is purely periodic,
// so it stops as soon as it returns to the start
inline std::vector<BigInt> power_residues(const BigInt& q, int64_t bound, const BigInt& modulus) {
    std::set<BigInt> rs;
    BigInt val = mod_reduce(1, modulus);
    for (int64_t m = 0; m <= bound; ++m) {
        if (m > 0 && val == mod_reduce(1, modulus)) break;
        rs.insert(val);
        val = mod_reduce(val * q, modulus);
    }
    return std::vector<BigInt>(rs.begin(), rs.end());
}

}  // namespace detail

inline bool contains(const SetSpec& spec, const BigInt& x) {
    if (const auto* e = std::get_if<ExplicitSet>(&spec.body))
        return std::binary_search(e->elements.begin(), e->elements.end(), x);
    if (const auto* ap = std::get_if<Progression>(&spec.body)) {
        if (spec.domain == Domain::N && x < ap->a) return false;
        return detail::mod_reduce(x - ap->a, ap->r) == 0;
    }
    if (const auto* s = std::get_if<SftSet>(&spec.body)) {
        if (x >= 0) return detail::sft_member_nonneg(s->system, x);
        if (spec.domain != Domain::Z) return false;
        return detail::sft_member_nonneg(detail::complement_system(s->system), -x - 1);
    }
    if (const auto* pr = std::get_if<PrimesSet>(&spec.body)) {
        if (x < 2) return false;
        if (x > pr->bound) throw std::out_of_range("contains: beyond the sieve bound");
        return pr->flag[static_cast<std::size_t>(x)] != 0;
    }
    if (const auto* t = std::get_if<TotientsSet>(&spec.body)) {
        if (x < 1 || x > t->values.back()) return false;
        return std::binary_search(t->values.begin(), t->values.end(),
                                  static_cast<int64_t>(x));
    }
    if (const auto* pw = std::get_if<PowersSet>(&spec.body)) {
        if (pw->q < 2) throw std::invalid_argument("PowersSet: generator must be >= 2");
        if (x < 1) return false;
        BigInt val = 1;
        for (int64_t m = 0; val < x; ++m) {
            if (m >= pw->bound)
                throw std::out_of_range("contains: beyond the exponent bound");
            val *= pw->q;
        }
        return val == x;
    }
    const auto& te = std::get<TheoremESet>(spec.body);
    return detail::te_member(te.schedule, x);
}

inline std::vector<BigInt> enumerate(const SetSpec& spec, const Interval& iv) {
    if (const auto* e = std::get_if<ExplicitSet>(&spec.body)) {
        const auto first = std::upper_bound(e->elements.begin(), e->elements.end(), iv.lo);
        const auto last = std::upper_bound(e->elements.begin(), e->elements.end(), iv.hi);
        return std::vector<BigInt>(first, last);
    }
    if (const auto* ap = std::get_if<Progression>(&spec.body)) {
        BigInt klo = floor_div(iv.lo - ap->a, ap->r) + 1;
        const BigInt khi = floor_div(iv.hi - ap->a, ap->r);
        if (spec.domain == Domain::N && klo < 0) klo = 0;
        if (khi - klo + 1 > detail::kMaxMaterialize)
            throw std::length_error("enumerate: too many members to materialize");
        std::vector<BigInt> out;
        for (BigInt k = klo; k <= khi; ++k) out.push_back(ap->a + k * ap->r);
        return out;
    }
    if (const auto* s = std::get_if<SftSet>(&spec.body)) {
        std::vector<BigInt> out;
        if (spec.domain == Domain::Z && iv.lo < -1) {
            const BigInt top = iv.hi < -1 ? iv.hi : BigInt(-1);
            std::vector<BigInt> ts;
            detail::sft_collect_upto(detail::complement_system(s->system), -2 - iv.lo, ts);
            const BigInt tmin = -1 - top;
            for (std::size_t i = ts.size(); i-- > 0;) {
                if (ts[i] < tmin) break;
                out.push_back(-1 - ts[i]);
            }
        }
        if (iv.hi >= 0) {
            std::vector<BigInt> ps;
            detail::sft_collect_upto(s->system, iv.hi, ps);
            for (const auto& x : ps)
                if (x > iv.lo) out.push_back(x);
        }
        return out;
    }
    if (const auto* pr = std::get_if<PrimesSet>(&spec.body)) {
        if (iv.hi > pr->bound) throw std::out_of_range("enumerate: beyond the sieve bound");
        std::vector<BigInt> out;
        for (int64_t x : pr->members)
            if (iv.contains(x)) out.emplace_back(x);
        return out;
    }
    if (const auto* t = std::get_if<TotientsSet>(&spec.body)) {
        std::vector<BigInt> out;
        for (int64_t v : t->values)
            if (iv.contains(v)) out.emplace_back(v);
        return out;
    }
    if (const auto* pw = std::get_if<PowersSet>(&spec.body)) {
        if (pw->q < 2) throw std::invalid_argument("PowersSet: generator must be >= 2");
        std::vector<BigInt> out;
        BigInt val = 1;
        for (int64_t m = 0; val <= iv.hi; ++m) {
            if (m > pw->bound)
                throw std::out_of_range("enumerate: beyond the exponent bound");
            if (val > iv.lo) out.push_back(val);
            val *= pw->q;
        }
        return out;
    }
    const auto& te = std::get<TheoremESet>(spec.body);
    const auto& sch = te.schedule;
    if (iv.hi > ipow(sch.base.p, sch.depth))
        throw std::out_of_range("enumerate: beyond the construction depth");
    std::vector<BigInt> all;
    detail::positional_collect_upto(sch.base.p, detail::te_digit_table(sch, sch.depth), iv.hi,
                                    all);
    std::vector<BigInt> out;
    for (const auto& x : all)
        if (x > iv.lo) out.push_back(x);
    return out;
}

inline BigInt count_in(const SetSpec& spec, const Interval& iv) {
    if (const auto* e = std::get_if<ExplicitSet>(&spec.body)) {
        const auto first = std::upper_bound(e->elements.begin(), e->elements.end(), iv.lo);
        const auto last = std::upper_bound(e->elements.begin(), e->elements.end(), iv.hi);
        return BigInt(last - first);
    }
    if (const auto* ap = std::get_if<Progression>(&spec.body)) {
        BigInt lo = iv.lo;
        if (spec.domain == Domain::N && lo < ap->a - 1) lo = ap->a - 1;
        if (lo >= iv.hi) return 0;
        return floor_div(iv.hi - ap->a, ap->r) - floor_div(lo - ap->a, ap->r);
    }
    if (const auto* s = std::get_if<SftSet>(&spec.body)) {
        BigInt total = 0;
        if (spec.domain == Domain::Z && iv.lo < -1) {
            const BigInt top = iv.hi < -1 ? iv.hi : BigInt(-1);
            const TransitionSystem comp = detail::complement_system(s->system);
            total += detail::sft_count_upto(comp, -2 - iv.lo) -
                     detail::sft_count_upto(comp, -2 - top);
        }
        if (iv.hi >= 0) {
            const BigInt lo = iv.lo < -1 ? BigInt(-1) : iv.lo;
            total += detail::sft_count_upto(s->system, iv.hi) -
                     detail::sft_count_upto(s->system, lo);
        }
        return total;
    }
    if (const auto* pr = std::get_if<PrimesSet>(&spec.body)) {
        if (iv.hi > pr->bound) throw std::out_of_range("count_in: beyond the sieve bound");
        const auto first = std::upper_bound(pr->members.begin(), pr->members.end(), iv.lo);
        const auto last = std::upper_bound(pr->members.begin(), pr->members.end(), iv.hi);
        return BigInt(last - first);
    }
    if (const auto* t = std::get_if<TotientsSet>(&spec.body)) {
        const auto first = std::upper_bound(t->values.begin(), t->values.end(), iv.lo);
        const auto last = std::upper_bound(t->values.begin(), t->values.end(), iv.hi);
        return BigInt(last - first);
    }
    if (const auto* pw = std::get_if<PowersSet>(&spec.body)) {
        if (pw->q < 2) throw std::invalid_argument("PowersSet: generator must be >= 2");
        BigInt total = 0, val = 1;
        for (int64_t m = 0; val <= iv.hi; ++m) {
            if (m > pw->bound) throw std::out_of_range("count_in: beyond the exponent bound");
            if (val > iv.lo) ++total;
            val *= pw->q;
        }
        return total;
    }
    const auto& te = std::get<TheoremESet>(spec.body);
    const auto& sch = te.schedule;
    if (iv.hi > ipow(sch.base.p, sch.depth))
        throw std::out_of_range("count_in: beyond the construction depth");
    const auto table = detail::te_digit_table(sch, sch.depth);
    return detail::positional_count_upto(sch.base.p, table, iv.hi) -
           detail::positional_count_upto(sch.base.p, table, iv.lo);
}

inline BigInt count_in_ball(const SetSpec& spec, const Ball& ball, const Interval& iv) {
    if (!(ball.base == spec.base))
        throw std::invalid_argument("count_in_ball: ball base differs from the set base");
    const BigInt q = ball.modulus();
    if (const auto* e = std::get_if<ExplicitSet>(&spec.body)) {
        BigInt total = 0;
        for (const auto& v : e->elements)
            if (iv.contains(v) && detail::mod_reduce(v - ball.residue, q) == 0) ++total;
        return total;
    }
    if (const auto* ap = std::get_if<Progression>(&spec.body)) {
        const BigInt g = gcd(ap->r, q);
        if (detail::mod_reduce(ball.residue - ap->a, g) != 0) return 0;
        const BigInt step = ap->r / g * q;
        BigInt x0 = ap->a;
        const BigInt qg = q / g;
        if (qg > 1) {
            const BigInt rg = detail::mod_reduce(ap->r / g, qg);
            const BigInt diff = detail::mod_reduce((ball.residue - ap->a) / g, qg);
            x0 += ap->r * detail::mod_reduce(diff * detail::mod_inverse(rg, qg), qg);
        }
        BigInt lo = iv.lo;
        if (spec.domain == Domain::N && lo < ap->a - 1) lo = ap->a - 1;
        if (lo >= iv.hi) return 0;
        return floor_div(iv.hi - x0, step) - floor_div(lo - x0, step);
    }
    if (const auto* s = std::get_if<SftSet>(&spec.body)) {
        BigInt total = 0;
        if (spec.domain == Domain::Z && iv.lo < -1) {
            const BigInt top = iv.hi < -1 ? iv.hi : BigInt(-1);
            const TransitionSystem comp = detail::complement_system(s->system);
            const Ball mirrored(spec.base, -1 - ball.residue, ball.level);
            total += detail::sft_ball_count_upto(comp, mirrored, -2 - iv.lo) -
                     detail::sft_ball_count_upto(comp, mirrored, -2 - top);
        }
        if (iv.hi >= 0) {
            const BigInt lo = iv.lo < -1 ? BigInt(-1) : iv.lo;
            total += detail::sft_ball_count_upto(s->system, ball, iv.hi) -
                     detail::sft_ball_count_upto(s->system, ball, lo);
        }
        return total;
    }
    if (const auto* pr = std::get_if<PrimesSet>(&spec.body)) {
        if (iv.hi > pr->bound)
            throw std::out_of_range("count_in_ball: beyond the sieve bound");
        const auto first = std::upper_bound(pr->members.begin(), pr->members.end(), iv.lo);
        const auto last = std::upper_bound(pr->members.begin(), pr->members.end(), iv.hi);
        BigInt total = 0;
        for (auto it = first; it != last; ++it)
            if (detail::mod_reduce(*it - ball.residue, q) == 0) ++total;
        return total;
    }
    if (const auto* t = std::get_if<TotientsSet>(&spec.body)) {
        const auto first = std::upper_bound(t->values.begin(), t->values.end(), iv.lo);
        const auto last = std::upper_bound(t->values.begin(), t->values.end(), iv.hi);
        BigInt total = 0;
        for (auto it = first; it != last; ++it)
            if (detail::mod_reduce(*it - ball.residue, q) == 0) ++total;
        return total;
    }
    if (std::get_if<PowersSet>(&spec.body) != nullptr) {
        BigInt total = 0;
        for (const auto& v : enumerate(spec, iv))
            if (detail::mod_reduce(v - ball.residue, q) == 0) ++total;
        return total;
    }
    const auto& te = std::get<TheoremESet>(spec.body);
    const auto& sch = te.schedule;
    if (iv.hi > ipow(sch.base.p, sch.depth))
        throw std::out_of_range("count_in_ball: beyond the construction depth");
    const auto n = static_cast<uint64_t>(ball.level);
    if (n >= sch.depth) {
        // at this resolution the ball pins the member completely
        return (ball.residue < ipow(sch.base.p, sch.depth) &&
                detail::te_member(sch, ball.residue) && iv.contains(ball.residue))
                   ? 1
                   : 0;
    }
    const auto table = detail::te_digit_table(sch, sch.depth);
    const auto f = [&] {
        auto d = detail::digits_of(ball.residue, sch.base.p);
        d.resize(n, 0);
        return d;
    }();
    for (std::size_t j = 0; j < n; ++j)
        if (!std::binary_search(table[j].begin(), table[j].end(), f[j])) return BigInt(0);
    const std::vector<std::vector<int64_t>> rest(table.begin() + static_cast<int64_t>(n),
                                                 table.end());
    const auto count_upto = [&](const BigInt& bound) {
        return detail::positional_count_upto(sch.base.p, rest,
                                             floor_div(bound - ball.residue, q));
    };
    return count_upto(iv.hi) - count_upto(iv.lo);
}

inline BigInt cover_size(const SetSpec& spec, uint64_t n) {
    const BigInt modulus = ipow(spec.base.p, n);
    if (const auto* e = std::get_if<ExplicitSet>(&spec.body)) {
        std::set<BigInt> rs;
        for (const auto& v : e->elements) rs.insert(detail::mod_reduce(v, modulus));
        return BigInt(rs.size());
    }
    if (const auto* ap = std::get_if<Progression>(&spec.body)) {
        const auto v = valuation(ap->r, spec.base).is_infinite()
                           ? n
                           : std::min<uint64_t>(valuation(ap->r, spec.base).value(), n);
        return ipow(spec.base.p, n - v);
    }
    if (const auto* s = std::get_if<SftSet>(&spec.body)) return detail::sft_cover_size(s->system, n);
    if (const auto* pr = std::get_if<PrimesSet>(&spec.body))
        return BigInt(detail::residues_of_list(pr->members, modulus).size());
    if (const auto* t = std::get_if<TotientsSet>(&spec.body))
        return BigInt(detail::residues_of_list(t->values, modulus).size());
    if (const auto* pw = std::get_if<PowersSet>(&spec.body))
        return BigInt(detail::power_residues(pw->q, pw->bound, modulus).size());
    const auto& sch = std::get<TheoremESet>(spec.body).schedule;
    return ipow(BigInt(sch.refine_digits.size()),
                sch.refined_count(std::min<uint64_t>(n, sch.depth)));
}

inline LevelCover level_cover(const SetSpec& spec, uint64_t n) {
    const BigInt modulus = ipow(spec.base.p, n);
    if (const auto* e = std::get_if<ExplicitSet>(&spec.body)) {
        std::set<BigInt> rs;
        for (const auto& v : e->elements) rs.insert(detail::mod_reduce(v, modulus));
        return LevelCover{spec.base, n, std::vector<BigInt>(rs.begin(), rs.end()),
                          Exactness::Exact};
    }
    if (const auto* ap = std::get_if<Progression>(&spec.body)) {
        const BigInt size = cover_size(spec, n);
        if (size > detail::kMaxMaterialize)
            throw std::length_error("level_cover: too many residues to materialize");
        const BigInt g = modulus / size;  // p^min(v, n)
        const BigInt first = detail::mod_reduce(ap->a, g);
        std::vector<BigInt> rs;
        for (BigInt r = first; r < modulus; r += g) rs.push_back(r);
        return LevelCover{spec.base, n, std::move(rs), Exactness::Exact};
    }
    if (const auto* s = std::get_if<SftSet>(&spec.body))
        return LevelCover{spec.base, n, detail::sft_cover_residues(s->system, n),
                          Exactness::Exact};
    if (const auto* pr = std::get_if<PrimesSet>(&spec.body))
        return LevelCover{spec.base, n, detail::residues_of_list(pr->members, modulus),
                          Exactness::LowerBound};
    if (const auto* t = std::get_if<TotientsSet>(&spec.body))
        return LevelCover{spec.base, n, detail::residues_of_list(t->values, modulus),
                          Exactness::LowerBound};
    if (const auto* pw = std::get_if<PowersSet>(&spec.body))
        return LevelCover{spec.base, n, detail::power_residues(pw->q, pw->bound, modulus),
                          Exactness::LowerBound};
    const auto& sch = std::get<TheoremESet>(spec.body).schedule;
    if (cover_size(spec, n) > detail::kMaxMaterialize)
        throw std::length_error("level_cover: too many residues to materialize");
    std::vector<BigInt> rs;
    detail::positional_collect_upto(sch.base.p, detail::te_digit_table(sch, n), modulus - 1, rs);
    return LevelCover{spec.base, n, std::move(rs), Exactness::Exact};
}

// level-m cover residues lying inside the given coarser ball (ball.level <= m)
inline BigInt cover_size_in_ball(const SetSpec& spec, uint64_t m, const Ball& ball) {
    const auto n = static_cast<uint64_t>(ball.level);
    if (n > m) throw std::invalid_argument("cover_size_in_ball: ball finer than the cover");
    const BigInt modulus = ipow(spec.base.p, m);
    if (const auto* s = std::get_if<SftSet>(&spec.body)) {
        const TransitionSystem& sys = s->system;
        const int64_t p = sys.base.p;
        auto f = detail::digits_of(ball.residue, p);
        f.resize(n, 0);
        for (int64_t d : f)
            if (!sys.digit_ok(d)) return 0;
        for (std::size_t i = 0; i + 1 < f.size(); ++i)
            if (!sys.edge(f[i], f[i + 1])) return 0;
        if (n == m) {
            if (n == 0) return detail::sft_cover_size(sys, 0);
            return BigInt(sys.survives(f.back()) ? 1 : 0);
        }
        // blocks on positions n..m-1 glued onto the forced residue
        std::vector<BigInt> cnt(static_cast<std::size_t>(p), 0);
        for (int64_t u = 0; u < p; ++u)
            cnt[static_cast<std::size_t>(u)] =
                (n == 0 ? sys.digit_ok(u) : sys.edge(f.back(), u)) ? 1 : 0;
        for (uint64_t L = n + 1; L < m; ++L) {
            std::vector<BigInt> next(static_cast<std::size_t>(p), 0);
            for (int64_t u = 0; u < p; ++u) {
                BigInt acc = 0;
                for (int64_t v = 0; v < p; ++v)
                    if (sys.edge(v, u)) acc += cnt[static_cast<std::size_t>(v)];
                next[static_cast<std::size_t>(u)] = std::move(acc);
            }
            cnt = std::move(next);
        }
        BigInt total = 0;
        for (int64_t u = 0; u < p; ++u)
            if (sys.survives(u)) total += cnt[static_cast<std::size_t>(u)];
        return total;
    }
    if (const auto* ap = std::get_if<Progression>(&spec.body)) {
        const auto v = valuation(ap->r, spec.base).is_infinite()
                           ? m
                           : std::min<uint64_t>(valuation(ap->r, spec.base).value(), m);
        const uint64_t coarse = std::min<uint64_t>(v, n);
        if (detail::mod_reduce(ball.residue - ap->a, ipow(spec.base.p, coarse)) != 0) return 0;
        return ipow(spec.base.p, m - std::max<uint64_t>(v, n));
    }
    if (const auto* te = std::get_if<TheoremESet>(&spec.body)) {
        const auto& sch = te->schedule;
        const auto table = detail::te_digit_table(sch, m);
        auto f = detail::digits_of(ball.residue, sch.base.p);
        f.resize(n, 0);
        for (std::size_t j = 0; j < n; ++j)
            if (!std::binary_search(table[j].begin(), table[j].end(), f[j])) return 0;
        BigInt total = 1;
        for (uint64_t j = n; j < m; ++j) total *= BigInt(table[j].size());
        return total;
    }
    // materialized kinds: filter the residue list
    BigInt total = 0;
    const BigInt q = ball.modulus();
    for (const auto& r : level_cover(spec, m).residues)
        if (detail::mod_reduce(r - ball.residue, q) == 0) ++total;
    return total;
}

inline Closure closure_contains(const SetSpec& spec, const BigInt& x, uint64_t depth) {
    if (depth == 0) throw std::invalid_argument("closure_contains: depth must be >= 1");
    const BigInt modulus = ipow(spec.base.p, depth);
    const BigInt r = detail::mod_reduce(x, modulus);
    if (const auto* e = std::get_if<ExplicitSet>(&spec.body)) {
        for (const auto& v : e->elements)
            if (detail::mod_reduce(v, modulus) == r) return Closure::Yes;
        return Closure::No;
    }
    if (const auto* ap = std::get_if<Progression>(&spec.body)) {
        const auto v = valuation(ap->r, spec.base).is_infinite()
                           ? depth
                           : std::min<uint64_t>(valuation(ap->r, spec.base).value(), depth);
        return detail::mod_reduce(x - ap->a, ipow(spec.base.p, v)) == 0 ? Closure::Yes
                                                                        : Closure::No;
    }
    if (const auto* s = std::get_if<SftSet>(&spec.body)) {
        const TransitionSystem& sys = s->system;
        const bool full = x >= 0
                              ? detail::sft_member_nonneg(sys, x)
                              : detail::sft_member_nonneg(detail::complement_system(sys), -x - 1);
        if (full) return Closure::Yes;
        auto d = detail::digits_of(r, sys.base.p);
        d.resize(depth, 0);
        bool block = sys.survives(d[depth - 1]);
        for (std::size_t i = 0; block && i + 1 < d.size(); ++i) block = sys.edge(d[i], d[i + 1]);
        return block ? Closure::Unknown : Closure::No;
    }
    if (const auto* te = std::get_if<TheoremESet>(&spec.body)) {
        const auto& sch = te->schedule;
        if (detail::te_member(sch, x)) return Closure::Yes;
        const auto table = detail::te_digit_table(sch, depth);
        auto d = detail::digits_of(r, sch.base.p);
        d.resize(depth, 0);
        for (std::size_t j = 0; j < depth; ++j)
            if (!std::binary_search(table[j].begin(), table[j].end(), d[j])) return Closure::No;
        return Closure::Unknown;
    }
    // sieve/table-backed sets: a matching residue certifies, absence cannot
    if (const auto* pr = std::get_if<PrimesSet>(&spec.body)) {
        for (int64_t v : pr->members)
            if (detail::mod_reduce(v - r, modulus) == 0) return Closure::Yes;
        return Closure::Unknown;
    }
    if (const auto* t = std::get_if<TotientsSet>(&spec.body)) {
        for (int64_t v : t->values)
            if (detail::mod_reduce(v - r, modulus) == 0) return Closure::Yes;
        return Closure::Unknown;
    }
    const auto& pw = std::get<PowersSet>(spec.body);
    for (const auto& v : detail::power_residues(pw.q, pw.bound, modulus))
        if (v == r) return Closure::Yes;
    return Closure::Unknown;
}

inline CheckResult is_sigma_invariant(const SetSpec& spec, const BigInt& bound) {
    if (spec.domain == Domain::Z)
        throw std::invalid_argument("is_sigma_invariant: needs an N-domain set");
    if (bound < 0) throw std::invalid_argument("is_sigma_invariant: bound must be >= 0");
    for (const BigInt& n : enumerate(spec, Interval(-1, bound)))
        if (!contains(spec, sigma(n, spec.base))) return {false, n};
    return {true, std::nullopt};
}

// members with 0 < |n| <= bound, most negative first
namespace detail {
inline std::vector<BigInt> dual_scan_members(const SetSpec& spec, const BigInt& bound) {
    std::vector<BigInt> members = enumerate(spec, Interval(-bound - 1, -1));
    const auto pos = enumerate(spec, Interval(0, bound));
    members.insert(members.end(), pos.begin(), pos.end());
    return members;
}
}  // namespace detail

inline CheckResult is_dual_closed(const SetSpec& spec, const BigInt& bound) {
    if (bound < 1) throw std::invalid_argument("is_dual_closed: bound must be >= 1");
    for (const BigInt& n : detail::dual_scan_members(spec, bound))
        if (!contains(spec, dual(n, spec.base))) return {false, n};
    return {true, std::nullopt};
}

// shift invariance of the nonnegative part plus dual closure: together they
// certify that membership is decided by the digit string alone
inline CheckResult sp_membership_sufficient(const SetSpec& spec, const BigInt& bound) {
    if (bound < 1) throw std::invalid_argument("sp_membership_sufficient: bound must be >= 1");
    for (const BigInt& n : enumerate(spec, Interval(-1, bound)))
        if (!contains(spec, sigma(n, spec.base))) return {false, n};
    return is_dual_closed(spec, bound);
}

// candidate integers the set accumulates on: cover residues whose top run is
// already constant for at least tail_len digits determine an integer; report
// the ones the set itself misses
inline std::vector<BigInt> integer_limit_points(const SetSpec& spec, uint64_t depth,
                                                uint64_t tail_len) {
    if (tail_len == 0 || depth <= tail_len)
        throw std::invalid_argument("integer_limit_points: need depth > tail_len >= 1");
    const int64_t p = spec.base.p;
    std::set<BigInt> out;
    for (const BigInt& r : level_cover(spec, depth).residues) {
        auto d = detail::digits_of(r, p);
        d.resize(depth, 0);
        const int64_t c = d[depth - 1];
        if (c != 0 && c != p - 1) continue;
        std::size_t t = depth - 1;
        while (t > 0 && d[t - 1] == c) --t;
        if (depth - t < tail_len) continue;
        BigInt v = 0;
        for (std::size_t i = t; i-- > 0;) v = v * p + d[i];
        if (c != 0) v -= ipow(p, t);
        if (!contains(spec, v)) out.insert(v);
    }
    return std::vector<BigInt>(out.begin(), out.end());
}

inline SetSpec spec_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);  // parse errors carry position info
    if (!j.is_object()) throw std::invalid_argument("set spec: expected a JSON object");
    try {
        const auto need = [&](const char* key) -> const nlohmann::json& {
            const auto it = j.find(key);
            if (it == j.end())
                throw std::invalid_argument(std::string("set spec: missing key \"") + key +
                                            "\"");
            return *it;
        };
        const std::string kind = need("kind").get<std::string>();
        static const std::map<std::string, std::vector<std::string>> kind_keys = {
            {"explicit", {"elements"}},
            {"ap", {"a", "r"}},
            {"sft", {"matrix", "allowed_digits"}},
            {"primes", {"bound"}},
            {"totients", {"bound"}},
            {"powers", {"q", "bound"}},
            {"theorem_e", {"schedule", "depth", "allowed_digits"}},
        };
        const auto ks = kind_keys.find(kind);
        if (ks == kind_keys.end())
            throw std::invalid_argument("set spec: unknown kind \"" + kind + "\"");
        for (const auto& item : j.items()) {
            const std::string& k = item.key();
            if (k == "p" || k == "domain" || k == "kind") continue;
            if (std::find(ks->second.begin(), ks->second.end(), k) == ks->second.end())
                throw std::invalid_argument("set spec: unknown key \"" + k + "\"");
        }
        const PrimeBase base(need("p").get<int64_t>());
        const std::string dom = need("domain").get<std::string>();
        if (dom != "N" && dom != "Z")
            throw std::invalid_argument("set spec: domain must be \"N\" or \"Z\"");
        const Domain domain = dom == "N" ? Domain::N : Domain::Z;

        if (kind == "explicit") {
            std::vector<BigInt> elems;
            for (const auto& e : need("elements")) elems.emplace_back(e.get<int64_t>());
            return SetSpec{base, domain, ExplicitSet{std::move(elems)}};
        }
        if (kind == "ap")
            return SetSpec{base, domain,
                           Progression{BigInt(need("a").get<int64_t>()),
                                       BigInt(need("r").get<int64_t>())}};
        if (kind == "sft") {
            auto matrix = need("matrix").get<std::vector<std::vector<int>>>();
            std::vector<int64_t> digits;
            if (j.contains("allowed_digits"))
                digits = j.at("allowed_digits").get<std::vector<int64_t>>();
            return SetSpec{base, domain,
                           SftSet{TransitionSystem(base, std::move(matrix), std::move(digits))}};
        }
        if (kind == "primes")
            return SetSpec{base, domain, PrimesSet(need("bound").get<int64_t>())};
        if (kind == "totients")
            return SetSpec{base, domain, TotientsSet(need("bound").get<int64_t>())};
        if (kind == "powers") {
            const BigInt q = need("q").get<int64_t>();
            const BigInt psq = BigInt(base.p) * base.p;
            if (q < 2 || detail::mod_reduce(q - 1, BigInt(base.p)) != 0 ||
                detail::mod_reduce(q - 1, psq) == 0)
                throw std::invalid_argument(
                    "set spec: powers needs q = 1 mod p but not mod p^2");
            return SetSpec{base, domain, PowersSet{q, need("bound").get<int64_t>()}};
        }
        auto cuts = need("schedule").get<std::vector<uint64_t>>();
        const auto depth = need("depth").get<uint64_t>();
        std::vector<int64_t> digits = {0, 2, 4};
        if (j.contains("allowed_digits"))
            digits = j.at("allowed_digits").get<std::vector<int64_t>>();
        return SetSpec{base, domain,
                       TheoremESet{TheoremESchedule(base, std::move(cuts), std::move(digits),
                                                    depth)}};
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("set spec: ") + e.what());
    }
}

inline std::string spec_to_json(const SetSpec& spec) {
    nlohmann::json j;
    j["p"] = spec.base.p;
    j["domain"] = spec.domain == Domain::N ? "N" : "Z";
    if (const auto* e = std::get_if<ExplicitSet>(&spec.body)) {
        j["kind"] = "explicit";
        auto arr = nlohmann::json::array();
        for (const auto& v : e->elements) arr.push_back(detail::to_small(v, "elements"));
        j["elements"] = std::move(arr);
    } else if (const auto* ap = std::get_if<Progression>(&spec.body)) {
        j["kind"] = "ap";
        j["a"] = detail::to_small(ap->a, "a");
        j["r"] = detail::to_small(ap->r, "r");
    } else if (const auto* s = std::get_if<SftSet>(&spec.body)) {
        j["kind"] = "sft";
        j["matrix"] = s->system.matrix;
        if (s->system.allowed.size() != static_cast<std::size_t>(spec.base.p))
            j["allowed_digits"] = s->system.allowed;
    } else if (const auto* pr = std::get_if<PrimesSet>(&spec.body)) {
        j["kind"] = "primes";
        j["bound"] = pr->bound;
    } else if (const auto* t = std::get_if<TotientsSet>(&spec.body)) {
        j["kind"] = "totients";
        j["bound"] = t->bound;
    } else if (const auto* pw = std::get_if<PowersSet>(&spec.body)) {
        j["kind"] = "powers";
        j["q"] = detail::to_small(pw->q, "q");
        j["bound"] = pw->bound;
    } else {
        const auto& sch = std::get<TheoremESet>(spec.body).schedule;
        j["kind"] = "theorem_e";
        j["schedule"] = sch.levels;
        j["depth"] = sch.depth;
        j["allowed_digits"] = sch.refine_digits;
    }
    return j.dump();
}

}  // namespace padfrac
