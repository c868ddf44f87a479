#pragma once

#include <padfrac/measures.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace padfrac {

struct BoxLevel {
    int n;
    BigInt count;  // |G_n|
    double value;  // log|G_n| / (n log p)
};

struct DimensionReport {
    std::vector<BoxLevel> levels;
    double upper = 0.0;  // max over all reported levels
    double lower = 0.0;  // min over the tail half (liminf surrogate)
    Exactness exactness = Exactness::Exact;
};

namespace detail {

// cover exactness is a property of the spec kind; level 1 is the cheap probe
inline Exactness cover_exactness(const SetSpec& spec) { return level_cover(spec, 1).exactness; }

inline double box_value(const BigInt& count, int n, int64_t p) {
    if (count <= 1) return 0.0;
    return log_big(count) / (static_cast<double>(n) * std::log(static_cast<double>(p)));
}

// first level of the trailing ceil(len/2) block: early levels are transient
inline int tail_start(int n_lo, int n_hi) {
    const int len = n_hi - n_lo + 1;
    return n_hi - (len + 1) / 2 + 1;
}

}  // namespace detail

inline std::vector<BigInt> box_counts(const SetSpec& spec, int n_max) {
    if (n_max < 1) throw std::invalid_argument("box_counts: need n_max >= 1");
    std::vector<BigInt> out(static_cast<size_t>(n_max));
    detail::parallel_rows(out.size(),
                          [&](std::size_t i) { out[i] = cover_size(spec, i + 1); });
    return out;
}

inline DimensionReport box_dimension(const SetSpec& spec, int n_lo, int n_hi) {
    if (n_lo < 1 || n_lo > n_hi) throw std::invalid_argument("box_dimension: bad level range");
    DimensionReport rep;
    rep.exactness = detail::cover_exactness(spec);
    rep.levels.assign(static_cast<size_t>(n_hi - n_lo + 1), BoxLevel{0, BigInt(0), 0.0});
    detail::parallel_rows(rep.levels.size(), [&](std::size_t i) {
        const int n = n_lo + static_cast<int>(i);
        BigInt g = cover_size(spec, static_cast<uint64_t>(n));
        const double v = detail::box_value(g, n, spec.base.p);
        rep.levels[i] = BoxLevel{n, std::move(g), v};
    });
    rep.upper = rep.levels.front().value;
    rep.lower = rep.levels.back().value;
    const int tail = detail::tail_start(n_lo, n_hi);
    for (const BoxLevel& lv : rep.levels) {
        rep.upper = std::max(rep.upper, lv.value);
        if (lv.n >= tail) rep.lower = std::min(rep.lower, lv.value);
    }
    return rep;
}

// |G_n| p^{-n}, the level-n upper bound for the closure's Haar measure
inline Rational haar_upper(const SetSpec& spec, int n) {
    if (n < 1) throw std::invalid_argument("haar_upper: need n >= 1");
    return Rational(cover_size(spec, static_cast<uint64_t>(n)),
                    ipow(BigInt(spec.base.p), static_cast<uint64_t>(n)));
}

// |G_n| p^{-ns}, the natural-cover s-value at level n
inline double hausdorff_premeasure(const SetSpec& spec, double s, int n) {
    if (n < 1) throw std::invalid_argument("hausdorff_premeasure: need n >= 1");
    detail::require_exponent(s);
    return ratio_pow(cover_size(spec, static_cast<uint64_t>(n)),
                     ipow(BigInt(spec.base.p), static_cast<uint64_t>(n)), s);
}

struct PerronResult {
    double lambda = 0.0;
    double dimension = 0.0;  // log lambda / log p
};

// Power iteration on a nonnegative 0/1 matrix. Quotients of consecutive
// iterates can oscillate with period 2 on bipartite support; the geometric
// mean of consecutive quotients collapses the oscillation exactly.
inline PerronResult perron_eigenvalue(PrimeBase base, const std::vector<std::vector<int>>& matrix,
                                      double tol = 1e-12) {
    const auto p = static_cast<std::size_t>(base.p);
    if (matrix.size() != p)
        throw std::invalid_argument("perron_eigenvalue: matrix must be p x p");
    for (const auto& row : matrix)
        if (row.size() != p)
            throw std::invalid_argument("perron_eigenvalue: matrix must be p x p");
    if (!(tol > 0.0)) throw std::invalid_argument("perron_eigenvalue: tol must be positive");

    std::vector<double> v(p, 1.0 / static_cast<double>(p));
    double prev_quotient = -1.0;
    double prev_avg = -1.0;
    for (int iter = 0; iter < 1'000'000; ++iter) {
        std::vector<double> w(p, 0.0);
        for (std::size_t u = 0; u < p; ++u)
            for (std::size_t d = 0; d < p; ++d)
                if (matrix[u][d] != 0) w[u] += v[d];
        double total = 0.0;
        for (double x : w) total += x;
        if (total == 0.0) return PerronResult{0.0, 0.0};
        const double quotient = total;  // v sums to 1 on entry
        if (prev_quotient > 0.0) {
            const double avg = std::sqrt(quotient * prev_quotient);
            if (prev_avg > 0.0 && std::abs(avg - prev_avg) < tol) {
                return PerronResult{avg, std::log(avg) / std::log(static_cast<double>(base.p))};
            }
            prev_avg = avg;
        }
        prev_quotient = quotient;
        for (std::size_t u = 0; u < p; ++u) v[u] = w[u] / total;
    }
    throw std::runtime_error("perron_eigenvalue: power iteration did not converge");
}

// the effective matrix of a transition system: its masked edge relation
inline PerronResult perron_eigenvalue(const TransitionSystem& sys, double tol = 1e-12) {
    const auto p = static_cast<std::size_t>(sys.base.p);
    std::vector<std::vector<int>> effective(p, std::vector<int>(p, 0));
    for (std::size_t u = 0; u < p; ++u)
        for (std::size_t d = 0; d < p; ++d)
            effective[u][d] = sys.edge(static_cast<int64_t>(u), static_cast<int64_t>(d)) ? 1 : 0;
    return perron_eigenvalue(sys.base, effective, tol);
}

struct ThetaLevel {
    int n;
    BigInt count;  // sub-cover size inside the ball, at the deepest level
    double value;  // premeasure of the piece divided by p^{-ns}
};

struct ThetaReport {
    double s = 0.0;
    BigInt x;
    std::vector<ThetaLevel> levels;
    double theta_upper = 0.0;
};

// Upper local s-density of the closure at x: the level-m natural cover of
// F ∩ B(x, n) carries the premeasure; dividing by the ball measure^s gives
// the density reading at each n, maximized as the limsup surrogate.
inline ThetaReport theta_upper_local(const SetSpec& spec, double s, const BigInt& x, int n_lo,
                                     int n_hi) {
    if (n_lo < 1 || n_lo > n_hi)
        throw std::invalid_argument("theta_upper_local: bad level range");
    detail::require_exponent(s);
    ThetaReport rep;
    rep.s = s;
    rep.x = x;
    const auto m = static_cast<uint64_t>(n_hi);
    rep.levels.assign(static_cast<size_t>(n_hi - n_lo + 1), ThetaLevel{0, BigInt(0), 0.0});
    detail::parallel_rows(rep.levels.size(), [&](std::size_t i) {
        const int n = n_lo + static_cast<int>(i);
        BigInt cnt = cover_size_in_ball(spec, m, Ball(spec.base, x, n));
        const double value =
            cnt == 0 ? 0.0
                     : ratio_pow(cnt, ipow(BigInt(spec.base.p), m - static_cast<uint64_t>(n)), s);
        rep.levels[i] = ThetaLevel{n, std::move(cnt), value};
    });
    for (const ThetaLevel& lv : rep.levels) rep.theta_upper = std::max(rep.theta_upper, lv.value);
    return rep;
}

struct ThetaStarLevel {
    int n;
    BigInt argmin;     // cover residue attaining the level minimum
    double min_value;  // min over G_n of the local density
};

struct ThetaStarReport {
    double s = 0.0;
    std::vector<ThetaStarLevel> levels;
    double value = 0.0;  // max over the tail half of the per-level minima
};

inline ThetaStarReport theta_star_lower(const SetSpec& spec, double s, int n_lo, int n_hi) {
    if (n_lo < 1 || n_lo > n_hi) throw std::invalid_argument("theta_star_lower: bad level range");
    detail::require_exponent(s);
    if (detail::cover_exactness(spec) != Exactness::Exact)
        throw std::invalid_argument("theta_star_lower: needs exact covers");
    ThetaStarReport rep;
    rep.s = s;
    const auto m = static_cast<uint64_t>(n_hi);
    rep.levels.assign(static_cast<size_t>(n_hi - n_lo + 1), ThetaStarLevel{0, BigInt(0), 0.0});
    detail::parallel_rows(rep.levels.size(), [&](std::size_t i) {
        const int n = n_lo + static_cast<int>(i);
        const LevelCover cover = level_cover(spec, static_cast<uint64_t>(n));
        ThetaStarLevel lv{n, BigInt(0), 0.0};
        bool first = true;
        for (const BigInt& a : cover.residues) {
            const BigInt cnt = cover_size_in_ball(spec, m, Ball(spec.base, a, n));
            const double value =
                cnt == 0
                    ? 0.0
                    : ratio_pow(cnt, ipow(BigInt(spec.base.p), m - static_cast<uint64_t>(n)), s);
            if (first || value < lv.min_value) {
                lv.min_value = value;
                lv.argmin = a;
                first = false;
            }
        }
        rep.levels[i] = std::move(lv);
    });
    const int tail = detail::tail_start(n_lo, n_hi);
    for (const ThetaStarLevel& lv : rep.levels)
        if (lv.n >= tail) rep.value = std::max(rep.value, lv.min_value);
    return rep;
}

struct TheoremALevel {
    int n;
    Rational haar;  // |G_n| p^{-n}
    double slack;   // discretization allowance |G_n| / |I_min|
    double bound;   // haar + slack
};

struct TheoremAReport {
    double density = 0.0;
    std::vector<TheoremALevel> levels;
    double tightest_margin = 0.0;
    std::optional<double> equality_gap;  // only when the covers are exact
    bool pass = false;
};

// density of the projection never exceeds the closure's Haar measure
inline TheoremAReport theorem_a_check(const SetSpec& spec, int n_max,
                                      const WindowSchedule& sched) {
    if (n_max < 1) throw std::invalid_argument("theorem_a_check: need n_max >= 1");
    TheoremAReport rep;
    rep.density = banach_density(spec, sched).value;
    const double min_len = to_double(sched.windows.front().length());
    rep.pass = true;
    bool first = true;
    for (int n = 1; n <= n_max; ++n) {
        const BigInt g = cover_size(spec, static_cast<uint64_t>(n));
        Rational haar(g, ipow(BigInt(spec.base.p), static_cast<uint64_t>(n)));
        const double slack = to_double(g) / min_len;
        const double bound = haar.convert_to<double>() + slack;
        const double margin = bound - rep.density;
        if (first || margin < rep.tightest_margin) rep.tightest_margin = margin;
        first = false;
        if (rep.density > bound) rep.pass = false;
        rep.levels.push_back(TheoremALevel{n, std::move(haar), slack, bound});
    }
    if (detail::cover_exactness(spec) == Exactness::Exact)
        rep.equality_gap =
            std::abs(rep.density - rep.levels.back().haar.convert_to<double>());
    return rep;
}

struct TheoremBReport {
    double lhs = 0.0;        // H_s estimate of the projection
    double rhs = 0.0;        // sum over G_n of eta * ball premeasure
    double lemma_c = 0.0;    // max over G_n of eta
    double lemma_rhs = 0.0;  // lemma_c * premeasure of the whole set
    bool pass = false;
};

// finite-level Riemann surrogate of H_s(projection) <= integral of eta dH^s,
// using that eta is locally constant at level n
inline TheoremBReport theorem_b_check(const SetSpec& spec, double s, int n,
                                      const WindowSchedule& sched, double tol = 1e-6) {
    if (n < 1) throw std::invalid_argument("theorem_b_check: need n >= 1");
    detail::require_exponent(s);
    if (!(tol >= 0.0)) throw std::invalid_argument("theorem_b_check: tol must be >= 0");
    if (detail::cover_exactness(spec) != Exactness::Exact)
        throw std::invalid_argument("theorem_b_check: needs exact covers");

    TheoremBReport rep;
    rep.lhs = counting_measure(spec, s, sched).value;
    const LevelCover cover = level_cover(spec, static_cast<uint64_t>(n));
    const double ball_premeasure =
        ratio_pow(BigInt(1), ipow(BigInt(spec.base.p), static_cast<uint64_t>(n)), s);
    std::vector<double> etas(cover.residues.size(), 0.0);
    detail::parallel_rows(etas.size(), [&](std::size_t i) {
        etas[i] = eta_local(spec, s, cover.residues[i], n, sched).value;
    });
    for (double e : etas) {
        rep.rhs += e * ball_premeasure;
        rep.lemma_c = std::max(rep.lemma_c, e);
    }
    rep.lemma_rhs = rep.lemma_c * hausdorff_premeasure(spec, s, n);
    rep.pass = rep.lhs <= rep.rhs * (1.0 + tol) && rep.lhs <= rep.lemma_rhs * (1.0 + tol);
    return rep;
}

struct ApCoverReport {
    int level;
    BigInt modulus;  // p^level, the common difference
    std::vector<BigInt> residues;
    bool nested = false;           // every progression refines a level-(n-1) one
    double growth_exponent = 0.0;  // log k_n / (n log p)
    double budget_exponent = 0.0;  // s + delta
    bool within_bound = false;     // k_n <= p^{n (s + delta)}
};

// the closure written as a finite union of progressions of difference p^n
inline ApCoverReport ap_cover(const SetSpec& spec, int n, double s_estimate,
                              double delta = 0.05) {
    if (n < 1) throw std::invalid_argument("ap_cover: need n >= 1");
    if (detail::cover_exactness(spec) != Exactness::Exact)
        throw std::invalid_argument("ap_cover: needs an exact cover");
    ApCoverReport rep;
    rep.level = n;
    rep.modulus = ipow(BigInt(spec.base.p), static_cast<uint64_t>(n));
    rep.residues = level_cover(spec, static_cast<uint64_t>(n)).residues;
    rep.nested = true;
    if (n > 1) {
        const std::vector<BigInt> parents =
            level_cover(spec, static_cast<uint64_t>(n - 1)).residues;
        const BigInt parent_mod = ipow(BigInt(spec.base.p), static_cast<uint64_t>(n - 1));
        for (const BigInt& a : rep.residues) {
            if (!std::binary_search(parents.begin(), parents.end(), a % parent_mod)) {
                rep.nested = false;
                break;
            }
        }
    }
    rep.growth_exponent =
        rep.residues.empty() ? 0.0
                             : detail::box_value(BigInt(rep.residues.size()), n, spec.base.p);
    rep.budget_exponent = s_estimate + delta;
    rep.within_bound = rep.growth_exponent <= rep.budget_exponent + 1e-12;
    return rep;
}

}  // namespace padfrac
