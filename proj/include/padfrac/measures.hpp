#pragma once

#include <padfrac/digit_sets.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

namespace padfrac {

enum class WindowMode { Aligned, Prefix, Sliding, Mixed, Custom };

// An ordered family of count windows: rows are kept sorted by (length, start)
// so every estimator scans — and reports — them in the same order.
struct WindowSchedule {
    WindowMode mode = WindowMode::Custom;
    std::vector<Interval> windows;

    static WindowSchedule from_windows(std::vector<Interval> ws,
                                       WindowMode mode = WindowMode::Custom) {
        if (ws.empty()) throw std::invalid_argument("WindowSchedule: need at least one window");
        std::sort(ws.begin(), ws.end(), [](const Interval& a, const Interval& b) {
            if (a.length() != b.length()) return a.length() < b.length();
            if (a.lo != b.lo) return a.lo < b.lo;
            return false;
        });
        ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
        return WindowSchedule{mode, std::move(ws)};
    }

    // consecutive p^k-blocks [m p^k, (m+1) p^k) at each scale
    static WindowSchedule aligned(PrimeBase base, uint64_t max_exponent,
                                  uint64_t blocks_per_scale = 4) {
        if (max_exponent == 0 || blocks_per_scale == 0)
            throw std::invalid_argument("WindowSchedule: need a positive scale count");
        std::vector<Interval> ws;
        for (uint64_t k = 1; k <= max_exponent; ++k) {
            const BigInt block = ipow(BigInt(base.p), k);
            for (uint64_t m = 0; m < blocks_per_scale; ++m)
                ws.emplace_back(BigInt(m) * block - 1, BigInt(m + 1) * block - 1);
        }
        return from_windows(std::move(ws), WindowMode::Aligned);
    }

    // initial segments (0, p^k]
    static WindowSchedule prefix(PrimeBase base, uint64_t max_exponent) {
        if (max_exponent == 0)
            throw std::invalid_argument("WindowSchedule: need a positive scale count");
        std::vector<Interval> ws;
        for (uint64_t k = 1; k <= max_exponent; ++k)
            ws.emplace_back(BigInt(0), ipow(BigInt(base.p), k));
        return from_windows(std::move(ws), WindowMode::Prefix);
    }

    // length-p^k windows at seeded starts inside [0, p^max_exponent)
    static WindowSchedule sliding(PrimeBase base, uint64_t max_exponent, uint64_t samples,
                                  uint64_t seed) {
        if (max_exponent == 0 || samples == 0)
            throw std::invalid_argument("WindowSchedule: need a positive sample count");
        std::mt19937_64 gen(seed);
        const BigInt universe = ipow(BigInt(base.p), max_exponent);
        std::vector<Interval> ws;
        for (uint64_t k = 1; k <= max_exponent; ++k) {
            const BigInt block = ipow(BigInt(base.p), k);
            const BigInt span = universe - block + 1;
            for (uint64_t i = 0; i < samples; ++i) {
                const BigInt draw = (BigInt(gen()) << 64) + gen();
                const BigInt start = draw % span;
                ws.emplace_back(start - 1, start - 1 + block);
            }
        }
        return from_windows(std::move(ws), WindowMode::Sliding);
    }

    // aligned blocks plus seeded sliding windows; results are flagged heuristic
    static WindowSchedule mixed(PrimeBase base, uint64_t max_exponent, uint64_t samples,
                                uint64_t seed) {
        std::vector<Interval> ws = aligned(base, max_exponent, 2).windows;
        const std::vector<Interval> extra = sliding(base, max_exponent, samples, seed).windows;
        ws.insert(ws.end(), extra.begin(), extra.end());
        return from_windows(std::move(ws), WindowMode::Mixed);
    }
};

struct WindowRow {
    Interval window;
    BigInt count;
    double ratio;
};

// A finite-horizon reading of a limsup quantity: the true value dominates it,
// which is what finite_horizon records.
struct MeasureEstimate {
    double value = 0.0;
    std::optional<Interval> witness;        // window attaining the value
    std::optional<uint64_t> witness_level;  // ball level, for the level-maximized forms
    std::vector<WindowRow> rows;
    WindowMode mode = WindowMode::Custom;
    bool heuristic = false;   // sampled windows: the value depends on the draw
    bool degenerate = false;  // no window carried enough points to measure
    bool finite_horizon = true;
};

namespace detail {

inline unsigned thread_budget() {
    if (const char* env = std::getenv("PADFRAC_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1 && v <= 256) return static_cast<unsigned>(v);
    }
    return 1;
}

// Runs body(i) for i < n, possibly concurrently; outputs indexed by i keep
// every merge order-independent.
template <typename Fn>
void parallel_rows(std::size_t n, Fn&& body) {
    const std::size_t workers = std::min<std::size_t>(thread_budget(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

template <typename Counter, typename Ratio>
MeasureEstimate windowed_estimate(const WindowSchedule& sched, Counter&& counter,
                                  Ratio&& ratio_of) {
    MeasureEstimate est;
    est.mode = sched.mode;
    est.heuristic = sched.mode == WindowMode::Sliding || sched.mode == WindowMode::Mixed;
    est.rows.assign(sched.windows.size(), WindowRow{Interval{BigInt(0), BigInt(1)}, BigInt(0), 0.0});
    parallel_rows(sched.windows.size(), [&](std::size_t i) {
        const Interval& w = sched.windows[i];
        BigInt c = counter(w);
        const double r = ratio_of(c, w);
        est.rows[i] = WindowRow{w, std::move(c), r};
    });
    for (const WindowRow& row : est.rows) {
        if (row.ratio > est.value) {
            est.value = row.ratio;
            est.witness = row.window;
        }
    }
    return est;
}

inline void require_exponent(double s) {
    if (!(s > 0.0) || s > 1.0)
        throw std::invalid_argument("measure estimator: s must lie in (0, 1]");
}

}  // namespace detail

// sup over windows of |E ∩ I| / |I|^s
inline MeasureEstimate counting_measure(const SetSpec& spec, double s,
                                        const WindowSchedule& sched) {
    detail::require_exponent(s);
    return detail::windowed_estimate(
        sched, [&](const Interval& w) { return count_in(spec, w); },
        [&](const BigInt& c, const Interval& w) { return ratio_pow(c, w.length(), s); });
}

// s = 1 counting measure, bit for bit
inline MeasureEstimate banach_density(const SetSpec& spec, const WindowSchedule& sched) {
    return counting_measure(spec, 1.0, sched);
}

// sup over windows of log|E ∩ I| / log|I|; windows with fewer than two points
// carry no dimension information and contribute 0
inline MeasureEstimate counting_dimension(const SetSpec& spec, const WindowSchedule& sched) {
    MeasureEstimate est = detail::windowed_estimate(
        sched, [&](const Interval& w) { return count_in(spec, w); },
        [&](const BigInt& c, const Interval& w) {
            if (c < 2 || w.length() < 2) return 0.0;
            return log_big(c) / log_big(w.length());
        });
    est.degenerate = true;
    for (const WindowRow& row : est.rows)
        if (row.count >= 2 && row.window.length() >= 2) est.degenerate = false;
    return est;
}

// local s-counting measure at the ball around x of the given level:
// sup over windows of |E ∩ B ∩ I| / |B ∩ I|^s
inline MeasureEstimate eta_local(const SetSpec& spec, double s, const BigInt& x, int n,
                                 const WindowSchedule& sched) {
    detail::require_exponent(s);
    const Ball ball(spec.base, x, n);
    return detail::windowed_estimate(
        sched, [&](const Interval& w) { return count_in_ball(spec, ball, w); },
        [&](const BigInt& c, const Interval& w) {
            const BigInt in_ball = ball_count(ball, w);
            if (in_ball == 0) return 0.0;
            return ratio_pow(c, in_ball, s);
        });
}

// the same quantity renormalized against window length and ball measure:
// sup of (|E ∩ B ∩ I| / |I|^s) / p^{-ns}
inline double eta_equivalent_form(const SetSpec& spec, double s, const BigInt& x, int n,
                                  const WindowSchedule& sched) {
    detail::require_exponent(s);
    const Ball ball(spec.base, x, n);
    const BigInt modulus = ball.modulus();
    const double scale =
        std::exp(static_cast<double>(n) * s * std::log(static_cast<double>(spec.base.p)));
    double best = 0.0;
    for (const Interval& w : sched.windows) {
        // a window shorter than the ball modulus cannot sample the class
        if (w.length() < modulus) continue;
        const BigInt c = count_in_ball(spec, ball, w);
        best = std::max(best, ratio_pow(c, w.length(), s) * scale);
    }
    return best;
}

// max over ball levels in [n_lo, n_hi] of eta_local, recording the level
inline MeasureEstimate eta_limit(const SetSpec& spec, double s, const BigInt& x, int n_lo,
                                 int n_hi, const WindowSchedule& sched) {
    if (n_lo < 0 || n_lo > n_hi) throw std::invalid_argument("eta_limit: bad level range");
    MeasureEstimate best;
    for (int n = n_lo; n <= n_hi; ++n) {
        MeasureEstimate e = eta_local(spec, s, x, n, sched);
        if (!best.witness_level.has_value() || e.value > best.value) {
            e.witness_level = static_cast<uint64_t>(n);
            best = std::move(e);
        }
    }
    return best;
}

// One arithmetic progression B ∩ I certified against the set.
struct ApWitness {
    Ball ball;
    Interval window;
    BigInt size;   // |B ∩ I|, the progression length
    BigInt hits;   // |E ∩ B ∩ I|
    double ratio;  // hits / size^s
};

struct AbundanceReport {
    BigInt point;  // residue whose ball the progressions live in
    int level;
    double c = 0.0;  // worst certified ratio
    std::vector<ApWitness> aps;
};

// Certifies progressions of difference p^level with |E ∩ A| ≥ c |A|^s. The
// base point is the cover residue with the most members in the widest window;
// ties go to the smallest residue.
inline AbundanceReport abundance_witnesses(const SetSpec& spec, double s, int n,
                                           std::size_t want, const WindowSchedule& sched) {
    detail::require_exponent(s);
    if (want == 0) throw std::invalid_argument("abundance_witnesses: want at least one window");
    const LevelCover cover = level_cover(spec, n);
    if (cover.residues.empty())
        throw std::runtime_error("abundance_witnesses: the level cover is empty");

    const Interval& widest = sched.windows.back();
    BigInt point = cover.residues.front();
    BigInt best_hits = -1;
    for (const BigInt& a : cover.residues) {
        const BigInt h = count_in_ball(spec, Ball(spec.base, a, n), widest);
        if (h > best_hits) {
            best_hits = h;
            point = a;
        }
    }

    AbundanceReport rep{point, n, 0.0, {}};
    const Ball ball(spec.base, point, n);
    BigInt prev_size = 0;
    for (const Interval& w : sched.windows) {
        if (rep.aps.size() >= want) break;
        const BigInt size = ball_count(ball, w);
        if (size <= prev_size) continue;
        const BigInt hits = count_in_ball(spec, ball, w);
        if (hits == 0) continue;
        const double r = ratio_pow(hits, size, s);
        rep.aps.push_back(ApWitness{ball, w, size, hits, r});
        prev_size = rep.aps.back().size;
    }
    if (rep.aps.empty())
        throw std::runtime_error("abundance_witnesses: no window certifies a positive ratio");
    rep.c = rep.aps.front().ratio;
    for (const ApWitness& ap : rep.aps) rep.c = std::min(rep.c, ap.ratio);
    return rep;
}

// Smallest m in E whose class mod p^k is hit by F within the bound, paired
// with the smallest such partner; nullopt means the search was exhausted,
// not that no pair exists.
inline std::optional<std::pair<BigInt, BigInt>> congruence_witness(const SetSpec& e_spec,
                                                                   const SetSpec& f_spec,
                                                                   PrimeBase base, uint64_t k,
                                                                   const BigInt& search_bound) {
    if (search_bound < 0)
        throw std::invalid_argument("congruence_witness: search bound must be >= 0");
    const BigInt modulus = ipow(BigInt(base.p), k);
    const Interval range{BigInt(-1), search_bound};
    std::map<BigInt, BigInt> first_in_f;
    for (const BigInt& n : enumerate(f_spec, range))
        first_in_f.emplace(detail::mod_reduce(n, modulus), n);
    for (const BigInt& m : enumerate(e_spec, range)) {
        const auto it = first_in_f.find(detail::mod_reduce(m, modulus));
        if (it != first_in_f.end()) return std::make_pair(m, it->second);
    }
    return std::nullopt;
}

}  // namespace padfrac
