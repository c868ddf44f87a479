#pragma once

#include <padfrac/numeric.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

// Exact p-adic primitives on integers: valuation/norm/distance, fixed-width
// digit expansions (negative integers carry an eventually-(p-1) digit tail),
// the dual pairing between nonnegative and negative integers, the shift map,
// and residue balls with interval counting.
namespace padfrac {

struct PrimeBase {
    int64_t p;

    explicit PrimeBase(int64_t prime) : p(prime) {
        if (prime < 2) throw std::invalid_argument("PrimeBase: need a prime >= 2");
        for (int64_t d = 2; d * d <= prime; ++d)
            if (prime % d == 0) throw std::invalid_argument("PrimeBase: not prime");
    }

    friend bool operator==(PrimeBase a, PrimeBase b) { return a.p == b.p; }
};

// Extended-natural valuation; v_p(0) is a dedicated infinity, not a sentinel.
class Valuation {
  public:
    static Valuation finite(uint64_t v) { return Valuation(false, v); }
    static Valuation infinite() { return Valuation(true, 0); }

    bool is_infinite() const { return infinite_; }
    uint64_t value() const {
        if (infinite_) throw std::domain_error("Valuation: infinite has no value");
        return v_;
    }

    friend bool operator==(const Valuation& a, const Valuation& b) {
        return a.infinite_ == b.infinite_ && (a.infinite_ || a.v_ == b.v_);
    }
    friend bool operator<(const Valuation& a, const Valuation& b) {
        if (a.infinite_) return false;
        if (b.infinite_) return true;
        return a.v_ < b.v_;
    }

  private:
    Valuation(bool inf, uint64_t v) : infinite_(inf), v_(v) {}
    bool infinite_;
    uint64_t v_;
};

inline Valuation valuation(const BigInt& n, PrimeBase base) {
    if (n == 0) return Valuation::infinite();
    BigInt m = abs(n);
    uint64_t v = 0;
    BigInt q, r;
    for (;;) {
        divide_qr(m, BigInt(base.p), q, r);
        if (r != 0) break;
        m = q;
        ++v;
    }
    return Valuation::finite(v);
}

inline Rational norm(const BigInt& n, PrimeBase base) {
    if (n == 0) return Rational(0);
    return Rational(1, ipow(base.p, valuation(n, base).value()));
}

inline Rational distance(const BigInt& a, const BigInt& b, PrimeBase base) {
    return norm(a - b, base);
}

// Fixed-width window onto the canonical digit string, LSB first.
struct DigitExpansion {
    PrimeBase base;
    std::vector<uint32_t> digits;

    std::size_t width() const { return digits.size(); }
};

inline DigitExpansion expand(const BigInt& n, PrimeBase base, std::size_t width) {
    if (width == 0) throw std::invalid_argument("expand: width must be >= 1");
    std::vector<uint32_t> digits(width, 0);
    const auto pm1 = static_cast<uint32_t>(base.p - 1);
    // For n < 0 the string is the digitwise complement of -n-1 with a (p-1)
    // tail, so both signs reduce to plain extraction from a nonnegative value.
    BigInt m = (n >= 0) ? n : BigInt(-n - 1);
    BigInt q, r;
    for (std::size_t i = 0; i < width && m != 0; ++i) {
        divide_qr(m, BigInt(base.p), q, r);
        digits[i] = r.convert_to<uint32_t>();
        m = q;
    }
    if (n < 0)
        for (auto& d : digits) d = pm1 - d;
    return DigitExpansion{base, std::move(digits)};
}

// Reconstructs the unique integer certified by a constant tail: an all-0 tail
// yields the nonnegative prefix value, an all-(p-1) tail yields prefix - p^t.
inline std::optional<BigInt> integer_from_tail(const DigitExpansion& e, std::size_t tail_start) {
    if (tail_start > e.width())
        throw std::invalid_argument("integer_from_tail: tail_start beyond width");
    const auto pm1 = static_cast<uint32_t>(e.base.p - 1);
    bool neg = false;
    if (tail_start < e.width()) {
        const uint32_t t = e.digits[tail_start];
        if (t != 0 && t != pm1) return std::nullopt;
        for (std::size_t i = tail_start; i < e.width(); ++i)
            if (e.digits[i] != t) return std::nullopt;
        neg = (t == pm1);
    }
    BigInt value = 0;
    for (std::size_t i = tail_start; i-- > 0;) value = value * e.base.p + e.digits[i];
    if (neg) value -= ipow(e.base.p, tail_start);
    return value;
}

namespace detail {
inline uint64_t digit_count(BigInt m, int64_t p) {
    uint64_t c = 0;
    while (m != 0) { m /= p; ++c; }
    return c;
}
}  // namespace detail

// Pairs n with an integer of the opposite tail type: where the tail swap
// n -> n -+ p^N (N = first index from which the digit string is constant) is
// invertible -- the digit below the swapped tail differs from the new tail
// value, i.e. the nonnegative representative has leading digit != p-1 -- dual
// performs it; elsewhere it complements every digit (n -> -n-1). An involution
// exchanging nonnegative and negative integers; 0 <-> -1. At p = 2 every
// leading digit is 1, so dual coincides with the complement throughout.
inline BigInt dual(const BigInt& n, PrimeBase base) {
    BigInt rep = n >= 0 ? n : BigInt(-n - 1);
    uint64_t count = 0;
    int64_t lead = 0;
    while (rep != 0) {
        lead = static_cast<int64_t>(rep % base.p);
        rep /= base.p;
        ++count;
    }
    if (count > 0 && lead == base.p - 1) return -n - 1;
    BigInt step = ipow(base.p, count);
    return n >= 0 ? BigInt(n - step) : BigInt(n + step);
}

// Shift map: removes the leading base-p digit; single digits map to 0.
inline BigInt sigma(const BigInt& n, PrimeBase base) {
    if (n < 0) throw std::invalid_argument("sigma: argument must be nonnegative");
    if (n < base.p) return 0;
    BigInt scale = 1;
    while (scale * base.p <= n) scale *= base.p;
    return n - (n / scale) * scale;
}

// Residue ball B_{p^-level}(center): the class center mod p^level.
struct Ball {
    PrimeBase base;
    BigInt residue;  // reduced into [0, p^level)
    int level;

    Ball(PrimeBase b, const BigInt& center, int lv) : base(b), residue(0), level(lv) {
        if (lv < 0) throw std::invalid_argument("Ball: level must be >= 0");
        const BigInt m = ipow(b.p, static_cast<uint64_t>(lv));
        residue = ((center % m) + m) % m;
    }

    BigInt modulus() const { return ipow(base.p, static_cast<uint64_t>(level)); }
    Rational haar() const { return Rational(1, modulus()); }

    friend bool operator==(const Ball& a, const Ball& b) {
        return a.base == b.base && a.level == b.level && a.residue == b.residue;
    }
};

inline BigInt ball_count(const Ball& b, const Interval& iv) {
    const BigInt m = b.modulus();
    return floor_div(iv.hi - b.residue, m) - floor_div(iv.lo - b.residue, m);
}

inline std::vector<BigInt> ball_members(const Ball& b, const Interval& iv) {
    const BigInt m = b.modulus();
    std::vector<BigInt> out;
    BigInt x = b.residue + floor_div(iv.lo - b.residue, m) * m;
    if (x <= iv.lo) x += m;
    for (; x <= iv.hi; x += m) out.push_back(x);
    return out;
}

}  // namespace padfrac
