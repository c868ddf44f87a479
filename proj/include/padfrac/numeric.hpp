#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace padfrac {

// Exact arithmetic used throughout: arbitrary-precision integers for counts,
// residues and interval endpoints; exact rationals for norms and Haar values.
// Doubles only appear at the final division of a reported ratio.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt ipow(const BigInt& base, uint64_t exp) {
    BigInt r = 1, b = base;
    while (exp) {
        if (exp & 1) r *= b;
        b *= b;
        exp >>= 1;
    }
    return r;
}

// floor division, denominator must be positive
inline BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b, r = a % b;
    if (r != 0 && a < 0) --q;
    return q;
}

inline double to_double(const BigInt& n) { return n.convert_to<double>(); }

// natural log of a positive big integer, safe far beyond double range
inline double log_big(const BigInt& n) {
    if (n <= 0) throw std::domain_error("log_big: nonpositive argument");
    if (n < (BigInt(1) << 960)) return std::log(to_double(n));
    const auto shift = static_cast<int64_t>(msb(n)) - 512;
    const BigInt top = n >> shift;
    return std::log(to_double(top)) + static_cast<double>(shift) * std::log(2.0);
}

// num / den^s; exact division when s = 1 so integer equality survives the cast
inline double ratio_pow(const BigInt& num, const BigInt& den, double s) {
    if (den <= 0) throw std::domain_error("ratio_pow: nonpositive denominator");
    if (num < 0) throw std::domain_error("ratio_pow: negative numerator");
    if (s == 1.0) return to_double(num) / to_double(den);
    if (num == 0) return 0.0;
    const double ln = log_big(num) - s * log_big(den);
    return std::exp(ln);
}

// The discrete interval (lo, hi] — half-open on the left, as used by every
// windowed count in the library.
struct Interval {
    BigInt lo;
    BigInt hi;

    Interval(BigInt lo_, BigInt hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
        if (lo >= hi) throw std::invalid_argument("Interval: need lo < hi");
    }

    BigInt length() const { return hi - lo; }
    bool contains(const BigInt& x) const { return lo < x && x <= hi; }

    friend bool operator==(const Interval& a, const Interval& b) {
        return a.lo == b.lo && a.hi == b.hi;
    }
};

}  // namespace padfrac
