#pragma once

#include <padfrac/digit_sets.hpp>

#include <stdexcept>
#include <utility>

namespace padfrac {

// Canonical example sets used throughout the tests and the command line tool.

inline SetSpec ternary_cantor_spec(Domain domain = Domain::N) {
    return SetSpec{PrimeBase(3), domain,
                   SftSet{TransitionSystem::digit_restriction(PrimeBase(3), {0, 2})}};
}

inline SetSpec golden_mean_spec() {
    return SetSpec{PrimeBase(2), Domain::N, SftSet{TransitionSystem(PrimeBase(2), {{1, 1}, {1, 0}})}};
}

inline SetSpec primes_spec(PrimeBase base, int64_t bound) {
    if (bound < 10) throw std::invalid_argument("primes_spec: bound must be at least 10");
    return SetSpec{base, Domain::N, PrimesSet(bound)};
}

inline SetSpec totients_spec(PrimeBase base, int64_t bound) {
    if (bound < 10) throw std::invalid_argument("totients_spec: bound must be at least 10");
    return SetSpec{base, Domain::N, TotientsSet(bound)};
}

// q must generate an infinite multiplicative walk: q = 1 mod p but not mod p^2.
inline SetSpec powers_spec(PrimeBase base, const BigInt& q, int64_t bound) {
    if (bound < 10) throw std::invalid_argument("powers_spec: bound must be at least 10");
    const BigInt psq = BigInt(base.p) * base.p;
    if (q < 2 || (q - 1) % base.p != 0 || (q - 1) % psq == 0)
        throw std::invalid_argument("powers_spec: q must be 1 mod p but not 1 mod p^2");
    return SetSpec{base, Domain::N, PowersSet{q, bound}};
}

// Refine on levels (0, 2], (4, 8], (16, 32] and freeze in between; the frozen
// stretches double in length each time, so refined fractions oscillate.
inline TheoremESchedule theorem_e_default_schedule() {
    return TheoremESchedule(PrimeBase(5), {2, 4, 8, 16, 32}, {0, 2, 4}, 32);
}

inline SetSpec theorem_e_spec(TheoremESchedule schedule) {
    const PrimeBase base = schedule.base;
    return SetSpec{base, Domain::N, TheoremESet{std::move(schedule)}};
}

inline SetSpec theorem_e_spec() { return theorem_e_spec(theorem_e_default_schedule()); }

}  // namespace padfrac
