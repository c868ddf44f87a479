#include <catch2/catch_amalgamated.hpp>

#include <padfrac/digit_sets.hpp>

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

using namespace padfrac;

namespace {

// Independent membership oracle for pair-constrained digit sets: build the
// digit string of x (complemented for negatives), append the constant tail
// twice, and check every digit and adjacent pair directly.
bool sft_member_oracle(long long x, const std::vector<std::vector<int>>& m,
                       const std::vector<int64_t>& allowed, long long p, bool zdomain) {
    auto ok = [&](long long d) {
        return std::find(allowed.begin(), allowed.end(), d) != allowed.end();
    };
    std::vector<long long> a;
    long long tail = 0;
    if (x >= 0) {
        for (long long t = x; t > 0; t /= p) a.push_back(t % p);
    } else {
        if (!zdomain) return false;
        tail = p - 1;
        for (long long t = -x - 1; t > 0; t /= p) a.push_back(p - 1 - t % p);
    }
    a.push_back(tail);
    a.push_back(tail);
    for (long long d : a)
        if (!ok(d)) return false;
    for (std::size_t i = 0; i + 1 < a.size(); ++i)
        if (m[static_cast<std::size_t>(a[i])][static_cast<std::size_t>(a[i + 1])] != 1) return false;
    return true;
}

std::vector<BigInt> brute_enumerate(const std::vector<std::vector<int>>& m,
                                    const std::vector<int64_t>& allowed, long long p,
                                    bool zdomain, long long lo, long long hi) {
    std::vector<BigInt> out;
    for (long long x = lo + 1; x <= hi; ++x)
        if (sft_member_oracle(x, m, allowed, p, zdomain)) out.emplace_back(x);
    return out;
}

std::vector<std::vector<int>> ones(std::size_t p) {
    return std::vector<std::vector<int>>(p, std::vector<int>(p, 1));
}

SetSpec cantor(Domain dom) {
    return SetSpec{PrimeBase(3), dom,
                   SftSet{TransitionSystem::digit_restriction(PrimeBase(3), {0, 2})}};
}

SetSpec golden() {
    return SetSpec{PrimeBase(2), Domain::N,
                   SftSet{TransitionSystem(PrimeBase(2), {{1, 1}, {1, 0}})}};
}

BigInt fib_count(int bits) {  // strings of `bits` digits with no adjacent ones
    BigInt a = 1, b = 2;      // F(2), F(3)
    for (int i = 1; i < bits; ++i) { BigInt c = a + b; a = b; b = c; }
    return b;
}

}  // namespace

TEST_CASE("transition system validation", "[digit_sets]") {
    const PrimeBase p3(3);
    CHECK_THROWS_AS(TransitionSystem(p3, {{1, 1}, {1, 1}}), std::invalid_argument);  // 2x2 vs p=3
    CHECK_THROWS_AS(TransitionSystem(p3, std::vector<std::vector<int>>(3, std::vector<int>(3, 0))),
                    std::invalid_argument);  // no admissible pair at all
    CHECK_THROWS_AS(TransitionSystem::digit_restriction(p3, {0, 5}), std::invalid_argument);
    const TransitionSystem cantor_sys = TransitionSystem::digit_restriction(p3, {0, 2});
    CHECK(cantor_sys.edge(0, 2));
    CHECK(cantor_sys.edge(2, 2));
    CHECK_FALSE(cantor_sys.edge(0, 1));
    CHECK_FALSE(cantor_sys.digit_ok(1));
}

TEST_CASE("enumerate frozen examples", "[digit_sets]") {
    const std::vector<BigInt> cantor27 = {2, 6, 8, 18, 20, 24, 26};
    CHECK(enumerate(cantor(Domain::N), Interval(0, 27)) == cantor27);
    CHECK(enumerate(cantor(Domain::N), Interval(0, 27)) == cantor27);  // pure: repeat identical

    const SetSpec primes{PrimeBase(2), Domain::N, PrimesSet(1'000'000)};
    CHECK(enumerate(primes, Interval(0, 10)) == std::vector<BigInt>{2, 3, 5, 7});
    CHECK_THROWS(enumerate(primes, Interval(0, 2'000'000)));  // beyond sieve bound

    const SetSpec ap{PrimeBase(2), Domain::N, Progression{1, 4}};
    CHECK(enumerate(ap, Interval(0, 20)) == std::vector<BigInt>{1, 5, 9, 13, 17});

    const SetSpec apz{PrimeBase(2), Domain::Z, Progression{1, 4}};
    CHECK(enumerate(apz, Interval(-8, 8)) == std::vector<BigInt>{-7, -3, 1, 5});

    // Z-domain Cantor picks up the complemented negatives
    const std::vector<BigInt> two_sided = {-9, -7, -3, -1, 0, 2, 6, 8};
    CHECK(enumerate(cantor(Domain::Z), Interval(-10, 10)) == two_sided);
}

TEST_CASE("contains matches the digit oracle", "[digit_sets]") {
    CHECK(contains(cantor(Domain::Z), -1));
    CHECK(contains(cantor(Domain::Z), -3));
    CHECK_FALSE(contains(cantor(Domain::N), -1));
    CHECK_FALSE(contains(cantor(Domain::Z), -2));
    CHECK(contains(cantor(Domain::N), 20));
    CHECK_FALSE(contains(cantor(Domain::N), 5));

    const auto m = ones(3);
    const std::vector<int64_t> digits02 = {0, 2};
    for (long long x = -200; x <= 200; ++x) {
        CHECK(contains(cantor(Domain::Z), x) == sft_member_oracle(x, m, digits02, 3, true));
        CHECK(contains(cantor(Domain::N), x) == sft_member_oracle(x, m, digits02, 3, false));
    }
}

TEST_CASE("count_in and enumerate agree with brute force on random systems", "[digit_sets]") {
    std::mt19937_64 rng(71);
    std::uniform_int_distribution<int> bit(0, 1);
    std::uniform_int_distribution<long long> pickp(0, 2);
    std::uniform_int_distribution<long long> edge_pt(-2000, 2000);
    const long long ps[3] = {2, 3, 5};
    int nontrivial = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const long long p = ps[pickp(rng)];
        std::vector<std::vector<int>> m(static_cast<std::size_t>(p),
                                        std::vector<int>(static_cast<std::size_t>(p), 0));
        bool any = false;
        for (auto& row : m)
            for (auto& e : row) { e = bit(rng); any = any || e; }
        if (!any) m[0][0] = 1;
        std::vector<int64_t> all_digits(static_cast<std::size_t>(p));
        for (long long d = 0; d < p; ++d) all_digits[static_cast<std::size_t>(d)] = d;

        const SetSpec spec{PrimeBase(p), Domain::Z, SftSet{TransitionSystem(PrimeBase(p), m)}};
        long long a = edge_pt(rng), b = edge_pt(rng);
        if (a == b) b += 3;
        const Interval win(std::min(a, b), std::max(a, b));
        const auto expect = brute_enumerate(m, all_digits, p, true,
                                            static_cast<long long>(win.lo),
                                            static_cast<long long>(win.hi));
        REQUIRE(enumerate(spec, win) == expect);
        REQUIRE(count_in(spec, win) == BigInt(expect.size()));
        if (!expect.empty()) ++nontrivial;
    }
    CHECK(nontrivial >= 10);
}

TEST_CASE("count_in_ball against brute force", "[digit_sets]") {
    std::mt19937_64 rng(73);
    std::uniform_int_distribution<int> lvl(0, 4);
    std::uniform_int_distribution<long long> res(0, 10'000);
    std::uniform_int_distribution<long long> edge_pt(-1500, 1500);
    const auto m = ones(3);
    const std::vector<int64_t> digits02 = {0, 2};
    const SetSpec spec = cantor(Domain::Z);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = lvl(rng);
        BigInt mod = 1;
        for (int i = 0; i < n; ++i) mod *= 3;
        const Ball ball(PrimeBase(3), res(rng) % mod, static_cast<uint64_t>(n));
        long long a = edge_pt(rng), b = edge_pt(rng);
        if (a == b) b += 2;
        const Interval win(std::min(a, b), std::max(a, b));
        BigInt brute = 0;
        for (long long x = static_cast<long long>(win.lo) + 1;
             x <= static_cast<long long>(win.hi); ++x) {
            const BigInt r = ((BigInt(x) % mod) + mod) % mod;
            if (r == ball.residue && sft_member_oracle(x, m, digits02, 3, true)) ++brute;
        }
        REQUIRE(count_in_ball(spec, ball, win) == brute);
    }
}

TEST_CASE("level covers: frozen residues, sizes, nesting", "[digit_sets]") {
    const auto c2 = level_cover(cantor(Domain::N), 2);
    CHECK(c2.residues == std::vector<BigInt>{0, 2, 6, 8});
    CHECK(c2.exactness == Exactness::Exact);
    CHECK(level_cover(cantor(Domain::N), 3).residues.size() == 8);

    for (uint64_t n = 1; n <= 12; ++n) {
        CHECK(cover_size(cantor(Domain::N), n) == ipow(2, n));
        CHECK(cover_size(golden(), n) == fib_count(static_cast<int>(n)));
    }

    // golden-mean member counts below 2^N follow the same recurrence
    for (int N = 1; N <= 12; ++N) {
        const auto members = enumerate(golden(), Interval(-1, ipow(2, N) - 1));
        CHECK(BigInt(members.size()) == fib_count(N));
        for (const auto& x : members) {
            long long v = static_cast<long long>(x);
            CHECK(sft_member_oracle(v, {{1, 1}, {1, 0}}, {0, 1}, 2, false));
        }
    }

    // primes in Z_2 at n=4: all eight odd residues plus residue 2
    const SetSpec primes{PrimeBase(2), Domain::N, PrimesSet(1'000'000)};
    const auto pc = level_cover(primes, 4);
    CHECK(pc.exactness == Exactness::LowerBound);
    CHECK(pc.residues == std::vector<BigInt>{1, 2, 3, 5, 7, 9, 11, 13, 15});

    // powers of 7 in Z_3 at n=2: exactly the classes congruent to 1 mod 3
    const SetSpec pow7{PrimeBase(3), Domain::N, PowersSet{7, 10'000}};
    CHECK(level_cover(pow7, 2).residues == std::vector<BigInt>{1, 4, 7});

    // nesting: level n+1 residues reduce into level n
    for (const SetSpec& spec : {cantor(Domain::N), golden(), primes}) {
        for (uint64_t n = 1; n <= 7; ++n) {
            const auto lo = level_cover(spec, n);
            const auto hi = level_cover(spec, n + 1);
            const BigInt mod = ipow(spec.base.p, n);
            for (const auto& r : hi.residues) {
                const BigInt red = r % mod;
                CHECK(std::binary_search(lo.residues.begin(), lo.residues.end(), red));
            }
        }
    }

    // enumeration/cover consistency
    const auto members = enumerate(cantor(Domain::N), Interval(0, 3000));
    const auto g5 = level_cover(cantor(Domain::N), 5);
    for (const auto& x : members)
        CHECK(std::binary_search(g5.residues.begin(), g5.residues.end(), x % ipow(3, 5)));
}

TEST_CASE("closure_contains tri-state", "[digit_sets]") {
    CHECK(closure_contains(cantor(Domain::N), -1, 6) == Closure::Yes);   // all-2 tail admissible
    CHECK(closure_contains(cantor(Domain::N), 1, 1) == Closure::No);
    CHECK(closure_contains(cantor(Domain::Z), -4, 1) == Closure::Unknown);  // digit 1 sits at pos 1
    CHECK(closure_contains(cantor(Domain::Z), -4, 2) == Closure::No);

    const SetSpec pow7{PrimeBase(3), Domain::N, PowersSet{7, 10'000}};
    CHECK(closure_contains(pow7, 4, 2) == Closure::Yes);       // 7^2 = 49 = 4 mod 9
    CHECK(closure_contains(pow7, 2, 1) == Closure::Unknown);   // lower-bound cover cannot refute

    const SetSpec primes{PrimeBase(2), Domain::N, PrimesSet(1'000'000)};
    CHECK(closure_contains(primes, 3, 4) == Closure::Yes);
    CHECK(closure_contains(primes, 4, 4) == Closure::Unknown);  // 4 mod 16 hits no prime residue

    // members certify at every depth
    for (const auto& x : enumerate(cantor(Domain::Z), Interval(-200, 200)))
        for (uint64_t d : {1, 6, 12})
            CHECK(closure_contains(cantor(Domain::Z), x, d) == Closure::Yes);
}

TEST_CASE("sigma invariance verdicts", "[digit_sets]") {
    CHECK(is_sigma_invariant(cantor(Domain::N), 100'000).pass);

    const SetSpec bad{PrimeBase(2), Domain::N, ExplicitSet{{1, 3}}};
    const auto v = is_sigma_invariant(bad, 10);
    CHECK_FALSE(v.pass);
    CHECK(v.counterexample == BigInt(1));  // sigma(1) = 0 is already outside

    const SetSpec good{PrimeBase(2), Domain::N, ExplicitSet{{0, 2, 8}}};
    CHECK(is_sigma_invariant(good, 10).pass);

    CHECK_THROWS_AS(is_sigma_invariant(cantor(Domain::Z), 100), std::invalid_argument);
}

TEST_CASE("dual closure verdicts", "[digit_sets]") {
    const SetSpec zero_pair{PrimeBase(3), Domain::Z, ExplicitSet{{-1, 0}}};
    CHECK(is_dual_closed(zero_pair, 10).pass);

    const auto v = is_dual_closed(cantor(Domain::N), 100);
    CHECK_FALSE(v.pass);
    CHECK(v.counterexample == BigInt(2));  // dual(2) is negative, outside the N-domain set

    CHECK(is_dual_closed(cantor(Domain::Z), 1000).pass);

    // orbit of the all-(p-1)-digit family under the implemented pairing
    std::vector<BigInt> elems = {0, -1};
    BigInt xj = 0, pw = 1;
    for (int j = 1; j <= 9; ++j) {
        xj = 3 * xj + 2;  // j low digits equal to 2
        pw *= 3;
        elems.push_back(xj);
        elems.push_back(-pw);
    }
    std::sort(elems.begin(), elems.end());
    const SetSpec pairs{PrimeBase(3), Domain::Z, ExplicitSet{elems}};
    CHECK(is_dual_closed(pairs, 10'000).pass);
}

TEST_CASE("sp membership sufficiency", "[digit_sets]") {
    CHECK(sp_membership_sufficient(cantor(Domain::Z), 1000).pass);

    const SetSpec primes{PrimeBase(2), Domain::N, PrimesSet(1'000'000)};
    const auto v = sp_membership_sufficient(primes, 50);
    CHECK_FALSE(v.pass);
    CHECK(v.counterexample == BigInt(2));  // sigma(2) = 0 is not prime

    const SetSpec zero_pair{PrimeBase(5), Domain::Z, ExplicitSet{{-1, 0}}};
    CHECK(sp_membership_sufficient(zero_pair, 10).pass);
}

TEST_CASE("integer limit points", "[digit_sets]") {
    // 1 + p^m accumulates at 1
    std::vector<BigInt> elems;
    BigInt pw = 1;
    for (int m = 1; m <= 40; ++m) { pw *= 5; elems.push_back(1 + pw); }
    const SetSpec onep{PrimeBase(5), Domain::N, ExplicitSet{elems}};
    CHECK(integer_limit_points(onep, 12, 8) == std::vector<BigInt>{1});

    // the all-(p-1)-prefix family accumulates at -1
    std::vector<BigInt> xs;
    BigInt xj = 0;
    for (int j = 1; j <= 25; ++j) { xj = 3 * xj + 2; xs.push_back(xj); }
    const SetSpec xset{PrimeBase(3), Domain::N, ExplicitSet{xs}};
    CHECK(integer_limit_points(xset, 12, 8) == std::vector<BigInt>{-1});

    // the two-sided Cantor set already holds all its integer limits
    CHECK(integer_limit_points(cantor(Domain::Z), 12, 8).empty());

    // one-sided Cantor set misses the negative-tail limits, -1 among them
    const auto neg = integer_limit_points(cantor(Domain::N), 12, 8);
    CHECK(std::binary_search(neg.begin(), neg.end(), BigInt(-1)));
    for (const auto& x : neg) {
        CHECK(x < 0);
        CHECK(contains(cantor(Domain::Z), x));
    }
}

TEST_CASE("theorem-e style schedules", "[digit_sets]") {
    const TheoremESchedule sched{PrimeBase(5), {2, 4, 8, 16, 32}, {0, 2, 4}, 32};
    CHECK(sched.refined(1));
    CHECK(sched.refined(2));
    CHECK_FALSE(sched.refined(3));
    CHECK_FALSE(sched.refined(4));
    CHECK(sched.refined(5));
    CHECK(sched.refined(8));
    CHECK_FALSE(sched.refined(9));
    CHECK_FALSE(sched.refined(16));
    CHECK(sched.refined(17));
    CHECK(sched.refined(32));
    CHECK(sched.refined_count(2) == 2);
    CHECK(sched.refined_count(4) == 2);
    CHECK(sched.refined_count(8) == 6);
    CHECK(sched.refined_count(16) == 6);
    CHECK(sched.refined_count(32) == 22);

    const SetSpec te{PrimeBase(5), Domain::N, TheoremESet{sched}};
    CHECK(cover_size(te, 1) == 3);
    for (uint64_t k = 1; k < 32; ++k) {
        const BigInt growth = cover_size(te, k + 1) / cover_size(te, k);
        CHECK(growth == (sched.refined(k + 1) ? 3 : 1));
    }
    CHECK(cover_size(te, 32) == ipow(3, 22));

    // members below 5^2: both low positions refined
    CHECK(enumerate(te, Interval(0, 24)) ==
          std::vector<BigInt>{2, 4, 10, 12, 14, 20, 22, 24});
    // frozen positions pin digits to zero: nothing new appears below 5^4
    CHECK(count_in(te, Interval(0, 625)) == BigInt(8));
    CHECK(contains(te, 0));
    CHECK_FALSE(contains(te, 25));
    CHECK(closure_contains(te, 14, 2) == Closure::Yes);
    CHECK(closure_contains(te, 25, 3) == Closure::No);

    const auto c2 = level_cover(te, 2);
    CHECK(c2.exactness == Exactness::Exact);
    CHECK(c2.residues == std::vector<BigInt>{0, 2, 4, 10, 12, 14, 20, 22, 24});

    CHECK_THROWS_AS((TheoremESchedule{PrimeBase(5), {4, 2}, {0, 2, 4}, 4}),
                    std::invalid_argument);  // levels must increase
    CHECK_THROWS_AS((TheoremESchedule{PrimeBase(5), {2, 4}, {0, 2, 4}, 9}),
                    std::invalid_argument);  // depth beyond the schedule
    CHECK_THROWS_AS((TheoremESchedule{PrimeBase(3), {2, 4}, {0, 2, 4}, 4}),
                    std::invalid_argument);  // digit 4 does not fit base 3
}

TEST_CASE("json round trip and schema rejection", "[digit_sets]") {
    const std::string cantor_json = R"({"p":3,"domain":"N","kind":"sft",
        "matrix":[[1,0,1],[0,0,0],[1,0,1]]})";
    const SetSpec spec = spec_from_json(cantor_json);
    CHECK(spec.base.p == 3);
    CHECK(spec.domain == Domain::N);
    CHECK(enumerate(spec, Interval(0, 27)) == std::vector<BigInt>{2, 6, 8, 18, 20, 24, 26});

    const SetSpec back = spec_from_json(spec_to_json(spec));
    CHECK(enumerate(back, Interval(0, 27)) == enumerate(spec, Interval(0, 27)));

    for (const SetSpec& s : {cantor(Domain::Z),
                             SetSpec{PrimeBase(2), Domain::N, Progression{1, 4}},
                             SetSpec{PrimeBase(2), Domain::N, ExplicitSet{{0, 2, 8}}},
                             SetSpec{PrimeBase(3), Domain::N, PowersSet{7, 1000}}}) {
        const SetSpec rt = spec_from_json(spec_to_json(s));
        CHECK(enumerate(rt, Interval(0, 100)) == enumerate(s, Interval(0, 100)));
        CHECK(spec_to_json(rt) == spec_to_json(s));  // canonical form is a fixed point
    }

    CHECK_THROWS(spec_from_json("{\"p\":3,"));  // malformed
    CHECK_THROWS_AS(spec_from_json(R"({"p":3,"domain":"N","kind":"sft",
        "matrix":[[1,1],[1,0]]})"), std::invalid_argument);  // matrix shape vs p
    CHECK_THROWS_AS(spec_from_json(R"({"p":4,"domain":"N","kind":"ap","a":1,"r":4})"),
                    std::invalid_argument);  // 4 is not prime
    CHECK_THROWS_AS(spec_from_json(R"({"p":3,"domain":"N","kind":"ap","a":1,"r":4,"x":1})"),
                    std::invalid_argument);  // unknown key
    CHECK_THROWS_AS(spec_from_json(R"({"p":3,"domain":"N","kind":"ap","a":1})"),
                    std::invalid_argument);  // missing key
    CHECK_THROWS_AS(spec_from_json(R"({"p":3,"domain":"Q","kind":"ap","a":1,"r":4})"),
                    std::invalid_argument);  // bad domain
    CHECK_THROWS_AS(spec_from_json(R"({"p":3,"domain":"N","kind":"powers","q":10,"bound":50})"),
                    std::invalid_argument);  // 10 = 1 mod 9: closure degenerates
    CHECK_THROWS_AS(spec_from_json(R"({"p":3,"domain":"N","kind":"blob"})"),
                    std::invalid_argument);

    const std::string te_json = R"({"p":5,"domain":"N","kind":"theorem_e",
        "schedule":[2,4,8,16,32],"depth":32,"allowed_digits":[0,2,4]})";
    const SetSpec te = spec_from_json(te_json);
    CHECK(cover_size(te, 32) == ipow(3, 22));
    CHECK(spec_to_json(spec_from_json(spec_to_json(te))) == spec_to_json(te));
}
