#include "qcd/arith.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <set>
#include <vector>

using namespace qcd;

namespace {

/// Brute-force oracle: D is a nonzero square mod p.
bool is_square_mod(i64 d, u64 p)
{
    u64 r = mod_floor(d, p);
    if (r == 0)
        return false;
    for (u64 t = 1; t < p; ++t)
        if (t * t % p == r)
            return true;
    return false;
}

std::vector<u64> small_primes(u64 limit)
{
    std::vector<u64> out;
    for (u64 n = 2; n <= limit; ++n) {
        bool prime = true;
        for (u64 d = 2; d * d <= n; ++d)
            if (n % d == 0) {
                prime = false;
                break;
            }
        if (prime)
            out.push_back(n);
    }
    return out;
}

} // namespace

TEST(Kronecker, Examples)
{
    EXPECT_EQ(kronecker(5, 11), 1);
    EXPECT_EQ(kronecker(1, 7), 1);
    EXPECT_EQ(kronecker(3, 7), -1);
    EXPECT_EQ(kronecker(10, 5), 0);
}

TEST(Kronecker, ValueAtTwo)
{
    EXPECT_EQ(kronecker(4, 2), 0);
    EXPECT_EQ(kronecker(1, 2), 1);
    EXPECT_EQ(kronecker(7, 2), 1);
    EXPECT_EQ(kronecker(-1, 2), 1);
    EXPECT_EQ(kronecker(3, 2), -1);
    EXPECT_EQ(kronecker(5, 2), -1);
    EXPECT_EQ(kronecker(-3, 2), -1);
}

TEST(Kronecker, LegendreAgreesWithSquareTable)
{
    const std::vector<i64> ds = {-20, -7, -5, -3, -2, -1, 2, 3, 5, 6, 10, 13, 21, 1000003};
    for (u64 p : small_primes(10'000)) {
        if (p == 2)
            continue;
        for (i64 d : ds) {
            if (magnitude(d) % p == 0)
                continue;
            ASSERT_EQ(kronecker(d, static_cast<i64>(p)) == 1, is_square_mod(d, p)) << "D=" << d << " p=" << p;
        }
    }
}

TEST(Kronecker, MultiplicativeInDenominator)
{
    for (i64 d = -30; d <= 30; ++d)
        for (i64 m = 1; m <= 40; ++m)
            for (i64 n = 1; n <= 40; ++n)
                ASSERT_EQ(kronecker(d, m * n), kronecker(d, m) * kronecker(d, n)) << d << ' ' << m << ' ' << n;
}

TEST(Kronecker, ZeroExactlyOnSharedFactor)
{
    for (i64 d = -50; d <= 50; ++d)
        for (i64 n = 1; n <= 60; ++n)
            ASSERT_EQ(kronecker(d, n) == 0, std::gcd(magnitude(d), static_cast<u64>(n)) > 1) << d << ' ' << n;
}

TEST(Crt, Examples)
{
    auto a = crt_combine({{2, 3}, {3, 5}});
    ASSERT_TRUE(a);
    EXPECT_EQ(*a, (Congruence{8, 15}));

    auto b = crt_combine({{1, 4}, {1, 3}});
    ASSERT_TRUE(b);
    EXPECT_EQ(*b, (Congruence{1, 12}));

    EXPECT_FALSE(crt_combine({{0, 2}, {1, 2}}));
}

TEST(Crt, RejectsEmptyAndZeroModulus)
{
    EXPECT_THROW(crt_combine({}), std::invalid_argument);
    EXPECT_THROW(crt_combine({{0, 0}}), std::invalid_argument);
}

TEST(Crt, AgreesWithExhaustiveScan)
{
    for (u64 m1 = 1; m1 <= 12; ++m1)
        for (u64 m2 = 1; m2 <= 12; ++m2)
            for (u64 r1 = 0; r1 < m1; ++r1)
                for (u64 r2 = 0; r2 < m2; ++r2) {
                    const u64 l = std::lcm(m1, m2);
                    std::optional<u64> first;
                    for (u64 t = 0; t < l && !first; ++t)
                        if (t % m1 == r1 && t % m2 == r2)
                            first = t;
                    auto got = crt_combine({{r1, m1}, {r2, m2}});
                    ASSERT_EQ(got.has_value(), first.has_value());
                    if (got) {
                        EXPECT_EQ(got->modulus, l);
                        EXPECT_EQ(got->residue, *first);
                    }
                }
}

TEST(Crt, LargeCoprimeModuli)
{
    const u64 m1 = 2'147'483'647ULL, m2 = 2'147'483'629ULL; // primes below 2^31
    auto got = crt_combine({{123456789, m1}, {987654321, m2}});
    ASSERT_TRUE(got);
    EXPECT_EQ(got->residue % m1, 123456789u);
    EXPECT_EQ(got->residue % m2, 987654321u);
    EXPECT_THROW(crt_combine({{0, m1}, {0, m2}, {0, 2'147'483'587ULL}}), std::overflow_error);
}

TEST(EulerPhi, Examples)
{
    EXPECT_EQ(euler_phi(1), 1u);
    EXPECT_EQ(euler_phi(13), 12u);
    EXPECT_EQ(euler_phi(20), 8u);
    EXPECT_THROW(euler_phi(0), std::invalid_argument);
}

TEST(EulerPhi, MatchesUnitCount)
{
    for (u64 n = 1; n <= 10'000; ++n) {
        u64 units = 0;
        for (u64 a = 0; a < n; ++a)
            units += std::gcd(a, n) == 1;
        ASSERT_EQ(euler_phi(n), units) << n;
    }
}

TEST(SquarefreeKernel, Examples)
{
    auto a = squarefree_kernel(5);
    EXPECT_EQ(a.sign, 1);
    EXPECT_EQ(a.odd_exponent_primes, std::vector<u64>{5});
    EXPECT_FALSE(a.is_perfect_square);

    auto b = squarefree_kernel(-12);
    EXPECT_EQ(b.sign, -1);
    EXPECT_EQ(b.odd_exponent_primes, std::vector<u64>{3});
    EXPECT_FALSE(b.is_perfect_square);

    auto c = squarefree_kernel(16);
    EXPECT_EQ(c.sign, 1);
    EXPECT_TRUE(c.odd_exponent_primes.empty());
    EXPECT_TRUE(c.is_perfect_square);

    EXPECT_THROW(squarefree_kernel(0), std::invalid_argument);
}

TEST(SquarefreeKernel, NegativeSquareIsNotASquare)
{
    auto k = squarefree_kernel(-4);
    EXPECT_EQ(k.sign, -1);
    EXPECT_TRUE(k.odd_exponent_primes.empty());
    EXPECT_FALSE(k.is_perfect_square);
    EXPECT_EQ(k.value(), -1);
}

TEST(SquarefreeKernel, PreservesSymbolOnOddPrimes)
{
    const auto primes = small_primes(1000);
    for (i64 d = -400; d <= 400; ++d) {
        if (d == 0)
            continue;
        const auto k = squarefree_kernel(d);
        std::set<u64> distinct(k.odd_exponent_primes.begin(), k.odd_exponent_primes.end());
        ASSERT_EQ(distinct.size(), k.odd_exponent_primes.size());
        for (u64 p : primes) {
            if (p == 2 || magnitude(d) % p == 0)
                continue;
            ASSERT_EQ(kronecker(d, static_cast<i64>(p)), kronecker(k.value(), static_cast<i64>(p)))
                << "D=" << d << " p=" << p;
        }
    }
}

TEST(Arith, CheckedMultiplyOverflows)
{
    EXPECT_EQ(checked_mul(1ULL << 31, 1ULL << 31), 1ULL << 62);
    EXPECT_THROW(checked_mul(1ULL << 32, 1ULL << 32), std::overflow_error);
}
