#include "qcd/density.hpp"
#include "qcd/quadsolve.hpp"
#include "qcd/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace qcd;

namespace {

const PrimeIndex& primes()
{
    static const PrimeIndex idx = PrimeIndex::up_to(100'000);
    return idx;
}

std::vector<u64> factor_list(u64 n)
{
    std::vector<u64> f;
    for (u64 d = 2; d * d <= n; ++d)
        while (n % d == 0) {
            f.push_back(d);
            n /= d;
        }
    if (n > 1)
        f.push_back(n);
    return f;
}

/// Direct definition of the sign count, by trial division.
std::vector<u64> oracle_signs(u64 x, i64 d, const std::vector<int>& eps, bool squarefree)
{
    std::vector<u64> out;
    for (u64 n = 2; n <= x; ++n) {
        auto f = factor_list(n);
        if (f.size() != eps.size())
            continue;
        if (squarefree && std::adjacent_find(f.begin(), f.end()) != f.end())
            continue;
        bool ok = true;
        for (std::size_t i = 0; i < f.size() && ok; ++i)
            ok = kronecker(d, static_cast<i64>(f[i])) == eps[i];
        if (ok)
            out.push_back(n);
    }
    return out;
}

} // namespace

TEST(Landau, Examples)
{
    EXPECT_NEAR(landau_asymptotic(1e6, 1), 72382.4, 0.05);
    // 1e6 * loglog(1e6) / log(1e6) = 1e6 * 2.625791 / 13.815511
    EXPECT_NEAR(landau_asymptotic(1e6, 2), 190061.157, 1e-3);
    EXPECT_NEAR(landau_asymptotic(1e6, 2) / 190063, 1.0, 1e-4);
    EXPECT_NEAR(landau_asymptotic(16, 1), 5.771, 5e-4);
    EXPECT_THROW(landau_asymptotic(15, 1), std::domain_error);
    EXPECT_THROW(landau_asymptotic(1e6, 0), std::domain_error);
}

TEST(ClassAsymptotic, Examples)
{
    EXPECT_NEAR(class_asymptotic(1e6, 2, 4), 190061.157 / 4, 1e-3);
    EXPECT_NEAR(class_asymptotic(1e6, 2, 4) / 47515.8, 1.0, 1e-4);
    EXPECT_DOUBLE_EQ(class_asymptotic(1e6, 1, 1), landau_asymptotic(1e6, 1));
    EXPECT_NEAR(class_asymptotic(1e6, 2, 5), 190061.157 / 16, 1e-3);
    EXPECT_NEAR(class_asymptotic(1e6, 2, 5) / 11878.9, 1.0, 1e-4);
}

TEST(SignConstraint, Validation)
{
    EXPECT_THROW(SignConstraint(4, {1}), std::domain_error);
    EXPECT_THROW(SignConstraint(0, {1}), std::domain_error);
    EXPECT_THROW(SignConstraint(5, {}), std::invalid_argument);
    EXPECT_THROW(SignConstraint(5, {0}), std::invalid_argument);
    EXPECT_EQ(SignConstraint(5, {1, -1}).describe(), "eps=+-");
}

TEST(CountSignConstrained, Examples)
{
    auto sq = TupleCountMode::squarefree;
    EXPECT_EQ(count_sign_constrained(primes(), 300, SignConstraint(5, {1, 1}), sq), 1u);
    EXPECT_EQ(list_sign_constrained(primes(), 300, SignConstraint(5, {1, 1}), sq), std::vector<u64>{209});
    EXPECT_EQ(list_sign_constrained(primes(), 50, SignConstraint(5, {-1, -1}), sq),
              (std::vector<u64>{6, 14, 21, 26, 34, 39, 46}));
    EXPECT_EQ(list_sign_constrained(primes(), 50, SignConstraint(5, {-1, 1}), sq), (std::vector<u64>{22, 33, 38}));
    EXPECT_EQ(count_sign_constrained(primes(), 50, SignConstraint(5, {1, -1}), sq), 0u);
}

TEST(CountSignConstrained, MatchesTrialDivisionOracle)
{
    for (i64 d : {5, -3, -4, 8, 12, -20, 21})
        for (unsigned k = 1; k <= 3; ++k)
            for (const auto& eps : all_sign_tuples(k))
                for (bool sq : {true, false}) {
                    const auto mode = sq ? TupleCountMode::squarefree : TupleCountMode::with_multiplicity;
                    ASSERT_EQ(list_sign_constrained(primes(), 3000, SignConstraint(d, eps), mode),
                              oracle_signs(3000, d, eps, sq))
                        << "D=" << d << " " << SignConstraint(d, eps).describe() << " squarefree=" << sq;
                }
}

TEST(CountSignConstrained, EvenDiscriminantExcludesEvenN)
{
    for (u64 n : list_sign_constrained(primes(), 5000, SignConstraint(-20, {-1, 1}), TupleCountMode::squarefree))
        ASSERT_EQ(n % 2, 1u);
    // D odd: 2 participates with (D/2)
    auto with_two = list_sign_constrained(primes(), 50, SignConstraint(-3, {-1, 1}), TupleCountMode::squarefree);
    EXPECT_EQ(with_two.front(), 14u); // 2 * 7, (-3/2) = -1 and (-3/7) = +1
}

TEST(CountSignConstrained, PartitionOfCoprimeSquarefree)
{
    for (i64 d : {5, -3, 12, -7})
        for (unsigned k = 1; k <= 3; ++k)
            for (u64 x : {50, 10'000, 100'000}) {
                u64 sum = 0;
                for (const auto& eps : all_sign_tuples(k))
                    sum += count_sign_constrained(primes(), x, SignConstraint(d, eps), TupleCountMode::squarefree);
                u64 direct = 0;
                for (u64 n = 2; n <= x; ++n) {
                    if (std::gcd(n, magnitude(d)) != 1)
                        continue;
                    auto f = factor_list(n);
                    direct += f.size() == k && std::adjacent_find(f.begin(), f.end()) == f.end();
                }
                ASSERT_EQ(sum, direct) << "D=" << d << " k=" << k << " x=" << x;
                ASSERT_EQ(count_coprime_to_discriminant(primes(), x, k, d), direct);
            }
}

TEST(EmpiricalSignDensity, Examples)
{
    auto a = empirical_sign_density(primes(), 100'000, SignConstraint(5, {1}));
    EXPECT_EQ(a.reference, 9592u);
    ASSERT_TRUE(a.empirical);
    EXPECT_LT(std::abs(*a.empirical - 0.5), 0.02);
    EXPECT_EQ(a.predicted, 0.5);

    // D = -1 is odd, so p = 2 takes part with (-1/2) = +1: {2, 5, 13, 17, 29}
    auto b = empirical_sign_density(primes(), 30, SignConstraint(-1, {1}));
    EXPECT_EQ(b.count, 5u);
    EXPECT_EQ(b.reference, 10u);
    ASSERT_TRUE(b.empirical);
    EXPECT_DOUBLE_EQ(*b.empirical, 0.5);
    EXPECT_EQ(count_sign_constrained(primes(), 30, SignConstraint(-4, {1}), TupleCountMode::squarefree), 4u);

    auto c = empirical_sign_density(primes(), 5, SignConstraint(5, {1, 1}));
    EXPECT_EQ(c.reference, 0u);
    EXPECT_FALSE(c.empirical);
    EXPECT_FALSE(c.asymptotic);
}

TEST(DensityTable, SmallGrid)
{
    auto t = density_table(primes(), {50}, 2, 5);
    ASSERT_EQ(t.rows.size(), 5u);
    std::vector<u64> counts;
    for (int i = 0; i < 4; ++i)
        counts.push_back(t.rows[static_cast<std::size_t>(i)].count);
    EXPECT_EQ(counts, (std::vector<u64>{0, 0, 3, 7}));
    EXPECT_EQ(t.rows[0].constraint, "eps=++");
    EXPECT_EQ(t.rows[1].constraint, "eps=+-");
    EXPECT_EQ(t.rows[2].constraint, "eps=-+");
    EXPECT_EQ(t.rows[3].constraint, "eps=--");
    EXPECT_EQ(t.rows[4].constraint, "coprime");
    EXPECT_EQ(t.rows[4].count, 10u);
    EXPECT_EQ(t.rows[0].reference, 13u); // squarefree semiprimes <= 50
    EXPECT_TRUE(t.failures.empty());
}

TEST(DensityTable, GridPartition)
{
    auto big = PrimeIndex::up_to(500'000);
    auto t = density_table(big, {10'000, 100'000, 1'000'000}, 2, 5);
    ASSERT_EQ(t.rows.size(), 15u);
    for (std::size_t i = 0; i < 3; ++i) {
        u64 sum = 0;
        for (std::size_t j = 0; j < 4; ++j)
            sum += t.rows[5 * i + j].count;
        EXPECT_EQ(sum, t.rows[5 * i + 4].count);
    }
}

TEST(DensityTable, EmptyGridAndValidation)
{
    EXPECT_TRUE(density_table(primes(), {}, 2, 5).rows.empty());
    EXPECT_THROW(density_table(primes(), {100, 50}, 2, 5), std::invalid_argument);
    EXPECT_THROW(density_table(primes(), {100}, 2, 9), std::domain_error);
}

TEST(DensityTable, BudgetTruncates)
{
    DensityTableOptions opt;
    opt.budget_seconds = 0.0;
    auto t = density_table(primes(), {100, 1000}, 2, 5, opt);
    EXPECT_TRUE(t.truncated);
    EXPECT_LT(t.rows.size(), 10u);
}

TEST(Reduction, SignCountsEqualSummedResidueCounts)
{
    for (i64 d : {5, -3, -20, 2}) {
        auto r = verify_reduction(primes(), {d}, 2, 10'000);
        EXPECT_TRUE(r.passed) << r.detail;
    }
    auto r3 = verify_reduction(primes(), {5}, 3, 10'000);
    EXPECT_TRUE(r3.passed) << r3.detail;
}

TEST(Reduction, ResidueRowsArePositional)
{
    DensityTableOptions opt;
    opt.residue_rows = true;
    auto t = density_table(primes(), {10'000}, 2, 5, opt);
    EXPECT_TRUE(t.failures.empty());
    // 4 sign rows, coprime row, then |B|^2 rows per sign tuple
    EXPECT_EQ(t.rows.size(), 5u + 4 * 16);
    EXPECT_EQ(t.rows[5].constraint, "m=1,1 mod 20");
}

TEST(RootModuli, AllPlusSignsAreExactlyTheFourRootModuli)
{
    auto r = verify_roots(primes(), 0, -5, 2, 10'000);
    EXPECT_TRUE(r.passed) << r.detail;
    EXPECT_GT(r.checks, 0u);
    auto r3 = verify_roots(primes(), 1, 1, 3, 10'000);
    EXPECT_TRUE(r3.passed) << r3.detail;
}
