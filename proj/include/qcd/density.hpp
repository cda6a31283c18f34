#pragma once

// Sign-constrained counts of k-almost-primes, the matching asymptotic
// predictions, and density tables over a grid of x.

#include "qcd/almostprime.hpp"
#include "qcd/arith.hpp"
#include "qcd/residues.hpp"
#include "qcd/sieve.hpp"
#include "qcd/tuples.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcd {

/// Smallest x with loglog x > 1 is e^e; below it the asymptotic formulas are rejected.
inline const double asymptotic_min_x = std::exp(std::exp(1.0));

/// x (loglog x)^(k-1) / ((k-1)! log x), natural logarithms.
inline double landau_asymptotic(double x, unsigned k)
{
    if (k == 0)
        throw std::domain_error("landau_asymptotic: k must be at least 1");
    if (!(x >= asymptotic_min_x))
        throw std::domain_error("landau_asymptotic: x must be at least e^e");
    const double lx = std::log(x);
    return x * std::pow(std::log(lx), k - 1.0) / (std::tgamma(static_cast<double>(k)) * lx);
}

/// landau_asymptotic(x, k) / phi(N)^k.
inline double class_asymptotic(double x, unsigned k, u64 modulus)
{
    if (modulus == 0)
        throw std::domain_error("class_asymptotic: N must be positive");
    return landau_asymptotic(x, k) / std::pow(static_cast<double>(euler_phi(modulus)), static_cast<double>(k));
}

/// (D/p_i) = epsilon_i for the i-th smallest prime of n.
struct SignConstraint {
    i64 d = 0;
    std::vector<int> epsilons;

    SignConstraint() = default;
    SignConstraint(i64 d_, std::vector<int> eps)
        : d(d_), epsilons(std::move(eps))
    {
        validate();
    }

    unsigned k() const { return static_cast<unsigned>(epsilons.size()); }

    void validate() const
    {
        if (epsilons.empty())
            throw std::invalid_argument("sign constraint: k must be at least 1");
        for (int e : epsilons)
            if (e != 1 && e != -1)
                throw std::invalid_argument("sign constraint: epsilons must be +1 or -1");
        if (d == 0 || is_perfect_square(d))
            throw std::domain_error("sign constraint: D = " + std::to_string(d) + " is a square");
    }

    /// "eps=+-"
    std::string describe() const
    {
        std::string s = "eps=";
        for (int e : epsilons)
            s += e > 0 ? '+' : '-';
        return s;
    }
};

/// All 2^k sign tuples ordered as their "+"/"-" strings, so ++ < +- < -+ < --.
inline std::vector<std::vector<int>> all_sign_tuples(unsigned k)
{
    std::vector<std::vector<int>> out;
    for (u64 bits = 0; bits < (u64{1} << k); ++bits) {
        std::vector<int> e(k);
        for (unsigned i = 0; i < k; ++i)
            e[i] = (bits >> (k - 1 - i)) & 1 ? -1 : 1;
        out.push_back(std::move(e));
    }
    return out;
}

enum class Parity { any, odd_only };

/// Primes up to bound, class 0 for (D/p) = +1, class 1 for -1, excluded when (D/p) = 0.
inline ClassedPrimes classify_by_sign(const PrimeIndex& primes, i64 d, u64 bound, Parity parity = Parity::any)
{
    return ClassedPrimes(primes, std::min(bound, primes.limit()), 2, [d, parity](u64 p) {
        if (parity == Parity::odd_only && p == 2)
            return ClassedPrimes::excluded;
        int s = kronecker(d, static_cast<i64>(p));
        return s == 1 ? 0 : s == -1 ? 1 : ClassedPrimes::excluded;
    });
}

namespace detail {

inline TuplePlan sign_plan(const SignConstraint& c)
{
    std::vector<int> classes;
    for (int e : c.epsilons)
        classes.push_back(e > 0 ? 0 : 1);
    return TuplePlan::positional(std::move(classes));
}

inline u64 prime_bound(const PrimeIndex& primes, u64 x, unsigned k)
{
    u64 need = std::max<u64>(std::min(x, largest_prime_needed(x, k)), 1);
    primes.require(need);
    return need;
}

} // namespace detail

/// n <= x with k prime factors whose i-th smallest prime has (D/p_i) = epsilon_i.
/// Primes dividing D have symbol 0 and never match; with_multiplicity checks each position.
inline u64 count_sign_constrained(const PrimeIndex& primes, u64 x, const SignConstraint& constraint,
                                  TupleCountMode mode, Parity parity = Parity::any, unsigned threads = 1)
{
    constraint.validate();
    const unsigned k = constraint.k();
    auto table = classify_by_sign(primes, constraint.d, detail::prime_bound(primes, x, k), parity);
    return tally_tuples(table, x, mode, detail::sign_plan(constraint), false, threads).integers;
}

/// The integers counted by count_sign_constrained, ascending.
inline std::vector<u64> list_sign_constrained(const PrimeIndex& primes, u64 x, const SignConstraint& constraint,
                                              TupleCountMode mode, Parity parity = Parity::any)
{
    constraint.validate();
    auto table = classify_by_sign(primes, constraint.d, detail::prime_bound(primes, x, constraint.k()), parity);
    std::vector<u64> out;
    for_each_tuple(table, x, mode, detail::sign_plan(constraint), [&](std::span<const std::uint32_t> t) {
        u64 n = 1;
        for (auto p : t)
            n *= p;
        out.push_back(n);
    });
    std::sort(out.begin(), out.end());
    return out;
}

/// Squarefree n <= x with k prime factors, none of them dividing D (so n is odd when D is even).
inline u64 count_coprime_to_discriminant(const PrimeIndex& primes, u64 x, unsigned k, i64 d, unsigned threads = 1)
{
    auto table = ClassedPrimes(primes, detail::prime_bound(primes, x, k), 1, [d](u64 p) {
        return kronecker(d, static_cast<i64>(p)) == 0 ? ClassedPrimes::excluded : 0;
    });
    return tally_tuples(table, x, TupleCountMode::squarefree, TuplePlan::multiset(std::vector<int>(k, 0)), false,
                        threads)
        .integers;
}

struct DensityRow {
    u64 x = 0;
    unsigned k = 0;
    i64 d = 0;
    std::string constraint;
    u64 count = 0;
    u64 reference = 0;
    std::optional<double> empirical; // empty when reference == 0
    double predicted = 0.0;
    std::optional<double> asymptotic; // predicted count; empty below e^e
};

namespace detail {

inline std::optional<double> ratio(u64 num, u64 den)
{
    if (den == 0)
        return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

inline std::optional<double> landau_or_none(double x, unsigned k, double scale)
{
    if (x < asymptotic_min_x)
        return std::nullopt;
    return landau_asymptotic(x, k) * scale;
}

} // namespace detail

/// Row with count = squarefree sign-constrained count, reference = pi_k(x), predicted 1/2^k.
inline DensityRow empirical_sign_density(const PrimeIndex& primes, u64 x, const SignConstraint& constraint,
                                         unsigned threads = 1)
{
    const unsigned k = constraint.k();
    DensityRow row;
    row.x = x;
    row.k = k;
    row.d = constraint.d;
    row.constraint = constraint.describe();
    row.count = count_sign_constrained(primes, x, constraint, TupleCountMode::squarefree, Parity::any, threads);
    row.reference = count_almost(primes, x, k, std::nullopt, TupleCountMode::squarefree, threads);
    row.empirical = detail::ratio(row.count, row.reference);
    row.predicted = std::ldexp(1.0, -static_cast<int>(k));
    row.asymptotic = detail::landau_or_none(static_cast<double>(x), k, row.predicted);
    return row;
}

struct DensityTableOptions {
    bool residue_rows = false;  // one row per (m_1..m_k) in B(eps_1) x ... x B(eps_k)
    bool coprime_row = true;    // the coprime-to-D denominator alongside pi_k(x)
    unsigned threads = 1;
    std::optional<double> budget_seconds;
};

struct DensityTable {
    std::vector<DensityRow> rows;
    /// Mismatches between odd sign counts and summed residue counts (only with residue_rows).
    std::vector<std::string> failures;
    bool truncated = false;
};

/// Rows ordered by x, then sign tuple (++ < +- < -+ < --), then the coprime row,
/// then residue rows. The grid must be ascending.
inline DensityTable density_table(const PrimeIndex& primes, const std::vector<u64>& x_grid, unsigned k, i64 d,
                                  const DensityTableOptions& options = {})
{
    DensityTable table;
    if (x_grid.empty())
        return table;
    if (k == 0)
        throw std::invalid_argument("density_table: k must be at least 1");
    for (std::size_t i = 1; i < x_grid.size(); ++i)
        if (x_grid[i] <= x_grid[i - 1])
            throw std::invalid_argument("density_table: x grid must be strictly ascending");
    if (d == 0 || is_perfect_square(d))
        throw std::domain_error("density_table: D = " + std::to_string(d) + " is a square");

    const auto start = std::chrono::steady_clock::now();
    auto over_budget = [&] {
        if (!options.budget_seconds)
            return false;
        std::chrono::duration<double> el = std::chrono::steady_clock::now() - start;
        return el.count() > *options.budget_seconds;
    };

    const double half_k = std::ldexp(1.0, -static_cast<int>(k));
    const u64 q = modulus_Q(d);
    const double phi_q = static_cast<double>(euler_phi(q));
    std::vector<ResidueClassSet> b_sets;
    if (options.residue_rows)
        b_sets = {residue_classes_direct(d, 1), residue_classes_direct(d, -1)};

    for (u64 x : x_grid) {
        if (over_budget()) {
            table.truncated = true;
            break;
        }
        const u64 bound = detail::prime_bound(primes, x, k);
        const auto signs = classify_by_sign(primes, d, bound);
        const u64 reference =
            count_almost(primes, x, k, std::nullopt, TupleCountMode::squarefree, options.threads);
        // per-class prediction 1/phi(Q)^k summed over (phi(Q)/2)^k residue tuples
        const double per_class = 1.0 / std::pow(phi_q, static_cast<double>(k));
        const double class_tuples = std::pow(phi_q / 2.0, static_cast<double>(k));

        for (const auto& eps : all_sign_tuples(k)) {
            SignConstraint c(d, eps);
            DensityRow row;
            row.x = x;
            row.k = k;
            row.d = d;
            row.constraint = c.describe();
            row.count = tally_tuples(signs, x, TupleCountMode::squarefree, detail::sign_plan(c), false,
                                     options.threads)
                            .integers;
            row.reference = reference;
            row.empirical = detail::ratio(row.count, reference);
            row.predicted = half_k;
            row.asymptotic = detail::landau_or_none(static_cast<double>(x), k, per_class * class_tuples);
            table.rows.push_back(std::move(row));
        }

        if (options.coprime_row) {
            DensityRow row;
            row.x = x;
            row.k = k;
            row.d = d;
            row.constraint = "coprime";
            row.count = count_coprime_to_discriminant(primes, x, k, d, options.threads);
            row.reference = reference;
            row.empirical = detail::ratio(row.count, reference);
            row.predicted = 1.0;
            row.asymptotic = detail::landau_or_none(static_cast<double>(x), k, 1.0);
            table.rows.push_back(std::move(row));
        }

        if (options.residue_rows) {
            const auto by_residue = classify_by_residue(primes, q, bound);
            const auto odd_signs = classify_by_sign(primes, d, bound, Parity::odd_only);
            for (const auto& eps : all_sign_tuples(k)) {
                SignConstraint c(d, eps);
                u64 summed = 0;
                // odometer over B(eps_1) x ... x B(eps_k)
                std::vector<std::size_t> pick(k, 0);
                auto pool = [&](unsigned i) -> const std::vector<u64>& {
                    return b_sets[eps[i] > 0 ? 0 : 1].classes;
                };
                bool done = false;
                while (!done) {
                    std::vector<int> classes;
                    std::vector<u64> residues;
                    for (unsigned i = 0; i < k; ++i) {
                        residues.push_back(pool(i)[pick[i]]);
                        classes.push_back(static_cast<int>(residues.back()));
                    }
                    DensityRow row;
                    row.x = x;
                    row.k = k;
                    row.d = d;
                    row.constraint = ConstraintTuple(q, residues).describe();
                    row.count = tally_tuples(by_residue, x, TupleCountMode::squarefree,
                                             TuplePlan::positional(classes), false, options.threads)
                                    .integers;
                    summed += row.count;
                    row.reference = reference;
                    row.empirical = detail::ratio(row.count, reference);
                    row.predicted = per_class;
                    row.asymptotic = detail::landau_or_none(static_cast<double>(x), k, per_class);
                    table.rows.push_back(std::move(row));

                    done = true;
                    for (unsigned i = k; i-- > 0;) {
                        if (++pick[i] < pool(i).size()) {
                            done = false;
                            break;
                        }
                        pick[i] = 0;
                    }
                }
                u64 odd = tally_tuples(odd_signs, x, TupleCountMode::squarefree, detail::sign_plan(c), false,
                                       options.threads)
                              .integers;
                if (odd != summed)
                    table.failures.push_back("x=" + std::to_string(x) + " " + c.describe() + ": odd count " +
                                             std::to_string(odd) + " != residue sum " + std::to_string(summed));
            }
        }
    }
    return table;
}

} // namespace qcd
