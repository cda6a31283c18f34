#pragma once

// Counting k-almost-primes whose prime factors lie in prescribed residue
// classes, the auxiliary sums Pi, theta, L and f built on those counts, and
// exact checks of the recursions tying level k+1 to level k.

#include "qcd/arith.hpp"
#include "qcd/chars.hpp"
#include "qcd/sieve.hpp"
#include "qcd/tuples.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcd {

/// k units mod N, repeats allowed. Order is significant only for positional counts.
struct ConstraintTuple {
    u64 modulus = 1;
    std::vector<u64> residues;

    ConstraintTuple() = default;
    ConstraintTuple(u64 n, std::vector<u64> m)
        : modulus(n), residues(std::move(m))
    {
        if (modulus == 0)
            throw std::invalid_argument("constraint: modulus must be positive");
        for (auto& r : residues)
            r %= modulus;
        validate();
    }

    unsigned k() const { return static_cast<unsigned>(residues.size()); }

    void validate() const
    {
        if (modulus == 0)
            throw std::invalid_argument("constraint: modulus must be positive");
        if (residues.empty())
            throw std::invalid_argument("constraint: k must be at least 1");
        for (u64 m : residues) {
            if (m >= modulus)
                throw std::invalid_argument("constraint: residue " + std::to_string(m) + " not reduced mod " +
                                            std::to_string(modulus));
            if (std::gcd(m, modulus) != 1)
                throw std::invalid_argument("constraint: residue " + std::to_string(m) + " is not a unit mod " +
                                            std::to_string(modulus));
        }
    }

    ConstraintTuple sorted() const
    {
        ConstraintTuple c = *this;
        std::sort(c.residues.begin(), c.residues.end());
        return c;
    }

    /// Distinct multisets obtained by deleting one entry, with the deleted value.
    std::vector<std::pair<u64, ConstraintTuple>> reductions() const
    {
        std::vector<std::pair<u64, ConstraintTuple>> out;
        auto s = sorted().residues;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (i > 0 && s[i] == s[i - 1])
                continue;
            ConstraintTuple r;
            r.modulus = modulus;
            r.residues = s;
            r.residues.erase(r.residues.begin() + static_cast<std::ptrdiff_t>(i));
            out.emplace_back(s[i], std::move(r));
        }
        return out;
    }

    /// "m=1,3 mod 4"
    std::string describe() const
    {
        std::ostringstream os;
        os << "m=";
        for (std::size_t i = 0; i < residues.size(); ++i)
            os << (i ? "," : "") << residues[i];
        os << " mod " << modulus;
        return os.str();
    }

    friend bool operator==(const ConstraintTuple&, const ConstraintTuple&) = default;
};

/// Every multiset of k units mod N, each as an ascending tuple, in lexicographic order.
inline std::vector<ConstraintTuple> all_constraint_multisets(u64 modulus, unsigned k)
{
    std::vector<u64> units;
    for (u64 a = 0; a < modulus; ++a)
        if (std::gcd(a, modulus) == 1)
            units.push_back(a);
    std::vector<ConstraintTuple> out;
    std::vector<std::size_t> idx(k, 0);
    while (true) {
        ConstraintTuple c;
        c.modulus = modulus;
        for (auto i : idx)
            c.residues.push_back(units[i]);
        out.push_back(std::move(c));
        // next nondecreasing index vector
        std::size_t j = k;
        while (j > 0 && idx[j - 1] + 1 == units.size())
            --j;
        if (j == 0)
            break;
        ++idx[j - 1];
        for (std::size_t t = j; t < k; ++t)
            idx[t] = idx[j - 1];
    }
    return out;
}

/// M: k! / prod(multiplicity of each distinct residue)!.
inline u64 distinct_permutation_count(const ConstraintTuple& c)
{
    auto s = c.sorted().residues;
    if (s.empty())
        throw std::invalid_argument("distinct_permutation_count: k must be at least 1");
    // multinomial as a product of binomials to stay exact
    u64 m = 1;
    std::size_t placed = 0;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t j = i;
        while (j < s.size() && s[j] == s[i])
            ++j;
        std::size_t run = j - i;
        // C(placed + run, run)
        u64 binom = 1;
        for (std::size_t t = 1; t <= run; ++t)
            binom = checked_mul(binom, placed + t) / t;
        m = checked_mul(m, binom);
        placed += run;
        i = j;
    }
    return m;
}

/// Primes classified by their residue mod N; one table serves every constraint mod N.
inline ClassedPrimes classify_by_residue(const PrimeIndex& index, u64 modulus, u64 bound)
{
    if (modulus == 0 || modulus > (1u << 30))
        throw std::invalid_argument("classify_by_residue: modulus out of range");
    return ClassedPrimes(index, std::min(bound, index.limit()), static_cast<int>(modulus),
                         [modulus](u64 p) { return static_cast<int>(p % modulus); });
}

namespace detail {

inline std::vector<int> as_classes(const ConstraintTuple& c)
{
    std::vector<int> out;
    for (u64 m : c.residues)
        out.push_back(static_cast<int>(m));
    return out;
}

inline ClassedPrimes residue_table(const PrimeIndex& primes, u64 x, unsigned k, u64 modulus)
{
    if (k == 0)
        throw std::invalid_argument("k must be at least 1");
    u64 need = std::min(x, largest_prime_needed(x, k));
    primes.require(need);
    return classify_by_residue(primes, modulus, std::max<u64>(need, 1));
}

} // namespace detail

/// Number of n <= x with exactly k prime factors (squarefree: distinct) whose
/// residues mod N form the constraint multiset. Without a constraint, all n count.
inline u64 count_almost(const PrimeIndex& primes, u64 x, unsigned k, const std::optional<ConstraintTuple>& constraint,
                        TupleCountMode mode, unsigned threads = 1)
{
    if (k == 0)
        throw std::invalid_argument("count_almost: k must be at least 1");
    if (!constraint) {
        u64 need = std::min(x, largest_prime_needed(x, k));
        primes.require(need);
        ClassedPrimes all(primes, std::max<u64>(need, 1), 1, [](u64) { return 0; });
        return tally_tuples(all, x, mode, TuplePlan::multiset(std::vector<int>(k, 0)), false, threads).integers;
    }
    constraint->validate();
    if (constraint->k() != k)
        throw std::invalid_argument("count_almost: constraint length differs from k");
    auto table = detail::residue_table(primes, x, k, constraint->modulus);
    return tally_tuples(table, x, mode, TuplePlan::multiset(detail::as_classes(*constraint)), false, threads).integers;
}

/// Like count_almost, but the i-th smallest prime must be = m_i (mod N).
inline u64 count_almost_positional(const PrimeIndex& primes, u64 x, const ConstraintTuple& constraint,
                                   TupleCountMode mode, unsigned threads = 1)
{
    constraint.validate();
    auto table = detail::residue_table(primes, x, constraint.k(), constraint.modulus);
    return tally_tuples(table, x, mode, TuplePlan::positional(detail::as_classes(constraint)), false, threads)
        .integers;
}

/// Pi: ordered prime k-tuples with product <= x whose residues form the constraint multiset.
inline u64 ordered_tuple_count(const PrimeIndex& primes, u64 x, const ConstraintTuple& constraint,
                               unsigned threads = 1)
{
    constraint.validate();
    auto table = detail::residue_table(primes, x, constraint.k(), constraint.modulus);
    return tally_tuples(table, x, TupleCountMode::with_multiplicity,
                        TuplePlan::multiset(detail::as_classes(constraint)), true, threads)
        .ordered;
}

inline constexpr u64 character_sum_max_x = 2000;
inline constexpr unsigned character_sum_max_k = 3;

/// Pi evaluated literally as (1/phi(N)^k) * sum over ordered prime tuples of
/// sum over distinct arrangements sigma of prod_i sum_chi conj(chi(m_sigma(i))) chi(p_i).
inline std::complex<double> big_pi_via_characters(const PrimeIndex& primes, const CharacterGroup& group, u64 x,
                                                  const ConstraintTuple& constraint)
{
    constraint.validate();
    const unsigned k = constraint.k();
    if (x > character_sum_max_x || k > character_sum_max_k)
        throw std::out_of_range("big_pi_via_characters: limited to x <= 2000 and k <= 3");
    if (group.modulus() != constraint.modulus)
        throw std::invalid_argument("big_pi_via_characters: character group modulus mismatch");
    primes.require(std::min(x, largest_prime_needed(x, k)));

    std::vector<std::vector<u64>> arrangements;
    auto m = constraint.sorted().residues;
    do
        arrangements.push_back(m);
    while (std::next_permutation(m.begin(), m.end()));

    const double phi_k = std::pow(static_cast<double>(group.group_order()), static_cast<double>(k));
    auto ps = primes.primes();
    std::vector<u64> tuple;
    std::complex<double> total{0.0, 0.0};

    // every ordered tuple, not just sorted ones
    auto rec = [&](auto&& self, u64 product) -> void {
        if (tuple.size() == k) {
            std::complex<double> inner{0.0, 0.0};
            for (const auto& arr : arrangements) {
                std::complex<double> prod{1.0, 0.0};
                for (unsigned i = 0; i < k; ++i)
                    prod *= group.orthogonality_sum(static_cast<i64>(arr[i]), static_cast<i64>(tuple[i]));
                inner += prod;
            }
            total += inner;
            return;
        }
        u64 rest = x / product;
        // remaining slots each need a prime >= 2
        u64 cap = rest >> (k - tuple.size() - 1);
        for (std::uint32_t p : ps) {
            if (p > cap)
                break;
            tuple.push_back(p);
            self(self, product * p);
            tuple.pop_back();
        }
    };
    rec(rec, 1);
    return total / phi_k;
}

/// The auxiliary sums at one level. theta and ell run over ordered tuples with the
/// constraint multiset; f = phi^k theta - x k phi^(k-1) sum'_i L_{k-1}(m^i; x).
struct AuxSums {
    double theta = 0.0;
    double ell = 0.0;
    double f = 0.0;
    u64 big_pi = 0;
    u64 m_count = 1;
    double reduced_ell_sum = 0.0; // sum'_i L_{k-1}(m^i; x), with L_0 = 1
};

namespace detail {

struct LevelSums {
    double theta = 0.0;
    double ell = 0.0;
    u64 big_pi = 0;
};

inline LevelSums level_sums(const ClassedPrimes& table, double x, const ConstraintTuple& c)
{
    LevelSums s;
    if (x < 2.0)
        return s;
    u64 bound = static_cast<u64>(std::floor(x));
    for_each_tuple(table, bound, TupleCountMode::with_multiplicity, TuplePlan::multiset(as_classes(c)),
                   [&](std::span<const std::uint32_t> t) {
                       u64 w = orderings_of_sorted(t);
                       double log_prod = 0.0;
                       double prod = 1.0;
                       for (auto p : t) {
                           log_prod += std::log(static_cast<double>(p));
                           prod *= static_cast<double>(p);
                       }
                       s.theta += static_cast<double>(w) * log_prod;
                       s.ell += static_cast<double>(w) / prod;
                       s.big_pi += w;
                   });
    return s;
}

/// L at level c.k() (L_0 = 1 for the empty tuple).
inline double ell_level(const ClassedPrimes& table, double x, const ConstraintTuple& c)
{
    if (c.residues.empty())
        return 1.0;
    return level_sums(table, x, c).ell;
}

inline AuxSums aux_sums_on(const ClassedPrimes& table, double x, const ConstraintTuple& c)
{
    const unsigned k = c.k();
    const double phi = static_cast<double>(euler_phi(c.modulus));
    auto level = level_sums(table, x, c);
    AuxSums a;
    a.theta = level.theta;
    a.ell = level.ell;
    a.big_pi = level.big_pi;
    a.m_count = distinct_permutation_count(c);
    for (const auto& [value, reduced] : c.reductions())
        a.reduced_ell_sum += ell_level(table, x, reduced);
    a.f = std::pow(phi, k) * a.theta - x * k * std::pow(phi, k - 1.0) * a.reduced_ell_sum;
    return a;
}

} // namespace detail

/// theta, L, f, Pi and M for real x >= 0; sums use the collapsed residue indicator.
inline AuxSums aux_sums(const PrimeIndex& primes, double x, const ConstraintTuple& constraint)
{
    constraint.validate();
    if (!(x >= 0.0))
        throw std::invalid_argument("aux_sums: x must be non-negative");
    // L_{k-1}(m^i; x) in f needs primes up to x itself
    const u64 bound = std::max<u64>(static_cast<u64>(std::floor(x)), 1);
    primes.require(bound);
    auto table = classify_by_residue(primes, constraint.modulus, bound);
    return detail::aux_sums_on(table, x, constraint);
}

enum class Recursion { theta, ell, f };

inline constexpr double recursion_max_x = 10'000;
inline constexpr unsigned recursion_max_k = 3;

struct RecursionCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
};

/// Evaluates both sides of a level recursion independently.
///   theta: k theta_{k+1}(m; x) = (k+1) sum_{p<=x} sum'_i [p = m_i] theta_k(m^i; x/p)
///   ell:   L_k(m; x)           = sum_{p<=x} (1/p) sum'_i [p = m_i] L_{k-1}(m^i; x/p)
///   f:     k f_{k+1}(m; x)     = (k+1) sum_{p<=x} sum'_i phi(N) [p = m_i] f_k(m^i; x/p)
/// The constraint has k+1 entries for theta and f, k entries for ell.
/// residual = |lhs - rhs| / max(1, |lhs|).
inline RecursionCheck verify_recursion(Recursion which, const PrimeIndex& primes, double x,
                                       const ConstraintTuple& constraint)
{
    constraint.validate();
    const unsigned len = constraint.k();
    const unsigned k = which == Recursion::ell ? len : len - 1;
    if (x > recursion_max_x || k > recursion_max_k || k == 0 || x < 0)
        throw std::out_of_range("verify_recursion: limited to x <= 10^4 and 1 <= k <= 3");

    const u64 bound = static_cast<u64>(std::floor(x));
    primes.require(bound);
    const ClassedPrimes table = classify_by_residue(primes, constraint.modulus, std::max<u64>(bound, 1));
    const double phi = static_cast<double>(euler_phi(constraint.modulus));
    const u64 n = constraint.modulus;

    RecursionCheck r;
    const auto reductions = constraint.reductions();
    for (std::uint32_t p : table.primes()) {
        if (p > bound)
            break;
        const double sub = x / p;
        for (const auto& [value, reduced] : reductions) {
            if (p % n != value)
                continue;
            switch (which) {
            case Recursion::theta:
                r.rhs += detail::level_sums(table, sub, reduced).theta;
                break;
            case Recursion::ell:
                r.rhs += detail::ell_level(table, sub, reduced) / p;
                break;
            case Recursion::f:
                r.rhs += phi * detail::aux_sums_on(table, sub, reduced).f;
                break;
            }
        }
    }
    switch (which) {
    case Recursion::theta:
        r.lhs = k * detail::level_sums(table, x, constraint).theta;
        r.rhs *= (k + 1);
        break;
    case Recursion::ell:
        r.lhs = detail::level_sums(table, x, constraint).ell;
        break;
    case Recursion::f:
        r.lhs = k * detail::aux_sums_on(table, x, constraint).f;
        r.rhs *= (k + 1);
        break;
    }
    r.residual = std::abs(r.lhs - r.rhs) / std::max(1.0, std::abs(r.lhs));
    return r;
}

} // namespace qcd
