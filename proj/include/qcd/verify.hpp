#pragma once

// Invariant suites: each compares two independent routes to the same quantity
// and reports the worst deviation.

#include "qcd/almostprime.hpp"
#include "qcd/chars.hpp"
#include "qcd/density.hpp"
#include "qcd/quadsolve.hpp"
#include "qcd/residues.hpp"
#include "qcd/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace qcd {

struct SuiteResult {
    std::string name;
    bool passed = true;
    u64 checks = 0;
    double worst = 0.0; // largest residual seen, where meaningful
    std::string detail; // first failure, if any

    explicit SuiteResult(std::string suite) : name(std::move(suite)) {}

    void fail(const std::string& what)
    {
        if (passed)
            detail = what;
        passed = false;
    }
};

/// |sum_chi conj(chi(m)) chi(n) - phi(N)[m = n]| < tol for all N <= max_modulus and unit pairs.
inline SuiteResult verify_orthogonality(u64 max_modulus = 60, double tol = 1e-9)
{
    SuiteResult r{"orthogonality"};
    for (u64 n = 1; n <= max_modulus; ++n) {
        CharacterGroup g(n);
        const double phi = static_cast<double>(euler_phi(n));
        for (u64 a = 0; a < n; ++a) {
            if (std::gcd(a, n) != 1)
                continue;
            for (u64 b = 0; b < n; ++b) {
                if (std::gcd(b, n) != 1)
                    continue;
                auto s = g.orthogonality_sum(static_cast<i64>(a), static_cast<i64>(b));
                double expect = a == b ? phi : 0.0;
                double err = std::abs(s - std::complex<double>(expect, 0.0));
                r.worst = std::max(r.worst, err);
                ++r.checks;
                if (!(err < tol)) {
                    std::ostringstream os;
                    os << "N=" << n << " m=" << a << " n=" << b << " error " << err;
                    r.fail(os.str());
                }
            }
        }
    }
    return r;
}

/// Character-sum Pi against the combinatorial ordered count, every multiset constraint.
inline SuiteResult verify_collapse(const PrimeIndex& primes, const std::vector<u64>& moduli,
                                   const std::vector<unsigned>& ks, const std::vector<u64>& xs, double tol = 1e-6)
{
    SuiteResult r{"collapse"};
    for (u64 n : moduli) {
        CharacterGroup g(n);
        for (unsigned k : ks)
            for (const auto& c : all_constraint_multisets(n, k))
                for (u64 x : xs) {
                    auto lit = big_pi_via_characters(primes, g, x, c);
                    u64 comb = ordered_tuple_count(primes, x, c);
                    double err = std::max(std::abs(lit.real() - static_cast<double>(comb)), std::abs(lit.imag()));
                    r.worst = std::max(r.worst, err);
                    ++r.checks;
                    if (!(err < tol)) {
                        std::ostringstream os;
                        os << c.describe() << " x=" << x << ": characters " << lit << " vs ordered " << comb;
                        r.fail(os.str());
                    }
                }
    }
    return r;
}

/// theta, L and f recursions: relative residual < tol for every constraint tuple.
inline SuiteResult verify_recursions(const PrimeIndex& primes, const std::vector<u64>& moduli,
                                     const std::vector<unsigned>& ks, const std::vector<double>& xs,
                                     double tol = 1e-9)
{
    SuiteResult r{"recursions"};
    for (u64 n : moduli)
        for (unsigned k : ks)
            for (Recursion which : {Recursion::theta, Recursion::ell, Recursion::f}) {
                const unsigned len = which == Recursion::ell ? k : k + 1;
                for (const auto& c : all_constraint_multisets(n, len))
                    for (double x : xs) {
                        auto chk = verify_recursion(which, primes, x, c);
                        r.worst = std::max(r.worst, chk.residual);
                        ++r.checks;
                        if (!(chk.residual < tol)) {
                            std::ostringstream os;
                            os << (which == Recursion::theta ? "theta" : which == Recursion::ell ? "L" : "f") << ' '
                               << c.describe() << " x=" << x << ": lhs " << chk.lhs << " rhs " << chk.rhs;
                            r.fail(os.str());
                        }
                    }
            }
    return r;
}

/// k! pi <= Pi/M <= k! tau with pi, tau taken per distinct arrangement of the
/// constraint (the multiset counts divided by M), i.e. k! pi_ms <= Pi <= k! tau_ms;
/// all three coincide when the constraint residues are distinct.
inline SuiteResult verify_sandwich(const PrimeIndex& primes, const std::vector<u64>& moduli,
                                   const std::vector<unsigned>& ks, const std::vector<u64>& xs)
{
    SuiteResult r{"sandwich"};
    for (u64 n : moduli)
        for (unsigned k : ks)
            for (const auto& c : all_constraint_multisets(n, k))
                for (u64 x : xs) {
                    const u64 kf = factorial(k);
                    const u64 pi = count_almost(primes, x, k, c, TupleCountMode::squarefree);
                    const u64 tau = count_almost(primes, x, k, c, TupleCountMode::with_multiplicity);
                    const u64 big_pi = ordered_tuple_count(primes, x, c);
                    const auto s = c.sorted().residues;
                    const bool distinct = std::adjacent_find(s.begin(), s.end()) == s.end();
                    ++r.checks;
                    bool ok = kf * pi <= big_pi && big_pi <= kf * tau;
                    if (distinct)
                        ok = ok && kf * pi == big_pi && big_pi == kf * tau;
                    if (!ok) {
                        std::ostringstream os;
                        os << c.describe() << " x=" << x << ": k!pi=" << kf * pi << " Pi=" << big_pi
                           << " k!tau=" << kf * tau << " M=" << distinct_permutation_count(c);
                        r.fail(os.str());
                    }
                }
    return r;
}

/// Root-count formula against brute force on odd squarefree n <= max_n coprime to D.
inline SuiteResult verify_quadratic(const std::vector<i64>& discriminants, u64 max_n = 5000)
{
    SuiteResult r{"quadratic"};
    SpfTable table(std::max<u64>(max_n, 2));
    for (i64 d : discriminants) {
        // x^2 + bx + c with b in {0, 1} matching the parity of D
        const i64 b = (mod_floor(d, 4) == 1) ? 1 : 0;
        if (mod_floor(d, 4) != 0 && mod_floor(d, 4) != 1)
            throw std::invalid_argument("verify_quadratic: D must be 0 or 1 mod 4 to be a discriminant");
        const i64 c = (b * b - d) / 4;
        QuadraticForm form(b, c);
        for (u64 n = 1; n <= max_n; n += 2) {
            auto f = factorize(table, n);
            if (!f.squarefree() || std::gcd(n, magnitude(d)) != 1)
                continue;
            u64 formula = count_roots_formula(form, f);
            u64 brute = count_roots_bruteforce(form, n);
            ++r.checks;
            if (formula != brute) {
                std::ostringstream os;
                os << "D=" << d << " n=" << n << ": formula " << formula << " brute force " << brute;
                r.fail(os.str());
            }
        }
    }
    return r;
}

/// Direct and constructive B(eps) agree, have phi(Q)/2 classes, and classify every prime p <= max_p.
inline SuiteResult verify_residues(const std::vector<i64>& discriminants, const PrimeIndex& primes, u64 max_p = 100000)
{
    SuiteResult r{"residues"};
    primes.require(max_p);
    for (i64 d : discriminants) {
        const u64 q = modulus_Q(d);
        const u64 half = euler_phi(q) / 2;
        std::vector<ResidueClassSet> sets;
        for (int eps : {1, -1}) {
            auto direct = residue_classes_direct(d, eps);
            auto built = residue_classes_constructive(d, eps);
            ++r.checks;
            if (direct.classes != built.classes)
                r.fail("D=" + std::to_string(d) + " eps=" + std::to_string(eps) + ": methods disagree");
            if (direct.classes.size() != half)
                r.fail("D=" + std::to_string(d) + " eps=" + std::to_string(eps) + ": " +
                       std::to_string(direct.classes.size()) + " classes, expected " + std::to_string(half));
            sets.push_back(std::move(direct));
        }
        for (std::uint32_t p : primes.primes()) {
            if (p > max_p)
                break;
            if (p == 2 || magnitude(d) % p == 0)
                continue;
            const int sym = kronecker(d, p);
            const u64 a = p % q;
            const bool in_plus = std::binary_search(sets[0].classes.begin(), sets[0].classes.end(), a);
            const bool in_minus = std::binary_search(sets[1].classes.begin(), sets[1].classes.end(), a);
            ++r.checks;
            if (in_plus != (sym == 1) || in_minus != (sym == -1)) {
                r.fail("D=" + std::to_string(d) + " p=" + std::to_string(p) + ": symbol " + std::to_string(sym) +
                       " but class membership disagrees");
            }
        }
    }
    return r;
}

/// Odd sign-constrained counts equal the sum of sorted-position residue counts over B(eps_1) x ... x B(eps_k).
inline SuiteResult verify_reduction(const PrimeIndex& primes, const std::vector<i64>& discriminants, unsigned k,
                                    u64 x)
{
    SuiteResult r{"reduction"};
    for (i64 d : discriminants) {
        DensityTableOptions opt;
        opt.residue_rows = true;
        auto t = density_table(primes, {x}, k, d, opt);
        r.checks += u64{1} << k;
        for (const auto& f : t.failures)
            r.fail("D=" + std::to_string(d) + " " + f);
    }
    return r;
}

/// Squarefree n <= x with k factors counted by eps = (+1,...,+1) are exactly those
/// where x^2 + bx + c has 2^k roots mod n by brute force.
inline SuiteResult verify_roots(const PrimeIndex& primes, i64 b, i64 c, unsigned k, u64 x)
{
    SuiteResult r{"roots"};
    QuadraticForm form(b, c);
    SignConstraint all_plus(form.discriminant, std::vector<int>(k, 1));
    auto by_sign = list_sign_constrained(primes, x, all_plus, TupleCountMode::squarefree);

    std::vector<u64> by_roots;
    auto table = ClassedPrimes(primes, std::max<u64>(std::min(x, largest_prime_needed(x, k)), 1), 1,
                               [](u64) { return 0; });
    for_each_tuple(table, x, TupleCountMode::squarefree, TuplePlan::multiset(std::vector<int>(k, 0)),
                   [&](std::span<const std::uint32_t> t) {
                       u64 n = 1;
                       for (auto p : t)
                           n *= p;
                       if (count_roots_bruteforce(form, n) == (u64{1} << k))
                           by_roots.push_back(n);
                   });
    std::sort(by_roots.begin(), by_roots.end());
    r.checks = by_roots.size() + by_sign.size();
    if (by_sign != by_roots)
        r.fail("D=" + std::to_string(form.discriminant) + ": sign set has " + std::to_string(by_sign.size()) +
               " members, brute-force 2^k-root set has " + std::to_string(by_roots.size()));
    return r;
}

} // namespace qcd
