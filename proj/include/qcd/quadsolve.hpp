#pragma once

// Root counts of x^2 + bx + c modulo n.

#include "qcd/arith.hpp"
#include "qcd/sieve.hpp"

#include <stdexcept>
#include <string>

namespace qcd {

struct QuadraticForm {
    i64 b = 0;
    i64 c = 0;
    i64 discriminant = 0;

    QuadraticForm(i64 b_, i64 c_)
        : b(b_), c(c_)
    {
        __int128 d = static_cast<__int128>(b_) * b_ - static_cast<__int128>(4) * c_;
        if (d > std::numeric_limits<i64>::max() || d < -std::numeric_limits<i64>::max())
            throw std::overflow_error("QuadraticForm: discriminant exceeds 63-bit range");
        discriminant = static_cast<i64>(d);
    }
};

inline constexpr u64 bruteforce_max_modulus = 1'000'000;

/// Number of x in [0, n) with x^2 + bx + c = 0 (mod n), by direct scan.
inline u64 count_roots_bruteforce(const QuadraticForm& form, u64 n)
{
    if (n == 0 || n > bruteforce_max_modulus)
        throw std::out_of_range("count_roots_bruteforce: need 1 <= n <= 10^6");
    const u64 b = mod_floor(form.b, n);
    const u64 c = mod_floor(form.c, n);
    u64 count = 0;
    for (u64 x = 0; x < n; ++x) {
        // n <= 10^6 so x*(x+b) + c fits easily
        if ((x * ((x + b) % n) + c) % n == 0)
            ++count;
    }
    return count;
}

namespace detail {

inline void require_formula_regime(const QuadraticForm& form, const FactoredInteger& n)
{
    for (auto [p, e] : n.factors) {
        if (e != 1)
            throw std::domain_error("root count formula: n = " + std::to_string(n.n) + " is not squarefree");
        if (p == 2)
            throw std::domain_error("root count formula: n = " + std::to_string(n.n) + " is even");
        if (mod_floor(form.discriminant, p) == 0)
            throw std::domain_error("root count formula: gcd(n, D) > 1 at p = " + std::to_string(p));
    }
}

} // namespace detail

/// prod over p | n of (1 + (D/p)); n must be odd, squarefree and coprime to D.
inline u64 count_roots_formula(const QuadraticForm& form, const FactoredInteger& n)
{
    detail::require_formula_regime(form, n);
    u64 count = 1;
    for (auto [p, e] : n.factors)
        count *= static_cast<u64>(1 + kronecker(form.discriminant, static_cast<i64>(p)));
    return count;
}

/// True iff (D/p) = +1 for every p | n, i.e. exactly 2^omega(n) roots.
inline bool has_exactly_2k_roots(const QuadraticForm& form, const FactoredInteger& n)
{
    detail::require_formula_regime(form, n);
    for (auto [p, e] : n.factors)
        if (kronecker(form.discriminant, static_cast<i64>(p)) != 1)
            return false;
    return true;
}

} // namespace qcd
