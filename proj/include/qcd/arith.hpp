#pragma once

// Exact integer primitives: Kronecker symbol, CRT, Euler phi, squarefree kernel.
// Everything here is pure; inputs are limited to 63-bit magnitude.

#include <bit>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qcd {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

inline constexpr u64 max_magnitude = static_cast<u64>(std::numeric_limits<i64>::max());

/// a * b, throwing std::overflow_error if the result exceeds 63 bits.
inline u64 checked_mul(u64 a, u64 b)
{
    u128 p = static_cast<u128>(a) * b;
    if (p > max_magnitude)
        throw std::overflow_error("qcd: product exceeds 63-bit range");
    return static_cast<u64>(p);
}

inline u64 mul_mod(u64 a, u64 b, u64 m)
{
    return static_cast<u64>(static_cast<u128>(a) * b % m);
}

inline u64 pow_mod(u64 base, u64 exp, u64 m)
{
    if (m == 1)
        return 0;
    u64 result = 1;
    base %= m;
    while (exp) {
        if (exp & 1)
            result = mul_mod(result, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return result;
}

/// Non-negative remainder of a signed value.
inline u64 mod_floor(i64 a, u64 m)
{
    if (a >= 0)
        return static_cast<u64>(a) % m;
    u64 r = static_cast<u64>(-(a + 1)) % m; // avoids negating INT64_MIN
    return m - 1 - r;
}

inline u64 magnitude(i64 a)
{
    return a < 0 ? static_cast<u64>(-(a + 1)) + 1 : static_cast<u64>(a);
}

/// Inverse of a modulo m, if gcd(a, m) = 1.
inline std::optional<u64> inverse_mod(u64 a, u64 m)
{
    if (m == 1)
        return 0;
    // extended Euclid on signed 128-bit
    __int128 r0 = static_cast<__int128>(m), r1 = static_cast<__int128>(a % m);
    __int128 t0 = 0, t1 = 1;
    while (r1 != 0) {
        __int128 q = r0 / r1;
        __int128 tmp = r0 - q * r1;
        r0 = r1;
        r1 = tmp;
        tmp = t0 - q * t1;
        t0 = t1;
        t1 = tmp;
    }
    if (r0 != 1)
        return std::nullopt;
    if (t0 < 0)
        t0 += m;
    return static_cast<u64>(t0);
}

/// Full Kronecker symbol (D/n), defined for every integer n.
/// At n = 2 it is 0 for even D, +1 for D = +-1 mod 8, -1 for D = +-3 mod 8;
/// at n = -1 it is the sign of D; (D/0) = 1 iff |D| = 1.
inline int kronecker(i64 d, i64 n)
{
    if (n == 0)
        return (d == 1 || d == -1) ? 1 : 0;

    int result = 1;
    u64 b = magnitude(n);
    if (n < 0 && d < 0)
        result = -1;

    // (D/2^v)
    if ((b & 1) == 0) {
        if ((d & 1) == 0)
            return 0;
        int v = std::countr_zero(b);
        b >>= v;
        u64 d8 = mod_floor(d, 8);
        if ((v & 1) && (d8 == 3 || d8 == 5))
            result = -result;
    }
    if (b == 1)
        return result;

    // b is odd > 1: Jacobi symbol (a/b) with a = D mod b.
    u64 a = mod_floor(d, b);
    while (a != 0) {
        int v = std::countr_zero(a);
        a >>= v;
        if ((v & 1) && ((b & 7) == 3 || (b & 7) == 5))
            result = -result;
        if ((a & 3) == 3 && (b & 3) == 3)
            result = -result;
        std::swap(a, b);
        a %= b;
    }
    return b == 1 ? result : 0;
}

struct Congruence {
    u64 residue = 0;
    u64 modulus = 1;

    friend bool operator==(const Congruence&, const Congruence&) = default;
};

using CongruenceSystem = std::vector<Congruence>;

/// Combines x = r_i mod m_i into one class mod lcm(m_i).
/// Moduli need not be coprime; returns nullopt when the system is inconsistent.
inline std::optional<Congruence> crt_combine(const CongruenceSystem& system)
{
    if (system.empty())
        throw std::invalid_argument("crt_combine: empty congruence system");

    Congruence acc{0, 1};
    for (const auto& c : system) {
        if (c.modulus == 0)
            throw std::invalid_argument("crt_combine: zero modulus");
        if (c.modulus > max_magnitude)
            throw std::overflow_error("crt_combine: modulus exceeds 63-bit range");
        u64 r = c.residue % c.modulus;
        u64 g = std::gcd(acc.modulus, c.modulus);
        u64 diff = (r + (c.modulus - acc.residue % c.modulus)) % c.modulus;
        if (diff % g != 0)
            return std::nullopt;
        u64 m1 = acc.modulus / g;
        u64 m2 = c.modulus / g;
        u64 lcm = checked_mul(acc.modulus, m2);
        // acc.residue + acc.modulus * t = r (mod c.modulus)  =>  m1 * t = diff/g (mod m2)
        u64 t = 0;
        if (m2 > 1) {
            auto inv = inverse_mod(m1 % m2, m2);
            t = mul_mod((diff / g) % m2, *inv, m2);
        }
        u64 x = static_cast<u64>((static_cast<u128>(acc.modulus) * t + acc.residue) % lcm);
        acc = {x, lcm};
    }
    return acc;
}

/// Ascending (prime, exponent) pairs of n by trial division.
inline std::vector<std::pair<u64, unsigned>> trial_factor(u64 n)
{
    std::vector<std::pair<u64, unsigned>> out;
    auto pull = [&](u64 p) {
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e)
            out.emplace_back(p, e);
    };
    pull(2);
    pull(3);
    for (u64 p = 5; p <= n / p; p += 6) {
        pull(p);
        pull(p + 2);
    }
    if (n > 1)
        out.emplace_back(n, 1u);
    return out;
}

inline u64 euler_phi(u64 n)
{
    if (n == 0)
        throw std::invalid_argument("euler_phi: n must be positive");
    u64 phi = n;
    for (auto [p, e] : trial_factor(n))
        phi = phi / p * (p - 1);
    return phi;
}

/// D reduced to its sign and the primes occurring to an odd power.
struct SquarefreeKernel {
    int sign = 1;
    std::vector<u64> odd_exponent_primes;
    bool is_perfect_square = false;

    /// sign * product of the listed primes.
    i64 value() const
    {
        u64 v = 1;
        for (u64 q : odd_exponent_primes)
            v = checked_mul(v, q);
        return sign * static_cast<i64>(v);
    }

    bool contains_two() const
    {
        return !odd_exponent_primes.empty() && odd_exponent_primes.front() == 2;
    }

    friend bool operator==(const SquarefreeKernel&, const SquarefreeKernel&) = default;
};

inline SquarefreeKernel squarefree_kernel(i64 d)
{
    if (d == 0)
        throw std::invalid_argument("squarefree_kernel: D must be nonzero");
    if (d == std::numeric_limits<i64>::min())
        throw std::overflow_error("squarefree_kernel: D exceeds 63-bit magnitude");

    SquarefreeKernel k;
    k.sign = d < 0 ? -1 : 1;
    for (auto [p, e] : trial_factor(magnitude(d)))
        if (e % 2 == 1)
            k.odd_exponent_primes.push_back(p);
    k.is_perfect_square = d > 0 && k.odd_exponent_primes.empty();
    return k;
}

inline bool is_perfect_square(i64 d)
{
    return d == 0 || (d > 0 && squarefree_kernel(d).is_perfect_square);
}

} // namespace qcd
