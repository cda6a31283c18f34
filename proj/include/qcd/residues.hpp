#pragma once

// The residue classes B(+1), B(-1) mod Q = 4 q1...qm (8 q2...qm when 2 | kernel)
// that decide (D/p) for odd primes p not dividing D. Two routes: evaluating the
// Kronecker symbol on each class, and assembling classes from sign vectors,
// per-prime (non)residue sets and the Chinese remainder theorem.

#include "qcd/arith.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcd {

struct ResidueClassSet {
    i64 d = 0;
    u64 q = 1;
    int epsilon = 1;
    std::vector<u64> classes; // ascending, in [0, Q)

    friend bool operator==(const ResidueClassSet&, const ResidueClassSet&) = default;
};

using SignVector = std::vector<int>;

namespace detail {

inline SquarefreeKernel nonsquare_kernel(i64 d)
{
    if (d == 0)
        throw std::invalid_argument("D must be nonzero");
    auto kernel = squarefree_kernel(d);
    if (kernel.is_perfect_square)
        throw std::domain_error("D = " + std::to_string(d) + " is a perfect square");
    return kernel;
}

inline void check_epsilon(int epsilon)
{
    if (epsilon != 1 && epsilon != -1)
        throw std::invalid_argument("epsilon must be +1 or -1");
}

} // namespace detail

/// Q = 4 * product of the odd-exponent primes of D, or 8 * the odd ones when 2 is among them.
inline u64 modulus_Q(i64 d)
{
    auto kernel = detail::nonsquare_kernel(d);
    u64 q = 4;
    for (u64 p : kernel.odd_exponent_primes)
        q = checked_mul(q, p); // 2 in the kernel turns 4 into 8
    return q;
}

/// All vectors in {+1,-1}^m whose entries multiply to target, in lexicographic
/// order with -1 before +1. For m = 0 only the empty vector, and only if target = +1.
inline std::vector<SignVector> sign_vectors(std::size_t m, int target)
{
    detail::check_epsilon(target);
    std::vector<SignVector> out;
    if (m >= 63)
        throw std::out_of_range("sign_vectors: length too large");
    const u64 total = u64{1} << m;
    for (u64 bits = 0; bits < total; ++bits) {
        SignVector v(m);
        int prod = 1;
        for (std::size_t i = 0; i < m; ++i) {
            // bit set (from the most significant position) means +1
            v[i] = (bits >> (m - 1 - i)) & 1 ? 1 : -1;
            prod *= v[i];
        }
        if (prod == target)
            out.push_back(std::move(v));
    }
    return out;
}

/// { a mod Q : gcd(a, Q) = 1, (kernel(D)/a) = epsilon }.
inline ResidueClassSet residue_classes_direct(i64 d, int epsilon)
{
    detail::check_epsilon(epsilon);
    auto kernel = detail::nonsquare_kernel(d);
    const u64 q = modulus_Q(d);
    const i64 kd = kernel.value();
    ResidueClassSet out{d, q, epsilon, {}};
    for (u64 a = 1; a < q; a += 2)
        if (std::gcd(a, q) == 1 && kronecker(kd, static_cast<i64>(a)) == epsilon)
            out.classes.push_back(a);
    return out;
}

/// Same set, assembled from quadratic reciprocity:
/// for odd p, (D/p) = (sign/p) (2/p)^[2 in kernel] prod_i (q_i/p), and
/// (q_i/p) = (p/q_i) * (-1)^{(p-1)/2 (q_i-1)/2}. Each branch of p mod 4 (mod 8
/// when 2 is in the kernel) fixes the sign that prod_i (p/q_i) must take; sign
/// vectors with that product pick per-prime classes from S_i^+ or S_i^-, and
/// CRT joins each choice with the branch class into one residue mod Q.
inline ResidueClassSet residue_classes_constructive(i64 d, int epsilon)
{
    detail::check_epsilon(epsilon);
    auto kernel = detail::nonsquare_kernel(d);
    const u64 q_mod = modulus_Q(d);
    const bool has_two = kernel.contains_two();

    std::vector<u64> odd_primes;
    for (u64 p : kernel.odd_exponent_primes)
        if (p != 2)
            odd_primes.push_back(p);

    // S_i^+ (squares) and S_i^- (non-squares) among the units mod q_i
    std::vector<std::vector<u64>> squares, nonsquares;
    for (u64 qi : odd_primes) {
        std::vector<char> is_square(qi, 0);
        for (u64 t = 1; t < qi; ++t)
            is_square[mul_mod(t, t, qi)] = 1;
        std::vector<u64> s, n;
        for (u64 a = 1; a < qi; ++a)
            (is_square[a] ? s : n).push_back(a);
        squares.push_back(std::move(s));
        nonsquares.push_back(std::move(n));
    }

    const u64 branch_modulus = has_two ? 8 : 4;
    const std::vector<u64> branches = has_two ? std::vector<u64>{1, 3, 5, 7} : std::vector<u64>{1, 3};

    std::set<u64> classes;
    for (u64 r : branches) {
        // constant factor c(r) with (D/p) = c(r) * prod_i (p/q_i) for p = r mod branch_modulus
        int c = 1;
        const bool three_mod_four = r % 4 == 3;
        if (kernel.sign < 0 && three_mod_four)
            c = -c; // (-1/p)
        if (has_two && (r == 3 || r == 5))
            c = -c; // (2/p)
        if (three_mod_four)
            for (u64 qi : odd_primes)
                if (qi % 4 == 3)
                    c = -c; // reciprocity sign
        const int target = epsilon * c;

        for (const auto& signs : sign_vectors(odd_primes.size(), target)) {
            // odometer over the per-prime class choices
            std::vector<std::size_t> pick(odd_primes.size(), 0);
            bool done = false;
            while (!done) {
                CongruenceSystem system{{r, branch_modulus}};
                for (std::size_t i = 0; i < odd_primes.size(); ++i) {
                    const auto& pool = signs[i] > 0 ? squares[i] : nonsquares[i];
                    system.push_back({pool[pick[i]], odd_primes[i]});
                }
                auto sol = crt_combine(system);
                if (!sol || sol->modulus != q_mod)
                    throw std::logic_error("residue_classes_constructive: CRT produced wrong modulus");
                classes.insert(sol->residue);

                done = true;
                for (std::size_t i = odd_primes.size(); i-- > 0;) {
                    const auto& pool = signs[i] > 0 ? squares[i] : nonsquares[i];
                    if (++pick[i] < pool.size()) {
                        done = false;
                        break;
                    }
                    pick[i] = 0;
                }
            }
        }
    }
    return {d, q_mod, epsilon, std::vector<u64>(classes.begin(), classes.end())};
}

} // namespace qcd
