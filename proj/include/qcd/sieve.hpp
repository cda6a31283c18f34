#pragma once

// Prime generation: smallest-prime-factor table, segmented prime lists,
// prime counting (optionally in a residue class) and factorization.

#include "qcd/arith.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qcd {

/// Raised when a requested table would exceed the configured memory budget.
class budget_exceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr u64 default_spf_budget = 100'000'000;

/// Floor of the r-th root of n, r >= 1.
inline u64 integer_root(u64 n, unsigned r)
{
    if (r == 1 || n < 2)
        return n;
    u64 x = static_cast<u64>(std::pow(static_cast<long double>(n), 1.0L / r));
    auto pow_le = [&](u64 base) {
        u128 acc = 1;
        for (unsigned i = 0; i < r; ++i) {
            acc *= base;
            if (acc > n)
                return false;
        }
        return true;
    };
    while (x > 0 && !pow_le(x))
        --x;
    while (pow_le(x + 1))
        ++x;
    return x;
}

/// All primes <= limit, ascending, by an odd-only segmented sieve of Eratosthenes.
inline std::vector<std::uint32_t> sieve_primes(u64 limit)
{
    if (limit > std::numeric_limits<std::uint32_t>::max())
        throw budget_exceeded("sieve_primes: limit exceeds 32-bit prime storage");
    std::vector<std::uint32_t> primes;
    if (limit < 2)
        return primes;
    primes.push_back(2);
    if (limit < 3)
        return primes;

    const u64 root = integer_root(limit, 2);
    // base primes up to root by a plain sieve
    std::vector<std::uint8_t> small(root + 1, 1);
    std::vector<u64> base;
    for (u64 i = 3; i <= root; i += 2) {
        if (!small[i])
            continue;
        base.push_back(i);
        for (u64 j = i * i; j <= root; j += 2 * i)
            small[j] = 0;
    }

    constexpr u64 segment_span = 1u << 19; // odd numbers per segment
    std::vector<std::uint8_t> seg(segment_span);
    std::vector<u64> next(base.size());
    for (std::size_t i = 0; i < base.size(); ++i)
        next[i] = base[i] * base[i];

    // segment covers odd numbers lo, lo+2, ..., lo + 2*(segment_span-1)
    for (u64 lo = 3; lo <= limit; lo += 2 * segment_span) {
        u64 hi = std::min(limit, lo + 2 * (segment_span - 1));
        std::size_t count = static_cast<std::size_t>((hi - lo) / 2 + 1);
        std::fill(seg.begin(), seg.begin() + count, 1);
        for (std::size_t i = 0; i < base.size(); ++i) {
            u64 p = base[i];
            if (p * p > hi)
                break;
            u64 j = next[i];
            for (; j <= hi; j += 2 * p)
                seg[(j - lo) / 2] = 0;
            next[i] = j;
        }
        for (std::size_t i = 0; i < count; ++i)
            if (seg[i])
                primes.push_back(static_cast<std::uint32_t>(lo + 2 * i));
    }
    return primes;
}

/// Ascending prime list with the bound it is complete up to.
class PrimeIndex {
public:
    PrimeIndex() = default;
    PrimeIndex(std::vector<std::uint32_t> primes, u64 limit)
        : primes_(std::move(primes)), limit_(limit)
    {
    }

    static PrimeIndex up_to(u64 limit) { return PrimeIndex(sieve_primes(limit), limit); }

    u64 limit() const { return limit_; }
    std::span<const std::uint32_t> primes() const { return primes_; }
    std::size_t size() const { return primes_.size(); }
    std::uint32_t operator[](std::size_t i) const { return primes_[i]; }

    /// Number of primes <= x.
    u64 count_le(u64 x) const
    {
        require(x);
        return static_cast<u64>(std::upper_bound(primes_.begin(), primes_.end(), x) - primes_.begin());
    }

    void require(u64 x) const
    {
        if (x > limit_)
            throw std::out_of_range("prime index covers only up to " + std::to_string(limit_) +
                                    ", requested " + std::to_string(x));
    }

private:
    std::vector<std::uint32_t> primes_;
    u64 limit_ = 1;
};

struct FactoredInteger {
    u64 n = 1;
    std::vector<std::pair<u64, unsigned>> factors;

    std::size_t omega() const { return factors.size(); }

    unsigned big_omega() const
    {
        unsigned s = 0;
        for (auto [p, e] : factors)
            s += e;
        return s;
    }

    bool squarefree() const
    {
        return std::all_of(factors.begin(), factors.end(), [](const auto& f) { return f.second == 1; });
    }

    friend bool operator==(const FactoredInteger&, const FactoredInteger&) = default;
};

inline FactoredInteger factor_by_trial(u64 n)
{
    if (n == 0)
        throw std::invalid_argument("factorize: n must be positive");
    return {n, trial_factor(n)};
}

/// spf[n] is the smallest prime factor of n for 2 <= n <= limit. Immutable once built.
class SpfTable {
public:
    static constexpr std::array<char, 4> magic = {'S', 'P', 'F', '1'};

    explicit SpfTable(u64 limit, u64 budget = default_spf_budget)
        : limit_(limit)
    {
        if (limit < 2)
            throw std::invalid_argument("SpfTable: limit must be at least 2");
        if (limit > budget)
            throw budget_exceeded("SpfTable: limit " + std::to_string(limit) + " exceeds budget " +
                                  std::to_string(budget));
        if (limit >= std::numeric_limits<std::uint32_t>::max())
            throw budget_exceeded("SpfTable: limit exceeds 32-bit entries");

        spf_.assign(limit + 1, 0);
        // linear sieve
        for (u64 i = 2; i <= limit; ++i) {
            if (spf_[i] == 0) {
                spf_[i] = static_cast<std::uint32_t>(i);
                primes_.push_back(static_cast<std::uint32_t>(i));
            }
            for (std::uint32_t p : primes_) {
                u64 j = static_cast<u64>(p) * i;
                if (p > spf_[i] || j > limit)
                    break;
                spf_[j] = p;
            }
        }
    }

    u64 limit() const { return limit_; }

    std::uint32_t spf(u64 n) const
    {
        check(n);
        if (n < 2)
            throw std::out_of_range("SpfTable: spf undefined below 2");
        return spf_[n];
    }

    bool is_prime(u64 n) const
    {
        check(n);
        return n >= 2 && spf_[n] == n;
    }

    std::span<const std::uint32_t> primes() const { return primes_; }
    std::span<const std::uint32_t> entries() const { return spf_; }

    PrimeIndex prime_index() const { return PrimeIndex(primes_, limit_); }

    /// Writes the table as: "SPF1", limit (u64 LE), then u32 LE entries for n = 0..limit.
    void save(const std::string& path) const
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw std::runtime_error("SpfTable: cannot open " + path + " for writing");
        out.write(magic.data(), magic.size());
        write_le(out, limit_, 8);
        for (std::uint32_t v : spf_)
            write_le(out, v, 4);
        if (!out)
            throw std::runtime_error("SpfTable: write failed for " + path);
    }

    /// Loads a cache written by save(); validates magic, limit and entry count.
    static SpfTable load(const std::string& path, u64 budget = default_spf_budget)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw std::runtime_error("SpfTable: cannot open " + path);
        std::array<char, 4> head{};
        in.read(head.data(), head.size());
        if (!in || head != magic)
            throw std::runtime_error("SpfTable: bad magic in " + path);
        u64 limit = read_le(in, 8);
        if (!in || limit < 2 || limit >= std::numeric_limits<std::uint32_t>::max())
            throw std::runtime_error("SpfTable: invalid limit in " + path);
        if (limit > budget)
            throw budget_exceeded("SpfTable: cached limit " + std::to_string(limit) + " exceeds budget " +
                                  std::to_string(budget));

        SpfTable t;
        t.limit_ = limit;
        t.spf_.resize(limit + 1);
        std::vector<unsigned char> buf((limit + 1) * 4);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (!in)
            throw std::runtime_error("SpfTable: truncated file " + path);
        for (u64 i = 0; i <= limit; ++i) {
            const unsigned char* b = &buf[i * 4];
            t.spf_[i] = b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
        }
        if (in.peek() != std::char_traits<char>::eof())
            throw std::runtime_error("SpfTable: trailing data in " + path);
        for (u64 i = 2; i <= limit; ++i) {
            std::uint32_t s = t.spf_[i];
            if (s < 2 || s > i || i % s != 0)
                throw std::runtime_error("SpfTable: corrupt entry in " + path);
            if (s == i)
                t.primes_.push_back(s);
        }
        return t;
    }

private:
    SpfTable() = default;

    void check(u64 n) const
    {
        if (n > limit_)
            throw std::out_of_range("SpfTable: " + std::to_string(n) + " exceeds table limit " +
                                    std::to_string(limit_));
    }

    static void write_le(std::ofstream& out, u64 v, int bytes)
    {
        char b[8];
        for (int i = 0; i < bytes; ++i)
            b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        out.write(b, bytes);
    }

    static u64 read_le(std::ifstream& in, int bytes)
    {
        unsigned char b[8] = {};
        in.read(reinterpret_cast<char*>(b), bytes);
        u64 v = 0;
        for (int i = bytes - 1; i >= 0; --i)
            v = (v << 8) | b[i];
        return v;
    }

    u64 limit_ = 0;
    std::vector<std::uint32_t> spf_;
    std::vector<std::uint32_t> primes_;
};

inline SpfTable build_spf_table(u64 limit, u64 budget = default_spf_budget)
{
    return SpfTable(limit, budget);
}

inline u64 prime_count(const SpfTable& table, u64 x)
{
    if (x > table.limit())
        throw std::out_of_range("prime_count: x exceeds table limit");
    auto ps = table.primes();
    return static_cast<u64>(std::upper_bound(ps.begin(), ps.end(), x) - ps.begin());
}

/// Primes p <= x with p = a (mod modulus); no coprimality requirement on a.
inline u64 prime_count_in_class(const SpfTable& table, u64 x, u64 a, u64 modulus)
{
    if (x > table.limit())
        throw std::out_of_range("prime_count_in_class: x exceeds table limit");
    if (modulus == 0 || a >= modulus)
        throw std::invalid_argument("prime_count_in_class: need 0 <= a < N");
    u64 count = 0;
    for (std::uint32_t p : table.primes()) {
        if (p > x)
            break;
        if (p % modulus == a)
            ++count;
    }
    return count;
}

inline FactoredInteger factorize(const SpfTable& table, u64 n)
{
    if (n == 0)
        throw std::invalid_argument("factorize: n must be positive");
    if (n > table.limit())
        throw std::out_of_range("factorize: n exceeds table limit");
    FactoredInteger f{n, {}};
    while (n > 1) {
        u64 p = table.spf(n);
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        f.factors.emplace_back(p, e);
    }
    return f;
}

} // namespace qcd
