#pragma once

// Enumeration of sorted prime tuples p1 <= ... <= pk with p1*...*pk <= x under
// per-prime class constraints. Primes are partitioned into classes (a residue
// mod N, a Kronecker sign, ...); a plan either fixes the class of each sorted
// position or fixes the multiset of classes.

#include "qcd/arith.hpp"
#include "qcd/sieve.hpp"

#include <algorithm>
#include <functional>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

namespace qcd {

enum class TupleCountMode {
    squarefree,        // p1 < p2 < ... < pk
    with_multiplicity, // p1 <= p2 <= ... <= pk
};

/// Primes up to a bound, each tagged with a class id in [0, classes) or `excluded`.
class ClassedPrimes {
public:
    static constexpr int excluded = -1;

    template <class Classify>
    ClassedPrimes(const PrimeIndex& index, u64 bound, int classes, Classify&& classify)
        : bound_(bound), by_class_(static_cast<std::size_t>(classes))
    {
        index.require(bound);
        for (std::uint32_t p : index.primes()) {
            if (p > bound)
                break;
            int c = classify(static_cast<u64>(p));
            primes_.push_back(p);
            class_of_.push_back(c);
            if (c != excluded)
                by_class_.at(static_cast<std::size_t>(c)).push_back(p);
        }
    }

    u64 bound() const { return bound_; }
    int classes() const { return static_cast<int>(by_class_.size()); }
    std::span<const std::uint32_t> primes() const { return primes_; }
    int class_of(std::size_t i) const { return class_of_[i]; }

    /// Primes of class c in [lo, hi].
    u64 count_in(int c, u64 lo, u64 hi) const
    {
        if (hi < lo)
            return 0;
        const auto& v = by_class_[static_cast<std::size_t>(c)];
        auto a = std::lower_bound(v.begin(), v.end(), lo);
        auto b = std::upper_bound(a, v.end(), hi);
        return static_cast<u64>(b - a);
    }

    void require(u64 x) const
    {
        if (x > bound_)
            throw std::out_of_range("classed prime table covers only up to " + std::to_string(bound_) +
                                    ", requested " + std::to_string(x));
    }

private:
    u64 bound_;
    std::vector<std::uint32_t> primes_;
    std::vector<int> class_of_;
    std::vector<std::vector<std::uint32_t>> by_class_;
};

/// Class requirement for a k-tuple of sorted primes.
struct TuplePlan {
    enum class Kind { positional, multiset };
    Kind kind = Kind::multiset;
    /// positional: class of the i-th smallest prime; multiset: the classes in any order.
    std::vector<int> classes;

    unsigned k() const { return static_cast<unsigned>(classes.size()); }

    static TuplePlan positional(std::vector<int> c) { return {Kind::positional, std::move(c)}; }
    static TuplePlan multiset(std::vector<int> c) { return {Kind::multiset, std::move(c)}; }
};

/// Largest prime any admissible tuple can contain: x / 2^(k-1).
inline u64 largest_prime_needed(u64 x, unsigned k)
{
    return k - 1 >= 63 ? 0 : x >> (k - 1);
}

inline u64 factorial(unsigned k)
{
    u64 f = 1;
    for (unsigned i = 2; i <= k; ++i)
        f = checked_mul(f, i);
    return f;
}

struct TupleTally {
    u64 integers = 0; // distinct n = p1...pk
    u64 ordered = 0;  // ordered prime tuples, i.e. sum over n of the number of orderings
};

namespace detail {

class TupleWalker {
public:
    TupleWalker(const ClassedPrimes& cp, u64 x, TupleCountMode mode, const TuplePlan& plan)
        : cp_(cp), x_(x), k_(plan.k()), strict_(mode == TupleCountMode::squarefree), plan_(plan)
    {
        if (k_ == 0)
            throw std::invalid_argument("tuple enumeration: k must be at least 1");
        for (int c : plan.classes)
            if (c < 0 || c >= cp.classes())
                throw std::invalid_argument("tuple enumeration: class id out of range");
        cp.require(std::min(x, largest_prime_needed(x, k_)));
        remaining_.assign(static_cast<std::size_t>(cp.classes()), 0);
        if (plan.kind == TuplePlan::Kind::multiset)
            for (int c : plan.classes)
                ++remaining_[static_cast<std::size_t>(c)];
    }

    /// Indices of admissible first primes, ascending.
    std::vector<std::size_t> first_level() const
    {
        std::vector<std::size_t> out;
        u64 hi = integer_root(x_, k_);
        auto ps = cp_.primes();
        for (std::size_t i = 0; i < ps.size() && ps[i] <= hi; ++i)
            if (allowed(0, cp_.class_of(i)))
                out.push_back(i);
        return out;
    }

    /// Counts tuples whose first prime has index `first`; k! up to 20.
    TupleTally tally_from(std::size_t first, bool want_ordered)
    {
        want_ordered_ = want_ordered;
        if (want_ordered)
            k_factorial_ = factorial(k_);
        TupleTally t;
        take(0, first);
        descend(1, cp_.primes()[first], first, 1, 1, t);
        give(0, first);
        return t;
    }

    /// Visits every admissible sorted tuple explicitly (no counting shortcut).
    void visit_all(const std::function<void(std::span<const std::uint32_t>)>& visit)
    {
        tuple_.clear();
        walk(0, 1, 0, visit);
    }

private:
    bool allowed(unsigned depth, int c) const
    {
        if (c == ClassedPrimes::excluded)
            return false;
        if (plan_.kind == TuplePlan::Kind::positional)
            return plan_.classes[depth] == c;
        return remaining_[static_cast<std::size_t>(c)] > 0;
    }

    void take(unsigned, std::size_t idx)
    {
        if (plan_.kind == TuplePlan::Kind::multiset)
            --remaining_[static_cast<std::size_t>(cp_.class_of(idx))];
    }

    void give(unsigned, std::size_t idx)
    {
        if (plan_.kind == TuplePlan::Kind::multiset)
            ++remaining_[static_cast<std::size_t>(cp_.class_of(idx))];
    }

    int last_class(unsigned depth) const
    {
        if (plan_.kind == TuplePlan::Kind::positional)
            return plan_.classes[depth];
        for (std::size_t c = 0; c < remaining_.size(); ++c)
            if (remaining_[c] > 0)
                return static_cast<int>(c);
        throw std::logic_error("tuple enumeration: empty remaining multiset");
    }

    // depth = number of primes already chosen; prev = last chosen prime at index prev_idx;
    // run = multiplicity of prev so far; denom = product of factorials of closed runs and run!
    void descend(unsigned depth, u64 product, std::size_t prev_idx, unsigned run, u64 denom, TupleTally& t)
    {
        const u64 prev = cp_.primes()[prev_idx];
        if (depth == k_) {
            t.integers += 1;
            if (want_ordered_)
                t.ordered += k_factorial_ / denom;
            return;
        }
        const u64 rest = x_ / product;
        if (depth + 1 == k_) {
            const int c = last_class(depth);
            const u64 lo = strict_ ? prev + 1 : prev;
            u64 total = cp_.count_in(c, lo, rest);
            u64 equal = (!strict_ && prev <= rest && cp_.class_of(prev_idx) == c) ? 1 : 0;
            t.integers += total;
            if (want_ordered_) {
                t.ordered += (total - equal) * (k_factorial_ / denom);
                t.ordered += equal * (k_factorial_ / (denom * (run + 1)));
            }
            return;
        }
        const u64 hi = integer_root(rest, k_ - depth);
        auto ps = cp_.primes();
        for (std::size_t i = strict_ ? prev_idx + 1 : prev_idx; i < ps.size() && ps[i] <= hi; ++i) {
            int c = cp_.class_of(i);
            if (!allowed(depth, c))
                continue;
            take(depth, i);
            if (i == prev_idx)
                descend(depth + 1, product * ps[i], i, run + 1, denom * (run + 1), t);
            else
                descend(depth + 1, product * ps[i], i, 1, denom, t);
            give(depth, i);
        }
    }

    void walk(unsigned depth, u64 product, std::size_t start,
              const std::function<void(std::span<const std::uint32_t>)>& visit)
    {
        if (depth == k_) {
            visit(tuple_);
            return;
        }
        const u64 hi = integer_root(x_ / product, k_ - depth);
        auto ps = cp_.primes();
        for (std::size_t i = start; i < ps.size() && ps[i] <= hi; ++i) {
            if (!allowed(depth, cp_.class_of(i)))
                continue;
            take(depth, i);
            tuple_.push_back(ps[i]);
            walk(depth + 1, product * ps[i], strict_ ? i + 1 : i, visit);
            tuple_.pop_back();
            give(depth, i);
        }
    }

    const ClassedPrimes& cp_;
    u64 x_;
    unsigned k_;
    bool strict_;
    const TuplePlan& plan_;
    std::vector<int> remaining_;
    std::vector<std::uint32_t> tuple_;
    bool want_ordered_ = false;
    u64 k_factorial_ = 1;
};

} // namespace detail

/// Counts admissible sorted tuples. The first-prime loop is split across
/// `threads` workers by striding; integer sums make the result order-independent.
inline TupleTally tally_tuples(const ClassedPrimes& cp, u64 x, TupleCountMode mode, const TuplePlan& plan,
                               bool want_ordered = false, unsigned threads = 1)
{
    detail::TupleWalker probe(cp, x, mode, plan);
    if (x < 2)
        return {};
    const auto firsts = probe.first_level();
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(firsts.size())));

    auto work = [&](unsigned worker, TupleTally& out) {
        detail::TupleWalker w(cp, x, mode, plan);
        for (std::size_t j = worker; j < firsts.size(); j += threads) {
            auto t = w.tally_from(firsts[j], want_ordered);
            out.integers += t.integers;
            out.ordered += t.ordered;
        }
    };

    std::vector<TupleTally> parts(threads);
    if (threads == 1) {
        work(0, parts[0]);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(work, t, std::ref(parts[t]));
    }
    TupleTally total;
    for (const auto& p : parts) {
        total.integers += p.integers;
        total.ordered += p.ordered;
    }
    return total;
}

/// Calls visit(tuple) for each admissible sorted tuple, in lexicographic order.
inline void for_each_tuple(const ClassedPrimes& cp, u64 x, TupleCountMode mode, const TuplePlan& plan,
                           const std::function<void(std::span<const std::uint32_t>)>& visit)
{
    detail::TupleWalker w(cp, x, mode, plan);
    if (x < 2)
        return;
    w.visit_all(visit);
}

/// Number of distinct orderings of a sorted tuple: k! / prod(run lengths)!.
inline u64 orderings_of_sorted(std::span<const std::uint32_t> tuple)
{
    u64 w = factorial(static_cast<unsigned>(tuple.size()));
    std::size_t i = 0;
    while (i < tuple.size()) {
        std::size_t j = i;
        while (j < tuple.size() && tuple[j] == tuple[i])
            ++j;
        w /= factorial(static_cast<unsigned>(j - i));
        i = j;
    }
    return w;
}

} // namespace qcd
