#pragma once

// Dirichlet characters mod N, evaluated exactly on exponent vectors and
// mapped to complex values only at the boundary.

#include "qcd/arith.hpp"

#include <complex>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcd {

inline constexpr u64 max_character_modulus = 10'000;

/// Primitive root modulo an odd prime power p^e.
inline u64 primitive_root_prime_power(u64 p, unsigned e)
{
    const u64 phi_p = p - 1;
    const auto factors = trial_factor(phi_p);
    u64 g = 2;
    for (;; ++g) {
        bool ok = true;
        for (auto [q, _] : factors)
            if (pow_mod(g, phi_p / q, p) == 1) {
                ok = false;
                break;
            }
        if (ok)
            break;
    }
    if (e >= 2 && pow_mod(g, p - 1, p * p) == 1)
        g += p;
    return g;
}

/// A residue's coordinates in the generator basis of (Z/NZ)^x.
struct UnitLog {
    u64 residue = 0;
    std::vector<u64> exponents;
};

class CharacterGroup {
public:
    struct Generator {
        u64 residue;
        u64 order;
    };

    explicit CharacterGroup(u64 modulus, u64 limit = max_character_modulus)
        : modulus_(modulus)
    {
        if (modulus == 0)
            throw std::invalid_argument("CharacterGroup: modulus must be positive");
        if (modulus > limit)
            throw std::out_of_range("CharacterGroup: modulus " + std::to_string(modulus) +
                                    " exceeds limit " + std::to_string(limit));
        build_generators();
        build_logs();
        build_characters();
    }

    u64 modulus() const { return modulus_; }
    u64 group_order() const { return order_; }
    std::size_t size() const { return characters_.size(); }
    const std::vector<Generator>& generators() const { return generators_; }
    const std::vector<u64>& character(std::size_t index) const { return characters_.at(index); }

    /// Exponent vector of n if n is a unit mod N.
    std::optional<UnitLog> log(i64 n) const
    {
        u64 r = mod_floor(n, modulus_);
        if (log_index_[r] < 0)
            return std::nullopt;
        return UnitLog{r, logs_[static_cast<std::size_t>(log_index_[r])]};
    }

    /// chi(n) = exp(2 pi i * phase(n) / lcm_order) for units; nullopt for non-units.
    std::optional<u64> phase(std::size_t index, i64 n) const
    {
        u64 r = mod_floor(n, modulus_);
        if (log_index_[r] < 0)
            return std::nullopt;
        const auto& ex = logs_[static_cast<std::size_t>(log_index_[r])];
        const auto& ch = characters_.at(index);
        u64 acc = 0;
        for (std::size_t j = 0; j < generators_.size(); ++j)
            acc = (acc + ch[j] * ex[j] % generators_[j].order * (exponent_ / generators_[j].order)) % exponent_;
        return acc;
    }

    /// Exponent of the group: chi values are exponent()-th roots of unity.
    u64 exponent() const { return exponent_; }

    std::complex<double> evaluate(std::size_t index, i64 n) const
    {
        if (index >= characters_.size())
            throw std::out_of_range("CharacterGroup::evaluate: bad character index");
        auto ph = phase(index, n);
        if (!ph)
            return {0.0, 0.0};
        return root_of_unity(*ph);
    }

    /// Sum over all characters of conj(chi(m)) * chi(n); m must be a unit.
    std::complex<double> orthogonality_sum(i64 m, i64 n) const
    {
        if (!log(m))
            throw std::invalid_argument("orthogonality_sum: m is not a unit mod " + std::to_string(modulus_));
        std::complex<double> s{0.0, 0.0};
        for (std::size_t c = 0; c < characters_.size(); ++c) {
            auto pn = phase(c, n);
            if (!pn)
                continue;
            u64 pm = *phase(c, m);
            s += root_of_unity((*pn + exponent_ - pm) % exponent_);
        }
        return s;
    }

private:
    std::complex<double> root_of_unity(u64 k) const
    {
        // exact values at the quarter turns
        if (k == 0)
            return {1.0, 0.0};
        if (2 * k == exponent_)
            return {-1.0, 0.0};
        if (4 * k == exponent_)
            return {0.0, 1.0};
        if (4 * k == 3 * exponent_)
            return {0.0, -1.0};
        double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(exponent_);
        return std::polar(1.0, angle);
    }

    void build_generators()
    {
        u64 n = modulus_;
        for (auto [p, e] : trial_factor(n)) {
            u64 pe = 1;
            for (unsigned i = 0; i < e; ++i)
                pe *= p;
            u64 rest = n / pe;
            // lift a residue mod p^e to N, being 1 on the other prime-power parts
            auto lift = [&](u64 r) {
                return crt_combine({{r % pe, pe}, {1 % rest, rest}})->residue;
            };
            if (p == 2) {
                if (e >= 2)
                    generators_.push_back({lift(pe - 1), 2});
                if (e >= 3)
                    generators_.push_back({lift(5), pe / 4});
            } else {
                generators_.push_back({lift(primitive_root_prime_power(p, e)), pe / p * (p - 1)});
            }
        }
        order_ = 1;
        exponent_ = 1;
        for (const auto& g : generators_) {
            order_ *= g.order;
            exponent_ = std::lcm(exponent_, g.order);
        }
    }

    void build_logs()
    {
        log_index_.assign(modulus_, -1);
        logs_.reserve(order_);
        std::vector<u64> ex(generators_.size(), 0);
        // odometer over exponent vectors; residue = prod g_j^{e_j}
        for (u64 count = 0; count < order_; ++count) {
            u64 r = 1 % modulus_;
            for (std::size_t j = 0; j < generators_.size(); ++j)
                r = mul_mod(r, pow_mod(generators_[j].residue, ex[j], modulus_), modulus_);
            if (log_index_[r] >= 0)
                throw std::logic_error("CharacterGroup: generator basis is not independent");
            log_index_[r] = static_cast<long>(logs_.size());
            logs_.push_back(ex);
            advance(ex);
        }
    }

    void build_characters()
    {
        characters_.reserve(order_);
        std::vector<u64> a(generators_.size(), 0);
        for (u64 count = 0; count < order_; ++count) {
            characters_.push_back(a);
            advance(a);
        }
    }

    // lexicographic increment, last coordinate fastest
    void advance(std::vector<u64>& v) const
    {
        for (std::size_t j = v.size(); j-- > 0;) {
            if (++v[j] < generators_[j].order)
                return;
            v[j] = 0;
        }
    }

    u64 modulus_;
    u64 order_ = 1;
    u64 exponent_ = 1;
    std::vector<Generator> generators_;
    std::vector<long> log_index_;
    std::vector<std::vector<u64>> logs_;
    std::vector<std::vector<u64>> characters_;
};

inline CharacterGroup build_character_group(u64 modulus, u64 limit = max_character_modulus)
{
    return CharacterGroup(modulus, limit);
}

} // namespace qcd
