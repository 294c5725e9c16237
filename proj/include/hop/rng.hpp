#pragma once

// Deterministic random streams. Every stochastic component draws from an Rng
// seeded by an explicit key chain, so identical configs reproduce bit-identical
// results regardless of call interleaving or thread count.

#include <cmath>
#include <random>
#include <span>
#include <unordered_set>
#include <vector>

#include "hop/common.hpp"

namespace hop {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1). 53-bit resolution.
    double next_double() { return (eng_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). Rejection-free modulo bias is negligible for
    // n << 2^64 but we reject anyway to keep draws exactly uniform.
    std::size_t next_below(std::size_t n) {
        if (n == 0) throw DomainError("next_below(0)");
        std::uint64_t bound = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t v;
        do {
            v = eng_();
        } while (v >= bound);
        return static_cast<std::size_t>(v % n);
    }

    // Uniform in [lo, hi).
    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Standard normal via Box-Muller (deterministic, two draws per pair).
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_double(), u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Index draw from unnormalized non-negative weights summing to `total`.
    // Caller guarantees total > 0 and finite.
    std::size_t next_categorical(std::span<const double> weights, double total) {
        double x = next_double() * total;
        double acc = 0.0;
        std::size_t last = weights.size() - 1;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (x < acc) return i;
        }
        return last;  // only reachable via rounding at the top end
    }

    // Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = next_below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    // k distinct indices from [0, n), order of selection preserved.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

inline std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n, std::size_t k) {
    if (k > n) throw DomainError("sample_without_replacement: k > n");
    // Floyd's algorithm: O(k) expected, no O(n) scratch.
    std::vector<std::size_t> out;
    out.reserve(k);
    if (k * 2 >= n) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        shuffle(idx);
        idx.resize(k);
        return idx;
    }
    std::unordered_set<std::size_t> seen;
    for (std::size_t j = n - k; j < n; ++j) {
        std::size_t t = next_below(j + 1);
        if (seen.count(t)) t = j;
        seen.insert(t);
        out.push_back(t);
    }
    return out;
}

}  // namespace hop
