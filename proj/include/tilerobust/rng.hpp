#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace tilerobust {

/// Counter-based generator built on the SplitMix64 finalizer.
///
/// Every draw is a pure function of (key, counter), so streams can be split
/// per level index or per attempt without sharing state. The integer helpers
/// do their own range reduction so output is identical on every platform
/// (std::uniform_int_distribution is implementation-defined).
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed = 0) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Independent child stream for sub-task `index`.
    [[nodiscard]] CounterRng split(std::uint64_t index) const {
        CounterRng child;
        child.key_ = mix(key_ ^ mix(index + 0x243f6a8885a308d3ULL));
        return child;
    }

    std::uint64_t next() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound) {
        // Lemire-style rejection keeps the draw unbiased.
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t x = next();
            if (x >= threshold) return x % bound;
        }
    }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Index drawn proportionally to `weights`; returns weights.size() when all are zero.
    std::size_t weighted(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (total <= 0.0) return weights.size();
        double pick = uniform() * total;
        std::size_t last = weights.size();
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] <= 0.0) continue;
            last = i;
            if (pick < weights[i]) return i;
            pick -= weights[i];
        }
        return last;
    }

    template <class T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[below(i)]);
        }
    }

    [[nodiscard]] std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

/// Per-item seed derived from a base seed; recorded in corpus manifests.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) {
    return CounterRng::mix(CounterRng::mix(base_seed) ^ (index * 0xd1b54a32d192ed03ULL + 1));
}

}  // namespace tilerobust
