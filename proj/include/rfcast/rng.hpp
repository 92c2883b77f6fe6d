#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace rfcast {

namespace detail {

// SplitMix64 finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31U);
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

} // namespace detail

/// Counter-based stream: output i is mix64(key + (i + 1) * golden). A stream is
/// fully determined by its key, so independent streams can be derived per tree
/// or per window without any shared generator state.
class CounterRng {
public:
    using result_type = std::uint64_t;

    constexpr explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

    [[nodiscard]] static constexpr CounterRng derive(std::uint64_t seed, std::uint64_t stream) noexcept {
        return CounterRng(derive_key(seed, stream));
    }
    [[nodiscard]] static constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) noexcept {
        return detail::mix64(detail::mix64(seed ^ 0x6a09e667f3bcc909ULL) + detail::mix64(stream + detail::kGolden));
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        ++counter_;
        return detail::mix64(key_ + counter_ * detail::kGolden);
    }

    /// Unbiased integer in [0, bound) (Lemire's multiply-and-reject).
    constexpr std::uint64_t below(std::uint64_t bound) noexcept {
        if (bound <= 1) {
            return 0;
        }
        unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>((*this)()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64U);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    constexpr double uniform() noexcept { return static_cast<double>((*this)() >> 11U) * 0x1.0p-53; }

    /// Standard normal draw (Box-Muller, one value per pair of uniforms).
    double normal() noexcept {
        double u1 = uniform();
        while (u1 <= 0.0) {
            u1 = uniform();
        }
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925 * u2);
    }

    [[nodiscard]] constexpr std::uint64_t key() const noexcept { return key_; }
    [[nodiscard]] constexpr std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// n independent uniform draws from 0..n-1.
[[nodiscard]] inline std::vector<std::size_t> bootstrap_sample(CounterRng& rng, std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) {
        i = static_cast<std::size_t>(rng.below(n));
    }
    return idx;
}

/// Draws `k` distinct values from 0..n-1 (partial Fisher-Yates over `scratch`),
/// returned in ascending order.
inline void sample_without_replacement(CounterRng& rng, std::size_t n, std::size_t k, std::vector<std::size_t>& scratch,
                                       std::vector<std::size_t>& out) {
    scratch.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        scratch[i] = i;
    }
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(scratch[i], scratch[j]);
    }
    out.assign(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(out.begin(), out.end());
}

} // namespace rfcast
