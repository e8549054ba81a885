#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace simboot {

/// Multiplier laws, each with mean 1 and variance 1.
enum class WeightScheme {
    Gaussian,     // N(1, 1)
    Exponential,  // Exp(1)
    Bernoulli,    // 2 * Bernoulli(1/2), values {0, 2}
};

std::string_view to_string(WeightScheme scheme);

constexpr bool is_nonnegative(WeightScheme scheme) noexcept {
    return scheme != WeightScheme::Gaussian;
}

/// Keyed random streams. Every draw is a pure function of (seed, stream,
/// index), so work can be split across threads in any order.
struct RngSpec {
    std::uint64_t seed = 42;
    std::uint64_t stream = 0;

    /// Child key for a nested family of streams (dataset m, repetition r, ...).
    RngSpec substream(std::uint64_t tag) const;

    std::mt19937_64 engine(std::uint64_t index) const;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

void draw_weights(WeightScheme scheme, const RngSpec& rng, std::uint64_t replicate,
                  std::span<double> out);

std::vector<double> draw_weights(WeightScheme scheme, std::size_t n, const RngSpec& rng,
                                 std::uint64_t replicate);

}  // namespace simboot
