#include "simboot/rng.hpp"

namespace simboot {

std::string_view to_string(WeightScheme scheme) {
    switch (scheme) {
        case WeightScheme::Gaussian: return "gauss";
        case WeightScheme::Exponential: return "exp";
        case WeightScheme::Bernoulli: return "bern";
    }
    return "?";
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RngSpec RngSpec::substream(std::uint64_t tag) const {
    return {seed, splitmix64(stream ^ splitmix64(tag + 0x632be59bd9b4e019ULL))};
}

std::mt19937_64 RngSpec::engine(std::uint64_t index) const {
    const std::uint64_t key = splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
    return std::mt19937_64(key);
}

void draw_weights(WeightScheme scheme, const RngSpec& rng, std::uint64_t replicate,
                  std::span<double> out) {
    auto gen = rng.engine(replicate);
    switch (scheme) {
        case WeightScheme::Gaussian: {
            std::normal_distribution<double> law(1.0, 1.0);
            for (double& u : out) u = law(gen);
            break;
        }
        case WeightScheme::Exponential: {
            std::exponential_distribution<double> law(1.0);
            for (double& u : out) u = law(gen);
            break;
        }
        case WeightScheme::Bernoulli: {
            // one 64-bit draw feeds 64 fair coins
            std::uint64_t bits = 0;
            for (std::size_t i = 0; i < out.size(); ++i) {
                if (i % 64 == 0) bits = gen();
                out[i] = (bits & 1ULL) ? 2.0 : 0.0;
                bits >>= 1;
            }
            break;
        }
    }
}

std::vector<double> draw_weights(WeightScheme scheme, std::size_t n, const RngSpec& rng,
                                 std::uint64_t replicate) {
    std::vector<double> u(n);
    draw_weights(scheme, rng, replicate, u);
    return u;
}

}  // namespace simboot
