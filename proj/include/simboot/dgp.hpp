#pragma once

#include <cstddef>
#include <utility>
#include <variant>
#include <vector>

namespace simboot {

/// The two-bump mean: 5 off [0.25, 0.65], a parabola peaking at 8.8 around
/// 0.35 and a mirrored one dipping to 1.2 around 0.55.
struct BumpMean {};

struct FlatMean {
    double level = 5.0;
};

/// Piecewise-linear interpolation of (x, f) knots, constant beyond the ends.
struct TableMean {
    std::vector<double> xs;
    std::vector<double> fs;
};

using MeanFunction = std::variant<BumpMean, FlatMean, TableMean>;

double evaluate(const MeanFunction& f, double x);
bool is_constant(const MeanFunction& f);

/// Synthetic regression sample: equidistant design on [0, 1] plus Gaussian noise.
struct DgpSpec {
    std::size_t n = 400;
    MeanFunction mean = BumpMean{};
    double noise_sd = 1.0;

    void validate() const;
    double f(double x) const { return evaluate(mean, x); }
    /// x_i = (i - 1) / (n - 1), i = 1..n.
    std::vector<double> design() const;
    std::vector<double> mean_at_design() const;
};

}  // namespace simboot
