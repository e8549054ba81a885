#include "simboot/dgp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "simboot/error.hpp"

namespace simboot {

namespace {

double bump(double x) {
    if (x >= 0.25 && x <= 0.45) return 5.0 + 3.8 * (1.0 - 100.0 * (x - 0.35) * (x - 0.35));
    if (x > 0.45 && x <= 0.65) return 5.0 - 3.8 * (1.0 - 100.0 * (x - 0.55) * (x - 0.55));
    return 5.0;
}

double interpolate(const TableMean& t, double x) {
    if (x <= t.xs.front()) return t.fs.front();
    if (x >= t.xs.back()) return t.fs.back();
    const auto it = std::upper_bound(t.xs.begin(), t.xs.end(), x);
    const auto j = static_cast<std::size_t>(it - t.xs.begin());
    const double a = (x - t.xs[j - 1]) / (t.xs[j] - t.xs[j - 1]);
    return t.fs[j - 1] + a * (t.fs[j] - t.fs[j - 1]);
}

struct Evaluator {
    double x;
    double operator()(const BumpMean&) const { return bump(x); }
    double operator()(const FlatMean& f) const { return f.level; }
    double operator()(const TableMean& t) const { return interpolate(t, x); }
};

}  // namespace

double evaluate(const MeanFunction& f, double x) { return std::visit(Evaluator{x}, f); }

bool is_constant(const MeanFunction& f) {
    if (std::holds_alternative<FlatMean>(f)) return true;
    if (const auto* t = std::get_if<TableMean>(&f))
        return std::all_of(t->fs.begin(), t->fs.end(), [&](double v) { return v == t->fs.front(); });
    return false;
}

void DgpSpec::validate() const {
    if (n < 2) throw InvalidArgument("synthetic design needs n >= 2");
    // noise_sd == 0 is accepted as a noiseless test hook
    if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd))
        throw InvalidArgument("noise_sd must be nonnegative and finite");
    if (const auto* t = std::get_if<TableMean>(&mean)) {
        if (t->xs.empty() || t->xs.size() != t->fs.size())
            throw InvalidArgument("mean table needs matching, non-empty x and f columns");
        for (std::size_t j = 0; j < t->xs.size(); ++j) {
            if (!std::isfinite(t->xs[j]) || !std::isfinite(t->fs[j]))
                throw InvalidArgument("non-finite entry in mean table");
            if (j > 0 && !(t->xs[j] > t->xs[j - 1]))
                throw InvalidArgument("mean table x column must be strictly increasing");
        }
    }
}

std::vector<double> DgpSpec::design() const {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i) / static_cast<double>(n - 1);
    return x;
}

std::vector<double> DgpSpec::mean_at_design() const {
    auto x = design();
    for (double& v : x) v = f(v);
    return x;
}

}  // namespace simboot
