#include "simboot/dataset.hpp"

#include <cmath>
#include <string>

#include "simboot/error.hpp"

namespace simboot {

void Dataset::validate() const {
    if (y.empty()) throw InvalidArgument("dataset needs at least one observation");
    if (x.size() != y.size())
        throw DimensionMismatch("dataset has " + std::to_string(x.size()) + " design points but " +
                                std::to_string(y.size()) + " observations");
    for (std::size_t i = 0; i < y.size(); ++i)
        if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
            throw InvalidArgument("non-finite value in dataset at row " + std::to_string(i));
}

std::string_view to_string(Family family) {
    switch (family) {
        case Family::LocalConstant: return "lc";
        case Family::LocalQuadratic: return "lq";
        case Family::QuantileLocation: return "qt";
    }
    return "?";
}

void ModelGrid::validate() const {
    if (size() == 0) throw InvalidArgument("model grid is empty");
    if (family == Family::QuantileLocation) {
        for (double tau : taus)
            if (!(tau > 0.0 && tau < 1.0))
                throw InvalidTau("quantile index must lie in (0, 1), got " + std::to_string(tau));
        return;
    }
    kernel.validate();
    for (std::size_t k = 0; k < centers.size(); ++k) {
        if (!std::isfinite(centers[k])) throw InvalidArgument("non-finite model center");
        if (k > 0 && !(centers[k] > centers[k - 1]))
            throw InvalidArgument("model centers must be strictly increasing");
    }
}

ModelGrid ModelGrid::regression(Family family, std::size_t count, double bandwidth) {
    ModelGrid grid;
    grid.family = family;
    grid.kernel.bandwidth = bandwidth;
    grid.centers.resize(count);
    for (std::size_t k = 0; k < count; ++k)
        grid.centers[k] = count == 1 ? 0.5 : static_cast<double>(k) / static_cast<double>(count - 1);
    return grid;
}

ModelGrid ModelGrid::quantiles(std::size_t count) {
    ModelGrid grid;
    grid.family = Family::QuantileLocation;
    grid.taus.resize(count);
    for (std::size_t k = 0; k < count; ++k)
        grid.taus[k] = static_cast<double>(k + 1) / static_cast<double>(count + 1);
    return grid;
}

}  // namespace simboot
