#include "simboot/kernel.hpp"

#include <cmath>
#include <string>

#include "simboot/error.hpp"

namespace simboot {

void KernelSpec::validate() const {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
        throw InvalidArgument("bandwidth must be positive and finite, got " +
                              std::to_string(bandwidth));
}

std::vector<double> local_weights(double center, const KernelSpec& kernel,
                                  std::span<const double> x) {
    kernel.validate();
    std::vector<double> w(x.size());
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        w[i] = kernel_value((center - x[i]) / kernel.bandwidth);
        total += w[i];
    }
    if (total <= kDegenerateWeightFloor * static_cast<double>(x.size()))
        throw DegenerateWeights("no design points inside the kernel support of center " +
                                std::to_string(center));
    return w;
}

}  // namespace simboot
