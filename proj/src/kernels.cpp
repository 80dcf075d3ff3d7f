#include "spimpute/kernels.hpp"

#include "spimpute/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace spimpute {

std::string_view to_string(Kernel k) {
    switch (k) {
        case Kernel::naive: return "naive";
        case Kernel::gaussian: return "gaussian";
        case Kernel::epanechnikov: return "epanechnikov";
        case Kernel::triangular: return "triangular";
        case Kernel::quartic: return "quartic";
        case Kernel::triweight: return "triweight";
        case Kernel::tricube: return "tricube";
    }
    return "unknown";
}

Kernel parse_kernel(std::string_view name) {
    for (Kernel k : kAllKernels) {
        if (to_string(k) == name) return k;
    }
    throw InputError(fmt::format("unknown kernel '{}'", name));
}

double kernel_eval(Kernel k, double u) {
    if (!(u >= 0.0)) throw InputError(fmt::format("kernel argument must be >= 0, got {}", u));
    if (k == Kernel::gaussian) return std::exp(-u * u);
    if (u > 1.0) return 0.0;
    switch (k) {
        case Kernel::naive: return 1.0;
        case Kernel::epanechnikov: return 1.0 - u * u;
        case Kernel::triangular: return 1.0 - u;
        case Kernel::quartic: {
            const double v = 1.0 - u * u;
            return v * v;
        }
        case Kernel::triweight: {
            const double v = 1.0 - u * u;
            return v * v * v;
        }
        case Kernel::tricube: {
            const double v = 1.0 - u * u * u;
            return v * v * v;
        }
        case Kernel::gaussian: break;
    }
    return 0.0;
}

bool nadaraya_watson_weights(Kernel k, std::span<const double> distances, std::span<double> out) {
    if (distances.empty()) throw NoNeighborsError("no observed neighbors to weight");
    double h = 0.0;
    for (double d : distances) {
        if (!(d >= 0.0)) throw InputError("neighbor distances must be >= 0");
        h = std::max(h, d);
    }
    double sum = 0.0;
    if (h > 0.0) {
        for (std::size_t j = 0; j < distances.size(); ++j) {
            out[j] = kernel_eval(k, distances[j] / h);
            sum += out[j];
        }
    }
    if (h == 0.0 || sum < kKernelSumFloor) {
        std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(distances.size()));
        return true;
    }
    for (double& w : out) w /= sum;
    return false;
}

WeightVector nadaraya_watson_weights(Kernel k, std::span<const double> distances) {
    WeightVector wv;
    wv.weights.resize(distances.size());
    wv.fallback_used = nadaraya_watson_weights(k, distances, wv.weights);
    return wv;
}

}  // namespace spimpute
