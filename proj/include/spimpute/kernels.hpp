#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spimpute {

enum class Kernel { naive, gaussian, epanechnikov, triangular, quartic, triweight, tricube };

inline constexpr std::array<Kernel, 7> kAllKernels = {
    Kernel::naive,     Kernel::gaussian,  Kernel::epanechnikov, Kernel::triangular,
    Kernel::quartic,   Kernel::triweight, Kernel::tricube};

std::string_view to_string(Kernel k);
/// Lowercase names as printed by to_string. Throws InputError otherwise.
Kernel parse_kernel(std::string_view name);

/// K(u) for u >= 0. Compact kernels use the closed support u <= 1.
double kernel_eval(Kernel k, double u);

struct WeightVector {
    std::vector<double> weights;  // aligned with the neighbor distances passed in
    bool fallback_used = false;
};

/// Kernel sums below this fall back to uniform weights.
inline constexpr double kKernelSumFloor = 1e-12;

/// Nadaraya-Watson weights with adaptive bandwidth h = max distance.
/// Falls back to uniform weights (fallback_used) when h == 0 or the kernel
/// sum is below kKernelSumFloor. Throws NoNeighborsError on an empty input.
WeightVector nadaraya_watson_weights(Kernel k, std::span<const double> distances);

/// Same, writing into `out` (size == distances.size()). Returns fallback_used.
bool nadaraya_watson_weights(Kernel k, std::span<const double> distances, std::span<double> out);

}  // namespace spimpute
