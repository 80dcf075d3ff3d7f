#pragma once

#include "spimpute/evaluation.hpp"

#include <cstdint>
#include <vector>

namespace spimpute::detail {

EvalReport assemble_report(const Panel& panel, const FarmLayout& layout, const EstimatorConfig& config,
                           Setup setup, std::size_t begin, std::size_t end,
                           const std::vector<double>& err_method, const std::vector<double>& err_naive,
                           const std::vector<std::uint8_t>& tags);

}  // namespace spimpute::detail
