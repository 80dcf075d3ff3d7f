#pragma once

// Serial reference implementations of the row-parallel drivers. They share
// the row estimators with the parallel code but none of its loop structure,
// and are kept for equivalence tests and the benchmark.

#include "spimpute/estimators.hpp"
#include "spimpute/evaluation.hpp"

namespace spimpute::reference {

ImputationResult impute_naive(const Panel& panel);
ImputationResult impute_location(const Panel& panel, const FarmLayout& layout, Kernel kernel);
ImputationResult impute_unweighted_graph(const Panel& panel, const FarmGraph& graph, Kernel kernel,
                                         std::size_t r);

/// Hides each scored cell in an explicit copy of its row and re-imputes it.
EvalReport leave_one_out_eval(const Panel& panel, const FarmLayout& layout, const FarmGraph& graph,
                              const EstimatorConfig& config, Setup setup,
                              const EvalOptions& options = {});

}  // namespace spimpute::reference
