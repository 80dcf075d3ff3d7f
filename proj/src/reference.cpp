#include "spimpute/reference.hpp"

#include "detail.hpp"
#include "spimpute/error.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

namespace spimpute::reference {

namespace {

template <class Estimator>
ImputationResult serial_rows(const Panel& panel, const Estimator& est) {
    ImputationResult res(panel.rows(), panel.sensors());
    for (std::size_t t = 0; t < panel.rows(); ++t) {
        est.impute_row(panel.row(t), panel.mask_row(t), res.row(t), res.tags(t));
    }
    return res;
}

}  // namespace

ImputationResult impute_naive(const Panel& panel) { return serial_rows(panel, NaiveEstimator{}); }

ImputationResult impute_location(const Panel& panel, const FarmLayout& layout, Kernel kernel) {
    if (layout.size() != panel.sensors()) throw InputError("layout and panel sensor counts differ");
    return serial_rows(panel, location_estimator(layout, kernel));
}

ImputationResult impute_unweighted_graph(const Panel& panel, const FarmGraph& graph, Kernel kernel,
                                         std::size_t r) {
    if (graph.size() != panel.sensors()) throw InputError("graph and panel sensor counts differ");
    return serial_rows(panel, unweighted_graph_estimator(graph, kernel, r));
}

EvalReport leave_one_out_eval(const Panel& panel, const FarmLayout& layout, const FarmGraph& graph,
                              const EstimatorConfig& config, Setup setup, const EvalOptions& options) {
    if (layout.size() != panel.sensors()) throw InputError("layout and panel sensor counts differ");
    if (graph.size() != panel.sensors()) throw InputError("graph and panel sensor counts differ");
    const std::size_t n = panel.sensors();
    const std::size_t end = std::min(options.row_end, panel.rows());
    const std::size_t begin = std::min(options.row_begin, end);
    constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> err(panel.rows() * n, kNaN);
    std::vector<double> err_naive(panel.rows() * n, kNaN);
    std::vector<std::uint8_t> tags(panel.rows() * n, 0xff);

    const NaiveEstimator naive;
    std::vector<double> out(n);
    std::vector<Provenance> out_tags(n);
    std::vector<double> naive_out(n);
    std::vector<Provenance> naive_tags(n);

    auto record = [&](std::size_t t, std::size_t i) {
        const double truth = panel.value(t, i);
        const std::size_t cell = t * n + i;
        err[cell] = (truth - out[i]) * (truth - out[i]);
        err_naive[cell] = (truth - naive_out[i]) * (truth - naive_out[i]);
        tags[cell] = static_cast<std::uint8_t>(out_tags[i]);
    };

    if (config.method == Method::weighted_graph) {
        const WeightedGraphEstimator est(graph, config.kernel, config.r, config.weight_floor);
        SimilarityTracker tracker(graph.edges(), config.learning_rate);
        for (std::size_t t = 0; t < end; ++t) {
            const auto values = panel.row(t);
            const auto mask = panel.mask_row(t);
            const bool scored = t >= begin && (setup == Setup::incomplete || panel.complete(t));
            for (std::size_t i = 0; scored && i < n; ++i) {
                if (!mask[i]) continue;
                std::vector<double> row(values.begin(), values.end());
                std::vector<std::uint8_t> hidden(mask.begin(), mask.end());
                row[i] = kNaN;
                hidden[i] = 0;
                naive.impute_row(row, hidden, naive_out, naive_tags);
                if (naive_tags[i] == Provenance::unimputable) continue;
                est.impute_row(row, hidden, est.edge_weights(row, hidden, tracker.guesses()), out, out_tags);
                record(t, i);
            }
            tracker.update(est.revealed(values, mask));
        }
    } else {
        auto run = [&](const auto& est) {
            for (std::size_t t = begin; t < end; ++t) {
                if (setup == Setup::complete && !panel.complete(t)) continue;
                for (std::size_t i = 0; i < n; ++i) {
                    if (!panel.observed(t, i)) continue;
                    Panel hidden = panel.slice_rows(t, t + 1);
                    hidden.hide(0, i);
                    naive.impute_row(hidden.row(0), hidden.mask_row(0), naive_out, naive_tags);
                    if (naive_tags[i] == Provenance::unimputable) continue;
                    est.impute_row(hidden.row(0), hidden.mask_row(0), out, out_tags);
                    record(t, i);
                }
            }
        };
        switch (config.method) {
            case Method::naive: run(NaiveEstimator{}); break;
            case Method::location: run(location_estimator(layout, config.kernel)); break;
            case Method::unweighted_graph:
                run(unweighted_graph_estimator(graph, config.kernel, config.r));
                break;
            case Method::weighted_graph: break;
        }
    }
    return detail::assemble_report(panel, layout, config, setup, begin, end, err, err_naive, tags);
}

}  // namespace spimpute::reference
