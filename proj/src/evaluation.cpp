#include "spimpute/evaluation.hpp"

#include "detail.hpp"
#include "spimpute/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace spimpute {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint8_t kNoTag = 0xff;

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};

// Sample standard deviation (n - 1); zero for a single value.
MeanSd mean_sd(const std::vector<double>& xs) {
    MeanSd out;
    if (xs.empty()) return out;
    out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - out.mean) * (x - out.mean);
        out.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return out;
}

// Squared errors of every scored cell, row-major; NaN marks unscored cells.
struct CellErrors {
    std::vector<double> method;
    std::vector<double> naive;
    std::vector<std::uint8_t> tags;

    CellErrors(std::size_t cells) : method(cells, kNaN), naive(cells, kNaN), tags(cells, kNoTag) {}
};

bool row_scored(const Panel& panel, std::size_t t, Setup setup) {
    return setup == Setup::incomplete || panel.complete(t);
}

template <class Estimator>
void score_independent_rows(const Panel& panel, const Estimator& est, Setup setup, std::size_t begin,
                            std::size_t end, CellErrors& errors) {
    const NaiveEstimator naive;
    const std::size_t n = panel.sensors();
#pragma omp parallel for schedule(dynamic, 32)
    for (std::ptrdiff_t tt = static_cast<std::ptrdiff_t>(begin); tt < static_cast<std::ptrdiff_t>(end); ++tt) {
        const auto t = static_cast<std::size_t>(tt);
        if (!row_scored(panel, t, setup)) continue;
        const auto values = panel.row(t);
        const auto mask = panel.mask_row(t);
        for (std::size_t i = 0; i < n; ++i) {
            if (!mask[i]) continue;
            const CellEstimate base = naive.estimate(values, mask, i);
            if (base.tag == Provenance::unimputable) continue;
            const CellEstimate e = est.estimate(values, mask, i);
            const std::size_t cell = t * n + i;
            errors.naive[cell] = (values[i] - base.value) * (values[i] - base.value);
            errors.method[cell] = (values[i] - e.value) * (values[i] - e.value);
            errors.tags[cell] = static_cast<std::uint8_t>(e.tag);
        }
    }
}

void score_weighted_graph(const Panel& panel, const FarmGraph& graph, const EstimatorConfig& config,
                          Setup setup, std::size_t begin, std::size_t end, CellErrors& errors) {
    const WeightedGraphEstimator est(graph, config.kernel, config.r, config.weight_floor);
    SimilarityTracker tracker(graph.edges(), config.learning_rate);
    const NaiveEstimator naive;
    const std::size_t n = panel.sensors();
    for (std::size_t t = 0; t < end; ++t) {
        const auto values = panel.row(t);
        const auto mask = panel.mask_row(t);
        if (t >= begin && row_scored(panel, t, setup)) {
            const std::vector<double> guesses = tracker.guesses();
#pragma omp parallel for schedule(dynamic, 1)
            for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
                const auto i = static_cast<std::size_t>(ii);
                if (!mask[i]) continue;
                const CellEstimate base = naive.estimate(values, mask, i);
                if (base.tag == Provenance::unimputable) continue;
                std::vector<std::uint8_t> hidden(mask.begin(), mask.end());
                hidden[i] = 0;
                const std::vector<double> weights = est.edge_weights(values, hidden, guesses);
                const CellEstimate e = est.estimate(values, hidden, i, weights);
                const std::size_t cell = t * n + i;
                errors.naive[cell] = (values[i] - base.value) * (values[i] - base.value);
                errors.method[cell] = (values[i] - e.value) * (values[i] - e.value);
                errors.tags[cell] = static_cast<std::uint8_t>(e.tag);
            }
        }
        tracker.update(est.revealed(values, mask));
    }
}

}  // namespace

std::string_view to_string(Setup s) { return s == Setup::complete ? "complete" : "incomplete"; }

Setup parse_setup(std::string_view name) {
    if (name == "complete") return Setup::complete;
    if (name == "incomplete") return Setup::incomplete;
    throw InputError(fmt::format("unknown setup '{}'", name));
}

double rmse(std::span<const double> truth, std::span<const double> estimates) {
    if (truth.size() != estimates.size()) throw InputError("truth and estimates differ in length");
    if (truth.empty()) throw UndefinedError("RMSE is undefined without scored rows");
    double ss = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        const double d = truth[k] - estimates[k];
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(truth.size()));
}

std::vector<std::size_t> scored_rows(const Panel& panel, std::size_t sensor, Setup setup,
                                     std::size_t row_begin, std::size_t row_end) {
    std::vector<std::size_t> out;
    row_end = std::min(row_end, panel.rows());
    for (std::size_t t = row_begin; t < row_end; ++t) {
        if (panel.observed(t, sensor) && row_scored(panel, t, setup)) out.push_back(t);
    }
    return out;
}

namespace detail {

// Shared by the parallel and the serial reference evaluation.
EvalReport assemble_report(const Panel& panel, const FarmLayout& layout, const EstimatorConfig& config,
                           Setup setup, std::size_t begin, std::size_t end,
                           const std::vector<double>& err_method, const std::vector<double>& err_naive,
                           const std::vector<std::uint8_t>& tags) {
    const std::size_t n = panel.sensors();
    EvalReport rep;
    rep.config = config;
    rep.setup = setup;
    rep.row_begin = begin;
    rep.row_end = end;
    rep.completeness = completeness(panel.slice_rows(begin, end));

    std::vector<double> rmses, naive_rmses, improvements;
    for (std::size_t i = 0; i < n; ++i) {
        SensorScore s;
        s.sensor_id = layout[i].id;
        double ss = 0.0;
        double ss_naive = 0.0;
        for (std::size_t t = begin; t < end; ++t) {
            const std::size_t cell = t * n + i;
            if (std::isnan(err_method[cell])) continue;
            ss += err_method[cell];
            ss_naive += err_naive[cell];
            ++s.scored_rows;
        }
        if (s.scored_rows > 0) {
            s.scored = true;
            s.rmse = std::sqrt(ss / static_cast<double>(s.scored_rows));
            s.rmse_naive = std::sqrt(ss_naive / static_cast<double>(s.scored_rows));
            if (s.rmse_naive > 0.0) {
                s.improvement = (s.rmse_naive - s.rmse) / s.rmse_naive;
            } else {
                s.improvement = s.rmse == 0.0 ? 0.0 : kNaN;
            }
            rmses.push_back(s.rmse);
            naive_rmses.push_back(s.rmse_naive);
            if (!std::isnan(s.improvement)) {
                improvements.push_back(s.improvement);
                if (rep.best_sensor.empty() || s.improvement > rep.best_improvement) {
                    rep.best_sensor = s.sensor_id;
                    rep.best_improvement = s.improvement;
                }
                if (rep.worst_sensor.empty() || s.improvement < rep.worst_improvement) {
                    rep.worst_sensor = s.sensor_id;
                    rep.worst_improvement = s.improvement;
                }
            }
        }
        rep.sensors.push_back(std::move(s));
    }
    for (std::size_t t = begin; t < end; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint8_t tag = tags[t * n + i];
            if (tag != kNoTag) ++rep.provenance_counts[tag];
        }
    }

    const MeanSd r = mean_sd(rmses);
    const MeanSd rn = mean_sd(naive_rmses);
    const MeanSd imp = mean_sd(improvements);
    rep.mean_rmse = r.mean;
    rep.sd_rmse = r.sd;
    rep.mean_rmse_naive = rn.mean;
    rep.sd_rmse_naive = rn.sd;
    rep.mean_improvement = imp.mean;
    rep.sd_improvement = imp.sd;
    rep.improvement_of_mean = rn.mean > 0.0 ? (rn.mean - r.mean) / rn.mean : 0.0;
    return rep;
}

}  // namespace detail

EvalReport leave_one_out_eval(const Panel& panel, const FarmLayout& layout, const FarmGraph& graph,
                              const EstimatorConfig& config, Setup setup, const EvalOptions& options) {
    if (layout.size() != panel.sensors()) throw InputError("layout and panel sensor counts differ");
    if (graph.size() != panel.sensors()) throw InputError("graph and panel sensor counts differ");
    const std::size_t end = std::min(options.row_end, panel.rows());
    const std::size_t begin = std::min(options.row_begin, end);

    CellErrors errors(panel.rows() * panel.sensors());
    switch (config.method) {
        case Method::naive:
            score_independent_rows(panel, NaiveEstimator{}, setup, begin, end, errors);
            break;
        case Method::location:
            score_independent_rows(panel, location_estimator(layout, config.kernel), setup, begin, end,
                                   errors);
            break;
        case Method::unweighted_graph:
            score_independent_rows(panel, unweighted_graph_estimator(graph, config.kernel, config.r),
                                   setup, begin, end, errors);
            break;
        case Method::weighted_graph:
            score_weighted_graph(panel, graph, config, setup, begin, end, errors);
            break;
    }
    return detail::assemble_report(panel, layout, config, setup, begin, end, errors.method,
                                   errors.naive, errors.tags);
}

std::vector<EvalReport> sweep(const Panel& panel, const FarmLayout& layout, const FarmGraph& graph,
                              const SweepGrid& grid, const EvalOptions& options) {
    if (grid.methods.empty() || grid.kernels.empty() || grid.dims.empty() || grid.setups.empty()) {
        throw InputError("sweep grid must be non-empty in every axis");
    }
    std::vector<EvalReport> out;
    for (Setup setup : grid.setups) {
        for (Method method : grid.methods) {
            const bool graph_method = method == Method::unweighted_graph || method == Method::weighted_graph;
            const std::vector<Kernel> kernels =
                method == Method::naive ? std::vector<Kernel>{Kernel::naive} : grid.kernels;
            const std::vector<std::size_t> dims = graph_method ? grid.dims : std::vector<std::size_t>{0};
            for (Kernel kernel : kernels) {
                for (std::size_t r : dims) {
                    EstimatorConfig cfg;
                    cfg.method = method;
                    cfg.kernel = kernel;
                    cfg.r = graph_method ? r : 0;
                    cfg.learning_rate = grid.learning_rate;
                    cfg.weight_floor = grid.weight_floor;
                    out.push_back(leave_one_out_eval(panel, layout, graph, cfg, setup, options));
                }
            }
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const EvalReport& a, const EvalReport& b) {
        return a.mean_improvement > b.mean_improvement;
    });
    return out;
}

// ---------------------------------------------------------------- complexity

FarmLayout smoke_layout(std::size_t n) {
    std::size_t rows = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    while (rows > 1 && n % rows != 0) --rows;
    return grid_layout(rows, n / rows);
}

ComplexityReport complexity_smoke(std::span<const std::size_t> sizes, std::size_t rows,
                                  std::uint64_t seed, double min_seconds) {
    using clock = std::chrono::steady_clock;
    ComplexityReport rep;
    constexpr Method kMethods[] = {Method::naive, Method::location, Method::unweighted_graph,
                                   Method::weighted_graph};
    for (std::size_t n : sizes) {
        const FarmLayout layout = smoke_layout(n);
        const auto edges = propose_grid_edges(layout);
        const FarmGraph graph = build_graph(layout, edges);
        Panel panel = synth_panel(layout, {rows, 2.0, 0.9, seed});
        // One hidden cell per row so every row needs imputation.
        for (std::size_t t = 0; t < panel.rows(); ++t) panel.hide(t, (t * 7 + 3) % layout.size());

        for (Method m : kMethods) {
            EstimatorConfig cfg;
            cfg.method = m;
            cfg.kernel = Kernel::triweight;
            cfg.r = 2;
            std::size_t reps = 0;
            const auto start = clock::now();
            double elapsed = 0.0;
            do {
                const ImputationResult res = impute(panel, layout, graph, cfg);
                if (res.filled.empty() && rows > 0) throw Error("empty imputation");
                ++reps;
                elapsed = std::chrono::duration<double>(clock::now() - start).count();
            } while (elapsed < min_seconds);
            rep.rows.push_back({m, layout.size(),
                                elapsed / static_cast<double>(reps * std::max<std::size_t>(rows, 1))});
        }
    }
    for (std::size_t k = 0; k < 4; ++k) {
        std::vector<double> xs, ys;
        for (const auto& row : rep.rows) {
            if (row.method == kMethods[k]) {
                xs.push_back(std::log(static_cast<double>(row.sensors)));
                ys.push_back(std::log(row.seconds_per_row));
            }
        }
        if (xs.size() < 2) continue;
        const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
        const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t j = 0; j < xs.size(); ++j) {
            sxy += (xs[j] - mx) * (ys[j] - my);
            sxx += (xs[j] - mx) * (xs[j] - mx);
        }
        rep.slopes[k] = sxx > 0.0 ? sxy / sxx : 0.0;
    }
    return rep;
}

}  // namespace spimpute
