#include "spimpute/estimators.hpp"

#include "spimpute/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace spimpute {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

// Weighted mean of values[neighbors] with NW weights over `distances`.
CellEstimate nw_estimate(Kernel kernel, std::span<const double> values,
                         std::span<const std::size_t> neighbors, std::span<const double> distances,
                         std::span<double> scratch) {
    const bool fallback = nadaraya_watson_weights(kernel, distances, scratch);
    double sum = 0.0;
    for (std::size_t k = 0; k < neighbors.size(); ++k) sum += scratch[k] * values[neighbors[k]];
    return {clamp_unit(sum), fallback ? Provenance::uniform_fallback : Provenance::weighted_knn};
}

}  // namespace

std::string_view to_string(Method m) {
    switch (m) {
        case Method::naive: return "naive";
        case Method::location: return "location";
        case Method::unweighted_graph: return "unweighted_graph";
        case Method::weighted_graph: return "weighted_graph";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    for (Method m : {Method::naive, Method::location, Method::unweighted_graph, Method::weighted_graph}) {
        if (to_string(m) == name) return m;
    }
    throw InputError(fmt::format("unknown method '{}'", name));
}

std::string_view to_string(Provenance p) {
    switch (p) {
        case Provenance::observed: return "observed";
        case Provenance::weighted_knn: return "weighted_knn";
        case Provenance::small_component_copy: return "small_component_copy";
        case Provenance::uniform_fallback: return "uniform_fallback";
        case Provenance::unweighted_fallback: return "unweighted_fallback";
        case Provenance::unimputable: return "unimputable";
    }
    return "unknown";
}

ImputationResult::ImputationResult(std::size_t t, std::size_t n)
    : rows(t), sensors(n), filled(t * n, kNaN), provenance(t * n, Provenance::unimputable) {}

// ---------------------------------------------------------------- naive

CellEstimate NaiveEstimator::estimate(std::span<const double> values,
                                      std::span<const std::uint8_t> mask, std::size_t target) const {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (mask[j] && j != target) {
            sum += values[j];
            ++n;
        }
    }
    if (n == 0) return {kNaN, Provenance::unimputable};
    return {clamp_unit(sum / static_cast<double>(n)), Provenance::weighted_knn};
}

void NaiveEstimator::impute_row(std::span<const double> values, std::span<const std::uint8_t> mask,
                                std::span<double> out, std::span<Provenance> tags) const {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (mask[j]) {
            sum += values[j];
            ++n;
        }
    }
    const CellEstimate fill = n == 0 ? CellEstimate{kNaN, Provenance::unimputable}
                                     : CellEstimate{clamp_unit(sum / static_cast<double>(n)),
                                                    Provenance::weighted_knn};
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (mask[j]) {
            out[j] = values[j];
            tags[j] = Provenance::observed;
        } else {
            out[j] = fill.value;
            tags[j] = fill.tag;
        }
    }
}

// ---------------------------------------------------------------- distance-based

DistanceEstimator::DistanceEstimator(Eigen::MatrixXd distances, Kernel kernel)
    : distances_(std::move(distances)), kernel_(kernel) {}

CellEstimate DistanceEstimator::estimate(std::span<const double> values,
                                         std::span<const std::uint8_t> mask, std::size_t target) const {
    std::vector<std::size_t> neighbors;
    std::vector<double> dist;
    neighbors.reserve(values.size());
    dist.reserve(values.size());
    const auto row = static_cast<Eigen::Index>(target);
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (mask[j] && j != target) {
            neighbors.push_back(j);
            dist.push_back(distances_(row, static_cast<Eigen::Index>(j)));
        }
    }
    if (neighbors.empty()) return {kNaN, Provenance::unimputable};
    std::vector<double> scratch(neighbors.size());
    return nw_estimate(kernel_, values, neighbors, dist, scratch);
}

void DistanceEstimator::impute_row(std::span<const double> values, std::span<const std::uint8_t> mask,
                                   std::span<double> out, std::span<Provenance> tags) const {
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (mask[j]) {
            out[j] = values[j];
            tags[j] = Provenance::observed;
        } else {
            const CellEstimate e = estimate(values, mask, j);
            out[j] = e.value;
            tags[j] = e.tag;
        }
    }
}

DistanceEstimator location_estimator(const FarmLayout& layout, Kernel kernel) {
    const auto n = static_cast<Eigen::Index>(layout.size());
    Eigen::MatrixXd d(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            d(i, j) = layout.geo_distance(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    return DistanceEstimator(std::move(d), kernel);
}

DistanceEstimator unweighted_graph_estimator(const FarmGraph& graph, Kernel kernel, std::size_t r) {
    if (graph.size() < kMinEmbeddableComponent) {
        throw ConfigError("the a-priori graph needs at least three sensors");
    }
    const FarmGraph g = graph.unweighted();
    const ComponentPartition parts = components(g);
    if (parts.count() != 1) {
        throw ConfigError(fmt::format("the a-priori graph must be connected; it has {} components",
                                      parts.count()));
    }
    const EmbeddingSet set = embed(g, parts, r);
    const Embedding& e = set.embeddings.front();
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXd d(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            d(i, j) = embedding_distance(e, static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    return DistanceEstimator(std::move(d), kernel);
}

// ---------------------------------------------------------------- weighted graph

WeightedGraphEstimator::WeightedGraphEstimator(const FarmGraph& graph, Kernel kernel, std::size_t r,
                                               double weight_floor)
    : graph_(graph.unweighted()),
      kernel_(kernel),
      r_(r),
      weight_floor_(weight_floor),
      fallback_(unweighted_graph_estimator(graph, kernel, r)) {
    if (r == 0) throw InputError("embedding dimension must be at least 1");
    if (weight_floor < 0.0) throw InputError("weight floor must be non-negative");
}

std::vector<std::optional<double>> WeightedGraphEstimator::revealed(
    std::span<const double> values, std::span<const std::uint8_t> mask) const {
    const auto& edges = graph_.edges();
    std::vector<std::optional<double>> out(edges.size());
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const auto [a, b] = edges[k];
        if (mask[a] && mask[b]) out[k] = 1.0 - std::abs(values[a] - values[b]);
    }
    return out;
}

std::vector<double> WeightedGraphEstimator::edge_weights(std::span<const double> values,
                                                         std::span<const std::uint8_t> mask,
                                                         std::span<const double> guesses) const {
    const auto& edges = graph_.edges();
    if (guesses.size() != edges.size()) throw InputError("guess count does not match edge count");
    std::vector<double> out(edges.size());
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const auto [a, b] = edges[k];
        out[k] = (mask[a] && mask[b]) ? 1.0 - std::abs(values[a] - values[b]) : guesses[k];
    }
    return out;
}

void WeightedGraphEstimator::impute_component(std::span<const double> values,
                                              std::span<const std::uint8_t> mask,
                                              std::span<const std::size_t> members,
                                              const Eigen::MatrixXd& adjacency,
                                              std::span<const std::size_t> targets,
                                              std::span<double> out,
                                              std::span<Provenance> tags) const {
    // `mask` already excludes every target.
    std::vector<std::size_t> observed_rows;
    for (std::size_t k = 0; k < members.size(); ++k) {
        if (mask[members[k]]) observed_rows.push_back(k);
    }

    if (observed_rows.empty()) {
        for (std::size_t target : targets) {
            CellEstimate e = fallback_.estimate(values, mask, target);
            if (e.tag != Provenance::unimputable) e.tag = Provenance::unweighted_fallback;
            out[target] = e.value;
            tags[target] = e.tag;
        }
        return;
    }

    if (members.size() < kMinEmbeddableComponent) {
        // Two sensors, one of them observed.
        const double v = values[members[observed_rows.front()]];
        for (std::size_t target : targets) {
            out[target] = v;
            tags[target] = Provenance::small_component_copy;
        }
        return;
    }

    const auto m = static_cast<Eigen::Index>(members.size());
    Eigen::MatrixXd sub(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            sub(i, j) = adjacency(static_cast<Eigen::Index>(members[static_cast<std::size_t>(i)]),
                                  static_cast<Eigen::Index>(members[static_cast<std::size_t>(j)]));
    const Eigen::MatrixXd coords = eigenmap_coordinates(sub, r_);

    std::vector<std::size_t> neighbors(observed_rows.size());
    for (std::size_t k = 0; k < observed_rows.size(); ++k) neighbors[k] = members[observed_rows[k]];
    std::vector<double> dist(observed_rows.size());
    std::vector<double> scratch(observed_rows.size());
    for (std::size_t target : targets) {
        const auto row = static_cast<Eigen::Index>(
            std::lower_bound(members.begin(), members.end(), target) - members.begin());
        for (std::size_t k = 0; k < observed_rows.size(); ++k) {
            dist[k] = (coords.row(row) - coords.row(static_cast<Eigen::Index>(observed_rows[k]))).norm();
        }
        const CellEstimate e = nw_estimate(kernel_, values, neighbors, dist, scratch);
        out[target] = e.value;
        tags[target] = e.tag;
    }
}

namespace {

Eigen::MatrixXd row_adjacency(const FarmGraph& graph, std::span<const double> weights, double floor) {
    const auto n = static_cast<Eigen::Index>(graph.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    const auto& edges = graph.edges();
    for (std::size_t k = 0; k < edges.size(); ++k) {
        if (weights[k] > floor) {
            const auto i = static_cast<Eigen::Index>(edges[k].a);
            const auto j = static_cast<Eigen::Index>(edges[k].b);
            a(i, j) = weights[k];
            a(j, i) = weights[k];
        }
    }
    return a;
}

}  // namespace

CellEstimate WeightedGraphEstimator::estimate(std::span<const double> values,
                                              std::span<const std::uint8_t> mask, std::size_t target,
                                              std::span<const double> edge_weights) const {
    const std::size_t n = graph_.size();
    std::vector<std::uint8_t> hidden(mask.begin(), mask.end());
    hidden[target] = 0;
    if (std::none_of(hidden.begin(), hidden.end(), [](std::uint8_t m) { return m != 0; })) {
        return {kNaN, Provenance::unimputable};
    }
    const ComponentPartition parts = components(n, graph_.edges(), edge_weights, weight_floor_);
    const Eigen::MatrixXd adjacency = row_adjacency(graph_, edge_weights, weight_floor_);
    std::vector<double> out(n, kNaN);
    std::vector<Provenance> tags(n, Provenance::unimputable);
    const std::size_t targets[] = {target};
    impute_component(values, hidden, parts.members(static_cast<std::size_t>(parts.component_of(target))),
                     adjacency, targets, out, tags);
    return {out[target], tags[target]};
}

void WeightedGraphEstimator::impute_row(std::span<const double> values,
                                        std::span<const std::uint8_t> mask,
                                        std::span<const double> edge_weights, std::span<double> out,
                                        std::span<Provenance> tags) const {
    const std::size_t n = graph_.size();
    std::size_t observed = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (mask[j]) {
            out[j] = values[j];
            tags[j] = Provenance::observed;
            ++observed;
        } else {
            out[j] = kNaN;
            tags[j] = Provenance::unimputable;
        }
    }
    if (observed == n || observed == 0) return;

    const ComponentPartition parts = components(n, graph_.edges(), edge_weights, weight_floor_);
    const Eigen::MatrixXd adjacency = row_adjacency(graph_, edge_weights, weight_floor_);
    for (std::size_t c = 0; c < parts.count(); ++c) {
        const auto& members = parts.members(c);
        std::vector<std::size_t> targets;
        for (std::size_t node : members) {
            if (!mask[node]) targets.push_back(node);
        }
        if (!targets.empty()) impute_component(values, mask, members, adjacency, targets, out, tags);
    }
}

// ---------------------------------------------------------------- panel drivers

namespace {

template <class RowFn>
ImputationResult for_each_row_parallel(const Panel& panel, RowFn&& fn) {
    ImputationResult res(panel.rows(), panel.sensors());
    const auto rows = static_cast<std::ptrdiff_t>(panel.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t t = 0; t < rows; ++t) {
        const auto row = static_cast<std::size_t>(t);
        fn(panel.row(row), panel.mask_row(row), res.row(row), res.tags(row));
    }
    return res;
}

}  // namespace

ImputationResult impute_naive(const Panel& panel) {
    const NaiveEstimator est;
    return for_each_row_parallel(panel, [&](auto v, auto m, auto out, auto tags) {
        est.impute_row(v, m, out, tags);
    });
}

ImputationResult impute_location(const Panel& panel, const FarmLayout& layout, Kernel kernel) {
    if (layout.size() != panel.sensors()) throw InputError("layout and panel sensor counts differ");
    const DistanceEstimator est = location_estimator(layout, kernel);
    return for_each_row_parallel(panel, [&](auto v, auto m, auto out, auto tags) {
        est.impute_row(v, m, out, tags);
    });
}

ImputationResult impute_unweighted_graph(const Panel& panel, const FarmGraph& graph, Kernel kernel,
                                         std::size_t r) {
    if (graph.size() != panel.sensors()) throw InputError("graph and panel sensor counts differ");
    const DistanceEstimator est = unweighted_graph_estimator(graph, kernel, r);
    return for_each_row_parallel(panel, [&](auto v, auto m, auto out, auto tags) {
        est.impute_row(v, m, out, tags);
    });
}

ImputationResult impute_weighted_graph(const Panel& panel, const FarmGraph& graph, Kernel kernel,
                                       std::size_t r, SimilarityTracker& tracker, double weight_floor) {
    if (graph.size() != panel.sensors()) throw InputError("graph and panel sensor counts differ");
    if (tracker.edges() != graph.edges()) throw InputError("tracker edges do not match the graph");
    const WeightedGraphEstimator est(graph, kernel, r, weight_floor);
    ImputationResult res(panel.rows(), panel.sensors());
    for (std::size_t t = 0; t < panel.rows(); ++t) {
        const auto values = panel.row(t);
        const auto mask = panel.mask_row(t);
        const std::vector<double> weights = est.edge_weights(values, mask, tracker.guesses());
        est.impute_row(values, mask, weights, res.row(t), res.tags(t));
        tracker.update(est.revealed(values, mask));
    }
    return res;
}

ImputationResult impute(const Panel& panel, const FarmLayout& layout, const FarmGraph& graph,
                        const EstimatorConfig& config, SimilarityTracker* tracker) {
    switch (config.method) {
        case Method::naive: return impute_naive(panel);
        case Method::location: return impute_location(panel, layout, config.kernel);
        case Method::unweighted_graph:
            return impute_unweighted_graph(panel, graph, config.kernel, config.r);
        case Method::weighted_graph: {
            if (tracker) {
                return impute_weighted_graph(panel, graph, config.kernel, config.r, *tracker,
                                             config.weight_floor);
            }
            SimilarityTracker local(graph.edges(), config.learning_rate);
            return impute_weighted_graph(panel, graph, config.kernel, config.r, local,
                                         config.weight_floor);
        }
    }
    throw ConfigError("unsupported method");
}

// ---------------------------------------------------------------- sampling

std::size_t WeightedSampler::draw_index(std::span<const double> weights) {
    double total = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        if (weights[j] > 0.0) {
            total += weights[j];
            last_positive = j;
        }
    }
    if (!(total > 0.0)) throw InputError("sampling weights must have positive mass");
    const double u = std::uniform_real_distribution<double>(0.0, total)(rng_);
    double cumulative = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        if (weights[j] <= 0.0) continue;
        cumulative += weights[j];
        if (u < cumulative) return j;
    }
    return last_positive;
}

double WeightedSampler::draw(const WeightVector& weights, std::span<const double> observed) {
    if (observed.size() != weights.weights.size()) {
        throw InputError("observed values do not cover the weight support");
    }
    return observed[draw_index(weights.weights)];
}

double impute_sampling(const WeightVector& weights, std::span<const double> observed,
                       std::uint64_t rng_seed) {
    WeightedSampler sampler(rng_seed);
    return sampler.draw(weights, observed);
}

}  // namespace spimpute
