#pragma once

#include "spimpute/graph.hpp"
#include "spimpute/kernels.hpp"
#include "spimpute/online.hpp"
#include "spimpute/panel.hpp"
#include "spimpute/spectral.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace spimpute {

enum class Method { naive, location, unweighted_graph, weighted_graph };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

enum class Provenance : std::uint8_t {
    observed,
    weighted_knn,
    small_component_copy,
    uniform_fallback,
    unweighted_fallback,
    unimputable,
};

std::string_view to_string(Provenance p);

struct EstimatorConfig {
    Method method = Method::naive;
    Kernel kernel = Kernel::triweight;
    std::size_t r = 2;                  // graph methods only
    double learning_rate = kDefaultLearningRate;  // weighted_graph only
    double weight_floor = kDefaultWeightFloor;
};

struct CellEstimate {
    double value = 0.0;
    Provenance tag = Provenance::unimputable;
};

struct ImputationResult {
    std::size_t rows = 0;
    std::size_t sensors = 0;
    std::vector<double> filled;           // row-major; NaN where unimputable
    std::vector<Provenance> provenance;   // row-major

    ImputationResult() = default;
    ImputationResult(std::size_t t, std::size_t n);

    double at(std::size_t t, std::size_t i) const { return filled[t * sensors + i]; }
    Provenance tag(std::size_t t, std::size_t i) const { return provenance[t * sensors + i]; }
    std::span<double> row(std::size_t t) { return {filled.data() + t * sensors, sensors}; }
    std::span<Provenance> tags(std::size_t t) { return {provenance.data() + t * sensors, sensors}; }
};

/// Arithmetic mean of the observed entries of the row.
class NaiveEstimator {
public:
    CellEstimate estimate(std::span<const double> values, std::span<const std::uint8_t> mask,
                          std::size_t target) const;
    void impute_row(std::span<const double> values, std::span<const std::uint8_t> mask,
                    std::span<double> out, std::span<Provenance> tags) const;
};

/// Nadaraya-Watson estimate over all observed entries, using a fixed
/// sensor-to-sensor distance matrix (geographic or eigenmap).
class DistanceEstimator {
public:
    DistanceEstimator(Eigen::MatrixXd distances, Kernel kernel);

    CellEstimate estimate(std::span<const double> values, std::span<const std::uint8_t> mask,
                          std::size_t target) const;
    void impute_row(std::span<const double> values, std::span<const std::uint8_t> mask,
                    std::span<double> out, std::span<Provenance> tags) const;

    const Eigen::MatrixXd& distances() const { return distances_; }
    Kernel kernel() const { return kernel_; }

private:
    Eigen::MatrixXd distances_;
    Kernel kernel_;
};

DistanceEstimator location_estimator(const FarmLayout& layout, Kernel kernel);

/// Distances between eigenmap coordinates of the unweighted a-priori graph.
/// Throws ConfigError if the graph is disconnected or has fewer than 3 nodes.
DistanceEstimator unweighted_graph_estimator(const FarmGraph& graph, Kernel kernel, std::size_t r);

/// Per-timestep eigenmap imputation on the similarity-weighted graph.
class WeightedGraphEstimator {
public:
    WeightedGraphEstimator(const FarmGraph& graph, Kernel kernel, std::size_t r, double weight_floor);

    /// 1 - |x_i - x_j| where both endpoints are observed, nullopt elsewhere.
    std::vector<std::optional<double>> revealed(std::span<const double> values,
                                                std::span<const std::uint8_t> mask) const;
    /// Revealed similarity where available, otherwise the tracker guess.
    std::vector<double> edge_weights(std::span<const double> values, std::span<const std::uint8_t> mask,
                                     std::span<const double> guesses) const;

    CellEstimate estimate(std::span<const double> values, std::span<const std::uint8_t> mask,
                          std::size_t target, std::span<const double> edge_weights) const;
    void impute_row(std::span<const double> values, std::span<const std::uint8_t> mask,
                    std::span<const double> edge_weights, std::span<double> out,
                    std::span<Provenance> tags) const;

    const FarmGraph& graph() const { return graph_; }
    const DistanceEstimator& fallback() const { return fallback_; }

private:
    // Imputes the unobserved members of one component of the row's graph.
    void impute_component(std::span<const double> values, std::span<const std::uint8_t> mask,
                          std::span<const std::size_t> members, const Eigen::MatrixXd& adjacency,
                          std::span<const std::size_t> targets, std::span<double> out,
                          std::span<Provenance> tags) const;

    FarmGraph graph_;
    Kernel kernel_;
    std::size_t r_;
    double weight_floor_;
    DistanceEstimator fallback_;
};

ImputationResult impute_naive(const Panel& panel);
ImputationResult impute_location(const Panel& panel, const FarmLayout& layout, Kernel kernel);
ImputationResult impute_unweighted_graph(const Panel& panel, const FarmGraph& graph, Kernel kernel,
                                         std::size_t r);
/// Processes rows in order; the tracker plays its guesses for unrevealed
/// edges at each row and is updated after the row is imputed.
ImputationResult impute_weighted_graph(const Panel& panel, const FarmGraph& graph, Kernel kernel,
                                       std::size_t r, SimilarityTracker& tracker,
                                       double weight_floor = kDefaultWeightFloor);

/// Dispatches on config.method. A tracker is created from the graph when none is given.
ImputationResult impute(const Panel& panel, const FarmLayout& layout, const FarmGraph& graph,
                        const EstimatorConfig& config, SimilarityTracker* tracker = nullptr);

/// Draws observed[j] with probability weights[j].
class WeightedSampler {
public:
    explicit WeightedSampler(std::uint64_t seed) : rng_(seed) {}
    std::size_t draw_index(std::span<const double> weights);
    double draw(const WeightVector& weights, std::span<const double> observed);

private:
    std::mt19937_64 rng_;
};

/// Single draw from the weighted empirical measure of the neighbors.
double impute_sampling(const WeightVector& weights, std::span<const double> observed,
                       std::uint64_t rng_seed);

}  // namespace spimpute
