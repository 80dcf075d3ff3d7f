#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace spimpute {

struct Sensor {
    std::string id;
    double latitude = 0.0;
    double longitude = 0.0;
    double nominal_capacity = 1.0;
};

/// Ordered set of sensors. The order is the node order used by every matrix
/// and panel column for the whole run.
class FarmLayout {
public:
    FarmLayout() = default;
    explicit FarmLayout(std::vector<Sensor> sensors);

    std::size_t size() const { return sensors_.size(); }
    const std::vector<Sensor>& sensors() const { return sensors_; }
    const Sensor& operator[](std::size_t i) const { return sensors_[i]; }

    std::optional<std::size_t> find(const std::string& id) const;
    /// Throws LookupError for an unknown id.
    std::size_t index_of(const std::string& id) const;

    /// Euclidean distance over (latitude, longitude).
    double geo_distance(std::size_t i, std::size_t j) const;

private:
    std::vector<Sensor> sensors_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Undirected edge between node indices, stored with a < b.
struct Edge {
    std::size_t a = 0;
    std::size_t b = 0;
    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct LaplacianPair {
    Eigen::MatrixXd laplacian;
    Eigen::VectorXd degree;
};

class FarmGraph {
public:
    FarmGraph() = default;
    /// Edges are normalized (a < b), sorted and deduplicated. Throws InputError
    /// on self-loops or out-of-range indices.
    FarmGraph(std::vector<std::string> node_ids, std::vector<Edge> edges);

    std::size_t size() const { return node_ids_.size(); }
    const std::vector<std::string>& node_ids() const { return node_ids_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<double>& weights() const { return weights_; }
    bool weighted() const { return weighted_; }

    /// Same topology with per-edge weights in [0,1], aligned with edges().
    FarmGraph with_weights(std::span<const double> weights) const;
    FarmGraph unweighted() const;

    Eigen::MatrixXd adjacency() const;
    /// L = D - A with D[i] = sum_j A[j][i].
    LaplacianPair laplacian() const;
    std::vector<std::size_t> degrees() const;  // edge counts, ignoring weights

private:
    std::vector<std::string> node_ids_;
    std::vector<Edge> edges_;
    std::vector<double> weights_;
    bool weighted_ = false;
};

FarmGraph build_graph(const FarmLayout& layout,
                      std::span<const std::pair<std::string, std::string>> edge_list);

class ComponentPartition {
public:
    ComponentPartition() = default;
    explicit ComponentPartition(std::vector<int> assignment);

    std::size_t count() const { return members_.size(); }
    int component_of(std::size_t node) const { return assignment_[node]; }
    const std::vector<int>& assignment() const { return assignment_; }
    const std::vector<std::size_t>& members(std::size_t component) const {
        return members_[component];
    }
    std::vector<std::size_t> sizes() const;

private:
    std::vector<int> assignment_;
    std::vector<std::vector<std::size_t>> members_;
};

inline constexpr double kDefaultWeightFloor = 1e-12;

/// Connected components by union-find; edges with weight <= weight_floor are
/// treated as absent. Component indices follow the smallest member's node order.
ComponentPartition components(const FarmGraph& graph, double weight_floor = kDefaultWeightFloor);

/// Same as above for a topology with externally supplied per-edge weights.
ComponentPartition components(std::size_t node_count, std::span<const Edge> edges,
                              std::span<const double> weights, double weight_floor);

/// Proposes lattice-neighbor edges: pairs whose geographic distance is within
/// `tolerance` of the typical nearest-neighbor spacing (orthogonal) or of
/// sqrt(2) times it (diagonal, when enabled).
std::vector<std::pair<std::string, std::string>> propose_grid_edges(const FarmLayout& layout,
                                                                    bool diagonals = true,
                                                                    double tolerance = 0.05);

/// Regular rows x cols layout named A01, A02, ... with unit capacity.
FarmLayout grid_layout(std::size_t rows, std::size_t cols, double spacing = 1.0);

}  // namespace spimpute
