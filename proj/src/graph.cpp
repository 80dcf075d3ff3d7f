#include "spimpute/graph.hpp"

#include "spimpute/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace spimpute {

FarmLayout::FarmLayout(std::vector<Sensor> sensors) : sensors_(std::move(sensors)) {
    for (std::size_t i = 0; i < sensors_.size(); ++i) {
        const auto& s = sensors_[i];
        if (s.id.empty()) {
            throw InputError(fmt::format("sensor #{} has an empty id", i + 1));
        }
        if (!(s.nominal_capacity > 0.0) || !std::isfinite(s.nominal_capacity)) {
            throw InputError(fmt::format("sensor '{}' has non-positive nominal capacity", s.id));
        }
        if (!std::isfinite(s.latitude) || !std::isfinite(s.longitude)) {
            throw InputError(fmt::format("sensor '{}' has non-finite coordinates", s.id));
        }
        if (!index_.emplace(s.id, i).second) {
            throw InputError(fmt::format("duplicate sensor id '{}'", s.id));
        }
    }
}

std::optional<std::size_t> FarmLayout::find(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t FarmLayout::index_of(const std::string& id) const {
    auto idx = find(id);
    if (!idx) throw LookupError(fmt::format("unknown sensor id '{}'", id));
    return *idx;
}

double FarmLayout::geo_distance(std::size_t i, std::size_t j) const {
    const double dlat = sensors_[i].latitude - sensors_[j].latitude;
    const double dlon = sensors_[i].longitude - sensors_[j].longitude;
    return std::sqrt(dlat * dlat + dlon * dlon);
}

FarmGraph::FarmGraph(std::vector<std::string> node_ids, std::vector<Edge> edges)
    : node_ids_(std::move(node_ids)) {
    const std::size_t n = node_ids_.size();
    for (auto& e : edges) {
        if (e.a >= n || e.b >= n) throw InputError("edge endpoint out of range");
        if (e.a == e.b) {
            throw InputError(fmt::format("self-loop on sensor '{}'", node_ids_[e.a]));
        }
        if (e.a > e.b) std::swap(e.a, e.b);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);
    weights_.assign(edges_.size(), 1.0);
}

FarmGraph FarmGraph::with_weights(std::span<const double> weights) const {
    if (weights.size() != edges_.size()) {
        throw InputError("edge weight count does not match edge count");
    }
    for (double w : weights) {
        if (!(w >= 0.0 && w <= 1.0)) throw InputError("edge weight outside [0,1]");
    }
    FarmGraph g = *this;
    g.weights_.assign(weights.begin(), weights.end());
    g.weighted_ = true;
    return g;
}

FarmGraph FarmGraph::unweighted() const {
    FarmGraph g = *this;
    g.weights_.assign(edges_.size(), 1.0);
    g.weighted_ = false;
    return g;
}

Eigen::MatrixXd FarmGraph::adjacency() const {
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < edges_.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(edges_[k].a);
        const auto j = static_cast<Eigen::Index>(edges_[k].b);
        a(i, j) = weights_[k];
        a(j, i) = weights_[k];
    }
    return a;
}

LaplacianPair FarmGraph::laplacian() const {
    Eigen::MatrixXd a = adjacency();
    Eigen::VectorXd d = a.colwise().sum().transpose();
    Eigen::MatrixXd l = -a;
    l.diagonal() = d;
    return {std::move(l), std::move(d)};
}

std::vector<std::size_t> FarmGraph::degrees() const {
    std::vector<std::size_t> deg(size(), 0);
    for (const auto& e : edges_) {
        ++deg[e.a];
        ++deg[e.b];
    }
    return deg;
}

FarmGraph build_graph(const FarmLayout& layout,
                      std::span<const std::pair<std::string, std::string>> edge_list) {
    std::vector<std::string> ids;
    ids.reserve(layout.size());
    for (const auto& s : layout.sensors()) ids.push_back(s.id);

    std::vector<Edge> edges;
    edges.reserve(edge_list.size());
    for (const auto& [from, to] : edge_list) {
        auto a = layout.find(from);
        auto b = layout.find(to);
        if (!a) throw InputError(fmt::format("edge references unknown sensor '{}'", from));
        if (!b) throw InputError(fmt::format("edge references unknown sensor '{}'", to));
        if (*a == *b) throw InputError(fmt::format("self-loop on sensor '{}'", from));
        edges.push_back({*a, *b});
    }
    return FarmGraph(std::move(ids), std::move(edges));
}

ComponentPartition::ComponentPartition(std::vector<int> assignment)
    : assignment_(std::move(assignment)) {
    int count = 0;
    for (int c : assignment_) count = std::max(count, c + 1);
    members_.resize(static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < assignment_.size(); ++i) {
        members_[static_cast<std::size_t>(assignment_[i])].push_back(i);
    }
}

std::vector<std::size_t> ComponentPartition::sizes() const {
    std::vector<std::size_t> out;
    out.reserve(members_.size());
    for (const auto& m : members_) out.push_back(m.size());
    return out;
}

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t x, std::size_t y) {
        x = find(x);
        y = find(y);
        if (x == y) return;
        if (rank_[x] < rank_[y]) std::swap(x, y);
        parent_[y] = x;
        if (rank_[x] == rank_[y]) ++rank_[x];
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<unsigned char> rank_;
};

}  // namespace

ComponentPartition components(std::size_t node_count, std::span<const Edge> edges,
                              std::span<const double> weights, double weight_floor) {
    if (weight_floor < 0.0) throw InputError("weight floor must be non-negative");
    DisjointSets sets(node_count);
    for (std::size_t k = 0; k < edges.size(); ++k) {
        if (weights[k] > weight_floor) sets.unite(edges[k].a, edges[k].b);
    }
    // Label roots in order of first appearance, i.e. by smallest member.
    std::vector<int> label_of_root(node_count, -1);
    std::vector<int> assignment(node_count, -1);
    int next = 0;
    for (std::size_t i = 0; i < node_count; ++i) {
        const std::size_t root = sets.find(i);
        if (label_of_root[root] < 0) label_of_root[root] = next++;
        assignment[i] = label_of_root[root];
    }
    return ComponentPartition(std::move(assignment));
}

ComponentPartition components(const FarmGraph& graph, double weight_floor) {
    return components(graph.size(), graph.edges(), graph.weights(), weight_floor);
}

std::vector<std::pair<std::string, std::string>> propose_grid_edges(const FarmLayout& layout,
                                                                    bool diagonals,
                                                                    double tolerance) {
    const std::size_t n = layout.size();
    std::vector<std::pair<std::string, std::string>> out;
    if (n < 2) return out;

    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) nearest[i] = std::min(nearest[i], layout.geo_distance(i, j));
        }
    }
    std::nth_element(nearest.begin(), nearest.begin() + static_cast<std::ptrdiff_t>(n / 2),
                     nearest.end());
    const double spacing = nearest[n / 2];

    const double limit = (diagonals ? std::sqrt(2.0) : 1.0) * spacing * (1.0 + tolerance);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (layout.geo_distance(i, j) <= limit) {
                out.emplace_back(layout[i].id, layout[j].id);
            }
        }
    }
    return out;
}

FarmLayout grid_layout(std::size_t rows, std::size_t cols, double spacing) {
    std::vector<Sensor> sensors;
    sensors.reserve(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            std::string id = rows <= 26
                                 ? fmt::format("{}{:02}", static_cast<char>('A' + r), c + 1)
                                 : fmt::format("R{:03}C{:03}", r + 1, c + 1);
            sensors.push_back({std::move(id), static_cast<double>(r) * spacing,
                               static_cast<double>(c) * spacing, 1.0});
        }
    }
    return FarmLayout(std::move(sensors));
}

}  // namespace spimpute
