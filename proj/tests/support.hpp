#pragma once

#include "oracle.hpp"
#include "spimpute/graph.hpp"
#include "spimpute/panel.hpp"

#include <fmt/format.h>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace support {

/// Random farm of n sensors with a connected edge set: a random spanning
/// tree plus extra edges. Coordinates are integers so some distances tie.
inline oracle::Farm random_farm(std::size_t n, std::mt19937_64& rng, double extra_edge_p = 0.3) {
    oracle::Farm f;
    std::uniform_int_distribution<int> coord(0, 9);
    for (std::size_t i = 0; i < n; ++i) f.coords.emplace_back(coord(rng), coord(rng));
    for (std::size_t i = 1; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        f.edges.emplace_back(pick(rng), i);
    }
    std::bernoulli_distribution extra(extra_edge_p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool present = std::find(f.edges.begin(), f.edges.end(), std::pair{i, j}) != f.edges.end() ||
                                 std::find(f.edges.begin(), f.edges.end(), std::pair{j, i}) != f.edges.end();
            if (!present && extra(rng)) f.edges.emplace_back(i, j);
        }
    return f;
}

inline std::string node_id(std::size_t i) { return fmt::format("s{}", i); }

inline spimpute::FarmLayout layout_of(const oracle::Farm& f) {
    std::vector<spimpute::Sensor> sensors;
    for (std::size_t i = 0; i < f.coords.size(); ++i) {
        sensors.push_back({node_id(i), f.coords[i].first, f.coords[i].second, 1.0});
    }
    return spimpute::FarmLayout(std::move(sensors));
}

inline spimpute::FarmGraph graph_of(const oracle::Farm& f) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < f.coords.size(); ++i) ids.push_back(node_id(i));
    std::vector<spimpute::Edge> edges;
    for (auto [a, b] : f.edges) edges.push_back({std::min(a, b), std::max(a, b)});
    return spimpute::FarmGraph(std::move(ids), std::move(edges));
}

inline std::vector<std::string> stamps(std::size_t t) {
    std::vector<std::string> out;
    for (std::size_t k = 0; k < t; ++k) out.push_back(std::to_string(k));
    return out;
}

/// Uniform values with each cell observed with probability `observed_p`.
inline spimpute::Panel random_panel(std::size_t t, std::size_t n, double observed_p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::bernoulli_distribution obs(observed_p);
    std::vector<double> values(t * n);
    std::vector<std::uint8_t> mask(t * n);
    for (std::size_t k = 0; k < t * n; ++k) {
        values[k] = u(rng);
        mask[k] = obs(rng) ? 1 : 0;
    }
    return spimpute::Panel(stamps(t), n, std::move(values), std::move(mask));
}

}  // namespace support
