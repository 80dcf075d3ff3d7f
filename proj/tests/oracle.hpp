#pragma once

// Direct-formula reimplementation of every estimator, written without the
// library's code paths: explicit dense matrices, Eigen's Cholesky-based
// generalized solver, breadth-first components and a literal OGD recursion.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

inline double kernel(const std::string& name, double u) {
    const bool in = u <= 1.0;
    if (name == "naive") return in ? 1.0 : 0.0;
    if (name == "gaussian") return std::exp(-u * u);
    if (name == "epanechnikov") return in ? 1.0 - u * u : 0.0;
    if (name == "triangular") return in ? 1.0 - u : 0.0;
    if (name == "quartic") return in ? std::pow(1.0 - u * u, 2) : 0.0;
    if (name == "triweight") return in ? std::pow(1.0 - u * u, 3) : 0.0;
    if (name == "tricube") return in ? std::pow(1.0 - u * u * u, 3) : 0.0;
    return std::numeric_limits<double>::quiet_NaN();
}

inline const std::vector<std::string>& kernel_names() {
    static const std::vector<std::string> names{"naive",   "gaussian",  "epanechnikov", "triangular",
                                                "quartic", "triweight", "tricube"};
    return names;
}

/// Nadaraya-Watson estimate of one value from (distance, value) pairs.
inline double nw(const std::string& k, const std::vector<double>& dist, const std::vector<double>& vals) {
    double h = 0.0;
    for (double d : dist) h = std::max(h, d);
    std::vector<double> w(dist.size(), 0.0);
    double total = 0.0;
    if (h > 0.0) {
        for (std::size_t j = 0; j < dist.size(); ++j) {
            w[j] = kernel(k, dist[j] / h);
            total += w[j];
        }
    }
    if (h == 0.0 || total < 1e-12) {
        std::fill(w.begin(), w.end(), 1.0);
        total = static_cast<double>(w.size());
    }
    double est = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) est += w[j] / total * vals[j];
    return std::clamp(est, 0.0, 1.0);
}

inline double mean_of_observed(const std::vector<double>& row, const std::vector<bool>& obs) {
    double s = 0.0;
    int n = 0;
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (obs[j]) {
            s += row[j];
            ++n;
        }
    }
    return s / n;
}

/// Eigenmap coordinates (rows = nodes) of a connected weighted graph.
inline Eigen::MatrixXd eigenmap(const Eigen::MatrixXd& adj, std::size_t r) {
    const Eigen::Index m = adj.rows();
    Eigen::MatrixXd deg = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) deg(i, i) = adj.col(i).sum();
    const Eigen::MatrixXd lap = deg - adj;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(lap, deg);
    const Eigen::VectorXd lam = es.eigenvalues();
    std::size_t keep = std::min<std::size_t>(r, static_cast<std::size_t>(m) - 1);
    while (keep + 1 < static_cast<std::size_t>(m) &&
           lam(static_cast<Eigen::Index>(keep + 1)) - lam(static_cast<Eigen::Index>(keep)) <= 1e-9) {
        ++keep;
    }
    return es.eigenvectors().middleCols(1, static_cast<Eigen::Index>(keep));
}

inline std::vector<int> bfs_components(const Eigen::MatrixXd& adj) {
    const auto n = static_cast<std::size_t>(adj.rows());
    std::vector<int> comp(n, -1);
    int next = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        std::queue<std::size_t> q;
        q.push(s);
        comp[s] = next;
        while (!q.empty()) {
            const std::size_t u = q.front();
            q.pop();
            for (std::size_t v = 0; v < n; ++v) {
                if (adj(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) > 0.0 && comp[v] < 0) {
                    comp[v] = next;
                    q.push(v);
                }
            }
        }
        ++next;
    }
    return comp;
}

struct Farm {
    std::vector<std::pair<double, double>> coords;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
};

inline Eigen::MatrixXd unit_adjacency(const Farm& f) {
    const auto n = static_cast<Eigen::Index>(f.coords.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (auto [i, j] : f.edges) {
        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
        a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = 1.0;
    }
    return a;
}

inline double location(const Farm& f, const std::vector<double>& row, const std::vector<bool>& obs, std::size_t target,
                       const std::string& k) {
    std::vector<double> d, v;
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (!obs[j] || j == target) continue;
        const double dx = f.coords[target].first - f.coords[j].first;
        const double dy = f.coords[target].second - f.coords[j].second;
        d.push_back(std::sqrt(dx * dx + dy * dy));
        v.push_back(row[j]);
    }
    return nw(k, d, v);
}

inline double embedded(const Eigen::MatrixXd& z, const std::vector<std::size_t>& nodes, const std::vector<double>& row,
                       const std::vector<bool>& obs, std::size_t target_row, const std::string& k) {
    std::vector<double> d, v;
    for (std::size_t a = 0; a < nodes.size(); ++a) {
        if (!obs[nodes[a]] || a == target_row) continue;
        d.push_back((z.row(static_cast<Eigen::Index>(target_row)) - z.row(static_cast<Eigen::Index>(a))).norm());
        v.push_back(row[nodes[a]]);
    }
    return nw(k, d, v);
}

inline double unweighted(const Farm& f, const std::vector<double>& row, const std::vector<bool>& obs,
                         std::size_t target, const std::string& k, std::size_t r) {
    const Eigen::MatrixXd z = eigenmap(unit_adjacency(f), r);
    std::vector<std::size_t> nodes(row.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) nodes[j] = j;
    return embedded(z, nodes, row, obs, target, k);
}

/// Per-edge similarity guesses after playing `rows` rounds of lazy OGD,
/// starting from guess = y = 1.
inline std::vector<double> ogd_guesses(const Farm& f, const std::vector<std::vector<double>>& rows,
                                       const std::vector<std::vector<bool>>& obs, double eta) {
    std::vector<double> y(f.edges.size(), 1.0), g(f.edges.size(), 1.0);
    for (std::size_t t = 0; t < rows.size(); ++t) {
        for (std::size_t e = 0; e < f.edges.size(); ++e) {
            const auto [i, j] = f.edges[e];
            if (!obs[t][i] || !obs[t][j]) continue;
            const double s = 1.0 - std::abs(rows[t][i] - rows[t][j]);
            const double grad = -2.0 * (s - g[e]);
            y[e] = y[e] - eta * grad;
            g[e] = std::min(1.0, std::max(0.0, y[e]));
        }
    }
    return g;
}

/// Weighted-graph estimate of `target` (hidden) given the row and the
/// tracker guesses for edges with an unobserved endpoint.
inline double weighted(const Farm& f, const std::vector<double>& row, std::vector<bool> obs, std::size_t target,
                       const std::string& k, std::size_t r, const std::vector<double>& guesses, double floor = 1e-12) {
    obs[target] = false;
    const auto n = static_cast<Eigen::Index>(row.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t e = 0; e < f.edges.size(); ++e) {
        const auto [i, j] = f.edges[e];
        const double w = (obs[i] && obs[j]) ? 1.0 - std::abs(row[i] - row[j]) : guesses[e];
        if (w <= floor) continue;
        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w;
        a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = w;
    }
    const std::vector<int> comp = bfs_components(a);
    std::vector<std::size_t> nodes;
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (comp[j] == comp[target]) nodes.push_back(j);
    }
    std::size_t observed = 0;
    for (std::size_t j : nodes) observed += obs[j] ? 1 : 0;
    if (observed == 0) return unweighted(f, row, obs, target, k, r);
    if (nodes.size() == 2) return row[nodes[0] == target ? nodes[1] : nodes[0]];
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(nodes.size()), static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t p = 0; p < nodes.size(); ++p)
        for (std::size_t q = 0; q < nodes.size(); ++q)
            sub(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) =
                a(static_cast<Eigen::Index>(nodes[p]), static_cast<Eigen::Index>(nodes[q]));
    const Eigen::MatrixXd z = eigenmap(sub, r);
    const auto pos = static_cast<std::size_t>(std::find(nodes.begin(), nodes.end(), target) - nodes.begin());
    return embedded(z, nodes, row, obs, pos, k);
}

}  // namespace oracle
