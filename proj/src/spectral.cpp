#include "spimpute/spectral.hpp"

#include "spimpute/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace spimpute {

namespace {

Eigen::VectorXd inverse_sqrt_degree(const Eigen::VectorXd& degree) {
    Eigen::VectorXd out(degree.size());
    for (Eigen::Index i = 0; i < degree.size(); ++i) {
        if (!(degree[i] > 0.0)) {
            throw DegenerateDegreeError(
                fmt::format("degree of node {} is zero; split components before solving", i));
        }
        out[i] = 1.0 / std::sqrt(degree[i]);
    }
    return out;
}

// Orthonormalizes the columns of `block` against `basis` and among themselves
// (two Gram-Schmidt passes). Numerically dependent columns are dropped.
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& basis, Eigen::MatrixXd block) {
    for (int pass = 0; pass < 2; ++pass) {
        if (basis.cols() > 0) block -= basis * (basis.transpose() * block);
    }
    Eigen::MatrixXd out(block.rows(), 0);
    for (Eigen::Index c = 0; c < block.cols(); ++c) {
        Eigen::VectorXd v = block.col(c);
        const double original = v.norm();
        if (original == 0.0) continue;
        for (int pass = 0; pass < 2; ++pass) {
            if (basis.cols() > 0) v -= basis * (basis.transpose() * v);
            if (out.cols() > 0) v -= out * (out.transpose() * v);
        }
        const double norm = v.norm();
        if (norm <= 1e-10 * original) continue;
        out.conservativeResize(Eigen::NoChange, out.cols() + 1);
        out.col(out.cols() - 1) = v / norm;
    }
    return out;
}

// Smallest eigenpairs of the symmetric operator `m` by block Krylov expansion
// with Rayleigh-Ritz extraction. Converges to the exact answer once the basis
// spans the whole space.
EigenSolution krylov_smallest(const Eigen::SparseMatrix<double>& m, const Eigen::VectorXd& seed_vector,
                              std::size_t count) {
    const Eigen::Index n = m.rows();
    const Eigen::Index k = std::min<Eigen::Index>(static_cast<Eigen::Index>(count), n);
    const Eigen::Index block = std::min<Eigen::Index>(n, std::max<Eigen::Index>(k + 2, 6));
    constexpr double kResidualTolerance = 1e-11;

    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto random_block = [&](Eigen::Index cols) {
        Eigen::MatrixXd x(n, cols);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < n; ++i) x(i, j) = normal(rng);
        return x;
    };

    Eigen::MatrixXd start = random_block(block);
    start.col(0) = seed_vector;
    Eigen::MatrixXd basis = orthonormalize(Eigen::MatrixXd(n, 0), start);
    Eigen::MatrixXd image = m * basis;
    Eigen::Index last_begin = 0;

    while (true) {
        if (basis.cols() >= k) {
            Eigen::MatrixXd h = basis.transpose() * image;
            h = 0.5 * (h + h.transpose());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(h);
            Eigen::MatrixXd y = small.eigenvectors().leftCols(k);
            Eigen::MatrixXd ritz = basis * y;
            Eigen::VectorXd theta = small.eigenvalues().head(k);
            Eigen::MatrixXd residual = image * y - ritz * theta.asDiagonal();
            const bool converged = residual.colwise().norm().maxCoeff() <= kResidualTolerance;
            if (converged || basis.cols() == n) return {theta, ritz};
        }
        Eigen::MatrixXd next =
            orthonormalize(basis, image.middleCols(last_begin, basis.cols() - last_begin));
        if (next.cols() == 0) {
            // Invariant subspace reached early; continue from fresh directions.
            next = orthonormalize(basis, random_block(std::min(block, n - basis.cols())));
        }
        last_begin = basis.cols();
        basis.conservativeResize(Eigen::NoChange, basis.cols() + next.cols());
        basis.rightCols(next.cols()) = next;
        image.conservativeResize(Eigen::NoChange, image.cols() + next.cols());
        image.rightCols(next.cols()) = m * next;
    }
}

}  // namespace

void apply_sign_convention(Eigen::MatrixXd& vectors) {
    for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
        auto col = vectors.col(c);
        const double peak = col.cwiseAbs().maxCoeff();
        if (peak == 0.0) continue;
        for (Eigen::Index i = 0; i < col.size(); ++i) {
            if (std::abs(col[i]) >= peak * (1.0 - 1e-10)) {
                if (col[i] < 0.0) col = -col;
                break;
            }
        }
    }
}

EigenSolution solve_generalized(const Eigen::MatrixXd& laplacian, const Eigen::VectorXd& degree) {
    const Eigen::VectorXd scale = inverse_sqrt_degree(degree);
    Eigen::MatrixXd reduced = scale.asDiagonal() * laplacian * scale.asDiagonal();
    reduced = 0.5 * (reduced + reduced.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(reduced);
    if (solver.info() != Eigen::Success) throw Error("symmetric eigensolver did not converge");
    EigenSolution out{solver.eigenvalues(), scale.asDiagonal() * solver.eigenvectors()};
    apply_sign_convention(out.eigenvectors);
    return out;
}

EigenSolution solve_generalized_smallest(const Eigen::SparseMatrix<double>& laplacian,
                                         const Eigen::VectorXd& degree, std::size_t count,
                                         SolverKind kind) {
    const auto n = static_cast<std::size_t>(laplacian.rows());
    count = std::min(count, n);
    const bool dense = kind == SolverKind::dense ||
                       (kind == SolverKind::automatic && n <= kDenseSolverLimit);
    if (dense) {
        EigenSolution full = solve_generalized(Eigen::MatrixXd(laplacian), degree);
        const auto k = static_cast<Eigen::Index>(count);
        return {full.eigenvalues.head(k), full.eigenvectors.leftCols(k)};
    }
    const Eigen::VectorXd scale = inverse_sqrt_degree(degree);
    Eigen::SparseMatrix<double> reduced = scale.asDiagonal() * laplacian * scale.asDiagonal();
    // D^1/2 1 spans the null space of a connected component; seeding with it
    // pins lambda_0 in the first block.
    const Eigen::VectorXd seed = degree.cwiseSqrt();
    EigenSolution out = krylov_smallest(reduced, seed, count);
    out.eigenvectors = scale.asDiagonal() * out.eigenvectors;
    apply_sign_convention(out.eigenvectors);
    return out;
}

std::size_t effective_dimension(const Eigen::VectorXd& eigenvalues, std::size_t r) {
    const auto m = static_cast<std::size_t>(eigenvalues.size());
    if (m == 0) return 0;
    std::size_t r_eff = std::min(r, m - 1);
    if (r_eff == 0) return 0;
    while (r_eff + 1 < m &&
           eigenvalues[static_cast<Eigen::Index>(r_eff + 1)] -
                   eigenvalues[static_cast<Eigen::Index>(r_eff)] <=
               kEigenvalueTolerance) {
        ++r_eff;
    }
    return r_eff;
}

Eigen::MatrixXd eigenmap_coordinates(const Eigen::MatrixXd& adjacency, std::size_t r,
                                     Eigen::VectorXd* eigenvalues_out, SolverKind kind) {
    const auto m = static_cast<std::size_t>(adjacency.rows());
    const Eigen::VectorXd degree = adjacency.colwise().sum().transpose();
    Eigen::MatrixXd laplacian = -adjacency;
    laplacian.diagonal() = degree;

    const bool dense = kind == SolverKind::dense ||
                       (kind == SolverKind::automatic && m <= kDenseSolverLimit);
    EigenSolution sol;
    std::size_t r_eff = 0;
    if (dense) {
        sol = solve_generalized(laplacian, degree);
        r_eff = effective_dimension(sol.eigenvalues, r);
    } else {
        const Eigen::SparseMatrix<double> sparse = laplacian.sparseView();
        std::size_t request = std::min(m, std::min(r, m - 1) + 3);
        while (true) {
            sol = solve_generalized_smallest(sparse, degree, request, SolverKind::iterative);
            r_eff = effective_dimension(sol.eigenvalues, r);
            // The last returned pair must lie outside the group we keep, unless
            // the whole spectrum was returned.
            if (r_eff + 1 < request || request == m) break;
            request = std::min(m, request * 2);
        }
    }
    const auto cols = static_cast<Eigen::Index>(r_eff);
    if (eigenvalues_out) *eigenvalues_out = sol.eigenvalues.segment(1, cols);
    return sol.eigenvectors.middleCols(1, cols);
}

std::optional<std::size_t> Embedding::row_of(std::size_t node) const {
    auto it = std::lower_bound(members.begin(), members.end(), node);
    if (it == members.end() || *it != node) return std::nullopt;
    return static_cast<std::size_t>(it - members.begin());
}

std::optional<std::size_t> Embedding::row_of(const std::string& id) const {
    auto it = std::find(member_ids.begin(), member_ids.end(), id);
    if (it == member_ids.end()) return std::nullopt;
    return static_cast<std::size_t>(it - member_ids.begin());
}

EmbeddingSet embed(const FarmGraph& graph, const ComponentPartition& partition, std::size_t r,
                   std::optional<std::size_t> timestep, SolverKind kind) {
    if (r == 0) throw InputError("embedding dimension must be at least 1");
    const Eigen::MatrixXd adjacency = graph.adjacency();
    EmbeddingSet out;
    for (std::size_t c = 0; c < partition.count(); ++c) {
        const auto& members = partition.members(c);
        if (members.size() < kMinEmbeddableComponent) {
            out.small_components.push_back(c);
            continue;
        }
        const auto m = static_cast<Eigen::Index>(members.size());
        Eigen::MatrixXd sub(m, m);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < m; ++j)
                sub(i, j) = adjacency(static_cast<Eigen::Index>(members[static_cast<std::size_t>(i)]),
                                      static_cast<Eigen::Index>(members[static_cast<std::size_t>(j)]));

        Embedding e;
        e.component_index = c;
        e.timestep = timestep;
        e.r_requested = r;
        e.members = members;
        for (auto node : members) e.member_ids.push_back(graph.node_ids()[node]);
        e.coordinates = eigenmap_coordinates(sub, r, &e.eigenvalues, kind);
        out.embeddings.push_back(std::move(e));
    }
    return out;
}

double embedding_distance(const Embedding& e, std::size_t row_i, std::size_t row_j) {
    return (e.coordinates.row(static_cast<Eigen::Index>(row_i)) -
            e.coordinates.row(static_cast<Eigen::Index>(row_j)))
        .norm();
}

double embedding_distance(const Embedding& e, const std::string& i, const std::string& j) {
    auto ri = e.row_of(i);
    auto rj = e.row_of(j);
    if (!ri) throw LookupError(fmt::format("sensor '{}' is not in this embedding", i));
    if (!rj) throw LookupError(fmt::format("sensor '{}' is not in this embedding", j));
    return embedding_distance(e, *ri, *rj);
}

}  // namespace spimpute
