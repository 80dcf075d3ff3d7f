#pragma once

#include "spimpute/graph.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spimpute {

/// Eigenpairs of L f = lambda D f. Columns of `eigenvectors` are D-orthonormal
/// (f_i' D f_j = delta_ij) and eigenvalues are nondecreasing.
///
/// The spectrum is the one of the random-walk Laplacian D^-1 L; it is computed
/// through the symmetric reduction D^-1/2 L D^-1/2 u = lambda u, f = D^-1/2 u.
struct EigenSolution {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
};

enum class SolverKind { automatic, dense, iterative };

/// Components above this size use the iterative solver under SolverKind::automatic.
inline constexpr std::size_t kDenseSolverLimit = 200;
/// Eigenvalues closer than this are one degenerate group.
inline constexpr double kEigenvalueTolerance = 1e-9;

/// Full spectrum. Throws DegenerateDegreeError if any degree is not strictly positive.
EigenSolution solve_generalized(const Eigen::MatrixXd& laplacian, const Eigen::VectorXd& degree);

/// The `count` smallest eigenpairs. The iterative path is a block Krylov
/// Rayleigh-Ritz iteration with full reorthogonalization, seeded deterministically.
EigenSolution solve_generalized_smallest(const Eigen::SparseMatrix<double>& laplacian,
                                         const Eigen::VectorXd& degree, std::size_t count,
                                         SolverKind kind = SolverKind::automatic);

/// Flips each column so that its entry of largest magnitude is positive
/// (ties within a relative 1e-10 go to the lowest index).
void apply_sign_convention(Eigen::MatrixXd& vectors);

/// Number of eigenpairs to keep for a requested dimension: min(r, m - 1),
/// extended to the end of a degenerate eigenvalue group it would cut through.
std::size_t effective_dimension(const Eigen::VectorXd& eigenvalues, std::size_t r);

/// Laplacian-eigenmap coordinates for one connected weighted graph given by
/// its (dense, symmetric, zero-diagonal) adjacency. Rows follow the adjacency
/// order; columns are f_1..f_{r_eff}. `eigenvalues_out`, when given, receives
/// lambda_1..lambda_{r_eff}.
Eigen::MatrixXd eigenmap_coordinates(const Eigen::MatrixXd& adjacency, std::size_t r,
                                     Eigen::VectorXd* eigenvalues_out = nullptr,
                                     SolverKind kind = SolverKind::automatic);

struct Embedding {
    std::size_t component_index = 0;
    std::optional<std::size_t> timestep;
    std::size_t r_requested = 0;
    std::vector<std::size_t> members;  // global node indices, ascending
    std::vector<std::string> member_ids;
    Eigen::MatrixXd coordinates;       // members.size() x r_eff
    Eigen::VectorXd eigenvalues;       // lambda_1..lambda_{r_eff}

    std::size_t r_eff() const { return static_cast<std::size_t>(coordinates.cols()); }
    std::optional<std::size_t> row_of(std::size_t node) const;
    std::optional<std::size_t> row_of(const std::string& id) const;
};

struct EmbeddingSet {
    std::vector<Embedding> embeddings;
    /// Components with fewer than three members; no eigenmap is computed for them.
    std::vector<std::size_t> small_components;
};

inline constexpr std::size_t kMinEmbeddableComponent = 3;

/// One Embedding per component of size >= 3, using the graph's edge weights.
EmbeddingSet embed(const FarmGraph& graph, const ComponentPartition& partition, std::size_t r,
                   std::optional<std::size_t> timestep = std::nullopt,
                   SolverKind kind = SolverKind::automatic);

/// Euclidean distance between two rows of the embedding.
double embedding_distance(const Embedding& e, std::size_t row_i, std::size_t row_j);
/// Throws LookupError if either sensor is outside the embedded component.
double embedding_distance(const Embedding& e, const std::string& i, const std::string& j);

}  // namespace spimpute
