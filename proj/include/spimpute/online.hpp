#pragma once

#include "spimpute/graph.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace spimpute {

/// Constant learning rate used by default; with squared loss on [0,1] it
/// makes the tracker play the last revealed similarity (persistence).
inline constexpr double kDefaultLearningRate = 0.5;

/// Online state of one edge under lazy online gradient descent.
/// `y` is the unprojected state, `guess` its projection onto [0,1].
struct EdgeState {
    double guess = 1.0;
    double y = 1.0;
    double cumulative_loss = 0.0;
    std::size_t revealed_count = 0;
    double running_sum_revealed = 0.0;
};

/// One round: pay (s - guess)^2 if s is revealed, then y <- y + 2*eta*(s - guess)
/// and guess <- clamp(y, 0, 1). An unrevealed round leaves the state unchanged.
/// Throws InputError if `revealed` is outside [0,1].
EdgeState step(const EdgeState& state, std::optional<double> revealed, double eta);

class SimilarityTracker {
public:
    SimilarityTracker() = default;
    SimilarityTracker(std::vector<Edge> edges, double eta = kDefaultLearningRate);

    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<EdgeState>& states() const { return states_; }
    double eta() const { return eta_; }
    std::size_t rounds() const { return rounds_; }

    double guess(std::size_t edge) const { return states_[edge].guess; }
    std::vector<double> guesses() const;

    /// Plays one round on every edge; `revealed` is aligned with edges().
    void update(std::span<const std::optional<double>> revealed);

    /// Replaces the per-edge state, e.g. from a checkpoint.
    void restore(std::vector<EdgeState> states, std::size_t rounds = 0);

private:
    std::vector<Edge> edges_;
    std::vector<EdgeState> states_;
    double eta_ = kDefaultLearningRate;
    std::size_t rounds_ = 0;
};

/// Mean of the revealed values. Throws UndefinedError if nothing was revealed.
double best_constant(std::span<const std::optional<double>> history);

/// Sum over revealed rounds of (s - s_k)^2.
double constant_loss(double s, std::span<const std::optional<double>> history);

/// Sum of losses minus the loss of the best constant in [0,1] in hindsight.
double regret(std::span<const double> losses, std::span<const std::optional<double>> history);

/// 1 / (2 sqrt(count)): the bound-optimal rate for D = 1, B = 2 when only
/// `count` rounds are revealed.
double theoretical_rate(std::size_t revealed_count);

struct OgdTrace {
    std::vector<double> guesses;  // guess played at each round
    std::vector<double> losses;   // loss paid at each round (0 when unrevealed)
};

OgdTrace run_lazy_ogd(std::span<const std::optional<double>> history, double eta,
                      EdgeState initial = {});

struct RegretPoint {
    std::size_t t = 0;  // 1-based round
    double algorithm_loss = 0.0;
    double best_constant_loss = 0.0;
    double regret = 0.0;
};

/// Cumulative algorithm loss against the best constant of each prefix.
std::vector<RegretPoint> regret_curve(std::span<const std::optional<double>> history, double eta);

}  // namespace spimpute
