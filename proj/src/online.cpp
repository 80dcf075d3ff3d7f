#include "spimpute/online.hpp"

#include "spimpute/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace spimpute {

EdgeState step(const EdgeState& state, std::optional<double> revealed, double eta) {
    if (!revealed) return state;
    const double s = *revealed;
    if (!(s >= 0.0 && s <= 1.0)) {
        throw InputError(fmt::format("revealed similarity {} outside [0,1]", s));
    }
    EdgeState next = state;
    const double diff = s - state.guess;
    next.cumulative_loss += diff * diff;
    // y - eta * (-2)(s - guess), arranged so that eta = 0.5 lands exactly on s.
    const double rate = 2.0 * eta;
    next.y = (state.y - state.guess) + (1.0 - rate) * state.guess + rate * s;
    next.guess = std::clamp(next.y, 0.0, 1.0);
    next.revealed_count += 1;
    next.running_sum_revealed += s;
    return next;
}

SimilarityTracker::SimilarityTracker(std::vector<Edge> edges, double eta)
    : edges_(std::move(edges)), states_(edges_.size()), eta_(eta) {
    if (!(eta > 0.0)) throw InputError("learning rate must be positive");
}

std::vector<double> SimilarityTracker::guesses() const {
    std::vector<double> out(states_.size());
    for (std::size_t k = 0; k < states_.size(); ++k) out[k] = states_[k].guess;
    return out;
}

void SimilarityTracker::update(std::span<const std::optional<double>> revealed) {
    if (revealed.size() != states_.size()) {
        throw InputError("revealed similarity count does not match tracked edges");
    }
    for (std::size_t k = 0; k < states_.size(); ++k) states_[k] = step(states_[k], revealed[k], eta_);
    ++rounds_;
}

void SimilarityTracker::restore(std::vector<EdgeState> states, std::size_t rounds) {
    if (states.size() != edges_.size()) throw InputError("checkpoint edge count mismatch");
    for (const auto& s : states) {
        if (!(s.guess >= 0.0 && s.guess <= 1.0)) throw InputError("checkpoint guess outside [0,1]");
    }
    states_ = std::move(states);
    rounds_ = rounds;
}

double best_constant(std::span<const std::optional<double>> history) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& s : history) {
        if (s) {
            sum += *s;
            ++n;
        }
    }
    if (n == 0) throw UndefinedError("best constant is undefined without revealed values");
    return std::clamp(sum / static_cast<double>(n), 0.0, 1.0);
}

double constant_loss(double s, std::span<const std::optional<double>> history) {
    double loss = 0.0;
    for (const auto& v : history) {
        if (v) loss += (s - *v) * (s - *v);
    }
    return loss;
}

double regret(std::span<const double> losses, std::span<const std::optional<double>> history) {
    if (losses.size() != history.size()) throw InputError("losses and history differ in length");
    double total = 0.0;
    for (double l : losses) total += l;
    const bool any = std::any_of(history.begin(), history.end(), [](const auto& v) { return v.has_value(); });
    if (!any) return total;
    return total - constant_loss(best_constant(history), history);
}

double theoretical_rate(std::size_t revealed_count) {
    if (revealed_count == 0) throw InputError("revealed count must be at least 1");
    return 1.0 / (2.0 * std::sqrt(static_cast<double>(revealed_count)));
}

OgdTrace run_lazy_ogd(std::span<const std::optional<double>> history, double eta, EdgeState initial) {
    OgdTrace trace;
    trace.guesses.reserve(history.size());
    trace.losses.reserve(history.size());
    EdgeState state = initial;
    for (const auto& s : history) {
        trace.guesses.push_back(state.guess);
        trace.losses.push_back(s ? (*s - state.guess) * (*s - state.guess) : 0.0);
        state = step(state, s, eta);
    }
    return trace;
}

std::vector<RegretPoint> regret_curve(std::span<const std::optional<double>> history, double eta) {
    std::vector<RegretPoint> out;
    out.reserve(history.size());
    EdgeState state;
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t n = 0;
    for (std::size_t t = 0; t < history.size(); ++t) {
        state = step(state, history[t], eta);
        if (history[t]) {
            sum += *history[t];
            sum_sq += *history[t] * *history[t];
            ++n;
        }
        double best = 0.0;
        if (n > 0) {
            const double mean = sum / static_cast<double>(n);
            best = std::max(0.0, sum_sq - static_cast<double>(n) * mean * mean);
        }
        out.push_back({t + 1, state.cumulative_loss, best, state.cumulative_loss - best});
    }
    return out;
}

}  // namespace spimpute
