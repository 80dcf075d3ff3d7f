#include "spimpute/evaluation.hpp"

#include "spimpute/error.hpp"

#include <Eigen/Dense>
#include <fmt/chrono.h>
#include <fmt/format.h>

#include <cmath>
#include <ctime>
#include <random>

namespace spimpute {

std::string_view to_string(Mechanism m) { return m == Mechanism::mcar ? "mcar" : "block"; }

Mechanism parse_mechanism(std::string_view name) {
    if (name == "mcar") return Mechanism::mcar;
    if (name == "block") return Mechanism::block;
    throw InputError(fmt::format("unknown missingness mechanism '{}'", name));
}

Panel apply_missingness(const Panel& panel, const MissingnessSpec& spec) {
    if (!(spec.p >= 0.0 && spec.p <= 1.0)) throw InputError("missingness probability outside [0,1]");
    Panel out = panel;
    if (spec.p == 0.0) return out;
    std::mt19937_64 rng(spec.seed);
    std::bernoulli_distribution hide(spec.p);

    if (spec.mechanism == Mechanism::mcar) {
        for (std::size_t t = 0; t < out.rows(); ++t)
            for (std::size_t i = 0; i < out.sensors(); ++i)
                if (hide(rng)) out.hide(t, i);
        return out;
    }

    if (spec.block_length_mean == 0) throw InputError("block length mean must be positive");
    // Length = 1 + Geometric(q) has mean 1/q.
    std::geometric_distribution<std::size_t> extra(1.0 / static_cast<double>(spec.block_length_mean));
    for (std::size_t i = 0; i < out.sensors(); ++i) {
        std::size_t t = 0;
        while (t < out.rows()) {
            if (hide(rng)) {
                const std::size_t len = 1 + extra(rng);
                for (std::size_t k = 0; k < len && t < out.rows(); ++k, ++t) out.hide(t, i);
            } else {
                ++t;
            }
        }
    }
    return out;
}

namespace {

// Timestamps at ten-minute resolution starting 2016-01-01T00:00.
std::vector<std::string> ten_minute_stamps(std::size_t rows) {
    std::vector<std::string> out;
    out.reserve(rows);
    constexpr std::time_t kStart = 1451606400;
    for (std::size_t t = 0; t < rows; ++t) {
        const std::time_t when = kStart + static_cast<std::time_t>(t) * 600;
        std::tm tm{};
        gmtime_r(&when, &tm);
        out.push_back(fmt::format("{:%Y-%m-%dT%H:%M}", tm));
    }
    return out;
}

}  // namespace

Panel synth_panel(const FarmLayout& layout, const SynthSpec& spec) {
    if (spec.rows == 0) throw InputError("synthetic panel needs at least one row");
    if (!(spec.temporal_persistence >= 0.0 && spec.temporal_persistence < 1.0)) {
        throw InputError("temporal persistence must lie in [0,1)");
    }
    constexpr double kNoiseScale = 0.6;
    constexpr double kGain = 1.6;

    const auto n = static_cast<Eigen::Index>(layout.size());
    Eigen::MatrixXd corr(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double d = layout.geo_distance(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            if (i == j) corr(i, j) = 1.0;
            else if (spec.spatial_scale <= 0.0) corr(i, j) = 0.0;
            else corr(i, j) = std::exp(-d / spec.spatial_scale);
        }
    }
    // Symmetric square root; tolerates the rank-deficient all-ones limit.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(corr);
    const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd mix = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto innovation = [&]() {
        Eigen::VectorXd z(n);
        for (Eigen::Index i = 0; i < n; ++i) z[i] = normal(rng);
        return Eigen::VectorXd(mix * z);
    };

    const double phi = spec.temporal_persistence;
    const double shock = std::sqrt(1.0 - phi * phi);
    double driver = normal(rng);
    Eigen::VectorXd noise = innovation();

    const std::size_t cells = spec.rows * layout.size();
    std::vector<double> values(cells);
    for (std::size_t t = 0; t < spec.rows; ++t) {
        if (t > 0) {
            driver = phi * driver + shock * normal(rng);
            noise = phi * noise + shock * innovation();
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            const double latent = driver + kNoiseScale * noise[i];
            values[t * layout.size() + static_cast<std::size_t>(i)] = 1.0 / (1.0 + std::exp(-kGain * latent));
        }
    }
    return Panel(ten_minute_stamps(spec.rows), layout.size(), std::move(values),
                 std::vector<std::uint8_t>(cells, 1));
}

}  // namespace spimpute
