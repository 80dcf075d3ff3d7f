#pragma once

#include "spimpute/estimators.hpp"
#include "spimpute/graph.hpp"
#include "spimpute/panel.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spimpute {

enum class Setup { complete, incomplete };

std::string_view to_string(Setup s);
Setup parse_setup(std::string_view name);

/// Root mean square of truth - estimate. Throws UndefinedError when empty.
double rmse(std::span<const double> truth, std::span<const double> estimates);

/// Rows of `panel` scored for `sensor`: complete rows only (complete setup)
/// or every row where the sensor is observed (incomplete setup).
std::vector<std::size_t> scored_rows(const Panel& panel, std::size_t sensor, Setup setup,
                                     std::size_t row_begin = 0,
                                     std::size_t row_end = std::numeric_limits<std::size_t>::max());

struct SensorScore {
    std::string sensor_id;
    std::size_t scored_rows = 0;
    bool scored = false;  // false when no row could be scored
    double rmse = 0.0;
    double rmse_naive = 0.0;
    double improvement = 0.0;  // (naive - method) / naive
};

inline constexpr std::size_t kProvenanceKinds = 6;

struct EvalReport {
    EstimatorConfig config;
    Setup setup = Setup::complete;
    std::size_t row_begin = 0;
    std::size_t row_end = 0;
    std::vector<SensorScore> sensors;

    double mean_rmse = 0.0;
    double sd_rmse = 0.0;
    double mean_rmse_naive = 0.0;
    double sd_rmse_naive = 0.0;
    /// Mean and across-sensor standard deviation of the per-sensor improvements.
    double mean_improvement = 0.0;
    double sd_improvement = 0.0;
    /// Improvement of the mean RMSE over the mean naive RMSE.
    double improvement_of_mean = 0.0;
    std::string best_sensor;
    double best_improvement = 0.0;
    std::string worst_sensor;
    double worst_improvement = 0.0;

    std::array<std::size_t, kProvenanceKinds> provenance_counts{};
    CompletenessStats completeness;
};

struct EvalOptions {
    /// Scored rows are [row_begin, row_end). Rows before row_begin still feed
    /// the similarity tracker of the weighted-graph estimator.
    std::size_t row_begin = 0;
    std::size_t row_end = std::numeric_limits<std::size_t>::max();
};

/// Hides each scored cell in turn, estimates it from the rest of its row and
/// scores against the hidden truth. The naive estimator is scored on the same
/// cells. Parallel over rows (or over sensors within a row for the
/// weighted-graph estimator).
EvalReport leave_one_out_eval(const Panel& panel, const FarmLayout& layout, const FarmGraph& graph,
                              const EstimatorConfig& config, Setup setup,
                              const EvalOptions& options = {});

struct SweepGrid {
    std::vector<Method> methods;
    std::vector<Kernel> kernels;
    std::vector<std::size_t> dims;
    std::vector<Setup> setups;
    double learning_rate = kDefaultLearningRate;
    double weight_floor = kDefaultWeightFloor;
};

/// Cartesian evaluation of the grid, sorted by mean improvement (descending,
/// stable). Dimensions are only varied for graph methods, kernels not for naive.
std::vector<EvalReport> sweep(const Panel& panel, const FarmLayout& layout, const FarmGraph& graph,
                              const SweepGrid& grid, const EvalOptions& options = {});

// ---------------------------------------------------------------- missingness

enum class Mechanism { mcar, block };

std::string_view to_string(Mechanism m);
Mechanism parse_mechanism(std::string_view name);

struct MissingnessSpec {
    Mechanism mechanism = Mechanism::mcar;
    double p = 0.01;
    std::size_t block_length_mean = 6;
    std::uint64_t seed = 0;
};

/// mcar: every cell hidden independently with probability p.
/// block: per sensor, outages start with probability p at each observed step
/// and last a geometric number of steps with mean block_length_mean.
Panel apply_missingness(const Panel& panel, const MissingnessSpec& spec);

struct SynthSpec {
    std::size_t rows = 1000;
    double spatial_scale = 1.0;
    double temporal_persistence = 0.95;
    std::uint64_t seed = 0;
};

/// Synthetic normalized power panel: a farm-wide AR(1) driver plus an AR(1)
/// noise field whose innovations are correlated as exp(-distance/spatial_scale),
/// passed through a logistic squash. Fully observed.
Panel synth_panel(const FarmLayout& layout, const SynthSpec& spec);

// ---------------------------------------------------------------- complexity

struct TimingRow {
    Method method = Method::naive;
    std::size_t sensors = 0;
    double seconds_per_row = 0.0;
};

struct ComplexityReport {
    std::vector<TimingRow> rows;
    /// Least-squares slope of log(time) against log(N), per method.
    std::array<double, 4> slopes{};
};

/// Times every estimator on synthetic grid farms of the given sizes.
ComplexityReport complexity_smoke(std::span<const std::size_t> sizes, std::size_t rows,
                                  std::uint64_t seed, double min_seconds = 0.05);

/// Grid farm of roughly `n` sensors used by the complexity smoke test.
FarmLayout smoke_layout(std::size_t n);

}  // namespace spimpute
