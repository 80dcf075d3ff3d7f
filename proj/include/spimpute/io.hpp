#pragma once

#include "spimpute/estimators.hpp"
#include "spimpute/evaluation.hpp"
#include "spimpute/graph.hpp"
#include "spimpute/online.hpp"
#include "spimpute/panel.hpp"
#include "spimpute/spectral.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace spimpute::io {

namespace fs = std::filesystem;

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_atomic(const fs::path& path, const std::string& content);
std::string read_file(const fs::path& path);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

// ---------------------------------------------------------------- inputs

/// Header `sensor_id,latitude,longitude,nominal_capacity`.
FarmLayout load_layout(const fs::path& path);
std::string layout_csv(const FarmLayout& layout);

/// Header `from,to`. Duplicates and reversed duplicates are collapsed,
/// keeping first occurrence order.
std::vector<std::pair<std::string, std::string>> load_edges(const fs::path& path);
std::string edges_csv(std::span<const std::pair<std::string, std::string>> edges);

/// `raw`: cells are power in the layout's capacity units and are divided by
/// nominal_capacity. `normalized`: cells are already in [0,1].
enum class Units { raw, normalized };

struct PanelLoad {
    Panel panel;
    std::size_t clamped = 0;  // cells moved into [0,1]
};

/// Header `timestamp,<sensor_id>,...` in any column order; every layout id
/// must appear exactly once. Empty cells are missing. Timestamps must be
/// strictly increasing (numerically when both parse as numbers).
PanelLoad load_panel(const fs::path& path, const FarmLayout& layout, Units units = Units::raw);
std::string panel_csv(const Panel& panel, const FarmLayout& layout, Units units = Units::normalized);

// ---------------------------------------------------------------- outputs

/// Filled values in the panel's shape; unimputable cells stay empty.
std::string imputation_csv(const Panel& panel, const FarmLayout& layout, const ImputationResult& result);
std::string provenance_csv(const Panel& panel, const FarmLayout& layout, const ImputationResult& result);

/// `sensor_id,dim_1,...,dim_r` for every embedded component, plus a
/// `component` column when there is more than one.
std::string embedding_csv(const EmbeddingSet& set);

struct ScatterOptions {
    std::size_t dim_x = 1;  // 1-based
    std::size_t dim_y = 2;
    double width = 640.0;
    double height = 480.0;
    std::string title;
};

/// SVG scatter of one embedding with a labeled point per sensor. When the
/// embedding has a single dimension, points are drawn on a horizontal line.
std::string embedding_svg(const Embedding& embedding, const ScatterOptions& options = {});

/// `from,to,y,guess,cumulative_loss,revealed_count,running_sum_revealed`.
std::string checkpoint_csv(const SimilarityTracker& tracker, std::span<const std::string> node_ids);
/// Rebuilds a tracker over `graph`'s edges. Throws InputError when the file
/// lists an unknown edge or misses one.
SimilarityTracker load_checkpoint(const fs::path& path, const FarmGraph& graph, double eta);

/// `t,algorithm_loss,best_constant_loss,regret`.
std::string regret_csv(std::span<const RegretPoint> curve);

/// One line per sensor with rmse, naive rmse and improvement.
std::string sensor_report_csv(const EvalReport& report);
/// One summary line per report.
std::string summary_csv(std::span<const EvalReport> reports);
/// Reports with their per-sensor breakdown.
std::string reports_json(std::span<const EvalReport> reports);

/// Rows = setup, columns = kernel; cells are the mean (and across-sensor sd)
/// of the per-sensor improvements for `method` at dimension `r`.
std::string kernel_table_csv(std::span<const EvalReport> reports, Method method, std::size_t r);
/// Rows = setup, columns = r; per-sensor improvements pooled over kernels.
std::string dimension_table_csv(std::span<const EvalReport> reports, Method method);

struct Manifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;  // flag, value
    std::uint64_t seed = 0;
    std::vector<std::string> outputs;
};

/// JSON echo of the command, its resolved configuration, seed and version.
std::string manifest_json(const Manifest& manifest);

/// Library version string.
std::string_view version();

}  // namespace spimpute::io
