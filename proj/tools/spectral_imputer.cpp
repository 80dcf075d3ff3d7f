// Command-line front end: graph build, embed, impute, evaluate, sweep,
// simulate and regret.

#include "spimpute/error.hpp"
#include "spimpute/estimators.hpp"
#include "spimpute/evaluation.hpp"
#include "spimpute/graph.hpp"
#include "spimpute/io.hpp"
#include "spimpute/online.hpp"
#include "spimpute/spectral.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace spimpute;

namespace {

struct Options {
    std::string layout;
    std::string edges;
    std::string panel;
    std::string units = "raw";
    std::string method = "weighted_graph";
    std::string kernel = "triweight";
    std::size_t dim = 2;
    double eta = kDefaultLearningRate;
    double weight_floor = kDefaultWeightFloor;
    std::string setup = "complete";
    std::uint64_t seed = 0;
    std::string out = ".";
    double split = 0.5;

    // graph build
    bool no_diagonals = false;
    // embed
    std::size_t dim_x = 1;
    std::size_t dim_y = 2;
    // impute
    std::string checkpoint;
    // sweep
    std::vector<std::string> methods{"location", "unweighted_graph", "weighted_graph"};
    std::vector<std::string> kernels{"gaussian", "epanechnikov", "triangular", "quartic", "triweight", "tricube"};
    std::vector<std::size_t> dims{1, 2, 3, 4, 5};
    std::vector<std::string> setups{"complete", "incomplete"};
    // simulate
    std::size_t grid_rows = 5;
    std::size_t grid_cols = 7;
    double spacing = 1.0;
    std::size_t steps = 5000;
    std::string mechanism = "mcar";
    double p = 0.02;
    std::size_t block_mean = 6;
    double spatial_scale = 2.0;
    double persistence = 0.95;
    // regret
    bool theoretical_eta = false;
};

// Files written by the running command; removed if it fails.
class Outputs {
public:
    explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

    void write(const std::string& name, const std::string& content) {
        const fs::path path = dir_ / name;
        written_.push_back(path);
        names_.push_back(name);
        io::write_atomic(path, content);
    }
    void discard() {
        for (const auto& p : written_) {
            std::error_code ec;
            fs::remove(p, ec);
            fs::path tmp = p;
            tmp += ".tmp";
            fs::remove(tmp, ec);
        }
    }
    const std::vector<std::string>& names() const { return names_; }

private:
    fs::path dir_;
    std::vector<fs::path> written_;
    std::vector<std::string> names_;
};

FarmLayout need_layout(const Options& o) {
    if (o.layout.empty()) throw InputError("--layout is required");
    return io::load_layout(o.layout);
}

FarmGraph need_graph(const Options& o, const FarmLayout& layout) {
    if (o.edges.empty()) throw InputError("--edges is required");
    const auto edges = io::load_edges(o.edges);
    try {
        return build_graph(layout, edges);
    } catch (const Error& e) {
        throw InputError(fmt::format("{}: {}", o.edges, e.what()));
    }
}

Panel need_panel(const Options& o, const FarmLayout& layout) {
    if (o.panel.empty()) throw InputError("--panel is required");
    const io::Units units = o.units == "normalized" ? io::Units::normalized : io::Units::raw;
    return io::load_panel(o.panel, layout, units).panel;
}

EstimatorConfig estimator_config(const Options& o) {
    EstimatorConfig cfg;
    cfg.method = parse_method(o.method);
    cfg.kernel = parse_kernel(o.kernel);
    cfg.r = o.dim;
    cfg.learning_rate = o.eta;
    cfg.weight_floor = o.weight_floor;
    return cfg;
}

std::size_t split_row(const Options& o, std::size_t rows) {
    if (!(o.split >= 0.0 && o.split <= 1.0)) throw ConfigError("--split must lie in [0,1]");
    return static_cast<std::size_t>(std::floor(o.split * static_cast<double>(rows)));
}

void write_manifest(Outputs& out, const std::string& command, const Options& o,
                    std::vector<std::pair<std::string, std::string>> config) {
    io::Manifest m;
    m.command = command;
    m.seed = o.seed;
    m.config = std::move(config);
    m.outputs = out.names();
    out.write("manifest.json", io::manifest_json(m));
}

std::vector<std::pair<std::string, std::string>> input_config(const Options& o) {
    return {{"layout", o.layout}, {"edges", o.edges}, {"panel", o.panel}, {"units", o.units}};
}

std::vector<std::pair<std::string, std::string>> estimator_echo(const Options& o) {
    auto c = input_config(o);
    c.insert(c.end(), {{"method", o.method},
                       {"kernel", o.kernel},
                       {"dim", std::to_string(o.dim)},
                       {"eta", io::format_double(o.eta)},
                       {"weight_floor", io::format_double(o.weight_floor)}});
    return c;
}

void cmd_graph_build(const Options& o, Outputs& out) {
    const FarmLayout layout = need_layout(o);
    std::vector<std::pair<std::string, std::string>> edges =
        o.edges.empty() ? propose_grid_edges(layout, !o.no_diagonals) : io::load_edges(o.edges);
    const FarmGraph graph = build_graph(layout, edges);
    const ComponentPartition parts = components(graph);
    if (parts.count() != 1) {
        std::cerr << fmt::format("warning: graph has {} connected components\n", parts.count());
    }
    out.write("edges.csv", io::edges_csv(edges));
    auto cfg = input_config(o);
    cfg.emplace_back("diagonals", o.no_diagonals ? "false" : "true");
    cfg.emplace_back("edge_count", std::to_string(graph.edges().size()));
    cfg.emplace_back("components", std::to_string(parts.count()));
    write_manifest(out, "graph build", o, cfg);
}

void cmd_embed(const Options& o, Outputs& out) {
    const FarmLayout layout = need_layout(o);
    const FarmGraph graph = need_graph(o, layout);
    const EmbeddingSet set = embed(graph, components(graph, o.weight_floor), o.dim);
    if (set.embeddings.empty()) throw ConfigError("no component with at least three sensors");
    out.write("embedding.csv", io::embedding_csv(set));
    for (const auto& e : set.embeddings) {
        io::ScatterOptions so;
        so.dim_x = o.dim_x;
        so.dim_y = o.dim_y;
        so.title = fmt::format("Laplacian eigenmap, r = {}", e.r_eff());
        const std::string name = set.embeddings.size() == 1 ? "embedding.svg"
                                                            : fmt::format("embedding_{}.svg", e.component_index);
        out.write(name, io::embedding_svg(e, so));
    }
    auto cfg = input_config(o);
    cfg.insert(cfg.end(), {{"dim", std::to_string(o.dim)},
                           {"dim_x", std::to_string(o.dim_x)},
                           {"dim_y", std::to_string(o.dim_y)}});
    write_manifest(out, "embed", o, cfg);
}

void cmd_impute(const Options& o, Outputs& out) {
    const FarmLayout layout = need_layout(o);
    const FarmGraph graph = need_graph(o, layout);
    const Panel panel = need_panel(o, layout);
    const EstimatorConfig cfg = estimator_config(o);
    std::optional<SimilarityTracker> tracker;
    if (cfg.method == Method::weighted_graph) {
        tracker = o.checkpoint.empty() ? SimilarityTracker(graph.edges(), cfg.learning_rate)
                                       : io::load_checkpoint(o.checkpoint, graph, cfg.learning_rate);
    }
    const ImputationResult res = impute(panel, layout, graph, cfg, tracker ? &*tracker : nullptr);
    out.write("filled.csv", io::imputation_csv(panel, layout, res));
    out.write("provenance.csv", io::provenance_csv(panel, layout, res));
    if (tracker) out.write("checkpoint.csv", io::checkpoint_csv(*tracker, graph.node_ids()));
    auto echo = estimator_echo(o);
    echo.emplace_back("checkpoint", o.checkpoint);
    write_manifest(out, "impute", o, echo);
}

void cmd_evaluate(const Options& o, Outputs& out) {
    const FarmLayout layout = need_layout(o);
    const FarmGraph graph = need_graph(o, layout);
    const Panel panel = need_panel(o, layout);
    EvalOptions eo;
    eo.row_begin = split_row(o, panel.rows());
    const EvalReport rep = leave_one_out_eval(panel, layout, graph, estimator_config(o), parse_setup(o.setup), eo);
    const std::vector<EvalReport> reps{rep};
    out.write("report.csv", io::summary_csv(reps));
    out.write("sensors.csv", io::sensor_report_csv(rep));
    out.write("report.json", io::reports_json(reps));
    auto echo = estimator_echo(o);
    echo.insert(echo.end(), {{"setup", o.setup}, {"split", io::format_double(o.split)}});
    write_manifest(out, "evaluate", o, echo);
}

void cmd_sweep(const Options& o, Outputs& out) {
    const FarmLayout layout = need_layout(o);
    const FarmGraph graph = need_graph(o, layout);
    const Panel panel = need_panel(o, layout);
    SweepGrid grid;
    for (const auto& m : o.methods) grid.methods.push_back(parse_method(m));
    for (const auto& k : o.kernels) grid.kernels.push_back(parse_kernel(k));
    for (const auto& s : o.setups) grid.setups.push_back(parse_setup(s));
    grid.dims = o.dims;
    grid.learning_rate = o.eta;
    grid.weight_floor = o.weight_floor;
    EvalOptions eo;
    eo.row_end = split_row(o, panel.rows());
    const std::vector<EvalReport> reps = sweep(panel, layout, graph, grid, eo);
    out.write("sweep.csv", io::summary_csv(reps));
    out.write("sweep.json", io::reports_json(reps));
    for (Method m : grid.methods) {
        const std::string name(to_string(m));
        if (m == Method::unweighted_graph || m == Method::weighted_graph) {
            for (std::size_t r : grid.dims) {
                out.write(fmt::format("table_{}_kernels_r{}.csv", name, r), io::kernel_table_csv(reps, m, r));
            }
            out.write(fmt::format("table_{}_dims.csv", name), io::dimension_table_csv(reps, m));
        } else {
            out.write(fmt::format("table_{}_kernels.csv", name), io::kernel_table_csv(reps, m, 0));
        }
    }
    auto echo = input_config(o);
    auto join = [](const auto& xs) {
        std::string s;
        for (const auto& x : xs) s += (s.empty() ? "" : ",") + fmt::format("{}", x);
        return s;
    };
    echo.insert(echo.end(), {{"methods", join(o.methods)},
                             {"kernels", join(o.kernels)},
                             {"dims", join(o.dims)},
                             {"setups", join(o.setups)},
                             {"eta", io::format_double(o.eta)},
                             {"weight_floor", io::format_double(o.weight_floor)},
                             {"split", io::format_double(o.split)}});
    write_manifest(out, "sweep", o, echo);
}

void cmd_simulate(const Options& o, Outputs& out) {
    const FarmLayout layout = o.layout.empty() ? grid_layout(o.grid_rows, o.grid_cols, o.spacing)
                                               : io::load_layout(o.layout);
    const auto edges = o.edges.empty() ? propose_grid_edges(layout) : io::load_edges(o.edges);
    build_graph(layout, edges);
    const Panel truth = synth_panel(layout, {o.steps, o.spatial_scale, o.persistence, o.seed});
    MissingnessSpec ms;
    ms.mechanism = parse_mechanism(o.mechanism);
    ms.p = o.p;
    ms.block_length_mean = o.block_mean;
    ms.seed = o.seed;
    const Panel masked = apply_missingness(truth, ms);
    if (o.layout.empty()) out.write("layout.csv", io::layout_csv(layout));
    if (o.edges.empty()) out.write("edges.csv", io::edges_csv(edges));
    out.write("truth.csv", io::panel_csv(truth, layout, io::Units::raw));
    out.write("panel.csv", io::panel_csv(masked, layout, io::Units::raw));
    write_manifest(out, "simulate", o,
                   {{"layout", o.layout},
                    {"edges", o.edges},
                    {"grid_rows", std::to_string(o.grid_rows)},
                    {"grid_cols", std::to_string(o.grid_cols)},
                    {"spacing", io::format_double(o.spacing)},
                    {"steps", std::to_string(o.steps)},
                    {"spatial_scale", io::format_double(o.spatial_scale)},
                    {"persistence", io::format_double(o.persistence)},
                    {"mechanism", o.mechanism},
                    {"p", io::format_double(o.p)},
                    {"block_mean", std::to_string(o.block_mean)}});
}

void cmd_regret(const Options& o, Outputs& out) {
    const FarmLayout layout = need_layout(o);
    const FarmGraph graph = need_graph(o, layout);
    const Panel panel = need_panel(o, layout);
    const std::size_t m = graph.edges().size();
    std::vector<std::vector<std::optional<double>>> histories(m);
    for (std::size_t t = 0; t < panel.rows(); ++t) {
        for (std::size_t k = 0; k < m; ++k) {
            const Edge& e = graph.edges()[k];
            std::optional<double> s;
            if (panel.observed(t, e.a) && panel.observed(t, e.b)) {
                s = 1.0 - std::abs(panel.value(t, e.a) - panel.value(t, e.b));
            }
            histories[k].push_back(s);
        }
    }
    std::vector<RegretPoint> total(panel.rows());
    for (std::size_t t = 0; t < panel.rows(); ++t) total[t].t = t + 1;
    std::string per_edge = "from,to,revealed,eta,algorithm_loss,best_constant_loss,regret,bound\n";
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t revealed = 0;
        for (const auto& s : histories[k]) revealed += s.has_value();
        const double eta = o.theoretical_eta ? (revealed > 0 ? theoretical_rate(revealed) : o.eta) : o.eta;
        const auto curve = regret_curve(histories[k], eta);
        for (std::size_t t = 0; t < curve.size(); ++t) {
            total[t].algorithm_loss += curve[t].algorithm_loss;
            total[t].best_constant_loss += curve[t].best_constant_loss;
            total[t].regret += curve[t].regret;
        }
        const RegretPoint last = curve.empty() ? RegretPoint{} : curve.back();
        const Edge& e = graph.edges()[k];
        per_edge += fmt::format("{},{},{},{},{},{},{},{}\n", graph.node_ids()[e.a], graph.node_ids()[e.b], revealed,
                                io::format_double(eta), io::format_double(last.algorithm_loss),
                                io::format_double(last.best_constant_loss), io::format_double(last.regret),
                                io::format_double(1.5 * std::sqrt(static_cast<double>(revealed))));
    }
    out.write("regret.csv", io::regret_csv(total));
    out.write("regret_edges.csv", per_edge);
    auto echo = input_config(o);
    echo.emplace_back("eta", o.theoretical_eta ? "theoretical" : io::format_double(o.eta));
    write_manifest(out, "regret", o, echo);
}

void apply_thread_env() {
    const char* env = std::getenv("SPECTRAL_IMPUTER_THREADS");
    if (!env || !*env) return;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n <= 0) throw ConfigError(fmt::format("SPECTRAL_IMPUTER_THREADS must be a positive integer, got '{}'", env));
    omp_set_num_threads(static_cast<int>(n));
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Spectral-graph k-NN imputation of wind-farm sensor panels"};
    app.require_subcommand(1);

    auto add_inputs = [&](CLI::App* sub, bool panel) {
        sub->add_option("--layout", o.layout, "Layout CSV (sensor_id,latitude,longitude,nominal_capacity)");
        sub->add_option("--edges", o.edges, "Edge list CSV (from,to)");
        if (panel) {
            sub->add_option("--panel", o.panel, "Panel CSV (timestamp,<sensor_id>,...)");
            sub->add_option("--units", o.units, "Panel units")->check(CLI::IsMember({"raw", "normalized"}));
        }
        sub->add_option("--seed", o.seed, "Seed recorded in the manifest");
        sub->add_option("--out", o.out, "Output directory");
    };
    auto add_estimator = [&](CLI::App* sub) {
        sub->add_option("--method", o.method, "naive, location, unweighted_graph or weighted_graph");
        sub->add_option("--kernel", o.kernel, "Kernel name");
        sub->add_option("--dim", o.dim, "Embedding dimension r");
        sub->add_option("--eta", o.eta, "Lazy OGD learning rate");
        sub->add_option("--weight-floor", o.weight_floor, "Edges at or below this weight are absent");
    };

    auto* graph = app.add_subcommand("graph", "Edge list utilities");
    graph->require_subcommand(1);
    auto* build = graph->add_subcommand("build", "Propose lattice edges or validate an edge list");
    add_inputs(build, false);
    build->add_flag("--no-diagonals", o.no_diagonals, "Only orthogonal lattice neighbors");

    auto* emb = app.add_subcommand("embed", "Eigenmap coordinates as CSV and SVG scatter");
    add_inputs(emb, false);
    emb->add_option("--dim", o.dim, "Embedding dimension r");
    emb->add_option("--weight-floor", o.weight_floor, "Edges at or below this weight are absent");
    emb->add_option("--x", o.dim_x, "Dimension on the horizontal axis (1-based)");
    emb->add_option("--y", o.dim_y, "Dimension on the vertical axis (1-based)");

    auto* imp = app.add_subcommand("impute", "Fill missing cells");
    add_inputs(imp, true);
    add_estimator(imp);
    imp->add_option("--checkpoint", o.checkpoint, "Tracker checkpoint to resume from (weighted_graph)");

    auto* ev = app.add_subcommand("evaluate", "Leave-one-out evaluation against the naive estimator");
    add_inputs(ev, true);
    add_estimator(ev);
    ev->add_option("--setup", o.setup, "complete or incomplete");
    ev->add_option("--split", o.split, "Fraction of rows before the scored (test) part");

    auto* sw = app.add_subcommand("sweep", "Hyperparameter sweep on the validation part");
    add_inputs(sw, true);
    sw->add_option("--methods", o.methods, "Methods")->delimiter(',');
    sw->add_option("--kernels", o.kernels, "Kernels")->delimiter(',');
    sw->add_option("--dims", o.dims, "Embedding dimensions")->delimiter(',');
    sw->add_option("--setups", o.setups, "Setups")->delimiter(',');
    sw->add_option("--eta", o.eta, "Lazy OGD learning rate");
    sw->add_option("--weight-floor", o.weight_floor, "Edges at or below this weight are absent");
    sw->add_option("--split", o.split, "Fraction of rows used as the validation part");

    auto* sim = app.add_subcommand("simulate", "Synthetic grid farm, panel and missingness mask");
    add_inputs(sim, false);
    sim->add_option("--rows", o.grid_rows, "Grid rows (without --layout)");
    sim->add_option("--cols", o.grid_cols, "Grid columns (without --layout)");
    sim->add_option("--spacing", o.spacing, "Grid spacing");
    sim->add_option("--steps", o.steps, "Number of timesteps");
    sim->add_option("--spatial-scale", o.spatial_scale, "Correlation length of the noise field");
    sim->add_option("--persistence", o.persistence, "AR(1) coefficient in [0,1)");
    sim->add_option("--mechanism", o.mechanism, "mcar or block");
    sim->add_option("--p", o.p, "Missingness probability");
    sim->add_option("--block-mean", o.block_mean, "Mean outage length (block)");

    auto* reg = app.add_subcommand("regret", "Lazy OGD against the best constant similarity");
    add_inputs(reg, true);
    reg->add_option("--eta", o.eta, "Learning rate");
    reg->add_flag("--theoretical-eta", o.theoretical_eta, "Use 1/(2 sqrt(revealed)) per edge");

    CLI11_PARSE(app, argc, argv);

    Outputs out(o.out);
    try {
        apply_thread_env();
        if (build->parsed()) cmd_graph_build(o, out);
        else if (emb->parsed()) cmd_embed(o, out);
        else if (imp->parsed()) cmd_impute(o, out);
        else if (ev->parsed()) cmd_evaluate(o, out);
        else if (sw->parsed()) cmd_sweep(o, out);
        else if (sim->parsed()) cmd_simulate(o, out);
        else if (reg->parsed()) cmd_regret(o, out);
    } catch (const std::exception& e) {
        out.discard();
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
