#include "spimpute/io.hpp"

#include "spimpute/error.hpp"

#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <system_error>

namespace spimpute::io {

namespace {

using Row = std::vector<std::string>;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// Splits one CSV line; double quotes may wrap a field and "" escapes a quote.
Row split_line(std::string_view line) {
    Row out;
    std::string field;
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        const char c = line[k];
        if (quoted) {
            if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
                field.push_back('"');
                ++k;
            } else if (c == '"') {
                quoted = false;
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.emplace_back(trim(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    out.emplace_back(trim(field));
    return out;
}

struct Table {
    Row header;
    std::vector<Row> rows;
    std::vector<std::size_t> lines;  // 1-based source line of each row
};

Table read_csv(const fs::path& path) {
    std::istringstream in(read_file(path));
    Table table;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        if (!have_header) {
            table.header = split_line(line);
            have_header = true;
            continue;
        }
        Row row = split_line(line);
        if (row.size() != table.header.size()) {
            throw InputError(fmt::format("{}:{}: expected {} fields, found {}", path.string(), lineno,
                                         table.header.size(), row.size()));
        }
        table.rows.push_back(std::move(row));
        table.lines.push_back(lineno);
    }
    if (!have_header) throw InputError(fmt::format("{}: empty file", path.string()));
    return table;
}

void expect_header(const Table& t, const fs::path& path, std::initializer_list<std::string_view> names) {
    const bool ok = t.header.size() == names.size() && std::equal(names.begin(), names.end(), t.header.begin());
    if (!ok) {
        std::string want;
        for (auto n : names) want += (want.empty() ? "" : ",") + std::string(n);
        throw InputError(fmt::format("{}: expected header '{}'", path.string(), want));
    }
}

std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

double parse_cell(const fs::path& path, std::size_t line, std::string_view column, std::string_view text) {
    const auto v = parse_number(text);
    if (!v || !std::isfinite(*v)) {
        throw InputError(fmt::format("{}:{}: column '{}': cannot parse '{}' as a number", path.string(), line,
                                     column, text));
    }
    return *v;
}

std::size_t parse_count(const fs::path& path, std::size_t line, std::string_view column, std::string_view text) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw InputError(fmt::format("{}:{}: column '{}': cannot parse '{}' as a count", path.string(), line,
                                     column, text));
    }
    return v;
}

std::string quote(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

bool timestamps_increase(const std::string& prev, const std::string& next) {
    const auto a = parse_number(prev);
    const auto b = parse_number(next);
    if (a && b) return *a < *b;
    return prev < next;
}

std::string panel_header(const FarmLayout& layout) {
    std::string out = "timestamp";
    for (const auto& s : layout.sensors()) out += "," + quote(s.id);
    return out + "\n";
}

double sample_sd(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

bool is_graph_method(Method m) { return m == Method::unweighted_graph || m == Method::weighted_graph; }

nlohmann::json number_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------- files

void write_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError(fmt::format("{}: cannot open for writing", tmp.string()));
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw InputError(fmt::format("{}: write failed", tmp.string()));
        }
    }
    fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(fmt::format("{}: cannot open", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_double(double v) { return fmt::format("{}", v); }

// ---------------------------------------------------------------- inputs

FarmLayout load_layout(const fs::path& path) {
    const Table t = read_csv(path);
    expect_header(t, path, {"sensor_id", "latitude", "longitude", "nominal_capacity"});
    std::vector<Sensor> sensors;
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        const Row& r = t.rows[k];
        Sensor s;
        s.id = r[0];
        s.latitude = parse_cell(path, t.lines[k], "latitude", r[1]);
        s.longitude = parse_cell(path, t.lines[k], "longitude", r[2]);
        s.nominal_capacity = parse_cell(path, t.lines[k], "nominal_capacity", r[3]);
        sensors.push_back(std::move(s));
    }
    try {
        return FarmLayout(std::move(sensors));
    } catch (const Error& e) {
        throw InputError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

std::string layout_csv(const FarmLayout& layout) {
    std::string out = "sensor_id,latitude,longitude,nominal_capacity\n";
    for (const auto& s : layout.sensors()) {
        out += fmt::format("{},{},{},{}\n", quote(s.id), format_double(s.latitude), format_double(s.longitude),
                           format_double(s.nominal_capacity));
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> load_edges(const fs::path& path) {
    const Table t = read_csv(path);
    expect_header(t, path, {"from", "to"});
    std::vector<std::pair<std::string, std::string>> out;
    std::set<std::pair<std::string, std::string>> seen;
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        const std::string& a = t.rows[k][0];
        const std::string& b = t.rows[k][1];
        if (a.empty() || b.empty()) throw InputError(fmt::format("{}:{}: empty sensor id", path.string(), t.lines[k]));
        if (a == b) throw InputError(fmt::format("{}:{}: self-loop on '{}'", path.string(), t.lines[k], a));
        if (!seen.insert(std::minmax(a, b)).second) continue;
        out.emplace_back(a, b);
    }
    return out;
}

std::string edges_csv(std::span<const std::pair<std::string, std::string>> edges) {
    std::string out = "from,to\n";
    for (const auto& [a, b] : edges) out += quote(a) + "," + quote(b) + "\n";
    return out;
}

PanelLoad load_panel(const fs::path& path, const FarmLayout& layout, Units units) {
    const Table t = read_csv(path);
    if (t.header.empty() || t.header[0] != "timestamp") {
        throw InputError(fmt::format("{}: first column must be 'timestamp'", path.string()));
    }
    const std::size_t n = layout.size();
    std::vector<std::size_t> column_to_node(t.header.size(), 0);
    std::vector<bool> present(n, false);
    for (std::size_t c = 1; c < t.header.size(); ++c) {
        const auto node = layout.find(t.header[c]);
        if (!node) throw InputError(fmt::format("{}: unknown sensor column '{}'", path.string(), t.header[c]));
        if (present[*node]) throw InputError(fmt::format("{}: duplicate column '{}'", path.string(), t.header[c]));
        present[*node] = true;
        column_to_node[c] = *node;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!present[i]) throw InputError(fmt::format("{}: missing column for sensor '{}'", path.string(), layout[i].id));
    }

    PanelLoad res;
    std::vector<std::string> stamps;
    std::vector<double> values(t.rows.size() * n, 0.0);
    std::vector<std::uint8_t> mask(t.rows.size() * n, 0);
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        const Row& r = t.rows[k];
        if (r[0].empty()) throw InputError(fmt::format("{}:{}: empty timestamp", path.string(), t.lines[k]));
        if (!stamps.empty() && !timestamps_increase(stamps.back(), r[0])) {
            throw InputError(fmt::format("{}:{}: timestamp '{}' does not follow '{}'", path.string(), t.lines[k],
                                         r[0], stamps.back()));
        }
        stamps.push_back(r[0]);
        for (std::size_t c = 1; c < r.size(); ++c) {
            if (r[c].empty()) continue;
            const std::size_t i = column_to_node[c];
            double v = parse_cell(path, t.lines[k], t.header[c], r[c]);
            if (units == Units::raw) v /= layout[i].nominal_capacity;
            if (v < 0.0 || v > 1.0) {
                v = std::clamp(v, 0.0, 1.0);
                ++res.clamped;
            }
            values[k * n + i] = v;
            mask[k * n + i] = 1;
        }
    }
    if (res.clamped > 0) {
        spdlog::warn("{}: clamped {} value(s) into [0,1]", path.string(), res.clamped);
    }
    res.panel = Panel(std::move(stamps), n, std::move(values), std::move(mask));
    return res;
}

std::string panel_csv(const Panel& panel, const FarmLayout& layout, Units units) {
    if (layout.size() != panel.sensors()) throw InputError("layout and panel sensor counts differ");
    std::string out = panel_header(layout);
    for (std::size_t t = 0; t < panel.rows(); ++t) {
        out += quote(panel.timestamps()[t]);
        for (std::size_t i = 0; i < panel.sensors(); ++i) {
            out += ',';
            if (!panel.observed(t, i)) continue;
            const double v = units == Units::raw ? panel.value(t, i) * layout[i].nominal_capacity : panel.value(t, i);
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------- outputs

std::string imputation_csv(const Panel& panel, const FarmLayout& layout, const ImputationResult& result) {
    std::string out = panel_header(layout);
    for (std::size_t t = 0; t < result.rows; ++t) {
        out += quote(panel.timestamps()[t]);
        for (std::size_t i = 0; i < result.sensors; ++i) {
            out += ',';
            if (!std::isnan(result.at(t, i))) out += format_double(result.at(t, i));
        }
        out += '\n';
    }
    return out;
}

std::string provenance_csv(const Panel& panel, const FarmLayout& layout, const ImputationResult& result) {
    std::string out = panel_header(layout);
    for (std::size_t t = 0; t < result.rows; ++t) {
        out += quote(panel.timestamps()[t]);
        for (std::size_t i = 0; i < result.sensors; ++i) {
            out += ',';
            out += to_string(result.tag(t, i));
        }
        out += '\n';
    }
    return out;
}

std::string embedding_csv(const EmbeddingSet& set) {
    std::size_t dims = 0;
    for (const auto& e : set.embeddings) dims = std::max(dims, e.r_eff());
    const bool multi = set.embeddings.size() > 1;
    std::string out = multi ? "component,sensor_id" : "sensor_id";
    for (std::size_t d = 1; d <= dims; ++d) out += fmt::format(",dim_{}", d);
    out += '\n';
    for (const auto& e : set.embeddings) {
        for (std::size_t k = 0; k < e.members.size(); ++k) {
            if (multi) out += fmt::format("{},", e.component_index);
            out += quote(e.member_ids[k]);
            for (std::size_t d = 0; d < dims; ++d) {
                out += ',';
                if (d < e.r_eff()) out += format_double(e.coordinates(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d)));
            }
            out += '\n';
        }
    }
    return out;
}

std::string embedding_svg(const Embedding& e, const ScatterOptions& opt) {
    if (opt.dim_x == 0 || opt.dim_x > e.r_eff()) {
        throw InputError(fmt::format("x dimension {} outside 1..{}", opt.dim_x, e.r_eff()));
    }
    const bool flat = e.r_eff() == 1;
    if (!flat && (opt.dim_y == 0 || opt.dim_y > e.r_eff())) {
        throw InputError(fmt::format("y dimension {} outside 1..{}", opt.dim_y, e.r_eff()));
    }
    const auto n = static_cast<Eigen::Index>(e.members.size());
    const Eigen::VectorXd xs = e.coordinates.col(static_cast<Eigen::Index>(opt.dim_x - 1));
    const Eigen::VectorXd ys =
        flat ? Eigen::VectorXd::Zero(n) : Eigen::VectorXd(e.coordinates.col(static_cast<Eigen::Index>(opt.dim_y - 1)));

    constexpr double margin = 48.0;
    auto scale = [](double v, double lo, double hi, double a, double b) {
        if (hi - lo <= 0.0) return (a + b) / 2.0;
        return a + (v - lo) / (hi - lo) * (b - a);
    };
    const double x_lo = xs.minCoeff(), x_hi = xs.maxCoeff();
    const double y_lo = ys.minCoeff(), y_hi = ys.maxCoeff();

    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" "
        "viewBox=\"0 0 {0:.0f} {1:.0f}\" font-family=\"sans-serif\" font-size=\"11\">\n",
        opt.width, opt.height);
    out += fmt::format("<rect x=\"0\" y=\"0\" width=\"{:.0f}\" height=\"{:.0f}\" fill=\"white\"/>\n", opt.width,
                       opt.height);
    if (!opt.title.empty()) {
        out += fmt::format("<text x=\"{:.2f}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                           opt.width / 2.0, xml_escape(opt.title));
    }
    out += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"#888\"/>\n", margin,
                       opt.height - margin, opt.width - margin);
    out += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#888\"/>\n", margin,
                       opt.height - margin, margin);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">dim {}</text>\n", opt.width / 2.0,
                       opt.height - 12.0, opt.dim_x);
    if (!flat) {
        out += fmt::format("<text x=\"14\" y=\"{:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {:.2f})\">"
                           "dim {}</text>\n",
                           opt.height / 2.0, opt.height / 2.0, opt.dim_y);
    }
    for (Eigen::Index k = 0; k < n; ++k) {
        const double px = scale(xs(k), x_lo, x_hi, margin, opt.width - margin);
        const double py = scale(ys(k), y_lo, y_hi, opt.height - margin, margin);
        const std::string id = xml_escape(e.member_ids[static_cast<std::size_t>(k)]);
        out += fmt::format("<g class=\"sensor\" id=\"{0}\"><circle cx=\"{1:.2f}\" cy=\"{2:.2f}\" r=\"4\" "
                           "fill=\"#1f77b4\"/><text x=\"{3:.2f}\" y=\"{4:.2f}\">{0}</text></g>\n",
                           id, px, py, px + 6.0, py - 6.0);
    }
    out += "</svg>\n";
    return out;
}

std::string checkpoint_csv(const SimilarityTracker& tracker, std::span<const std::string> node_ids) {
    std::string out = "from,to,y,guess,cumulative_loss,revealed_count,running_sum_revealed\n";
    for (std::size_t k = 0; k < tracker.edges().size(); ++k) {
        const Edge& e = tracker.edges()[k];
        const EdgeState& s = tracker.states()[k];
        out += fmt::format("{},{},{},{},{},{},{}\n", quote(node_ids[e.a]), quote(node_ids[e.b]), format_double(s.y),
                           format_double(s.guess), format_double(s.cumulative_loss), s.revealed_count,
                           format_double(s.running_sum_revealed));
    }
    return out;
}

SimilarityTracker load_checkpoint(const fs::path& path, const FarmGraph& graph, double eta) {
    const Table t = read_csv(path);
    expect_header(t, path, {"from", "to", "y", "guess", "cumulative_loss", "revealed_count", "running_sum_revealed"});
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < graph.size(); ++i) index.emplace(graph.node_ids()[i], i);
    const auto& edges = graph.edges();
    std::vector<EdgeState> states(edges.size());
    std::vector<bool> seen(edges.size(), false);
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        const Row& r = t.rows[k];
        const auto a = index.find(r[0]);
        const auto b = index.find(r[1]);
        if (a == index.end() || b == index.end()) {
            throw InputError(fmt::format("{}:{}: unknown sensor in edge {}-{}", path.string(), t.lines[k], r[0], r[1]));
        }
        const Edge e{std::min(a->second, b->second), std::max(a->second, b->second)};
        const auto it = std::lower_bound(edges.begin(), edges.end(), e);
        if (it == edges.end() || *it != e) {
            throw InputError(fmt::format("{}:{}: edge {}-{} not in graph", path.string(), t.lines[k], r[0], r[1]));
        }
        const auto pos = static_cast<std::size_t>(it - edges.begin());
        if (seen[pos]) throw InputError(fmt::format("{}:{}: duplicate edge {}-{}", path.string(), t.lines[k], r[0], r[1]));
        seen[pos] = true;
        EdgeState& s = states[pos];
        s.y = parse_cell(path, t.lines[k], "y", r[2]);
        s.guess = parse_cell(path, t.lines[k], "guess", r[3]);
        s.cumulative_loss = parse_cell(path, t.lines[k], "cumulative_loss", r[4]);
        s.revealed_count = parse_count(path, t.lines[k], "revealed_count", r[5]);
        s.running_sum_revealed = parse_cell(path, t.lines[k], "running_sum_revealed", r[6]);
        if (s.guess < 0.0 || s.guess > 1.0) {
            throw InputError(fmt::format("{}:{}: guess {} outside [0,1]", path.string(), t.lines[k], r[3]));
        }
    }
    for (std::size_t k = 0; k < edges.size(); ++k) {
        if (!seen[k]) {
            throw InputError(fmt::format("{}: no state for edge {}-{}", path.string(), graph.node_ids()[edges[k].a],
                                         graph.node_ids()[edges[k].b]));
        }
    }
    SimilarityTracker tracker(edges, eta);
    tracker.restore(std::move(states));
    return tracker;
}

std::string regret_csv(std::span<const RegretPoint> curve) {
    std::string out = "t,algorithm_loss,best_constant_loss,regret\n";
    for (const auto& p : curve) {
        out += fmt::format("{},{},{},{}\n", p.t, format_double(p.algorithm_loss), format_double(p.best_constant_loss),
                           format_double(p.regret));
    }
    return out;
}

std::string sensor_report_csv(const EvalReport& report) {
    std::string out = "sensor_id,scored_rows,rmse,rmse_naive,improvement\n";
    for (const auto& s : report.sensors) {
        out += quote(s.sensor_id) + fmt::format(",{}", s.scored_rows);
        if (s.scored) {
            out += fmt::format(",{},{},{}\n", format_double(s.rmse), format_double(s.rmse_naive),
                               std::isnan(s.improvement) ? std::string() : format_double(s.improvement));
        } else {
            out += ",,,\n";
        }
    }
    return out;
}

std::string summary_csv(std::span<const EvalReport> reports) {
    std::string out =
        "method,kernel,r,setup,row_begin,row_end,mean_rmse,sd_rmse,mean_rmse_naive,sd_rmse_naive,"
        "avg_improvement_per_sensor,sd_improvement,improvement_of_mean_rmse,best_sensor,best_improvement,"
        "worst_sensor,worst_improvement";
    for (std::size_t k = 0; k < kProvenanceKinds; ++k) {
        out += fmt::format(",n_{}", to_string(static_cast<Provenance>(k)));
    }
    out += '\n';
    for (const auto& r : reports) {
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}", to_string(r.config.method),
                           to_string(r.config.kernel), r.config.r, to_string(r.setup), r.row_begin, r.row_end,
                           format_double(r.mean_rmse), format_double(r.sd_rmse), format_double(r.mean_rmse_naive),
                           format_double(r.sd_rmse_naive), format_double(r.mean_improvement),
                           format_double(r.sd_improvement), format_double(r.improvement_of_mean),
                           quote(r.best_sensor), format_double(r.best_improvement), quote(r.worst_sensor),
                           format_double(r.worst_improvement));
        for (std::size_t c : r.provenance_counts) out += fmt::format(",{}", c);
        out += '\n';
    }
    return out;
}

std::string reports_json(std::span<const EvalReport> reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) {
        nlohmann::json j;
        j["method"] = to_string(r.config.method);
        j["kernel"] = to_string(r.config.kernel);
        j["r"] = r.config.r;
        j["learning_rate"] = r.config.learning_rate;
        j["weight_floor"] = r.config.weight_floor;
        j["setup"] = to_string(r.setup);
        j["row_begin"] = r.row_begin;
        j["row_end"] = r.row_end;
        j["mean_rmse"] = r.mean_rmse;
        j["sd_rmse"] = r.sd_rmse;
        j["mean_rmse_naive"] = r.mean_rmse_naive;
        j["sd_rmse_naive"] = r.sd_rmse_naive;
        j["avg_improvement_per_sensor"] = r.mean_improvement;
        j["sd_improvement"] = r.sd_improvement;
        j["improvement_of_mean_rmse"] = r.improvement_of_mean;
        j["best"] = {{"sensor", r.best_sensor}, {"improvement", r.best_improvement}};
        j["worst"] = {{"sensor", r.worst_sensor}, {"improvement", r.worst_improvement}};
        nlohmann::json prov;
        for (std::size_t k = 0; k < kProvenanceKinds; ++k) {
            prov[std::string(to_string(static_cast<Provenance>(k)))] = r.provenance_counts[k];
        }
        j["provenance"] = prov;
        j["completeness"] = {{"total_rows", r.completeness.total_rows},
                             {"complete_rows", r.completeness.complete_rows},
                             {"incomplete_rows", r.completeness.incomplete_rows},
                             {"missing_histogram", r.completeness.missing_histogram}};
        nlohmann::json sensors = nlohmann::json::array();
        for (const auto& s : r.sensors) {
            nlohmann::json js;
            js["sensor_id"] = s.sensor_id;
            js["scored_rows"] = s.scored_rows;
            js["rmse"] = s.scored ? number_or_null(s.rmse) : nullptr;
            js["rmse_naive"] = s.scored ? number_or_null(s.rmse_naive) : nullptr;
            js["improvement"] = s.scored ? number_or_null(s.improvement) : nullptr;
            sensors.push_back(std::move(js));
        }
        j["sensors"] = std::move(sensors);
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

std::string kernel_table_csv(std::span<const EvalReport> reports, Method method, std::size_t r) {
    std::vector<Kernel> kernels;
    std::vector<Setup> setups;
    for (const auto& rep : reports) {
        if (rep.config.method != method || (is_graph_method(method) && rep.config.r != r)) continue;
        if (std::find(kernels.begin(), kernels.end(), rep.config.kernel) == kernels.end()) kernels.push_back(rep.config.kernel);
        if (std::find(setups.begin(), setups.end(), rep.setup) == setups.end()) setups.push_back(rep.setup);
    }
    std::sort(kernels.begin(), kernels.end());
    std::sort(setups.begin(), setups.end());
    std::string out = "setup";
    for (Kernel k : kernels) out += fmt::format(",{0},{0}_sd", to_string(k));
    out += '\n';
    for (Setup s : setups) {
        out += to_string(s);
        for (Kernel k : kernels) {
            const auto it = std::find_if(reports.begin(), reports.end(), [&](const EvalReport& rep) {
                return rep.config.method == method && rep.config.kernel == k && rep.setup == s &&
                       (!is_graph_method(method) || rep.config.r == r);
            });
            if (it == reports.end()) {
                out += ",,";
            } else {
                out += fmt::format(",{},{}", format_double(it->mean_improvement), format_double(it->sd_improvement));
            }
        }
        out += '\n';
    }
    return out;
}

std::string dimension_table_csv(std::span<const EvalReport> reports, Method method) {
    std::map<std::pair<Setup, std::size_t>, std::vector<double>> pooled;
    std::set<std::size_t> dims;
    std::set<Setup> setups;
    for (const auto& rep : reports) {
        if (rep.config.method != method) continue;
        dims.insert(rep.config.r);
        setups.insert(rep.setup);
        auto& xs = pooled[{rep.setup, rep.config.r}];
        for (const auto& s : rep.sensors) {
            if (s.scored && !std::isnan(s.improvement)) xs.push_back(s.improvement);
        }
    }
    std::string out = "setup";
    for (std::size_t r : dims) out += fmt::format(",r{0},r{0}_sd", r);
    out += '\n';
    for (Setup s : setups) {
        out += to_string(s);
        for (std::size_t r : dims) {
            const auto& xs = pooled[{s, r}];
            if (xs.empty()) {
                out += ",,";
                continue;
            }
            double mean = 0.0;
            for (double x : xs) mean += x;
            mean /= static_cast<double>(xs.size());
            out += fmt::format(",{},{}", format_double(mean), format_double(sample_sd(xs, mean)));
        }
        out += '\n';
    }
    return out;
}

std::string manifest_json(const Manifest& m) {
    nlohmann::ordered_json j;
    j["tool"] = "spectral_imputer";
    j["version"] = version();
    j["command"] = m.command;
    j["seed"] = m.seed;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : m.config) cfg[k] = v;
    j["config"] = cfg;
    j["outputs"] = m.outputs;
    return j.dump(2) + "\n";
}

std::string_view version() { return "0.1.0"; }

}  // namespace spimpute::io
