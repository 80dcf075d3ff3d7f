#include "spimpute/error.hpp"
#include "spimpute/io.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <regex>

using namespace spimpute;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("spimpute_io_" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path write(const std::string& name, const std::string& content) const {
        std::ofstream(path / name) << content;
        return path / name;
    }
};

FarmLayout three_sensors() {
    return FarmLayout({{"a", 0, 0, 7.0}, {"b", 0, 1, 7.0}, {"c", 1, 0, 7.0}});
}

}  // namespace

TEST_CASE("raw panel: normalization, missing cells and clamping") {
    const TempDir dir;
    const auto p = dir.write("p.csv", "timestamp,c,a,b\n1,7.7,3.5,\n2,0,-1,7\n");
    const io::PanelLoad load = io::load_panel(p, three_sensors());
    const Panel& panel = load.panel;
    CHECK(panel.rows() == 2);
    CHECK(panel.value(0, 0) == 0.5);
    CHECK_FALSE(panel.observed(0, 1));
    CHECK(panel.value(0, 2) == 1.0);
    CHECK(panel.value(1, 0) == 0.0);
    CHECK(panel.value(1, 1) == 1.0);
    CHECK(load.clamped == 2);
}

TEST_CASE("panel errors carry file position") {
    const TempDir dir;
    const FarmLayout l = three_sensors();
    auto message = [&](const std::string& body) {
        try {
            io::load_panel(dir.write("bad.csv", body), l);
        } catch (const InputError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message("timestamp,a,b,z\n1,1,1,1\n").find("'z'") != std::string::npos);
    CHECK(message("timestamp,a,b\n1,1,1\n").find("'c'") != std::string::npos);
    CHECK(message("timestamp,a,b,c\n2,1,1,1\n1,1,1,1\n").find(":3:") != std::string::npos);
    CHECK(message("timestamp,a,b,c\n2,1,1,1\n2,1,1,1\n").find(":3:") != std::string::npos);
    const std::string junk = message("timestamp,a,b,c\n1,1,x,1\n");
    CHECK(junk.find(":2:") != std::string::npos);
    CHECK(junk.find("'b'") != std::string::npos);
    CHECK_THROWS_AS(io::load_panel(dir.path / "missing.csv", l), InputError);
}

TEST_CASE("string timestamps compare lexically") {
    const TempDir dir;
    const auto p = dir.write("p.csv", "timestamp,a,b,c\n2016-01-01T00:00,1,1,1\n2016-01-01T00:10,1,1,1\n");
    CHECK(io::load_panel(p, three_sensors()).panel.rows() == 2);
    const auto q = dir.write("q.csv", "timestamp,a,b,c\n2016-01-01T00:10,1,1,1\n2016-01-01T00:00,1,1,1\n");
    CHECK_THROWS_AS(io::load_panel(q, three_sensors()), InputError);
}

TEST_CASE("normalized panels round-trip exactly") {
    const TempDir dir;
    const FarmLayout l = grid_layout(2, 3);
    Panel p = synth_panel(l, {50, 1.0, 0.8, 3});
    p = apply_missingness(p, {Mechanism::mcar, 0.2, 6, 4});
    const auto path = dir.write("p.csv", io::panel_csv(p, l));
    CHECK(io::load_panel(path, l, io::Units::normalized).panel == p);
}

TEST_CASE("layout and edges") {
    const TempDir dir;
    const auto lp = dir.write("l.csv", "sensor_id,latitude,longitude,nominal_capacity\nx,0,0,2\ny,1,0,2\n");
    const FarmLayout l = io::load_layout(lp);
    CHECK(l.size() == 2);
    CHECK(l[1].nominal_capacity == 2.0);
    CHECK(io::load_layout(dir.write("l2.csv", io::layout_csv(l))).sensors()[1].latitude == 1.0);
    CHECK_THROWS_AS(io::load_layout(dir.write("l3.csv", "sensor_id,latitude,longitude,nominal_capacity\nx,0,0,0\n")),
                    InputError);

    const auto ep = dir.write("e.csv", "from,to\nx,y\ny,x\nx,y\n");
    const auto edges = io::load_edges(ep);
    REQUIRE(edges.size() == 1);
    CHECK(edges[0] == std::pair<std::string, std::string>{"x", "y"});
    CHECK_THROWS_AS(io::load_edges(dir.write("e2.csv", "from,to\nx,x\n")), InputError);
}

TEST_CASE("checkpoint round trip") {
    const TempDir dir;
    const FarmLayout l = grid_layout(2, 2);
    const FarmGraph g = build_graph(l, propose_grid_edges(l));
    SimilarityTracker tr(g.edges(), 0.3);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int round = 0; round < 20; ++round) {
        std::vector<std::optional<double>> rev(g.edges().size());
        for (auto& x : rev)
            if (u(rng) < 0.7) x = u(rng);
        tr.update(rev);
    }
    const auto path = dir.write("ck.csv", io::checkpoint_csv(tr, g.node_ids()));
    const SimilarityTracker back = io::load_checkpoint(path, g, 0.3);
    REQUIRE(back.states().size() == tr.states().size());
    for (std::size_t e = 0; e < tr.states().size(); ++e) {
        CHECK(back.states()[e].y == tr.states()[e].y);
        CHECK(back.states()[e].guess == tr.states()[e].guess);
        CHECK(back.states()[e].cumulative_loss == tr.states()[e].cumulative_loss);
        CHECK(back.states()[e].revealed_count == tr.states()[e].revealed_count);
    }
}

TEST_CASE("embedding svg: one labeled point per sensor, deterministic") {
    const FarmLayout l = grid_layout(5, 7);
    const FarmGraph g = build_graph(l, propose_grid_edges(l));
    const Embedding e = embed(g, components(g), 2).embeddings.at(0);
    const std::string svg = io::embedding_svg(e);
    CHECK(svg == io::embedding_svg(e));
    const std::regex point("<circle ");
    const std::regex label("<text[^>]*>[A-E]0[1-7]</text>");
    CHECK(std::distance(std::sregex_iterator(svg.begin(), svg.end(), point), std::sregex_iterator()) == 35);
    CHECK(std::distance(std::sregex_iterator(svg.begin(), svg.end(), label), std::sregex_iterator()) == 35);
    CHECK(svg.rfind("<svg", 0) == 0);
}

TEST_CASE("format_double is round-trip exact") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
        const double v = u(rng);
        CHECK(std::stod(io::format_double(v)) == v);
    }
    CHECK(io::format_double(0.5) == "0.5");
}

TEST_CASE("manifest records config and version without clock data") {
    io::Manifest m{"impute", {{"method", "weighted_graph"}, {"r", "2"}}, 7, {"filled.csv"}};
    const std::string j = io::manifest_json(m);
    CHECK(j == io::manifest_json(m));
    CHECK(j.find("weighted_graph") != std::string::npos);
    CHECK(j.find(std::string(io::version())) != std::string::npos);
}

TEST_CASE("write_atomic leaves no temporary behind") {
    const TempDir dir;
    io::write_atomic(dir.path / "x.txt", "hello");
    CHECK(io::read_file(dir.path / "x.txt") == "hello");
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& f : fs::directory_iterator(dir.path)) ++files;
    CHECK(files == 1);
}
