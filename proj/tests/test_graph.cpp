#include "support.hpp"

#include "spimpute/error.hpp"
#include "spimpute/graph.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>
#include <random>

using namespace spimpute;

namespace {

FarmLayout abc() {
    return FarmLayout({{"a", 0, 0, 1}, {"b", 0, 1, 1}, {"c", 0, 2, 1}});
}

FarmGraph path3() {
    const std::vector<std::pair<std::string, std::string>> edges{{"a", "b"}, {"b", "c"}};
    return build_graph(abc(), edges);
}

}  // namespace

TEST_CASE("layout validation") {
    CHECK_THROWS_AS(FarmLayout({{"a", 0, 0, 1}, {"a", 1, 1, 1}}), InputError);
    CHECK_THROWS_AS(FarmLayout({{"", 0, 0, 1}}), InputError);
    CHECK_THROWS_AS(FarmLayout({{"a", 0, 0, 0}}), InputError);
    CHECK_THROWS_AS(FarmLayout({{"a", 0, 0, -2}}), InputError);
    const FarmLayout l = abc();
    CHECK(l.index_of("c") == 2);
    CHECK_FALSE(l.find("z"));
    CHECK_THROWS_AS(l.index_of("z"), LookupError);
    CHECK(l.geo_distance(0, 2) == doctest::Approx(2.0));
}

TEST_CASE("build_graph on a path gives degrees 1,2,1") {
    const FarmGraph g = path3();
    CHECK(g.node_ids() == std::vector<std::string>{"a", "b", "c"});
    CHECK(g.degrees() == std::vector<std::size_t>{1, 2, 1});
}

TEST_CASE("build_graph rejects self-loops and unknown ids") {
    const std::vector<std::pair<std::string, std::string>> loop{{"a", "a"}};
    CHECK_THROWS_AS(build_graph(abc(), loop), InputError);
    const std::vector<std::pair<std::string, std::string>> unknown{{"a", "q"}};
    CHECK_THROWS_AS(build_graph(abc(), unknown), InputError);
}

TEST_CASE("duplicate and reversed edges collapse") {
    const std::vector<std::pair<std::string, std::string>> edges{{"a", "b"}, {"b", "a"}, {"a", "b"}, {"c", "b"}};
    CHECK(build_graph(abc(), edges).edges().size() == 2);
}

TEST_CASE("king-move grid graph: corners have degree 3") {
    const FarmLayout grid = grid_layout(5, 7);
    CHECK(grid.size() == 35);
    CHECK(grid[0].id == "A01");
    CHECK(grid[34].id == "E07");
    const FarmGraph g = build_graph(grid, propose_grid_edges(grid));
    const auto deg = g.degrees();
    for (std::size_t corner : {0u, 6u, 28u, 34u}) CHECK(deg[corner] == 3);
    CHECK(deg[8] == 8);  // interior
    CHECK(deg[1] == 5);  // edge
    // 5*6 + 4*7 orthogonal plus 2*4*6 diagonal edges
    CHECK(g.edges().size() == 58 + 48);
    const FarmGraph plain = build_graph(grid, propose_grid_edges(grid, false));
    CHECK(plain.edges().size() == 58);
    CHECK(plain.degrees()[0] == 2);
}

TEST_CASE("adjacency") {
    const FarmGraph g = path3();
    Eigen::MatrixXd expected(3, 3);
    expected << 0, 1, 0, 1, 0, 1, 0, 1, 0;
    CHECK(g.adjacency() == expected);

    const std::vector<double> w{0.8, 1.0};
    const Eigen::MatrixXd a = g.with_weights(w).adjacency();
    CHECK(a(0, 1) == 0.8);
    CHECK(a(1, 0) == 0.8);

    const FarmGraph empty({"a", "b"}, {});
    CHECK(empty.adjacency() == Eigen::MatrixXd::Zero(2, 2));

    const std::vector<double> bad{1.5, 0.2};
    CHECK_THROWS_AS(g.with_weights(bad), InputError);
}

TEST_CASE("laplacian") {
    const LaplacianPair lp = path3().laplacian();
    CHECK(lp.degree == Eigen::Vector3d(1, 2, 1));
    Eigen::MatrixXd expected(3, 3);
    expected << 1, -1, 0, -1, 2, -1, 0, -1, 1;
    CHECK(lp.laplacian == expected);

    const FarmGraph iso({"a", "b", "c"}, {{0, 1}});
    CHECK(iso.laplacian().degree(2) == 0.0);

    const std::vector<double> half{0.5, 0.5};
    CHECK(path3().with_weights(half).laplacian().degree == Eigen::Vector3d(0.5, 1.0, 0.5));
}

TEST_CASE("components") {
    const std::vector<double> severed{1.0, 0.0};
    const ComponentPartition p = components(path3().with_weights(severed));
    CHECK(p.count() == 2);
    CHECK(p.members(0) == std::vector<std::size_t>{0, 1});
    CHECK(p.members(1) == std::vector<std::size_t>{2});

    const FarmGraph k4({"a", "b", "c", "d"}, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    CHECK(components(k4).count() == 1);

    const FarmGraph p5({"a", "b", "c", "d", "e"}, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
    const std::vector<double> w{1.0, 1.0, 1e-15, 1.0};
    const ComponentPartition q = components(p5.with_weights(w), 1e-12);
    CHECK(q.sizes() == std::vector<std::size_t>{3, 2});
}

TEST_CASE("component labels follow the smallest member") {
    const FarmGraph g({"a", "b", "c", "d"}, {{1, 3}});
    const ComponentPartition p = components(g);
    CHECK(p.assignment() == std::vector<int>{0, 1, 2, 1});
}

TEST_CASE("property: adjacency symmetric, zero diagonal; L positive semidefinite") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> z;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + trial % 15;
        const oracle::Farm f = support::random_farm(n, rng);
        const FarmGraph g = support::graph_of(f);
        std::vector<double> w(g.edges().size());
        for (double& x : w) x = u(rng);
        const FarmGraph wg = g.with_weights(w);
        const Eigen::MatrixXd a = wg.adjacency();
        CHECK(a == a.transpose());
        CHECK(a.diagonal().isZero(0.0));
        const Eigen::MatrixXd l = wg.laplacian().laplacian;
        for (int k = 0; k < 20; ++k) {
            Eigen::VectorXd v(static_cast<Eigen::Index>(n));
            for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = z(rng);
            CHECK(v.dot(l * v) >= -1e-10);
        }
        CHECK((l.rowwise().sum()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("property: union-find count equals zero multiplicity of D^+ L") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::bernoulli_distribution cut(0.3);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + trial % 20;
        const oracle::Farm f = support::random_farm(n, rng, 0.15);
        const FarmGraph g = support::graph_of(f);
        std::vector<double> w(g.edges().size());
        for (double& x : w) x = cut(rng) ? 0.0 : u(rng);
        const FarmGraph wg = g.with_weights(w);
        const LaplacianPair lp = wg.laplacian();
        Eigen::MatrixXd rw = lp.laplacian;
        for (Eigen::Index i = 0; i < rw.rows(); ++i) {
            rw.row(i) *= lp.degree(i) > 0 ? 1.0 / lp.degree(i) : 0.0;
        }
        Eigen::EigenSolver<Eigen::MatrixXd> es(rw, false);
        std::size_t zeros = 0;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) zeros += std::abs(es.eigenvalues()(i)) < 1e-9;
        CHECK(zeros == components(wg).count());
    }
}

TEST_CASE("property: partition invariant under node permutation") {
    std::mt19937_64 rng(13);
    std::bernoulli_distribution cut(0.4);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 3 + trial % 10;
        const oracle::Farm f = support::random_farm(n, rng, 0.1);
        const FarmGraph g = support::graph_of(f);
        std::vector<double> w(g.edges().size());
        for (double& x : w) x = cut(rng) ? 0.0 : 1.0;
        const ComponentPartition p = components(g.with_weights(w));

        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<Edge> pe;
        std::vector<double> pw;
        std::vector<std::string> ids(n);
        for (std::size_t i = 0; i < n; ++i) ids[perm[i]] = g.node_ids()[i];
        std::vector<std::pair<Edge, double>> tmp;
        for (std::size_t k = 0; k < g.edges().size(); ++k) {
            const Edge e = g.edges()[k];
            tmp.push_back({{std::min(perm[e.a], perm[e.b]), std::max(perm[e.a], perm[e.b])}, w[k]});
        }
        std::sort(tmp.begin(), tmp.end());
        for (auto& [e, x] : tmp) {
            pe.push_back(e);
            pw.push_back(x);
        }
        const ComponentPartition q = components(FarmGraph(ids, pe).with_weights(pw));
        REQUIRE(q.count() == p.count());
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                CHECK((p.component_of(i) == p.component_of(j)) == (q.component_of(perm[i]) == q.component_of(perm[j])));
    }
}
