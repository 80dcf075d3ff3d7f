#include "spimpute/error.hpp"
#include "spimpute/online.hpp"

#include <doctest.h>

#include <cmath>
#include <optional>
#include <random>

using namespace spimpute;

namespace {

EdgeState at(double guess) {
    EdgeState s;
    s.guess = guess;
    s.y = guess;
    return s;
}

std::vector<std::optional<double>> gappy(std::mt19937_64& rng, std::size_t len, double reveal_p) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::bernoulli_distribution rev(reveal_p);
    std::vector<std::optional<double>> h(len);
    for (auto& x : h) {
        if (rev(rng)) x = u(rng);
    }
    return h;
}

}  // namespace

TEST_CASE("single OGD steps") {
    const EdgeState a = step(at(0.6), 0.9, 0.1);
    CHECK(a.y == doctest::Approx(0.66).epsilon(1e-15));
    CHECK(a.guess == doctest::Approx(0.66).epsilon(1e-15));
    CHECK(a.cumulative_loss == doctest::Approx(0.09).epsilon(1e-15));
    CHECK(a.revealed_count == 1);
    CHECK(a.running_sum_revealed == 0.9);

    CHECK(step(at(0.6), 0.9, 0.5).guess == 0.9);

    const EdgeState c = step(at(0.6), std::nullopt, 0.3);
    CHECK(c.guess == 0.6);
    CHECK(c.cumulative_loss == 0.0);
    CHECK(c.revealed_count == 0);

    const EdgeState d = step(at(0.1), 1.0, 5.0);
    CHECK(d.y == doctest::Approx(9.1).epsilon(1e-15));
    CHECK(d.guess == 1.0);

    CHECK_THROWS_AS(step(at(0.5), 1.2, 0.5), InputError);
    CHECK_THROWS_AS(step(at(0.5), -0.01, 0.5), InputError);
}

TEST_CASE("the unprojected state is carried forward") {
    // y = 9.1 after the first step; a revealed 0 pulls y to 9.1 - 10 = -0.9,
    // which projects to 0. Resynchronizing y to 1 would give 1 - 10 -> 0 too,
    // so use a smaller second pull to tell them apart.
    const EdgeState d = step(at(0.1), 1.0, 5.0);
    const EdgeState e = step(d, 0.5, 5.0);  // y = 9.1 + 10 * (0.5 - 1.0) = 4.1
    CHECK(e.y == doctest::Approx(4.1));
    CHECK(e.guess == 1.0);
}

TEST_CASE("persistence at eta = 0.5") {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 200; ++trial) {
        const auto h = gappy(rng, 200, 0.4);
        const OgdTrace tr = run_lazy_ogd(h, 0.5);
        double last = 1.0;
        for (std::size_t t = 0; t < h.size(); ++t) {
            CHECK(tr.guesses[t] == last);
            if (h[t]) last = *h[t];
        }
    }
}

TEST_CASE("projection, gradient bound and loss accounting") {
    std::mt19937_64 rng(52);
    std::uniform_real_distribution<double> eta_d(0.01, 8.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto h = gappy(rng, 100, 0.6);
        const double eta = eta_d(rng);
        EdgeState s;
        double prev_loss = 0.0;
        for (const auto& x : h) {
            const EdgeState n = step(s, x, eta);
            CHECK(n.guess >= 0.0);
            CHECK(n.guess <= 1.0);
            CHECK(n.cumulative_loss >= prev_loss);
            if (x) {
                CHECK(std::abs(2.0 * (*x - s.guess)) <= 2.0);
            } else {
                CHECK(n.cumulative_loss == s.cumulative_loss);
                CHECK(n.guess == s.guess);
                CHECK(n.y == s.y);
            }
            prev_loss = n.cumulative_loss;
            s = n;
        }
    }
}

TEST_CASE("best constant") {
    const std::vector<std::optional<double>> a{0.2, std::nullopt, 0.8};
    CHECK(best_constant(a) == doctest::Approx(0.5));
    const std::vector<std::optional<double>> b{std::nullopt, 0.7, std::nullopt, std::nullopt};
    CHECK(best_constant(b) == 0.7);
    const std::vector<std::optional<double>> c{0.3, 0.3, 0.3};
    CHECK(best_constant(c) == doctest::Approx(0.3));
    const std::vector<std::optional<double>> none{std::nullopt, std::nullopt};
    CHECK_THROWS_AS(best_constant(none), UndefinedError);
}

TEST_CASE("regret") {
    const std::vector<std::optional<double>> h{0.2, std::nullopt, 0.8};
    const std::vector<double> perfect{0.0, 0.0, 0.0};
    CHECK(regret(perfect, h) == doctest::Approx(-constant_loss(0.5, h)));
    CHECK(regret(perfect, h) <= 0.0);

    const std::vector<std::optional<double>> flat{0.4, 0.4, std::nullopt, 0.4};
    const OgdTrace tr = run_lazy_ogd(flat, 0.5, at(0.4));
    CHECK(regret(tr.losses, flat) == doctest::Approx(0.0));
}

TEST_CASE("theoretical rate") {
    CHECK(theoretical_rate(100) == doctest::Approx(0.05));
    CHECK(theoretical_rate(1) == 0.5);
    CHECK(theoretical_rate(4) == 0.25);
    CHECK_THROWS(theoretical_rate(0));
}

TEST_CASE("regret stays under 1.5 sqrt(T) at the theoretical rate") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 100; ++trial) {
        const auto h = gappy(rng, 2000, 0.7);
        std::size_t revealed = 0;
        for (const auto& x : h) revealed += x.has_value();
        const OgdTrace tr = run_lazy_ogd(h, theoretical_rate(revealed));
        CHECK(regret(tr.losses, h) <= 1.5 * std::sqrt(static_cast<double>(revealed)));
    }
}

TEST_CASE("regret curve ends at the total regret") {
    std::mt19937_64 rng(54);
    const auto h = gappy(rng, 300, 0.5);
    const auto curve = regret_curve(h, 0.3);
    const OgdTrace tr = run_lazy_ogd(h, 0.3);
    REQUIRE(curve.size() == h.size());
    CHECK(curve.back().t == h.size());
    CHECK(curve.back().regret == doctest::Approx(regret(tr.losses, h)).epsilon(1e-9));
    for (std::size_t t = 1; t < curve.size(); ++t) CHECK(curve[t].algorithm_loss >= curve[t - 1].algorithm_loss);
}

TEST_CASE("tracker rounds and restore") {
    SimilarityTracker tr({{0, 1}, {1, 2}}, 0.5);
    const std::vector<std::optional<double>> round{0.3, std::nullopt};
    tr.update(round);
    CHECK(tr.rounds() == 1);
    CHECK(tr.guess(0) == 0.3);
    CHECK(tr.guess(1) == 1.0);
    const std::vector<std::optional<double>> wrong{0.3};
    CHECK_THROWS_AS(tr.update(wrong), InputError);

    SimilarityTracker copy({{0, 1}, {1, 2}}, 0.5);
    copy.restore(tr.states(), tr.rounds());
    CHECK(copy.guesses() == tr.guesses());
}
