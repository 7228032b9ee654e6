#include <doctest.h>

#include <cmath>
#include <fstream>

#include "steinpair/colored_graph.hpp"
#include "steinpair/estimators.hpp"

using namespace steinpair;

namespace {

// brute-force conditional moments over the c resample outcomes of one vertex
CondStats brute_cond_stats(const ColoredGraphModel& model,
                           const std::vector<std::int32_t>& xi) {
    const Graph& g = model.graph();
    const int n = g.n, c = model.colors();
    const double sigma = model.sigma();
    auto t_of = [&](int i, std::int32_t col) {
        int cnt = 0;
        for (const int j : g.adj[static_cast<std::size_t>(i)])
            cnt += xi[static_cast<std::size_t>(j)] == col;
        return cnt - static_cast<double>(g.degree(i)) / c;
    };
    CondStats cs;
    double wacc = 0.0;
    for (int i = 0; i < n; ++i) wacc += t_of(i, xi[static_cast<std::size_t>(i)]);
    cs.w = wacc / (2.0 * sigma);
    double ed = 0.0, ed2 = 0.0, edabs = 0.0, ed3 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double own = t_of(i, xi[static_cast<std::size_t>(i)]);
        for (std::int32_t fresh = 0; fresh < c; ++fresh) {
            const double delta = (own - t_of(i, fresh)) / sigma;
            ed += delta;
            ed2 += delta * delta;
            edabs += delta * std::abs(delta);
            ed3 += delta * delta * delta;
        }
    }
    const double cells = static_cast<double>(n) * c;
    cs.ed = ed / cells;
    cs.ed2 = ed2 / cells;
    cs.edabs = edabs / cells;
    cs.ed3 = ed3 / cells;
    return cs;
}

}  // namespace

TEST_CASE("uniform coloring sampler: frequency band and proper-coloring rate") {
    // color-0 frequency on a large path graph
    std::vector<std::pair<int, int>> edges;
    const int big = 1000000;
    edges.reserve(big - 1);
    for (int i = 0; i + 1 < big; ++i) edges.emplace_back(i, i + 1);
    const ColoredGraphModel path(Graph::from_edges(big, edges), 2);
    RngStream rng = derive_stream(61, 0, 0);
    const auto xi = path.sample_config(rng);
    double freq = 0.0;
    for (const auto c : xi) freq += c == 0;
    freq /= big;
    CHECK(std::abs(freq - 0.5) <= 4e-3);

    // P(K4 properly colored with 4 colors) = 4!/4^4
    const ColoredGraphModel k4(Graph::complete(4), 4);
    int proper = 0;
    const int reps = 100000;
    for (int r = 0; r < reps; ++r) {
        const auto col = k4.sample_config(rng);
        const bool ok = col[0] != col[1] && col[0] != col[2] && col[0] != col[3] &&
                        col[1] != col[2] && col[1] != col[3] && col[2] != col[3];
        proper += ok;
    }
    const double p = static_cast<double>(proper) / reps;
    CHECK(std::abs(p - 24.0 / 256.0) <= 4.0 * std::sqrt(0.09375 * 0.90625 / reps));
}

TEST_CASE("c = 1 is rejected at construction") {
    CHECK_THROWS_AS(ColoredGraphModel(Graph::complete(4), 1), std::invalid_argument);
}

TEST_CASE("monochromatic configuration: W = sqrt(m) for c = 2") {
    for (const int n : {4, 5, 9}) {
        const ColoredGraphModel model(Graph::complete(n), 2);
        const std::vector<std::int32_t> all_zero(static_cast<std::size_t>(n), 0);
        const double m = static_cast<double>(model.graph().edges);
        CHECK(model.w_of(all_zero) == doctest::Approx(std::sqrt(m)).epsilon(1e-12));
    }
}

TEST_CASE("regression identity ed = (2/n) W exactly on random graphs") {
    RngStream rng = derive_stream(62, 0, 0);
    double worst = 0.0;
    for (int rep = 0; rep < 300; ++rep) {
        const int n = 3 + static_cast<int>(rng.below(48));
        Graph g = Graph::erdos_renyi(n, 0.4, rng.next_u64());
        if (g.edges == 0) continue;
        const ColoredGraphModel model(std::move(g), 2 + static_cast<int>(rng.below(5)));
        const auto xi = model.sample_config(rng);
        const CondStats cs = model.cond_stats(xi);
        worst = std::max(worst, std::abs(cs.ed - 2.0 / n * cs.w));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("exact-sum kernel equals brute enumeration over resample outcomes") {
    RngStream rng = derive_stream(63, 0, 0);
    double worst = 0.0;
    for (int rep = 0; rep < 60; ++rep) {
        const int n = 4 + static_cast<int>(rng.below(5));  // n <= 8
        Graph g = Graph::erdos_renyi(n, 0.6, rng.next_u64());
        if (g.edges == 0) continue;
        const ColoredGraphModel model(std::move(g), 2 + static_cast<int>(rng.below(2)));
        const auto xi = model.sample_config(rng);
        const CondStats fast = model.cond_stats(xi);
        const CondStats brute = brute_cond_stats(model, xi);
        worst = std::max({worst, std::abs(fast.ed2 - brute.ed2),
                          std::abs(fast.edabs - brute.edabs),
                          std::abs(fast.ed3 - brute.ed3), std::abs(fast.w - brute.w)});
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("K3 with c = 2: mean of ed2/(2 lambda) over all 8 colorings is exactly 1") {
    const ColoredGraphModel model(Graph::complete(3), 2);
    double acc = 0.0;
    for (int mask = 0; mask < 8; ++mask) {
        const std::vector<std::int32_t> xi = {static_cast<std::int32_t>(mask & 1),
                                              static_cast<std::int32_t>((mask >> 1) & 1),
                                              static_cast<std::int32_t>((mask >> 2) & 1)};
        acc += model.cond_stats(xi).ed2;
    }
    acc /= 8.0;
    CHECK(std::abs(acc / (2.0 * model.lambda()) - 1.0) <= 1e-12);
}

TEST_CASE("delta_max: enumerated maximum vs the contractual bound") {
    const ColoredGraphModel model(Graph::complete(4), 2);
    const double sigma = model.sigma();
    double max_delta = 0.0;
    for (int mask = 0; mask < 16; ++mask) {
        std::vector<std::int32_t> xi(4);
        for (int i = 0; i < 4; ++i) xi[static_cast<std::size_t>(i)] = (mask >> i) & 1;
        const double w = model.w_of(xi);
        for (int i = 0; i < 4; ++i) {
            for (std::int32_t fresh = 0; fresh < 2; ++fresh) {
                auto alt = xi;
                alt[static_cast<std::size_t>(i)] = fresh;
                max_delta = std::max(max_delta, std::abs(w - model.w_of(alt)));
            }
        }
    }
    CHECK(max_delta == doctest::Approx(3.0 / sigma).epsilon(1e-12));  // attained bound d*/sigma
    CHECK(model.delta_max() == doctest::Approx(2.0 * 3.0 / sigma).epsilon(1e-12));
    CHECK(max_delta <= model.delta_max());
}

TEST_CASE("theoretical bound factor: complete and regular graphs") {
    const int n = 16;
    const ColoredGraphModel kn(Graph::complete(n), n);
    const double m = n * (n - 1) / 2.0;
    CHECK(kn.theoretical_bound_factor() ==
          doctest::Approx(std::sqrt(1.0 / n) + std::sqrt((n - 1.0) / m) + std::sqrt(n / m))
              .epsilon(1e-12));

    // d-regular: d* = d, m = nd/2 -> sqrt(1/c) + sqrt(2/n) + sqrt(2c/(nd))
    const int d = 4, c = 5, nn = 20;
    const ColoredGraphModel reg(Graph::random_regular(nn, d, 7), c);
    CHECK(reg.graph().max_degree == d);
    CHECK(reg.theoretical_bound_factor() ==
          doctest::Approx(std::sqrt(1.0 / c) + std::sqrt(2.0 / nn) +
                          std::sqrt(2.0 * c / (static_cast<double>(nn) * d)))
              .epsilon(1e-12));

    // fixed graph: the bracket diverges as c grows
    const ColoredGraphModel few(Graph::complete(8), 4);
    const ColoredGraphModel many(Graph::complete(8), 4000);
    CHECK(many.theoretical_bound_factor() > few.theoretical_bound_factor());
}

TEST_CASE("standardization: E W = 0 and Var W near 1") {
    const ColoredGraphModel model(Graph::erdos_renyi(40, 0.3, 11), 3);
    std::vector<double> w(20000);
    for (std::size_t i = 0; i < w.size(); ++i) {
        RngStream rng = derive_stream(64, kStreamRates, i);
        w[i] = model.w_of(model.sample_config(rng));
    }
    const MeanSe ms = mean_se(w);
    CHECK(std::abs(ms.mean) <= 4.0 * ms.se);
    double var = 0.0;
    for (const double x : w) var += (x - ms.mean) * (x - ms.mean);
    var /= static_cast<double>(w.size() - 1);
    CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("edge-list round trip") {
    const std::string path = "test_edges.txt";
    {
        std::ofstream out(path);
        out << "# triangle plus a pendant\n0 1\n1 2\n2 0\n2 3\n";
    }
    const Graph g = Graph::from_edge_list(path);
    CHECK(g.n == 4);
    CHECK(g.edges == 4);
    CHECK(g.max_degree == 3);
    std::remove(path.c_str());
    CHECK_THROWS(Graph::from_edge_list("does_not_exist.txt"));
}
