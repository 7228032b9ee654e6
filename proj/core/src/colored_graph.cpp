#include "steinpair/colored_graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace steinpair {

namespace {

Graph finalize(int n, std::vector<std::set<int>>& nbrs) {
    Graph g;
    g.n = n;
    g.adj.resize(static_cast<std::size_t>(n));
    std::int64_t degsum = 0;
    for (int i = 0; i < n; ++i) {
        auto& row = g.adj[static_cast<std::size_t>(i)];
        row.assign(nbrs[static_cast<std::size_t>(i)].begin(),
                   nbrs[static_cast<std::size_t>(i)].end());
        degsum += static_cast<std::int64_t>(row.size());
        g.max_degree = std::max(g.max_degree, static_cast<int>(row.size()));
    }
    g.edges = degsum / 2;
    return g;
}

}  // namespace

Graph Graph::complete(int n) {
    if (n < 2) throw std::invalid_argument("Graph::complete: n >= 2 required");
    Graph g;
    g.n = n;
    g.adj.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        auto& row = g.adj[static_cast<std::size_t>(i)];
        row.reserve(static_cast<std::size_t>(n - 1));
        for (int j = 0; j < n; ++j)
            if (j != i) row.push_back(j);
    }
    g.edges = static_cast<std::int64_t>(n) * (n - 1) / 2;
    g.max_degree = n - 1;
    return g;
}

Graph Graph::erdos_renyi(int n, double p, std::uint64_t seed) {
    if (n < 2 || !(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("Graph::erdos_renyi: bad parameters");
    RngStream rng = derive_stream(seed, 0xE7, 0);
    std::vector<std::set<int>> nbrs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.uniform01() < p) {
                nbrs[static_cast<std::size_t>(i)].insert(j);
                nbrs[static_cast<std::size_t>(j)].insert(i);
            }
    return finalize(n, nbrs);
}

Graph Graph::random_regular(int n, int degree, std::uint64_t seed) {
    if (degree < 1 || degree >= n || (static_cast<std::int64_t>(n) * degree) % 2 != 0)
        throw std::invalid_argument("Graph::random_regular: infeasible degree");
    // pairing model with restarts
    for (std::uint64_t attempt = 0; attempt < 512; ++attempt) {
        RngStream rng = derive_stream(seed, 0xE8, attempt);
        std::vector<int> stubs;
        stubs.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(degree));
        for (int i = 0; i < n; ++i)
            for (int d = 0; d < degree; ++d) stubs.push_back(i);
        for (std::size_t i = stubs.size(); i > 1; --i)
            std::swap(stubs[i - 1], stubs[rng.below(i)]);
        std::vector<std::set<int>> nbrs(static_cast<std::size_t>(n));
        bool ok = true;
        for (std::size_t k = 0; k + 1 < stubs.size() && ok; k += 2) {
            const int u = stubs[k], v = stubs[k + 1];
            if (u == v || nbrs[static_cast<std::size_t>(u)].count(v)) ok = false;
            else {
                nbrs[static_cast<std::size_t>(u)].insert(v);
                nbrs[static_cast<std::size_t>(v)].insert(u);
            }
        }
        if (ok) return finalize(n, nbrs);
    }
    throw std::runtime_error("Graph::random_regular: pairing failed repeatedly");
}

Graph Graph::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    if (n < 1) throw std::invalid_argument("Graph::from_edges: n >= 1 required");
    std::vector<std::set<int>> nbrs(static_cast<std::size_t>(n));
    for (const auto& [u, v] : edges) {
        if (u < 0 || v < 0 || u >= n || v >= n)
            throw std::invalid_argument("Graph::from_edges: vertex out of range");
        if (u == v) throw std::invalid_argument("Graph::from_edges: self-loop");
        nbrs[static_cast<std::size_t>(u)].insert(v);
        nbrs[static_cast<std::size_t>(v)].insert(u);
    }
    return finalize(n, nbrs);
}

Graph Graph::from_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("Graph::from_edge_list: cannot open " + path);
    std::vector<std::pair<int, int>> edges;
    int maxv = -1;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        int u, v;
        if (!(ss >> u >> v)) throw std::runtime_error("Graph::from_edge_list: bad line: " + line);
        edges.emplace_back(u, v);
        maxv = std::max({maxv, u, v});
    }
    return from_edges(maxv + 1, edges);
}

ColoredGraphModel::ColoredGraphModel(Graph graph, int colors)
    : graph_(std::make_shared<const Graph>(std::move(graph))), c_(colors) {
    if (c_ < 2) throw std::invalid_argument("ColoredGraphModel: need c >= 2 colors");
    if (graph_->edges < 1) throw std::invalid_argument("ColoredGraphModel: empty graph");
    const double cn = static_cast<double>(c_);
    const double sigma2 = static_cast<double>(graph_->edges) / cn * (1.0 - 1.0 / cn);
    sigma_ = std::sqrt(sigma2);
}

ColoredGraphModel::config_type ColoredGraphModel::sample_config(RngStream& rng) const {
    config_type xi(static_cast<std::size_t>(graph_->n));
    for (auto& c : xi) c = static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(c_)));
    return xi;
}

double ColoredGraphModel::vertex_stat(const config_type& coloring, int i,
                                      std::int32_t color) const {
    const auto& row = graph_->adj[static_cast<std::size_t>(i)];
    int cnt = 0;
    for (const int j : row) cnt += coloring[static_cast<std::size_t>(j)] == color;
    return static_cast<double>(cnt) -
           static_cast<double>(row.size()) / static_cast<double>(c_);
}

double ColoredGraphModel::w_of(const config_type& coloring) const {
    if (static_cast<int>(coloring.size()) != graph_->n)
        throw std::invalid_argument("ColoredGraphModel: coloring length mismatch");
    double acc = 0.0;
    for (int i = 0; i < graph_->n; ++i)
        acc += vertex_stat(coloring, i, coloring[static_cast<std::size_t>(i)]);
    return acc / (2.0 * sigma_);
}

CondStats ColoredGraphModel::cond_stats(const config_type& coloring) const {
    if (static_cast<int>(coloring.size()) != graph_->n)
        throw std::invalid_argument("ColoredGraphModel: coloring length mismatch");
    const double n = static_cast<double>(graph_->n);
    const double cn = static_cast<double>(c_);
    const double sigma2 = sigma_ * sigma_;

    std::vector<std::int32_t> count(static_cast<std::size_t>(c_), 0);
    std::vector<std::int32_t> distinct;
    distinct.reserve(64);

    double w_acc = 0.0, s2 = 0.0, sabs = 0.0, s3 = 0.0;
    for (int i = 0; i < graph_->n; ++i) {
        const auto& row = graph_->adj[static_cast<std::size_t>(i)];
        const double di = static_cast<double>(row.size());
        distinct.clear();
        for (const int j : row) {
            const std::int32_t col = coloring[static_cast<std::size_t>(j)];
            if (count[static_cast<std::size_t>(col)]++ == 0) distinct.push_back(col);
        }
        const double base = -di / cn;  // T_i(color absent among neighbors)
        const double t_own =
            base + static_cast<double>(count[static_cast<std::size_t>(
                       coloring[static_cast<std::size_t>(i)])]);
        w_acc += t_own;

        // exact sums over the c resample outcomes via the color histogram
        double sum_t2 = base * base * (cn - static_cast<double>(distinct.size()));
        double sum_abs = (t_own - base) * std::abs(t_own - base) *
                         (cn - static_cast<double>(distinct.size()));
        double sum_cube = std::pow(t_own - base, 3) * (cn - static_cast<double>(distinct.size()));
        for (const std::int32_t col : distinct) {
            const double t = base + static_cast<double>(count[static_cast<std::size_t>(col)]);
            sum_t2 += t * t;
            const double diff = t_own - t;
            sum_abs += diff * std::abs(diff);
            sum_cube += diff * diff * diff;
            count[static_cast<std::size_t>(col)] = 0;
        }
        s2 += t_own * t_own + sum_t2 / cn;
        sabs += sum_abs / cn;
        s3 += sum_cube / cn;
    }

    CondStats cs;
    cs.w = w_acc / (2.0 * sigma_);
    cs.ed = lambda() * cs.w;  // exact: condition holds with R = 0
    cs.ed2 = s2 / (n * sigma2);
    cs.edabs = sabs / (n * sigma2);
    cs.ed3 = s3 / (n * sigma2 * sigma_);
    return cs;
}

std::pair<double, double> ColoredGraphModel::sample_pair(RngStream& rng) const {
    const auto xi = sample_config(rng);
    const double w = w_of(xi);
    const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(graph_->n)));
    const auto fresh = static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(c_)));
    const double t_old = vertex_stat(xi, i, xi[static_cast<std::size_t>(i)]);
    const double t_new = vertex_stat(xi, i, fresh);
    return {w, w - (t_old - t_new) / sigma_};
}

double ColoredGraphModel::theoretical_bound_factor() const {
    const double cn = static_cast<double>(c_);
    const double m = static_cast<double>(graph_->edges);
    const double dstar = static_cast<double>(graph_->max_degree);
    return std::sqrt(1.0 / cn) + std::sqrt(dstar / m) + std::sqrt(cn / m);
}

}  // namespace steinpair
