#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "steinpair/pair_model.hpp"

namespace steinpair {

/// Simple undirected graph as neighbor lists.
struct Graph {
    int n = 0;
    std::vector<std::vector<std::int32_t>> adj;
    std::int64_t edges = 0;  // m = sum d_i / 2
    int max_degree = 0;

    static Graph complete(int n);
    static Graph erdos_renyi(int n, double p, std::uint64_t seed);
    static Graph random_regular(int n, int degree, std::uint64_t seed);
    /// One "u v" pair per line, 0-indexed.
    static Graph from_edge_list(const std::string& path);
    static Graph from_edges(int n, const std::vector<std::pair<int, int>>& edges);

    int degree(int i) const { return static_cast<int>(adj[static_cast<std::size_t>(i)].size()); }
};

/// Monochromatic-edge statistic under a uniform c-coloring:
/// W = (1/(2 sigma)) sum_i sum_{j in A_i} (1{xi_i = xi_j} - 1/c).
class ColoredGraphModel {
  public:
    using config_type = std::vector<std::int32_t>;

    ColoredGraphModel(Graph graph, int colors);

    int n() const { return graph_->n; }
    int colors() const { return c_; }
    double sigma() const { return sigma_; }
    const Graph& graph() const { return *graph_; }

    config_type sample_config(RngStream& rng) const;
    double w_of(const config_type& coloring) const;
    CondStats cond_stats(const config_type& coloring) const;
    std::pair<double, double> sample_pair(RngStream& rng) const;

    double lambda() const { return 2.0 / static_cast<double>(graph_->n); }
    const TargetLaw& target() const { return standard_normal_target(); }
    double delta_max() const { return 2.0 * graph_->max_degree / sigma_; }

    /// sqrt(1/c) + sqrt(d*/m) + sqrt(c/m), the theorem bracket with C = 1.
    double theoretical_bound_factor() const;

  private:
    double vertex_stat(const config_type& coloring, int i, std::int32_t color) const;

    std::shared_ptr<const Graph> graph_;
    int c_ = 0;
    double sigma_ = 0.0;
};

}  // namespace steinpair
