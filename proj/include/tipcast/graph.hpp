#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tipcast {

struct Edge {
    int src;
    int dst;
    double weight;
};

/// Directed graph with nonnegative edge weights and zero diagonal.
/// weight(i, j) is the influence node j exerts on node i, so (A z)_i
/// aggregates node i's in-neighbors.
class WeightedDigraph {
public:
    explicit WeightedDigraph(int n) : n_(n), in_edges_(n), out_neighbors_(n) {
        if (n < 1) throw std::invalid_argument("graph must have at least one node");
    }

    void add_edge(int src, int dst, double weight) {
        if (src < 0 || src >= n_ || dst < 0 || dst >= n_)
            throw std::invalid_argument("edge endpoint out of range: " + std::to_string(src) +
                                        " -> " + std::to_string(dst));
        if (weight < 0.0)
            throw std::invalid_argument("negative edge weight on " + std::to_string(src) +
                                        " -> " + std::to_string(dst));
        if (src == dst) {
            if (weight != 0.0)
                throw std::invalid_argument("self-loop with nonzero weight on node " +
                                            std::to_string(src));
            return;  // zero-weight self-loop is a no-op
        }
        if (!edge_keys_.insert({src, dst}).second)
            throw std::invalid_argument("duplicate edge " + std::to_string(src) + " -> " +
                                        std::to_string(dst));
        edges_.push_back({src, dst, weight});
        in_edges_[dst].push_back({src, weight});
        if (weight > 0.0) out_neighbors_[src].push_back(dst);
    }

    int size() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<std::pair<int, double>>& in_edges(int i) const { return in_edges_[i]; }

    /// A[i][j]; zero when no edge j -> i exists.
    double weight(int i, int j) const {
        for (const auto& [src, w] : in_edges_[i])
            if (src == j) return w;
        return 0.0;
    }

    /// (A 1)_i for every node.
    std::vector<double> row_sums() const {
        std::vector<double> r(n_, 0.0);
        for (int i = 0; i < n_; ++i)
            for (const auto& [src, w] : in_edges_[i]) r[i] += w;
        return r;
    }

    /// out = A z.
    void apply(const std::vector<double>& z, std::vector<double>& out) const {
        out.assign(n_, 0.0);
        for (int i = 0; i < n_; ++i) {
            double s = 0.0;
            for (const auto& [src, w] : in_edges_[i]) s += w * z[src];
            out[i] = s;
        }
    }

    std::vector<double> apply(const std::vector<double>& z) const {
        std::vector<double> out;
        apply(z, out);
        return out;
    }

    int max_in_degree() const {
        int d = 0;
        for (int i = 0; i < n_; ++i) d = std::max(d, static_cast<int>(in_edges_[i].size()));
        return d;
    }

    const std::vector<int>& out_neighbors(int i) const { return out_neighbors_[i]; }

private:
    int n_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::pair<int, double>>> in_edges_;
    std::vector<std::vector<int>> out_neighbors_;  // positive-weight edges only
    std::set<std::pair<int, int>> edge_keys_;
};

/// ||A||_inf = max row sum.
inline double inf_norm(const WeightedDigraph& g) {
    double m = 0.0;
    for (double r : g.row_sums()) m = std::max(m, r);
    return m;
}

namespace detail {

/// Strongly connected components over positive-weight edges (iterative
/// Tarjan). Returns a component id per node.
inline std::vector<int> scc_ids(const WeightedDigraph& g, int& count) {
    const int n = g.size();
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<char> on_stack(n, 0);
    std::vector<int> stack;
    count = 0;
    int next_index = 0;

    struct Frame {
        int node;
        std::size_t child;
    };
    for (int root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        std::vector<Frame> frames{{root, 0}};
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!frames.empty()) {
            Frame& f = frames.back();
            const auto& out = g.out_neighbors(f.node);
            if (f.child < out.size()) {
                int v = out[f.child++];
                if (index[v] == -1) {
                    index[v] = low[v] = next_index++;
                    stack.push_back(v);
                    on_stack[v] = 1;
                    frames.push_back({v, 0});
                } else if (on_stack[v]) {
                    low[f.node] = std::min(low[f.node], index[v]);
                }
            } else {
                int u = f.node;
                frames.pop_back();
                if (!frames.empty())
                    low[frames.back().node] = std::min(low[frames.back().node], low[u]);
                if (low[u] == index[u]) {
                    while (true) {
                        int v = stack.back();
                        stack.pop_back();
                        on_stack[v] = 0;
                        comp[v] = count;
                        if (v == u) break;
                    }
                    ++count;
                }
            }
        }
    }
    return comp;
}

}  // namespace detail

/// Dominant eigenvalue of A. The spectral radius of a nonnegative matrix is
/// the maximum over its strongly connected components, so power iteration
/// runs per component on the shifted block A_C + I, which is primitive for
/// an irreducible block and therefore converges geometrically. This handles
/// reducible (e.g. acyclic) graphs that plain power iteration stalls on.
inline double spectral_radius(const WeightedDigraph& g, double rel_tol = 1e-10,
                              int max_iter = 100000) {
    const int n = g.size();
    int ncomp = 0;
    std::vector<int> comp = detail::scc_ids(g, ncomp);
    std::vector<std::vector<int>> members(ncomp);
    for (int i = 0; i < n; ++i) members[comp[i]].push_back(i);

    double lambda_max = 0.0;
    std::vector<int> slot(n, -1);
    for (const auto& nodes : members) {
        if (nodes.size() < 2) continue;  // zero diagonal: a singleton contributes 0
        const int m = static_cast<int>(nodes.size());
        for (int s = 0; s < m; ++s) slot[nodes[s]] = s;
        std::vector<double> v(m, 1.0), w(m);
        double lambda_prev = 0.0, lambda = 0.0;
        bool converged = false;
        for (int it = 0; it < max_iter && !converged; ++it) {
            for (int s = 0; s < m; ++s) {
                double sum = v[s];  // shift by +I
                for (const auto& [src, wt] : g.in_edges(nodes[s]))
                    if (comp[src] == comp[nodes[s]]) sum += wt * v[slot[src]];
                w[s] = sum;
            }
            double norm = 0.0;
            for (double x : w) norm = std::max(norm, x);
            lambda = norm - 1.0;
            for (int s = 0; s < m; ++s) w[s] /= norm;
            if (it > 0 && std::fabs(lambda - lambda_prev) <= rel_tol * std::max(1.0, lambda))
                converged = true;
            lambda_prev = lambda;
            v.swap(w);
        }
        if (!converged)
            throw std::runtime_error("power iteration did not converge; last two estimates " +
                                     std::to_string(lambda_prev) + " and " +
                                     std::to_string(lambda));
        lambda_max = std::max(lambda_max, lambda);
    }
    return lambda_max;
}

namespace detail {
inline void reach_dfs(const std::vector<std::vector<int>>& adj, int start,
                      std::vector<char>& seen) {
    std::vector<int> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : adj[u])
            if (!seen[v]) {
                seen[v] = 1;
                stack.push_back(v);
            }
    }
}
}  // namespace detail

/// True iff every node reaches every other along positive-weight edges.
/// A single node with no edges is strongly connected by convention.
inline bool is_strongly_connected(const WeightedDigraph& g) {
    const int n = g.size();
    if (n == 1) return true;
    std::vector<std::vector<int>> fwd(n), rev(n);
    for (const Edge& e : g.edges())
        if (e.weight > 0.0) {
            fwd[e.src].push_back(e.dst);
            rev[e.dst].push_back(e.src);
        }
    std::vector<char> seen(n, 0);
    detail::reach_dfs(fwd, 0, seen);
    if (std::count(seen.begin(), seen.end(), 1) != n) return false;
    std::fill(seen.begin(), seen.end(), 0);
    detail::reach_dfs(rev, 0, seen);
    return std::count(seen.begin(), seen.end(), 1) == n;
}

/// Fractional-contagion thresholds tau_i = frac * (A 1)_i. Every node needs
/// positive in-weight, otherwise tau_i = 0 would violate tau > 0.
inline std::vector<double> fcm_thresholds(const WeightedDigraph& g, double frac) {
    if (!(frac > 0.0 && frac <= 1.0))
        throw std::invalid_argument("FCM fraction must be in (0, 1]");
    std::vector<double> tau = g.row_sums();
    for (int i = 0; i < g.size(); ++i) {
        if (tau[i] <= 0.0)
            throw std::invalid_argument("node " + std::to_string(i) +
                                        " has zero in-weight; FCM threshold would be 0");
        tau[i] *= frac;
    }
    return tau;
}

}  // namespace tipcast
