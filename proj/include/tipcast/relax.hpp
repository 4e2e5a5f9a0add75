#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "tipcast/ltm.hpp"
#include "tipcast/nod.hpp"

namespace tipcast {

/// Parameters of an LTM -> NOD relaxation, with validity flags for the
/// hypotheses the containment and recovery theorems need.
struct RelaxationParams {
    double gamma;
    double k;
    std::vector<double> mu;  // mu_i = 1 - 2 sqrt(gamma k tau_i)
    bool mu_positive;
    bool k_ge_one;
    bool product_bound;  // gamma k ||tau||_inf < 1/4
    bool neutral_stable_sufficient;
};

struct GammaStarResult {
    double delta_gap = std::numeric_limits<double>::infinity();
    double delta_act = std::numeric_limits<double>::infinity();  // min positive excess (A zeta)_i - tau_i
    double gamma_star = std::numeric_limits<double>::infinity();
    double usable_gamma_limit = std::numeric_limits<double>::infinity();  // min(gamma_star, 1/(4k||tau||_inf))
    double tau_inf = 0.0;
    double a_inf = 0.0;
    std::uint64_t enumeration_cost = 0;
    bool degenerate = false;  // some in-neighborhood subset sum equals some tau_i
};

namespace detail {

struct NodeGapScan {
    double min_gap = std::numeric_limits<double>::infinity();
    double min_excess = std::numeric_limits<double>::infinity();
    bool degenerate = false;
    std::uint64_t cost = 0;
};

/// Scans all 2^d subset sums of a node's in-edge weights against its
/// threshold. Gray-code order keeps the sum update O(1) per subset.
inline NodeGapScan scan_in_neighborhood(const std::vector<double>& w, double tau, double tol) {
    NodeGapScan r;
    const int d = static_cast<int>(w.size());
    std::vector<char> in(d, 0);
    double sum = 0.0;
    const std::uint64_t total = std::uint64_t{1} << d;
    for (std::uint64_t m = 0; m < total; ++m) {
        if (m > 0) {
            int bit = std::countr_zero(m);  // gray-code flip position
            if (in[bit]) sum -= w[bit];
            else sum += w[bit];
            in[bit] ^= 1;
        }
        if (std::fabs(sum - tau) <= tol) r.degenerate = true;
        else if (sum < tau) r.min_gap = std::min(r.min_gap, tau - sum);
        else r.min_excess = std::min(r.min_excess, sum - tau);
    }
    r.cost = total;
    return r;
}

inline std::vector<double> in_weights(const WeightedDigraph& g, int i) {
    std::vector<double> w;
    for (const auto& [src, wt] : g.in_edges(i))
        if (wt > 0.0) w.push_back(wt);
    return w;
}

}  // namespace detail

/// delta_gap = min{ tau_i - (A zeta)_i : zeta binary, (A zeta)_i < tau_i }.
/// (A zeta)_i depends only on zeta restricted to i's in-neighbors, so the
/// global 2^n minimum equals a per-node scan over 2^{deg_in(i)} subsets.
inline GammaStarResult delta_gap(const LtmInstance& inst, double tie_tol = 1e-12,
                                 int degree_cap = 25) {
    GammaStarResult r;
    const int n = inst.graph.size();
    for (int i = 0; i < n; ++i) {
        std::vector<double> w = detail::in_weights(inst.graph, i);
        if (static_cast<int>(w.size()) > degree_cap)
            throw std::invalid_argument(
                "in-degree " + std::to_string(w.size()) + " of node " + std::to_string(i) +
                " exceeds the enumeration cap (" + std::to_string(degree_cap) +
                "); raise the cap or use a sparser instance");
        detail::NodeGapScan s = detail::scan_in_neighborhood(w, inst.tau[i], tie_tol);
        r.delta_gap = std::min(r.delta_gap, s.min_gap);
        r.delta_act = std::min(r.delta_act, s.min_excess);
        r.degenerate = r.degenerate || s.degenerate;
        r.enumeration_cost += s.cost;
    }
    r.tau_inf = *std::max_element(inst.tau.begin(), inst.tau.end());
    r.a_inf = inf_norm(inst.graph);
    return r;
}

/// True iff no in-neighborhood subset sum ties any tau_i within tolerance.
inline bool check_nondegenerate(const LtmInstance& inst, double tie_tol = 1e-12,
                                int degree_cap = 25) {
    return !delta_gap(inst, tie_tol, degree_cap).degenerate;
}

/// gamma* = k delta_gap^2 / (||tau||_inf ||A||_inf^2); every gamma below the
/// usable limit also satisfies the containment theorem's gamma k ||tau|| < 1/4.
inline GammaStarResult gamma_star(const LtmInstance& inst, double k, double tie_tol = 1e-12,
                                  int degree_cap = 25) {
    if (!(k >= 1.0)) throw std::invalid_argument("gamma_star requires k >= 1");
    GammaStarResult r = delta_gap(inst, tie_tol, degree_cap);
    if (r.degenerate)
        throw std::invalid_argument(
            "instance is degenerate: some subset of in-weights ties a threshold exactly, "
            "so the exact-recovery bound does not apply");
    const double validity = 1.0 / (4.0 * k * r.tau_inf);
    if (r.a_inf == 0.0) {
        // edgeless: every gamma works, only the validity bound binds
        r.gamma_star = std::numeric_limits<double>::infinity();
        r.usable_gamma_limit = validity;
        return r;
    }
    r.gamma_star = k * r.delta_gap * r.delta_gap / (r.tau_inf * r.a_inf * r.a_inf);
    r.usable_gamma_limit = std::min(r.gamma_star, validity);
    return r;
}

/// Builds the NOD relaxation of an LTM instance: same graph, zero input,
/// mu_i = 1 - 2 sqrt(gamma k tau_i), which aligns b*_i / gamma with tau_i.
inline std::pair<NodInstance, RelaxationParams> relax(const LtmInstance& inst, double gamma,
                                                      double k) {
    if (!(gamma > 0.0)) throw std::invalid_argument("relaxation requires gamma > 0");
    if (!(k >= 1.0)) throw std::invalid_argument("relaxation requires k >= 1");
    const double tau_inf = *std::max_element(inst.tau.begin(), inst.tau.end());
    if (!(gamma * k * tau_inf < 0.25))
        throw std::invalid_argument("relaxation requires gamma k ||tau||_inf < 1/4 (got " +
                                    std::to_string(gamma * k * tau_inf) + ")");
    RelaxationParams p;
    p.gamma = gamma;
    p.k = k;
    p.k_ge_one = true;
    p.product_bound = true;
    p.mu.resize(inst.tau.size());
    p.mu_positive = true;
    for (std::size_t i = 0; i < inst.tau.size(); ++i) {
        p.mu[i] = 1.0 - 2.0 * std::sqrt(gamma * k * inst.tau[i]);
        if (!(p.mu[i] > 0.0)) p.mu_positive = false;
    }
    NodInstance nod(inst.graph, p.mu, k, gamma, {});
    p.neutral_stable_sufficient = check_neutral_stability(nod).stable_sufficient;
    return {std::move(nod), std::move(p)};
}

/// Inverse of the relaxation map: tau_i = (1 - mu_i)^2 / (4 gamma k).
inline std::vector<double> reconstruct_thresholds(const RelaxationParams& p) {
    std::vector<double> tau(p.mu.size());
    for (std::size_t i = 0; i < p.mu.size(); ++i) {
        const double d = 1.0 - p.mu[i];
        tau[i] = d * d / (4.0 * p.gamma * p.k);
    }
    return tau;
}

}  // namespace tipcast
