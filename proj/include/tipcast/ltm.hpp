#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tipcast/graph.hpp"

namespace tipcast {

using BinaryState = std::vector<std::uint8_t>;

/// Discrete linear threshold model instance (A, tau).
struct LtmInstance {
    WeightedDigraph graph;
    std::vector<double> tau;

    LtmInstance(WeightedDigraph g, std::vector<double> thresholds)
        : graph(std::move(g)), tau(std::move(thresholds)) {
        if (static_cast<int>(tau.size()) != graph.size())
            throw std::invalid_argument("threshold vector length must equal node count");
        for (double t : tau)
            if (!(t > 0.0)) throw std::invalid_argument("thresholds must be strictly positive");
    }
};

/// Outcome of a cascade run, shared by the discrete and continuous models.
/// activation_time holds the discrete step index for LTM and continuous time
/// for NOD; it is set exactly for nodes in active_set.
struct CascadeReport {
    std::vector<int> active_set;
    std::vector<std::optional<double>> activation_time;
    int cascade_size = 0;
    bool converged = false;
    double steps_or_final_time = 0.0;
    bool degeneracy_warning = false;   // some (A zeta)_i landed within 1e-12 of tau_i
    std::vector<int> indeterminate;    // nodes stuck between thresholds at t_max (NOD only)
};

/// One synchronous update: zeta_i' = zeta_i OR ((A zeta)_i > tau_i).
/// Strictly greater at the threshold.
inline BinaryState ltm_step(const LtmInstance& inst, const BinaryState& state) {
    const int n = inst.graph.size();
    if (static_cast<int>(state.size()) != n)
        throw std::invalid_argument("state length must equal node count");
    BinaryState next(n);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (const auto& [src, w] : inst.graph.in_edges(i)) s += w * state[src];
        next[i] = state[i] || (s > inst.tau[i]) ? 1 : 0;
    }
    return next;
}

/// Iterates ltm_step from the seed set until a fixed point; reaches one in
/// at most n steps since the dynamics are monotone on a finite state space.
inline CascadeReport ltm_cascade(const LtmInstance& inst, const std::vector<int>& seed) {
    const int n = inst.graph.size();
    BinaryState state(n, 0);
    CascadeReport rep;
    rep.activation_time.assign(n, std::nullopt);
    for (int i : seed) {
        if (i < 0 || i >= n) throw std::invalid_argument("seed node out of range");
        state[i] = 1;
        rep.activation_time[i] = 0.0;
    }
    int step = 0;
    for (; step < n; ++step) {
        // degeneracy flag: near-tie between social input and threshold
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (const auto& [src, w] : inst.graph.in_edges(i)) s += w * state[src];
            if (std::fabs(s - inst.tau[i]) < 1e-12) rep.degeneracy_warning = true;
        }
        BinaryState next = ltm_step(inst, state);
        bool changed = false;
        for (int i = 0; i < n; ++i)
            if (next[i] && !state[i]) {
                changed = true;
                rep.activation_time[i] = static_cast<double>(step + 1);
            }
        state = std::move(next);
        if (!changed) break;
    }
    for (int i = 0; i < n; ++i)
        if (state[i]) rep.active_set.push_back(i);
    rep.cascade_size = static_cast<int>(rep.active_set.size());
    rep.converged = true;
    rep.steps_or_final_time = static_cast<double>(step);
    return rep;
}

}  // namespace tipcast
