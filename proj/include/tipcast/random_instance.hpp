#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "tipcast/ltm.hpp"
#include "tipcast/relax.hpp"

namespace tipcast {

namespace detail {

/// Deterministic uniform double in [0, 1) from the raw engine output.
/// std::uniform_real_distribution is implementation-defined; this keeps
/// generated instances reproducible across toolchains.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

}  // namespace detail

struct RandomInstanceOptions {
    int n = 10;
    double edge_prob = 0.3;
    double weight_min = 0.5;
    double weight_max = 1.5;
    // Threshold mode: FCM fraction when fcm_frac > 0, otherwise explicit
    // uniform draw from [tau_min, tau_max].
    double fcm_frac = 0.0;
    double tau_min = 0.1;
    double tau_max = 1.0;
    std::uint64_t seed = 0;
    int max_retries = 64;
    double tie_tol = 1e-12;
    int degree_cap = 25;
};

/// Erdos-Renyi-style random LTM instance, deterministic given the seed.
/// Instances whose thresholds admit an exact subset-sum tie (within tie_tol)
/// are resampled, so the returned instance satisfies the exact-recovery
/// non-degeneracy hypothesis.
inline LtmInstance random_instance(const RandomInstanceOptions& opt) {
    if (opt.n < 1) throw std::invalid_argument("n must be >= 1");
    if (opt.edge_prob < 0.0 || opt.edge_prob > 1.0)
        throw std::invalid_argument("edge_prob must be in [0, 1]");
    if (!(opt.weight_min > 0.0 && opt.weight_max >= opt.weight_min))
        throw std::invalid_argument("weight range must be positive");

    std::mt19937_64 rng(opt.seed);
    for (int attempt = 0; attempt < opt.max_retries; ++attempt) {
        WeightedDigraph g(opt.n);
        for (int src = 0; src < opt.n; ++src)
            for (int dst = 0; dst < opt.n; ++dst) {
                if (src == dst) continue;
                if (detail::uniform01(rng) < opt.edge_prob)
                    g.add_edge(src, dst, detail::uniform(rng, opt.weight_min, opt.weight_max));
            }
        if (g.max_in_degree() > opt.degree_cap) continue;

        std::vector<double> tau;
        if (opt.fcm_frac > 0.0) {
            bool ok = true;
            for (double r : g.row_sums())
                if (r <= 0.0) ok = false;
            if (!ok) continue;  // FCM needs positive in-weight everywhere
            tau = fcm_thresholds(g, opt.fcm_frac);
        } else {
            tau.resize(opt.n);
            for (double& t : tau) t = detail::uniform(rng, opt.tau_min, opt.tau_max);
        }

        LtmInstance inst(std::move(g), std::move(tau));
        if (check_nondegenerate(inst, opt.tie_tol, opt.degree_cap)) return inst;
    }
    throw std::runtime_error("no tie-free instance found after " +
                             std::to_string(opt.max_retries) +
                             " attempts; try a different seed");
}

}  // namespace tipcast
