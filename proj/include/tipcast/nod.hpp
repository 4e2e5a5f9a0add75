#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tipcast/graph.hpp"
#include "tipcast/ltm.hpp"

namespace tipcast {

inline double sat(double x) { return std::max(0.0, std::min(1.0, x)); }

inline std::vector<double> sat(std::vector<double> x) {
    for (double& v : x) v = sat(v);
    return x;
}

/// Piecewise-constant exogenous input b(t). A pulse contributes its amplitude
/// on the half-open interval [start, end); overlapping pulses on a node sum.
struct InputSchedule {
    struct Pulse {
        int node;
        double start;
        double end;
        double amplitude;
    };
    std::vector<Pulse> pulses;

    void add_pulse(int node, double start, double end, double amplitude) {
        if (!(start < end)) throw std::invalid_argument("pulse needs start < end");
        if (amplitude < 0.0) throw std::invalid_argument("pulse amplitude must be >= 0");
        pulses.push_back({node, start, end, amplitude});
    }

    bool empty() const { return pulses.empty(); }

    void eval(double t, std::vector<double>& b) const {
        std::fill(b.begin(), b.end(), 0.0);
        for (const Pulse& p : pulses)
            if (p.start <= t && t < p.end) b[p.node] += p.amplitude;
    }

    /// Discontinuity times, sorted and deduplicated.
    std::vector<double> breakpoints() const {
        std::vector<double> ts;
        for (const Pulse& p : pulses) {
            ts.push_back(p.start);
            ts.push_back(p.end);
        }
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
        return ts;
    }
};

/// Continuous opinion dynamics instance (A, mu, k, gamma, b).
struct NodInstance {
    WeightedDigraph graph;
    std::vector<double> mu;
    double k;
    double gamma;
    InputSchedule schedule;

    NodInstance(WeightedDigraph g, std::vector<double> mu_, double k_, double gamma_,
                InputSchedule sched = {})
        : graph(std::move(g)), mu(std::move(mu_)), k(k_), gamma(gamma_),
          schedule(std::move(sched)) {
        if (static_cast<int>(mu.size()) != graph.size())
            throw std::invalid_argument("mu length must equal node count");
        for (double m : mu)
            if (!(m > 0.0)) throw std::invalid_argument("every mu_i must be > 0");
        if (k < 0.0 || gamma < 0.0)
            throw std::invalid_argument("k and gamma must be nonnegative");
        for (const auto& p : schedule.pulses)
            if (p.node < 0 || p.node >= graph.size())
                throw std::invalid_argument("schedule pulse node out of range");
    }

    double mu_inf_norm() const {
        double m = 0.0;
        for (double v : mu) m = std::max(m, std::fabs(v));
        return m;
    }
};

/// dz/dt = -z + sat(mu .* z + k z.^2 + gamma A z + b(t)).
inline void nod_rhs(const NodInstance& inst, const std::vector<double>& z,
                    const std::vector<double>& b, std::vector<double>& out) {
    const int n = inst.graph.size();
    inst.graph.apply(z, out);
    for (int i = 0; i < n; ++i) {
        double arg = inst.mu[i] * z[i] + inst.k * z[i] * z[i] + inst.gamma * out[i] + b[i];
        out[i] = -z[i] + sat(arg);
    }
}

inline std::vector<double> nod_rhs(const NodInstance& inst, const std::vector<double>& z,
                                   double t) {
    std::vector<double> b(inst.graph.size(), 0.0), out;
    inst.schedule.eval(t, b);
    nod_rhs(inst, z, b, out);
    return out;
}

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    bool converged = false;
    double final_derivative_norm = 0.0;
    double max_overshoot = 0.0;  // worst pre-clamp excursion outside [0,1]
};

struct IntegrateOptions {
    double step = 0.01;
    double t_max = 500.0;
    double stall_tol = 1e-9;
    double sample_every = 0.1;
    double eps_act = 1e-3;
};

namespace detail {
inline double inf_norm_vec(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}
}  // namespace detail

/// Classical fixed-step RK4 over [0, t_max], with steps split at every
/// schedule breakpoint so no step straddles a discontinuity of b(t).
/// States are clamped to [0,1]^n after each step; box invariance is a
/// property of the flow, so clamping only absorbs discretization error and
/// large pre-clamp overshoot is recorded as a step-size failure signal.
inline Trajectory integrate(const NodInstance& inst, std::vector<double> z,
                            const IntegrateOptions& opts = {}) {
    const int n = inst.graph.size();
    if (static_cast<int>(z.size()) != n)
        throw std::invalid_argument("initial state length must equal node count");
    for (double v : z)
        if (v < 0.0 || v > 1.0) throw std::invalid_argument("initial state must lie in [0,1]^n");
    if (!(opts.step > 0.0)) throw std::invalid_argument("step must be positive");

    // segment boundaries: schedule breakpoints inside (0, t_max), then t_max
    std::vector<double> bounds;
    for (double t : inst.schedule.breakpoints())
        if (t > 0.0 && t < opts.t_max) bounds.push_back(t);
    bounds.push_back(opts.t_max);

    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(z);

    std::vector<double> b(n), k1(n), k2(n), k3(n), k4(n), tmp(n);
    double t = 0.0;
    double next_sample = opts.sample_every;
    bool stalled = false;

    for (std::size_t seg = 0; seg < bounds.size() && !stalled; ++seg) {
        const double seg_end = bounds[seg];
        if (seg_end <= t) continue;
        const bool last_segment = (seg + 1 == bounds.size());
        const long nsteps = std::max(1L, std::lround(std::ceil((seg_end - t) / opts.step)));
        const double h = (seg_end - t) / static_cast<double>(nsteps);
        // b(t) is constant on the open segment; evaluate at its midpoint
        inst.schedule.eval(t + 0.5 * (seg_end - t), b);

        for (long s = 0; s < nsteps; ++s) {
            nod_rhs(inst, z, b, k1);
            if (last_segment && detail::inf_norm_vec(k1) < opts.stall_tol) {
                stalled = true;
                break;
            }
            for (int i = 0; i < n; ++i) tmp[i] = z[i] + 0.5 * h * k1[i];
            nod_rhs(inst, tmp, b, k2);
            for (int i = 0; i < n; ++i) tmp[i] = z[i] + 0.5 * h * k2[i];
            nod_rhs(inst, tmp, b, k3);
            for (int i = 0; i < n; ++i) tmp[i] = z[i] + h * k3[i];
            nod_rhs(inst, tmp, b, k4);
            for (int i = 0; i < n; ++i) {
                double v = z[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                if (!std::isfinite(v))
                    throw std::runtime_error("non-finite state at t = " + std::to_string(t + h));
                double over = std::max(v - 1.0, -v);
                if (over > traj.max_overshoot) traj.max_overshoot = over;
                z[i] = sat(v);
            }
            t = (s + 1 == nsteps) ? seg_end : t + h;
            if (t >= next_sample - 1e-12) {
                traj.times.push_back(t);
                traj.states.push_back(z);
                while (next_sample <= t + 1e-12) next_sample += opts.sample_every;
            }
        }
    }

    if (traj.times.back() != t) {
        traj.times.push_back(t);
        traj.states.push_back(z);
    }
    traj.final_derivative_norm = detail::inf_norm_vec(nod_rhs(inst, z, t));
    traj.converged = stalled || traj.final_derivative_norm < opts.stall_tol;
    return traj;
}

/// Saddle-node data per agent: b*_i = (1-mu_i)^2 / (4k), z*_i = (1-mu_i) / (2k).
struct AgentThresholds {
    std::vector<double> b_star;
    std::vector<double> z_star;
};

inline AgentThresholds agent_thresholds(const NodInstance& inst) {
    if (!(inst.k > 0.0)) throw std::invalid_argument("agent thresholds undefined for k = 0");
    AgentThresholds th;
    const int n = inst.graph.size();
    th.b_star.resize(n);
    th.z_star.resize(n);
    for (int i = 0; i < n; ++i) {
        const double d = 1.0 - inst.mu[i];
        th.b_star[i] = d * d / (4.0 * inst.k);
        th.z_star[i] = d / (2.0 * inst.k);
    }
    return th;
}

/// Integrates from z_i(0) = 1 on the seed set and classifies nodes as active
/// when the final state reaches 1 - eps_act.
inline CascadeReport nod_cascade(const NodInstance& inst, const std::vector<int>& seed,
                                 const IntegrateOptions& opts = {}) {
    const int n = inst.graph.size();
    std::vector<double> z0(n, 0.0);
    for (int i : seed) {
        if (i < 0 || i >= n) throw std::invalid_argument("seed node out of range");
        z0[i] = 1.0;
    }
    Trajectory traj = integrate(inst, z0, opts);

    CascadeReport rep;
    rep.activation_time.assign(n, std::nullopt);
    const std::vector<double>& zf = traj.states.back();
    const double act = 1.0 - opts.eps_act;
    for (int i = 0; i < n; ++i) {
        if (zf[i] >= act) {
            rep.active_set.push_back(i);
            if (z0[i] == 1.0) {
                rep.activation_time[i] = 0.0;
            } else {
                for (std::size_t s = 0; s < traj.times.size(); ++s)
                    if (traj.states[s][i] >= act) {
                        rep.activation_time[i] = traj.times[s];
                        break;
                    }
            }
        } else if (!traj.converged && zf[i] > 0.5) {
            rep.indeterminate.push_back(i);
        }
    }
    rep.cascade_size = static_cast<int>(rep.active_set.size());
    rep.converged = traj.converged;
    rep.steps_or_final_time = traj.times.back();
    return rep;
}

struct NeutralStability {
    bool stable_sufficient;
    double margin;                 // (1 - gamma lambda_max) - ||mu||_inf
    bool schedule_nonzero_warning; // check assumes b == 0
};

/// Sufficient (conservative) condition for asymptotic stability of z = 0:
/// ||mu||_inf < 1 - gamma lambda_max.
inline NeutralStability check_neutral_stability(const NodInstance& inst) {
    NeutralStability r;
    r.schedule_nonzero_warning = !inst.schedule.empty();
    r.margin = (1.0 - inst.gamma * spectral_radius(inst.graph)) - inst.mu_inf_norm();
    r.stable_sufficient = r.margin > 0.0;
    return r;
}

enum class EquilibriumStability { stable, unstable, saddle_node };

struct EquilibriumBranch {
    double b;
    std::vector<std::pair<double, EquilibriumStability>> equilibria;
};

/// Equilibria of the single uncoupled agent dz = -z + sat(mu z + k z^2 + b)
/// over a grid of inputs b. Unsaturated equilibria solve k z^2 + (mu-1) z + b = 0
/// on [0, 1); the saturated branch z = 1 exists when mu + k + b >= 1.
inline std::vector<EquilibriumBranch> single_agent_bifurcation(double mu, double k,
                                                               const std::vector<double>& b_grid) {
    if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("need 0 < mu < 1");
    if (!(k > 0.0)) throw std::invalid_argument("need k > 0");
    const double b_star = (1.0 - mu) * (1.0 - mu) / (4.0 * k);
    const double z_star = (1.0 - mu) / (2.0 * k);
    std::vector<EquilibriumBranch> out;
    out.reserve(b_grid.size());
    for (double b : b_grid) {
        EquilibriumBranch row{b, {}};
        const double disc = (1.0 - mu) * (1.0 - mu) - 4.0 * k * b;
        if (std::fabs(b - b_star) <= 1e-14 * std::max(1.0, b_star)) {
            if (z_star >= 0.0 && z_star < 1.0)
                row.equilibria.push_back({z_star, EquilibriumStability::saddle_node});
        } else if (disc > 0.0) {
            const double r = std::sqrt(disc);
            for (double z : {(1.0 - mu - r) / (2.0 * k), (1.0 - mu + r) / (2.0 * k)}) {
                if (z < 0.0 || z >= 1.0) continue;
                const double slope = -1.0 + mu + 2.0 * k * z;
                row.equilibria.push_back({z, slope < 0.0 ? EquilibriumStability::stable
                                                         : EquilibriumStability::unstable});
            }
        }
        if (mu + k + b >= 1.0) row.equilibria.push_back({1.0, EquilibriumStability::stable});
        std::sort(row.equilibria.begin(), row.equilibria.end(),
                  [](const auto& a, const auto& b2) { return a.first < b2.first; });
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace tipcast
