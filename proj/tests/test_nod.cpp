#include <doctest.h>

#include <cmath>
#include <random>

#include "tipcast/nod.hpp"
#include "tipcast/random_instance.hpp"
#include "tipcast/relax.hpp"

using namespace tipcast;

namespace {

NodInstance single_agent(double mu, double k, double b) {
    WeightedDigraph g(1);
    InputSchedule s;
    if (b > 0.0) s.add_pulse(0, 0.0, 1e9, b);
    return NodInstance(std::move(g), {mu}, k, 0.0, std::move(s));
}

NodInstance random_relaxation(std::uint64_t seed, int n = 6, double gamma_frac = 0.5,
                              double k = 1.2) {
    RandomInstanceOptions opt;
    opt.n = n;
    opt.edge_prob = 0.4;
    opt.tau_min = 0.4;
    opt.tau_max = 1.5;
    opt.seed = seed;
    LtmInstance ltm = random_instance(opt);
    const double tau_inf = *std::max_element(ltm.tau.begin(), ltm.tau.end());
    return relax(ltm, gamma_frac / (4.0 * k * tau_inf), k).first;
}

}  // namespace

TEST_CASE("saturation function") {
    CHECK(sat(-0.5) == 0.0);
    CHECK(sat(0.3) == 0.3);
    CHECK(sat(1.7) == 1.0);
    CHECK(sat(0.0) == 0.0);
    CHECK(sat(1.0) == 1.0);
}

TEST_CASE("rhs closed forms") {
    NodInstance inst = single_agent(0.5, 1.0, 0.0);
    CHECK(nod_rhs(inst, {0.0}, 0.0)[0] == 0.0);  // neutral equilibrium
    // z = 0.2: -0.2 + sat(0.1 + 0.04) = -0.06
    CHECK(nod_rhs(inst, {0.2}, 0.0)[0] == doctest::Approx(-0.06).epsilon(1e-14));
    // full-activation state is an equilibrium whenever k >= 1
    NodInstance net = random_relaxation(5);
    std::vector<double> ones(net.graph.size(), 1.0);
    for (double d : nod_rhs(net, ones, 0.0)) CHECK(d == 0.0);
}

TEST_CASE("equilibria are preserved by the integrator") {
    NodInstance inst = random_relaxation(11);
    const int n = inst.graph.size();
    Trajectory at_zero = integrate(inst, std::vector<double>(n, 0.0));
    CHECK(at_zero.converged);
    CHECK(at_zero.times.size() <= 2);  // converged at the first stall check
    for (double v : at_zero.states.back()) CHECK(v == 0.0);

    Trajectory at_one = integrate(inst, std::vector<double>(n, 1.0), {0.01, 50.0, 1e-9, 0.1});
    for (const auto& st : at_one.states)
        for (double v : st) CHECK(std::fabs(1.0 - v) <= 1e-9);
}

TEST_CASE("single agent activates above its tipping input") {
    // b = 0.1 > b* = 0.0625
    NodInstance inst = single_agent(0.5, 1.0, 0.1);
    Trajectory tr = integrate(inst, {0.0}, {0.01, 100.0, 1e-9, 0.1});
    CHECK(tr.states.back()[0] == doctest::Approx(1.0).epsilon(1e-6));
    // fine-step reference agrees
    Trajectory ref = integrate(inst, {0.0}, {0.0001, 100.0, 0.0, 0.1});
    CHECK(std::fabs(tr.states.back()[0] - ref.states.back()[0]) < 1e-6);
}

TEST_CASE("agent thresholds") {
    NodInstance inst = single_agent(0.5, 1.0, 0.0);
    AgentThresholds th = agent_thresholds(inst);
    CHECK(th.b_star[0] == 0.0625);
    CHECK(th.z_star[0] == 0.25);
    NodInstance near_one = single_agent(0.999, 1.0, 0.0);
    AgentThresholds th2 = agent_thresholds(near_one);
    CHECK(th2.b_star[0] < 1e-6);
    CHECK(th2.z_star[0] < 1e-3);
    WeightedDigraph g(1);
    CHECK_THROWS(agent_thresholds(NodInstance(g, {0.5}, 0.0, 0.0)));
    // identity b* = k z*^2 on a batch of random relaxations
    for (std::uint64_t s = 1; s <= 10; ++s) {
        NodInstance net = random_relaxation(s);
        AgentThresholds t = agent_thresholds(net);
        for (std::size_t i = 0; i < t.b_star.size(); ++i)
            CHECK(t.b_star[i] == doctest::Approx(net.k * t.z_star[i] * t.z_star[i]).epsilon(1e-12));
    }
}

TEST_CASE("neutral stability margin arithmetic") {
    WeightedDigraph g(2);
    g.add_edge(0, 1, 1.0);
    g.add_edge(1, 0, 1.0);  // lambda_max = 1
    NodInstance a(g, {0.9, 0.9}, 1.0, 0.05);
    NeutralStability ra = check_neutral_stability(a);
    CHECK(ra.stable_sufficient);
    CHECK(ra.margin == doctest::Approx(0.05).epsilon(1e-12));
    NodInstance b(g, {0.99, 0.99}, 1.0, 0.0);
    CHECK(check_neutral_stability(b).margin == doctest::Approx(0.01).epsilon(1e-12));
    NodInstance c(g, {0.99, 0.99}, 1.0, 0.05);
    NeutralStability rc = check_neutral_stability(c);
    CHECK_FALSE(rc.stable_sufficient);
    CHECK(rc.margin == doctest::Approx(-0.04).epsilon(1e-12));
    InputSchedule s;
    s.add_pulse(0, 0.0, 1.0, 0.1);
    NodInstance d(g, {0.9, 0.9}, 1.0, 0.05, s);
    CHECK(check_neutral_stability(d).schedule_nonzero_warning);
}

TEST_CASE("single agent bifurcation branches") {
    auto rows = single_agent_bifurcation(0.5, 1.0, {0.0, 0.0625, 0.1});
    // b = 0: z = 0 stable, z = 0.5 unstable, z = 1 stable (mu + k = 1.5 >= 1)
    REQUIRE(rows[0].equilibria.size() == 3);
    CHECK(rows[0].equilibria[0].first == doctest::Approx(0.0));
    CHECK(rows[0].equilibria[0].second == EquilibriumStability::stable);
    CHECK(rows[0].equilibria[1].first == doctest::Approx(0.5));
    CHECK(rows[0].equilibria[1].second == EquilibriumStability::unstable);
    CHECK(rows[0].equilibria[2].first == 1.0);
    CHECK(rows[0].equilibria[2].second == EquilibriumStability::stable);
    // b = b*: double root at z* reported as the saddle-node
    REQUIRE(rows[1].equilibria.size() == 2);
    CHECK(rows[1].equilibria[0].first == doctest::Approx(0.25));
    CHECK(rows[1].equilibria[0].second == EquilibriumStability::saddle_node);
    // b > b*: only the saturated branch remains
    REQUIRE(rows[2].equilibria.size() == 1);
    CHECK(rows[2].equilibria[0].first == 1.0);
}

TEST_CASE("threshold dichotomy for the uncoupled agent") {
    // b > b*: activation; b < b*: the state never reaches z* (50-value sweep,
    // margins above the degenerate 1e-6 band)
    const double b_star = 0.0625, z_star = 0.25;
    for (int i = 0; i < 25; ++i) {
        const double margin = 5e-3 * std::pow(10.0, i / 24.0);  // 5e-3 .. 5e-2
        NodInstance up = single_agent(0.5, 1.0, b_star + margin);
        Trajectory tr = integrate(up, {0.0}, {0.01, 200.0, 1e-9, 0.5});
        CHECK(tr.states.back()[0] > 1.0 - 1e-3);
        const double below = std::max(1e-6, margin / 4.0);
        NodInstance down = single_agent(0.5, 1.0, b_star - below);
        Trajectory td = integrate(down, {0.0}, {0.01, 200.0, 1e-9, 0.5});
        for (const auto& st : td.states) CHECK(st[0] < z_star);
    }
}

TEST_CASE("schedule semantics: half-open intervals, summed overlaps, splitting") {
    InputSchedule s;
    s.add_pulse(0, 0.0, 1.0, 0.2);
    s.add_pulse(0, 0.5, 2.0, 0.3);
    std::vector<double> b(1);
    s.eval(0.0, b);
    CHECK(b[0] == 0.2);
    s.eval(0.75, b);
    CHECK(b[0] == doctest::Approx(0.5));
    s.eval(1.0, b);
    CHECK(b[0] == 0.3);  // [0,1) excludes its endpoint
    s.eval(2.0, b);
    CHECK(b[0] == 0.0);
    CHECK(s.breakpoints() == std::vector<double>{0.0, 0.5, 1.0, 2.0});
    CHECK_THROWS(s.add_pulse(0, 1.0, 1.0, 0.1));
    CHECK_THROWS(s.add_pulse(0, 0.0, 1.0, -0.1));

    // odd step vs breakpoints: integration must land exactly on them
    WeightedDigraph g(1);
    NodInstance inst(g, {0.5}, 1.0, 0.0, s);
    Trajectory tr = integrate(inst, {0.0}, {0.03, 3.0, 0.0, 0.25});
    CHECK(tr.times.back() == 3.0);
    for (std::size_t i = 1; i < tr.times.size(); ++i) CHECK(tr.times[i] > tr.times[i - 1]);
}

TEST_CASE("box invariance and bounded pre-clamp overshoot") {
    for (std::uint64_t s = 1; s <= 6; ++s) {
        NodInstance inst = random_relaxation(s);
        std::mt19937_64 rng(s);
        std::vector<double> z0(inst.graph.size());
        for (double& v : z0) v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        Trajectory tr = integrate(inst, z0, {0.01, 50.0, 1e-9, 0.5});
        for (const auto& st : tr.states)
            for (double v : st) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
        CHECK(tr.max_overshoot < 10.0 * 0.01);
    }
}

TEST_CASE("monotone comparison of ordered initial conditions") {
    for (std::uint64_t s = 1; s <= 6; ++s) {
        NodInstance inst = random_relaxation(s);
        const int n = inst.graph.size();
        InputSchedule sched;
        std::mt19937_64 rng(1000 + s);
        auto u01 = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
        for (int i = 0; i < n; ++i)
            if (u01() < 0.5) sched.add_pulse(i, 5.0 * u01(), 5.0 + 5.0 * u01(), 0.05 * u01());
        inst.schedule = sched;
        std::vector<double> lo(n), hi(n);
        for (int i = 0; i < n; ++i) {
            lo[i] = 0.8 * u01();
            hi[i] = lo[i] + (1.0 - lo[i]) * u01();
        }
        IntegrateOptions opts{0.01, 30.0, 0.0, 0.5};
        Trajectory tl = integrate(inst, lo, opts);
        Trajectory th = integrate(inst, hi, opts);
        REQUIRE(tl.times.size() == th.times.size());
        for (std::size_t t = 0; t < tl.times.size(); ++t)
            for (int i = 0; i < n; ++i) CHECK(tl.states[t][i] <= th.states[t][i] + 1e-9);
    }
}

TEST_CASE("halving the step barely moves the final state") {
    for (std::uint64_t s = 1; s <= 5; ++s) {
        NodInstance inst = random_relaxation(s);
        std::vector<int> seed{0};
        std::vector<double> z0(inst.graph.size(), 0.0);
        z0[0] = 1.0;
        Trajectory a = integrate(inst, z0, {0.02, 60.0, 0.0, 1.0});
        Trajectory b = integrate(inst, z0, {0.01, 60.0, 0.0, 1.0});
        for (std::size_t i = 0; i < z0.size(); ++i)
            CHECK(std::fabs(a.states.back()[i] - b.states.back()[i]) < 1e-6);
    }
}

TEST_CASE("nod_cascade classification and seeds") {
    NodInstance inst = random_relaxation(3);
    CascadeReport rep = nod_cascade(inst, {0}, {0.01, 300.0, 1e-9, 0.1});
    for (int i : rep.active_set)
        if (i == 0) CHECK(*rep.activation_time[0] == 0.0);
        else CHECK(*rep.activation_time[i] > 0.0);
    CascadeReport none = nod_cascade(inst, {}, {0.01, 50.0, 1e-9, 0.1});
    CHECK(none.active_set.empty());
    CHECK(none.converged);
}

TEST_CASE("integration rejects bad inputs and reports blowups") {
    WeightedDigraph g(2);
    g.add_edge(0, 1, 1.0);
    NodInstance inst(g, {0.5, 0.5}, 1.0, 0.1);
    CHECK_THROWS(integrate(inst, {0.5}));              // wrong length
    CHECK_THROWS(integrate(inst, {1.5, 0.0}));         // outside the box
    CHECK_THROWS(integrate(inst, {0.0, 0.0}, {0.0}));  // nonpositive step
}
