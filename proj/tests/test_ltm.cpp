#include <doctest.h>

#include <random>

#include "tipcast/ltm.hpp"
#include "tipcast/random_instance.hpp"

using namespace tipcast;

namespace {

LtmInstance two_cycle_ltm(double tau0, double tau1) {
    WeightedDigraph g(2);
    g.add_edge(0, 1, 1.0);
    g.add_edge(1, 0, 1.0);
    return LtmInstance(std::move(g), {tau0, tau1});
}

LtmInstance path_ltm() {
    WeightedDigraph g(3);
    g.add_edge(0, 1, 1.0);
    g.add_edge(1, 2, 1.0);
    return LtmInstance(std::move(g), {0.5, 0.5, 0.5});
}

// Definition-level oracle: recompute (A zeta) from scratch every step and
// iterate until nothing changes, with no step cap.
std::vector<int> naive_cascade(const LtmInstance& inst, const std::vector<int>& seed) {
    const int n = inst.graph.size();
    std::vector<char> z(n, 0);
    for (int i : seed) z[i] = 1;
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<char> next(z.begin(), z.end());
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += inst.graph.weight(i, j) * z[j];
            if (!z[i] && s > inst.tau[i]) {
                next[i] = 1;
                changed = true;
            }
        }
        z.assign(next.begin(), next.end());
    }
    std::vector<int> out;
    for (int i = 0; i < n; ++i)
        if (z[i]) out.push_back(i);
    return out;
}

std::vector<int> bits_to_seed(std::uint64_t m, int n) {
    std::vector<int> s;
    for (int i = 0; i < n; ++i)
        if (m & (std::uint64_t{1} << i)) s.push_back(i);
    return s;
}

}  // namespace

TEST_CASE("ltm_step activates on strict threshold crossing") {
    LtmInstance inst = two_cycle_ltm(0.5, 0.5);
    CHECK(ltm_step(inst, {1, 0}) == BinaryState{1, 1});
    CHECK(ltm_step(inst, {0, 0}) == BinaryState{0, 0});  // zero state is fixed
    LtmInstance boundary = two_cycle_ltm(1.0, 1.0);
    CHECK(ltm_step(boundary, {1, 0}) == BinaryState{1, 0});  // 1 > 1 is false
}

TEST_CASE("cascade on the path graph records activation times") {
    CascadeReport rep = ltm_cascade(path_ltm(), {0});
    CHECK(rep.active_set == std::vector<int>{0, 1, 2});
    CHECK(*rep.activation_time[0] == 0.0);
    CHECK(*rep.activation_time[1] == 1.0);
    CHECK(*rep.activation_time[2] == 2.0);
    CHECK(rep.cascade_size == 3);
    CHECK(rep.converged);
}

TEST_CASE("empty seed stays empty") {
    CascadeReport rep = ltm_cascade(path_ltm(), {});
    CHECK(rep.active_set.empty());
    CHECK(rep.steps_or_final_time == 0.0);
}

TEST_CASE("star hub below threshold stays inactive") {
    WeightedDigraph g(4);
    g.add_edge(1, 0, 1.0);
    g.add_edge(2, 0, 1.0);
    g.add_edge(3, 0, 1.0);
    LtmInstance inst(std::move(g), {2.5, 1.0, 1.0, 1.0});
    CascadeReport rep = ltm_cascade(inst, {1, 2});
    CHECK(rep.active_set == std::vector<int>{1, 2});  // (A zeta)_hub = 2 < 2.5
}

TEST_CASE("cascade matches the definition-level oracle exhaustively") {
    for (std::uint64_t inst_seed = 1; inst_seed <= 8; ++inst_seed) {
        RandomInstanceOptions opt;
        opt.n = 5;
        opt.edge_prob = 0.5;
        opt.tau_min = 0.3;
        opt.tau_max = 2.0;
        opt.seed = inst_seed;
        LtmInstance inst = random_instance(opt);
        for (std::uint64_t m = 0; m < 32; ++m) {
            auto seed = bits_to_seed(m, 5);
            CHECK(ltm_cascade(inst, seed).active_set == naive_cascade(inst, seed));
        }
    }
}

TEST_CASE("monotone in time, monotone in seeds, fixed point within n steps") {
    RandomInstanceOptions opt;
    opt.n = 6;
    opt.edge_prob = 0.4;
    opt.tau_min = 0.3;
    opt.tau_max = 1.5;
    for (std::uint64_t s = 1; s <= 5; ++s) {
        opt.seed = s;
        LtmInstance inst = random_instance(opt);
        // time monotonicity along one trajectory
        BinaryState z(6, 0);
        z[0] = 1;
        for (int t = 0; t < 6; ++t) {
            BinaryState next = ltm_step(inst, z);
            for (int i = 0; i < 6; ++i) CHECK(next[i] >= z[i]);
            z = next;
        }
        // seed monotonicity over all nested seed pairs
        for (std::uint64_t a = 0; a < 64; ++a)
            for (std::uint64_t b = a; b < 64; ++b) {
                if ((a & b) != a) continue;  // require a subset of b
                auto ca = ltm_cascade(inst, bits_to_seed(a, 6)).active_set;
                auto cb = ltm_cascade(inst, bits_to_seed(b, 6)).active_set;
                CHECK(std::includes(cb.begin(), cb.end(), ca.begin(), ca.end()));
            }
        CHECK(ltm_cascade(inst, {0}).steps_or_final_time <= 6.0);
    }
}

TEST_CASE("degeneracy warning fires on an exact tie") {
    LtmInstance inst = two_cycle_ltm(1.0, 0.5);  // (A zeta)_0 = 1.0 == tau_0 when node 1 active
    CascadeReport rep = ltm_cascade(inst, {1});
    CHECK(rep.degeneracy_warning);
}

TEST_CASE("validation of instance construction") {
    WeightedDigraph g(2);
    g.add_edge(0, 1, 1.0);
    CHECK_THROWS(LtmInstance(g, {1.0}));        // wrong length
    CHECK_THROWS(LtmInstance(g, {1.0, 0.0}));   // tau must be positive
    CHECK_THROWS(LtmInstance(g, {1.0, -1.0}));
}
