#include <doctest.h>

#include <sstream>

#include "tipcast/harness.hpp"

using namespace tipcast;

namespace {

LtmInstance path_ltm() {
    WeightedDigraph g(3);
    g.add_edge(0, 1, 1.0);
    g.add_edge(1, 2, 1.0);
    return LtmInstance(std::move(g), {0.5, 0.5, 0.5});
}

}  // namespace

TEST_CASE("compare_once agrees on the path graph") {
    LtmInstance inst = path_ltm();
    GammaStarResult gs = gamma_star(inst, 1.0);
    ComparisonRecord rec =
        compare_once(inst, {0}, 0.5 * gs.usable_gamma_limit, 1.0,
                     IntegrateOptions{0.02, 2000.0, 1e-9, 1.0, 1e-3}, gs.gamma_star);
    CHECK_FALSE(rec.skipped);
    CHECK(rec.ltm_set == std::vector<int>{0, 1, 2});
    CHECK(rec.equality);
    CHECK(rec.containment);
    REQUIRE(rec.within_gamma_star.has_value());
    CHECK(*rec.within_gamma_star);
    // downstream activation times are graded along the path
    REQUIRE(rec.nod_report.activation_time[2].has_value());
    CHECK(*rec.nod_report.activation_time[1] < *rec.nod_report.activation_time[2]);
    CHECK(*rec.nod_report.activation_time[0] == 0.0);
}

TEST_CASE("compare_once records invalid parameter combinations as skipped") {
    ComparisonRecord rec = compare_once(path_ltm(), {0}, 10.0, 1.0);  // product bound violated
    CHECK(rec.skipped);
    CHECK_FALSE(rec.skip_reason.empty());
}

TEST_CASE("run_compare covers the seed x gamma grid") {
    LtmInstance inst = path_ltm();
    CompareConfig cfg;
    cfg.seed_sets = {{}, {0}, {0, 2}};
    cfg.gamma_grid = {0.05, 0.1};
    cfg.k = 1.0;
    cfg.integrate = IntegrateOptions{0.02, 1000.0, 1e-9, 1.0, 1e-3};
    auto recs = run_compare(inst, cfg);
    CHECK(recs.size() == 6);
    CHECK(recs[0].nod_set.empty());  // empty seed stays at the origin
    for (const auto& r : recs) CHECK_FALSE(r.skipped);
}

TEST_CASE("containment sweep has no failures on a small run") {
    SweepConfig cfg;
    cfg.trials = 25;
    cfg.n_max = 15;
    Thm1Summary sum = run_theorem1_sweep(cfg);
    CHECK(sum.trials == 25);
    CHECK(sum.containment_failures == 0);
}

TEST_CASE("exact-recovery sweep has no failures on a small run") {
    SweepConfig cfg;
    cfg.trials = 10;
    cfg.n_max = 8;
    cfg.integrate = IntegrateOptions{0.05, 500.0, 1e-7, 1.0, 1e-3};
    Thm2Summary sum = run_theorem2_sweep(cfg);
    CHECK(sum.instances + sum.skipped_degenerate == 10);
    CHECK(sum.equality_failures == 0);
    CHECK(sum.trials > 0);
}

TEST_CASE("sweeps are reproducible for a fixed master seed") {
    SweepConfig cfg;
    cfg.trials = 5;
    cfg.n_max = 10;
    Thm1Summary a = run_theorem1_sweep(cfg);
    Thm1Summary b = run_theorem1_sweep(cfg);
    CHECK(a.trials == b.trials);
    CHECK(a.containment_failures == b.containment_failures);
}

TEST_CASE("circulant network shape") {
    WeightedDigraph g = circulant_network(5, 2, 0.5);
    CHECK(g.size() == 5);
    CHECK(g.edges().size() == 10);
    CHECK(g.weight(0, 4) == 0.5);  // wraparound in-edge
    CHECK(g.weight(0, 3) == 0.5);
    CHECK(g.weight(0, 2) == 0.0);
    CHECK(is_strongly_connected(g));
    CHECK_THROWS(circulant_network(5, 5, 0.5));
    CHECK_THROWS(circulant_network(5, 0, 0.5));
}

TEST_CASE("synchronized subthreshold pulses tip the group, delayed ones do not") {
    SubthresholdConfig cfg;
    SubthresholdReport sync = run_subthreshold(cfg, SubthresholdMode::synchronized);
    CHECK(sync.delays.empty());
    CHECK(cfg.amplitude < sync.b_star);
    CHECK(sync.collective_cascade);
    CHECK(static_cast<int>(sync.cascade_set.size()) == cfg.n);

    SubthresholdReport delayed = run_subthreshold(cfg, SubthresholdMode::delayed);
    CHECK(delayed.delays.size() == static_cast<std::size_t>(cfg.n));
    CHECK_FALSE(delayed.collective_cascade);
    for (double m : delayed.max_state) CHECK(m < 0.5);
}

TEST_CASE("subthreshold scenario rejects pulses at or above the tipping input") {
    SubthresholdConfig cfg;
    cfg.amplitude = 1.0;
    CHECK_THROWS(run_subthreshold(cfg, SubthresholdMode::synchronized));
}

TEST_CASE("pinned witness: large gamma strictly enlarges the cascade") {
    SupersetWitness w = strict_superset_witness();
    IntegrateOptions opts{0.02, 500.0, 1e-9, 0.5, 1e-3};
    ComparisonRecord small =
        compare_once(w.instance, w.seed_set, w.gamma_small, w.k, opts, w.gamma_star_value);
    CHECK_FALSE(small.skipped);
    CHECK(small.equality);
    ComparisonRecord large =
        compare_once(w.instance, w.seed_set, w.gamma_large, w.k, opts, w.gamma_star_value);
    CHECK_FALSE(large.skipped);
    CHECK(large.containment);
    CHECK(large.nod_set.size() > large.ltm_set.size());
}

TEST_CASE("bifurcation CSV contains the saddle-node row") {
    BifurcationConfig cfg;
    std::string csv = run_bifurcation_csv(cfg);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "b,z,stability");
    bool saw_saddle = false;
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        if (line.find("saddle-node") != std::string::npos) {
            saw_saddle = true;
            CHECK(line.find("0.0625") != std::string::npos);
            CHECK(line.find("0.25") != std::string::npos);
        }
    }
    CHECK(saw_saddle);
    CHECK(rows > cfg.points);  // multiple branches per grid value
}
