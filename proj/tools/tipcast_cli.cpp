// Command-line front end: cascade runs, relaxation construction, equivalence
// bounds, theorem sweeps, and the pinned experiment scenarios.
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tipcast/harness.hpp"
#include "tipcast/io.hpp"

using nlohmann::json;
using namespace tipcast;

namespace {

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(std::stoi(tok));
    return out;
}

std::vector<std::vector<int>> parse_seed_sets(const std::string& s) {
    std::vector<std::vector<int>> out;
    std::stringstream ss(s);
    std::string grp;
    while (std::getline(ss, grp, ';')) out.push_back(parse_int_list(grp));
    if (out.empty()) out.push_back({});
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(std::stod(tok));
    return out;
}

// --config file.json overrides flag values for any key it carries
json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    return json::parse(read_file(path));
}

template <typename T>
void override_from(const json& cfg, const char* key, T& value) {
    if (cfg.contains(key)) value = cfg.at(key).get<T>();
}

json comparison_to_json(const ComparisonRecord& rec) {
    json j;
    j["seed_set"] = rec.seed_set;
    j["gamma"] = rec.gamma;
    j["k"] = rec.k;
    if (rec.skipped) {
        j["skipped"] = true;
        j["skip_reason"] = rec.skip_reason;
        return j;
    }
    j["ltm_set"] = rec.ltm_set;
    j["nod_set"] = rec.nod_set;
    j["containment"] = rec.containment;
    j["equality"] = rec.equality;
    if (rec.gamma_star_value) j["gamma_star"] = *rec.gamma_star_value;
    if (rec.within_gamma_star) j["within_gamma_star"] = *rec.within_gamma_star;
    j["ltm_report"] = cascade_report_to_json(rec.ltm_report);
    j["nod_report"] = cascade_report_to_json(rec.nod_report);
    return j;
}

std::string comparisons_to_csv(const std::vector<ComparisonRecord>& recs) {
    std::ostringstream ss;
    ss << "seed_set,gamma,k,ltm_size,nod_size,containment,equality,gamma_star,within_gamma_star,"
          "skipped\n";
    ss.precision(12);
    for (const auto& r : recs) {
        ss << '"';
        for (std::size_t i = 0; i < r.seed_set.size(); ++i) ss << (i ? " " : "") << r.seed_set[i];
        ss << '"' << ',' << r.gamma << ',' << r.k << ',' << r.ltm_set.size() << ','
           << r.nod_set.size() << ',' << r.containment << ',' << r.equality << ',';
        if (r.gamma_star_value) ss << *r.gamma_star_value;
        ss << ',';
        if (r.within_gamma_star) ss << *r.within_gamma_star;
        ss << ',' << r.skipped << '\n';
    }
    return ss.str();
}

int run_ltm(const std::string& instance_path, const std::string& seed_str,
            const std::string& out_path, const std::string& steps_csv) {
    LtmInstance inst = load_ltm(read_file(instance_path));
    CascadeReport rep = ltm_cascade(inst, parse_int_list(seed_str));
    json j = cascade_report_to_json(rep);
    j["instance"] = instance_path;
    j["seed"] = parse_int_list(seed_str);
    if (!out_path.empty()) write_file(out_path, j.dump(2) + "\n");
    else std::cout << j.dump(2) << "\n";
    if (!steps_csv.empty()) {
        std::ostringstream ss;
        ss << "step,node,state\n";
        const int steps = static_cast<int>(rep.steps_or_final_time);
        for (int s = 0; s <= steps; ++s)
            for (int i = 0; i < inst.graph.size(); ++i) {
                const bool on = rep.activation_time[i] && *rep.activation_time[i] <= s;
                ss << s << ',' << i << ',' << (on ? 1 : 0) << '\n';
            }
        write_file(steps_csv, ss.str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linear threshold cascades and their continuous opinion-dynamics relaxation"};
    app.require_subcommand(1);

    std::string instance_path, schedule_path, out_path, report_path, config_path;
    std::string seed_str, seeds_str = "", gammas_str;
    double gamma = 0.3, k = 1.1, step = 0.01, tmax = 500.0, sample_every = 0.1;

    // ltm run
    auto* ltm_cmd = app.add_subcommand("ltm", "discrete linear threshold model");
    auto* ltm_run = ltm_cmd->add_subcommand("run", "run a cascade from a seed set");
    std::string ltm_steps_csv;
    ltm_run->add_option("--instance", instance_path)->required();
    ltm_run->add_option("--seed", seed_str, "comma-separated node indices");
    ltm_run->add_option("--out", out_path, "cascade report JSON");
    ltm_run->add_option("--steps-csv", ltm_steps_csv, "per-step state CSV");
    ltm_run->add_option("--config", config_path);

    // nod run
    auto* nod_cmd = app.add_subcommand("nod", "continuous opinion dynamics");
    auto* nod_run = nod_cmd->add_subcommand("run", "integrate from a seed set");
    nod_run->add_option("--instance", instance_path)->required();
    nod_run->add_option("--schedule", schedule_path, "input schedule JSON");
    nod_run->add_option("--seed", seed_str);
    nod_run->add_option("--gamma", gamma);
    nod_run->add_option("--k", k);
    nod_run->add_option("--step", step);
    nod_run->add_option("--tmax", tmax);
    nod_run->add_option("--sample-every", sample_every);
    nod_run->add_option("--out", out_path, "trajectory CSV");
    nod_run->add_option("--report", report_path, "cascade report JSON");
    nod_run->add_option("--config", config_path);

    // relax
    auto* relax_cmd = app.add_subcommand("relax", "build the NOD relaxation of an LTM instance");
    relax_cmd->add_option("--instance", instance_path)->required();
    relax_cmd->add_option("--gamma", gamma);
    relax_cmd->add_option("--k", k);
    relax_cmd->add_option("--out", out_path, "NOD instance JSON");
    relax_cmd->add_option("--config", config_path);

    // gamma-star
    auto* gstar_cmd = app.add_subcommand("gamma-star", "delta_gap, gamma*, degeneracy");
    gstar_cmd->add_option("--instance", instance_path)->required();
    gstar_cmd->add_option("--k", k);
    gstar_cmd->add_option("--config", config_path);

    // compare
    auto* cmp_cmd = app.add_subcommand("compare", "LTM vs NOD cascades over a gamma grid");
    cmp_cmd->add_option("--instance", instance_path)->required();
    cmp_cmd->add_option("--seeds", seeds_str, "seed sets, e.g. \"0,3;1;\" (';' separates sets)");
    cmp_cmd->add_option("--gammas", gammas_str, "comma-separated gamma grid")->required();
    cmp_cmd->add_option("--k", k);
    cmp_cmd->add_option("--step", step);
    cmp_cmd->add_option("--tmax", tmax);
    cmp_cmd->add_option("--out", out_path, "output prefix (.csv and .json)");
    cmp_cmd->add_option("--config", config_path);

    // sweep thm1 / thm2
    auto* sweep_cmd = app.add_subcommand("sweep", "randomized theorem-verification sweeps");
    int trials = 200, n_max = 30;
    std::uint64_t master_seed = 20260823;
    auto* thm1 = sweep_cmd->add_subcommand("thm1", "containment: LTM cascade within NOD cascade");
    auto* thm2 = sweep_cmd->add_subcommand("thm2", "exact recovery below gamma*");
    for (auto* sc : {thm1, thm2}) {
        sc->add_option("--trials", trials);
        sc->add_option("--nmax", n_max);
        sc->add_option("--master-seed", master_seed);
        sc->add_option("--out", out_path, "summary JSON");
        sc->add_option("--config", config_path);
    }

    // experiment scenarios
    auto* exp_cmd = app.add_subcommand("experiment", "pinned scenario reproductions");
    auto* bif = exp_cmd->add_subcommand("bifurcation", "single-agent equilibrium branches");
    BifurcationConfig bif_cfg;
    bif->add_option("--mu", bif_cfg.mu);
    bif->add_option("--k", bif_cfg.k);
    bif->add_option("--bmin", bif_cfg.b_min);
    bif->add_option("--bmax", bif_cfg.b_max);
    bif->add_option("--points", bif_cfg.points);
    bif->add_option("--out", out_path, "branch CSV");
    bif->add_option("--config", config_path);

    SubthresholdConfig sub_cfg;
    auto* sub_sync = exp_cmd->add_subcommand("subthreshold-sync", "simultaneous weak pulses");
    auto* sub_del = exp_cmd->add_subcommand("subthreshold-delayed", "randomly delayed weak pulses");
    for (auto* sc : {sub_sync, sub_del}) {
        sc->add_option("--n", sub_cfg.n);
        sc->add_option("--amplitude", sub_cfg.amplitude);
        sc->add_option("--duration", sub_cfg.duration);
        sc->add_option("--delay-seed", sub_cfg.delay_seed);
        sc->add_option("--out", out_path, "output prefix (.csv and .json)");
        sc->add_option("--config", config_path);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const json cfg = load_config(config_path);
        override_from(cfg, "instance", instance_path);
        override_from(cfg, "gamma", gamma);
        override_from(cfg, "k", k);
        override_from(cfg, "step", step);
        override_from(cfg, "tmax", tmax);
        override_from(cfg, "seed", seed_str);
        override_from(cfg, "seeds", seeds_str);
        override_from(cfg, "gammas", gammas_str);
        override_from(cfg, "trials", trials);
        override_from(cfg, "nmax", n_max);
        override_from(cfg, "master_seed", master_seed);
        override_from(cfg, "out", out_path);

        if (ltm_run->parsed()) return run_ltm(instance_path, seed_str, out_path, ltm_steps_csv);

        if (nod_run->parsed()) {
            InstanceFile f = load_instance_text(read_file(instance_path));
            std::optional<NodInstance> nod;
            if (f.mu && f.k && f.gamma) {
                nod.emplace(std::move(f.graph), std::move(*f.mu), *f.k, *f.gamma,
                            f.schedule.value_or(InputSchedule{}));
            } else if (f.tau) {
                LtmInstance ltm(std::move(f.graph), std::move(*f.tau));
                nod = relax(ltm, gamma, k).first;
            } else {
                throw std::runtime_error("instance needs either (mu,k,gamma) or tau with --gamma/--k");
            }
            if (!schedule_path.empty()) {
                json sj = json::parse(read_file(schedule_path));
                InputSchedule sched;
                for (const auto& p : sj.at("pulses"))
                    sched.add_pulse(p.at("node").get<int>(), p.at("start").get<double>(),
                                    p.at("end").get<double>(), p.at("amplitude").get<double>());
                nod->schedule = std::move(sched);
            }
            IntegrateOptions opts;
            opts.step = step;
            opts.t_max = tmax;
            opts.sample_every = sample_every;
            const std::vector<int> seed = parse_int_list(seed_str);
            CascadeReport rep = nod_cascade(*nod, seed, opts);
            if (!out_path.empty()) {
                std::vector<double> z0(nod->graph.size(), 0.0);
                for (int i : seed) z0[i] = 1.0;
                write_trajectory_csv(out_path, integrate(*nod, z0, opts));
            }
            json j = cascade_report_to_json(rep);
            j["gamma"] = nod->gamma;
            j["k"] = nod->k;
            if (!report_path.empty()) write_file(report_path, j.dump(2) + "\n");
            else std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (relax_cmd->parsed()) {
            LtmInstance ltm = load_ltm(read_file(instance_path));
            auto [nod, params] = relax(ltm, gamma, k);
            json j = nod_to_json(nod);
            j["relaxation"] = {{"gamma", params.gamma},
                               {"k", params.k},
                               {"mu_positive", params.mu_positive},
                               {"product_bound", params.product_bound},
                               {"neutral_stable_sufficient", params.neutral_stable_sufficient}};
            if (!out_path.empty()) write_file(out_path, j.dump(2) + "\n");
            else std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (gstar_cmd->parsed()) {
            LtmInstance ltm = load_ltm(read_file(instance_path));
            GammaStarResult r = gamma_star(ltm, k);
            json j;
            j["schema_version"] = kSchemaVersion;
            j["delta_gap"] = r.delta_gap;
            j["gamma_star"] = r.gamma_star;
            j["usable_gamma_limit"] = r.usable_gamma_limit;
            j["tau_inf"] = r.tau_inf;
            j["a_inf"] = r.a_inf;
            j["enumeration_cost"] = r.enumeration_cost;
            j["degenerate"] = r.degenerate;
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (cmp_cmd->parsed()) {
            LtmInstance ltm = load_ltm(read_file(instance_path));
            CompareConfig c;
            c.seed_sets = parse_seed_sets(seeds_str);
            c.gamma_grid = parse_double_list(gammas_str);
            c.k = k;
            c.integrate.step = step;
            c.integrate.t_max = tmax;
            auto recs = run_compare(ltm, c);
            json j;
            j["schema_version"] = kSchemaVersion;
            j["instance"] = instance_path;
            j["records"] = json::array();
            for (const auto& r : recs) j["records"].push_back(comparison_to_json(r));
            if (!out_path.empty()) {
                write_file(out_path + ".json", j.dump(2) + "\n");
                write_file(out_path + ".csv", comparisons_to_csv(recs));
            } else {
                std::cout << j.dump(2) << "\n";
            }
            return 0;
        }

        if (thm1->parsed() || thm2->parsed()) {
            SweepConfig c;
            c.trials = trials;
            c.n_max = n_max;
            c.master_seed = master_seed;
            json j;
            j["schema_version"] = kSchemaVersion;
            j["master_seed"] = master_seed;
            int failures = 0;
            if (thm1->parsed()) {
                Thm1Summary s = run_theorem1_sweep(c);
                failures = s.containment_failures;
                j["trials"] = s.trials;
                j["containment_failures"] = s.containment_failures;
                for (const auto& f : s.failures)
                    j["failures"].push_back({{"trial", f.trial}, {"detail", f.detail}});
            } else {
                c.integrate = IntegrateOptions{0.05, 500.0, 1e-7, 1.0, 1e-3};
                Thm2Summary s = run_theorem2_sweep(c);
                failures = s.equality_failures;
                j["instances"] = s.instances;
                j["trials"] = s.trials;
                j["equality_failures"] = s.equality_failures;
                j["skipped_degenerate"] = s.skipped_degenerate;
                j["above_gamma_star_tested"] = s.above_gamma_star_tested;
                j["above_gamma_star_equal"] = s.above_gamma_star_equal;
                for (const auto& f : s.failures)
                    j["failures"].push_back({{"trial", f.trial}, {"detail", f.detail}});
            }
            if (!out_path.empty()) write_file(out_path, j.dump(2) + "\n");
            std::cout << j.dump(2) << "\n";
            return failures == 0 ? 0 : 2;
        }

        if (bif->parsed()) {
            std::string csv = run_bifurcation_csv(bif_cfg);
            if (!out_path.empty()) write_file(out_path, csv);
            else std::cout << csv;
            return 0;
        }

        if (sub_sync->parsed() || sub_del->parsed()) {
            const SubthresholdMode mode = sub_sync->parsed() ? SubthresholdMode::synchronized
                                                             : SubthresholdMode::delayed;
            SubthresholdReport rep = run_subthreshold(sub_cfg, mode);
            json j;
            j["schema_version"] = kSchemaVersion;
            j["config"] = {{"n", sub_cfg.n},
                           {"in_degree", sub_cfg.in_degree},
                           {"edge_weight", sub_cfg.edge_weight},
                           {"tau", sub_cfg.tau},
                           {"gamma", sub_cfg.gamma},
                           {"k", sub_cfg.k},
                           {"amplitude", sub_cfg.amplitude},
                           {"duration", sub_cfg.duration},
                           {"delay_seed", sub_cfg.delay_seed},
                           {"mode", sub_sync->parsed() ? "synchronized" : "delayed"}};
            j["b_star"] = rep.b_star;
            j["cascade_set"] = rep.cascade_set;
            j["cascade_size"] = rep.cascade_set.size();
            j["collective_cascade"] = rep.collective_cascade;
            j["max_state"] = rep.max_state;
            if (!rep.delays.empty()) j["delays"] = rep.delays;
            if (!out_path.empty()) {
                write_file(out_path + ".json", j.dump(2) + "\n");
                write_trajectory_csv(out_path + ".csv", rep.trajectory);
            } else {
                std::cout << j.dump(2) << "\n";
            }
            return 0;
        }

        std::cerr << "no action selected\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
