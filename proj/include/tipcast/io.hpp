#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tipcast/ltm.hpp"
#include "tipcast/nod.hpp"

namespace tipcast {

inline constexpr int kSchemaVersion = 1;

/// Contents of an instance file: always a graph, optionally LTM thresholds
/// and/or explicit NOD parameters.
struct InstanceFile {
    WeightedDigraph graph;
    std::optional<std::vector<double>> tau;
    std::optional<std::vector<double>> mu;
    std::optional<double> k;
    std::optional<double> gamma;
    std::optional<InputSchedule> schedule;
};

/// Edge-list text: `src dst weight` per line, 0-indexed, `#` comments.
/// Node count is inferred from the largest index.
inline WeightedDigraph parse_edge_list(const std::string& text) {
    struct Row {
        int src, dst;
        double w;
    };
    std::vector<Row> rows;
    int max_node = -1;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        int src, dst;
        double w;
        if (!(ls >> src)) continue;  // blank / comment-only line
        std::string trailing;
        if (!(ls >> dst >> w) || (ls >> trailing))
            throw std::runtime_error("parse error at line " + std::to_string(lineno) +
                                     ": expected `src dst weight`");
        if (src < 0 || dst < 0)
            throw std::runtime_error("parse error at line " + std::to_string(lineno) +
                                     ": negative node index");
        rows.push_back({src, dst, w});
        max_node = std::max({max_node, src, dst});
    }
    if (rows.empty())
        throw std::runtime_error("empty edge list: node count cannot be inferred");
    WeightedDigraph g(max_node + 1);
    for (const Row& r : rows) g.add_edge(r.src, r.dst, r.w);
    return g;
}

inline InstanceFile parse_instance_json(const nlohmann::json& j) {
    if (!j.contains("n")) throw std::runtime_error("instance JSON missing \"n\"");
    WeightedDigraph g(j.at("n").get<int>());
    if (j.contains("edges"))
        for (const auto& e : j.at("edges"))
            g.add_edge(e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>());
    InstanceFile f{std::move(g), {}, {}, {}, {}, {}};
    if (j.contains("tau")) f.tau = j.at("tau").get<std::vector<double>>();
    if (j.contains("mu")) f.mu = j.at("mu").get<std::vector<double>>();
    if (j.contains("k")) f.k = j.at("k").get<double>();
    if (j.contains("gamma")) f.gamma = j.at("gamma").get<double>();
    if (j.contains("schedule")) {
        InputSchedule s;
        for (const auto& p : j.at("schedule").at("pulses"))
            s.add_pulse(p.at("node").get<int>(), p.at("start").get<double>(),
                        p.at("end").get<double>(), p.at("amplitude").get<double>());
        f.schedule = std::move(s);
    }
    return f;
}

/// Loads either format: JSON when the first non-space character is '{',
/// otherwise whitespace edge-list text.
inline InstanceFile load_instance_text(const std::string& text) {
    auto pos = text.find_first_not_of(" \t\r\n");
    if (pos != std::string::npos && text[pos] == '{')
        return parse_instance_json(nlohmann::json::parse(text));
    return {parse_edge_list(text), {}, {}, {}, {}, {}};
}

inline WeightedDigraph load_graph(const std::string& text) {
    return load_instance_text(text).graph;
}

inline LtmInstance load_ltm(const std::string& text) {
    InstanceFile f = load_instance_text(text);
    if (!f.tau) throw std::runtime_error("instance has no \"tau\" threshold vector");
    return LtmInstance(std::move(f.graph), std::move(*f.tau));
}

inline nlohmann::json graph_to_json(const WeightedDigraph& g) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["n"] = g.size();
    std::vector<Edge> es = g.edges();
    std::sort(es.begin(), es.end(), [](const Edge& a, const Edge& b) {
        return a.src != b.src ? a.src < b.src : a.dst < b.dst;
    });
    j["edges"] = nlohmann::json::array();
    for (const Edge& e : es) j["edges"].push_back({e.src, e.dst, e.weight});
    return j;
}

inline nlohmann::json ltm_to_json(const LtmInstance& inst) {
    nlohmann::json j = graph_to_json(inst.graph);
    j["tau"] = inst.tau;
    return j;
}

inline nlohmann::json schedule_to_json(const InputSchedule& s) {
    nlohmann::json pulses = nlohmann::json::array();
    for (const auto& p : s.pulses)
        pulses.push_back(
            {{"node", p.node}, {"start", p.start}, {"end", p.end}, {"amplitude", p.amplitude}});
    return {{"pulses", pulses}};
}

inline nlohmann::json nod_to_json(const NodInstance& inst) {
    nlohmann::json j = graph_to_json(inst.graph);
    j["mu"] = inst.mu;
    j["k"] = inst.k;
    j["gamma"] = inst.gamma;
    if (!inst.schedule.empty()) j["schedule"] = schedule_to_json(inst.schedule);
    return j;
}

inline nlohmann::json cascade_report_to_json(const CascadeReport& rep) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["active_set"] = rep.active_set;
    j["cascade_size"] = rep.cascade_size;
    j["converged"] = rep.converged;
    j["steps_or_final_time"] = rep.steps_or_final_time;
    if (rep.degeneracy_warning) j["degeneracy_warning"] = true;
    if (!rep.indeterminate.empty()) j["indeterminate"] = rep.indeterminate;
    nlohmann::json times = nlohmann::json::object();
    for (std::size_t i = 0; i < rep.activation_time.size(); ++i)
        if (rep.activation_time[i]) times[std::to_string(i)] = *rep.activation_time[i];
    j["activation_time"] = times;
    return j;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << contents;
}

inline void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ostringstream ss;
    ss.precision(12);
    ss << "t";
    if (!traj.states.empty())
        for (std::size_t i = 0; i < traj.states.front().size(); ++i) ss << ",z" << i;
    ss << "\n";
    for (std::size_t s = 0; s < traj.times.size(); ++s) {
        ss << traj.times[s];
        for (double v : traj.states[s]) ss << "," << v;
        ss << "\n";
    }
    write_file(path, ss.str());
}

}  // namespace tipcast
