#include "rowsim/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace rowsim {

std::vector<InitialVehicle> parse_scenario_text(const std::string& text) {
    std::vector<InitialVehicle> out;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream fields(line);
        std::string name, intention;
        int lane = 0;
        double s = 0.0, v = 0.0;
        if (!(fields >> name)) continue;  // blank line
        if (!(fields >> lane >> intention >> s >> v)) {
            throw std::invalid_argument("scenario line " + std::to_string(line_no) +
                                        ": expected 'name lane intention s v'");
        }
        std::string extra;
        if (fields >> extra)
            throw std::invalid_argument("scenario line " + std::to_string(line_no) +
                                        ": trailing field '" + extra + "'");
        InitialVehicle iv;
        iv.name = name;
        try {
            branch_of_entry_lane(lane);
            iv.intention = intention_from_string(intention);
        } catch (const std::exception& e) {
            throw std::invalid_argument("scenario line " + std::to_string(line_no) +
                                        ": " + e.what());
        }
        iv.lane = lane;
        iv.s = s;
        iv.v = v;
        out.push_back(iv);
    }
    return out;
}

std::vector<InitialVehicle> load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

ScenarioResult run_scenario(const SimConfig& cfg, StrategyKind strategy,
                            const std::vector<InitialVehicle>& vehicles) {
    Simulation sim(cfg, strategy, vehicles);
    ScenarioResult result;
    result.run = sim.run();
    std::map<int, ScenarioEntry> entries;
    for (const Event& e : result.run.log) {
        if (e.kind == EventKind::JunctionEnter) {
            ScenarioEntry entry;
            entry.vid = e.vid;
            entry.name = sim.world().name_of(e.vid);
            entry.junction_enter = e.t;
            entries[e.vid] = entry;
        } else if (e.kind == EventKind::JunctionExit) {
            auto it = entries.find(e.vid);
            if (it != entries.end()) it->second.junction_exit = e.t;
        }
    }
    for (auto& [vid, entry] : entries) result.order.push_back(entry);
    std::sort(result.order.begin(), result.order.end(),
              [](const ScenarioEntry& a, const ScenarioEntry& b) {
                  if (a.junction_enter != b.junction_enter)
                      return a.junction_enter < b.junction_enter;
                  return a.vid < b.vid;
              });
    return result;
}

std::string format_passing_order(const ScenarioResult& result) {
    std::ostringstream out;
    out << "passing order (junction entry):\n";
    char buf[96];
    for (const ScenarioEntry& e : result.order) {
        std::snprintf(buf, sizeof(buf), "  %-8s enter %7.2f s   exit %7.2f s\n",
                      e.name.c_str(), e.junction_enter, e.junction_exit);
        out << buf;
    }
    return out.str();
}

}  // namespace rowsim
