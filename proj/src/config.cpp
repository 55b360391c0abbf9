#include "rowsim/config.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace rowsim {

const char* to_string(StrategyKind k) {
    switch (k) {
        case StrategyKind::Rss: return "rss";
        case StrategyKind::Rwa: return "rwa";
        case StrategyKind::Coop: return "coop";
    }
    return "?";
}

StrategyKind strategy_from_string(const std::string& s) {
    if (s == "rss" || s == "RSS") return StrategyKind::Rss;
    if (s == "rwa" || s == "RWA") return StrategyKind::Rwa;
    if (s == "coop" || s == "COOP" || s == "mcts") return StrategyKind::Coop;
    throw std::invalid_argument("unknown strategy: " + s);
}

namespace {

void fail(const std::string& key, const std::string& why) {
    throw std::invalid_argument("config key '" + key + "': " + why);
}

void require(bool ok, const std::string& key, const std::string& why) {
    if (!ok) fail(key, why);
}

double parse_number(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double out = 0.0;
    try {
        out = std::stod(value, &pos);
    } catch (const std::exception&) {
        fail(key, "expected a number, got '" + value + "'");
    }
    while (pos < value.size() && std::isspace(static_cast<unsigned char>(value[pos])))
        ++pos;
    if (pos != value.size()) fail(key, "trailing characters in '" + value + "'");
    return out;
}

bool parse_flag(const std::string& key, const std::string& value) {
    if (value == "on" || value == "true" || value == "1") return true;
    if (value == "off" || value == "false" || value == "0") return false;
    fail(key, "expected on/off, got '" + value + "'");
    return false;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

void SimConfig::validate() const {
    require(lambda >= 0.0, "lambda", "must be >= 0");
    require(duration > 0.0, "duration", "must be > 0");
    require(dt > 0.0, "dt", "must be > 0");
    require(accept_probability >= 0.0 && accept_probability <= 1.0,
            "accept_probability", "must be within [0, 1]");
    require(ratio_left >= 0.0 && ratio_right >= 0.0 && ratio_straight >= 0.0 &&
                ratio_left + ratio_right + ratio_straight > 0.0,
            "ratio_left/ratio_right/ratio_straight",
            "ratios must be non-negative with a positive sum");
    require(speed_limit_straight > 0.0, "speed_limit_straight", "must be > 0");
    require(speed_limit_turn > 0.0 && speed_limit_turn <= speed_limit_straight,
            "speed_limit_turn", "must be in (0, speed_limit_straight]");
    require(a_comfort > 0.0, "a_comfort", "must be > 0");
    require(vehicle_length > 0.0, "vehicle_length", "must be > 0");
    require(spawn_speed >= 0.0 && spawn_speed <= speed_limit_straight, "spawn_speed",
            "must be in [0, speed_limit_straight]");
    require(brakes.rho >= 0.0, "rho", "must be >= 0");
    require(brakes.a_min_brake > 0.0 && brakes.a_min_brake <= brakes.a_max_brake,
            "a_min_brake", "need 0 < a_min_brake <= a_max_brake");
    require(brakes.b_min_brake > 0.0 && brakes.b_min_brake <= brakes.b_max_brake,
            "b_min_brake", "need 0 < b_min_brake <= b_max_brake");
    require(layout.lane_width > 0.0, "lane_width", "must be > 0");
    require(layout.control_radius > 2.0 * layout.lane_width, "control_radius",
            "must exceed the junction extent");
    require(layout.spawn_distance > layout.control_radius, "spawn_distance",
            "must exceed control_radius");
    require(platoon_gap_factor >= 0.0, "platoon_gap_factor", "must be >= 0");
    require(warm_up >= 0.0 && warm_up < duration, "warm_up", "must be in [0, duration)");
    require(coop_delta >= 0.0, "coop_delta", "must be >= 0");
    require(coop_cell_size > 0.0, "coop_cell_size", "must be > 0");
    require(coop_replan_period > 0.0, "coop_replan_period", "must be > 0");
    require(coop_rollout_budget > 0, "coop_rollout_budget", "must be > 0");
    require(coop_exact_threshold >= 0, "coop_exact_threshold", "must be >= 0");
    require(coop_merge_headway >= 0.0, "coop_merge_headway", "must be >= 0");
}

void apply_override(SimConfig& cfg, const std::string& key, const std::string& value) {
    auto num = [&] { return parse_number(key, value); };
    if (key == "lambda") cfg.lambda = num();
    else if (key == "duration") cfg.duration = num();
    else if (key == "dt") cfg.dt = num();
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(num());
    else if (key == "accept_probability") cfg.accept_probability = num();
    else if (key == "ratio_left") cfg.ratio_left = num();
    else if (key == "ratio_right") cfg.ratio_right = num();
    else if (key == "ratio_straight") cfg.ratio_straight = num();
    else if (key == "speed_limit_straight") cfg.speed_limit_straight = num();
    else if (key == "speed_limit_turn") cfg.speed_limit_turn = num();
    else if (key == "a_comfort") cfg.a_comfort = num();
    else if (key == "vehicle_length") cfg.vehicle_length = num();
    else if (key == "spawn_speed") cfg.spawn_speed = num();
    else if (key == "rho") cfg.brakes.rho = num();
    else if (key == "a_max_brake") cfg.brakes.a_max_brake = num();
    else if (key == "a_min_brake") cfg.brakes.a_min_brake = num();
    else if (key == "b_max_brake") cfg.brakes.b_max_brake = num();
    else if (key == "b_min_brake") cfg.brakes.b_min_brake = num();
    else if (key == "lane_width") cfg.layout.lane_width = num();
    else if (key == "control_radius") cfg.layout.control_radius = num();
    else if (key == "spawn_distance") cfg.layout.spawn_distance = num();
    else if (key == "platoon_gap_factor") cfg.platoon_gap_factor = num();
    else if (key == "warm_up") cfg.warm_up = num();
    else if (key == "rss_tie_break") cfg.rss_tie_break = parse_flag(key, value);
    else if (key == "coop_delta") cfg.coop_delta = num();
    else if (key == "coop_cell_size") cfg.coop_cell_size = num();
    else if (key == "coop_replan_period") cfg.coop_replan_period = num();
    else if (key == "coop_rollout_budget") cfg.coop_rollout_budget = static_cast<int>(num());
    else if (key == "coop_exact_threshold") cfg.coop_exact_threshold = static_cast<int>(num());
    else if (key == "coop_merge_headway") cfg.coop_merge_headway = num();
    else fail(key, "unknown key");
}

SimConfig parse_config_text(const std::string& text) {
    SimConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        apply_override(cfg, key, value);
    }
    cfg.validate();
    return cfg;
}

SimConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string config_to_text(const SimConfig& c) {
    std::ostringstream out;
    out << "lambda = " << c.lambda << "                # veh/(lane.h)\n"
        << "duration = " << c.duration << "            # s\n"
        << "dt = " << c.dt << "                        # s\n"
        << "seed = " << c.seed << "\n"
        << "accept_probability = " << c.accept_probability << "\n"
        << "ratio_left = " << c.ratio_left << "\n"
        << "ratio_right = " << c.ratio_right << "\n"
        << "ratio_straight = " << c.ratio_straight << "\n"
        << "speed_limit_straight = " << c.speed_limit_straight << "  # m/s\n"
        << "speed_limit_turn = " << c.speed_limit_turn << "          # m/s\n"
        << "a_comfort = " << c.a_comfort << "          # m/s^2\n"
        << "vehicle_length = " << c.vehicle_length << "  # m\n"
        << "spawn_speed = " << c.spawn_speed << "      # m/s\n"
        << "rho = " << c.brakes.rho << "               # s\n"
        << "a_max_brake = " << c.brakes.a_max_brake << "  # m/s^2\n"
        << "a_min_brake = " << c.brakes.a_min_brake << "\n"
        << "b_max_brake = " << c.brakes.b_max_brake << "\n"
        << "b_min_brake = " << c.brakes.b_min_brake << "\n"
        << "lane_width = " << c.layout.lane_width << "  # m\n"
        << "control_radius = " << c.layout.control_radius << "  # m\n"
        << "spawn_distance = " << c.layout.spawn_distance << "  # m\n"
        << "platoon_gap_factor = " << c.platoon_gap_factor << "\n"
        << "warm_up = " << c.warm_up << "              # s\n"
        << "rss_tie_break = " << (c.rss_tie_break ? "on" : "off") << "\n"
        << "coop_delta = " << c.coop_delta << "        # s\n"
        << "coop_cell_size = " << c.coop_cell_size << "  # m\n"
        << "coop_replan_period = " << c.coop_replan_period << "  # s\n"
        << "coop_rollout_budget = " << c.coop_rollout_budget << "\n"
        << "coop_exact_threshold = " << c.coop_exact_threshold << "\n"
        << "coop_merge_headway = " << c.coop_merge_headway << "  # s\n";
    return out.str();
}

}  // namespace rowsim
