#include "rowsim/strategy_coop.hpp"

#include <algorithm>
#include <cmath>

namespace rowsim {

namespace {

constexpr double kStaleSlack = 1.0;    // s past the slot before a replan is asked
constexpr double kReleaseLead = 0.05;  // s before the slot the release fires

double time_to_cover(double dist, double v0, double vmax, double accel) {
    if (dist <= 0.0) return 0.0;
    v0 = std::min(v0, vmax);
    const double s_acc = (vmax * vmax - v0 * v0) / (2.0 * accel);
    if (dist <= s_acc)
        return (-v0 + std::sqrt(v0 * v0 + 2.0 * accel * dist)) / accel;
    return (vmax - v0) / accel + (dist - s_acc) / vmax;
}

}  // namespace

SubzoneGrid build_grid(const IntersectionLayout& layout, double cell_size) {
    if (cell_size <= 0.0) throw std::invalid_argument("cell_size must be positive");
    SubzoneGrid grid;
    grid.cell_size = cell_size;
    const double hw = layout.junction_half_width();
    grid.cells_per_side = std::max(1, static_cast<int>(std::ceil(2.0 * hw / cell_size - 1e-9)));
    const int n = grid.cells_per_side;
    grid.footprints.resize(layout.paths().size());
    for (std::size_t pi = 0; pi < layout.paths().size(); ++pi) {
        const PathGeom& path = layout.paths()[pi];
        std::map<int, std::pair<double, double>> spans;
        const double len = path.s_junction_exit - path.s_junction_entry;
        const double step = 0.01;
        for (double off = 0.0; off <= len + 1e-9; off += step) {
            const Vec2 p = path.position(path.s_junction_entry + std::min(off, len));
            int ix = static_cast<int>(std::floor((p.x + hw) / cell_size));
            int iy = static_cast<int>(std::floor((p.y + hw) / cell_size));
            ix = std::clamp(ix, 0, n - 1);
            iy = std::clamp(iy, 0, n - 1);
            const int cell = iy * n + ix;
            auto it = spans.find(cell);
            if (it == spans.end()) spans[cell] = {off, off};
            else it->second.second = off;
        }
        auto& fp = grid.footprints[pi];
        for (const auto& [cell, span] : spans)
            fp.push_back({cell, span.first, std::min(span.second + step, len)});
        std::sort(fp.begin(), fp.end(),
                  [](const auto& a, const auto& b) { return a.enter_off < b.enter_off; });
    }
    return grid;
}

double crossing_time(const PlannedVehicle& v, double dist) {
    return time_to_cover(dist, v.entry_speed, v.cap_speed, v.accel);
}

PassingPlan schedule_order(const std::vector<PlannedVehicle>& order,
                           const SubzoneGrid& grid, const IntersectionLayout& layout,
                           const CoopParams& params, const ScheduleSeed* seed) {
    PassingPlan plan;
    ScheduleSeed state;
    if (seed != nullptr) state = *seed;
    if (state.cell_free.size() < static_cast<std::size_t>(grid.cell_count()))
        state.cell_free.resize(grid.cell_count(), -1e18);
    std::array<double, 4> lane_last_entry;
    lane_last_entry.fill(-1e18);
    std::array<const PlannedVehicle*, 4> lane_last_vehicle{};

    for (const PlannedVehicle& v : order) {
        const PathGeom& path = layout.path_at(v.path_index);
        const double junction_len = path.s_junction_exit - path.s_junction_entry;
        const int branch = branch_of_entry_lane(v.lane);
        const int exit_idx = v.exit_lane / 2 - 1;

        double e = std::max(v.earliest_entry, state.lane_gate[branch]);
        if (lane_last_vehicle[branch] != nullptr) {
            const PlannedVehicle* prev = lane_last_vehicle[branch];
            e = std::max(e, lane_last_entry[branch] +
                                crossing_time(*prev, 4.0 + prev->length));
        }
        // evaluate with the on-time profile first, then re-check with a
        // from-rest profile when the vehicle will have been held
        for (int pass = 0; pass < 2; ++pass) {
            PlannedVehicle eff = v;
            if (e > v.earliest_entry + params.hold_penalty_slack) eff.entry_speed = 0.0;
            double e2 = e;
            for (const auto& span : grid.footprints[v.path_index]) {
                const double t_in = crossing_time(eff, span.enter_off);
                e2 = std::max(e2, state.cell_free[span.cell] + params.delta - t_in);
            }
            const double head = (state.exit_was_turning[exit_idx] && !v.turning)
                                    ? params.merge_headway
                                    : params.delta;
            const double t_exit_arrival = crossing_time(eff, junction_len);
            e2 = std::max(e2, state.exit_arrival[exit_idx] + head - t_exit_arrival);
            if (e2 <= e + 1e-12) {
                e = e2;
                break;
            }
            e = e2;
        }

        PlannedVehicle eff = v;
        if (e > v.earliest_entry + params.hold_penalty_slack) eff.entry_speed = 0.0;
        for (const auto& span : grid.footprints[v.path_index]) {
            state.cell_free[span.cell] =
                std::max(state.cell_free[span.cell],
                         e + crossing_time(eff, span.exit_off + v.length));
        }
        state.exit_arrival[exit_idx] = e + crossing_time(eff, junction_len);
        state.exit_was_turning[exit_idx] = v.turning;
        lane_last_entry[branch] = e;
        lane_last_vehicle[branch] = &v;

        plan.order.push_back(v.id);
        plan.entry_time[v.id] = e;
        plan.makespan =
            std::max(plan.makespan, e + crossing_time(eff, junction_len + v.length));
    }
    return plan;
}

namespace {

// lane-ordered queues; an order is any interleaving of them
std::array<std::vector<const PlannedVehicle*>, 4> lane_queues(
    const std::vector<PlannedVehicle>& vehicles) {
    std::array<std::vector<const PlannedVehicle*>, 4> q;
    for (const PlannedVehicle& v : vehicles)
        q[branch_of_entry_lane(v.lane)].push_back(&v);
    for (auto& lane : q)
        std::sort(lane.begin(), lane.end(), [](const auto* a, const auto* b) {
            return a->earliest_entry < b->earliest_entry;
        });
    return q;
}

std::vector<PlannedVehicle> fifo_order(const std::vector<PlannedVehicle>& vehicles) {
    std::vector<PlannedVehicle> out = vehicles;
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.earliest_entry != b.earliest_entry) return a.earliest_entry < b.earliest_entry;
        return a.id < b.id;
    });
    return out;
}

void exact_search(const std::array<std::vector<const PlannedVehicle*>, 4>& queues,
                  std::array<std::size_t, 4>& next, std::vector<PlannedVehicle>& prefix,
                  std::size_t total, const SubzoneGrid& grid,
                  const IntersectionLayout& layout, const CoopParams& params,
                  const ScheduleSeed* seed, PassingPlan& best) {
    if (prefix.size() == total) {
        PassingPlan plan = schedule_order(prefix, grid, layout, params, seed);
        if (plan.makespan < best.makespan - 1e-12) best = plan;
        return;
    }
    // bound: the schedule of the prefix alone cannot shrink by adding vehicles
    if (!prefix.empty()) {
        PassingPlan partial = schedule_order(prefix, grid, layout, params, seed);
        if (partial.makespan >= best.makespan - 1e-12) return;
    }
    for (int branch = 0; branch < 4; ++branch) {
        if (next[branch] >= queues[branch].size()) continue;
        prefix.push_back(*queues[branch][next[branch]]);
        ++next[branch];
        exact_search(queues, next, prefix, total, grid, layout, params, seed, best);
        --next[branch];
        prefix.pop_back();
    }
}

}  // namespace

PassingPlan plan_order(const std::vector<PlannedVehicle>& vehicles,
                       const SubzoneGrid& grid, const IntersectionLayout& layout,
                       const CoopParams& params, Rng& rng, const ScheduleSeed* seed) {
    PassingPlan best;
    if (vehicles.empty()) return best;
    best = schedule_order(fifo_order(vehicles), grid, layout, params, seed);

    if (static_cast<int>(vehicles.size()) <= params.exact_threshold) {
        auto queues = lane_queues(vehicles);
        std::array<std::size_t, 4> next{};
        std::vector<PlannedVehicle> prefix;
        prefix.reserve(vehicles.size());
        exact_search(queues, next, prefix, vehicles.size(), grid, layout, params, seed,
                     best);
        return best;
    }

    // anytime mode: random lane interleavings, FIFO already seeded as baseline
    auto queues = lane_queues(vehicles);
    for (int trial = 0; trial < params.rollout_budget; ++trial) {
        std::array<std::size_t, 4> next{};
        std::vector<PlannedVehicle> order;
        order.reserve(vehicles.size());
        while (order.size() < vehicles.size()) {
            int pick = -1;
            int alive = 0;
            for (int b = 0; b < 4; ++b)
                if (next[b] < queues[b].size()) ++alive;
            int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(alive)));
            for (int b = 0; b < 4; ++b) {
                if (next[b] >= queues[b].size()) continue;
                if (k-- == 0) {
                    pick = b;
                    break;
                }
            }
            order.push_back(*queues[pick][next[pick]]);
            ++next[pick];
        }
        PassingPlan plan = schedule_order(order, grid, layout, params, seed);
        if (plan.makespan < best.makespan - 1e-12) best = plan;
    }
    return best;
}

CoopCommand schedule_to_commands(const PassingPlan& plan, const Vehicle& vehicle,
                                 double now, double s_junction_entry, double dt) {
    auto it = plan.entry_time.find(vehicle.id);
    if (it == plan.entry_time.end()) return CoopCommand::Hold;
    if (!vehicle.committed && now > it->second + kStaleSlack &&
        vehicle.s < s_junction_entry - 1.0)
        return CoopCommand::Replan;
    if (now >= it->second - kReleaseLead - 0.5 * dt) return CoopCommand::Proceed;
    return CoopCommand::Hold;
}

CoopStrategy::CoopStrategy(const SimConfig& cfg, const IntersectionLayout& layout)
    : layout_(&layout),
      grid_(build_grid(layout, cfg.coop_cell_size)),
      rng_(cfg.seed, 0x434f4f50ULL) {
    params_.delta = cfg.coop_delta;
    params_.merge_headway = cfg.coop_merge_headway;
    params_.exact_threshold = cfg.coop_exact_threshold;
    params_.rollout_budget = cfg.coop_rollout_budget;
}

double CoopStrategy::approach_time(const World& world, const Vehicle& v) const {
    // forward integration of the unimpeded controller to the junction boundary;
    // matches the execution profile including the turn-approach curve
    const SimConfig& cfg = *world.cfg;
    const PathGeom& path = world.path_of(v);
    double s = v.s, vel = v.v, t = 0.0;
    while (s < path.s_junction_entry) {
        double v_next = std::min(vel + cfg.a_comfort * cfg.dt, cfg.speed_limit_straight);
        if (v.intention != Intention::Straight) {
            const double d = path.s_junction_entry - s;
            const double v1 = std::sqrt(cfg.speed_limit_turn * cfg.speed_limit_turn +
                                        2.0 * cfg.a_comfort * std::max(0.0, d));
            v_next = std::min(v_next, v1);
        }
        s += 0.5 * (vel + v_next) * cfg.dt;
        vel = v_next;
        t += cfg.dt;
        if (t > 600.0) break;
    }
    return t;
}

PlannedVehicle CoopStrategy::model_vehicle(const World& world, const Vehicle& v,
                                           bool from_current_speed) const {
    const SimConfig& cfg = *world.cfg;
    PlannedVehicle m;
    m.id = v.id;
    m.path_index = v.path_index;
    m.lane = v.lane;
    m.exit_lane = world.path_of(v).exit_lane;
    m.turning = v.intention != Intention::Straight;
    m.length = v.length;
    m.cap_speed = m.turning ? cfg.speed_limit_turn : cfg.speed_limit_straight;
    m.accel = cfg.a_comfort;
    m.entry_speed = from_current_speed ? v.v : m.cap_speed;
    m.earliest_entry = world.clock + approach_time(world, v);
    return m;
}

void CoopStrategy::replan(World& world) {
    const SimConfig& cfg = *world.cfg;
    ScheduleSeed seed;
    seed.cell_free.assign(grid_.cell_count(), -1e18);

    std::vector<PlannedVehicle> pending;
    int in_range = 0;
    for (const auto& lane : world.lane_vehicles) {
        for (int id : lane) {
            const Vehicle& v = world.fleet[id];
            ++in_range;
            const PathGeom& path = world.path_of(v);
            if (!v.committed) {
                pending.push_back(model_vehicle(world, v, false));
                continue;
            }
            // seed the occupancy still owed by granted vehicles
            PlannedVehicle m = model_vehicle(world, v, true);
            const int branch = branch_of_entry_lane(v.lane);
            const int exit_idx = path.exit_lane / 2 - 1;
            const double entry = path.s_junction_entry;
            for (const auto& span : grid_.footprints[v.path_index]) {
                const double remaining = entry + span.exit_off + v.length - v.s;
                if (remaining <= 0.0) continue;
                seed.cell_free[span.cell] =
                    std::max(seed.cell_free[span.cell],
                             world.clock + time_to_cover(remaining, v.v, m.cap_speed,
                                                         cfg.a_comfort));
            }
            if (v.s < path.s_junction_exit) {
                seed.exit_arrival[exit_idx] = std::max(
                    seed.exit_arrival[exit_idx],
                    world.clock + time_to_cover(path.s_junction_exit - v.s, v.v,
                                                m.cap_speed, cfg.a_comfort));
                seed.exit_was_turning[exit_idx] = m.turning;
            }
            if (v.rear() < entry + 4.0) {
                seed.lane_gate[branch] = std::max(
                    seed.lane_gate[branch],
                    world.clock + time_to_cover(entry + 4.0 + v.length - v.s, v.v,
                                                m.cap_speed, cfg.a_comfort));
            }
        }
    }
    plan_ = plan_order(pending, grid_, *layout_, params_, rng_, &seed);
    last_replan_ = world.clock;
    dirty_ = false;
    // communication accounting: one state broadcast per vehicle in range plus
    // one plan message per vehicle
    for (const auto& lane : world.lane_vehicles)
        for (int id : lane) {
            world.log_message("state", id, -1);
            world.log_message("plan", -1, id);
        }
}

void CoopStrategy::step(World& world) {
    const SimConfig& cfg = *world.cfg;
    if (world.injected_count != known_injected_ || world.exited_count != known_exited_) {
        dirty_ = true;
        known_injected_ = world.injected_count;
        known_exited_ = world.exited_count;
    }

    // staleness forces an immediate replan
    for (const auto& lane : world.lane_vehicles) {
        for (int id : lane) {
            const Vehicle& v = world.fleet[id];
            if (v.committed) continue;
            if (schedule_to_commands(plan_, v, world.clock,
                                     world.path_of(v).s_junction_entry, cfg.dt) ==
                CoopCommand::Replan) {
                world.log_event(EventKind::Replan, v, "stale_slot");
                dirty_ = true;
                last_replan_ = -1e18;  // bypass the cadence
                break;
            }
        }
    }

    if (dirty_ && world.clock - last_replan_ >= cfg.coop_replan_period - 1e-9)
        replan(world);

    const std::vector<int> heads = world.decision_heads();
    for (int id : heads) {
        Vehicle& v = world.fleet[id];
        const PathGeom& path = world.path_of(v);
        const CoopCommand cmd =
            schedule_to_commands(plan_, v, world.clock, path.s_junction_entry, cfg.dt);
        if (cmd == CoopCommand::Proceed) world.grant(id);
    }

    // glide toward the boundary so the slot is met without a full stop
    for (const auto& lane : world.lane_vehicles) {
        for (int id : lane) {
            const Vehicle& v = world.fleet[id];
            if (v.committed) continue;
            auto it = plan_.entry_time.find(id);
            if (it == plan_.entry_time.end()) continue;
            const double time_left = it->second - world.clock;
            const double dist = world.path_of(v).s_junction_entry - v.s;
            if (time_left > cfg.dt && dist > 0.0) {
                const double cap = dist / time_left;
                auto& plan = world.plans[id];
                if (!plan.speed_cap || cap < *plan.speed_cap) plan.speed_cap = cap;
            }
        }
    }
}

}  // namespace rowsim
