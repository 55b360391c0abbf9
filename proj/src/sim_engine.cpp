#include "rowsim/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rowsim/safety_zones.hpp"
#include "rowsim/strategy_coop.hpp"
#include "rowsim/strategy_rss.hpp"
#include "rowsim/strategy_rwa.hpp"

namespace rowsim {

namespace {

constexpr double kHoldOffset = 0.05;      // m before the stop line the hold converges to
constexpr double kRearClearMargin = 4.0;  // m a diverging leader must be past the entry
constexpr double kStarClearMargin = 0.5;  // m past an overlap point counts as cleared
constexpr double kDeadlockSpeed = 0.1;    // m/s
constexpr double kDeadlockWindow = 30.0;  // s
constexpr double kStopLineBand = 1.0;     // m

double speed_limit_at(const PathGeom& p, double s, const SimConfig& cfg) {
    return p.turning_at(s) ? cfg.speed_limit_turn : cfg.speed_limit_straight;
}

// braking-curve speed toward a full stop `dist` ahead
double stop_speed(double dist, double v, double a_plan, double dt) {
    if (dist <= 0.0) return 0.0;
    const double v1 = std::sqrt(2.0 * a_plan * dist);
    const double d_eff = dist - 0.5 * (v + v1) * dt;
    double out = d_eff > 0.0 ? std::sqrt(2.0 * a_plan * d_eff) : 0.0;
    out = std::min(out, std::max(0.0, 2.0 * dist / dt - v));
    return out;
}

// braking-curve speed toward target speed vt at a point `dist` ahead
double curve_speed(double dist, double v, double vt, double a_plan, double dt) {
    if (dist <= 0.0) return vt;
    const double v1 = std::sqrt(vt * vt + 2.0 * a_plan * dist);
    const double d_eff = std::max(0.0, dist - 0.5 * (v + v1) * dt);
    return std::sqrt(vt * vt + 2.0 * a_plan * d_eff);
}

struct Obb {
    Vec2 center;
    Vec2 axis;  // unit, along the body
    double half_len;
    double half_wid;
};

// Bodies on turn arcs are covered by short chord boxes; a single full-length
// box swings its corners far outside the swept lane on the tight turn radii.
// The contact tolerance absorbs the residual chord error, so tangentially
// touching sweeps (structural in this geometry) do not count as overlap.
constexpr double kChordLen = 0.7;
constexpr double kContactTol = 0.05;

void body_boxes(const PathGeom& path, const Vehicle& v, double width,
                std::vector<Obb>* out) {
    out->clear();
    const double rear = v.s - v.length;
    const int pieces = std::max(1, static_cast<int>(std::ceil(v.length / kChordLen)));
    for (int i = 0; i < pieces; ++i) {
        const double s0 = rear + v.length * i / pieces;
        const double s1 = rear + v.length * (i + 1) / pieces;
        Obb b;
        b.center = path.position(0.5 * (s0 + s1));
        b.axis = path.heading(0.5 * (s0 + s1));
        b.half_len = 0.5 * (s1 - s0);
        b.half_wid = 0.5 * width;
        out->push_back(b);
    }
}

bool obb_overlap(const Obb& a, const Obb& b) {
    const Vec2 axes[4] = {a.axis, {-a.axis.y, a.axis.x}, b.axis, {-b.axis.y, b.axis.x}};
    const Vec2 d = b.center - a.center;
    for (int i = 0; i < 4; ++i) {
        const Vec2 ax = axes[i];
        const double ra = a.half_len * std::abs(dot(ax, a.axis)) +
                          a.half_wid * std::abs(dot(ax, Vec2{-a.axis.y, a.axis.x}));
        const double rb = b.half_len * std::abs(dot(ax, b.axis)) +
                          b.half_wid * std::abs(dot(ax, Vec2{-b.axis.y, b.axis.x}));
        if (std::abs(dot(ax, d)) >= ra + rb - kContactTol) return false;
    }
    return true;
}

bool bodies_overlap(const std::vector<Obb>& a, const std::vector<Obb>& b) {
    for (const Obb& ba : a)
        for (const Obb& bb : b)
            if (obb_overlap(ba, bb)) return true;
    return false;
}

}  // namespace

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::Arrival: return "arrival";
        case EventKind::Enter: return "enter";
        case EventKind::StopLine: return "stop_line";
        case EventKind::Grant: return "grant";
        case EventKind::JunctionEnter: return "junction_enter";
        case EventKind::JunctionExit: return "junction_exit";
        case EventKind::SystemExit: return "system_exit";
        case EventKind::Message: return "message";
        case EventKind::TieBreak: return "tie_break";
        case EventKind::Deadlock: return "deadlock";
        case EventKind::Collision: return "collision";
        case EventKind::Replan: return "replan";
        case EventKind::Transfer: return "transfer";
    }
    return "?";
}

std::string event_log_to_text(const EventLog& log) {
    std::ostringstream out;
    char buf[64];
    for (const Event& e : log) {
        std::snprintf(buf, sizeof(buf), "%.1f", e.t);
        out << buf << ' ' << to_string(e.kind) << ' ' << e.vid << ' ' << e.lane << ' ';
        std::snprintf(buf, sizeof(buf), "%.3f %.3f", e.s, e.v);
        out << buf;
        if (!e.detail.empty()) out << ' ' << e.detail;
        out << '\n';
    }
    return out.str();
}

double rss_safe_speed(double gap, double v_follower, double v_leader,
                      const BrakeParams& p, double dt) {
    const double vl1 = std::max(0.0, v_leader - p.a_max_brake * dt);
    const double c = gap + 0.5 * (v_leader + vl1) * dt - 0.5 * v_follower * dt +
                     vl1 * vl1 / (2.0 * p.a_max_brake);
    if (c <= 0.0) return 0.0;
    const double rho_e = p.rho + 0.5 * dt;
    const double b = p.b_max_brake;
    return b * (-rho_e + std::sqrt(rho_e * rho_e + 2.0 * c / b));
}

// ---------------------------------------------------------------------------
// World helpers

std::vector<int> World::decision_heads() const {
    std::vector<int> heads;
    for (const auto& lane : lane_vehicles) {
        for (int id : lane) {
            const Vehicle& v = fleet[id];
            if (v.committed) continue;
            if (v.s >= layout->control_zone_entry_s()) heads.push_back(id);
            break;  // only the first non-committed vehicle decides
        }
    }
    return heads;
}

std::vector<int> World::junction_occupants() const {
    std::vector<int> out;
    for (const auto& lane : lane_vehicles) {
        for (int id : lane) {
            const Vehicle& v = fleet[id];
            if (v.committed && v.rear() < path_of(v).s_junction_exit) out.push_back(id);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool World::junction_empty() const {
    for (const auto& lane : lane_vehicles)
        for (int id : lane)
            if (body_in_junction(fleet[id])) return false;
    return true;
}

bool World::body_in_junction(const Vehicle& v) const {
    const PathGeom& p = path_of(v);
    return v.s > p.s_junction_entry && v.rear() < p.s_junction_exit;
}

std::pair<double, double> World::platoon_extent(const Vehicle& head) const {
    const auto& lane = lane_vehicles[branch_of_entry_lane(head.lane)];
    double tail_rear = head.rear();
    bool seen = false;
    for (int id : lane) {
        const Vehicle& v = fleet[id];
        if (id == head.id) {
            seen = true;
            tail_rear = v.rear();
            continue;
        }
        if (!seen) continue;
        if (v.platoon_id == head.platoon_id) tail_rear = v.rear();
        else break;
    }
    return {head.s, head.s - tail_rear};
}

void World::grant(int id) {
    Vehicle& v = fleet[id];
    if (v.committed) return;
    v.committed = true;
    log_event(EventKind::Grant, v);
}

void World::log_event(EventKind kind, const Vehicle& v, const std::string& detail) {
    log.push_back({clock, kind, v.id, v.lane, v.s, v.v, detail});
}

void World::log_message(const char* kind, int from, int to) {
    Event e;
    e.t = clock;
    e.kind = EventKind::Message;
    e.vid = from;
    const Vehicle* f = from >= 0 && from < static_cast<int>(fleet.size()) ? &fleet[from] : nullptr;
    if (f) {
        e.lane = f->lane;
        e.s = f->s;
        e.v = f->v;
    }
    e.detail = std::string(kind) + ">" + std::to_string(to);
    log.push_back(std::move(e));
}

void World::mark_resolved(int a, int b) {
    resolved_pairs.insert({std::min(a, b), std::max(a, b)});
}

long World::count_messages(const char* kind) const {
    long n = 0;
    const std::string prefix = std::string(kind) + ">";
    for (const Event& e : log)
        if (e.kind == EventKind::Message && e.detail.rfind(prefix, 0) == 0) ++n;
    return n;
}

std::string World::name_of(int id) const {
    if (id >= 0 && id < static_cast<int>(names.size()) && !names[id].empty())
        return names[id];
    return std::to_string(id);
}

// ---------------------------------------------------------------------------
// Simulation

std::unique_ptr<Strategy> make_strategy(StrategyKind kind, const SimConfig& cfg,
                                        const IntersectionLayout& layout) {
    switch (kind) {
        case StrategyKind::Rss: return std::make_unique<RssStrategy>(cfg.rss_tie_break);
        case StrategyKind::Rwa: return std::make_unique<RwaStrategy>(cfg);
        case StrategyKind::Coop: return std::make_unique<CoopStrategy>(cfg, layout);
    }
    throw std::logic_error("unknown strategy");
}

Simulation::Simulation(const SimConfig& cfg, StrategyKind strategy)
    : cfg_(cfg), layout_(cfg.layout) {
    cfg_.validate();
    strategy_ = make_strategy(strategy, cfg_, layout_);
    world_.cfg = &cfg_;
    world_.layout = &layout_;
    world_.track_cells = strategy == StrategyKind::Coop;

    std::vector<ArrivalEvent> merged;
    for (int branch = 0; branch < 4; ++branch) {
        auto lane_events = gen_arrivals(cfg_.lambda, cfg_.duration, cfg_.seed,
                                        entry_lane_of_branch(branch), cfg_.ratio_left,
                                        cfg_.ratio_right, cfg_.ratio_straight);
        merged.insert(merged.end(), lane_events.begin(), lane_events.end());
    }
    std::stable_sort(merged.begin(), merged.end(),
                     [](const ArrivalEvent& a, const ArrivalEvent& b) {
                         if (a.time != b.time) return a.time < b.time;
                         return a.lane < b.lane;
                     });
    world_.arrivals = std::move(merged);
    world_.fleet.resize(world_.arrivals.size());
    world_.active.assign(world_.arrivals.size(), 0);
    world_.plans.resize(world_.arrivals.size());
}

Simulation::Simulation(const SimConfig& cfg, StrategyKind strategy,
                       const std::vector<InitialVehicle>& initial)
    : cfg_(cfg), layout_(cfg.layout) {
    cfg_.validate();
    strategy_ = make_strategy(strategy, cfg_, layout_);
    scenario_mode_ = true;
    world_.cfg = &cfg_;
    world_.layout = &layout_;
    world_.track_cells = strategy == StrategyKind::Coop;

    world_.arrivals.reserve(initial.size());
    world_.fleet.resize(initial.size());
    world_.active.assign(initial.size(), 0);
    world_.plans.resize(initial.size());
    world_.names.resize(initial.size());
    for (std::size_t i = 0; i < initial.size(); ++i) {
        const InitialVehicle& iv = initial[i];
        const int branch = branch_of_entry_lane(iv.lane);
        Vehicle v;
        v.id = static_cast<int>(i);
        v.lane = iv.lane;
        v.intention = iv.intention;
        v.path_index = IntersectionLayout::path_index(iv.lane, iv.intention);
        const PathGeom& path = layout_.path_at(v.path_index);
        if (iv.s < 0.0 || iv.s >= path.s_junction_entry)
            throw std::invalid_argument("initial position must lie on the approach");
        if (iv.v < 0.0 || iv.v > cfg_.speed_limit_straight)
            throw std::invalid_argument("initial speed out of range");
        v.s = iv.s;
        v.v = iv.v;
        v.length = cfg_.vehicle_length;
        v.spawn_time = 0.0;
        world_.arrivals.push_back({0.0, iv.lane, iv.intention});
        world_.fleet[i] = v;
        world_.active[i] = 1;
        ++world_.injected_count;
        world_.names[i] = iv.name;
        world_.lane_vehicles[branch].push_back(v.id);
        world_.log_event(EventKind::Arrival, v, to_string(iv.intention));
        world_.log_event(EventKind::Enter, v);
    }
    for (auto& lane : world_.lane_vehicles) {
        std::sort(lane.begin(), lane.end(),
                  [&](int a, int b) { return world_.fleet[a].s > world_.fleet[b].s; });
        for (std::size_t k = 1; k < lane.size(); ++k) {
            const Vehicle& lead = world_.fleet[lane[k - 1]];
            const Vehicle& fol = world_.fleet[lane[k]];
            if (fol.s > lead.rear())
                throw std::invalid_argument("initial vehicles overlap on lane " +
                                            std::to_string(fol.lane));
        }
    }
}

Simulation::~Simulation() = default;

bool Simulation::done() const {
    if (world_.collision_abort) return true;
    if (world_.clock >= cfg_.duration - 1e-9) return true;
    if (scenario_mode_) {
        for (std::size_t i = 0; i < world_.fleet.size(); ++i)
            if (world_.active[i]) return false;
        return world_.next_arrival >= static_cast<int>(world_.arrivals.size());
    }
    return false;
}

void Simulation::inject_arrivals() {
    auto& w = world_;
    while (w.next_arrival < static_cast<int>(w.arrivals.size()) &&
           w.arrivals[w.next_arrival].time <= w.clock + 1e-12) {
        const ArrivalEvent& ev = w.arrivals[w.next_arrival];
        const int id = w.next_arrival++;
        Vehicle v;
        v.id = id;
        v.lane = ev.lane;
        v.intention = ev.intention;
        v.path_index = IntersectionLayout::path_index(ev.lane, ev.intention);
        v.length = cfg_.vehicle_length;
        v.spawn_time = ev.time;
        v.s = 0.0;
        v.v = cfg_.spawn_speed;
        w.fleet[id] = v;
        w.point_queues[branch_of_entry_lane(ev.lane)].push_back(id);
        w.log_event(EventKind::Arrival, w.fleet[id], to_string(ev.intention));
    }
    // release the point queues where the spawn gap allows
    for (int branch = 0; branch < 4; ++branch) {
        auto& q = w.point_queues[branch];
        if (q.empty()) continue;
        auto& lane = w.lane_vehicles[branch];
        bool free = true;
        if (!lane.empty()) {
            const Vehicle& tail = w.fleet[lane.back()];
            const double gap = tail.rear() - 0.0;
            free = gap >= safe_follow_gap(cfg_.spawn_speed, tail.v, cfg_.brakes);
        }
        if (!free) continue;
        const int id = q.front();
        q.pop_front();
        Vehicle& v = w.fleet[id];
        v.enter_time = w.clock;
        w.active[id] = 1;
        ++w.injected_count;
        lane.push_back(id);
        w.log_event(EventKind::Enter, v);
    }
}

void Simulation::refresh_stages() {
    auto& w = world_;
    for (int branch = 0; branch < 4; ++branch) {
        auto& lane = w.lane_vehicles[branch];
        // lane lists stay sorted by construction; platoons refresh every step
        std::vector<Vehicle*> ptrs;
        ptrs.reserve(lane.size());
        for (int id : lane) ptrs.push_back(&w.fleet[id]);
        form_platoons(std::span<Vehicle*>(ptrs), cfg_.brakes, cfg_.platoon_gap_factor);
        bool head_seen = false;
        for (int id : lane) {
            Vehicle& v = w.fleet[id];
            if (v.committed) {
                v.stage = Stage::Action;
            } else if (!head_seen) {
                head_seen = true;
                v.stage = v.s >= layout_.control_zone_entry_s() ? Stage::Decision
                                                                : Stage::CarFollowing;
            } else {
                v.stage = Stage::CarFollowing;
            }
        }
    }
}

void Simulation::engine_constraints() {
    auto& w = world_;
    // non-committed vehicles never cross the stop line
    for (auto& lane : w.lane_vehicles)
        for (int id : lane)
            if (!w.fleet[id].committed) w.plans[id].hold_at_stopline = true;

    // same-lane car following on the approach
    for (auto& lane : w.lane_vehicles) {
        for (std::size_t k = 1; k < lane.size(); ++k) {
            const Vehicle& lead = w.fleet[lane[k - 1]];
            Vehicle& fol = w.fleet[lane[k]];
            const PathGeom& fp = w.path_of(fol);
            if (fol.s >= fp.s_junction_entry) continue;
            const PathGeom& lp = w.path_of(lead);
            const bool same_path = lead.intention == fol.intention;
            if (!same_path && lead.rear() > lp.s_junction_entry + kRearClearMargin)
                continue;  // diverged laterally, the entry gate took over
            w.plans[fol.id].leaders.push_back({lead.s, lead.v});
        }
    }

    // entry gate: hold before the line while a diverging predecessor is still near it
    for (auto& lane : w.lane_vehicles) {
        for (std::size_t k = 1; k < lane.size(); ++k) {
            const Vehicle& lead = w.fleet[lane[k - 1]];
            Vehicle& fol = w.fleet[lane[k]];
            const PathGeom& fp = w.path_of(fol);
            if (fol.s >= fp.s_junction_entry) continue;
            if (lead.intention == fol.intention) continue;
            if (lead.rear() < w.path_of(lead).s_junction_entry + kRearClearMargin)
                w.plans[fol.id].hold_at_stopline = true;
        }
    }

    // shared-exit-lane following between committed vehicles
    std::array<std::vector<int>, 4> exit_groups;
    for (auto& lane : w.lane_vehicles)
        for (int id : lane)
            if (w.fleet[id].committed)
                exit_groups[w.path_of(w.fleet[id]).exit_lane / 2 - 1].push_back(id);
    for (auto& group : exit_groups) {
        std::sort(group.begin(), group.end(), [&](int a, int b) {
            const double ua = w.path_of(w.fleet[a]).exit_lane_pos(w.fleet[a].s);
            const double ub = w.path_of(w.fleet[b]).exit_lane_pos(w.fleet[b].s);
            if (ua != ub) return ua > ub;
            return a < b;
        });
        for (std::size_t k = 1; k < group.size(); ++k) {
            const Vehicle& lead = w.fleet[group[k - 1]];
            const Vehicle& fol = w.fleet[group[k]];
            const double u_lead = w.path_of(lead).exit_lane_pos(lead.s);
            const double u_fol = w.path_of(fol).exit_lane_pos(fol.s);
            w.plans[fol.id].leaders.push_back({fol.s + (u_lead - u_fol), lead.v});
        }
    }

    // crossing conflicts between committed vehicles: the farther one follows
    // the closer one's virtual image until the closer clears the overlap
    std::vector<int> committed;
    for (auto& lane : w.lane_vehicles)
        for (int id : lane)
            if (w.fleet[id].committed) committed.push_back(id);
    std::sort(committed.begin(), committed.end());
    for (std::size_t i = 0; i < committed.size(); ++i) {
        for (std::size_t j = 0; j < committed.size(); ++j) {
            if (i == j) continue;
            const Vehicle& v = w.fleet[committed[i]];
            const Vehicle& other = w.fleet[committed[j]];
            const ConflictPair& pair =
                layout_.conflict_by_index(v.path_index, other.path_index);
            if (pair.kind == ConflictCase::None || pair.merging) continue;
            if (other.rear() > pair.s_b_star + kStarClearMargin) continue;  // cleared
            const double d_v = pair.s_a_star - v.s;
            const double d_o = pair.s_b_star - other.s;
            if (v.rear() > pair.s_a_star + kStarClearMargin) continue;
            const bool other_leads = d_o < d_v || (d_o == d_v && other.id < v.id);
            if (!other_leads) continue;
            const double image_front = pair.s_a_star - (pair.s_b_star - other.s);
            w.plans[v.id].leaders.push_back({image_front, other.v});
        }
    }
}

double Simulation::controller_speed(const Vehicle& veh, const MotionPlan& plan) const {
    const PathGeom& path = world_.path_of(veh);
    const double dt = cfg_.dt;
    const double vlim = speed_limit_at(path, veh.s, cfg_);
    double v_next = std::min(veh.v + cfg_.a_comfort * dt, vlim);
    if (veh.intention != Intention::Straight && veh.s < path.s_junction_entry)
        v_next = std::min(v_next, curve_speed(path.s_junction_entry - veh.s, veh.v,
                                              cfg_.speed_limit_turn, cfg_.a_comfort, dt));
    if (plan.speed_cap) v_next = std::min(v_next, *plan.speed_cap);
    if (plan.hold_at_stopline && veh.s < path.s_junction_entry) {
        const double dist = path.s_junction_entry - kHoldOffset - veh.s;
        double vs = stop_speed(dist, veh.v, cfg_.a_comfort, dt);
        if (vs < 0.12 && dist < 0.15) vs = 0.0;
        v_next = std::min(v_next, vs);
    }
    for (const auto& [front, v_lead] : plan.leaders) {
        const double gap = front - cfg_.vehicle_length - veh.s;
        v_next = std::min(v_next, rss_safe_speed(gap, veh.v, v_lead, cfg_.brakes, dt));
    }
    v_next = std::max({v_next, veh.v - cfg_.brakes.a_max_brake * dt, 0.0});
    return v_next;
}

void Simulation::apply_motion() {
    auto& w = world_;
    struct Cmd {
        int id;
        double accel;
        double limit;
    };
    std::vector<Cmd> cmds;
    for (auto& lane : w.lane_vehicles) {
        for (int id : lane) {
            const Vehicle& v = w.fleet[id];
            const double v_next = controller_speed(v, w.plans[id]);
            cmds.push_back({id, (v_next - v.v) / cfg_.dt,
                            speed_limit_at(w.path_of(v), v.s, cfg_)});
        }
    }
    for (const Cmd& c : cmds)
        w.fleet[c.id] = kinematic_step(w.fleet[c.id], c.accel, cfg_.dt, c.limit);
}

void Simulation::handle_crossings_and_exits() {
    auto& w = world_;
    for (auto& lane : w.lane_vehicles) {
        for (auto it = lane.begin(); it != lane.end();) {
            Vehicle& v = w.fleet[*it];
            const PathGeom& p = w.path_of(v);
            const double ds = v.v * cfg_.dt + 1e-9;
            if (v.s > p.s_junction_entry && v.s - ds <= p.s_junction_entry)
                w.log_event(EventKind::JunctionEnter, v);
            if (v.rear() > p.s_junction_exit && v.rear() - ds <= p.s_junction_exit)
                w.log_event(EventKind::JunctionExit, v);
            if (!v.committed && v.s > p.s_junction_entry - kStopLineBand &&
                v.s - ds <= p.s_junction_entry - kStopLineBand)
                w.log_event(EventKind::StopLine, v);
            if (v.s >= p.length) {
                v.exit_time = w.clock;
                w.active[v.id] = 0;
                ++w.exited_count;
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%.4f", v.exit_time.value());
                w.log_event(EventKind::SystemExit, v, buf);
                it = lane.erase(it);
                continue;
            }
            ++it;
        }
    }
}

void Simulation::run_detectors() {
    auto& w = world_;

    // physical overlap near the junction
    std::vector<int> near;
    for (auto& lane : w.lane_vehicles)
        for (int id : lane) {
            const Vehicle& v = w.fleet[id];
            const PathGeom& p = w.path_of(v);
            if (v.s > p.s_junction_entry - 12.0 && v.rear() < p.s_junction_exit + 12.0)
                near.push_back(id);
        }
    std::vector<Obb> boxes_a, boxes_b;
    for (std::size_t i = 0; i < near.size(); ++i) {
        const Vehicle& a = w.fleet[near[i]];
        body_boxes(w.path_of(a), a, cfg_.layout.lane_width, &boxes_a);
        for (std::size_t j = i + 1; j < near.size(); ++j) {
            const Vehicle& b = w.fleet[near[j]];
            if (a.lane == b.lane) continue;  // same-lane handled longitudinally
            body_boxes(w.path_of(b), b, cfg_.layout.lane_width, &boxes_b);
            if (bodies_overlap(boxes_a, boxes_b)) {
                w.log_event(EventKind::Collision, a,
                            "body_overlap_with:" + std::to_string(b.id));
                w.collision_abort = true;
            }
        }
    }
    // longitudinal overlap, approach and shared exit lanes
    for (auto& lane : w.lane_vehicles) {
        for (std::size_t k = 1; k < lane.size(); ++k) {
            const Vehicle& lead = w.fleet[lane[k - 1]];
            const Vehicle& fol = w.fleet[lane[k]];
            const PathGeom& fp = w.path_of(fol);
            if (fol.s <= fp.s_junction_entry && lead.s <= w.path_of(lead).s_junction_entry &&
                fol.s > lead.rear() + 0.02) {
                w.log_event(EventKind::Collision, fol,
                            "rear_end_into:" + std::to_string(lead.id));
                w.collision_abort = true;
            }
        }
    }

    // conflict-point passage separation
    std::vector<int> committed;
    for (auto& lane : w.lane_vehicles)
        for (int id : lane)
            if (w.fleet[id].committed) committed.push_back(id);
    std::sort(committed.begin(), committed.end());
    for (std::size_t i = 0; i < committed.size(); ++i) {
        for (std::size_t j = i + 1; j < committed.size(); ++j) {
            const Vehicle& a = w.fleet[committed[i]];
            const Vehicle& b = w.fleet[committed[j]];
            const ConflictPair& pair = layout_.conflict_by_index(a.path_index, b.path_index);
            if (pair.kind == ConflictCase::None) continue;
            auto key = std::make_pair(a.id, b.id);
            auto& rec = w.passages[key];
            const double stars[2] = {pair.s_a_star, pair.s_b_star};
            const Vehicle* vs[2] = {&a, &b};
            for (int side = 0; side < 2; ++side) {
                const Vehicle& v = *vs[side];
                World::Passage& pg = rec[side];
                if (pg.t_on < 0.0 && v.s >= stars[side] && v.rear() <= stars[side])
                    pg.t_on = w.clock;
                if (pg.t_on >= 0.0 && pg.t_off < 0.0 && v.rear() > stars[side])
                    pg.t_off = w.clock;
            }
            if (rec[0].t_off >= 0.0 && rec[1].t_off >= 0.0) {
                const double gap = std::max(rec[0].t_on, rec[1].t_on) -
                                   std::min(rec[0].t_off, rec[1].t_off);
                const bool resolved = w.resolved_pairs.count(
                    {std::min(a.id, b.id), std::max(a.id, b.id)}) > 0;
                if (gap < 0.5 && !resolved) {
                    w.log_event(EventKind::Collision, a,
                                "conflict_point_with:" + std::to_string(b.id));
                    w.collision_abort = true;
                }
                w.passages.erase(key);
            }
        }
    }

    // deadlock: several stopped lane heads facing an empty junction
    int stopped_heads = 0;
    for (int id : w.decision_heads()) {
        const Vehicle& v = w.fleet[id];
        const PathGeom& p = w.path_of(v);
        if (v.v < kDeadlockSpeed && p.s_junction_entry - v.s < kStopLineBand)
            ++stopped_heads;
    }
    const bool condition = stopped_heads >= 2 && w.junction_empty();
    if (condition) {
        w.deadlock_timer += cfg_.dt;
        if (w.deadlock_timer > kDeadlockWindow && !w.deadlock_now) {
            w.deadlock_now = true;
            Vehicle dummy;
            dummy.id = -1;
            w.log.push_back({w.clock, EventKind::Deadlock, -1, 0, 0.0, 0.0,
                             std::to_string(stopped_heads)});
        }
    } else {
        w.deadlock_timer = 0.0;
        w.deadlock_now = false;
    }

    // realized subzone occupancy for the cooperative strategy
    if (w.track_cells) {
        const auto* coop = dynamic_cast<const CoopStrategy*>(strategy_.get());
        if (coop != nullptr) {
            for (auto& lane : w.lane_vehicles) {
                for (int id : lane) {
                    const Vehicle& v = w.fleet[id];
                    const PathGeom& p = w.path_of(v);
                    for (const auto& span : coop->grid().footprints[v.path_index]) {
                        const double start = p.s_junction_entry + span.enter_off;
                        const double end = p.s_junction_entry + span.exit_off;
                        const auto key = std::make_pair(id, span.cell);
                        const bool on = v.s > start && v.rear() < end;
                        auto it = w.cell_enter_time.find(key);
                        if (on && it == w.cell_enter_time.end())
                            w.cell_enter_time.emplace(key, w.clock);
                        if (!on && it != w.cell_enter_time.end() && v.rear() >= end) {
                            w.cell_intervals[span.cell].push_back(
                                {it->second, w.clock, static_cast<double>(id)});
                            w.cell_enter_time.erase(it);
                        }
                    }
                }
            }
        }
    }
}

void Simulation::step() {
    auto& w = world_;
    inject_arrivals();
    refresh_stages();
    for (auto& lane : w.lane_vehicles)
        for (int id : lane) w.plans[id] = MotionPlan{};
    strategy_->step(w);
    engine_constraints();
    apply_motion();
    w.clock += cfg_.dt;
    ++w.step_count;
    handle_crossings_and_exits();
    run_detectors();
}

RunResult Simulation::finish() {
    RunResult result;
    result.log = world_.log;
    result.aborted_on_collision = world_.collision_abort;
    result.metrics = compute_metrics(world_.log, cfg_);
    result.metrics.observations = world_.observations;
    if (world_.track_cells) {
        double min_sep = 1e18;
        for (auto& [cell, intervals] : world_.cell_intervals) {
            auto sorted = intervals;
            std::sort(sorted.begin(), sorted.end(),
                      [](const auto& a, const auto& b) { return a[0] < b[0]; });
            for (std::size_t k = 1; k < sorted.size(); ++k)
                min_sep = std::min(min_sep, sorted[k][0] - sorted[k - 1][1]);
        }
        result.coop_min_cell_separation = min_sep;
    }
    return result;
}

RunResult Simulation::run() {
    while (!done()) step();
    return finish();
}

RunResult simulate(const SimConfig& cfg, StrategyKind strategy) {
    Simulation sim(cfg, strategy);
    return sim.run();
}

// ---------------------------------------------------------------------------

std::array<double, 3> free_flow_times(const SimConfig& cfg) {
    const IntersectionLayout layout(cfg.layout);
    std::array<double, 3> out{};
    for (Intention intent : {Intention::Straight, Intention::Left, Intention::Right}) {
        const PathGeom& path = layout.path(1, intent);
        double s = 0.0, v = cfg.spawn_speed, t = 0.0;
        long guard = 0;
        while (s < path.length) {
            const double vlim = speed_limit_at(path, s, cfg);
            double v_next = std::min(v + cfg.a_comfort * cfg.dt, vlim);
            if (intent != Intention::Straight && s < path.s_junction_entry)
                v_next = std::min(v_next,
                                  curve_speed(path.s_junction_entry - s, v,
                                              cfg.speed_limit_turn, cfg.a_comfort, cfg.dt));
            v_next = std::max({v_next, v - cfg.brakes.a_max_brake * cfg.dt, 0.0});
            v_next = std::min(v_next, vlim);
            s += 0.5 * (v + v_next) * cfg.dt;
            v = v_next;
            t += cfg.dt;
            if (++guard > 1000000) throw std::logic_error("free flow integration stuck");
        }
        out[static_cast<int>(intent)] = t;
    }
    return out;
}

Metrics compute_metrics(const EventLog& log, const SimConfig& cfg) {
    Metrics m;
    const auto ff = free_flow_times(cfg);
    struct ArrivalInfo {
        double t;
        Intention intent;
    };
    std::map<int, ArrivalInfo> arrivals;
    const double w0 = cfg.warm_up;
    const double w1 = cfg.duration;
    double delay_sum = 0.0;
    double early_sum = 0.0, late_sum = 0.0;
    int early_n = 0, late_n = 0;
    for (const Event& e : log) {
        switch (e.kind) {
            case EventKind::Arrival: {
                Intention intent = intention_from_string(e.detail);
                arrivals[e.vid] = {e.t, intent};
                const double ff_exit = e.t + ff[static_cast<int>(intent)];
                ++m.spawned;
                if (ff_exit >= w0 && ff_exit <= w1) ++m.ideal_throughput;
                break;
            }
            case EventKind::SystemExit: {
                auto it = arrivals.find(e.vid);
                if (it == arrivals.end()) break;
                if (e.t < w0 || e.t > w1) break;
                const double delay =
                    e.t - it->second.t - ff[static_cast<int>(it->second.intent)];
                ++m.throughput;
                delay_sum += delay;
                if (e.t >= 300.0 && e.t < 600.0) early_sum += delay, ++early_n;
                if (e.t >= w1 - 300.0) late_sum += delay, ++late_n;
                break;
            }
            case EventKind::Message: {
                ++m.messages_total;
                if (e.detail.rfind("state>", 0) == 0) ++m.messages_state;
                else if (e.detail.rfind("request>", 0) == 0) ++m.messages_request;
                else if (e.detail.rfind("accept>", 0) == 0) ++m.messages_accept;
                else if (e.detail.rfind("reject>", 0) == 0) ++m.messages_reject;
                else if (e.detail.rfind("plan>", 0) == 0) ++m.messages_plan;
                break;
            }
            case EventKind::TieBreak: ++m.deadlock_tie_events; break;
            case EventKind::Collision: ++m.collision_events; break;
            case EventKind::Deadlock: ++m.deadlock_events; break;
            default: break;
        }
    }
    if (m.throughput > 0) m.average_delay = delay_sum / m.throughput;
    if (early_n > 0) m.delay_minutes_5_to_10 = early_sum / early_n;
    if (late_n > 0) m.delay_final_5_minutes = late_sum / late_n;
    m.messages_per_vehicle =
        m.spawned > 0 ? static_cast<double>(m.messages_total) / m.spawned : 0.0;
    return m;
}

}  // namespace rowsim
