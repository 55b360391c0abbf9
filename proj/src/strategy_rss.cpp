#include "rowsim/strategy_rss.hpp"

#include <algorithm>
#include <cmath>

namespace rowsim {

namespace {
constexpr double kTieEps = 0.01;       // m, equal-distance tolerance
constexpr double kQueueBand = 0.5;     // m from the stop line counts as queued
}  // namespace

int RssStrategy::pick_closest(const World& world, const std::vector<int>& heads,
                              bool* tie) const {
    *tie = false;
    int best = -1;
    double best_d = 0.0;
    for (int id : heads) {
        const Vehicle& v = world.fleet[id];
        const double d = world.path_of(v).s_junction_entry - v.s;
        if (best < 0 || d < best_d - kTieEps) {
            best = id;
            best_d = d;
            *tie = false;
        } else if (std::abs(d - best_d) <= kTieEps) {
            *tie = true;
            const Vehicle& b = world.fleet[best];
            // arrival time then lane id
            if (v.spawn_time < b.spawn_time ||
                (v.spawn_time == b.spawn_time && v.lane < b.lane)) {
                best = id;
                best_d = d;
            }
        }
    }
    return best;
}

void RssStrategy::step(World& world) {
    // drop served or vanished vehicles from the queue
    for (auto it = fifo_.begin(); it != fifo_.end();) {
        const Vehicle* v = world.find(*it);
        if (v == nullptr || v->committed) {
            queued_.erase(*it);
            it = fifo_.erase(it);
        } else {
            ++it;
        }
    }

    if (occupant_ >= 0) {
        const Vehicle* v = world.find(occupant_);
        if (v == nullptr || v->rear() >= world.path_of(*v).s_junction_exit)
            occupant_ = -1;
    }

    const std::vector<int> heads = world.decision_heads();

    // passive sensing: each deciding vehicle observes the other lane heads and
    // the junction occupant
    for (std::size_t i = 0; i < heads.size(); ++i)
        world.observations +=
            static_cast<long>(heads.size()) - 1 + (occupant_ >= 0 ? 1 : 0);

    // stop-line arrivals join the FIFO
    for (int id : heads) {
        const Vehicle& v = world.fleet[id];
        const double d = world.path_of(v).s_junction_entry - v.s;
        if (d <= kQueueBand && queued_.insert(id).second) fifo_.push_back(id);
    }

    if (occupant_ >= 0) return;  // junction reserved

    int grantee = -1;
    if (!fifo_.empty()) {
        grantee = fifo_.front();
    } else if (!heads.empty()) {
        bool tie = false;
        grantee = pick_closest(world, heads, &tie);
        if (tie) {
            world.log_event(EventKind::TieBreak, world.fleet[grantee],
                            "candidates:" + std::to_string(heads.size()));
            if (!tie_break_) return;  // pathological RSS: nobody moves
        }
    }
    if (grantee >= 0) {
        world.grant(grantee);
        occupant_ = grantee;
    }
}

RssAction RssStrategy::decide(const World& world, const Vehicle& v) const {
    if (v.stage == Stage::CarFollowing) return RssAction::Follow;
    if (v.committed) return RssAction::Proceed;
    if (occupant_ >= 0) return RssAction::HoldAtStopLine;
    if (!fifo_.empty())
        return fifo_.front() == v.id ? RssAction::Proceed : RssAction::HoldAtStopLine;
    const std::vector<int> heads = world.decision_heads();
    bool tie = false;
    const int closest = pick_closest(world, heads, &tie);
    if (tie && !tie_break_) return RssAction::HoldAtStopLine;
    return closest == v.id ? RssAction::Proceed : RssAction::HoldAtStopLine;
}

}  // namespace rowsim
