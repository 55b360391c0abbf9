#pragma once

#include <deque>
#include <set>

#include "rowsim/sim_engine.hpp"

namespace rowsim {

enum class RssAction { Proceed, HoldAtStopLine, Follow };

// Distance-ranked FIFO baseline: one vehicle holds the junction at a time,
// waiting vehicles are served in stop-line arrival order.
class RssStrategy : public Strategy {
public:
    explicit RssStrategy(bool tie_break_enabled) : tie_break_(tie_break_enabled) {}

    StrategyKind kind() const override { return StrategyKind::Rss; }
    void step(World& world) override;

    // Pure query of the rule for one vehicle in the current world state.
    RssAction decide(const World& world, const Vehicle& v) const;

    // RSS never negotiates; it only observes positions and speeds.
    static int negotiation_message_count() { return 0; }

    int junction_occupant() const { return occupant_; }
    const std::deque<int>& fifo_queue() const { return fifo_; }

private:
    int pick_closest(const World& world, const std::vector<int>& heads,
                     bool* tie) const;

    bool tie_break_ = true;
    int occupant_ = -1;  // granted vehicle until its rear clears the junction
    std::deque<int> fifo_;
    std::set<int> queued_;
};

}  // namespace rowsim
