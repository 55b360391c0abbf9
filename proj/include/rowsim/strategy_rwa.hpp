#pragma once

#include <map>
#include <set>

#include "rowsim/safety_zones.hpp"
#include "rowsim/sim_engine.hpp"

namespace rowsim {

struct PairResolution {
    enum class Outcome { NoConflict, OwnerProceeds_OtherYields, RowTransferred };
    int vehicle_a = -1;
    int vehicle_b = -1;
    ConflictPair conflict;
    int priority_owner = -1;
    Zone zone = Zone::Free;
    Outcome outcome = Outcome::NoConflict;
};

const char* to_string(PairResolution::Outcome o);

// Right-of-way assignment with pairwise decomposition: priority rules,
// virtual-vehicle zone checks and one-to-one negotiation.
class RwaStrategy : public Strategy {
public:
    explicit RwaStrategy(const SimConfig& cfg);

    StrategyKind kind() const override { return StrategyKind::Rwa; }
    void step(World& world) override;

    // Priority tiers: intention (straight > left > right), then distance to the
    // overlap point, then lanes {3,7} over {1,5}, then the lower lane id.
    // Distances within kDistanceTie count as equal. Returns the owner's id.
    int priority_compare(const Vehicle& a, const Vehicle& b,
                         const ConflictPair& pair_ab) const;

    // Resolves one ordered pair (a = deciding vehicle, b = counterpart) and
    // applies its effect on a's motion plan. Negotiation draws are memoized per
    // episode; the episode resets when the owner clears the conflict point or
    // the zone classification changes.
    PairResolution resolve_pair(World& world, const Vehicle& a, const Vehicle& b);

    // Bernoulli(accept_probability) draw from the seeded stream.
    bool negotiate(World& world, int owner, int requester);

    // Full decision for one lane head; grants (commits) on success.
    bool decide(World& world, Vehicle& head);

    static constexpr double kDistanceTie = 4.0;   // m, tier-2 tolerance
    static constexpr double kClearMargin = 0.5;   // m past the overlap point

private:
    struct Episode {
        bool accepted = false;
        int owner = -1;
        int requester = -1;
        double owner_star = 0.0;      // overlap point on the owner's path
        double requester_star = 0.0;  // and on the requester's
    };

    void expire_episodes(World& world);
    void apply_transfer_constraints(World& world);
    bool transfer_active(int requester, int owner) const;
    const Episode* find_episode(int requester, int owner) const;

    double accept_probability_;
    Rng rng_;
    std::map<std::pair<int, int>, Episode> episodes_;  // (requester, owner)
    std::set<std::pair<int, int>> encountered_;        // broadcast accounting
};

}  // namespace rowsim
