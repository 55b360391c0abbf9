#include "rowsim/strategy_rwa.hpp"

#include <algorithm>
#include <cmath>

namespace rowsim {

namespace {

int intention_rank(Intention i) {
    switch (i) {
        case Intention::Straight: return 2;
        case Intention::Left: return 1;
        case Intention::Right: return 0;
    }
    return 0;
}

bool lane_has_precedence(int lane) { return lane == 3 || lane == 7; }

}  // namespace

const char* to_string(PairResolution::Outcome o) {
    switch (o) {
        case PairResolution::Outcome::NoConflict: return "no_conflict";
        case PairResolution::Outcome::OwnerProceeds_OtherYields: return "owner_proceeds";
        case PairResolution::Outcome::RowTransferred: return "row_transferred";
    }
    return "?";
}

RwaStrategy::RwaStrategy(const SimConfig& cfg)
    : accept_probability_(cfg.accept_probability), rng_(cfg.seed, 0x52574153ULL) {}

int RwaStrategy::priority_compare(const Vehicle& a, const Vehicle& b,
                                  const ConflictPair& pair_ab) const {
    const int ra = intention_rank(a.intention);
    const int rb = intention_rank(b.intention);
    if (ra != rb) return ra > rb ? a.id : b.id;
    const double d_a = pair_ab.s_a_star - a.s;
    const double d_b = pair_ab.s_b_star - b.s;
    if (std::abs(d_a - d_b) > kDistanceTie) return d_a < d_b ? a.id : b.id;
    const bool pa = lane_has_precedence(a.lane);
    const bool pb = lane_has_precedence(b.lane);
    if (pa != pb) return pa ? a.id : b.id;
    return a.lane < b.lane ? a.id : b.id;
}

bool RwaStrategy::transfer_active(int requester, int owner) const {
    auto it = episodes_.find({requester, owner});
    return it != episodes_.end() && it->second.accepted;
}

const RwaStrategy::Episode* RwaStrategy::find_episode(int requester, int owner) const {
    auto it = episodes_.find({requester, owner});
    return it == episodes_.end() ? nullptr : &it->second;
}

bool RwaStrategy::negotiate(World& world, int owner, int requester) {
    world.log_message("request", requester, owner);
    const bool accept = rng_.bernoulli(accept_probability_);
    world.log_message(accept ? "accept" : "reject", owner, requester);
    return accept;
}

PairResolution RwaStrategy::resolve_pair(World& world, const Vehicle& a,
                                         const Vehicle& b) {
    PairResolution res;
    res.vehicle_a = a.id;
    res.vehicle_b = b.id;
    const ConflictPair& pair_ab =
        world.layout->conflict_by_index(a.path_index, b.path_index);
    res.conflict = pair_ab;
    if (pair_ab.kind == ConflictCase::None) {
        res.outcome = PairResolution::Outcome::NoConflict;
        res.zone = Zone::Free;
        return res;
    }

    // one state exchange per conflicting encounter
    const auto enc_key = std::make_pair(std::min(a.id, b.id), std::max(a.id, b.id));
    if (encountered_.insert(enc_key).second) {
        world.log_message("state", a.id, b.id);
        world.log_message("state", b.id, a.id);
    }

    const int owner_id = b.committed ? b.id : priority_compare(a, b, pair_ab);
    const Vehicle& owner = owner_id == a.id ? a : b;
    const Vehicle& other = owner_id == a.id ? b : a;
    const ConflictPair& pair_ow =
        owner_id == a.id ? pair_ab
                         : world.layout->conflict_by_index(b.path_index, a.path_index);

    const auto [owner_front, owner_len] = world.platoon_extent(owner);
    const auto [other_front, other_len] = world.platoon_extent(other);
    const ZoneLengths zones = zone_partition(owner.v, other.v, world.cfg->brakes);
    const double image_front = map_virtual(other_front, pair_ow);
    res.priority_owner = owner_id;
    res.zone = classify_zone(image_front, owner_front, owner_len, other_len, zones);

    if (res.zone == Zone::Free) {
        res.outcome = PairResolution::Outcome::NoConflict;
        return res;
    }

    if (owner_id == a.id) {
        // the deciding vehicle owns the right-of-way; an earlier accepted
        // request from b turns it into the yielding party
        res.outcome = transfer_active(b.id, a.id)
                          ? PairResolution::Outcome::RowTransferred
                          : PairResolution::Outcome::OwnerProceeds_OtherYields;
        return res;
    }

    // the counterpart owns; a either holds, or already holds a transfer, or
    // may negotiate from the negotiation area
    if (transfer_active(a.id, b.id)) {
        res.outcome = PairResolution::Outcome::RowTransferred;
        return res;
    }
    if (res.zone == Zone::Forbidden || b.committed) {
        res.outcome = PairResolution::Outcome::OwnerProceeds_OtherYields;
        return res;
    }
    const Episode* ep = find_episode(a.id, b.id);
    if (ep != nullptr) {  // rejected earlier this episode
        res.outcome = PairResolution::Outcome::OwnerProceeds_OtherYields;
        return res;
    }
    Episode fresh;
    fresh.requester = a.id;
    fresh.owner = b.id;
    fresh.owner_star = pair_ow.s_a_star;
    fresh.requester_star = pair_ow.s_b_star;
    fresh.accepted = negotiate(world, b.id, a.id);
    episodes_[{a.id, b.id}] = fresh;
    if (fresh.accepted) {
        world.log_event(EventKind::Transfer, a, "from:" + std::to_string(b.id));
        res.outcome = PairResolution::Outcome::RowTransferred;
    } else {
        res.outcome = PairResolution::Outcome::OwnerProceeds_OtherYields;
    }
    return res;
}

bool RwaStrategy::decide(World& world, Vehicle& head) {
    std::vector<int> counterparts = world.junction_occupants();
    for (int id : world.decision_heads())
        if (id != head.id) counterparts.push_back(id);
    std::sort(counterparts.begin(), counterparts.end());

    bool blocked = false;
    std::vector<int> conflicting;
    for (int cid : counterparts) {
        const Vehicle& c = world.fleet[cid];
        if (c.lane == head.lane) continue;
        const PairResolution res = resolve_pair(world, head, c);
        if (res.conflict.kind == ConflictCase::None) continue;
        conflicting.push_back(cid);
        if (res.outcome == PairResolution::Outcome::OwnerProceeds_OtherYields &&
            res.priority_owner == cid)
            blocked = true;
    }
    if (blocked) return false;

    // grant the head and its platoon
    world.grant(head.id);
    for (int cid : conflicting) world.mark_resolved(head.id, cid);
    const auto& lane = world.lane_vehicles[branch_of_entry_lane(head.lane)];
    bool seen = false;
    for (int id : lane) {
        if (id == head.id) {
            seen = true;
            continue;
        }
        if (!seen) continue;
        Vehicle& member = world.fleet[id];
        if (member.platoon_id != head.platoon_id) break;
        world.grant(member.id);
        for (int cid : conflicting) world.mark_resolved(member.id, cid);
    }
    return true;
}

void RwaStrategy::expire_episodes(World& world) {
    for (auto it = episodes_.begin(); it != episodes_.end();) {
        const Episode& ep = it->second;
        const Vehicle* owner = world.find(ep.owner);
        const Vehicle* requester = world.find(ep.requester);
        bool drop = owner == nullptr || requester == nullptr;
        if (!drop && ep.accepted) {
            // transfer holds until the requester clears the overlap point
            drop = requester->rear() > ep.requester_star + kClearMargin;
        } else if (!drop) {
            // rejection stands while the owner still approaches the overlap
            // and the requester stays in the negotiation area
            if (owner->rear() > ep.owner_star + kClearMargin) {
                drop = true;
            } else {
                const ConflictPair& pair_ow = world.layout->conflict_by_index(
                    owner->path_index, requester->path_index);
                const auto [owner_front, owner_len] = world.platoon_extent(*owner);
                const auto [req_front, req_len] = world.platoon_extent(*requester);
                const ZoneLengths zones =
                    zone_partition(owner->v, requester->v, world.cfg->brakes);
                const Zone zone = classify_zone(map_virtual(req_front, pair_ow),
                                                owner_front, owner_len, req_len, zones);
                drop = zone != Zone::Negotiation;
            }
        }
        if (drop) it = episodes_.erase(it);
        else ++it;
    }
    // forget encounters that ended
    for (auto it = encountered_.begin(); it != encountered_.end();) {
        if (world.find(it->first) == nullptr || world.find(it->second) == nullptr)
            it = encountered_.erase(it);
        else ++it;
    }
}

void RwaStrategy::apply_transfer_constraints(World& world) {
    for (const auto& [key, ep] : episodes_) {
        if (!ep.accepted) continue;
        const Vehicle* owner = world.find(ep.owner);
        const Vehicle* requester = world.find(ep.requester);
        if (owner == nullptr || requester == nullptr) continue;
        const ConflictPair& pair_ow =
            world.layout->conflict_by_index(owner->path_index, requester->path_index);
        const double image_front = map_virtual(requester->s, pair_ow);
        world.plans[owner->id].leaders.push_back({image_front, requester->v});
    }
}

void RwaStrategy::step(World& world) {
    expire_episodes(world);
    std::vector<int> heads = world.decision_heads();
    std::sort(heads.begin(), heads.end());
    for (int id : heads)
        if (!world.fleet[id].committed) decide(world, world.fleet[id]);
    apply_transfer_constraints(world);
}

}  // namespace rowsim
