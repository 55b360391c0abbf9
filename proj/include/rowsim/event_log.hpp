#pragma once

#include <string>
#include <vector>

namespace rowsim {

enum class EventKind {
    Arrival,        // joined the point queue (detail: intention)
    Enter,          // physically injected at the spawn point
    StopLine,       // reached the stop line
    Grant,          // received junction right-of-way
    JunctionEnter,
    JunctionExit,
    SystemExit,     // completed its path (detail: delay)
    Message,        // detail: kind>peer
    TieBreak,       // equal-distance tie observed
    Deadlock,       // deadlock detector fired
    Collision,
    Replan,
    Transfer,       // right-of-way transferred after negotiation
};

const char* to_string(EventKind k);

struct Event {
    double t = 0.0;
    EventKind kind = EventKind::Arrival;
    int vid = -1;
    int lane = 0;
    double s = 0.0;
    double v = 0.0;
    std::string detail;
};

using EventLog = std::vector<Event>;

std::string event_log_to_text(const EventLog& log);

}  // namespace rowsim
