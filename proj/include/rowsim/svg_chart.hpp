#pragma once

#include <string>
#include <vector>

namespace rowsim {

struct Aggregate;

// Minimal static line charts of the sweep aggregates (delay and throughput
// versus arrival rate), one SVG per figure.
void write_sweep_charts(const std::string& dir, const std::vector<Aggregate>& aggs);

}  // namespace rowsim
