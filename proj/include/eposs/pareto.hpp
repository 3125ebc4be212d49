#pragma once

#include <optional>
#include <vector>

#include <eposs/schedule.hpp>

namespace eposs {

struct front_point {
    schedule plan;
    double makespan = 0.0; // expected (simulated mean) seconds
    double cost = 0.0;     // expected dollars
    double alpha = 0.0;    // quantile order that produced the schedule, if any
    double p_hit_deadline = 0.0;
    double p_hit_budget = 0.0;
};

// Mutually non-dominated points under (makespan, cost) minimization.
using pareto_front = std::vector<front_point>;

// Keeps p unless some q is no worse on both objectives and better on one. Points equal on
// both objectives collapse to the first occurrence. Output sorted by makespan, then cost.
pareto_front non_dominated(std::vector<front_point> points);

struct reference_point {
    double makespan = 0.0;
    double cost = 0.0;
};

// (max makespan, max cost) over the points
reference_point auto_reference(std::vector<front_point> const & points);

// Area of the union of the boxes spanned by each point and the reference. Throws
// bad_reference when a point lies beyond the reference, invalid_value on an empty front.
double hypervolume(std::vector<front_point> const & front, std::optional<reference_point> ref = std::nullopt);

} // namespace eposs
