#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <eposs/cloud.hpp>
#include <eposs/dag.hpp>
#include <eposs/schedule.hpp>

namespace eposs {

struct objectives {
    double makespan = 0.0;
    double cost = 0.0;
};

struct candidate {
    schedule plan;
    double makespan = 0.0;
    double cost = 0.0;
};

// Surviving MOHEFT solutions with their expected objectives.
using candidate_set = std::vector<candidate>;

// NSGA-II crowding distance over min-max normalized (makespan, cost). Boundary points of
// each non-degenerate objective get +inf; an objective with all-equal values adds nothing.
std::vector<double> crowding_distance(std::span<objectives const> points);

// Indices (ascending) of the k points with the largest crowding distance; ties prefer
// lower cost, then lower makespan, then lower index. All indices when size <= k.
std::vector<std::size_t> crowding_select(std::span<objectives const> points, std::size_t k);
candidate_set crowding_select(candidate_set candidates, std::size_t k);

using clock = std::chrono::steady_clock;

struct moheft_options {
    std::size_t k = 10;
    std::optional<double> deadline;       // prune extensions whose makespan exceeds it
    bool enforce_quotas = false;          // prune extensions breaching the catalog quotas
    std::optional<clock::time_point> give_up_at; // throws error_code::timeout when passed
};

// Multi-objective HEFT. With a deadline or quotas, only feasible extensions survive and
// no_feasible_solution is thrown when a ranked task cannot be placed at all.
candidate_set moheft(workflow const & wf, vm_catalog const & catalog, time_matrix const & times,
                     moheft_options const & opts);

// least cost, ties by lower makespan, then first
candidate const & least_cost(candidate_set const & set);

// Makespan-greedy list scheduling: each ranked task goes to the open or fresh VM giving
// the earliest finish; ties by lower incremental cost, then open VMs before fresh, then
// catalog order.
schedule heft(workflow const & wf, vm_catalog const & catalog, time_matrix const & times);

// As heft, but minimizing incremental expected cost; ties by lower finish time.
schedule greedy_cost(workflow const & wf, vm_catalog const & catalog, time_matrix const & times);

// Ranked order used by the list schedulers: per-task mean of `times` over the catalog and
// the catalog-mean bandwidth.
ranked_tasks scheduling_order(workflow const & wf, vm_catalog const & catalog, time_matrix const & times);

} // namespace eposs
