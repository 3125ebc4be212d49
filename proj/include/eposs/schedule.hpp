#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include <eposs/cloud.hpp>
#include <eposs/dag.hpp>

namespace eposs {

struct vm_instance {
    type_index type = 0;
    std::vector<task_index> tasks; // executed serially in this order
};

// A (possibly partial) assignment plan: one entry per provisioned VM.
struct schedule {
    std::vector<vm_instance> instances;

    std::size_t task_count() const;
    bool empty() const { return instances.empty(); }
};

bool operator==(vm_instance const & a, vm_instance const & b);
bool operator==(schedule const & a, schedule const & b);

struct timeline {
    std::vector<double> est; // per task; NaN when unscheduled
    std::vector<double> eft;
    std::vector<double> vm_start; // per instance
    std::vector<double> vm_stop;
    double makespan = 0.0;
};

// Fixed execution order and communication delays of a schedule, reusable across
// many timeline evaluations with different task durations.
class schedule_plan {
public:
    // Partial schedules are accepted when every scheduled task has its predecessors
    // scheduled; otherwise throws unscheduled_predecessor. With require_complete,
    // throws incomplete_schedule unless every task is placed exactly once.
    schedule_plan(schedule const & s, workflow const & wf, vm_catalog const & catalog, bool require_complete = false);

    struct outcome {
        double makespan = 0.0;
        double cost = 0.0;
    };

    // duration[v] is the execution time of task v on its assigned VM
    outcome run(std::span<double const> duration) const;
    timeline full(std::span<double const> duration) const;

    // order in which tasks can be evaluated
    std::vector<task_index> const & order() const noexcept { return order_; }
    int instance_of(task_index v) const { return instance_of_[v]; }
    type_index type_of(task_index v) const;
    std::size_t instance_count() const noexcept { return instance_types_.size(); }

private:
    struct incoming {
        task_index from;
        double delay;
    };

    std::vector<task_index> order_;
    std::vector<int> instance_of_;            // -1 when unscheduled
    std::vector<task_index> queue_prev_;      // previous task on same VM, or npos
    std::vector<std::vector<incoming>> in_;   // DAG predecessors with transfer delay
    std::vector<type_index> instance_types_;
    std::vector<double> price_per_second_;    // per instance
    std::vector<task_index> first_task_;      // per instance, npos when empty
    std::vector<task_index> last_task_;
    std::size_t task_total_ = 0;
};

timeline compute_timeline(schedule const & s, workflow const & wf, time_matrix const & times,
                          vm_catalog const & catalog);

// Pro-rata span billing: sum over instances of (stop - start) * price.
double expected_cost(schedule const & s, timeline const & tl, vm_catalog const & catalog);

// Interval sweep of the quota limits; deallocations are processed before allocations
// at equal instants.
bool quotas_respected(schedule const & s, vm_catalog const & catalog, timeline const & tl);

bool feasible(schedule const & s, double deadline, vm_catalog const & catalog, timeline const & tl);

nlohmann::json to_json(schedule const & s, workflow const & wf, vm_catalog const & catalog);
schedule schedule_from_json(nlohmann::json const & j, workflow const & wf, vm_catalog const & catalog);
schedule load_schedule(std::string const & path, workflow const & wf, vm_catalog const & catalog);

} // namespace eposs
