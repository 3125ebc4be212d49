#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

namespace eposs {

using task_index = std::size_t;

struct task {
    std::string id;
    double runtime = 0.0;   // mean seconds on a 1-vCPU reference machine
    double output_mb = 0.0; // data written for successors
};

using edge = std::pair<std::string, std::string>;

// Checks ids, values and edges and throws eposs::error on the first problem.
// Cycles are reported with the ids along one cycle.
void validate(std::vector<task> const & tasks, std::vector<edge> const & edges);

// Immutable, validated DAG. Tasks are addressed by dense index in insertion order.
class workflow {
public:
    workflow() = default;
    workflow(std::vector<task> tasks, std::vector<edge> edges);

    std::size_t size() const noexcept { return tasks_.size(); }
    bool empty() const noexcept { return tasks_.empty(); }

    task const & at(task_index i) const { return tasks_.at(i); }
    std::vector<task> const & tasks() const noexcept { return tasks_; }
    std::vector<edge> const & edges() const noexcept { return edges_; }

    std::vector<task_index> const & predecessors(task_index i) const { return preds_.at(i); }
    std::vector<task_index> const & successors(task_index i) const { return succs_.at(i); }

    // throws unknown id as invalid_value
    task_index index_of(std::string const & id) const;
    bool contains(std::string const & id) const { return index_.contains(id); }

    // Kahn order, ties by ascending index
    std::vector<task_index> const & topological_order() const noexcept { return topo_; }

    std::size_t edge_count() const noexcept { return edges_.size(); }

private:
    std::vector<task> tasks_;
    std::vector<edge> edges_;
    std::vector<std::vector<task_index>> preds_;
    std::vector<std::vector<task_index>> succs_;
    std::unordered_map<std::string, task_index> index_;
    std::vector<task_index> topo_;
};

struct ranked_tasks {
    std::vector<task_index> order; // highest rank first
    std::vector<double> rank;      // indexed by task_index
};

// Upward rank: rank(v) = time(v) + max_{u in succ(v)} (rank(u) + output_mb(v) * 8 / bandwidth).
// A non-positive or infinite bandwidth disables the communication term.
ranked_tasks b_rank(workflow const & wf, std::span<double const> mean_time, double mean_bandwidth_mbps);

// Same, keyed by task id; throws missing_time when a task is absent.
ranked_tasks b_rank(workflow const & wf, std::map<std::string, double> const & mean_time,
                    double mean_bandwidth_mbps = 0.0);

nlohmann::json to_json(workflow const & wf);
workflow workflow_from_json(nlohmann::json const & j);
workflow load_workflow(std::string const & path);
void save_workflow(workflow const & wf, std::string const & path);

} // namespace eposs
