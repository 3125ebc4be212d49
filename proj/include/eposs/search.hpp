#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include <json.hpp>

#include <eposs/monte_carlo.hpp>
#include <eposs/pareto.hpp>
#include <eposs/schedulers.hpp>

namespace eposs {

struct search_config {
    double p_t = 0.9;       // required probability of meeting the deadline
    double epsilon = 0.02;  // stop once the quantile interval is this narrow
    std::size_t k = 10;     // MOHEFT front width
    double deadline = 0.0;  // seconds
    bool enforce_quotas = true; // apply the catalog quotas inside MOHEFT
    std::size_t parallelism = 4; // P-EPOSS workers per round / M-EPOSS workers
    std::optional<double> budget; // M-EPOSS cost bound c
    double p_c = 0.9;
    eval_options eval;      // Monte Carlo settings for each probe
    std::optional<clock::time_point> give_up_at;

    // throws config_error naming the offending field
    void check(bool parallel = false) const;
};

struct search_step {
    std::size_t round = 0;  // P-EPOSS round, equals the step index for EPOSS
    double alpha = 0.0;
    bool scheduled = false; // MOHEFT returned at least one solution
    bool feasible = false;  // simulated p_hit_deadline >= p_t
    double p_hit = 0.0;
    double mean_cost = 0.0;
    double mean_makespan = 0.0;
};

struct search_result {
    std::optional<schedule> best;
    double best_cost = std::numeric_limits<double>::infinity();
    std::optional<eval_report> best_report;
    double best_alpha = 0.0;
    std::vector<search_step> trace;
    std::size_t moheft_invocations = 0;
    std::size_t rounds = 0;
};

// Binary search over the quantile order: cheapest MOHEFT solution at each probed
// quantile, accepted when its simulated deadline probability reaches p_t.
search_result eposs(workflow const & wf, vm_catalog const & catalog, exec_time_model const & model,
                    search_config const & cfg, std::uint64_t seed);

// Each round splits the current interval into P parts and probes their midpoints
// concurrently, then descends into the part of the cheapest feasible probe (the highest
// part when none is feasible). Stops once the parts are no wider than epsilon.
search_result p_eposs(workflow const & wf, vm_catalog const & catalog, exec_time_model const & model,
                      search_config const & cfg, std::uint64_t seed);

struct m_eposs_result {
    pareto_front front;
    std::vector<search_step> trace; // one record per evaluated schedule
    std::size_t grid_points = 0;
};

// Pareto front over the quantile grid {k * epsilon < 1}; points must satisfy both the
// deadline (p_t) and, when a budget is set, the cost (p_c) probability constraints.
m_eposs_result m_eposs(workflow const & wf, vm_catalog const & catalog, exec_time_model const & model,
                       search_config const & cfg, std::uint64_t seed);

std::size_t eposs_step_count(double epsilon);
std::size_t p_eposs_round_count(std::size_t parallelism, double epsilon);
std::vector<double> quantile_grid(double epsilon);

nlohmann::json to_json(search_result const & r, workflow const & wf, vm_catalog const & catalog);
nlohmann::json to_json(pareto_front const & f, workflow const & wf, vm_catalog const & catalog);

} // namespace eposs
