#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include <eposs/cloud.hpp>
#include <eposs/dag.hpp>
#include <eposs/schedule.hpp>

namespace eposs {

// splitmix64 finalizer; used to derive independent stream seeds
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t seed_for_alpha(std::uint64_t seed, double alpha);

struct stop_rule {
    enum class kind { fixed, ci95 };

    kind mode = kind::ci95;
    std::size_t runs = 10000;            // fixed mode
    double relative_halfwidth = 0.02;    // ci95: stop when 1.96 s / sqrt(n) <= this * mean
    std::size_t min_runs = 1000;
    std::size_t max_runs = 100000;
    std::size_t check_every = 100;       // ci95 rule is tested at multiples of this

    static stop_rule fixed(std::size_t n) {
        stop_rule r;
        r.mode = kind::fixed;
        r.runs = n;
        return r;
    }
};

struct eval_options {
    stop_rule stop;
    std::size_t workers = 1;
};

struct eval_report {
    double p_hit_deadline = 0.0;
    double p_hit_budget = 0.0; // 1 when no budget is given
    double mean_makespan = 0.0;
    double mean_cost = 0.0;
    std::size_t runs = 0;
    double ci_halfwidth_makespan = 0.0;
};

// Repeated simulated executions of a fixed, complete schedule. Run r draws every task's
// duration from its own stream seeded by mix_seed(seed, r), so the result does not depend
// on the worker count.
eval_report evaluate(schedule const & s, workflow const & wf, exec_time_model const & model,
                     vm_catalog const & catalog, double deadline, std::optional<double> budget,
                     std::uint64_t seed, eval_options const & opts = {});

struct validation {
    double hits_percent = 0.0;
    double mean_cost = 0.0;
    double mean_makespan = 0.0;
    bool admissible = false;
};

inline constexpr std::size_t validation_runs = 10000;

// Independent 10,000-run check; admissible iff hits_percent / 100 >= p_t.
validation validate_solution(schedule const & s, workflow const & wf, exec_time_model const & model,
                             vm_catalog const & catalog, double deadline, double p_t, std::uint64_t seed,
                             std::size_t workers = 1);

} // namespace eposs
