#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include <eposs/cloud.hpp>
#include <eposs/dag.hpp>
#include <eposs/monte_carlo.hpp>
#include <eposs/schedule.hpp>
#include <eposs/workflow_gen.hpp>

namespace eposs {

enum class algorithm { heft, greedy_cost, moheft, eposs, p_eposs, m_eposs };

algorithm parse_algorithm(std::string const & name); // throws config_error
char const * to_string(algorithm a);

struct workflow_ref {
    std::string name;
    std::optional<std::string> file;
    std::optional<gen_spec> gen;
};

struct quota_setting {
    std::string name = "none";
    quotas limits;
};

struct experiment_plan {
    std::vector<workflow_ref> workflows;
    std::vector<algorithm> algorithms;
    std::vector<std::string> vm_subsets{"theta21"};
    std::vector<double> p_t{0.9};
    std::map<std::string, double> deadlines; // workflow name -> seconds
    std::vector<distribution> distributions{distribution::gamma};
    std::vector<scenario> scenarios{scenario::a};
    std::vector<quota_setting> quotas{quota_setting{}};
    std::size_t repetitions = 1;
    std::uint64_t base_seed = 1;
    double epsilon = 0.02;
    std::size_t k = 10;
    std::size_t parallelism = 4;       // P for p-eposs, workers for m-eposs
    std::optional<double> budget;      // m-eposs cost bound
    double p_c = 0.9;
    stop_rule search_stop;             // Monte Carlo rule inside the searches
    std::optional<double> timeout_s;   // per run wall-clock cap
    std::optional<std::string> catalog_file;
    std::size_t concurrency = 1;       // configurations run at once

    // throws config_error naming the offending axis
    void check() const;
};

// Relative workflow and catalog files are resolved against base_dir.
experiment_plan plan_from_json(nlohmann::json const & j, std::string const & base_dir = ".");
experiment_plan load_plan(std::string const & path);

struct front_summary {
    double makespan = 0.0;
    double cost = 0.0;
    double alpha = 0.0;
    bool operator==(front_summary const &) const = default;
};

struct result_row {
    std::size_t config = 0; // stable plan index
    std::string workflow;
    std::string algo;
    std::string vm_subset;
    double p_t = 0.0;
    std::string dist;
    std::string scen;
    std::string quota;
    std::size_t repetition = 0;
    std::uint64_t seed = 0;
    std::string status;     // ok, no_feasible, timeout
    double hits_percent = 0.0;
    bool admissible = false;
    double mean_cost = 0.0;
    double mean_makespan = 0.0;
    double algo_runtime_seconds = 0.0;
    std::string solution;   // type:task|task;type:task
    std::vector<front_summary> front; // m-eposs only, not part of the CSV

    bool operator==(result_row const &) const = default;
};

std::vector<result_row> run_plan(experiment_plan const & plan);

// Compact schedule text used in the solution column.
std::string encode_solution(schedule const & s, workflow const & wf, vm_catalog const & catalog);

std::string results_csv(std::vector<result_row> const & rows);
std::vector<result_row> parse_results_csv(std::string const & text);
nlohmann::json fronts_json(std::vector<result_row> const & rows);
nlohmann::json summary_json(std::vector<result_row> const & rows);

// Writes results.csv, fronts.json and summary.json; throws io_error.
void report(std::vector<result_row> const & rows, std::string const & out_dir);

} // namespace eposs
