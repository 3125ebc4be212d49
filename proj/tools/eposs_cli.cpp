// eposs command-line front end: schedule, experiment, validate, front, generate.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <eposs/error.hpp>
#include <eposs/harness.hpp>
#include <eposs/pareto.hpp>
#include <eposs/schedulers.hpp>
#include <eposs/search.hpp>
#include <eposs/workflow_gen.hpp>

namespace {

using namespace eposs;
namespace fs = std::filesystem;

enum exit_code { ok = 0, failure = 1, config = 2, infeasible = 3, timed_out = 4 };

struct model_opts {
    std::string workflow;
    std::string catalog;
    std::string subset = "theta21";
    std::string dist = "gamma";
    std::string scen = "A";
    std::optional<double> quota_vcpus;
    std::vector<std::string> quota_type;
    double deadline = 0.0;
    double p_t = 0.9;
    std::uint64_t seed = 1;
    std::string out_dir;

    void add(CLI::App & app) {
        app.add_option("--workflow", workflow, "workflow JSON file")->required();
        app.add_option("--catalog", catalog, "VM catalog CSV/JSON (builtin EC2 table when omitted)");
        app.add_option("--vm-set", subset, "theta2..theta21, all, or type names joined by '+'");
        app.add_option("--distribution", dist, "deterministic, gamma, half-normal, uniform");
        app.add_option("--scenario", scen, "USL scenario A, B or C");
        app.add_option("--quota-vcpus", quota_vcpus, "overall vCPU quota");
        app.add_option("--quota-type", quota_type, "per-type VM quota, name=N")->take_all();
        app.add_option("--deadline", deadline, "deadline in seconds")->required();
        app.add_option("--p-t", p_t, "required deadline probability");
        app.add_option("--seed", seed, "random seed");
        app.add_option("--out-dir", out_dir, "write the result JSON here instead of stdout");
    }

    quotas limits() const {
        quotas q;
        q.total = quota_vcpus;
        for (auto const & spec : quota_type) {
            auto const eq = spec.find('=');
            if (eq == std::string::npos || eq == 0) {
                throw error(error_code::config_error, "--quota-type expects name=N, got '" + spec + "'");
            }
            try {
                q.per_type[spec.substr(0, eq)] = std::stoi(spec.substr(eq + 1));
            } catch (std::logic_error const &) {
                throw error(error_code::config_error, "--quota-type expects name=N, got '" + spec + "'");
            }
        }
        return q;
    }

    vm_catalog build_catalog() const {
        auto const s = parse_scenario(scen);
        auto const base = catalog.empty() ? builtin_ec2_catalog(s) : load_catalog(catalog, s);
        std::vector<std::string> names;
        if (subset == "all") {
            for (auto const & t : base.types()) names.push_back(t.name);
        } else if (subset.starts_with("theta")) {
            names = named_subset(subset);
        } else {
            for (std::size_t pos = 0; pos <= subset.size();) {
                auto const next = std::min(subset.find('+', pos), subset.size());
                names.push_back(subset.substr(pos, next - pos));
                pos = next + 1;
            }
        }
        return base.subset(names).with_quotas(limits());
    }

    void emit(nlohmann::json const & j, char const * file) const {
        if (out_dir.empty()) {
            std::cout << j.dump(2) << "\n";
            return;
        }
        fs::create_directories(out_dir);
        auto const path = (fs::path(out_dir) / file).string();
        std::ofstream out(path);
        out << j.dump(2) << "\n";
        if (!out) {
            throw error(error_code::io_error, "cannot write '" + path + "'");
        }
        std::cout << "wrote " << path << "\n";
    }
};

struct search_opts {
    double epsilon = 0.02;
    std::size_t k = 10;
    std::size_t parallel = 4;
    std::optional<double> timeout_s;
    std::optional<double> budget;
    double p_c = 0.9;

    void add(CLI::App & app) {
        app.add_option("--epsilon", epsilon, "quantile search resolution");
        app.add_option("--k", k, "MOHEFT front width");
        app.add_option("--parallel", parallel, "P-EPOSS workers per round");
        app.add_option("--timeout-s", timeout_s, "wall-clock cap for the algorithm");
        app.add_option("--budget", budget, "M-EPOSS cost bound");
        app.add_option("--p-c", p_c, "required budget probability");
    }

    search_config config(model_opts const & m, vm_catalog const & catalog) const {
        search_config c;
        c.p_t = m.p_t;
        c.epsilon = epsilon;
        c.k = k;
        c.deadline = m.deadline;
        c.enforce_quotas = !catalog.limits().unlimited();
        c.parallelism = parallel;
        c.budget = budget;
        c.p_c = p_c;
        if (timeout_s) {
            c.give_up_at = clock::now() + std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(*timeout_s));
        }
        return c;
    }
};

nlohmann::json validation_json(validation const & v) {
    return {{"hits_percent", v.hits_percent},
            {"admissible", v.admissible},
            {"mean_cost", v.mean_cost},
            {"mean_makespan", v.mean_makespan},
            {"runs", validation_runs}};
}

int run_schedule(model_opts const & m, search_opts const & so, std::string const & algo_name) {
    auto const wf = load_workflow(m.workflow);
    auto const catalog = m.build_catalog();
    auto const algo = parse_algorithm(algo_name);
    exec_time_model const model(wf, catalog, parse_distribution(m.dist));
    auto const cfg = so.config(m, catalog);
    cfg.check(algo == algorithm::p_eposs);

    auto const start = clock::now();
    std::optional<schedule> s;
    nlohmann::json extra = nlohmann::json::object();
    try {
        switch (algo) {
        case algorithm::heft: s = heft(wf, catalog, model.mean_times()); break;
        case algorithm::greedy_cost: s = greedy_cost(wf, catalog, model.mean_times()); break;
        case algorithm::moheft: {
            moheft_options opts{so.k, m.deadline, cfg.enforce_quotas, cfg.give_up_at};
            s = least_cost(moheft(wf, catalog, model.mean_times(), opts)).plan;
            break;
        }
        case algorithm::eposs:
        case algorithm::p_eposs: {
            auto const r = algo == algorithm::eposs ? eposs::eposs(wf, catalog, model, cfg, m.seed)
                                                    : p_eposs(wf, catalog, model, cfg, m.seed);
            extra = to_json(r, wf, catalog);
            s = r.best;
            break;
        }
        case algorithm::m_eposs: {
            auto const r = m_eposs(wf, catalog, model, cfg, m.seed);
            extra["front"] = to_json(r.front, wf, catalog);
            if (!r.front.empty()) s = r.front.back().plan;
            break;
        }
        }
    } catch (no_feasible_solution const & e) {
        std::cerr << e.what() << "\n";
    }
    double const seconds = std::chrono::duration<double>(clock::now() - start).count();
    if (!s) {
        std::cerr << "no feasible solution\n";
        return infeasible;
    }
    auto const v = validate_solution(*s, wf, model, catalog, m.deadline, m.p_t, m.seed);
    nlohmann::json out{{"algorithm", to_string(algo)},
                       {"schedule", to_json(*s, wf, catalog)},
                       {"algo_runtime_seconds", seconds},
                       {"validation", validation_json(v)}};
    if (!extra.empty()) out["search"] = extra;
    m.emit(out, "schedule.json");
    return ok;
}

int run_validate(model_opts const & m, std::string const & schedule_file) {
    auto const wf = load_workflow(m.workflow);
    auto const catalog = m.build_catalog();
    exec_time_model const model(wf, catalog, parse_distribution(m.dist));
    auto const s = load_schedule(schedule_file, wf, catalog);
    schedule_plan(s, wf, catalog, true);
    auto const v = validate_solution(s, wf, model, catalog, m.deadline, m.p_t, m.seed);
    auto out = validation_json(v);
    if (!catalog.limits().unlimited()) {
        out["quotas_respected"] = quotas_respected(s, catalog, compute_timeline(s, wf, model.mean_times(), catalog));
    }
    m.emit(out, "validation.json");
    return ok;
}

int run_front(model_opts const & m, search_opts const & so, std::optional<double> ref_makespan,
              std::optional<double> ref_cost) {
    auto const wf = load_workflow(m.workflow);
    auto const catalog = m.build_catalog();
    exec_time_model const model(wf, catalog, parse_distribution(m.dist));
    auto const r = m_eposs(wf, catalog, model, so.config(m, catalog), m.seed);
    if (r.front.empty()) {
        std::cerr << "no admissible point on the quantile grid\n";
        return infeasible;
    }
    std::optional<reference_point> ref;
    if (ref_makespan && ref_cost) {
        ref = reference_point{*ref_makespan, *ref_cost};
    }
    auto const used = ref.value_or(auto_reference(r.front));
    nlohmann::json out{{"front", to_json(r.front, wf, catalog)},
                       {"grid_points", r.grid_points},
                       {"reference", {{"makespan", used.makespan}, {"cost", used.cost}}},
                       {"hypervolume", hypervolume(r.front, used)}};
    m.emit(out, "front.json");
    return ok;
}

int run_experiment(std::string const & plan_file, std::string const & out_dir, std::optional<double> timeout_s,
                   std::optional<std::size_t> concurrency) {
    auto plan = load_plan(plan_file);
    if (timeout_s) plan.timeout_s = *timeout_s;
    if (concurrency) plan.concurrency = std::max<std::size_t>(1, *concurrency);
    auto const rows = run_plan(plan);
    report(rows, out_dir);
    std::size_t admissible = 0;
    for (auto const & r : rows) admissible += r.admissible ? 1 : 0;
    std::cout << rows.size() << " rows, " << admissible << " admissible, written to " << out_dir << "\n";
    return ok;
}

int run_generate(std::string const & shape, std::size_t size, std::uint64_t seed, std::string const & out) {
    gen_spec spec;
    spec.shape = parse_topology(shape);
    spec.size = size;
    spec.seed = seed;
    auto const wf = generate(spec);
    if (out.empty()) {
        std::cout << eposs::to_json(wf).dump(2) << "\n";
    } else {
        save_workflow(wf, out);
        std::cout << "wrote " << out << " (" << wf.size() << " tasks)\n";
    }
    return ok;
}

int exit_for(error const & e) {
    switch (e.code()) {
    case error_code::no_feasible_solution: return infeasible;
    case error_code::timeout: return timed_out;
    case error_code::config_error:
    case error_code::bad_spec:
    case error_code::unknown_type:
    case error_code::unknown_family:
    case error_code::invalid_value:
    case error_code::bad_quantile_order:
    case error_code::bad_reference:
        return config;
    default: return failure;
    }
}

} // namespace

int main(int argc, char ** argv) {
    CLI::App app{"Probabilistic deadline-constrained workflow scheduling on cloud VMs"};
    app.require_subcommand(1);

    model_opts sched_m, val_m, front_m;
    search_opts sched_s, front_s;
    std::string algo = "eposs";
    auto * sched = app.add_subcommand("schedule", "run one scheduling algorithm and validate its solution");
    sched_m.add(*sched);
    sched_s.add(*sched);
    sched->add_option("--algo", algo, "heft, greedy-cost, moheft, eposs, p-eposs, m-eposs");

    std::string plan_file, exp_out = "results";
    std::optional<double> exp_timeout;
    std::optional<std::size_t> exp_parallel;
    auto * exp = app.add_subcommand("experiment", "run an experiment plan and write result tables");
    exp->add_option("--plan", plan_file, "plan JSON")->required();
    exp->add_option("--out-dir", exp_out, "output directory");
    exp->add_option("--timeout-s", exp_timeout, "wall-clock cap per run");
    exp->add_option("--parallel", exp_parallel, "configurations run concurrently");

    std::string schedule_file;
    auto * val = app.add_subcommand("validate", "10,000-run Monte Carlo check of a schedule file");
    val_m.add(*val);
    val->add_option("--schedule", schedule_file, "schedule JSON")->required();

    std::optional<double> ref_makespan, ref_cost;
    auto * front = app.add_subcommand("front", "M-EPOSS Pareto front and its hypervolume");
    front_m.add(*front);
    front_s.add(*front);
    front->add_option("--ref-makespan", ref_makespan, "hypervolume reference makespan");
    front->add_option("--ref-cost", ref_cost, "hypervolume reference cost");

    std::string topo = "epigenomics", gen_out;
    std::size_t gen_size = 24;
    std::uint64_t gen_seed = 1;
    auto * gen = app.add_subcommand("generate", "write a synthetic workflow");
    gen->add_option("--topology", topo, "epigenomics, montage, sipht, cybershake, ligo, random-layered");
    gen->add_option("--size", gen_size, "approximate task count");
    gen->add_option("--seed", gen_seed, "random seed");
    gen->add_option("--out", gen_out, "output file (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const & e) {
        int const rc = app.exit(e);
        return rc == 0 ? ok : config;
    }

    try {
        if (*sched) return run_schedule(sched_m, sched_s, algo);
        if (*exp) return run_experiment(plan_file, exp_out, exp_timeout, exp_parallel);
        if (*val) return run_validate(val_m, schedule_file);
        if (*front) return run_front(front_m, front_s, ref_makespan, ref_cost);
        if (*gen) return run_generate(topo, gen_size, gen_seed, gen_out);
    } catch (error const & e) {
        std::cerr << e.what() << "\n";
        return exit_for(e);
    } catch (std::exception const & e) {
        std::cerr << e.what() << "\n";
        return failure;
    }
    return ok;
}
