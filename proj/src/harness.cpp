#include <eposs/harness.hpp>

#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include <eposs/error.hpp>
#include <eposs/schedulers.hpp>
#include <eposs/search.hpp>

namespace eposs {

namespace fs = std::filesystem;

algorithm parse_algorithm(std::string const & name) {
    if (name == "heft") return algorithm::heft;
    if (name == "greedy-cost") return algorithm::greedy_cost;
    if (name == "moheft") return algorithm::moheft;
    if (name == "eposs") return algorithm::eposs;
    if (name == "p-eposs") return algorithm::p_eposs;
    if (name == "m-eposs") return algorithm::m_eposs;
    throw error(error_code::config_error, "algorithms: unknown algorithm '" + name + "'");
}

char const * to_string(algorithm a) {
    switch (a) {
    case algorithm::heft: return "heft";
    case algorithm::greedy_cost: return "greedy-cost";
    case algorithm::moheft: return "moheft";
    case algorithm::eposs: return "eposs";
    case algorithm::p_eposs: return "p-eposs";
    case algorithm::m_eposs: return "m-eposs";
    }
    return "?";
}

void experiment_plan::check() const {
    auto axis = [](bool empty, char const * name) {
        if (empty) {
            throw error(error_code::config_error, std::string("axis '") + name + "' is empty");
        }
    };
    axis(workflows.empty(), "workflows");
    axis(algorithms.empty(), "algorithms");
    axis(vm_subsets.empty(), "vm_subsets");
    axis(p_t.empty(), "p_t");
    axis(distributions.empty(), "distribution");
    axis(scenarios.empty(), "scenario");
    axis(quotas.empty(), "quotas");
    if (repetitions < 1) {
        throw error(error_code::config_error, "axis 'repetitions' must be >= 1");
    }
    std::set<std::string> names;
    for (auto const & w : workflows) {
        if (!names.insert(w.name).second) {
            throw error(error_code::config_error, "axis 'workflows' repeats the name '" + w.name + "'");
        }
        if (!deadlines.contains(w.name)) {
            throw error(error_code::config_error, "axis 'deadlines' has no entry for workflow '" + w.name + "'");
        }
        if (!(deadlines.at(w.name) > 0.0)) {
            throw error(error_code::config_error, "axis 'deadlines' must be positive for '" + w.name + "'");
        }
    }
    for (double p : p_t) {
        if (!(p > 0.0 && p <= 1.0)) {
            throw error(error_code::config_error, "axis 'p_t' values must lie in (0, 1]");
        }
    }
    if (!(epsilon > 0.0 && epsilon <= 0.5)) {
        throw error(error_code::config_error, "epsilon must lie in (0, 0.5]");
    }
    if (k < 1) {
        throw error(error_code::config_error, "k must be >= 1");
    }
    for (auto a : algorithms) {
        if (a == algorithm::p_eposs && parallelism < 2) {
            throw error(error_code::config_error, "parallelism must be >= 2 for p-eposs");
        }
    }
    if (timeout_s && !(*timeout_s > 0.0)) {
        throw error(error_code::config_error, "timeout_s must be positive");
    }
}

namespace {

std::string resolve(std::string const & p, std::string const & base_dir) {
    fs::path const path(p);
    return path.is_absolute() ? p : (fs::path(base_dir) / path).string();
}

template <class T, class F>
std::vector<T> list_of(nlohmann::json const & j, char const * axis, F convert) {
    std::vector<T> out;
    if (j.is_array()) {
        for (auto const & e : j) out.push_back(convert(e));
    } else {
        out.push_back(convert(j));
    }
    if (out.empty()) {
        throw error(error_code::config_error, std::string("axis '") + axis + "' is empty");
    }
    return out;
}

quota_setting quota_from_json(nlohmann::json const & j) {
    quota_setting q;
    if (j.is_string() && j.get<std::string>() == "none") {
        return q;
    }
    if (!j.is_object()) {
        throw error(error_code::config_error, "axis 'quotas' entries must be objects or \"none\"");
    }
    q.name = j.value("name", std::string("quota"));
    if (j.contains("vcpus")) {
        q.limits.total = j.at("vcpus").get<double>();
        q.limits.unit = quota_unit::vcpus;
    } else if (j.contains("vms")) {
        q.limits.total = j.at("vms").get<double>();
        q.limits.unit = quota_unit::vms;
    }
    if (j.contains("per_type")) {
        for (auto const & [name, n] : j.at("per_type").items()) {
            q.limits.per_type[name] = n.get<int>();
        }
    }
    return q;
}

} // namespace

experiment_plan plan_from_json(nlohmann::json const & j, std::string const & base_dir) {
    if (!j.is_object()) {
        throw error(error_code::config_error, "plan must be a JSON object");
    }
    experiment_plan p;
    try {
        for (auto const & w : j.at("workflows")) {
            workflow_ref ref;
            ref.name = w.at("name").get<std::string>();
            if (w.contains("file")) {
                ref.file = resolve(w.at("file").get<std::string>(), base_dir);
            } else if (w.contains("generate")) {
                ref.gen = gen_spec_from_json(w.at("generate"));
            } else {
                throw error(error_code::config_error, "axis 'workflows': '" + ref.name + "' needs file or generate");
            }
            p.workflows.push_back(std::move(ref));
        }
        p.algorithms = list_of<algorithm>(j.at("algorithms"), "algorithms",
                                          [](auto const & e) { return parse_algorithm(e.template get<std::string>()); });
        if (j.contains("vm_subsets")) {
            p.vm_subsets = list_of<std::string>(j.at("vm_subsets"), "vm_subsets",
                                                [](auto const & e) { return e.template get<std::string>(); });
        }
        if (j.contains("p_t")) {
            p.p_t = list_of<double>(j.at("p_t"), "p_t", [](auto const & e) { return e.template get<double>(); });
        }
        for (auto const & [name, d] : j.at("deadlines").items()) {
            p.deadlines[name] = d.get<double>();
        }
        if (j.contains("distribution")) {
            p.distributions = list_of<distribution>(j.at("distribution"), "distribution", [](auto const & e) {
                return parse_distribution(e.template get<std::string>());
            });
        }
        if (j.contains("scenario")) {
            p.scenarios = list_of<scenario>(j.at("scenario"), "scenario", [](auto const & e) {
                return parse_scenario(e.template get<std::string>());
            });
        }
        if (j.contains("quotas")) {
            p.quotas = list_of<quota_setting>(j.at("quotas"), "quotas", quota_from_json);
        }
        p.repetitions = j.value("repetitions", p.repetitions);
        p.base_seed = j.value("seed", p.base_seed);
        p.epsilon = j.value("epsilon", p.epsilon);
        p.k = j.value("k", p.k);
        p.parallelism = j.value("parallelism", p.parallelism);
        p.p_c = j.value("p_c", p.p_c);
        p.concurrency = std::max<std::size_t>(1, j.value("concurrency", p.concurrency));
        if (j.contains("budget")) p.budget = j.at("budget").get<double>();
        if (j.contains("timeout_s")) p.timeout_s = j.at("timeout_s").get<double>();
        if (j.contains("catalog")) p.catalog_file = resolve(j.at("catalog").get<std::string>(), base_dir);
        if (j.contains("monte_carlo")) {
            auto const & mc = j.at("monte_carlo");
            if (mc.value("mode", std::string("ci95")) == "fixed") {
                p.search_stop = stop_rule::fixed(mc.value("runs", std::size_t{10000}));
            }
        }
    } catch (nlohmann::json::exception const & e) {
        throw error(error_code::config_error, std::string("malformed plan: ") + e.what());
    } catch (error const & e) {
        if (e.code() == error_code::config_error || e.code() == error_code::bad_spec) {
            throw;
        }
        throw error(error_code::config_error, e.what());
    }
    p.check();
    return p;
}

experiment_plan load_plan(std::string const & path) {
    std::ifstream in(path);
    if (!in) {
        throw error(error_code::load_error, "cannot open plan '" + path + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (nlohmann::json::exception const & e) {
        throw error(error_code::load_error, "plan '" + path + "': " + e.what());
    }
    return plan_from_json(j, fs::path(path).parent_path().string());
}

std::string encode_solution(schedule const & s, workflow const & wf, vm_catalog const & catalog) {
    std::string out;
    for (std::size_t i = 0; i < s.instances.size(); ++i) {
        if (i > 0) out += ';';
        out += catalog.at(s.instances[i].type).name;
        out += ':';
        for (std::size_t t = 0; t < s.instances[i].tasks.size(); ++t) {
            if (t > 0) out += '|';
            out += wf.at(s.instances[i].tasks[t]).id;
        }
    }
    return out;
}

namespace {

double round_to(double x, int digits) {
    double const scale = std::pow(10.0, digits);
    return std::round(x * scale) / scale;
}

struct configuration {
    std::size_t index;
    std::size_t workflow;
    std::string vm_subset;
    scenario scen;
    distribution dist;
    std::size_t quota;
    double p_t;
    algorithm algo;
};

vm_catalog build_catalog(experiment_plan const & plan, configuration const & c) {
    auto const base = plan.catalog_file ? load_catalog(*plan.catalog_file, c.scen) : builtin_ec2_catalog(c.scen);
    std::vector<std::string> names;
    if (c.vm_subset == "all") {
        for (auto const & t : base.types()) names.push_back(t.name);
    } else if (c.vm_subset.starts_with("theta")) {
        names = named_subset(c.vm_subset);
    } else {
        std::stringstream ss(c.vm_subset);
        for (std::string name; std::getline(ss, name, '+');) names.push_back(name);
    }
    return base.subset(names).with_quotas(plan.quotas[c.quota].limits);
}

result_row run_one(experiment_plan const & plan, std::vector<workflow> const & wfs, configuration const & c,
                   std::size_t rep) {
    auto const & wf = wfs[c.workflow];
    auto const & ref = plan.workflows[c.workflow];
    result_row row;
    row.config = c.index;
    row.workflow = ref.name;
    row.algo = to_string(c.algo);
    row.vm_subset = c.vm_subset;
    row.p_t = c.p_t;
    row.dist = to_string(c.dist);
    row.scen = to_string(c.scen);
    row.quota = plan.quotas[c.quota].name;
    row.repetition = rep;
    row.seed = plan.base_seed + rep;

    auto const catalog = build_catalog(plan, c);
    exec_time_model const model(wf, catalog, c.dist);
    double const deadline = plan.deadlines.at(ref.name);
    bool const limited = !catalog.limits().unlimited();

    auto const start = clock::now();
    std::optional<clock::time_point> give_up;
    if (plan.timeout_s) {
        give_up = start + std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(*plan.timeout_s));
    }

    search_config cfg;
    cfg.p_t = c.p_t;
    cfg.epsilon = plan.epsilon;
    cfg.k = plan.k;
    cfg.deadline = deadline;
    cfg.enforce_quotas = limited;
    cfg.parallelism = plan.parallelism;
    cfg.budget = plan.budget;
    cfg.p_c = plan.p_c;
    cfg.eval.stop = plan.search_stop;
    cfg.give_up_at = give_up;

    std::optional<schedule> solution;
    row.status = "ok";
    try {
        switch (c.algo) {
        case algorithm::heft: solution = heft(wf, catalog, model.mean_times()); break;
        case algorithm::greedy_cost: solution = greedy_cost(wf, catalog, model.mean_times()); break;
        case algorithm::moheft: {
            moheft_options opts;
            opts.k = plan.k;
            opts.deadline = deadline;
            opts.enforce_quotas = limited;
            opts.give_up_at = give_up;
            solution = least_cost(moheft(wf, catalog, model.mean_times(), opts)).plan;
            break;
        }
        case algorithm::eposs: solution = eposs(wf, catalog, model, cfg, row.seed).best; break;
        case algorithm::p_eposs: solution = p_eposs(wf, catalog, model, cfg, row.seed).best; break;
        case algorithm::m_eposs: {
            auto const res = m_eposs(wf, catalog, model, cfg, row.seed);
            for (auto const & p : res.front) {
                row.front.push_back({p.makespan, p.cost, p.alpha});
            }
            if (!res.front.empty()) {
                solution = res.front.back().plan; // cheapest point
            }
            break;
        }
        }
    } catch (no_feasible_solution const &) {
        solution.reset();
    } catch (error const & e) {
        if (e.code() != error_code::timeout) {
            throw;
        }
        row.status = "timeout";
    }
    row.algo_runtime_seconds = round_to(std::chrono::duration<double>(clock::now() - start).count(), 6);

    if (!solution) {
        if (row.status == "ok") row.status = "no_feasible";
        return row;
    }
    auto const v = validate_solution(*solution, wf, model, catalog, deadline, c.p_t, row.seed);
    bool quota_ok = true;
    if (limited) {
        quota_ok = quotas_respected(*solution, catalog, compute_timeline(*solution, wf, model.mean_times(), catalog));
    }
    row.hits_percent = round_to(v.hits_percent, 1);
    row.admissible = v.admissible && quota_ok;
    row.mean_cost = round_to(v.mean_cost, 2);
    row.mean_makespan = round_to(v.mean_makespan, 2);
    row.solution = encode_solution(*solution, wf, catalog);
    return row;
}

std::vector<workflow> load_workflows(experiment_plan const & plan) {
    std::vector<workflow> out;
    for (auto const & ref : plan.workflows) {
        if (ref.file) {
            out.push_back(load_workflow(*ref.file));
        } else {
            out.push_back(generate(*ref.gen));
        }
    }
    return out;
}

} // namespace

std::vector<result_row> run_plan(experiment_plan const & plan) {
    plan.check();
    auto const wfs = load_workflows(plan);

    std::vector<configuration> configs;
    for (std::size_t w = 0; w < plan.workflows.size(); ++w)
        for (auto const & sub : plan.vm_subsets)
            for (auto scen : plan.scenarios)
                for (auto dist : plan.distributions)
                    for (std::size_t q = 0; q < plan.quotas.size(); ++q)
                        for (double p : plan.p_t)
                            for (auto a : plan.algorithms)
                                configs.push_back({configs.size(), w, sub, scen, dist, q, p, a});

    // catch bad catalog axes before any work
    for (auto const & c : configs) {
        try {
            build_catalog(plan, c);
        } catch (error const & e) {
            if (e.code() == error_code::load_error || e.code() == error_code::io_error) throw;
            throw error(error_code::config_error, "axis 'vm_subsets' or 'quotas': " + std::string(e.what()));
        }
    }

    std::size_t const total = configs.size() * plan.repetitions;
    std::vector<result_row> rows(total);
    auto job = [&](std::size_t n) { rows[n] = run_one(plan, wfs, configs[n / plan.repetitions], n % plan.repetitions); };

    std::size_t const workers = std::min(plan.concurrency, total);
    if (workers <= 1) {
        for (std::size_t n = 0; n < total; ++n) job(n);
    } else {
        std::atomic<std::size_t> cursor{0};
        std::vector<std::future<void>> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.push_back(std::async(std::launch::async, [&] {
                for (std::size_t n = cursor++; n < total; n = cursor++) job(n);
            }));
        }
        for (auto & f : pool) f.get();
    }
    return rows;
}

namespace {

char const * const csv_header =
    "config,workflow,algorithm,vm_subset,p_t,distribution,scenario,quota,repetition,seed,status,"
    "hits_percent,admissible,mean_cost,mean_makespan,algo_runtime_seconds,solution";

std::string shortest(double x) {
    char buf[64];
    auto const res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string fixed(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

std::string quoted(std::string const & field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::vector<std::vector<std::string>> csv_records(std::string const & text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> rec;
    std::string field;
    bool in_quotes = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char const ch = text[i];
        if (in_quotes) {
            if (ch == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (ch == '"') {
                in_quotes = false;
            } else {
                field += ch;
            }
            continue;
        }
        if (ch == '"') {
            in_quotes = true;
            any = true;
        } else if (ch == ',') {
            rec.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (ch == '\n') {
            rec.push_back(std::move(field));
            field.clear();
            records.push_back(std::move(rec));
            rec.clear();
            any = false;
        } else if (ch != '\r') {
            field += ch;
            any = true;
        }
    }
    if (any) {
        rec.push_back(std::move(field));
        records.push_back(std::move(rec));
    }
    return records;
}

} // namespace

std::string results_csv(std::vector<result_row> const & rows) {
    std::string out = csv_header;
    out += '\n';
    for (auto const & r : rows) {
        out += std::to_string(r.config) + ',' + quoted(r.workflow) + ',' + r.algo + ',' + quoted(r.vm_subset) + ',' +
               shortest(r.p_t) + ',' + r.dist + ',' + r.scen + ',' + quoted(r.quota) + ',' +
               std::to_string(r.repetition) + ',' + std::to_string(r.seed) + ',' + r.status + ',' +
               fixed(r.hits_percent, 1) + ',' + (r.admissible ? "true" : "false") + ',' + fixed(r.mean_cost, 2) +
               ',' + fixed(r.mean_makespan, 2) + ',' + fixed(r.algo_runtime_seconds, 6) + ',' + quoted(r.solution) +
               '\n';
    }
    return out;
}

std::vector<result_row> parse_results_csv(std::string const & text) {
    auto const records = csv_records(text);
    if (records.empty()) {
        throw error(error_code::load_error, "results CSV has no header");
    }
    std::vector<result_row> rows;
    for (std::size_t i = 1; i < records.size(); ++i) {
        auto const & f = records[i];
        if (f.size() != 17) {
            throw error(error_code::load_error, "results CSV line " + std::to_string(i + 1) + " has " +
                                                    std::to_string(f.size()) + " fields");
        }
        result_row r;
        try {
            r.config = std::stoull(f[0]);
            r.workflow = f[1];
            r.algo = f[2];
            r.vm_subset = f[3];
            r.p_t = std::stod(f[4]);
            r.dist = f[5];
            r.scen = f[6];
            r.quota = f[7];
            r.repetition = std::stoull(f[8]);
            r.seed = std::stoull(f[9]);
            r.status = f[10];
            r.hits_percent = std::stod(f[11]);
            r.admissible = f[12] == "true";
            r.mean_cost = std::stod(f[13]);
            r.mean_makespan = std::stod(f[14]);
            r.algo_runtime_seconds = std::stod(f[15]);
            r.solution = f[16];
        } catch (std::logic_error const &) {
            throw error(error_code::load_error, "results CSV line " + std::to_string(i + 1) + " is malformed");
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

nlohmann::json fronts_json(std::vector<result_row> const & rows) {
    nlohmann::json out = nlohmann::json::array();
    for (auto const & r : rows) {
        if (r.algo != to_string(algorithm::m_eposs)) continue;
        nlohmann::json pts = nlohmann::json::array();
        for (auto const & p : r.front) {
            pts.push_back({{"makespan", p.makespan}, {"cost", p.cost}, {"alpha", p.alpha}});
        }
        out.push_back({{"config", r.config},
                       {"repetition", r.repetition},
                       {"workflow", r.workflow},
                       {"vm_subset", r.vm_subset},
                       {"p_t", r.p_t},
                       {"distribution", r.dist},
                       {"scenario", r.scen},
                       {"quota", r.quota},
                       {"points", pts}});
    }
    return out;
}

nlohmann::json summary_json(std::vector<result_row> const & rows) {
    struct acc {
        result_row const * first = nullptr;
        std::size_t runs = 0, admissible = 0, solved = 0;
        double cost_admissible = 0.0, cost_solved = 0.0, runtime = 0.0;
    };
    std::map<std::size_t, acc> groups;
    for (auto const & r : rows) {
        auto & g = groups[r.config];
        if (!g.first) g.first = &r;
        ++g.runs;
        g.runtime += r.algo_runtime_seconds;
        if (!r.solution.empty()) {
            ++g.solved;
            g.cost_solved += r.mean_cost;
        }
        if (r.admissible) {
            ++g.admissible;
            g.cost_admissible += r.mean_cost;
        }
    }
    nlohmann::json out = nlohmann::json::array();
    for (auto const & [config, g] : groups) {
        auto const & r = *g.first;
        nlohmann::json e{{"config", config},
                         {"workflow", r.workflow},
                         {"algorithm", r.algo},
                         {"vm_subset", r.vm_subset},
                         {"p_t", r.p_t},
                         {"distribution", r.dist},
                         {"scenario", r.scen},
                         {"quota", r.quota},
                         {"runs", g.runs},
                         {"admissible", g.admissible},
                         {"feasible_percent", round_to(100.0 * g.admissible / g.runs, 1)},
                         {"mean_runtime_seconds", g.runtime / g.runs}};
        e["mean_cost"] = g.admissible ? nlohmann::json(round_to(g.cost_admissible / g.admissible, 2)) : nullptr;
        e["mean_cost_all"] = g.solved ? nlohmann::json(round_to(g.cost_solved / g.solved, 2)) : nullptr;
        out.push_back(std::move(e));
    }
    return out;
}

void report(std::vector<result_row> const & rows, std::string const & out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw error(error_code::io_error, "cannot create '" + out_dir + "': " + ec.message());
    }
    auto write = [&](char const * name, std::string const & text) {
        auto const path = (fs::path(out_dir) / name).string();
        std::ofstream out(path, std::ios::binary);
        out << text;
        if (!out) {
            throw error(error_code::io_error, "cannot write '" + path + "'");
        }
    };
    write("results.csv", results_csv(rows));
    write("fronts.json", fronts_json(rows).dump(2) + "\n");
    write("summary.json", summary_json(rows).dump(2) + "\n");
}

} // namespace eposs
