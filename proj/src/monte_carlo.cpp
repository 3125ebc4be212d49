#include <eposs/monte_carlo.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <future>
#include <random>
#include <vector>

#include <eposs/error.hpp>

namespace eposs {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t seed_for_alpha(std::uint64_t seed, double alpha) {
    return mix_seed(seed, std::bit_cast<std::uint64_t>(alpha));
}

namespace {

struct run_record {
    double makespan;
    double cost;
};

class simulator {
public:
    simulator(schedule const & s, workflow const & wf, exec_time_model const & model, vm_catalog const & catalog)
        : plan_(s, wf, catalog, true), model_(model), types_(wf.size()) {
        for (task_index v = 0; v < wf.size(); ++v) {
            types_[v] = plan_.type_of(v);
        }
    }

    void run_range(std::uint64_t seed, std::size_t first, std::size_t last, run_record * out) const {
        std::vector<double> duration(types_.size());
        for (std::size_t r = first; r < last; ++r) {
            std::mt19937_64 rng(mix_seed(seed, r));
            for (task_index v = 0; v < types_.size(); ++v) {
                duration[v] = model_.sample(v, types_[v], rng);
            }
            auto const o = plan_.run(duration);
            out[r - first] = {o.makespan, o.cost};
        }
    }

private:
    schedule_plan plan_;
    exec_time_model const & model_;
    std::vector<type_index> types_;
};

void run_batch(simulator const & sim, std::uint64_t seed, std::size_t first, std::size_t last, std::size_t workers,
               std::vector<run_record> & records) {
    records.resize(last);
    std::size_t const n = last - first;
    if (workers <= 1 || n < 2 * workers) {
        sim.run_range(seed, first, last, records.data() + first);
        return;
    }
    std::vector<std::future<void>> jobs;
    std::size_t const chunk = (n + workers - 1) / workers;
    for (std::size_t lo = first; lo < last; lo += chunk) {
        std::size_t const hi = std::min(last, lo + chunk);
        jobs.push_back(std::async(std::launch::async, [&, lo, hi] { sim.run_range(seed, lo, hi, records.data() + lo); }));
    }
    for (auto & j : jobs) {
        j.get();
    }
}

} // namespace

eval_report evaluate(schedule const & s, workflow const & wf, exec_time_model const & model,
                     vm_catalog const & catalog, double deadline, std::optional<double> budget,
                     std::uint64_t seed, eval_options const & opts) {
    if (wf.size() != model.mean_times().tasks() || catalog.size() != model.mean_times().types()) {
        throw error(error_code::invalid_value, "execution-time model does not match workflow x catalog");
    }
    simulator const sim(s, wf, model, catalog);
    auto const & rule = opts.stop;
    std::vector<run_record> records;

    // running moments, accumulated in run-index order
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    auto absorb = [&](std::size_t upto) {
        for (; n < upto; ++n) {
            double const x = records[n].makespan;
            double const delta = x - mean;
            mean += delta / static_cast<double>(n + 1);
            m2 += delta * (x - mean);
        }
    };
    auto halfwidth = [&] {
        if (n < 2) {
            return 0.0;
        }
        return 1.96 * std::sqrt(m2 / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
    };

    if (rule.mode == stop_rule::kind::fixed) {
        if (rule.runs < 1) {
            throw error(error_code::config_error, "Monte Carlo needs at least one run");
        }
        run_batch(sim, seed, 0, rule.runs, opts.workers, records);
        absorb(rule.runs);
    } else {
        std::size_t const step = std::max<std::size_t>(1, rule.check_every);
        std::size_t const lo = std::max<std::size_t>(1, rule.min_runs);
        std::size_t const hi = std::max(lo, rule.max_runs);
        run_batch(sim, seed, 0, lo, opts.workers, records);
        absorb(lo);
        while (n < hi && halfwidth() > rule.relative_halfwidth * std::abs(mean)) {
            std::size_t const upto = std::min(hi, (n / step + 1) * step);
            run_batch(sim, seed, n, upto, opts.workers, records);
            absorb(upto);
        }
    }

    eval_report rep;
    rep.runs = n;
    rep.mean_makespan = mean;
    rep.ci_halfwidth_makespan = halfwidth();
    std::size_t hit_deadline = 0;
    std::size_t hit_budget = 0;
    double cost_sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        hit_deadline += records[r].makespan <= deadline ? 1 : 0;
        hit_budget += !budget || records[r].cost <= *budget ? 1 : 0;
        cost_sum += records[r].cost;
    }
    rep.p_hit_deadline = static_cast<double>(hit_deadline) / static_cast<double>(n);
    rep.p_hit_budget = static_cast<double>(hit_budget) / static_cast<double>(n);
    rep.mean_cost = cost_sum / static_cast<double>(n);
    return rep;
}

validation validate_solution(schedule const & s, workflow const & wf, exec_time_model const & model,
                             vm_catalog const & catalog, double deadline, double p_t, std::uint64_t seed,
                             std::size_t workers) {
    eval_options opts;
    opts.stop = stop_rule::fixed(validation_runs);
    opts.workers = workers;
    // a stream family disjoint from the ones the search used
    auto const rep = evaluate(s, wf, model, catalog, deadline, std::nullopt, mix_seed(seed, 0x76616c6964ULL), opts);
    validation out;
    out.hits_percent = 100.0 * rep.p_hit_deadline;
    out.mean_cost = rep.mean_cost;
    out.mean_makespan = rep.mean_makespan;
    out.admissible = rep.p_hit_deadline >= p_t;
    return out;
}

} // namespace eposs
