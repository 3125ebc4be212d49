#include <eposs/search.hpp>

#include <atomic>
#include <future>
#include <thread>

#include <eposs/error.hpp>

namespace eposs {

void search_config::check(bool parallel) const {
    if (!(epsilon > 0.0 && epsilon <= 0.5)) {
        throw error(error_code::config_error, "epsilon must lie in (0, 0.5]");
    }
    if (!(p_t > 0.0 && p_t <= 1.0)) {
        throw error(error_code::config_error, "p_t must lie in (0, 1]");
    }
    if (k < 1) {
        throw error(error_code::config_error, "K must be >= 1");
    }
    if (!(deadline >= 0.0)) {
        throw error(error_code::config_error, "deadline must be nonnegative");
    }
    if (parallel && parallelism < 2) {
        throw error(error_code::config_error, "parallel search needs P >= 2");
    }
    if (budget && !(p_c > 0.0 && p_c <= 1.0)) {
        throw error(error_code::config_error, "p_c must lie in (0, 1]");
    }
}

std::size_t eposs_step_count(double epsilon) {
    double width = 1.0;
    std::size_t steps = 0;
    do {
        width /= 2.0;
        ++steps;
    } while (width > epsilon);
    return steps;
}

std::size_t p_eposs_round_count(std::size_t parallelism, double epsilon) {
    double width = 1.0;
    std::size_t rounds = 0;
    do {
        width /= static_cast<double>(parallelism);
        ++rounds;
    } while (width > epsilon);
    return rounds;
}

std::vector<double> quantile_grid(double epsilon) {
    std::vector<double> grid;
    for (std::size_t k = 1;; ++k) {
        double const alpha = static_cast<double>(k) * epsilon;
        if (!(alpha < 1.0 - 1e-12)) {
            break;
        }
        grid.push_back(alpha);
    }
    return grid;
}

namespace {

struct probe_result {
    search_step step;
    std::optional<schedule> plan;
    std::optional<eval_report> report;
};

class prober {
public:
    prober(workflow const & wf, vm_catalog const & catalog, exec_time_model const & model, search_config const & cfg)
        : wf_(wf), catalog_(catalog), model_(model), cfg_(cfg) {}

    std::optional<candidate_set> schedules_at(double alpha) const {
        moheft_options opts;
        opts.k = cfg_.k;
        opts.deadline = cfg_.deadline;
        opts.enforce_quotas = cfg_.enforce_quotas;
        opts.give_up_at = cfg_.give_up_at;
        try {
            return moheft(wf_, catalog_, model_.quantile_times(alpha), opts);
        } catch (no_feasible_solution const &) {
            return std::nullopt;
        }
    }

    eval_report simulate(schedule const & s, std::uint64_t seed) const {
        return evaluate(s, wf_, model_, catalog_, cfg_.deadline, cfg_.budget, seed, cfg_.eval);
    }

    // Cheapest MOHEFT solution at alpha and its simulated performance.
    probe_result probe(double alpha, std::uint64_t seed) const {
        probe_result out;
        out.step.alpha = alpha;
        auto const set = schedules_at(alpha);
        if (!set) {
            return out;
        }
        auto const & cheapest = least_cost(*set);
        auto const rep = simulate(cheapest.plan, seed_for_alpha(seed, alpha));
        out.step.scheduled = true;
        out.step.p_hit = rep.p_hit_deadline;
        out.step.mean_cost = rep.mean_cost;
        out.step.mean_makespan = rep.mean_makespan;
        out.step.feasible = rep.p_hit_deadline >= cfg_.p_t;
        out.plan = cheapest.plan;
        out.report = rep;
        return out;
    }

private:
    workflow const & wf_;
    vm_catalog const & catalog_;
    exec_time_model const & model_;
    search_config const & cfg_;
};

void promote(search_result & result, probe_result && p) {
    if (p.step.feasible && p.report->mean_cost < result.best_cost) {
        result.best_cost = p.report->mean_cost;
        result.best_report = p.report;
        result.best_alpha = p.step.alpha;
        result.best = std::move(p.plan);
    }
}

} // namespace

search_result eposs(workflow const & wf, vm_catalog const & catalog, exec_time_model const & model,
                    search_config const & cfg, std::uint64_t seed) {
    cfg.check();
    prober const pr(wf, catalog, model, cfg);
    search_result result;
    double lo = 0.0;
    double hi = 1.0;
    do {
        double const alpha = 0.5 * (lo + hi);
        auto p = pr.probe(alpha, seed);
        ++result.moheft_invocations;
        p.step.round = result.rounds++;
        result.trace.push_back(p.step);
        if (p.step.feasible) {
            hi = alpha;
            promote(result, std::move(p));
        } else {
            lo = alpha;
        }
    } while (hi - lo > cfg.epsilon);
    return result;
}

search_result p_eposs(workflow const & wf, vm_catalog const & catalog, exec_time_model const & model,
                      search_config const & cfg, std::uint64_t seed) {
    cfg.check(true);
    prober const pr(wf, catalog, model, cfg);
    std::size_t const workers = cfg.parallelism;
    search_result result;
    double lo = 0.0;
    double width = 1.0;
    do {
        double const part = width / static_cast<double>(workers);
        std::vector<std::future<probe_result>> jobs;
        jobs.reserve(workers);
        for (std::size_t i = 0; i < workers; ++i) {
            double const alpha = lo + (static_cast<double>(i) + 0.5) * part;
            jobs.push_back(std::async(std::launch::async, [&pr, alpha, seed] { return pr.probe(alpha, seed); }));
        }
        std::vector<probe_result> probes;
        probes.reserve(workers);
        for (auto & j : jobs) {
            probes.push_back(j.get());
        }
        result.moheft_invocations += workers;

        std::optional<std::size_t> chosen;
        for (std::size_t i = 0; i < workers; ++i) {
            auto const & s = probes[i].step;
            if (s.feasible && (!chosen || s.mean_cost < probes[*chosen].step.mean_cost)) {
                chosen = i;
            }
        }
        std::size_t const next = chosen.value_or(workers - 1);
        for (auto & p : probes) {
            p.step.round = result.rounds;
            result.trace.push_back(p.step);
        }
        if (chosen) {
            promote(result, std::move(probes[*chosen]));
        }
        ++result.rounds;
        lo += static_cast<double>(next) * part;
        width = part;
    } while (width > cfg.epsilon);
    return result;
}

m_eposs_result m_eposs(workflow const & wf, vm_catalog const & catalog, exec_time_model const & model,
                       search_config const & cfg, std::uint64_t seed) {
    cfg.check();
    prober const pr(wf, catalog, model, cfg);
    auto const grid = quantile_grid(cfg.epsilon);

    struct per_alpha {
        std::vector<front_point> admitted;
        std::vector<search_step> steps;
    };
    std::vector<per_alpha> slots(grid.size());

    auto work = [&](std::size_t g) {
        double const alpha = grid[g];
        auto & slot = slots[g];
        auto const set = pr.schedules_at(alpha);
        if (!set) {
            slot.steps.push_back(search_step{g, alpha});
            return;
        }
        std::uint64_t const base = seed_for_alpha(seed, alpha);
        for (std::size_t m = 0; m < set->size(); ++m) {
            auto const & c = (*set)[m];
            auto const rep = pr.simulate(c.plan, mix_seed(base, m));
            bool const ok = rep.p_hit_deadline >= cfg.p_t && (!cfg.budget || rep.p_hit_budget >= cfg.p_c);
            slot.steps.push_back({g, alpha, true, ok, rep.p_hit_deadline, rep.mean_cost, rep.mean_makespan});
            if (ok) {
                slot.admitted.push_back(
                    {c.plan, rep.mean_makespan, rep.mean_cost, alpha, rep.p_hit_deadline, rep.p_hit_budget});
            }
        }
    };

    std::size_t const workers = std::max<std::size_t>(1, std::min(cfg.parallelism, grid.size()));
    if (workers == 1) {
        for (std::size_t g = 0; g < grid.size(); ++g) {
            work(g);
        }
    } else {
        std::atomic<std::size_t> cursor{0};
        std::vector<std::future<void>> jobs;
        for (std::size_t w = 0; w < workers; ++w) {
            jobs.push_back(std::async(std::launch::async, [&] {
                for (std::size_t g = cursor++; g < grid.size(); g = cursor++) {
                    work(g);
                }
            }));
        }
        for (auto & j : jobs) {
            j.get();
        }
    }

    m_eposs_result out;
    out.grid_points = grid.size();
    std::vector<front_point> candidates;
    for (auto & slot : slots) {
        out.trace.insert(out.trace.end(), slot.steps.begin(), slot.steps.end());
        for (auto & p : slot.admitted) {
            candidates.push_back(std::move(p));
        }
    }
    out.front = non_dominated(std::move(candidates));
    return out;
}

namespace {

nlohmann::json steps_json(std::vector<search_step> const & trace) {
    nlohmann::json out = nlohmann::json::array();
    for (auto const & s : trace) {
        out.push_back({{"round", s.round},
                       {"alpha", s.alpha},
                       {"scheduled", s.scheduled},
                       {"feasible", s.feasible},
                       {"p_hit", s.p_hit},
                       {"mean_cost", s.mean_cost},
                       {"mean_makespan", s.mean_makespan}});
    }
    return out;
}

} // namespace

nlohmann::json to_json(search_result const & r, workflow const & wf, vm_catalog const & catalog) {
    nlohmann::json out{{"trace", steps_json(r.trace)},
                       {"moheft_invocations", r.moheft_invocations},
                       {"rounds", r.rounds}};
    if (r.best) {
        out["best"] = to_json(*r.best, wf, catalog);
        out["best_cost"] = r.best_cost;
        out["best_alpha"] = r.best_alpha;
        out["best_p_hit"] = r.best_report->p_hit_deadline;
        out["best_mean_makespan"] = r.best_report->mean_makespan;
    } else {
        out["best"] = nullptr;
    }
    return out;
}

nlohmann::json to_json(pareto_front const & f, workflow const & wf, vm_catalog const & catalog) {
    nlohmann::json out = nlohmann::json::array();
    for (auto const & p : f) {
        out.push_back({{"makespan", p.makespan},
                       {"cost", p.cost},
                       {"alpha", p.alpha},
                       {"p_hit_deadline", p.p_hit_deadline},
                       {"p_hit_budget", p.p_hit_budget},
                       {"schedule", to_json(p.plan, wf, catalog)}});
    }
    return out;
}

} // namespace eposs
