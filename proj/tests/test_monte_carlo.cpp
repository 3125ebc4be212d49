#include <doctest.h>

#include <eposs/error.hpp>
#include <eposs/monte_carlo.hpp>
#include <eposs/schedulers.hpp>

#include "support.hpp"

using namespace eposs;

namespace {

vm_catalog unit_catalog() { return vm_catalog({{"u", "x", 1, 100.0, 3.6}}, {{"x", 1.0}}, {0.0, 0.0}); }

struct single {
    workflow wf{{{"t", 1.0, 0.0}}, {}};
    vm_catalog cat = unit_catalog();
    schedule s{{{0, {0}}}};
};

} // namespace

TEST_CASE("deterministic model gives identical runs") {
    auto const cat = support::two_types();
    auto const wf = support::random_dag(15, 4);
    exec_time_model const m(wf, cat, distribution::deterministic);
    auto const s = heft(wf, cat, m.mean_times());
    auto const tl = compute_timeline(s, wf, m.mean_times(), cat);
    auto const rep = evaluate(s, wf, m, cat, tl.makespan, std::nullopt, 1);
    CHECK(rep.p_hit_deadline == 1.0);
    CHECK(rep.runs == 1000);
    CHECK(rep.ci_halfwidth_makespan == 0.0);
    CHECK(rep.mean_makespan == tl.makespan);
    CHECK(rep.mean_cost == doctest::Approx(expected_cost(s, tl, cat)));
    CHECK(evaluate(s, wf, m, cat, tl.makespan * 0.999, std::nullopt, 1).p_hit_deadline == 0.0);
}

TEST_CASE("uniform single task hits its mean half the time") {
    single x;
    x.wf = workflow({{"t", 10.0, 0.0}}, {});
    exec_time_model const m(x.wf, x.cat, distribution::uniform);
    auto const rep = evaluate(x.s, x.wf, m, x.cat, 10.0, std::nullopt, 3, {stop_rule::fixed(10000)});
    CHECK(rep.runs == 10000);
    CHECK(std::abs(rep.p_hit_deadline - 0.5) < 0.02);
}

TEST_CASE("gamma single task hits its median half the time") {
    single x;
    exec_time_model const m(x.wf, x.cat, distribution::gamma);
    auto const rep = evaluate(x.s, x.wf, m, x.cat, std::log(2.0), std::nullopt, 3, {stop_rule::fixed(10000)});
    CHECK(std::abs(rep.p_hit_deadline - 0.5) < 0.02);
    CHECK(std::abs(rep.mean_cost - 0.001 * rep.mean_makespan) < 1e-12);
}

TEST_CASE("budget probability") {
    single x;
    exec_time_model const m(x.wf, x.cat, distribution::gamma);
    // cost = seconds * 0.001 at $3.6/h
    auto const rep = evaluate(x.s, x.wf, m, x.cat, 100.0, 0.001 * std::log(2.0), 5, {stop_rule::fixed(10000)});
    CHECK(std::abs(rep.p_hit_budget - 0.5) < 0.02);
    CHECK(evaluate(x.s, x.wf, m, x.cat, 100.0, std::nullopt, 5).p_hit_budget == 1.0);
}

TEST_CASE("ci95 rule stops on the check grid") {
    auto const cat = support::two_types();
    auto const wf = support::random_dag(10, 6);
    exec_time_model const m(wf, cat, distribution::gamma);
    auto const s = heft(wf, cat, m.mean_times());
    auto const rep = evaluate(s, wf, m, cat, 1e9, std::nullopt, 9);
    CHECK(rep.runs >= 1000);
    CHECK(rep.runs <= 100000);
    CHECK(rep.runs % 100 == 0);
    CHECK(rep.ci_halfwidth_makespan <= 0.02 * rep.mean_makespan);

    stop_rule tight;
    tight.relative_halfwidth = 1e-9;
    tight.max_runs = 3000;
    CHECK(evaluate(s, wf, m, cat, 1e9, std::nullopt, 9, {tight}).runs == 3000);
}

TEST_CASE("evaluation is reproducible and independent of workers") {
    auto const cat = builtin_ec2_catalog().subset(named_subset("theta5"));
    auto const wf = support::random_dag(25, 2);
    for (auto d : {distribution::gamma, distribution::half_normal, distribution::uniform}) {
        exec_time_model const m(wf, cat, d);
        auto const s = heft(wf, cat, m.mean_times());
        double const dl = compute_timeline(s, wf, m.mean_times(), cat).makespan;
        auto const a = evaluate(s, wf, m, cat, dl, 0.01, 42);
        auto const b = evaluate(s, wf, m, cat, dl, 0.01, 42);
        auto const c = evaluate(s, wf, m, cat, dl, 0.01, 42, {stop_rule{}, 3});
        for (auto const & r : {b, c}) {
            CHECK(r.runs == a.runs);
            CHECK(r.p_hit_deadline == a.p_hit_deadline);
            CHECK(r.p_hit_budget == a.p_hit_budget);
            CHECK(r.mean_makespan == a.mean_makespan);
            CHECK(r.mean_cost == a.mean_cost);
        }
        auto const other = evaluate(s, wf, m, cat, dl, 0.01, 43);
        CHECK(other.mean_makespan != a.mean_makespan);
    }
}

TEST_CASE("hit probability is monotone in the deadline") {
    auto const cat = support::two_types();
    auto const wf = support::random_dag(12, 8);
    exec_time_model const m(wf, cat, distribution::gamma);
    auto const s = heft(wf, cat, m.mean_times());
    double const base = compute_timeline(s, wf, m.mean_times(), cat).makespan;
    double prev = 1.0;
    for (double f = 3.0; f > 0.2; f -= 0.2) {
        auto const p = evaluate(s, wf, m, cat, base * f, std::nullopt, 11, {stop_rule::fixed(2000)}).p_hit_deadline;
        CHECK(p <= prev);
        prev = p;
    }
}

TEST_CASE("evaluate rejects incomplete schedules") {
    workflow wf({{"a", 1, 0}, {"b", 1, 0}}, {});
    auto const cat = unit_catalog();
    exec_time_model const m(wf, cat, distribution::gamma);
    try {
        evaluate({{{0, {0}}}}, wf, m, cat, 1.0, std::nullopt, 1);
        FAIL("expected IncompleteSchedule");
    } catch (error const & e) {
        CHECK(e.code() == error_code::incomplete_schedule);
    }
}

TEST_CASE("validation examples") {
    single x;
    exec_time_model const det(x.wf, x.cat, distribution::deterministic);
    auto const v = validate_solution(x.s, x.wf, det, x.cat, 2.0, 1.0, 1);
    CHECK(v.hits_percent == 100.0);
    CHECK(v.admissible);

    exec_time_model const g(x.wf, x.cat, distribution::gamma);
    double const q75 = quantile(distribution::gamma, 1.0, 0.75);
    auto const w = validate_solution(x.s, x.wf, g, x.cat, q75, 0.75, 1);
    CHECK(std::abs(w.hits_percent - 75.0) < 2.0);
    CHECK(w.admissible == (w.hits_percent / 100.0 >= 0.75));

    // just under p_T is rejected
    CHECK_FALSE(validate_solution(x.s, x.wf, g, x.cat, q75, w.hits_percent / 100.0 + 0.002, 1).admissible);
    CHECK(validate_solution(x.s, x.wf, g, x.cat, q75, w.hits_percent / 100.0 - 1e-9, 1).admissible);
}

TEST_CASE("validation is independent of the search stream") {
    single x;
    exec_time_model const g(x.wf, x.cat, distribution::gamma);
    auto const rep = evaluate(x.s, x.wf, g, x.cat, 1.0, std::nullopt, 1, {stop_rule::fixed(validation_runs)});
    auto const v = validate_solution(x.s, x.wf, g, x.cat, 1.0, 0.5, 1);
    CHECK(v.mean_makespan != rep.mean_makespan);
    CHECK(std::abs(v.hits_percent - 100.0 * (1.0 - std::exp(-1.0))) < 2.0);
}

TEST_CASE("seed mixing") {
    CHECK(mix_seed(1, 2) != mix_seed(2, 1));
    CHECK(mix_seed(1, 2) == mix_seed(1, 2));
    CHECK(seed_for_alpha(5, 0.25) != seed_for_alpha(5, 0.5));
    CHECK(seed_for_alpha(5, 0.25) == seed_for_alpha(5, 0.25));
}
