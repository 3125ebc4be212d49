#include <doctest.h>

#include <limits>
#include <random>

#include <eposs/error.hpp>
#include <eposs/schedulers.hpp>

#include "support.hpp"

using namespace eposs;

namespace {

struct scored {
    double makespan;
    double cost;
};

scored score(schedule const & s, workflow const & wf, time_matrix const & t, vm_catalog const & cat) {
    auto const tl = compute_timeline(s, wf, t, cat);
    return {tl.makespan, expected_cost(s, tl, cat)};
}

std::vector<std::size_t> pick(std::vector<objectives> const & pts, std::size_t k) {
    return crowding_select(std::span<objectives const>(pts), k);
}

} // namespace

TEST_CASE("crowding select keeps everything when small") {
    std::vector<objectives> pts{{1, 5}, {2, 3}, {4, 1}};
    CHECK(pick(pts, 3) == std::vector<std::size_t>{0, 1, 2});
    CHECK(pick(pts, 10) == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("crowding select keeps collinear extremes") {
    std::vector<objectives> pts{{1, 3}, {2, 2}, {3, 1}};
    CHECK(pick(pts, 2) == std::vector<std::size_t>{0, 2});
}

TEST_CASE("crowding distance by hand on five points") {
    std::vector<objectives> pts{{2, 5}, {0, 10}, {6, 1}, {10, 0}, {1, 6}};
    auto const d = crowding_distance(pts);
    CHECK(std::isinf(d[1]));
    CHECK(std::isinf(d[3]));
    CHECK(d[4] == doctest::Approx(0.7));
    CHECK(d[0] == doctest::Approx(1.0));
    CHECK(d[2] == doctest::Approx(1.3));
    CHECK(pick(pts, 3) == std::vector<std::size_t>{1, 2, 3});
}

TEST_CASE("crowding distance with a degenerate objective") {
    std::vector<objectives> pts{{1, 2}, {2, 2}, {4, 2}};
    auto const d = crowding_distance(pts);
    CHECK(std::isinf(d[0]));
    CHECK(std::isinf(d[2]));
    CHECK(d[1] == doctest::Approx(1.0));
}

TEST_CASE("heft examples") {
    auto const cat = support::two_types();
    workflow one({{"t", 100, 0}}, {});
    exec_time_model const m(one, cat, distribution::deterministic);
    auto const s = heft(one, cat, m.mean_times());
    REQUIRE(s.instances.size() == 1);
    CHECK(cat.at(s.instances[0].type).name == "fast");

    vm_catalog const single({{"only", "x", 1, 10.0, 0.1}}, {{"x", 1.0}}, {0.0, 0.0});
    workflow chain({{"a", 10, 50}, {"b", 10, 50}}, {{"a", "b"}});
    exec_time_model const mc(chain, single, distribution::deterministic);
    auto const c = heft(chain, single, mc.mean_times());
    REQUIRE(c.instances.size() == 1);
    CHECK(c.instances[0].tasks.size() == 2);

    workflow empty;
    exec_time_model const me(empty, cat, distribution::deterministic);
    CHECK(heft(empty, cat, me.mean_times()).empty());
}

TEST_CASE("greedy cost examples") {
    auto const cat = support::two_types();
    workflow one({{"t", 100, 0}}, {});
    exec_time_model const m(one, cat, distribution::deterministic);
    auto const s = greedy_cost(one, cat, m.mean_times());
    REQUIRE(s.instances.size() == 1);
    CHECK(cat.at(s.instances[0].type).name == "slow");

    workflow many({{"a", 10, 0}, {"b", 20, 0}, {"c", 30, 0}, {"d", 40, 0}}, {});
    exec_time_model const mm(many, cat, distribution::deterministic);
    auto const g = greedy_cost(many, cat, mm.mean_times());
    // a fresh slow VM costs the same as appending to one, so the finish-time tie-break spreads them
    for (auto const & vm : g.instances) CHECK(cat.at(vm.type).name == "slow");
    CHECK(score(g, many, mm.mean_times(), cat).cost == doctest::Approx(100.0 / 3600.0 * 0.10));

    workflow empty;
    exec_time_model const me(empty, cat, distribution::deterministic);
    CHECK(greedy_cost(empty, cat, me.mean_times()).empty());
}

TEST_CASE("heft is no slower than greedy cost") {
    auto const cat = builtin_ec2_catalog().subset(named_subset("theta5"));
    std::size_t worse = 0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        auto const wf = support::random_dag(25, seed);
        exec_time_model const m(wf, cat, distribution::gamma);
        auto const h = score(heft(wf, cat, m.mean_times()), wf, m.mean_times(), cat);
        auto const g = score(greedy_cost(wf, cat, m.mean_times()), wf, m.mean_times(), cat);
        CHECK(h.makespan <= g.makespan);
        if (g.cost > h.cost) ++worse;
    }
    CHECK(worse == 0);
}

TEST_CASE("moheft with K=1 returns one schedule") {
    auto const cat = support::two_types();
    auto const wf = support::random_dag(8, 3);
    exec_time_model const m(wf, cat, distribution::deterministic);
    moheft_options opts;
    opts.k = 1;
    CHECK(moheft(wf, cat, m.mean_times(), opts).size() == 1);
}

TEST_CASE("moheft on a two-task chain reaches both enumerated extremes") {
    auto const cat = support::two_types();
    workflow wf({{"a", 40, 20}, {"b", 30, 0}}, {{"a", "b"}});
    exec_time_model const m(wf, cat, distribution::deterministic);
    double best_t = std::numeric_limits<double>::infinity();
    double best_c = best_t;
    support::for_each_schedule(wf, 2, 2, [&](schedule const & s) {
        auto const sc = score(s, wf, m.mean_times(), cat);
        best_t = std::min(best_t, sc.makespan);
        best_c = std::min(best_c, sc.cost);
    });
    auto const set = moheft(wf, cat, m.mean_times(), {});
    double mt = std::numeric_limits<double>::infinity();
    double mc = mt;
    for (auto const & c : set) {
        auto const sc = score(c.plan, wf, m.mean_times(), cat);
        CHECK(sc.makespan == doctest::Approx(c.makespan));
        CHECK(sc.cost == doctest::Approx(c.cost));
        mt = std::min(mt, c.makespan);
        mc = std::min(mc, c.cost);
    }
    CHECK(mt == doctest::Approx(best_t));
    CHECK(mc == doctest::Approx(best_c));
}

TEST_CASE("moheft with deadline 0 has no feasible solution") {
    auto const cat = support::two_types();
    auto const wf = support::random_dag(6, 1);
    exec_time_model const m(wf, cat, distribution::deterministic);
    moheft_options opts;
    opts.deadline = 0.0;
    try {
        moheft(wf, cat, m.mean_times(), opts);
        FAIL("expected NoFeasibleSolution");
    } catch (no_feasible_solution const & e) {
        CHECK(e.code() == error_code::no_feasible_solution);
        CHECK(e.rank_position() == 0);
    }
}

TEST_CASE("moheft of an empty workflow") {
    auto const cat = support::two_types();
    workflow wf;
    exec_time_model const m(wf, cat, distribution::deterministic);
    auto const set = moheft(wf, cat, m.mean_times(), {});
    REQUIRE(set.size() == 1);
    CHECK(set[0].plan.empty());
}

TEST_CASE("constrained moheft outputs pass feasible") {
    auto const base = builtin_ec2_catalog().subset(named_subset("theta8"));
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        auto const wf = support::random_dag(20, seed);
        auto const cat = base.with_quotas({24.0, quota_unit::vcpus, {{"m5.large", 2}}});
        exec_time_model const m(wf, cat, distribution::gamma);
        auto const h = compute_timeline(heft(wf, cat, m.mean_times()), wf, m.mean_times(), cat);
        moheft_options opts;
        opts.deadline = h.makespan * 1.5;
        opts.enforce_quotas = true;
        try {
            auto const set = moheft(wf, cat, m.mean_times(), opts);
            CHECK(set.size() <= 10);
            for (auto const & c : set) {
                CHECK(c.plan.task_count() == wf.size());
                auto const tl = compute_timeline(c.plan, wf, m.mean_times(), cat);
                CHECK(feasible(c.plan, *opts.deadline, cat, tl));
                CHECK(support::overlap_quota_ok(c.plan, cat, tl));
            }
        } catch (no_feasible_solution const &) {
        }
    }
}

TEST_CASE("no enumerated schedule dominates every moheft output") {
    auto const cat = support::two_types();
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        auto const wf = support::random_dag(2 + seed % 4, seed);
        exec_time_model const m(wf, cat, distribution::deterministic);
        auto const set = moheft(wf, cat, m.mean_times(), {});
        std::size_t beaten = 0;
        support::for_each_schedule(wf, 2, 3, [&](schedule const & s) {
            auto const sc = score(s, wf, m.mean_times(), cat);
            bool all = true;
            for (auto const & c : set) {
                if (!(sc.makespan < c.makespan - 1e-9 && sc.cost < c.cost - 1e-12)) all = false;
            }
            if (all) ++beaten;
        });
        CHECK(beaten == 0);
    }
}

TEST_CASE("least cost picks the cheapest") {
    candidate_set set(3);
    set[0].cost = 2;
    set[0].makespan = 1;
    set[1].cost = 1;
    set[1].makespan = 5;
    set[2].cost = 1;
    set[2].makespan = 4;
    CHECK(&least_cost(set) == &set[2]);
}

TEST_CASE("moheft is deterministic") {
    auto const cat = builtin_ec2_catalog().subset(named_subset("theta5"));
    auto const wf = support::random_dag(30, 8);
    exec_time_model const m(wf, cat, distribution::gamma);
    auto const a = moheft(wf, cat, m.mean_times(), {});
    auto const b = moheft(wf, cat, m.mean_times(), {});
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].plan == b[i].plan);
}
