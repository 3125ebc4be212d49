#include <eposs/schedulers.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <eposs/error.hpp>

namespace eposs {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// Partial solution grown by appending ranked tasks to the end of VM queues.
struct partial_state {
    struct vm {
        type_index type = 0;
        double start = 0.0;
        double stop = 0.0;
        std::vector<task_index> tasks;
    };

    std::vector<int> vm_of; // -1 when unscheduled
    std::vector<double> eft;
    std::vector<vm> vms;
    double makespan = 0.0;
    double cost = 0.0;

    explicit partial_state(std::size_t tasks) : vm_of(tasks, -1), eft(tasks, 0.0) {}
};

struct placement {
    int vm = -1; // existing instance, or -1 for a fresh one
    type_index type = 0;
    double est = 0.0;
    double eft = 0.0;
    double makespan = 0.0;
    double cost = 0.0;
};

class placer {
public:
    placer(workflow const & wf, vm_catalog const & catalog, time_matrix const & times)
        : wf_(wf), catalog_(catalog), times_(times) {}

    placement place(partial_state const & s, task_index v, int target, type_index type) const {
        placement p;
        p.vm = target;
        p.type = type;
        auto const & dst = catalog_.at(type);
        double ready = target >= 0 ? s.vms[static_cast<std::size_t>(target)].stop : 0.0;
        for (auto u : wf_.predecessors(v)) {
            int const src = s.vm_of[u];
            if (src < 0) {
                throw error(error_code::unscheduled_predecessor,
                            "task '" + wf_.at(v).id + "' ranked before predecessor '" + wf_.at(u).id + "'");
            }
            auto const & src_type = catalog_.at(s.vms[static_cast<std::size_t>(src)].type);
            ready = std::max(ready, s.eft[u] + transfer_time(wf_.at(u), src_type, dst, src == target));
        }
        p.est = ready;
        p.eft = ready + times_(v, type);
        p.makespan = std::max(s.makespan, p.eft);
        double const price = dst.price_per_hour / 3600.0;
        if (target >= 0) {
            auto const & vm = s.vms[static_cast<std::size_t>(target)];
            p.cost = s.cost + (p.eft - vm.stop) * price;
        } else {
            p.cost = s.cost + (p.eft - p.est) * price;
        }
        return p;
    }

    bool quotas_ok(partial_state const & s, placement const & p) const {
        auto const & limits = catalog_.limits();
        if (limits.unlimited()) {
            return true;
        }
        struct event {
            double time;
            int delta;
            type_index type;
        };
        std::vector<event> events;
        events.reserve(2 * s.vms.size() + 2);
        for (std::size_t i = 0; i < s.vms.size(); ++i) {
            auto const & vm = s.vms[i];
            double const stop = static_cast<int>(i) == p.vm ? p.eft : vm.stop;
            events.push_back({vm.start, +1, vm.type});
            events.push_back({stop, -1, vm.type});
        }
        if (p.vm < 0) {
            events.push_back({p.est, +1, p.type});
            events.push_back({p.eft, -1, p.type});
        }
        std::sort(events.begin(), events.end(), [](event const & a, event const & b) {
            if (a.time != b.time) {
                return a.time < b.time;
            }
            return a.delta < b.delta;
        });
        double total = 0.0;
        per_type_.assign(catalog_.size(), 0);
        double const cap = limits.total.value_or(inf);
        for (auto const & e : events) {
            total += e.delta * (limits.unit == quota_unit::vcpus ? catalog_.at(e.type).vcpus : 1.0);
            per_type_[e.type] += e.delta;
            if (total > cap || per_type_[e.type] > catalog_.type_limit(e.type)) {
                return false;
            }
        }
        return true;
    }

    static void apply(partial_state & s, task_index v, placement const & p) {
        int vm_index = p.vm;
        if (vm_index < 0) {
            vm_index = static_cast<int>(s.vms.size());
            s.vms.push_back({p.type, p.est, p.eft, {}});
        }
        auto & vm = s.vms[static_cast<std::size_t>(vm_index)];
        vm.stop = p.eft;
        vm.tasks.push_back(v);
        s.vm_of[v] = vm_index;
        s.eft[v] = p.eft;
        s.makespan = p.makespan;
        s.cost = p.cost;
    }

private:
    workflow const & wf_;
    vm_catalog const & catalog_;
    time_matrix const & times_;
    mutable std::vector<int> per_type_;
};

schedule to_schedule(partial_state const & s) {
    schedule out;
    out.instances.reserve(s.vms.size());
    for (auto const & vm : s.vms) {
        out.instances.push_back({vm.type, vm.tasks});
    }
    return out;
}

void check_inputs(workflow const & wf, vm_catalog const & catalog, time_matrix const & times) {
    if (catalog.size() == 0) {
        throw error(error_code::config_error, "the VM catalog is empty");
    }
    if (times.tasks() != wf.size() || times.types() != catalog.size()) {
        throw error(error_code::missing_time, "time matrix does not match workflow x catalog");
    }
}

template <class Better>
schedule greedy_list(workflow const & wf, vm_catalog const & catalog, time_matrix const & times, Better better) {
    check_inputs(wf, catalog, times);
    placer const pl(wf, catalog, times);
    partial_state state(wf.size());
    for (auto v : scheduling_order(wf, catalog, times).order) {
        std::optional<placement> best;
        for (std::size_t i = 0; i < state.vms.size(); ++i) {
            auto const p = pl.place(state, v, static_cast<int>(i), state.vms[i].type);
            if (!best || better(p, *best, state.cost)) {
                best = p;
            }
        }
        for (type_index j = 0; j < catalog.size(); ++j) {
            auto const p = pl.place(state, v, -1, j);
            if (!best || better(p, *best, state.cost)) {
                best = p;
            }
        }
        placer::apply(state, v, *best);
    }
    return to_schedule(state);
}

} // namespace

std::vector<double> crowding_distance(std::span<objectives const> points) {
    std::size_t const n = points.size();
    std::vector<double> distance(n, 0.0);
    if (n == 0) {
        return distance;
    }
    std::vector<std::size_t> idx(n);
    for (int objective = 0; objective < 2; ++objective) {
        auto value = [&](std::size_t i) { return objective == 0 ? points[i].makespan : points[i].cost; };
        auto other = [&](std::size_t i) { return objective == 0 ? points[i].cost : points[i].makespan; };
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            if (value(a) != value(b)) return value(a) < value(b);
            if (other(a) != other(b)) return other(a) < other(b);
            return a < b;
        });
        double const lo = value(idx.front());
        double const hi = value(idx.back());
        if (!(hi > lo)) {
            continue;
        }
        distance[idx.front()] = inf;
        distance[idx.back()] = inf;
        for (std::size_t r = 1; r + 1 < n; ++r) {
            distance[idx[r]] += (value(idx[r + 1]) - value(idx[r - 1])) / (hi - lo);
        }
    }
    return distance;
}

std::vector<std::size_t> crowding_select(std::span<objectives const> points, std::size_t k) {
    std::vector<std::size_t> idx(points.size());
    std::iota(idx.begin(), idx.end(), 0);
    if (points.size() <= k) {
        return idx;
    }
    auto const distance = crowding_distance(points);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (distance[a] != distance[b]) return distance[a] > distance[b];
        if (points[a].cost != points[b].cost) return points[a].cost < points[b].cost;
        if (points[a].makespan != points[b].makespan) return points[a].makespan < points[b].makespan;
        return a < b;
    });
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

candidate_set crowding_select(candidate_set candidates, std::size_t k) {
    std::vector<objectives> points;
    points.reserve(candidates.size());
    for (auto const & c : candidates) {
        points.push_back({c.makespan, c.cost});
    }
    candidate_set out;
    for (auto i : crowding_select(points, k)) {
        out.push_back(std::move(candidates[i]));
    }
    return out;
}

ranked_tasks scheduling_order(workflow const & wf, vm_catalog const & catalog, time_matrix const & times) {
    return b_rank(wf, times.row_means(), catalog.mean_bandwidth());
}

candidate_set moheft(workflow const & wf, vm_catalog const & catalog, time_matrix const & times,
                     moheft_options const & opts) {
    if (opts.k < 1) {
        throw error(error_code::config_error, "MOHEFT needs K >= 1");
    }
    check_inputs(wf, catalog, times);
    placer const pl(wf, catalog, times);
    auto const ranked = scheduling_order(wf, catalog, times);
    double const deadline = opts.deadline.value_or(inf);

    struct extension {
        std::size_t parent;
        placement p;
    };

    std::vector<partial_state> survivors{partial_state(wf.size())};
    std::vector<extension> pool;
    std::vector<objectives> points;
    for (std::size_t pos = 0; pos < ranked.order.size(); ++pos) {
        if (opts.give_up_at && clock::now() > *opts.give_up_at) {
            throw error(error_code::timeout, "MOHEFT exceeded its wall-clock budget");
        }
        task_index const v = ranked.order[pos];
        pool.clear();
        points.clear();
        auto consider = [&](std::size_t parent, placement const & p) {
            if (p.makespan > deadline) {
                return;
            }
            if (opts.enforce_quotas && !pl.quotas_ok(survivors[parent], p)) {
                return;
            }
            pool.push_back({parent, p});
            points.push_back({p.makespan, p.cost});
        };
        for (std::size_t k = 0; k < survivors.size(); ++k) {
            auto const & s = survivors[k];
            for (std::size_t i = 0; i < s.vms.size(); ++i) {
                consider(k, pl.place(s, v, static_cast<int>(i), s.vms[i].type));
            }
            for (type_index j = 0; j < catalog.size(); ++j) {
                consider(k, pl.place(s, v, -1, j));
            }
        }
        if (pool.empty()) {
            throw no_feasible_solution(pos, wf.at(v).id);
        }
        std::vector<partial_state> next;
        auto const keep = crowding_select(points, opts.k);
        next.reserve(keep.size());
        for (auto i : keep) {
            next.push_back(survivors[pool[i].parent]);
            placer::apply(next.back(), v, pool[i].p);
        }
        survivors = std::move(next);
    }

    candidate_set out;
    if (wf.empty()) {
        out.push_back({schedule{}, 0.0, 0.0});
        return out;
    }
    for (auto const & s : survivors) {
        out.push_back({to_schedule(s), s.makespan, s.cost});
    }
    return out;
}

candidate const & least_cost(candidate_set const & set) {
    if (set.empty()) {
        throw error(error_code::no_feasible_solution, "empty candidate set");
    }
    return *std::min_element(set.begin(), set.end(), [](candidate const & a, candidate const & b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        return a.makespan < b.makespan;
    });
}

schedule heft(workflow const & wf, vm_catalog const & catalog, time_matrix const & times) {
    return greedy_list(wf, catalog, times, [](placement const & a, placement const & b, double) {
        if (a.eft != b.eft) return a.eft < b.eft;
        return a.cost < b.cost;
    });
}

schedule greedy_cost(workflow const & wf, vm_catalog const & catalog, time_matrix const & times) {
    return greedy_list(wf, catalog, times, [](placement const & a, placement const & b, double) {
        if (a.cost != b.cost) return a.cost < b.cost;
        return a.eft < b.eft;
    });
}

} // namespace eposs
