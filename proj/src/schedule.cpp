#include <eposs/schedule.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <eposs/error.hpp>

namespace eposs {

namespace {
constexpr task_index npos = std::numeric_limits<task_index>::max();
}

std::size_t schedule::task_count() const {
    std::size_t n = 0;
    for (auto const & vm : instances) {
        n += vm.tasks.size();
    }
    return n;
}

bool operator==(vm_instance const & a, vm_instance const & b) {
    return a.type == b.type && a.tasks == b.tasks;
}

bool operator==(schedule const & a, schedule const & b) {
    return a.instances == b.instances;
}

schedule_plan::schedule_plan(schedule const & s, workflow const & wf, vm_catalog const & catalog,
                             bool require_complete)
    : instance_of_(wf.size(), -1), queue_prev_(wf.size(), npos), in_(wf.size()) {
    for (std::size_t i = 0; i < s.instances.size(); ++i) {
        auto const & vm = s.instances[i];
        if (vm.type >= catalog.size()) {
            throw error(error_code::invalid_schedule, "instance " + std::to_string(i) + " has unknown type index");
        }
        instance_types_.push_back(vm.type);
        price_per_second_.push_back(catalog.at(vm.type).price_per_hour / 3600.0);
        first_task_.push_back(vm.tasks.empty() ? npos : vm.tasks.front());
        last_task_.push_back(vm.tasks.empty() ? npos : vm.tasks.back());
        task_index prev = npos;
        for (auto v : vm.tasks) {
            if (v >= wf.size()) {
                throw error(error_code::invalid_schedule, "task index out of range");
            }
            if (instance_of_[v] != -1) {
                throw error(error_code::invalid_schedule, "task '" + wf.at(v).id + "' is placed twice");
            }
            instance_of_[v] = static_cast<int>(i);
            queue_prev_[v] = prev;
            prev = v;
            ++task_total_;
        }
    }
    if (require_complete && task_total_ != wf.size()) {
        throw error(error_code::incomplete_schedule, std::to_string(wf.size() - task_total_) + " task(s) unplaced");
    }

    std::vector<std::size_t> indegree(wf.size(), 0);
    std::vector<std::vector<task_index>> next(wf.size());
    for (task_index v = 0; v < wf.size(); ++v) {
        if (instance_of_[v] < 0) {
            continue;
        }
        auto const & dst = catalog.at(type_of(v));
        for (auto u : wf.predecessors(v)) {
            if (instance_of_[u] < 0) {
                throw error(error_code::unscheduled_predecessor,
                            "task '" + wf.at(v).id + "' is scheduled before its predecessor '" + wf.at(u).id + "'");
            }
            double const delay =
                transfer_time(wf.at(u), catalog.at(type_of(u)), dst, instance_of_[u] == instance_of_[v]);
            in_[v].push_back({u, delay});
            next[u].push_back(v);
            ++indegree[v];
        }
        if (queue_prev_[v] != npos) {
            next[queue_prev_[v]].push_back(v);
            ++indegree[v];
        }
    }

    std::vector<task_index> ready;
    for (task_index v = wf.size(); v-- > 0;) {
        if (instance_of_[v] >= 0 && indegree[v] == 0) {
            ready.push_back(v);
        }
    }
    while (!ready.empty()) {
        auto const v = ready.back();
        ready.pop_back();
        order_.push_back(v);
        for (auto u : next[v]) {
            if (--indegree[u] == 0) {
                ready.push_back(u);
            }
        }
    }
    if (order_.size() != task_total_) {
        throw error(error_code::invalid_schedule, "VM task order contradicts the workflow dependencies");
    }
}

type_index schedule_plan::type_of(task_index v) const {
    return instance_types_.at(static_cast<std::size_t>(instance_of_.at(v)));
}

schedule_plan::outcome schedule_plan::run(std::span<double const> duration) const {
    std::vector<double> eft(instance_of_.size(), 0.0);
    std::vector<double> est_first(instance_types_.size(), 0.0);
    outcome out;
    for (auto v : order_) {
        double start = queue_prev_[v] == npos ? 0.0 : eft[queue_prev_[v]];
        for (auto const & [u, delay] : in_[v]) {
            start = std::max(start, eft[u] + delay);
        }
        eft[v] = start + duration[v];
        out.makespan = std::max(out.makespan, eft[v]);
        if (queue_prev_[v] == npos) {
            est_first[static_cast<std::size_t>(instance_of_[v])] = start;
        }
    }
    for (std::size_t i = 0; i < instance_types_.size(); ++i) {
        if (last_task_[i] != npos) {
            out.cost += (eft[last_task_[i]] - est_first[i]) * price_per_second_[i];
        }
    }
    return out;
}

timeline schedule_plan::full(std::span<double const> duration) const {
    double const nan = std::numeric_limits<double>::quiet_NaN();
    timeline tl;
    tl.est.assign(instance_of_.size(), nan);
    tl.eft.assign(instance_of_.size(), nan);
    for (auto v : order_) {
        double start = queue_prev_[v] == npos ? 0.0 : tl.eft[queue_prev_[v]];
        for (auto const & [u, delay] : in_[v]) {
            start = std::max(start, tl.eft[u] + delay);
        }
        tl.est[v] = start;
        tl.eft[v] = start + duration[v];
        tl.makespan = std::max(tl.makespan, tl.eft[v]);
    }
    tl.vm_start.assign(instance_types_.size(), 0.0);
    tl.vm_stop.assign(instance_types_.size(), 0.0);
    for (std::size_t i = 0; i < instance_types_.size(); ++i) {
        if (first_task_[i] != npos) {
            tl.vm_start[i] = tl.est[first_task_[i]];
            tl.vm_stop[i] = tl.eft[last_task_[i]];
        }
    }
    return tl;
}

timeline compute_timeline(schedule const & s, workflow const & wf, time_matrix const & times,
                          vm_catalog const & catalog) {
    schedule_plan const plan(s, wf, catalog);
    std::vector<double> duration(wf.size(), 0.0);
    for (auto v : plan.order()) {
        duration[v] = times(v, plan.type_of(v));
    }
    return plan.full(duration);
}

double expected_cost(schedule const & s, timeline const & tl, vm_catalog const & catalog) {
    double cost = 0.0;
    for (std::size_t i = 0; i < s.instances.size(); ++i) {
        if (s.instances[i].tasks.empty()) {
            continue;
        }
        cost += (tl.vm_stop.at(i) - tl.vm_start.at(i)) * catalog.at(s.instances[i].type).price_per_hour / 3600.0;
    }
    return cost;
}

bool quotas_respected(schedule const & s, vm_catalog const & catalog, timeline const & tl) {
    auto const & limits = catalog.limits();
    if (limits.unlimited()) {
        return true;
    }
    struct event {
        double time;
        int delta;
        type_index type;
    };
    std::vector<event> events;
    for (std::size_t i = 0; i < s.instances.size(); ++i) {
        if (s.instances[i].tasks.empty()) {
            continue;
        }
        events.push_back({tl.vm_start.at(i), +1, s.instances[i].type});
        events.push_back({tl.vm_stop.at(i), -1, s.instances[i].type});
    }
    std::stable_sort(events.begin(), events.end(), [](event const & a, event const & b) {
        if (a.time != b.time) {
            return a.time < b.time;
        }
        return a.delta < b.delta;
    });
    double total = 0.0;
    std::vector<int> per_type(catalog.size(), 0);
    double const cap = limits.total.value_or(std::numeric_limits<double>::infinity());
    for (auto const & e : events) {
        double const weight = limits.unit == quota_unit::vcpus ? catalog.at(e.type).vcpus : 1.0;
        total += e.delta * weight;
        per_type[e.type] += e.delta;
        if (total > cap || per_type[e.type] > catalog.type_limit(e.type)) {
            return false;
        }
    }
    return true;
}

bool feasible(schedule const & s, double deadline, vm_catalog const & catalog, timeline const & tl) {
    if (tl.makespan > deadline) {
        return false;
    }
    return quotas_respected(s, catalog, tl);
}

nlohmann::json to_json(schedule const & s, workflow const & wf, vm_catalog const & catalog) {
    nlohmann::json out = nlohmann::json::array();
    for (auto const & vm : s.instances) {
        nlohmann::json ids = nlohmann::json::array();
        for (auto v : vm.tasks) {
            ids.push_back(wf.at(v).id);
        }
        out.push_back({{"type", catalog.at(vm.type).name}, {"tasks", ids}});
    }
    return out;
}

schedule schedule_from_json(nlohmann::json const & j, workflow const & wf, vm_catalog const & catalog) {
    schedule s;
    try {
        nlohmann::json const & list = j.is_object() && j.contains("schedule") ? j.at("schedule") : j;
        for (auto const & entry : list) {
            vm_instance vm;
            vm.type = catalog.index_of(entry.at("type").get<std::string>());
            for (auto const & id : entry.at("tasks")) {
                vm.tasks.push_back(wf.index_of(id.get<std::string>()));
            }
            s.instances.push_back(std::move(vm));
        }
    } catch (nlohmann::json::exception const & ex) {
        throw error(error_code::load_error, std::string("malformed schedule JSON: ") + ex.what());
    }
    return s;
}

schedule load_schedule(std::string const & path, workflow const & wf, vm_catalog const & catalog) {
    std::ifstream in(path);
    if (!in) {
        throw error(error_code::load_error, "cannot open schedule '" + path + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (nlohmann::json::exception const & ex) {
        throw error(error_code::load_error, "'" + path + "': " + ex.what());
    }
    return schedule_from_json(j, wf, catalog);
}

} // namespace eposs
