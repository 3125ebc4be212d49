#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <eposs/cloud.hpp>
#include <eposs/dag.hpp>
#include <eposs/schedule.hpp>
#include <eposs/workflow_gen.hpp>

namespace support {

using namespace eposs;

// Two linear-scaling types: "slow" 1 vCPU at $0.10/h, "fast" 4 vCPUs at $0.50/h.
inline vm_catalog two_types(quotas q = {}) {
    return vm_catalog({{"slow", "x", 1, 100.0, 0.10}, {"fast", "x", 4, 100.0, 0.50}}, {{"x", 1.0}}, {0.0, 0.0},
                      std::move(q));
}

inline workflow random_dag(std::size_t n, std::uint64_t seed) {
    gen_spec spec;
    spec.shape = topology::random_layered;
    spec.size = n;
    spec.seed = seed;
    return generate(spec);
}

inline std::vector<double> row(time_matrix const & m, std::vector<type_index> const & types_of) {
    std::vector<double> d(types_of.size());
    for (std::size_t v = 0; v < d.size(); ++v) d[v] = m(v, types_of[v]);
    return d;
}

// Every topological order of the workflow.
inline std::vector<std::vector<task_index>> all_topological_orders(workflow const & wf) {
    std::vector<std::vector<task_index>> out;
    std::vector<std::size_t> indeg(wf.size());
    for (task_index v = 0; v < wf.size(); ++v) indeg[v] = wf.predecessors(v).size();
    std::vector<task_index> cur;
    std::function<void()> rec = [&] {
        if (cur.size() == wf.size()) {
            out.push_back(cur);
            return;
        }
        for (task_index v = 0; v < wf.size(); ++v) {
            if (indeg[v] != 0 || std::find(cur.begin(), cur.end(), v) != cur.end()) continue;
            cur.push_back(v);
            for (auto u : wf.successors(v)) --indeg[u];
            rec();
            for (auto u : wf.successors(v)) ++indeg[u];
            cur.pop_back();
        }
    };
    rec();
    return out;
}

// Every complete schedule with at most max_instances VMs whose per-VM order follows one of
// the topological orders. Instances are used in index order to skip relabelings.
inline void for_each_schedule(workflow const & wf, std::size_t types, std::size_t max_instances,
                              std::function<void(schedule const &)> const & visit) {
    auto const orders = all_topological_orders(wf);
    std::size_t const n = wf.size();
    std::vector<std::size_t> vm_of(n, 0);
    std::function<void(std::size_t, std::size_t)> assign = [&](std::size_t v, std::size_t used) {
        if (v == n) {
            std::vector<std::size_t> type_of(used, 0);
            std::function<void(std::size_t)> pick = [&](std::size_t i) {
                if (i == used) {
                    std::vector<schedule> seen;
                    for (auto const & order : orders) {
                        schedule s;
                        s.instances.resize(used);
                        for (std::size_t k = 0; k < used; ++k) s.instances[k].type = type_of[k];
                        for (auto t : order) s.instances[vm_of[t]].tasks.push_back(t);
                        if (std::find(seen.begin(), seen.end(), s) != seen.end()) continue;
                        seen.push_back(s);
                        visit(s);
                    }
                    return;
                }
                for (std::size_t j = 0; j < types; ++j) {
                    type_of[i] = j;
                    pick(i + 1);
                }
            };
            pick(0);
            return;
        }
        for (std::size_t k = 0; k < std::min(used + 1, max_instances); ++k) {
            vm_of[v] = k;
            assign(v + 1, std::max(used, k + 1));
        }
    };
    assign(0, 0);
}

// Direct check: at every VM start instant, count the VMs whose half-open span covers it.
inline bool overlap_quota_ok(schedule const & s, vm_catalog const & catalog, timeline const & tl) {
    auto const & q = catalog.limits();
    for (std::size_t i = 0; i < s.instances.size(); ++i) {
        if (s.instances[i].tasks.empty()) continue;
        double const t = tl.vm_start[i];
        double total = 0.0;
        std::vector<int> per(catalog.size(), 0);
        for (std::size_t k = 0; k < s.instances.size(); ++k) {
            if (s.instances[k].tasks.empty()) continue;
            if (tl.vm_start[k] <= t && t < tl.vm_stop[k]) {
                auto const j = s.instances[k].type;
                total += q.unit == quota_unit::vcpus ? catalog.at(j).vcpus : 1.0;
                ++per[j];
            }
        }
        if (q.total && total > *q.total) return false;
        for (std::size_t j = 0; j < catalog.size(); ++j) {
            if (per[j] > catalog.type_limit(j)) return false;
        }
    }
    return true;
}

} // namespace support
