#include <eposs/dag.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <set>

#include <eposs/error.hpp>

namespace eposs {

namespace {

// Returns one cycle as a list of ids (first id repeated at the end), or empty.
std::vector<std::string> find_cycle(std::vector<task> const & tasks,
                                    std::vector<std::vector<task_index>> const & succs) {
    enum class mark { white, grey, black };
    std::vector<mark> state(tasks.size(), mark::white);
    std::vector<task_index> parent(tasks.size(), tasks.size());

    for (task_index root = 0; root < tasks.size(); ++root) {
        if (state[root] != mark::white) {
            continue;
        }
        // iterative DFS with explicit edge cursor
        std::vector<std::pair<task_index, std::size_t>> stack{{root, 0}};
        state[root] = mark::grey;
        while (!stack.empty()) {
            auto & [v, cursor] = stack.back();
            if (cursor == succs[v].size()) {
                state[v] = mark::black;
                stack.pop_back();
                continue;
            }
            task_index const u = succs[v][cursor++];
            if (state[u] == mark::grey) {
                std::vector<std::string> cycle{tasks[u].id};
                for (task_index w = v; w != u; w = parent[w]) {
                    cycle.push_back(tasks[w].id);
                }
                cycle.push_back(tasks[u].id);
                std::reverse(cycle.begin() + 1, cycle.end() - 1);
                return cycle;
            }
            if (state[u] == mark::white) {
                parent[u] = v;
                state[u] = mark::grey;
                stack.emplace_back(u, 0);
            }
        }
    }
    return {};
}

} // namespace

void validate(std::vector<task> const & tasks, std::vector<edge> const & edges) {
    std::unordered_map<std::string, task_index> index;
    for (task_index i = 0; i < tasks.size(); ++i) {
        auto const & t = tasks[i];
        if (!index.emplace(t.id, i).second) {
            throw error(error_code::duplicate_task, "task id '" + t.id + "' appears twice");
        }
        if (!(t.runtime >= 0.0) || !std::isfinite(t.runtime)) {
            throw error(error_code::invalid_value, "task '" + t.id + "' has a negative or non-finite runtime");
        }
        if (!(t.output_mb >= 0.0) || !std::isfinite(t.output_mb)) {
            throw error(error_code::invalid_value, "task '" + t.id + "' has a negative or non-finite output size");
        }
    }

    std::vector<std::vector<task_index>> succs(tasks.size());
    std::set<std::pair<task_index, task_index>> seen;
    for (auto const & [from, to] : edges) {
        auto f = index.find(from);
        if (f == index.end()) {
            throw error(error_code::dangling_edge, "edge references missing task '" + from + "'");
        }
        auto t = index.find(to);
        if (t == index.end()) {
            throw error(error_code::dangling_edge, "edge references missing task '" + to + "'");
        }
        if (f->second == t->second) {
            throw error(error_code::self_loop, "task '" + from + "' depends on itself");
        }
        if (!seen.emplace(f->second, t->second).second) {
            throw error(error_code::duplicate_edge, "edge " + from + " -> " + to + " appears twice");
        }
        succs[f->second].push_back(t->second);
    }

    auto const cycle = find_cycle(tasks, succs);
    if (!cycle.empty()) {
        std::string path;
        for (auto const & id : cycle) {
            path += path.empty() ? id : " -> " + id;
        }
        throw error(error_code::cycle_detected, path);
    }
}

workflow::workflow(std::vector<task> tasks, std::vector<edge> edges)
    : tasks_(std::move(tasks)), edges_(std::move(edges)) {
    validate(tasks_, edges_);

    preds_.resize(tasks_.size());
    succs_.resize(tasks_.size());
    for (task_index i = 0; i < tasks_.size(); ++i) {
        index_.emplace(tasks_[i].id, i);
    }
    for (auto const & [from, to] : edges_) {
        auto const f = index_.at(from);
        auto const t = index_.at(to);
        succs_[f].push_back(t);
        preds_[t].push_back(f);
    }
    for (auto & p : preds_) {
        std::sort(p.begin(), p.end());
    }
    for (auto & s : succs_) {
        std::sort(s.begin(), s.end());
    }

    std::vector<std::size_t> indegree(tasks_.size());
    for (task_index i = 0; i < tasks_.size(); ++i) {
        indegree[i] = preds_[i].size();
    }
    std::priority_queue<task_index, std::vector<task_index>, std::greater<>> ready;
    for (task_index i = 0; i < tasks_.size(); ++i) {
        if (indegree[i] == 0) {
            ready.push(i);
        }
    }
    topo_.reserve(tasks_.size());
    while (!ready.empty()) {
        auto const v = ready.top();
        ready.pop();
        topo_.push_back(v);
        for (auto u : succs_[v]) {
            if (--indegree[u] == 0) {
                ready.push(u);
            }
        }
    }
}

task_index workflow::index_of(std::string const & id) const {
    auto it = index_.find(id);
    if (it == index_.end()) {
        throw error(error_code::invalid_value, "unknown task id '" + id + "'");
    }
    return it->second;
}

ranked_tasks b_rank(workflow const & wf, std::span<double const> mean_time, double mean_bandwidth_mbps) {
    if (mean_time.size() != wf.size()) {
        throw error(error_code::missing_time, "expected one mean time per task");
    }
    bool const with_transfer = mean_bandwidth_mbps > 0.0 && std::isfinite(mean_bandwidth_mbps);

    ranked_tasks out;
    out.rank.assign(wf.size(), 0.0);
    auto const & topo = wf.topological_order();
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        auto const v = *it;
        double const comm = with_transfer ? wf.at(v).output_mb * 8.0 / mean_bandwidth_mbps : 0.0;
        double tail = 0.0;
        for (auto u : wf.successors(v)) {
            tail = std::max(tail, out.rank[u] + comm);
        }
        out.rank[v] = mean_time[v] + tail;
    }

    out.order.resize(wf.size());
    for (task_index i = 0; i < wf.size(); ++i) {
        out.order[i] = i;
    }
    std::sort(out.order.begin(), out.order.end(), [&](task_index a, task_index b) {
        if (out.rank[a] != out.rank[b]) {
            return out.rank[a] > out.rank[b];
        }
        return wf.at(a).id < wf.at(b).id;
    });

    // Zero-time tasks can tie with their successors; restore precedence with a stable
    // topological pass that keeps the rank order wherever it is already consistent.
    std::vector<std::size_t> position(wf.size());
    for (std::size_t p = 0; p < out.order.size(); ++p) {
        position[out.order[p]] = p;
    }
    bool consistent = true;
    for (task_index v = 0; v < wf.size() && consistent; ++v) {
        for (auto u : wf.successors(v)) {
            if (position[u] < position[v]) {
                consistent = false;
                break;
            }
        }
    }
    if (!consistent) {
        std::vector<std::size_t> indegree(wf.size());
        for (task_index i = 0; i < wf.size(); ++i) {
            indegree[i] = wf.predecessors(i).size();
        }
        auto later = [&](task_index a, task_index b) { return position[a] > position[b]; };
        std::priority_queue<task_index, std::vector<task_index>, decltype(later)> ready(later);
        for (task_index i = 0; i < wf.size(); ++i) {
            if (indegree[i] == 0) {
                ready.push(i);
            }
        }
        out.order.clear();
        while (!ready.empty()) {
            auto const v = ready.top();
            ready.pop();
            out.order.push_back(v);
            for (auto u : wf.successors(v)) {
                if (--indegree[u] == 0) {
                    ready.push(u);
                }
            }
        }
    }
    return out;
}

ranked_tasks b_rank(workflow const & wf, std::map<std::string, double> const & mean_time,
                    double mean_bandwidth_mbps) {
    std::vector<double> dense(wf.size());
    for (task_index i = 0; i < wf.size(); ++i) {
        auto it = mean_time.find(wf.at(i).id);
        if (it == mean_time.end()) {
            throw error(error_code::missing_time, "no mean time for task '" + wf.at(i).id + "'");
        }
        dense[i] = it->second;
    }
    return b_rank(wf, dense, mean_bandwidth_mbps);
}

nlohmann::json to_json(workflow const & wf) {
    nlohmann::json tasks = nlohmann::json::array();
    for (auto const & t : wf.tasks()) {
        tasks.push_back({{"id", t.id}, {"runtime", t.runtime}, {"output_mb", t.output_mb}});
    }
    nlohmann::json edges = nlohmann::json::array();
    for (auto const & [from, to] : wf.edges()) {
        edges.push_back({from, to});
    }
    return {{"tasks", tasks}, {"edges", edges}};
}

workflow workflow_from_json(nlohmann::json const & j) {
    try {
        std::vector<task> tasks;
        for (auto const & t : j.at("tasks")) {
            tasks.push_back(task{t.at("id").get<std::string>(), t.at("runtime").get<double>(),
                                 t.value("output_mb", 0.0)});
        }
        std::vector<edge> edges;
        if (j.contains("edges")) {
            for (auto const & e : j.at("edges")) {
                if (!e.is_array() || e.size() != 2) {
                    throw error(error_code::load_error, "edges must be [from, to] pairs");
                }
                edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
            }
        }
        return workflow(std::move(tasks), std::move(edges));
    } catch (nlohmann::json::exception const & ex) {
        throw error(error_code::load_error, std::string("malformed workflow JSON: ") + ex.what());
    }
}

workflow load_workflow(std::string const & path) {
    std::ifstream in(path);
    if (!in) {
        throw error(error_code::load_error, "cannot open workflow file '" + path + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (nlohmann::json::exception const & ex) {
        throw error(error_code::load_error, "'" + path + "': " + ex.what());
    }
    return workflow_from_json(j);
}

void save_workflow(workflow const & wf, std::string const & path) {
    std::ofstream out(path);
    if (!out) {
        throw error(error_code::io_error, "cannot write '" + path + "'");
    }
    out << to_json(wf).dump(2) << '\n';
}

} // namespace eposs
