#include <eposs/pareto.hpp>

#include <algorithm>

#include <eposs/error.hpp>

namespace eposs {

pareto_front non_dominated(std::vector<front_point> points) {
    std::stable_sort(points.begin(), points.end(), [](front_point const & a, front_point const & b) {
        if (a.makespan != b.makespan) return a.makespan < b.makespan;
        return a.cost < b.cost;
    });
    // after the sort a point survives iff its cost is strictly below every earlier survivor
    pareto_front out;
    for (auto & p : points) {
        if (out.empty() || p.cost < out.back().cost) {
            out.push_back(std::move(p));
        }
    }
    return out;
}

reference_point auto_reference(std::vector<front_point> const & points) {
    if (points.empty()) {
        throw error(error_code::invalid_value, "reference point of an empty front");
    }
    reference_point ref{points.front().makespan, points.front().cost};
    for (auto const & p : points) {
        ref.makespan = std::max(ref.makespan, p.makespan);
        ref.cost = std::max(ref.cost, p.cost);
    }
    return ref;
}

double hypervolume(std::vector<front_point> const & front, std::optional<reference_point> ref) {
    if (front.empty()) {
        throw error(error_code::invalid_value, "hypervolume of an empty front");
    }
    auto const r = ref.value_or(auto_reference(front));
    for (auto const & p : front) {
        if (p.makespan > r.makespan || p.cost > r.cost) {
            throw error(error_code::bad_reference, "a front point lies beyond the reference point");
        }
    }
    auto const staircase = non_dominated(front);
    double area = 0.0;
    for (std::size_t i = 0; i < staircase.size(); ++i) {
        double const right = i + 1 < staircase.size() ? staircase[i + 1].makespan : r.makespan;
        area += (right - staircase[i].makespan) * (r.cost - staircase[i].cost);
    }
    return area;
}

} // namespace eposs
