#include <doctest.h>

#include <random>

#include <eposs/error.hpp>
#include <eposs/pareto.hpp>

using namespace eposs;

namespace {

std::vector<front_point> pts(std::vector<std::pair<double, double>> const & xy) {
    std::vector<front_point> out;
    for (auto [t, c] : xy) {
        front_point p;
        p.makespan = t;
        p.cost = c;
        out.push_back(p);
    }
    return out;
}

std::vector<std::pair<double, double>> xy(std::vector<front_point> const & f) {
    std::vector<std::pair<double, double>> out;
    for (auto const & p : f) out.emplace_back(p.makespan, p.cost);
    return out;
}

// O(n^2) filter; equal pairs keep their first occurrence
std::vector<std::pair<double, double>> brute(std::vector<std::pair<double, double>> const & in) {
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < in.size(); ++i) {
        bool keep = true;
        for (std::size_t j = 0; j < in.size() && keep; ++j) {
            if (j == i) continue;
            auto const & p = in[i];
            auto const & q = in[j];
            bool const dom = q.first <= p.first && q.second <= p.second && (q.first < p.first || q.second < p.second);
            bool const dup = q == p && j < i;
            if (dom || dup) keep = false;
        }
        if (keep) out.push_back(in[i]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

double mc_area(std::vector<front_point> const & f, reference_point ref, std::size_t n, std::uint64_t seed) {
    double lo_t = ref.makespan, lo_c = ref.cost;
    for (auto const & p : f) {
        lo_t = std::min(lo_t, p.makespan);
        lo_c = std::min(lo_c, p.cost);
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ut(lo_t, ref.makespan), uc(lo_c, ref.cost);
    std::size_t in = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double const t = ut(rng), c = uc(rng);
        for (auto const & p : f) {
            if (p.makespan <= t && p.cost <= c) {
                ++in;
                break;
            }
        }
    }
    return (ref.makespan - lo_t) * (ref.cost - lo_c) * static_cast<double>(in) / static_cast<double>(n);
}

std::vector<front_point> random_front(std::mt19937_64 & rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 100.0);
    std::vector<std::pair<double, double>> raw;
    for (std::size_t i = 0; i < n; ++i) raw.emplace_back(u(rng), u(rng));
    return non_dominated(pts(raw));
}

} // namespace

TEST_CASE("non_dominated examples") {
    CHECK(xy(non_dominated(pts({{1, 9}, {2, 2}, {9, 1}}))).size() == 3);
    CHECK(xy(non_dominated(pts({{1, 1}, {2, 2}}))) == std::vector<std::pair<double, double>>{{1, 1}});
    CHECK(xy(non_dominated(pts({{1, 2}, {1, 2}, {1, 3}, {2, 2}}))) == std::vector<std::pair<double, double>>{{1, 2}});
    CHECK(non_dominated({}).empty());
}

TEST_CASE("non_dominated equals the pairwise filter") {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> u(0, 30);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<std::pair<double, double>> raw;
        for (int i = 0; i < 100; ++i) raw.emplace_back(u(rng), u(rng));
        CHECK(xy(non_dominated(pts(raw))) == brute(raw));
    }
}

TEST_CASE("hypervolume degenerate and simple cases") {
    CHECK(hypervolume(pts({{5, 5}})) == 0.0);
    CHECK(hypervolume(pts({{1, 3}, {3, 1}})) == 0.0);
    CHECK(hypervolume(pts({{1, 2}}), reference_point{3, 3}) == 2.0);
    CHECK(hypervolume(pts({{1, 2}, {2, 1}}), reference_point{3, 3}) == 3.0);
    CHECK(hypervolume(pts({{1, 3}, {3, 1}}), reference_point{4, 4}) == 5.0);
}

TEST_CASE("hypervolume errors") {
    try {
        hypervolume(pts({{1, 5}}), reference_point{3, 3});
        FAIL("expected BadReference");
    } catch (error const & e) {
        CHECK(e.code() == error_code::bad_reference);
    }
    CHECK_THROWS_AS(hypervolume({}), error);
}

TEST_CASE("hypervolume matches Monte Carlo area") {
    std::mt19937_64 rng(2);
    for (int rep = 0; rep < 20; ++rep) {
        auto const f = random_front(rng, 40);
        reference_point const ref{110.0, 110.0};
        double const hv = hypervolume(f, ref);
        CHECK(std::abs(mc_area(f, ref, 1000000, rep) - hv) / hv < 0.01);
    }
}

TEST_CASE("hypervolume invariances") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 30; ++rep) {
        auto f = random_front(rng, 30);
        reference_point const ref{120.0, 120.0};
        double const hv = hypervolume(f, ref);
        auto shuffled = f;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(hypervolume(shuffled, ref) == doctest::Approx(hv));
        auto with_dominated = f;
        with_dominated.push_back(pts({{f[0].makespan + 1, f[0].cost + 1}})[0]);
        CHECK(hypervolume(with_dominated, ref) == doctest::Approx(hv));
        CHECK(hypervolume(f, reference_point{150.0, 130.0}) >= hv);
        CHECK(hypervolume(f, ref) >= hypervolume(f));
        auto grown = f;
        grown.push_back(pts({{0.5, 119.0}})[0]);
        CHECK(hypervolume(non_dominated(grown), ref) >= hv - 1e-9);
    }
}

TEST_CASE("auto reference") {
    auto const r = auto_reference(pts({{1, 9}, {4, 2}, {7, 1}}));
    CHECK(r.makespan == 7.0);
    CHECK(r.cost == 9.0);
}
