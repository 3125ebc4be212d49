#include <doctest.h>

#include <set>

#include <eposs/error.hpp>
#include <eposs/workflow_gen.hpp>

using namespace eposs;

namespace {

workflow gen(topology t, std::size_t n, std::uint64_t seed = 1) {
    gen_spec s;
    s.shape = t;
    s.size = n;
    s.seed = seed;
    return generate(s);
}

std::vector<task_index> sources(workflow const & wf) {
    std::vector<task_index> out;
    for (task_index v = 0; v < wf.size(); ++v)
        if (wf.predecessors(v).empty()) out.push_back(v);
    return out;
}

std::vector<task_index> sinks(workflow const & wf) {
    std::vector<task_index> out;
    for (task_index v = 0; v < wf.size(); ++v)
        if (wf.successors(v).empty()) out.push_back(v);
    return out;
}

// longest path length in tasks
std::size_t depth(workflow const & wf) {
    std::vector<std::size_t> d(wf.size(), 1);
    std::size_t best = 0;
    for (auto v : wf.topological_order()) {
        for (auto p : wf.predecessors(v)) d[v] = std::max(d[v], d[p] + 1);
        best = std::max(best, d[v]);
    }
    return best;
}

std::string stem(task const & t) { return t.id.substr(0, t.id.rfind('_')); }

} // namespace

constexpr topology all_shapes[] = {topology::epigenomics, topology::montage, topology::sipht,
                                   topology::cybershake, topology::ligo, topology::random_layered};

TEST_CASE("epigenomics: one source fanning into pipelines that re-join") {
    auto const wf = gen(topology::epigenomics, 24);
    CHECK(wf.size() == 24);
    auto const src = sources(wf);
    REQUIRE(src.size() == 1);
    CHECK(wf.successors(src[0]).size() == 5);
    CHECK(sinks(wf).size() == 1);
    CHECK(depth(wf) == 8);
    for (auto s : wf.successors(src[0])) {
        auto v = s;
        for (int stage = 0; stage < 3; ++stage) {
            REQUIRE(wf.successors(v).size() == 1);
            v = wf.successors(v)[0];
        }
        REQUIRE(wf.successors(v).size() == 1);
        CHECK(stem(wf.at(wf.successors(v)[0])) == "mapMerge");
    }
}

TEST_CASE("epigenomics default ranges") {
    auto const r = default_runtime_range(topology::epigenomics);
    auto const o = default_output_range(topology::epigenomics);
    CHECK(r.first == 0.48);
    CHECK(r.second == 201.89);
    CHECK(o.first == 0.90);
    CHECK(o.second == 242.29);
    CHECK(default_runtime_range(topology::sipht).second == 3311.12);
}

TEST_CASE("benchmark deadlines") {
    CHECK(default_deadline(topology::cybershake) == 900.0);
    CHECK(default_deadline(topology::epigenomics) == 900.0);
    CHECK(default_deadline(topology::ligo) == 900.0);
    CHECK(default_deadline(topology::montage) == 2400.0);
    CHECK(default_deadline(topology::sipht) == 1800.0);
}

TEST_CASE("generators are deterministic and valid within ranges") {
    for (auto t : all_shapes) {
        for (std::size_t n : {1, 5, 30, 100}) {
            auto const a = gen(t, n, 7);
            auto const b = gen(t, n, 7);
            CHECK(a.tasks().size() == b.tasks().size());
            CHECK(a.edges() == b.edges());
            for (std::size_t i = 0; i < a.size(); ++i) {
                CHECK(a.at(i).runtime == b.at(i).runtime);
                CHECK(a.at(i).output_mb == b.at(i).output_mb);
            }
            CHECK_NOTHROW(validate(a.tasks(), a.edges()));
            auto const r = default_runtime_range(t);
            auto const o = default_output_range(t);
            for (auto const & tk : a.tasks()) {
                CHECK((tk.runtime >= r.first && tk.runtime <= r.second));
                CHECK((tk.output_mb >= o.first && tk.output_mb <= o.second));
            }
            if (t == topology::random_layered) CHECK(a.size() == n);
            if (n >= 30) CHECK(std::abs(double(a.size()) - double(n)) <= 0.2 * double(n) + 6);
        }
        CHECK(gen(t, 40, 1).at(0).runtime != gen(t, 40, 2).at(0).runtime);
    }
}

TEST_CASE("custom ranges are honoured") {
    gen_spec s;
    s.shape = topology::montage;
    s.size = 50;
    s.runtime_range = value_range{0.0, 2.0};
    s.output_range = value_range{3.0, 3.0};
    for (auto const & tk : generate(s).tasks()) {
        CHECK((tk.runtime >= 0.0 && tk.runtime <= 2.0));
        CHECK(tk.output_mb == 3.0);
    }
}

TEST_CASE("bad specs") {
    gen_spec s;
    s.size = 0;
    CHECK_THROWS_AS(generate(s), error);
    s.size = 5;
    s.runtime_range = value_range{5.0, 1.0};
    CHECK_THROWS_AS(generate(s), error);
    s.runtime_range = value_range{-1.0, 1.0};
    CHECK_THROWS_AS(generate(s), error);
    CHECK_THROWS_AS(parse_topology("pegasus"), error);
    CHECK_THROWS_AS(gen_spec_from_json(nlohmann::json{{"topology", "montage"}, {"size", 0}}), error);
}

TEST_CASE("cybershake: two fan-out levels then fan-in") {
    auto const wf = gen(topology::cybershake, 30);
    auto const src = sources(wf);
    REQUIRE(src.size() == 1);
    auto const & extract = wf.successors(src[0]);
    CHECK(extract.size() == 3);
    for (auto e : extract) {
        CHECK(wf.successors(e).size() == 4);
        for (auto s : wf.successors(e)) CHECK(stem(wf.at(s)) == "SeismogramSynthesis");
    }
    auto const snk = sinks(wf);
    REQUIRE(snk.size() == 2);
    std::set<std::string> names{stem(wf.at(snk[0])), stem(wf.at(snk[1]))};
    CHECK(names == std::set<std::string>{"ZipPSA", "ZipSeis"});
    CHECK(depth(wf) == 5);
}

TEST_CASE("montage: fan-out, pairwise overlaps, aggregation, fan-in") {
    auto const wf = gen(topology::montage, 50);
    CHECK(wf.size() == 50);
    std::size_t proj = 0, diff = 0;
    for (task_index v = 0; v < wf.size(); ++v) {
        auto const s = stem(wf.at(v));
        if (s == "mProjectPP") {
            ++proj;
            CHECK(wf.predecessors(v).empty());
        }
        if (s == "mDiffFit") {
            ++diff;
            CHECK(wf.predecessors(v).size() == 2);
        }
        if (s == "mConcatFit" || s == "mImgtbl") CHECK(wf.predecessors(v).size() >= proj - 1);
    }
    CHECK(proj == 15);
    CHECK(diff == 14);
    CHECK(sinks(wf).size() == 1);
}

TEST_CASE("sipht: wide independent stage into a small tree") {
    auto const wf = gen(topology::sipht, 40);
    CHECK(wf.size() == 40);
    CHECK(sinks(wf).size() == 1);
    CHECK(sources(wf).size() == 28 + 4);
    CHECK(depth(wf) <= 4);
}

TEST_CASE("ligo: repeated fan-out/fan-in blocks") {
    auto const wf = gen(topology::ligo, 100);
    std::size_t thinca = 0;
    for (auto const & t : wf.tasks()) thinca += stem(t) == "Thinca" || stem(t) == "Thinca2";
    CHECK(thinca == 4);
    CHECK(sinks(wf).size() == 2);
    CHECK(depth(wf) == 6);
}

TEST_CASE("scale series") {
    gen_spec base;
    base.shape = topology::epigenomics;
    auto const series = scale_series(base, {24, 100, 500, 997});
    REQUIRE(series.size() == 4);
    CHECK(series[0].size() == 24);
    CHECK(series[1].size() == 100);
    CHECK(series[2].size() == 500);
    CHECK(std::abs(double(series[3].size()) - 997.0) <= 4.0);
    for (std::size_t i = 1; i < series.size(); ++i) CHECK(series[i].size() >= series[i - 1].size());

    gen_spec one;
    auto const single = scale_series(one, {1});
    CHECK(single[0].size() == 1);

    for (auto t : all_shapes) {
        gen_spec b;
        b.shape = t;
        std::size_t prev = 0;
        for (std::size_t n = 1; n < 300; n += 7) {
            auto const sz = generate([&] { auto s = b; s.size = n; return s; }()).size();
            CHECK(sz >= prev);
            prev = sz;
        }
    }
}

TEST_CASE("gen spec json") {
    auto const s = gen_spec_from_json(nlohmann::json{{"topology", "cybershake"}, {"size", 30}, {"seed", 4}});
    CHECK(s.shape == topology::cybershake);
    CHECK(s.size == 30);
    CHECK(s.seed == 4);
    auto const j = to_json(s);
    CHECK(j.at("runtime_range")[1] == 265.73);
    auto const back = gen_spec_from_json(j);
    CHECK(back.runtimes() == s.runtimes());
}
