#include <eposs/workflow_gen.hpp>

#include <algorithm>
#include <cmath>

#include <eposs/error.hpp>
#include <eposs/monte_carlo.hpp>

namespace eposs {

topology parse_topology(std::string const & name) {
    if (name == "epigenomics") return topology::epigenomics;
    if (name == "montage") return topology::montage;
    if (name == "sipht") return topology::sipht;
    if (name == "cybershake") return topology::cybershake;
    if (name == "ligo") return topology::ligo;
    if (name == "random-layered" || name == "random") return topology::random_layered;
    throw error(error_code::bad_spec, "unknown topology '" + name + "'");
}

char const * to_string(topology t) {
    switch (t) {
    case topology::epigenomics: return "epigenomics";
    case topology::montage: return "montage";
    case topology::sipht: return "sipht";
    case topology::cybershake: return "cybershake";
    case topology::ligo: return "ligo";
    case topology::random_layered: return "random-layered";
    }
    return "?";
}

value_range default_runtime_range(topology t) {
    switch (t) {
    case topology::epigenomics: return {0.48, 201.89};
    case topology::montage: return {0.64, 384.49};
    case topology::sipht: return {0.03, 3311.12};
    case topology::ligo: return {0.13, 0.14};
    case topology::cybershake: return {0.55, 265.73};
    case topology::random_layered: return {10.0, 300.0};
    }
    return {0.0, 0.0};
}

value_range default_output_range(topology t) {
    switch (t) {
    case topology::epigenomics: return {0.90, 242.29};
    case topology::montage: return {0.10, 775.45};
    case topology::sipht: return {0.03, 567.01};
    case topology::ligo: return {0.01, 0.13};
    case topology::cybershake: return {0.02, 176.48};
    case topology::random_layered: return {1.0, 100.0};
    }
    return {0.0, 0.0};
}

double default_deadline(topology t) {
    switch (t) {
    case topology::montage: return 2400.0;
    case topology::sipht: return 1800.0;
    default: return 900.0;
    }
}

value_range gen_spec::runtimes() const { return runtime_range.value_or(default_runtime_range(shape)); }
value_range gen_spec::outputs() const { return output_range.value_or(default_output_range(shape)); }

void gen_spec::check() const {
    if (size < 1) {
        throw error(error_code::bad_spec, "size must be >= 1");
    }
    for (auto const & [name, r] : {std::pair{"runtime_range", runtimes()}, std::pair{"output_range", outputs()}}) {
        if (!(std::isfinite(r.first) && std::isfinite(r.second) && r.first >= 0.0 && r.first <= r.second)) {
            throw error(error_code::bad_spec, std::string(name) + " must satisfy 0 <= min <= max");
        }
    }
}

double log_uniform(double lo, double hi, std::mt19937_64 & rng) {
    if (lo == hi) {
        return lo;
    }
    if (lo <= 0.0) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    }
    double const x = std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
    return std::clamp(x, lo, hi);
}

namespace {

class builder {
public:
    builder(gen_spec const & spec)
        : rng_(mix_seed(spec.seed, spec.size)), runtime_(spec.runtimes()), output_(spec.outputs()) {}

    std::string add(std::string const & stem) {
        std::string id = stem + "_" + std::to_string(tasks_.size());
        double const rt = log_uniform(runtime_.first, runtime_.second, rng_);
        double const out = log_uniform(output_.first, output_.second, rng_);
        tasks_.push_back({id, rt, out});
        return id;
    }

    void link(std::string const & a, std::string const & b) { edges_.emplace_back(a, b); }

    std::mt19937_64 & rng() { return rng_; }

    workflow finish() { return workflow(std::move(tasks_), std::move(edges_)); }

private:
    std::mt19937_64 rng_;
    value_range runtime_;
    value_range output_;
    std::vector<task> tasks_;
    std::vector<edge> edges_;
};

std::size_t fit(std::size_t size, std::size_t fixed, std::size_t per) {
    if (size <= fixed + per) {
        return 1;
    }
    return static_cast<std::size_t>(std::llround(static_cast<double>(size - fixed) / static_cast<double>(per)));
}

// split, then k pipelines of four stages, then merge, index and pileup
workflow epigenomics(builder & b, std::size_t size) {
    std::size_t const k = fit(size, 4, 4);
    auto const split = b.add("fastqSplit");
    std::vector<std::string> tails;
    for (std::size_t i = 0; i < k; ++i) {
        auto prev = split;
        for (char const * stage : {"filterContams", "sol2sanger", "fast2bfq", "map"}) {
            auto const id = b.add(stage);
            b.link(prev, id);
            prev = id;
        }
        tails.push_back(prev);
    }
    auto const merge = b.add("mapMerge");
    for (auto const & t : tails) {
        b.link(t, merge);
    }
    auto const index = b.add("maqIndex");
    b.link(merge, index);
    auto const pileup = b.add("pileup");
    b.link(index, pileup);
    return b.finish();
}

// n projections, n-1 pairwise overlap fits, model, n background corrections, final chain
workflow montage(builder & b, std::size_t size) {
    std::size_t const n = fit(size, 5, 3);
    std::vector<std::string> proj;
    for (std::size_t i = 0; i < n; ++i) {
        proj.push_back(b.add("mProjectPP"));
    }
    std::vector<std::string> diffs;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        auto const d = b.add("mDiffFit");
        b.link(proj[i], d);
        b.link(proj[i + 1], d);
        diffs.push_back(d);
    }
    auto const concat = b.add("mConcatFit");
    for (auto const & d : diffs) {
        b.link(d, concat);
    }
    if (diffs.empty()) {
        b.link(proj[0], concat);
    }
    auto const model = b.add("mBgModel");
    b.link(concat, model);
    auto const table = b.add("mImgtbl");
    for (std::size_t i = 0; i < n; ++i) {
        auto const bg = b.add("mBackground");
        b.link(model, bg);
        b.link(proj[i], bg);
        b.link(bg, table);
    }
    auto prev = table;
    for (char const * stage : {"mAdd", "mShrink", "mJPEG"}) {
        auto const id = b.add(stage);
        b.link(prev, id);
        prev = id;
    }
    return b.finish();
}

// wide patser stage plus a small candidate/annotation tree
workflow sipht(builder & b, std::size_t size) {
    std::size_t const w = size > 13 ? size - 12 : 1;
    auto const annotate = b.add("SRNA_annotate");
    auto const concat = b.add("Patser_concate");
    for (std::size_t i = 0; i < w; ++i) {
        b.link(b.add("Patser"), concat);
    }
    b.link(concat, annotate);
    auto const srna = b.add("SRNA");
    for (char const * stage : {"Transterm", "Findterm", "RNAMotif", "Blast"}) {
        b.link(b.add(stage), srna);
    }
    auto const ffn = b.add("FFN_parse");
    b.link(srna, ffn);
    b.link(ffn, annotate);
    for (char const * stage : {"BLAST_synteny", "BLAST_candidate", "BLAST_QRNA", "BLAST_paralogues"}) {
        auto const id = b.add(stage);
        b.link(srna, id);
        b.link(id, annotate);
    }
    return b.finish();
}

// independent blocks of fan-out, fan-in, fan-out, fan-in
workflow ligo(builder & b, std::size_t size) {
    std::size_t const blocks = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(size / 50.0)));
    std::size_t const w = fit((size + blocks / 2) / blocks, 2, 4);
    for (std::size_t blk = 0; blk < blocks; ++blk) {
        std::vector<std::string> first;
        for (std::size_t i = 0; i < w; ++i) {
            auto const bank = b.add("TmpltBank");
            auto const insp = b.add("Inspiral");
            b.link(bank, insp);
            first.push_back(insp);
        }
        auto const thinca = b.add("Thinca");
        for (auto const & f : first) {
            b.link(f, thinca);
        }
        auto const thinca2 = b.add("Thinca2");
        for (std::size_t i = 0; i < w; ++i) {
            auto const trig = b.add("TrigBank");
            auto const insp = b.add("Inspiral2");
            b.link(thinca, trig);
            b.link(trig, insp);
            b.link(insp, thinca2);
        }
    }
    return b.finish();
}

// root fans out to extractions, each fans out to syntheses; syntheses and their
// peak calculations are zipped by two sinks
workflow cybershake(builder & b, std::size_t size) {
    constexpr std::size_t m = 4;
    std::size_t const e = fit(size, 3, 2 * m + 1);
    auto const root = b.add("PreCVM");
    auto const zip_seis = b.add("ZipSeis");
    auto const zip_psa = b.add("ZipPSA");
    for (std::size_t i = 0; i < e; ++i) {
        auto const extract = b.add("ExtractSGT");
        b.link(root, extract);
        for (std::size_t j = 0; j < m; ++j) {
            auto const synth = b.add("SeismogramSynthesis");
            auto const peak = b.add("PeakValCalcOkaya");
            b.link(extract, synth);
            b.link(synth, peak);
            b.link(synth, zip_seis);
            b.link(peak, zip_psa);
        }
    }
    return b.finish();
}

// exact size; every task past the first layer depends on 1-3 tasks of the previous layer
workflow random_layered(builder & b, std::size_t size) {
    auto & rng = b.rng();
    std::size_t const layers = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(std::sqrt(size))));
    std::vector<std::size_t> width(layers, 1);
    for (std::size_t extra = size - layers; extra > 0; --extra) {
        ++width[std::uniform_int_distribution<std::size_t>(0, layers - 1)(rng)];
    }
    std::vector<std::string> prev;
    for (std::size_t l = 0; l < layers; ++l) {
        std::vector<std::string> cur;
        for (std::size_t i = 0; i < width[l]; ++i) {
            auto const id = b.add("t");
            if (!prev.empty()) {
                std::vector<std::size_t> pool(prev.size());
                for (std::size_t p = 0; p < pool.size(); ++p) pool[p] = p;
                std::shuffle(pool.begin(), pool.end(), rng);
                std::size_t const fan = std::min(pool.size(), std::uniform_int_distribution<std::size_t>(1, 3)(rng));
                std::sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(fan));
                for (std::size_t p = 0; p < fan; ++p) {
                    b.link(prev[pool[p]], id);
                }
            }
            cur.push_back(id);
        }
        prev = std::move(cur);
    }
    return b.finish();
}

} // namespace

workflow generate(gen_spec const & spec) {
    spec.check();
    builder b(spec);
    switch (spec.shape) {
    case topology::epigenomics: return epigenomics(b, spec.size);
    case topology::montage: return montage(b, spec.size);
    case topology::sipht: return sipht(b, spec.size);
    case topology::cybershake: return cybershake(b, spec.size);
    case topology::ligo: return ligo(b, spec.size);
    case topology::random_layered: return random_layered(b, spec.size);
    }
    throw error(error_code::bad_spec, "unknown topology");
}

std::vector<workflow> scale_series(gen_spec const & base, std::vector<std::size_t> const & sizes) {
    std::vector<workflow> out;
    out.reserve(sizes.size());
    for (auto n : sizes) {
        auto spec = base;
        spec.size = n;
        out.push_back(generate(spec));
    }
    return out;
}

namespace {

value_range range_from_json(nlohmann::json const & j, char const * name) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw error(error_code::bad_spec, std::string(name) + " must be [min, max]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

} // namespace

gen_spec gen_spec_from_json(nlohmann::json const & j) {
    if (!j.is_object() || !j.contains("topology")) {
        throw error(error_code::bad_spec, "generator spec needs a topology");
    }
    gen_spec s;
    s.shape = parse_topology(j.at("topology").get<std::string>());
    if (j.contains("size")) {
        auto const n = j.at("size");
        if (!n.is_number_integer() || n.get<long long>() < 1) {
            throw error(error_code::bad_spec, "size must be a positive integer");
        }
        s.size = n.get<std::size_t>();
    }
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("runtime_range")) s.runtime_range = range_from_json(j.at("runtime_range"), "runtime_range");
    if (j.contains("output_range")) s.output_range = range_from_json(j.at("output_range"), "output_range");
    s.check();
    return s;
}

nlohmann::json to_json(gen_spec const & s) {
    auto const rt = s.runtimes();
    auto const out = s.outputs();
    return {{"topology", to_string(s.shape)},
            {"size", s.size},
            {"seed", s.seed},
            {"runtime_range", {rt.first, rt.second}},
            {"output_range", {out.first, out.second}}};
}

} // namespace eposs
