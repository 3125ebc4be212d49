#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include <eposs/dag.hpp>

namespace eposs {

enum class topology { epigenomics, montage, sipht, cybershake, ligo, random_layered };

topology parse_topology(std::string const & name); // throws bad_spec
char const * to_string(topology t);

using value_range = std::pair<double, double>;

struct gen_spec {
    topology shape = topology::random_layered;
    std::size_t size = 24; // approximate for the benchmark shapes, exact for random-layered
    std::uint64_t seed = 1;
    std::optional<value_range> runtime_range; // seconds; topology default when unset
    std::optional<value_range> output_range;  // MB

    value_range runtimes() const;
    value_range outputs() const;
    void check() const; // throws bad_spec
};

// Min/max mean runtime and output size of the characterized workflows.
value_range default_runtime_range(topology t);
value_range default_output_range(topology t);

// Deadlines used for the benchmark experiments, seconds.
double default_deadline(topology t);

// Log-uniform draw in [lo, hi]; plain uniform when lo is 0.
double log_uniform(double lo, double hi, std::mt19937_64 & rng);

workflow generate(gen_spec const & spec);
std::vector<workflow> scale_series(gen_spec const & base, std::vector<std::size_t> const & sizes);

gen_spec gen_spec_from_json(nlohmann::json const & j);
nlohmann::json to_json(gen_spec const & spec);

} // namespace eposs
