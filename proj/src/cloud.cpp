#include <eposs/cloud.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

#include <eposs/error.hpp>

namespace eposs {

usl_params scenario_params(scenario s) {
    switch (s) {
    case scenario::a: return {0.01, 0.0};
    case scenario::b: return {0.0, 0.0};
    case scenario::c: return {0.0001, 0.001};
    }
    return {};
}

scenario parse_scenario(std::string const & name) {
    if (name == "A" || name == "a") return scenario::a;
    if (name == "B" || name == "b") return scenario::b;
    if (name == "C" || name == "c") return scenario::c;
    throw error(error_code::config_error, "unknown scalability scenario '" + name + "'");
}

char const * to_string(scenario s) {
    switch (s) {
    case scenario::a: return "A";
    case scenario::b: return "B";
    case scenario::c: return "C";
    }
    return "?";
}

vm_catalog::vm_catalog(std::vector<vm_type> types, std::map<std::string, double> family_mu, usl_params usl,
                       quotas q)
    : types_(std::move(types)), family_mu_(std::move(family_mu)), usl_(usl), quotas_(std::move(q)) {
    if (!(usl_.alpha >= 0.0) || !(usl_.beta >= 0.0)) {
        throw error(error_code::invalid_value, "USL coefficients must be nonnegative");
    }
    for (auto const & [family, mu] : family_mu_) {
        if (!(mu > 0.0)) {
            throw error(error_code::invalid_value, "family '" + family + "' needs mu > 0");
        }
    }
    for (std::size_t j = 0; j < types_.size(); ++j) {
        auto const & t = types_[j];
        if (t.vcpus < 1 || !(t.bandwidth_mbps > 0.0) || !(t.price_per_hour > 0.0)) {
            throw error(error_code::invalid_value, "VM type '" + t.name + "' needs vcpus >= 1, bandwidth > 0, price > 0");
        }
        if (!family_mu_.contains(t.family)) {
            throw error(error_code::unknown_family, "VM type '" + t.name + "' references family '" + t.family + "'");
        }
        for (std::size_t k = 0; k < j; ++k) {
            if (types_[k].name == t.name) {
                throw error(error_code::invalid_value, "VM type '" + t.name + "' listed twice");
            }
        }
    }
    if (quotas_.total && !(*quotas_.total > 0.0)) {
        throw error(error_code::invalid_value, "total quota must be positive");
    }
    for (auto const & [name, limit] : quotas_.per_type) {
        if (limit < 0) {
            throw error(error_code::invalid_value, "per-type quota for '" + name + "' is negative");
        }
    }
}

type_index vm_catalog::index_of(std::string const & name) const {
    for (type_index j = 0; j < types_.size(); ++j) {
        if (types_[j].name == name) {
            return j;
        }
    }
    throw error(error_code::unknown_type, "no VM type named '" + name + "'");
}

double vm_catalog::mu(std::string const & family) const {
    auto it = family_mu_.find(family);
    if (it == family_mu_.end()) {
        throw error(error_code::unknown_family, "family '" + family + "' is not in the catalog");
    }
    return it->second;
}

int vm_catalog::type_limit(type_index j) const {
    auto it = quotas_.per_type.find(types_.at(j).name);
    return it == quotas_.per_type.end() ? std::numeric_limits<int>::max() : it->second;
}

double vm_catalog::mean_bandwidth() const {
    if (types_.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (auto const & t : types_) {
        sum += t.bandwidth_mbps;
    }
    return sum / static_cast<double>(types_.size());
}

vm_catalog vm_catalog::with_usl(usl_params usl) const {
    return vm_catalog(types_, family_mu_, usl, quotas_);
}

vm_catalog vm_catalog::with_quotas(quotas q) const {
    return vm_catalog(types_, family_mu_, usl_, std::move(q));
}

vm_catalog vm_catalog::subset(std::vector<std::string> const & names) const {
    for (auto const & n : names) {
        (void)index_of(n);
    }
    std::vector<vm_type> kept;
    for (auto const & t : types_) {
        if (std::find(names.begin(), names.end(), t.name) != names.end()) {
            kept.push_back(t);
        }
    }
    return vm_catalog(std::move(kept), family_mu_, usl_, quotas_);
}

namespace {

std::map<std::string, double> default_family_mu() {
    return {{"c4", 0.8}, {"c5", 1.0}, {"m5", 0.8}};
}

} // namespace

vm_catalog builtin_ec2_catalog(scenario s) {
    std::vector<vm_type> types{
        {"c4.large", "c4", 2, 62.50, 0.114},     {"c4.xlarge", "c4", 4, 125.00, 0.227},
        {"c4.2xlarge", "c4", 8, 125.00, 0.454},  {"c4.4xlarge", "c4", 16, 125.00, 0.909},
        {"c4.8xlarge", "c4", 36, 1250.00, 1.817}, {"c5.large", "c5", 2, 1250.00, 0.097},
        {"c5.xlarge", "c5", 4, 1250.00, 0.194},  {"c5.2xlarge", "c5", 8, 1250.00, 0.388},
        {"c5.4xlarge", "c5", 16, 1250.00, 0.776}, {"c5.9xlarge", "c5", 36, 1250.00, 1.746},
        {"c5.12xlarge", "c5", 48, 1500.00, 2.328}, {"c5.18xlarge", "c5", 72, 3125.00, 3.492},
        {"c5.24xlarge", "c5", 96, 3125.00, 4.656}, {"m5.large", "m5", 2, 1250.00, 0.115},
        {"m5.xlarge", "m5", 4, 1250.00, 0.230},  {"m5.2xlarge", "m5", 8, 1250.00, 0.460},
        {"m5.4xlarge", "m5", 16, 1250.00, 0.920}, {"m5.8xlarge", "m5", 32, 1250.00, 1.840},
        {"m5.12xlarge", "m5", 48, 1250.00, 2.760}, {"m5.16xlarge", "m5", 64, 2500.00, 3.680},
        {"m5.24xlarge", "m5", 96, 3125.00, 5.520},
    };
    return vm_catalog(std::move(types), default_family_mu(), scenario_params(s));
}

std::vector<std::string> named_subset(std::string const & name) {
    std::vector<std::string> const c4{"c4.large", "c4.xlarge", "c4.2xlarge", "c4.4xlarge", "c4.8xlarge"};
    std::vector<std::string> const c5{"c5.large",   "c5.xlarge",   "c5.2xlarge",  "c5.4xlarge",
                                      "c5.9xlarge", "c5.12xlarge", "c5.18xlarge", "c5.24xlarge"};
    std::vector<std::string> const m5{"m5.large",   "m5.xlarge",   "m5.2xlarge",  "m5.4xlarge",
                                      "m5.8xlarge", "m5.12xlarge", "m5.16xlarge", "m5.24xlarge"};
    auto join = [](std::initializer_list<std::vector<std::string> const *> parts) {
        std::vector<std::string> out;
        for (auto const * p : parts) {
            out.insert(out.end(), p->begin(), p->end());
        }
        return out;
    };
    if (name == "theta2") return {c4[0], c4[1]};
    if (name == "theta4") return {c4[0], c4[1], c4[2], c4[3]};
    if (name == "theta5") return c4;
    if (name == "theta8") return m5;
    if (name == "theta13") return join({&c4, &m5});
    if (name == "theta21") return join({&c4, &c5, &m5});
    throw error(error_code::config_error, "unknown VM subset '" + name + "'");
}

namespace {

vm_type type_from_fields(std::vector<std::string> const & cells, std::vector<std::string> const & header,
                         std::string const & path) {
    auto field = [&](std::string const & key) -> std::string const & {
        auto it = std::find(header.begin(), header.end(), key);
        if (it == header.end()) {
            throw error(error_code::load_error, "'" + path + "' lacks column '" + key + "'");
        }
        return cells.at(static_cast<std::size_t>(it - header.begin()));
    };
    try {
        return vm_type{field("name"), field("family"), std::stoi(field("vcpus")),
                       std::stod(field("bandwidth_mbps")), std::stod(field("price_per_hour"))};
    } catch (std::logic_error const &) {
        throw error(error_code::load_error, "'" + path + "' has a malformed numeric cell");
    }
}

std::vector<std::string> split_csv_line(std::string const & line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
        cells.push_back(cell);
    }
    return cells;
}

} // namespace

vm_catalog load_catalog(std::string const & path, scenario s) {
    std::ifstream in(path);
    if (!in) {
        throw error(error_code::load_error, "cannot open catalog '" + path + "'");
    }
    std::vector<vm_type> types;
    bool const is_json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
    if (is_json) {
        try {
            nlohmann::json j;
            in >> j;
            for (auto const & row : j) {
                types.push_back(vm_type{row.at("name").get<std::string>(), row.at("family").get<std::string>(),
                                        row.at("vcpus").get<int>(), row.at("bandwidth_mbps").get<double>(),
                                        row.at("price_per_hour").get<double>()});
            }
        } catch (nlohmann::json::exception const & ex) {
            throw error(error_code::load_error, "'" + path + "': " + ex.what());
        }
    } else {
        std::string line;
        if (!std::getline(in, line)) {
            throw error(error_code::load_error, "'" + path + "' is empty");
        }
        auto const header = split_csv_line(line);
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \r\t") == std::string::npos) {
                continue;
            }
            auto const cells = split_csv_line(line);
            if (cells.size() != header.size()) {
                throw error(error_code::load_error, "'" + path + "' row has " + std::to_string(cells.size()) +
                                                        " cells, header has " + std::to_string(header.size()));
            }
            types.push_back(type_from_fields(cells, header, path));
        }
    }
    auto mu = default_family_mu();
    for (auto const & t : types) {
        mu.try_emplace(t.family, 1.0);
    }
    return vm_catalog(std::move(types), std::move(mu), scenario_params(s));
}

double usl_capacity(int vcpus, std::string const & family, vm_catalog const & catalog) {
    if (vcpus < 1) {
        throw error(error_code::invalid_value, "vcpus must be >= 1");
    }
    double const n = vcpus;
    auto const & usl = catalog.usl();
    return catalog.mu(family) * n / (1.0 + usl.alpha * (n - 1.0) + usl.beta * n * (n - 1.0));
}

double mean_time(task const & t, vm_type const & type, vm_catalog const & catalog) {
    if (t.runtime < 0.0) {
        throw error(error_code::invalid_value, "negative runtime for task '" + t.id + "'");
    }
    return t.runtime / usl_capacity(type.vcpus, type.family, catalog);
}

double transfer_time(task const & src, vm_type const & src_vm, vm_type const & dst_vm, bool same_instance) {
    if (same_instance || src.output_mb <= 0.0) {
        return 0.0;
    }
    return src.output_mb * 8.0 / std::min(src_vm.bandwidth_mbps, dst_vm.bandwidth_mbps);
}

distribution parse_distribution(std::string const & name) {
    if (name == "deterministic") return distribution::deterministic;
    if (name == "gamma") return distribution::gamma;
    if (name == "half-normal" || name == "half_normal" || name == "halfnormal") return distribution::half_normal;
    if (name == "uniform") return distribution::uniform;
    throw error(error_code::config_error, "unknown distribution '" + name + "'");
}

char const * to_string(distribution d) {
    switch (d) {
    case distribution::deterministic: return "deterministic";
    case distribution::gamma: return "gamma";
    case distribution::half_normal: return "half-normal";
    case distribution::uniform: return "uniform";
    }
    return "?";
}

double quantile(distribution d, double mean, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw error(error_code::bad_quantile_order, "quantile order must lie in (0, 1), got " + std::to_string(alpha));
    }
    switch (d) {
    case distribution::deterministic:
        return mean;
    case distribution::gamma:
        return -mean * std::log1p(-alpha);
    case distribution::half_normal: {
        double const sigma = mean * std::sqrt(std::numbers::pi / 2.0);
        return sigma * std::numbers::sqrt2 * boost::math::erf_inv(alpha);
    }
    case distribution::uniform:
        return 2.0 * mean * alpha;
    }
    return mean;
}

std::vector<double> time_matrix::row_means() const {
    std::vector<double> out(tasks(), 0.0);
    for (task_index v = 0; v < out.size(); ++v) {
        double sum = 0.0;
        for (type_index j = 0; j < types_; ++j) {
            sum += (*this)(v, j);
        }
        out[v] = sum / static_cast<double>(types_);
    }
    return out;
}

exec_time_model::exec_time_model(workflow const & wf, vm_catalog const & catalog, distribution d)
    : dist_(d), means_(wf.size(), catalog.size()) {
    for (type_index j = 0; j < catalog.size(); ++j) {
        double const capacity = usl_capacity(catalog.at(j).vcpus, catalog.at(j).family, catalog);
        for (task_index v = 0; v < wf.size(); ++v) {
            means_(v, j) = wf.at(v).runtime / capacity;
        }
    }
}

double exec_time_model::quantile(task_index v, type_index j, double alpha) const {
    return eposs::quantile(dist_, means_(v, j), alpha);
}

time_matrix exec_time_model::quantile_times(double alpha) const {
    time_matrix out(means_.tasks(), means_.types());
    for (task_index v = 0; v < means_.tasks(); ++v) {
        for (type_index j = 0; j < means_.types(); ++j) {
            out(v, j) = eposs::quantile(dist_, means_(v, j), alpha);
        }
    }
    return out;
}

} // namespace eposs
