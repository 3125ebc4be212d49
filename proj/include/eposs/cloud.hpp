#pragma once

#include <cstddef>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <eposs/dag.hpp>

namespace eposs {

using type_index = std::size_t;

struct vm_type {
    std::string name;
    std::string family;
    int vcpus = 1;
    double bandwidth_mbps = 0.0;
    double price_per_hour = 0.0;
};

// USL contention (alpha) and coherency (beta) coefficients
struct usl_params {
    double alpha = 0.01;
    double beta = 0.0;
};

enum class scenario { a, b, c };

usl_params scenario_params(scenario s);
scenario parse_scenario(std::string const & name);
char const * to_string(scenario s);

enum class quota_unit { vms, vcpus };

struct quotas {
    std::optional<double> total;              // M^R, unlimited when empty
    quota_unit unit = quota_unit::vcpus;
    std::map<std::string, int> per_type;      // M_j^type by type name; absent = unlimited

    bool unlimited() const { return !total && per_type.empty(); }
};

class vm_catalog {
public:
    vm_catalog() = default;
    vm_catalog(std::vector<vm_type> types, std::map<std::string, double> family_mu, usl_params usl,
               quotas q = {});

    std::vector<vm_type> const & types() const noexcept { return types_; }
    vm_type const & at(type_index j) const { return types_.at(j); }
    std::size_t size() const noexcept { return types_.size(); }

    // throws unknown_type
    type_index index_of(std::string const & name) const;

    // throws unknown_family
    double mu(std::string const & family) const;

    std::map<std::string, double> const & family_mu() const noexcept { return family_mu_; }
    usl_params const & usl() const noexcept { return usl_; }
    quotas const & limits() const noexcept { return quotas_; }

    // per-type limit for type j, or max int when unlimited
    int type_limit(type_index j) const;

    double mean_bandwidth() const;

    vm_catalog with_usl(usl_params usl) const;
    vm_catalog with_quotas(quotas q) const;
    // keeps the named types in catalog order; throws unknown_type
    vm_catalog subset(std::vector<std::string> const & names) const;

private:
    std::vector<vm_type> types_;
    std::map<std::string, double> family_mu_;
    usl_params usl_;
    quotas quotas_;
};

// The 21 EC2 reference types (c4, c5, m5) with mu = 1.0 for c5 and 0.8 for c4/m5.
vm_catalog builtin_ec2_catalog(scenario s = scenario::a);

// Named nested slices: theta2, theta4, theta5, theta8, theta13, theta21.
std::vector<std::string> named_subset(std::string const & name);

// CSV with header name,family,vcpus,bandwidth_mbps,price_per_hour, or a JSON array of
// objects with the same keys. Family coefficients default to the builtin ones.
vm_catalog load_catalog(std::string const & path, scenario s = scenario::a);

double usl_capacity(int vcpus, std::string const & family, vm_catalog const & catalog);
double mean_time(task const & t, vm_type const & type, vm_catalog const & catalog);

// Seconds to move the source task's output between two VMs; zero when co-located.
double transfer_time(task const & src, vm_type const & src_vm, vm_type const & dst_vm, bool same_instance);

enum class distribution { deterministic, gamma, half_normal, uniform };

distribution parse_distribution(std::string const & name);
char const * to_string(distribution d);

// Closed-form quantile of the mean-matched distribution; throws bad_quantile_order
// unless 0 < alpha < 1.
double quantile(distribution d, double mean, double alpha);

template <class Rng>
double sample(distribution d, double mean, Rng & rng) {
    if (mean <= 0.0) {
        return 0.0;
    }
    switch (d) {
    case distribution::deterministic:
        return mean;
    case distribution::gamma:
        return std::exponential_distribution<double>(1.0 / mean)(rng);
    case distribution::half_normal: {
        double const sigma = mean * std::sqrt(std::numbers::pi / 2.0);
        return std::abs(std::normal_distribution<double>(0.0, sigma)(rng));
    }
    case distribution::uniform:
        return std::uniform_real_distribution<double>(0.0, 2.0 * mean)(rng);
    }
    return mean;
}

// Dense task x type matrix of seconds.
class time_matrix {
public:
    time_matrix() = default;
    time_matrix(std::size_t tasks, std::size_t types, double fill = 0.0)
        : types_(types), values_(tasks * types, fill) {}

    double operator()(task_index v, type_index j) const { return values_[v * types_ + j]; }
    double & operator()(task_index v, type_index j) { return values_[v * types_ + j]; }

    std::size_t tasks() const noexcept { return types_ == 0 ? 0 : values_.size() / types_; }
    std::size_t types() const noexcept { return types_; }

    // arithmetic mean over types per task
    std::vector<double> row_means() const;

private:
    std::size_t types_ = 0;
    std::vector<double> values_;
};

// Per (task, type) random execution times: mean from USL scaling, shape from the distribution.
class exec_time_model {
public:
    exec_time_model(workflow const & wf, vm_catalog const & catalog, distribution d);

    distribution kind() const noexcept { return dist_; }
    double mean(task_index v, type_index j) const { return means_(v, j); }
    time_matrix const & mean_times() const noexcept { return means_; }

    double quantile(task_index v, type_index j, double alpha) const;
    time_matrix quantile_times(double alpha) const;

    template <class Rng>
    double sample(task_index v, type_index j, Rng & rng) const {
        return eposs::sample(dist_, means_(v, j), rng);
    }

private:
    distribution dist_;
    time_matrix means_;
};

} // namespace eposs
