#pragma once

#include <stdexcept>
#include <string>

namespace eposs {

enum class error_code {
    cycle_detected,
    dangling_edge,
    duplicate_task,
    duplicate_edge,
    self_loop,
    invalid_value,
    missing_time,
    unknown_family,
    unknown_type,
    bad_quantile_order,
    unscheduled_predecessor,
    invalid_schedule,
    incomplete_schedule,
    no_feasible_solution,
    bad_reference,
    bad_spec,
    load_error,
    config_error,
    io_error,
    timeout,
};

char const * to_string(error_code code);

class error : public std::runtime_error {
public:
    error(error_code code, std::string const & what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    error_code code() const noexcept { return code_; }

private:
    error_code code_;
};

// thrown by moheft when every extension of some ranked task is pruned
class no_feasible_solution : public error {
public:
    no_feasible_solution(std::size_t rank_position, std::string const & task_id)
        : error(error_code::no_feasible_solution,
                "no feasible extension while placing task #" + std::to_string(rank_position) +
                    " (" + task_id + ")"),
          rank_position_(rank_position) {}

    std::size_t rank_position() const noexcept { return rank_position_; }

private:
    std::size_t rank_position_;
};

} // namespace eposs
