#include <eposs/error.hpp>

namespace eposs {

char const * to_string(error_code code) {
    switch (code) {
    case error_code::cycle_detected: return "CycleDetected";
    case error_code::dangling_edge: return "DanglingEdge";
    case error_code::duplicate_task: return "DuplicateTask";
    case error_code::duplicate_edge: return "DuplicateEdge";
    case error_code::self_loop: return "SelfLoop";
    case error_code::invalid_value: return "InvalidValue";
    case error_code::missing_time: return "MissingTime";
    case error_code::unknown_family: return "UnknownFamily";
    case error_code::unknown_type: return "UnknownType";
    case error_code::bad_quantile_order: return "BadQuantileOrder";
    case error_code::unscheduled_predecessor: return "UnscheduledPredecessor";
    case error_code::invalid_schedule: return "InvalidSchedule";
    case error_code::incomplete_schedule: return "IncompleteSchedule";
    case error_code::no_feasible_solution: return "NoFeasibleSolution";
    case error_code::bad_reference: return "BadReference";
    case error_code::bad_spec: return "BadSpec";
    case error_code::load_error: return "LoadError";
    case error_code::config_error: return "ConfigError";
    case error_code::io_error: return "IoError";
    case error_code::timeout: return "Timeout";
    }
    return "Unknown";
}

} // namespace eposs
