#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "capmimo/physics_kernel.hpp"

namespace capmimo {

enum class Command { sweep_receiver, sweep_transceiver, sweep_grid, dof, bounds };

std::string_view to_string(Command command);

/// Fully resolved run: every default filled in, every invariant checked.
struct RunConfig {
    Command command = Command::sweep_receiver;
    std::string scenario = "default";
    SystemConfig system;  // `distance` is unused; see `distances`
    std::vector<double> distances{10.0, 1.0, 0.1};
    std::vector<std::size_t> m_values;   // sweep-receiver/-transceiver and bounds
    std::vector<std::size_t> m1_values;  // sweep-grid
    std::vector<std::size_t> m2_values;  // sweep-grid
    std::size_t ref_m = 0;
    std::size_t inner_points = 0;
    double dof_threshold = 0.01;
    std::string out;
    std::string log_base = "e";
    bool keep_going = false;
    bool timing = false;

    /// key = value lines, one per setting, in a form the config file accepts.
    std::string resolved_text() const;
};

/// Raised for a bad command line or config file. `exit_code` is what the
/// process should return (0 for --help).
class UsageError : public std::exception {
public:
    UsageError(std::string message, int exit_code) : message_(std::move(message)), exit_code_(exit_code) {}
    const char* what() const noexcept override { return message_.c_str(); }
    int exit_code() const { return exit_code_; }

private:
    std::string message_;
    int exit_code_;
};

/// Parses arguments (program name excluded). A `--config <file>` supplies
/// key = value settings; explicit flags override it. Throws UsageError.
RunConfig parse_config(const std::vector<std::string>& args);

/// Executes the run, writing the CSV and its .meta sidecar. Progress and the
/// resolved configuration go to `log`. Returns the process exit status.
int run(const RunConfig& config, std::ostream& log);

/// Convenience entry point used by the executable.
int cli_main(int argc, char** argv);

}  // namespace capmimo
