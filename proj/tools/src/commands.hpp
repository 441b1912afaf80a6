#pragma once

#include "config.hpp"

#include "nodeid/identify.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nodeid::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitAssertion = 1,  // a run finished but an internal check failed
    kExitUsage = 2,      // bad arguments or configuration
    kExitRuntime = 3,    // I/O or numerical failure
};

/// Failure that aborts a command. `code` is a short machine token.
class CommandError : public std::runtime_error {
public:
    CommandError(ExitCode exit, std::string code, const std::string& message, std::string key = {})
        : std::runtime_error(message), exit_(exit), code_(std::move(code)), key_(std::move(key)) {}
    ExitCode exit_code() const { return exit_; }
    const std::string& code() const { return code_; }
    const std::string& key() const { return key_; }

private:
    ExitCode exit_;
    std::string code_;
    std::string key_;
};

/// error command=<cmd> code=<code> [key=<key>] message="<text>"
std::string error_line(const std::string& command, const std::string& code, const std::string& message,
                       const std::string& key = {});

struct GenOptions {
    std::size_t n = 0;
    int r = 3;
    std::optional<std::uint64_t> seed;
    std::string out;
};

struct PeOptions {
    std::string graph;
    std::size_t M = 8;
    std::string out;
};

struct TreeKernelOptions {
    int r = 3;
    double t = 1.0;
    int d_max = 8;
    double tail_eps = 1e-12;
    std::string out;
};

struct SeparationOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::string out;  // directory
};

struct InvarianceOptions {
    std::string graph;
    std::size_t M = 8;
    std::size_t trials = 20;
    std::optional<std::uint64_t> seed;
    std::string out;
};

struct InjectivityConfig {
    std::vector<std::size_t> M_values{2, 4, 8};
    std::vector<double> eps_values{0.3};
    std::size_t pairs = 1000000;
    std::vector<std::size_t> n_values{256, 512, 1024};
    double C = 1.0;
    std::size_t trials = 20;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

struct InjectivityOptions {
    std::string config;  // optional
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::string out;  // directory
};

/// Validated configs. Every problem is reported through the returned issues;
/// the config is only usable when the list is empty.
SeparationConfig separation_config(KeyValueConfig& kv, std::optional<std::uint64_t> seed_override,
                                   std::optional<unsigned> threads_override);
InjectivityConfig injectivity_config(KeyValueConfig& kv, std::optional<std::uint64_t> seed_override,
                                     std::optional<unsigned> threads_override);

// Commands write data files only; `diag` receives warnings and summaries.
// Usage and runtime failures throw CommandError; failed internal checks are
// printed as error lines and reported through the return value.
int cmd_gen(const GenOptions& opts, std::ostream& diag);
int cmd_pe(const PeOptions& opts, std::ostream& diag);
int cmd_treekernel(const TreeKernelOptions& opts, std::ostream& diag);
int cmd_separation(const SeparationOptions& opts, std::ostream& diag);
int cmd_invariance(const InvarianceOptions& opts, std::ostream& diag);
int cmd_injectivity(const InjectivityOptions& opts, std::ostream& diag);

}  // namespace nodeid::cli
