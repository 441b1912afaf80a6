#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nodeid::cli {

struct ConfigIssue {
    std::string key;  // empty for line-level problems
    std::string message;
};

/// Plain `key = value` file. '#' starts a comment; blank lines are ignored.
/// Parse problems are collected, not thrown, so a run can list all of them.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::istream& in);
    static KeyValueConfig load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::optional<std::string> raw(const std::string& key) const;

    // Typed getters record an issue and return the fallback on bad input.
    std::int64_t integer(const std::string& key, std::int64_t fallback, std::int64_t min_value);
    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback);
    double real(const std::string& key, double fallback, bool positive);
    bool boolean(const std::string& key, bool fallback);
    /// Comma list of non-negative integers; `a..b` expands to an inclusive range.
    std::vector<std::size_t> size_list(const std::string& key, std::vector<std::size_t> fallback);
    std::vector<double> real_list(const std::string& key, std::vector<double> fallback);

    /// Flags every key not in `known`.
    void reject_unknown(const std::vector<std::string>& known);
    void add_issue(std::string key, std::string message);

    const std::vector<ConfigIssue>& issues() const { return issues_; }

private:
    std::map<std::string, std::string> values_;
    std::vector<ConfigIssue> issues_;
};

}  // namespace nodeid::cli
