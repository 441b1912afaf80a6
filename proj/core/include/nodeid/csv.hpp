#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

namespace nodeid {

/// Shortest round-trippable text for a double: printf "%.17g".
std::string format_real(double x);

/// Comma-separated row writer for numeric outputs.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    CsvWriter& field(std::string_view s);
    CsvWriter& field(double x);
    CsvWriter& field(std::int64_t x);
    CsvWriter& field(std::uint64_t x);
    CsvWriter& field(int x) { return field(static_cast<std::int64_t>(x)); }
    CsvWriter& field(unsigned x) { return field(static_cast<std::uint64_t>(x)); }
    void end_row();

private:
    void sep();
    std::ostream& out_;
    bool first_ = true;
};

}  // namespace nodeid
