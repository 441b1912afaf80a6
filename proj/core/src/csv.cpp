#include "nodeid/csv.hpp"

#include <cstdio>

namespace nodeid {

std::string format_real(double x) {
    char buf[40];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf, static_cast<std::size_t>(len));
}

void CsvWriter::sep() {
    if (!first_) out_ << ',';
    first_ = false;
}

CsvWriter& CsvWriter::field(std::string_view s) {
    sep();
    out_ << s;
    return *this;
}

CsvWriter& CsvWriter::field(double x) {
    sep();
    out_ << format_real(x);
    return *this;
}

CsvWriter& CsvWriter::field(std::int64_t x) {
    sep();
    out_ << x;
    return *this;
}

CsvWriter& CsvWriter::field(std::uint64_t x) {
    sep();
    out_ << x;
    return *this;
}

void CsvWriter::end_row() {
    out_ << '\n';
    first_ = true;
}

}  // namespace nodeid
