#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace nodeid::cli {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(trim(item));
    return parts;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
    KeyValueConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            cfg.add_issue("", "line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            cfg.add_issue("", "line " + std::to_string(lineno) + ": empty key");
            continue;
        }
        if (!cfg.values_.emplace(key, value).second)
            cfg.add_issue(key, "line " + std::to_string(lineno) + ": duplicate key");
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        KeyValueConfig cfg;
        cfg.add_issue("", "cannot open config file " + path);
        return cfg;
    }
    return parse(in);
}

std::optional<std::string> KeyValueConfig::raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::int64_t KeyValueConfig::integer(const std::string& key, std::int64_t fallback, std::int64_t min_value) {
    const auto text = raw(key);
    if (!text) return fallback;
    std::int64_t v = 0;
    if (!parse_number(*text, v)) {
        add_issue(key, "not an integer: '" + *text + "'");
        return fallback;
    }
    if (v < min_value) {
        add_issue(key, "must be at least " + std::to_string(min_value));
        return fallback;
    }
    return v;
}

std::uint64_t KeyValueConfig::unsigned_integer(const std::string& key, std::uint64_t fallback) {
    const auto text = raw(key);
    if (!text) return fallback;
    std::uint64_t v = 0;
    if (!parse_number(*text, v)) {
        add_issue(key, "not an unsigned integer: '" + *text + "'");
        return fallback;
    }
    return v;
}

double KeyValueConfig::real(const std::string& key, double fallback, bool positive) {
    const auto text = raw(key);
    if (!text) return fallback;
    double v = 0;
    if (!parse_number(*text, v) || !std::isfinite(v)) {
        add_issue(key, "not a finite number: '" + *text + "'");
        return fallback;
    }
    if (positive && !(v > 0)) {
        add_issue(key, "must be positive");
        return fallback;
    }
    return v;
}

bool KeyValueConfig::boolean(const std::string& key, bool fallback) {
    const auto text = raw(key);
    if (!text) return fallback;
    if (*text == "true" || *text == "1") return true;
    if (*text == "false" || *text == "0") return false;
    add_issue(key, "expected true or false");
    return fallback;
}

std::vector<std::size_t> KeyValueConfig::size_list(const std::string& key, std::vector<std::size_t> fallback) {
    const auto text = raw(key);
    if (!text) return fallback;
    std::vector<std::size_t> out;
    for (const auto& item : split_commas(*text)) {
        const auto dots = item.find("..");
        std::size_t lo = 0, hi = 0;
        if (dots != std::string::npos) {
            if (!parse_number(trim(item.substr(0, dots)), lo) || !parse_number(trim(item.substr(dots + 2)), hi) ||
                hi < lo) {
                add_issue(key, "bad range '" + item + "'");
                return fallback;
            }
        } else if (!parse_number(item, lo)) {
            add_issue(key, "bad list entry '" + item + "'");
            return fallback;
        } else {
            hi = lo;
        }
        for (std::size_t v = lo; v <= hi; ++v) out.push_back(v);
    }
    if (out.empty()) {
        add_issue(key, "list must not be empty");
        return fallback;
    }
    return out;
}

std::vector<double> KeyValueConfig::real_list(const std::string& key, std::vector<double> fallback) {
    const auto text = raw(key);
    if (!text) return fallback;
    std::vector<double> out;
    for (const auto& item : split_commas(*text)) {
        double v = 0;
        if (!parse_number(item, v) || !std::isfinite(v)) {
            add_issue(key, "bad list entry '" + item + "'");
            return fallback;
        }
        out.push_back(v);
    }
    if (out.empty()) {
        add_issue(key, "list must not be empty");
        return fallback;
    }
    return out;
}

void KeyValueConfig::reject_unknown(const std::vector<std::string>& known) {
    for (const auto& [key, value] : values_)
        if (std::find(known.begin(), known.end(), key) == known.end()) add_issue(key, "unknown key");
}

void KeyValueConfig::add_issue(std::string key, std::string message) {
    issues_.push_back({std::move(key), std::move(message)});
}

}  // namespace nodeid::cli
