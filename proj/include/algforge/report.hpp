#pragma once

#include <string>
#include <utility>
#include <vector>

namespace algforge {

// Outcome of one CLI command. Both renderings carry the same fields; only the JSON one
// includes the wall-clock timing.
struct Report {
    std::string check;
    bool pass = true;
    std::string witness;
    std::vector<std::pair<std::string, std::string>> details;
    double timing_ms = 0;

    void add(std::string key, std::string value) { details.emplace_back(std::move(key), std::move(value)); }
    std::string human() const;
    std::string json() const;
};

}  // namespace algforge
