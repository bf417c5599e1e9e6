#include "algforge/report.hpp"

#include <json.hpp>

#include <sstream>

namespace algforge {

std::string Report::human() const {
    std::ostringstream o;
    o << check << ": " << (pass ? "pass" : "fail") << "\n";
    if (!witness.empty()) o << "  witness: " << witness << "\n";
    for (auto& [k, v] : details) o << "  " << k << ": " << v << "\n";
    return o.str();
}

std::string Report::json() const {
    nlohmann::ordered_json j;
    j["check"] = check;
    j["verdict"] = pass ? "pass" : "fail";
    j["witness"] = witness.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(witness);
    nlohmann::ordered_json d = nlohmann::ordered_json::object();
    for (auto& [k, v] : details) d[k] = v;
    j["details"] = d;
    j["timing_ms"] = timing_ms;
    return j.dump(2) + "\n";
}

}  // namespace algforge
