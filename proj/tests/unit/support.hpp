#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "tnep/case_io.hpp"

namespace test {

inline std::filesystem::path source_dir() { return TNEP_SOURCE_DIR; }

inline tnep::Case fixture(const std::string& name) { return tnep::load_case(source_dir() / "data" / (name + ".json")); }

inline const nlohmann::json& oracles()
{
    static const nlohmann::json j = [] {
        std::ifstream in(source_dir() / "tests" / "data" / "oracles.json");
        return nlohmann::json::parse(in);
    }();
    return j;
}

/// Plan from {"a-b": n} additions; reactive sources empty.
inline tnep::ExpansionPlan plan_of(const tnep::Case& c, const std::map<std::string, int>& adds)
{
    tnep::ExpansionPlan p = tnep::ExpansionPlan::empty(c);
    for (const auto& [key, n] : adds) {
        int a = 0, b = 0;
        std::sscanf(key.c_str(), "%d-%d", &a, &b);
        p.additions[*c.find_corridor(a, b)] = n;
    }
    return p;
}

inline tnep::ExpansionPlan plan_of(const tnep::Case& c, const nlohmann::json& adds)
{
    return plan_of(c, adds.get<std::map<std::string, int>>());
}

/// Slack bus 1 feeding a pq load at bus 2 through one circuit.
inline tnep::Case two_bus(double p, double q = 0.0, double x = 0.1, double r = 0.0, double rating = 10.0)
{
    tnep::Case::Data d;
    d.name = "two-bus";
    d.currency_unit = "1";
    d.buses = {{1, tnep::BusKind::Slack, 0.0, 0.0, 1.0, 0.9, 1.1}, {2, tnep::BusKind::PQ, p, q, 1.0, 0.9, 1.1}};
    d.generators = {{1, 0.0, 10.0, -10.0, 10.0, 1.0, p}};
    d.corridors = {{1, 1, 2, r, x, 0.0, rating, 1.0, 1, 1}};
    return tnep::Case(d);
}

inline std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace test
