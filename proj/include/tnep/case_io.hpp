#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tnep/network.hpp"

namespace tnep {

inline constexpr const char* kCaseSchema = "tnep-case/1";
inline constexpr const char* kPlanSchema = "tnep-plan/1";

/// Parse or schema failure while reading a case or plan document. The message
/// carries the file, line/column or JSON field path of the problem.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Case load_case(const std::filesystem::path& path);
Case parse_case(const std::string& text, const std::string& origin = "<memory>");
std::string dump_case(const Case& c);
void save_case(const Case& c, const std::filesystem::path& path);

/// One planning year of a stored result. Maps are keyed by corridor id and bus
/// id respectively; additions and reactive entries are that year's increments.
struct PlanYear {
    std::map<int, int> additions;
    std::map<int, double> reactive;
    std::map<int, double> p_gen;
    std::map<int, double> v_set;
    double v0 = 0.0;
    double v1 = 0.0;
    double l_index = 0.0;

    bool operator==(const PlanYear&) const = default;
};

struct PlanFile {
    std::string case_name;
    std::string model = "ac";
    std::string security = "none";
    std::string generation = "dispatch";
    std::string horizon = "static";
    std::string filters = "on";
    double l_max = 0.45;
    std::uint64_t seed = 0;
    int trials = 1;
    std::vector<double> genes;
    std::vector<PlanYear> years;
    double v0 = 0.0;
    double v1 = 0.0;
    double v = 0.0;
    double v_dym = 0.0;
    double m = 0.0;
    double e_g = 0.0;
    double h = 0.0;
    bool feasible = false;
    std::int64_t ff_n = 0;
    std::int64_t pf_n = 0;
    std::int64_t evaluations = 0;
    int iterations = 0;

    bool operator==(const PlanFile&) const = default;
};

std::string dump_plan(const PlanFile& plan);
PlanFile parse_plan(const std::string& text, const std::string& origin = "<memory>");
void save_plan(const PlanFile& plan, const std::filesystem::path& path);
PlanFile load_plan(const std::filesystem::path& path);

/// Rebuilds the per-year increments of a stored plan against its case.
DynamicPlan plan_increments(const PlanFile& plan, const Case& c);

/// FNV-1a 64-bit digest of a file's bytes; fixture checksums are pinned with it.
std::uint64_t file_checksum(const std::filesystem::path& path);

} // namespace tnep
