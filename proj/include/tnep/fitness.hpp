#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tnep/ac_power_flow.hpp"
#include "tnep/network.hpp"
#include "tnep/security.hpp"

namespace tnep {

enum class Model { DC, AC };
enum class FilterReason { CorridorBand, CostCap };

const char* to_string(Model m);
const char* to_string(GenerationMode m);
const char* to_string(FilterReason r);

/// Quadratic band penalty: zero inside [lo, hi], kappa * (distance to the
/// violated bound)^2 outside.
double penalty_term(double x, double lo, double hi, double kappa);

/// Summary of the DC stage used to prune AC candidates.
struct DcStats {
    int n_dc = 0;       // corridors (or circuits) added by the DC plan
    double v0_dc = 0.0; // line cost of the DC plan
    bool count_circuits = false;
};

/// Admissible corridor-count band [ceil(0.9 n), floor(1.3 n)].
std::pair<int, int> corridor_band(int n_dc);

std::optional<FilterReason> heuristic_filter(const ExpansionPlan& plan, const Case& c, const DcStats& stats);

struct Bounds {
    std::vector<double> lo;
    std::vector<double> hi;
    std::vector<bool> integer;

    std::size_t size() const { return lo.size(); }
};

/// Decisions of one planning year: cumulative plan plus the operating
/// controls (generator outputs, per-bus voltage setpoints).
struct YearDecision {
    ExpansionPlan plan;
    std::vector<double> p_gen;
    std::vector<double> v_set;
};

struct Decoded {
    DynamicPlan increments;
    std::vector<YearDecision> years;
};

/// Maps optimizer vectors to plans. Each year holds a block of integer
/// circuit increments for expandable corridors, then (AC only) reactive
/// increments, then in dispatch mode the outputs of non-slack generators and
/// (AC only) the setpoints of pv/slack buses. Cumulative additions and
/// reactive sizes are clipped to their per-corridor and per-bus maxima.
class Encoding {
public:
    Encoding(const Case& c, Model model, GenerationMode gen, int years);

    const Bounds& bounds() const { return bounds_; }
    std::size_t dim() const { return bounds_.size(); }
    int years() const { return years_; }

    Decoded decode(std::span<const double> x) const;
    /// Inverse of decode for in-range data. Missing controls fall back to the
    /// year's case dispatch and setpoints.
    std::vector<double> encode(const DynamicPlan& plan, const std::vector<YearDecision>* controls = nullptr) const;

private:
    const Case& case_;
    std::vector<Case> year_cases_;
    Model model_;
    GenerationMode gen_;
    int years_ = 1;
    std::vector<std::size_t> expandable_;
    std::vector<std::size_t> dispatchable_;
    std::vector<std::size_t> regulated_; // pv/slack bus indices
    std::size_t block_ = 0;
    Bounds bounds_;
};

struct EvalOptions {
    Model model = Model::AC;
    bool security = false;
    GenerationMode gen = GenerationMode::Dispatch;
    bool dynamic = false;
    bool filters = false;
    std::optional<DcStats> dc_stats;
};

struct PenaltyBreakdown {
    double e_g = 0.0;
    double h = 0.0;
    std::map<std::string, double> per_class;
    std::map<int, double> per_state; // summed over years
    double m = 0.0;
    std::optional<FilterReason> filtered;
    long pf_calls = 0;
    bool feasible = false;
};

struct Evaluation {
    PenaltyBreakdown penalty;
    CostBreakdown cost;
    Decoded decoded;
    std::vector<double> l_index;             // base case per year
    std::vector<std::vector<double>> p_gen;  // solved base-case outputs per year
};

/// Modified objective over base and contingency states of every year.
class Evaluator {
public:
    Evaluator(const Case& c, EvalOptions opts);

    const Case& planning_case() const { return case_; }
    const EvalOptions& options() const { return opts_; }
    const Encoding& encoding() const { return encoding_; }
    int years() const { return static_cast<int>(year_cases_.size()); }
    const Case& year_case(int y) const { return year_cases_[static_cast<std::size_t>(y)]; }

    Evaluation evaluate(std::span<const double> x) const;
    Evaluation evaluate(const Decoded& d) const;

private:
    void evaluate_year_ac(int y, const YearDecision& yd, Evaluation& ev) const;
    void evaluate_year_dc(int y, const YearDecision& yd, Evaluation& ev) const;
    void add(Evaluation& ev, const char* cls, int state, double amount) const;

    const Case& case_;
    EvalOptions opts_;
    std::vector<Case> year_cases_;
    Encoding encoding_;
};

/// Single-year AC evaluation of an explicit plan and controls.
Evaluation evaluate_static(const ExpansionPlan& plan, const YearDecision& controls, const Case& c,
                           const EvalOptions& opts);

/// Multi-year AC evaluation of explicit increments and per-year controls.
Evaluation evaluate_dynamic(const DynamicPlan& plan, const std::vector<YearDecision>& controls, const Case& c,
                            const EvalOptions& opts);

/// DC-stage objective for a static plan at the case dispatch.
double dc_fitness(const ExpansionPlan& plan, const Case& c, bool security);

/// Controls of year `y` at the case dispatch and setpoints.
YearDecision case_controls(const Case& year_case, const ExpansionPlan& plan);

} // namespace tnep
