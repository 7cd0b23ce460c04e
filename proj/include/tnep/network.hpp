#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tnep {

/// Raised for malformed or inconsistent network data (bad ids, broken
/// references, violated type invariants).
class CaseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class BusKind { Slack, PV, PQ };

struct Bus {
    int id = 0;
    BusKind kind = BusKind::PQ;
    double p_demand = 0.0;   // p.u. on system base
    double q_demand = 0.0;   // p.u.
    double v_setpoint = 1.0; // p.u., meaningful for pv/slack only
    double v_min = 0.95;
    double v_max = 1.05;

    bool operator==(const Bus&) const = default;
};

struct Generator {
    int bus = 0;
    double p_min = 0.0;
    double p_max = 0.0;
    double q_min = 0.0;
    double q_max = 0.0;
    double participation = 1.0;
    /// Scheduled real output used by the fixed-generation scenario and as the
    /// starting dispatch of the dispatchable scenario.
    double p_dispatch = 0.0;

    bool operator==(const Generator&) const = default;
};

/// A sub-corridor of identical circuits between two buses.
struct Corridor {
    int id = 0;
    int from_bus = 0;
    int to_bus = 0;
    double r = 0.0;
    double x = 0.0;
    double b_shunt = 0.0; // total line charging of one circuit
    double rating = 0.0;  // apparent-power limit of one circuit
    double circuit_cost = 0.0;
    int existing = 0;
    int max_new = 0;

    bool operator==(const Corridor&) const = default;
};

struct ReactiveCandidate {
    int bus = 0;
    double fixed_cost = 0.0;
    double variable_cost = 0.0; // currency per kvar
    double q_max = 0.0;         // p.u.

    bool operator==(const ReactiveCandidate&) const = default;
};

struct OperatingLimits {
    double v_min = 0.95;
    double v_max = 1.05;
    double l_min = 0.0;
    double l_max = 0.45;

    bool operator==(const OperatingLimits&) const = default;
};

/// Multi-year horizon: discount factor and demand/generation growth per year.
struct HorizonConfig {
    int years = 1;
    std::vector<double> discount;
    std::vector<double> load_scale;
    std::vector<double> gen_scale;

    bool operator==(const HorizonConfig&) const = default;
};

/// Penalty weights of the modified objective. Units follow the case currency.
struct PenaltyConfig {
    double eta = 1.0e5;
    double kappa_v = 1.0e5;
    double kappa_flow = 1.0e5;
    double kappa_qgen = 1.0e5;
    double kappa_pgen = 1.0e5;
    double kappa_qreac = 1.0e5;
    double kappa_l = 1.0e5;
    double infeasible = 1.0e4;

    bool operator==(const PenaltyConfig&) const = default;
};

/// Reactive sizes at or below this threshold count as "no device installed".
inline constexpr double kReactiveEpsilon = 1.0e-6;

/// Immutable network description. Element order is the order of the case
/// file; all plan and solution vectors are indexed by position, not id.
class Case {
public:
    struct Data {
        std::string name;
        double base_mva = 100.0;
        std::string currency_unit;
        std::vector<Bus> buses;
        std::vector<Generator> generators;
        std::vector<Corridor> corridors;
        std::vector<ReactiveCandidate> reactive;
        OperatingLimits limits;
        std::optional<HorizonConfig> horizon;
        std::optional<std::map<int, double>> generation_plan;
        PenaltyConfig penalties;

        bool operator==(const Data&) const = default;
    };

    /// Validates every type invariant and builds the id lookups.
    explicit Case(Data data);

    const std::string& name() const { return data_.name; }
    double base_mva() const { return data_.base_mva; }
    const std::string& currency_unit() const { return data_.currency_unit; }
    const std::vector<Bus>& buses() const { return data_.buses; }
    const std::vector<Generator>& generators() const { return data_.generators; }
    const std::vector<Corridor>& corridors() const { return data_.corridors; }
    const std::vector<ReactiveCandidate>& reactive() const { return data_.reactive; }
    const OperatingLimits& limits() const { return data_.limits; }
    const std::optional<HorizonConfig>& horizon() const { return data_.horizon; }
    const std::optional<std::map<int, double>>& generation_plan() const { return data_.generation_plan; }
    const PenaltyConfig& penalties() const { return data_.penalties; }
    const Data& data() const { return data_; }

    std::size_t bus_index(int bus_id) const;
    std::size_t corridor_index(int corridor_id) const;
    /// Corridor index for the (unordered) bus pair; first match in file order.
    std::optional<std::size_t> find_corridor(int bus_a, int bus_b) const;
    std::size_t slack_index() const { return slack_; }
    /// Generator index at a bus, if any (at most one generator per bus).
    std::optional<std::size_t> generator_at(std::size_t bus_index) const;
    std::optional<std::size_t> reactive_at(std::size_t bus_index) const;
    std::size_t slack_generator() const { return slack_gen_; }
    /// Bus indices of a corridor's terminals.
    std::pair<std::size_t, std::size_t> ends(std::size_t corridor) const { return ends_[corridor]; }
    std::size_t generator_bus(std::size_t gen) const { return gen_bus_[gen]; }

    double total_p_demand() const;
    double total_q_demand() const;

    /// Demand and generator limits of planning year `year` (0-based). Fixed
    /// dispatch scales with demand; generator limits with the generation scale.
    Case year_view(int year) const;

    Case with_l_max(double l_max) const;
    Case with_penalties(const PenaltyConfig& cfg) const;

private:
    Data data_;
    std::unordered_map<int, std::size_t> bus_lookup_;
    std::unordered_map<int, std::size_t> corridor_lookup_;
    std::vector<std::optional<std::size_t>> gen_at_bus_;
    std::vector<std::optional<std::size_t>> reac_at_bus_;
    std::vector<std::pair<std::size_t, std::size_t>> ends_;
    std::vector<std::size_t> gen_bus_;
    std::size_t slack_ = 0;
    std::size_t slack_gen_ = 0;
};

/// Circuit additions per corridor and reactive source size per candidate, both
/// indexed in case order.
struct ExpansionPlan {
    std::vector<int> additions;
    std::vector<double> reactive;

    static ExpansionPlan empty(const Case& c);
    int circuits(const Case& c, std::size_t corridor) const {
        return c.corridors()[corridor].existing + additions[corridor];
    }
    bool operator==(const ExpansionPlan&) const = default;
};

/// Per-year increments; cumulative sums are non-decreasing by construction.
class DynamicPlan {
public:
    DynamicPlan() = default;
    explicit DynamicPlan(std::vector<ExpansionPlan> increments);

    std::size_t years() const { return increments_.size(); }
    const std::vector<ExpansionPlan>& increments() const { return increments_; }
    const ExpansionPlan& increment(std::size_t year) const { return increments_.at(year); }
    /// Sum of increments of years 0..year inclusive.
    ExpansionPlan cumulative(std::size_t year) const;

private:
    std::vector<ExpansionPlan> increments_;
};

struct CostBreakdown {
    double v0 = 0.0;
    double v1 = 0.0;
    double v = 0.0;
    double v_dym = 0.0;
    std::vector<double> per_year;    // undiscounted v_ty
    std::vector<double> per_year_v0;
    std::vector<double> per_year_v1;
};

double line_cost(const ExpansionPlan& plan, const Case& c);
double reactive_cost(const ExpansionPlan& plan, const Case& c);
CostBreakdown total_cost(const ExpansionPlan& plan, const Case& c);

/// Cost of each year's increments discounted to the first year. A reactive
/// source pays its fixed cost only in the year it first appears.
CostBreakdown discounted_cost(const DynamicPlan& plan, const HorizonConfig& horizon, const Case& c);

/// kvar per p.u. of reactive power on the case base.
inline double kvar_per_pu(const Case& c) { return c.base_mva() * 1000.0; }

int occupied_corridors(const ExpansionPlan& plan);

const char* to_string(BusKind kind);
BusKind bus_kind_from_string(const std::string& s);

} // namespace tnep
