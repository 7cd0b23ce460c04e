#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tnep/case_io.hpp"
#include "tnep/fitness.hpp"
#include "tnep/mabc.hpp"

namespace tnep {

struct PlanRequest {
    Model model = Model::AC;
    bool security = false;
    GenerationMode gen = GenerationMode::Dispatch;
    bool dynamic = false;
    bool filters = true; // false = rigorous single-stage mode
    bool count_circuits = false;
    std::optional<double> l_max;
    MabcParams dc_params{5, 2, 6, 15, 1.5};
    MabcParams ac_params{20, 2, 6, 30, 1.5};
    std::uint64_t seed = 1;
    int trials = 1;
};

struct StageResult {
    Candidate best;
    RunStats stats;
};

struct TrialResult {
    std::uint64_t seed = 0;
    std::optional<StageResult> dc;
    std::optional<StageResult> ac;
    DcStats dc_stats;     // of the best penalty-free DC plan when the DC best is penalised
    bool dc_feasible = false; // a penalty-free DC plan was found
    bool filters_used = false;
    double m = 0.0; // final-stage best
};

struct PlanResult {
    Evaluation best;            // final-stage best, re-evaluated with the stage options
    std::vector<double> genes;
    std::vector<TrialResult> trials;
    std::size_t best_trial = 0;
    long ff_n = 0;        // counted AC-stage evaluations over all trials (DC stage for dc requests)
    long pf_n = 0;
    long evaluations = 0; // every objective call of every stage
    double tp = 0.0;
};

struct Constructive {
    DynamicPlan plan;
    long evaluations = 0;
};

/// Backward-elimination DC plan that seeds stage 1. Starting from every
/// candidate circuit built, circuits are removed (most expensive corridors
/// first) while the modified objective decreases. Dynamic horizons run from
/// the last year backwards so each year's plan contains the previous one.
Constructive constructive_plan(const Case& c, const PlanRequest& request);

/// Both static and dynamic planning; `request.dynamic` selects the horizon.
PlanResult plan(const Case& c, const PlanRequest& request);
PlanResult plan_static(const Case& c, PlanRequest request);
PlanResult plan_dynamic(const Case& c, PlanRequest request);

/// Applies the request's l_max override.
Case planning_case(const Case& c, const PlanRequest& request);

struct Burden {
    long ff_n_proposed = 0;
    long ff_n_rigorous = 0;
    long pf_n_proposed = 0;
    long pf_n_rigorous = 0;
    double reduction_pct = 0.0;
    PlanResult proposed;
    PlanResult rigorous;
};

/// Runs the request as given against its rigorous (filters off) counterpart
/// with matched seeds and trials.
Burden compare_burden(const Case& c, const PlanRequest& request);

PlanFile to_plan_file(const PlanResult& result, const Case& c, const PlanRequest& request);

/// Request fields recorded in a plan file.
PlanRequest request_of(const PlanFile& f);

/// Per-year cumulative plans and stored controls of a plan file.
Decoded decode_plan_file(const PlanFile& f, const Case& c);

/// Fresh evaluation of a stored plan with its recorded options, filters off.
Evaluation reevaluate(const PlanFile& f, const Case& c);

} // namespace tnep
