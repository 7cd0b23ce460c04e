#include "tnep/planner.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>

#include "tnep/dc_power_flow.hpp"

namespace tnep {

namespace {

EvalOptions stage_options(const PlanRequest& r, Model model)
{
    EvalOptions o;
    o.model = model;
    o.security = r.security;
    o.gen = r.gen;
    o.dynamic = r.dynamic;
    return o;
}

Objective make_objective(const Evaluator& ev)
{
    return [&ev](std::span<const double> x) {
        const Evaluation e = ev.evaluate(x);
        return ObjectiveValue{e.penalty.m, !e.penalty.filtered.has_value(), e.penalty.pf_calls, e.penalty.feasible};
    };
}

DcStats dc_stats_of(const ExpansionPlan& plan, const Case& c, bool count_circuits)
{
    DcStats s;
    s.count_circuits = count_circuits;
    for (int n : plan.additions) s.n_dc += count_circuits ? n : (n > 0 ? 1 : 0);
    s.v0_dc = line_cost(plan, c);
    return s;
}

/// DC-stage plan lifted to the AC encoding: same circuit increments, no
/// reactive sources, case dispatch and setpoints.
std::vector<double> ac_seed(const Encoding& enc, const Case& c, const DynamicPlan& dc_plan)
{
    std::vector<ExpansionPlan> inc;
    for (const ExpansionPlan& p : dc_plan.increments()) {
        ExpansionPlan q = p;
        q.reactive.assign(c.reactive().size(), 0.0);
        inc.push_back(std::move(q));
    }
    return enc.encode(DynamicPlan(std::move(inc)));
}

} // namespace

Constructive constructive_plan(const Case& input, const PlanRequest& request)
{
    const Case c = planning_case(input, request);
    EvalOptions o = stage_options(request, Model::DC);
    o.dynamic = false;
    const int years = request.dynamic ? c.horizon()->years : 1;

    std::vector<std::size_t> order(c.corridors().size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return c.corridors()[a].circuit_cost > c.corridors()[b].circuit_cost;
    });

    Constructive out;
    ExpansionPlan p = ExpansionPlan::empty(c);
    for (std::size_t l = 0; l < p.additions.size(); ++l) p.additions[l] = c.corridors()[l].max_new;
    std::vector<ExpansionPlan> cumulative(static_cast<std::size_t>(years));
    for (int y = years - 1; y >= 0; --y) {
        const Case yc = c.horizon() ? c.year_view(request.dynamic ? y : 0) : c;
        const Evaluator ev(yc, o);
        auto m_of = [&]() {
            ++out.evaluations;
            return ev.evaluate(ev.encoding().encode(DynamicPlan({p}))).penalty.m;
        };
        double m = m_of();
        for (bool again = true; again;) {
            again = false;
            for (std::size_t l : order) {
                while (p.additions[l] > 0) {
                    --p.additions[l];
                    const double trial = m_of();
                    if (trial < m) {
                        m = trial;
                        again = true;
                    } else {
                        ++p.additions[l];
                        break;
                    }
                }
            }
        }
        cumulative[static_cast<std::size_t>(y)] = p;
    }

    std::vector<ExpansionPlan> inc;
    ExpansionPlan prev = ExpansionPlan::empty(c);
    for (const ExpansionPlan& cum : cumulative) {
        ExpansionPlan step = ExpansionPlan::empty(c);
        for (std::size_t l = 0; l < step.additions.size(); ++l) step.additions[l] = cum.additions[l] - prev.additions[l];
        inc.push_back(std::move(step));
        prev = cum;
    }
    out.plan = DynamicPlan(std::move(inc));
    return out;
}

Case planning_case(const Case& c, const PlanRequest& request)
{
    return request.l_max ? c.with_l_max(*request.l_max) : c;
}

PlanResult plan(const Case& input, const PlanRequest& request)
{
    if (request.trials < 1) throw std::invalid_argument("at least one trial is required");
    if (request.dynamic && !input.horizon()) throw CaseError("dynamic planning needs a horizon in the case");
    const auto t0 = std::chrono::steady_clock::now();
    const Case c = planning_case(input, request);

    const Evaluator dc_eval(c, stage_options(request, Model::DC));
    const bool two_stage = request.model == Model::DC || request.filters;

    PlanResult res;
    std::vector<double> seed0;
    if (two_stage) {
        const Constructive greedy = constructive_plan(c, request);
        res.evaluations += greedy.evaluations;
        seed0 = dc_eval.encoding().encode(greedy.plan);
    }
    double best_m = std::numeric_limits<double>::infinity();
    for (int t = 0; t < request.trials; ++t) {
        TrialResult tr;
        tr.seed = request.seed + static_cast<std::uint64_t>(t);
        std::vector<DynamicPlan> dc_plans;
        if (two_stage) {
            RunResult r = run(make_objective(dc_eval), dc_eval.encoding().bounds(), request.dc_params, tr.seed, {seed0});
            const Evaluation e = dc_eval.evaluate(r.best.x);
            tr.dc_feasible = e.penalty.feasible;
            const Decoded* stats_plan = &e.decoded;
            std::optional<Evaluation> ef;
            if (!tr.dc_feasible && r.best_feasible) {
                ef = dc_eval.evaluate(r.best_feasible->x);
                tr.dc_feasible = true;
                stats_plan = &ef->decoded;
                dc_plans.push_back(ef->decoded.increments);
            }
            dc_plans.push_back(e.decoded.increments);
            tr.dc_stats = dc_stats_of(stats_plan->years.back().plan, c, request.count_circuits);
            res.evaluations += r.stats.evaluations;
            tr.dc = StageResult{std::move(r.best), std::move(r.stats)};
        }

        if (request.model == Model::DC) {
            tr.m = tr.dc->best.m;
            res.ff_n += tr.dc->stats.ff_n;
            if (tr.m < best_m) {
                best_m = tr.m;
                res.best_trial = res.trials.size();
                res.genes = tr.dc->best.x;
            }
            res.trials.push_back(std::move(tr));
            continue;
        }

        EvalOptions ao = stage_options(request, Model::AC);
        tr.filters_used = two_stage && tr.dc_feasible;
        if (tr.filters_used) {
            ao.filters = true;
            ao.dc_stats = tr.dc_stats;
        }
        const Evaluator ac_eval(c, ao);
        std::vector<std::vector<double>> seeds;
        for (const DynamicPlan& p : dc_plans) seeds.push_back(ac_seed(ac_eval.encoding(), c, p));
        RunResult r = run(make_objective(ac_eval), ac_eval.encoding().bounds(), request.ac_params,
                          tr.seed ^ 0x9e3779b97f4a7c15ULL, seeds);
        res.ff_n += r.stats.ff_n;
        res.pf_n += r.stats.pf_n;
        res.evaluations += r.stats.evaluations;
        tr.m = r.best.m;
        if (tr.m < best_m) {
            best_m = tr.m;
            res.best_trial = res.trials.size();
            res.genes = r.best.x;
        }
        tr.ac = StageResult{std::move(r.best), std::move(r.stats)};
        res.trials.push_back(std::move(tr));
    }

    const TrialResult& bt = res.trials[res.best_trial];
    if (request.model == Model::DC) {
        res.best = dc_eval.evaluate(res.genes);
    } else {
        EvalOptions ao = stage_options(request, Model::AC);
        if (bt.filters_used) {
            ao.filters = true;
            ao.dc_stats = bt.dc_stats;
        }
        res.best = Evaluator(c, ao).evaluate(res.genes);
    }
    res.tp = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

PlanResult plan_static(const Case& c, PlanRequest request)
{
    request.dynamic = false;
    return plan(c, request);
}

PlanResult plan_dynamic(const Case& c, PlanRequest request)
{
    request.dynamic = true;
    return plan(c, request);
}

Burden compare_burden(const Case& c, const PlanRequest& request)
{
    Burden b;
    PlanRequest proposed = request;
    proposed.model = Model::AC;
    PlanRequest rigorous = proposed;
    rigorous.filters = false;
    b.proposed = plan(c, proposed);
    b.rigorous = plan(c, rigorous);
    b.ff_n_proposed = b.proposed.ff_n;
    b.ff_n_rigorous = b.rigorous.ff_n;
    b.pf_n_proposed = b.proposed.pf_n;
    b.pf_n_rigorous = b.rigorous.pf_n;
    b.reduction_pct =
        b.ff_n_rigorous > 0 ? 100.0 * (1.0 - static_cast<double>(b.ff_n_proposed) / b.ff_n_rigorous) : 0.0;
    return b;
}

PlanFile to_plan_file(const PlanResult& result, const Case& input, const PlanRequest& request)
{
    const Case c = planning_case(input, request);
    const Evaluation& e = result.best;
    PlanFile f;
    f.case_name = c.name();
    f.model = to_string(request.model);
    f.security = request.security ? "n1" : "none";
    f.generation = to_string(request.gen);
    f.horizon = request.dynamic ? "dynamic" : "static";
    f.filters = request.filters ? "on" : "off";
    f.l_max = c.limits().l_max;
    f.seed = request.seed;
    f.trials = request.trials;
    f.genes = result.genes;
    for (std::size_t y = 0; y < e.decoded.years.size(); ++y) {
        PlanYear py;
        const ExpansionPlan& inc = e.decoded.increments.increment(y);
        for (std::size_t l = 0; l < c.corridors().size(); ++l)
            if (inc.additions[l] > 0) py.additions[c.corridors()[l].id] = inc.additions[l];
        for (std::size_t k = 0; k < c.reactive().size(); ++k)
            if (inc.reactive[k] > 0.0) py.reactive[c.reactive()[k].bus] = inc.reactive[k];
        const YearDecision& yd = e.decoded.years[y];
        const std::vector<double>& pg = e.p_gen[y].empty() ? yd.p_gen : e.p_gen[y];
        for (std::size_t g = 0; g < c.generators().size(); ++g) py.p_gen[c.generators()[g].bus] = pg[g];
        for (std::size_t i = 0; i < c.buses().size(); ++i)
            if (c.buses()[i].kind != BusKind::PQ) py.v_set[c.buses()[i].id] = yd.v_set[i];
        py.v0 = e.cost.per_year_v0.empty() ? e.cost.v0 : e.cost.per_year_v0[y];
        py.v1 = e.cost.per_year_v1.empty() ? e.cost.v1 : e.cost.per_year_v1[y];
        py.l_index = e.l_index[y];
        f.years.push_back(std::move(py));
    }
    f.v0 = e.cost.v0;
    f.v1 = e.cost.v1;
    f.v = e.cost.v;
    f.v_dym = e.cost.v_dym;
    f.m = e.penalty.m;
    f.e_g = e.penalty.e_g;
    f.h = e.penalty.h;
    f.feasible = e.penalty.feasible;
    f.ff_n = result.ff_n;
    f.pf_n = result.pf_n;
    f.evaluations = result.evaluations;
    const TrialResult& bt = result.trials[result.best_trial];
    f.iterations = static_cast<int>((bt.ac ? bt.ac->stats.history.size() : bt.dc->stats.history.size()) - 1);
    return f;
}

PlanRequest request_of(const PlanFile& f)
{
    PlanRequest r;
    r.model = f.model == "dc" ? Model::DC : Model::AC;
    r.security = f.security == "n1";
    r.gen = f.generation == "fixed" ? GenerationMode::Fixed : GenerationMode::Dispatch;
    r.dynamic = f.horizon == "dynamic";
    r.filters = f.filters != "off";
    r.l_max = f.l_max;
    r.seed = f.seed;
    r.trials = f.trials;
    return r;
}

Decoded decode_plan_file(const PlanFile& f, const Case& c)
{
    Decoded d;
    d.increments = plan_increments(f, c);
    for (std::size_t y = 0; y < f.years.size(); ++y) {
        const Case yc = c.horizon() ? c.year_view(static_cast<int>(y)) : c;
        YearDecision yd = case_controls(yc, d.increments.cumulative(y));
        for (const auto& [bus, p] : f.years[y].p_gen) {
            const auto g = yc.generator_at(yc.bus_index(bus));
            if (!g) throw CaseError("plan has generation at bus " + std::to_string(bus) + " without a generator");
            yd.p_gen[*g] = p;
        }
        for (const auto& [bus, v] : f.years[y].v_set) yd.v_set[yc.bus_index(bus)] = v;
        d.years.push_back(std::move(yd));
    }
    return d;
}

Evaluation reevaluate(const PlanFile& f, const Case& input)
{
    PlanRequest r = request_of(f);
    const Case c = planning_case(input, r);
    EvalOptions o = stage_options(r, r.model);
    const Evaluator ev(c, o);
    const Decoded d = decode_plan_file(f, c);
    if (static_cast<int>(d.years.size()) != ev.years()) throw CaseError("plan horizon does not match the case");
    return ev.evaluate(d);
}

} // namespace tnep
