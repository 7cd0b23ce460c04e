#include "tnep/fitness.hpp"

#include <algorithm>
#include <cmath>

#include "tnep/dc_power_flow.hpp"

namespace tnep {

namespace {

constexpr double kBoundSlack = 1.0e-9;

std::vector<Case> planning_years(const Case& c, bool dynamic)
{
    std::vector<Case> out;
    if (dynamic) {
        if (!c.horizon()) throw CaseError("dynamic planning needs a horizon in the case");
        for (int y = 0; y < c.horizon()->years; ++y) out.push_back(c.year_view(y));
    } else {
        out.push_back(c.horizon() ? c.year_view(0) : c);
    }
    return out;
}

double band(double x, double lo, double hi, double kappa)
{
    return penalty_term(x, lo - kBoundSlack, hi + kBoundSlack, kappa);
}

} // namespace

const char* to_string(Model m) { return m == Model::DC ? "dc" : "ac"; }
const char* to_string(GenerationMode m) { return m == GenerationMode::Fixed ? "fixed" : "dispatch"; }
const char* to_string(FilterReason r) { return r == FilterReason::CorridorBand ? "corridor_band" : "cost_cap"; }

double penalty_term(double x, double lo, double hi, double kappa)
{
    if (x > hi) return kappa * (x - hi) * (x - hi);
    if (x < lo) return kappa * (lo - x) * (lo - x);
    return 0.0;
}

std::pair<int, int> corridor_band(int n_dc)
{
    // Integer arithmetic keeps ceil(0.9 n) and floor(1.3 n) exact.
    return {(9 * n_dc + 9) / 10, (13 * n_dc) / 10};
}

std::optional<FilterReason> heuristic_filter(const ExpansionPlan& plan, const Case& c, const DcStats& stats)
{
    int count = 0;
    for (int n : plan.additions) count += stats.count_circuits ? n : (n > 0 ? 1 : 0);
    const auto [lo, hi] = corridor_band(stats.n_dc);
    if (count < lo || count > hi) return FilterReason::CorridorBand;
    if (line_cost(plan, c) > 2.0 * stats.v0_dc + 1e-9) return FilterReason::CostCap;
    return std::nullopt;
}

YearDecision case_controls(const Case& year_case, const ExpansionPlan& plan)
{
    YearDecision yd;
    yd.plan = plan;
    for (const Generator& g : year_case.generators()) yd.p_gen.push_back(g.p_dispatch);
    for (const Bus& b : year_case.buses()) yd.v_set.push_back(b.v_setpoint);
    return yd;
}

// ---------------------------------------------------------------- encoding

Encoding::Encoding(const Case& c, Model model, GenerationMode gen, int years)
    : case_(c), model_(model), gen_(gen), years_(years)
{
    if (years < 1) throw CaseError("encoding needs at least one year");
    if (years > 1 && !c.horizon()) throw CaseError("dynamic encoding needs a horizon");
    year_cases_ = planning_years(c, years > 1);
    for (std::size_t l = 0; l < c.corridors().size(); ++l)
        if (c.corridors()[l].max_new > 0) expandable_.push_back(l);
    for (std::size_t g = 0; g < c.generators().size(); ++g)
        if (g != c.slack_generator()) dispatchable_.push_back(g);
    for (std::size_t i = 0; i < c.buses().size(); ++i)
        if (c.buses()[i].kind != BusKind::PQ) regulated_.push_back(i);

    for (int y = 0; y < years; ++y) {
        const Case& cy = year_cases_[static_cast<std::size_t>(y)];
        for (std::size_t l : expandable_) {
            bounds_.lo.push_back(0.0);
            bounds_.hi.push_back(c.corridors()[l].max_new);
            bounds_.integer.push_back(true);
        }
        if (model_ == Model::AC)
            for (const ReactiveCandidate& r : c.reactive()) {
                bounds_.lo.push_back(0.0);
                bounds_.hi.push_back(r.q_max);
                bounds_.integer.push_back(false);
            }
        if (gen_ == GenerationMode::Dispatch) {
            for (std::size_t g : dispatchable_) {
                bounds_.lo.push_back(cy.generators()[g].p_min);
                bounds_.hi.push_back(cy.generators()[g].p_max);
                bounds_.integer.push_back(false);
            }
            if (model_ == Model::AC)
                for (std::size_t i : regulated_) {
                    bounds_.lo.push_back(cy.buses()[i].v_min);
                    bounds_.hi.push_back(cy.buses()[i].v_max);
                    bounds_.integer.push_back(false);
                }
        }
        if (y == 0) block_ = bounds_.size();
    }
}

Decoded Encoding::decode(std::span<const double> x) const
{
    if (x.size() != dim()) throw CaseError("candidate dimension does not match the encoding");
    const Case& c = case_;
    std::vector<ExpansionPlan> inc;
    Decoded d;
    ExpansionPlan cum = ExpansionPlan::empty(c);
    for (int y = 0; y < years_; ++y) {
        const Case& cy = year_cases_[static_cast<std::size_t>(y)];
        std::size_t pos = static_cast<std::size_t>(y) * block_;
        ExpansionPlan step = ExpansionPlan::empty(c);
        for (std::size_t l : expandable_) {
            const int want = static_cast<int>(std::lround(std::max(0.0, x[pos++])));
            const int room = c.corridors()[l].max_new - cum.additions[l];
            step.additions[l] = std::clamp(want, 0, std::max(0, room));
            cum.additions[l] += step.additions[l];
        }
        if (model_ == Model::AC)
            for (std::size_t k = 0; k < c.reactive().size(); ++k) {
                const double room = c.reactive()[k].q_max - cum.reactive[k];
                step.reactive[k] = std::clamp(x[pos++], 0.0, std::max(0.0, room));
                cum.reactive[k] += step.reactive[k];
            }
        YearDecision yd = case_controls(cy, cum);
        if (gen_ == GenerationMode::Dispatch) {
            for (std::size_t g : dispatchable_) yd.p_gen[g] = x[pos++];
            if (model_ == Model::AC)
                for (std::size_t i : regulated_) yd.v_set[i] = x[pos++];
        }
        inc.push_back(step);
        d.years.push_back(std::move(yd));
    }
    d.increments = DynamicPlan(std::move(inc));
    return d;
}

std::vector<double> Encoding::encode(const DynamicPlan& plan, const std::vector<YearDecision>* controls) const
{
    if (static_cast<int>(plan.years()) != years_) throw CaseError("plan horizon does not match the encoding");
    std::vector<double> x;
    x.reserve(dim());
    for (int y = 0; y < years_; ++y) {
        const auto yi = static_cast<std::size_t>(y);
        const Case& cy = year_cases_[yi];
        const ExpansionPlan& step = plan.increment(yi);
        for (std::size_t l : expandable_) x.push_back(step.additions[l]);
        if (model_ == Model::AC)
            for (std::size_t k = 0; k < case_.reactive().size(); ++k) x.push_back(step.reactive[k]);
        if (gen_ == GenerationMode::Dispatch) {
            const YearDecision fallback = case_controls(cy, step);
            const YearDecision& yd = controls != nullptr ? (*controls)[yi] : fallback;
            for (std::size_t g : dispatchable_)
                x.push_back(std::clamp(yd.p_gen[g], cy.generators()[g].p_min, cy.generators()[g].p_max));
            if (model_ == Model::AC)
                for (std::size_t i : regulated_)
                    x.push_back(std::clamp(yd.v_set[i], cy.buses()[i].v_min, cy.buses()[i].v_max));
        }
    }
    return x;
}

// --------------------------------------------------------------- evaluator

Evaluator::Evaluator(const Case& c, EvalOptions opts)
    : case_(c),
      opts_(std::move(opts)),
      year_cases_(planning_years(c, opts_.dynamic)),
      encoding_(c, opts_.model, opts_.gen, static_cast<int>(year_cases_.size()))
{
    if (opts_.filters && !opts_.dc_stats) throw CaseError("filters need DC stage statistics");
}

void Evaluator::add(Evaluation& ev, const char* cls, int state, double amount) const
{
    if (amount == 0.0) return;
    ev.penalty.h += amount;
    ev.penalty.per_class[cls] += amount;
    ev.penalty.per_state[state] += amount;
}

Evaluation Evaluator::evaluate(std::span<const double> x) const { return evaluate(encoding_.decode(x)); }

Evaluation Evaluator::evaluate(const Decoded& d) const
{
    Evaluation ev;
    ev.decoded = d;
    const ExpansionPlan& final_plan = d.years.back().plan;
    if (opts_.dynamic) {
        ev.cost = discounted_cost(d.increments, *case_.horizon(), case_);
    } else {
        ev.cost = total_cost(final_plan, case_);
        ev.cost.v_dym = ev.cost.v;
    }
    const double v = opts_.dynamic ? ev.cost.v_dym : ev.cost.v;
    ev.l_index.assign(d.years.size(), 0.0);
    ev.p_gen.assign(d.years.size(), {});

    if (opts_.filters && opts_.model == Model::AC) {
        if (auto why = heuristic_filter(final_plan, case_, *opts_.dc_stats)) {
            ev.penalty.filtered = why;
            add(ev, "filter", 0, case_.penalties().infeasible);
            ev.penalty.m = v + ev.penalty.h;
            return ev;
        }
    }

    for (int y = 0; y < static_cast<int>(d.years.size()); ++y) {
        if (opts_.model == Model::AC)
            evaluate_year_ac(y, d.years[static_cast<std::size_t>(y)], ev);
        else
            evaluate_year_dc(y, d.years[static_cast<std::size_t>(y)], ev);
    }
    ev.penalty.m = v + case_.penalties().eta * ev.penalty.e_g + ev.penalty.h;
    ev.penalty.feasible = ev.penalty.h == 0.0 && ev.penalty.e_g == 0.0;
    return ev;
}

void Evaluator::evaluate_year_ac(int y, const YearDecision& yd, Evaluation& ev) const
{
    const Case& cy = year_cases_[static_cast<std::size_t>(y)];
    const PenaltyConfig& pc = case_.penalties();
    const OperatingLimits& lim = case_.limits();

    Controls base_ctl = default_controls(cy, yd.plan);
    base_ctl.p_gen = yd.p_gen;
    for (std::size_t i = 0; i < cy.buses().size(); ++i)
        if (cy.buses()[i].kind != BusKind::PQ) base_ctl.v_set[i] = yd.v_set[i];

    for (std::size_t k = 0; k < cy.reactive().size(); ++k)
        add(ev, "qreac_bound", 0, band(yd.plan.reactive[k], 0.0, cy.reactive()[k].q_max, pc.kappa_qreac));

    // Operating-limit penalties of one solved state.
    auto state_penalties = [&](const PFSolution& pf, const Admittance& adm, int state,
                               std::optional<std::size_t> outage) {
        for (std::size_t i = 0; i < cy.buses().size(); ++i) {
            if (!adm.energized[i]) continue;
            const Bus& b = cy.buses()[i];
            add(ev, "v_bound", state, band(pf.v[i], b.v_min, b.v_max, pc.kappa_v));
        }
        for (std::size_t l = 0; l < cy.corridors().size(); ++l) {
            const int n = yd.plan.circuits(cy, l);
            if (n <= 0) continue;
            const double limit = derated_limit(cy.corridors()[l], n, outage && *outage == l);
            add(ev, "flow_bound", state, band(pf.s_from[l], 0.0, limit, pc.kappa_flow));
            add(ev, "flow_bound", state, band(pf.s_to[l], 0.0, limit, pc.kappa_flow));
        }
        for (std::size_t g = 0; g < cy.generators().size(); ++g) {
            if (!adm.energized[cy.generator_bus(g)]) continue;
            const Generator& gen = cy.generators()[g];
            add(ev, "qgen_bound", state, band(pf.q_gen[g], gen.q_min, gen.q_max, pc.kappa_qgen));
            add(ev, "pgen_bound", state, band(pf.p_gen[g], gen.p_min, gen.p_max, pc.kappa_pgen));
        }
    };
    auto infeasible = [&](int state, const PFSolution* pf) {
        if (pf != nullptr) ev.penalty.e_g += pf->mismatch_sq;
        add(ev, "infeasible", state, pc.infeasible);
    };

    const std::vector<int> base_circuits = circuits_in_service(cy, yd.plan, std::nullopt);
    if (!is_connected(cy, base_circuits)) {
        infeasible(0, nullptr);
        return;
    }
    const Admittance base_adm = build_admittance(cy, base_circuits);
    const PFSolution base = solve_ac(base_adm, cy, base_ctl);
    ++ev.penalty.pf_calls;
    ev.p_gen[static_cast<std::size_t>(y)] = base.p_gen;
    if (!base.converged) {
        infeasible(0, &base);
        return;
    }
    state_penalties(base, base_adm, 0, std::nullopt);
    try {
        const double li = l_index(base, base_adm, cy);
        ev.l_index[static_cast<std::size_t>(y)] = li;
        add(ev, "l_index_bound", 0, band(li, lim.l_min, lim.l_max, pc.kappa_l));
    } catch (const NumericalError&) {
        infeasible(0, nullptr);
    }

    if (!opts_.security) return;
    const std::size_t sg = cy.slack_generator();
    const Generator& slack = cy.generators()[sg];
    for (const ContingencyId& cont : contingency_list(cy, yd.plan)) {
        const std::vector<int> circuits = circuits_in_service(cy, yd.plan, cont.corridor);
        if (!is_connected(cy, circuits)) {
            infeasible(cont.k, nullptr);
            continue;
        }
        const Admittance adm = build_admittance(cy, circuits);
        AcOptions o;
        o.start = &base;
        PFSolution pf = solve_ac(adm, cy, base_ctl, o);
        ++ev.penalty.pf_calls;
        if (pf.converged && opts_.gen == GenerationMode::Dispatch) {
            const double sp = pf.p_gen[sg];
            const double imbalance = sp - std::clamp(sp, slack.p_min, slack.p_max);
            if (imbalance != 0.0) {
                Controls ctl = base_ctl;
                ctl.p_gen = corrective_dispatch(base_ctl.p_gen, imbalance, cy, opts_.gen);
                PFSolution again = solve_ac(adm, cy, ctl, o);
                ++ev.penalty.pf_calls;
                pf = std::move(again);
            }
        }
        if (!pf.converged) {
            infeasible(cont.k, &pf);
            continue;
        }
        state_penalties(pf, adm, cont.k, cont.corridor);
    }
}

void Evaluator::evaluate_year_dc(int y, const YearDecision& yd, Evaluation& ev) const
{
    const Case& cy = year_cases_[static_cast<std::size_t>(y)];
    const PenaltyConfig& pc = case_.penalties();
    const std::size_t sg = cy.slack_generator();
    const Generator& slack = cy.generators()[sg];

    auto state_penalties = [&](const DcSolution& sol, int state, std::optional<std::size_t> outage) {
        for (std::size_t l = 0; l < cy.corridors().size(); ++l) {
            const int n = yd.plan.circuits(cy, l);
            if (n <= 0) continue;
            const double limit = derated_limit(cy.corridors()[l], n, outage && *outage == l);
            add(ev, "flow_bound", state, band(std::abs(sol.flow[l]), 0.0, limit, pc.kappa_flow));
        }
        add(ev, "pgen_bound", state, band(sol.slack_injection + cy.buses()[cy.slack_index()].p_demand, slack.p_min,
                                          slack.p_max, pc.kappa_pgen));
    };

    const std::vector<int> base_circuits = circuits_in_service(cy, yd.plan, std::nullopt);
    if (!is_connected(cy, base_circuits)) {
        add(ev, "infeasible", 0, pc.infeasible);
        return;
    }
    std::optional<DcNetwork> net;
    try {
        net.emplace(cy, yd.plan, yd.p_gen);
    } catch (const NumericalError&) {
        add(ev, "infeasible", 0, pc.infeasible);
        return;
    }
    std::vector<double> p_gen = yd.p_gen;
    p_gen[sg] = net->base().slack_injection + cy.buses()[cy.slack_index()].p_demand;
    ev.p_gen[static_cast<std::size_t>(y)] = p_gen;
    state_penalties(net->base(), 0, std::nullopt);

    if (!opts_.security) return;
    for (const ContingencyId& cont : contingency_list(cy, yd.plan)) {
        try {
            state_penalties(net->outage(cont.corridor), cont.k, cont.corridor);
        } catch (const IslandingError&) {
            add(ev, "infeasible", cont.k, pc.infeasible);
        } catch (const NumericalError&) {
            add(ev, "infeasible", cont.k, pc.infeasible);
        }
    }
}

Evaluation evaluate_static(const ExpansionPlan& plan, const YearDecision& controls, const Case& c,
                           const EvalOptions& opts)
{
    EvalOptions o = opts;
    o.dynamic = false;
    const Evaluator ev(c, o);
    Decoded d;
    d.increments = DynamicPlan({plan});
    YearDecision yd = controls;
    yd.plan = plan;
    d.years.push_back(std::move(yd));
    return ev.evaluate(d);
}

Evaluation evaluate_dynamic(const DynamicPlan& plan, const std::vector<YearDecision>& controls, const Case& c,
                            const EvalOptions& opts)
{
    EvalOptions o = opts;
    o.dynamic = true;
    const Evaluator ev(c, o);
    if (controls.size() != plan.years() || static_cast<int>(plan.years()) != ev.years())
        throw CaseError("dynamic plan does not match the horizon");
    Decoded d;
    d.increments = plan;
    for (std::size_t y = 0; y < plan.years(); ++y) {
        YearDecision yd = controls[y];
        yd.plan = plan.cumulative(y);
        d.years.push_back(std::move(yd));
    }
    return ev.evaluate(d);
}

double dc_fitness(const ExpansionPlan& plan, const Case& c, bool security)
{
    EvalOptions o;
    o.model = Model::DC;
    o.security = security;
    o.gen = GenerationMode::Fixed;
    return evaluate_static(plan, case_controls(c, plan), c, o).penalty.m;
}

} // namespace tnep
