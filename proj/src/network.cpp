#include "tnep/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace tnep {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw CaseError(msg); }

} // namespace

Case::Case(Data data) : data_(std::move(data))
{
    if (data_.base_mva <= 0.0) fail("base_mva must be positive");
    if (data_.buses.empty()) fail("case has no buses");

    int slack_count = 0;
    for (std::size_t i = 0; i < data_.buses.size(); ++i) {
        const Bus& b = data_.buses[i];
        if (!bus_lookup_.emplace(b.id, i).second) fail("duplicate bus id " + std::to_string(b.id));
        if (b.kind == BusKind::Slack) {
            ++slack_count;
            slack_ = i;
        }
        if (b.kind == BusKind::PQ && (b.p_demand < 0.0 || b.q_demand < 0.0))
            fail("negative demand at pq bus " + std::to_string(b.id));
        if (!(b.v_min > 0.0 && b.v_min < b.v_max))
            fail("voltage bounds must satisfy 0 < v_min < v_max at bus " + std::to_string(b.id));
    }
    if (slack_count != 1) fail("case must have exactly one slack bus, found " + std::to_string(slack_count));

    gen_at_bus_.assign(data_.buses.size(), std::nullopt);
    reac_at_bus_.assign(data_.buses.size(), std::nullopt);

    for (std::size_t g = 0; g < data_.generators.size(); ++g) {
        const Generator& gen = data_.generators[g];
        auto it = bus_lookup_.find(gen.bus);
        if (it == bus_lookup_.end()) fail("generator references unknown bus " + std::to_string(gen.bus));
        if (data_.buses[it->second].kind == BusKind::PQ)
            fail("generator at pq bus " + std::to_string(gen.bus));
        if (gen.p_min > gen.p_max) fail("generator p_min > p_max at bus " + std::to_string(gen.bus));
        if (gen.q_min > gen.q_max) fail("generator q_min > q_max at bus " + std::to_string(gen.bus));
        if (gen.participation < 0.0) fail("negative participation at bus " + std::to_string(gen.bus));
        if (gen_at_bus_[it->second]) fail("more than one generator at bus " + std::to_string(gen.bus));
        gen_at_bus_[it->second] = g;
        gen_bus_.push_back(it->second);
    }
    for (std::size_t i = 0; i < data_.buses.size(); ++i) {
        if (data_.buses[i].kind != BusKind::PQ && !gen_at_bus_[i])
            fail("pv/slack bus " + std::to_string(data_.buses[i].id) + " has no generator");
    }
    slack_gen_ = *gen_at_bus_[slack_];

    for (std::size_t l = 0; l < data_.corridors.size(); ++l) {
        const Corridor& cor = data_.corridors[l];
        if (!corridor_lookup_.emplace(cor.id, l).second) fail("duplicate corridor id " + std::to_string(cor.id));
        if (!bus_lookup_.contains(cor.from_bus) || !bus_lookup_.contains(cor.to_bus))
            fail("corridor " + std::to_string(cor.id) + " references an unknown bus");
        if (cor.from_bus == cor.to_bus) fail("corridor " + std::to_string(cor.id) + " is a self loop");
        if (!(cor.x > 0.0)) fail("corridor " + std::to_string(cor.id) + " must have x > 0");
        if (!(cor.rating > 0.0)) fail("corridor " + std::to_string(cor.id) + " must have rating > 0");
        if (cor.r < 0.0) fail("corridor " + std::to_string(cor.id) + " has negative resistance");
        if (cor.existing < 0 || cor.max_new < 0)
            fail("corridor " + std::to_string(cor.id) + " has negative circuit counts");
        ends_.emplace_back(bus_lookup_.at(cor.from_bus), bus_lookup_.at(cor.to_bus));
    }

    for (std::size_t k = 0; k < data_.reactive.size(); ++k) {
        const ReactiveCandidate& rc = data_.reactive[k];
        auto it = bus_lookup_.find(rc.bus);
        if (it == bus_lookup_.end()) fail("reactive candidate references unknown bus " + std::to_string(rc.bus));
        if (data_.buses[it->second].kind != BusKind::PQ)
            fail("reactive candidate at non-pq bus " + std::to_string(rc.bus));
        if (rc.q_max < 0.0) fail("reactive candidate q_max < 0 at bus " + std::to_string(rc.bus));
        if (reac_at_bus_[it->second]) fail("duplicate reactive candidate at bus " + std::to_string(rc.bus));
        reac_at_bus_[it->second] = k;
    }

    if (data_.horizon) {
        HorizonConfig& h = *data_.horizon;
        if (h.years < 1) fail("horizon years must be >= 1");
        const auto n = static_cast<std::size_t>(h.years);
        if (h.discount.empty()) h.discount.assign(n, 1.0);
        if (h.load_scale.empty()) h.load_scale.assign(n, 1.0);
        if (h.gen_scale.empty()) h.gen_scale = h.load_scale;
        if (h.discount.size() != n || h.load_scale.size() != n || h.gen_scale.size() != n)
            fail("horizon vectors must have one entry per year");
        for (double d : h.discount)
            if (!(d > 0.0 && d <= 1.0)) fail("discount factors must lie in (0, 1]");
    }

    if (data_.generation_plan) {
        for (const auto& [bus, p] : *data_.generation_plan) {
            auto it = bus_lookup_.find(bus);
            if (it == bus_lookup_.end() || !gen_at_bus_[it->second])
                fail("generation_plan references bus " + std::to_string(bus) + " without a generator");
            data_.generators[*gen_at_bus_[it->second]].p_dispatch = p;
        }
    }

    const PenaltyConfig& p = data_.penalties;
    for (double w : {p.eta, p.kappa_v, p.kappa_flow, p.kappa_qgen, p.kappa_pgen, p.kappa_qreac, p.kappa_l, p.infeasible})
        if (!(w > 0.0)) fail("penalty weights must be positive");
}

std::size_t Case::bus_index(int bus_id) const
{
    auto it = bus_lookup_.find(bus_id);
    if (it == bus_lookup_.end()) throw CaseError("unknown bus id " + std::to_string(bus_id));
    return it->second;
}

std::size_t Case::corridor_index(int corridor_id) const
{
    auto it = corridor_lookup_.find(corridor_id);
    if (it == corridor_lookup_.end()) throw CaseError("unknown corridor id " + std::to_string(corridor_id));
    return it->second;
}

std::optional<std::size_t> Case::find_corridor(int bus_a, int bus_b) const
{
    for (std::size_t l = 0; l < data_.corridors.size(); ++l) {
        const Corridor& c = data_.corridors[l];
        if ((c.from_bus == bus_a && c.to_bus == bus_b) || (c.from_bus == bus_b && c.to_bus == bus_a)) return l;
    }
    return std::nullopt;
}

std::optional<std::size_t> Case::generator_at(std::size_t bus_index) const { return gen_at_bus_.at(bus_index); }

std::optional<std::size_t> Case::reactive_at(std::size_t bus_index) const { return reac_at_bus_.at(bus_index); }

double Case::total_p_demand() const
{
    return std::accumulate(data_.buses.begin(), data_.buses.end(), 0.0,
                           [](double s, const Bus& b) { return s + b.p_demand; });
}

double Case::total_q_demand() const
{
    return std::accumulate(data_.buses.begin(), data_.buses.end(), 0.0,
                           [](double s, const Bus& b) { return s + b.q_demand; });
}

Case Case::year_view(int year) const
{
    if (!data_.horizon) {
        if (year != 0) throw CaseError("static case has no year " + std::to_string(year));
        return *this;
    }
    const HorizonConfig& h = *data_.horizon;
    if (year < 0 || year >= h.years) throw CaseError("year out of horizon: " + std::to_string(year));
    const double ls = h.load_scale[static_cast<std::size_t>(year)];
    const double gs = h.gen_scale[static_cast<std::size_t>(year)];
    Data d = data_;
    d.horizon.reset();
    d.generation_plan.reset();
    for (Bus& b : d.buses) {
        b.p_demand *= ls;
        b.q_demand *= ls;
    }
    for (Generator& g : d.generators) {
        g.p_min *= gs;
        g.p_max *= gs;
        g.p_dispatch *= ls;
    }
    return Case(std::move(d));
}

Case Case::with_l_max(double l_max) const
{
    Data d = data_;
    d.limits.l_max = l_max;
    d.generation_plan.reset();
    return Case(std::move(d));
}

Case Case::with_penalties(const PenaltyConfig& cfg) const
{
    Data d = data_;
    d.penalties = cfg;
    d.generation_plan.reset();
    return Case(std::move(d));
}

ExpansionPlan ExpansionPlan::empty(const Case& c)
{
    return ExpansionPlan{std::vector<int>(c.corridors().size(), 0), std::vector<double>(c.reactive().size(), 0.0)};
}

DynamicPlan::DynamicPlan(std::vector<ExpansionPlan> increments) : increments_(std::move(increments))
{
    for (const ExpansionPlan& p : increments_) {
        if (std::any_of(p.additions.begin(), p.additions.end(), [](int n) { return n < 0; }))
            throw CaseError("dynamic plan increments must be non-negative");
        if (std::any_of(p.reactive.begin(), p.reactive.end(), [](double q) { return q < 0.0; }))
            throw CaseError("dynamic plan reactive increments must be non-negative");
        if (!increments_.empty() && (p.additions.size() != increments_.front().additions.size() ||
                                     p.reactive.size() != increments_.front().reactive.size()))
            throw CaseError("dynamic plan years have inconsistent sizes");
    }
}

ExpansionPlan DynamicPlan::cumulative(std::size_t year) const
{
    if (year >= increments_.size()) throw CaseError("year out of range in dynamic plan");
    ExpansionPlan out = increments_.front();
    for (std::size_t y = 1; y <= year; ++y) {
        for (std::size_t l = 0; l < out.additions.size(); ++l) out.additions[l] += increments_[y].additions[l];
        for (std::size_t k = 0; k < out.reactive.size(); ++k) out.reactive[k] += increments_[y].reactive[k];
    }
    return out;
}

double line_cost(const ExpansionPlan& plan, const Case& c)
{
    if (plan.additions.size() != c.corridors().size()) throw CaseError("plan does not match case corridors");
    double v0 = 0.0;
    for (std::size_t l = 0; l < plan.additions.size(); ++l)
        v0 += plan.additions[l] * c.corridors()[l].circuit_cost;
    return v0;
}

double reactive_cost(const ExpansionPlan& plan, const Case& c)
{
    if (plan.reactive.size() != c.reactive().size()) throw CaseError("plan does not match case reactive candidates");
    const double kvar = kvar_per_pu(c);
    double v1 = 0.0;
    for (std::size_t k = 0; k < plan.reactive.size(); ++k) {
        const double q = plan.reactive[k];
        if (q > kReactiveEpsilon) v1 += c.reactive()[k].fixed_cost + c.reactive()[k].variable_cost * q * kvar;
    }
    return v1;
}

CostBreakdown total_cost(const ExpansionPlan& plan, const Case& c)
{
    CostBreakdown cb;
    cb.v0 = line_cost(plan, c);
    cb.v1 = reactive_cost(plan, c);
    cb.v = cb.v0 + cb.v1;
    cb.v_dym = cb.v;
    cb.per_year = {cb.v};
    cb.per_year_v0 = {cb.v0};
    cb.per_year_v1 = {cb.v1};
    return cb;
}

CostBreakdown discounted_cost(const DynamicPlan& plan, const HorizonConfig& horizon, const Case& c)
{
    if (plan.years() != static_cast<std::size_t>(horizon.years) || horizon.discount.size() != plan.years())
        throw CaseError("dynamic plan length does not match the horizon");
    const double kvar = kvar_per_pu(c);
    CostBreakdown cb;
    std::vector<double> installed(c.reactive().size(), 0.0);
    for (std::size_t y = 0; y < plan.years(); ++y) {
        const ExpansionPlan& inc = plan.increment(y);
        const double v0 = line_cost(inc, c);
        if (inc.reactive.size() != c.reactive().size())
            throw CaseError("plan does not match case reactive candidates");
        double v1 = 0.0;
        for (std::size_t k = 0; k < inc.reactive.size(); ++k) {
            const double before = installed[k];
            installed[k] += inc.reactive[k];
            if (installed[k] > kReactiveEpsilon && before <= kReactiveEpsilon) v1 += c.reactive()[k].fixed_cost;
            if (installed[k] > kReactiveEpsilon) v1 += c.reactive()[k].variable_cost * inc.reactive[k] * kvar;
        }
        cb.per_year_v0.push_back(v0);
        cb.per_year_v1.push_back(v1);
        cb.per_year.push_back(v0 + v1);
        cb.v0 += v0;
        cb.v1 += v1;
        cb.v_dym += horizon.discount[y] * (v0 + v1);
    }
    cb.v = cb.v0 + cb.v1;
    return cb;
}

int occupied_corridors(const ExpansionPlan& plan)
{
    return static_cast<int>(std::count_if(plan.additions.begin(), plan.additions.end(), [](int n) { return n >= 1; }));
}

const char* to_string(BusKind kind)
{
    switch (kind) {
    case BusKind::Slack: return "slack";
    case BusKind::PV: return "pv";
    case BusKind::PQ: return "pq";
    }
    return "pq";
}

BusKind bus_kind_from_string(const std::string& s)
{
    if (s == "slack") return BusKind::Slack;
    if (s == "pv") return BusKind::PV;
    if (s == "pq") return BusKind::PQ;
    throw CaseError("unknown bus kind '" + s + "'");
}

} // namespace tnep
