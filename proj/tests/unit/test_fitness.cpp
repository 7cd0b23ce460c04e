#include <doctest.h>

#include <random>

#include "support.hpp"
#include "tnep/fitness.hpp"

using namespace tnep;

namespace {

EvalOptions options(Model m, GenerationMode g = GenerationMode::Fixed, bool security = false)
{
    EvalOptions o;
    o.model = m;
    o.gen = g;
    o.security = security;
    return o;
}

Evaluation eval(const Case& c, const ExpansionPlan& p, const EvalOptions& o)
{
    return evaluate_static(p, case_controls(c, p), c, o);
}

} // namespace

TEST_CASE("penalty term")
{
    CHECK(penalty_term(1.0, 0.95, 1.05, 1.0) == 0.0);
    CHECK(penalty_term(1.2, 0.0, 1.0, 1.0) == doctest::Approx(0.04));
    CHECK(penalty_term(0.90, 0.95, 1.05, 2.0) == doctest::Approx(0.005));
    // continuous at both bounds
    for (double eps : {1e-3, 1e-5, 1e-7}) {
        CHECK(penalty_term(1.05 + eps, 0.95, 1.05, 10.0) <= 10.0 * eps * eps * 1.01);
        CHECK(penalty_term(0.95 - eps, 0.95, 1.05, 10.0) <= 10.0 * eps * eps * 1.01);
    }
    CHECK(penalty_term(1.05, 0.95, 1.05, 10.0) == 0.0);
    CHECK(penalty_term(0.95, 0.95, 1.05, 10.0) == 0.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 1000; ++i) CHECK(penalty_term(u(rng), -1.0, 1.0, 3.0) >= 0.0);
}

TEST_CASE("heuristic filter")
{
    const Case c = test::fixture("garver6");
    CHECK(corridor_band(3) == std::pair{3, 3});
    const DcStats three{3, 110.0, false};
    const ExpansionPlan four = test::plan_of(c, std::map<std::string, int>{{"2-6", 1}, {"3-5", 1}, {"4-6", 1}, {"2-3", 1}});
    CHECK(heuristic_filter(four, c, three) == FilterReason::CorridorBand);

    const ExpansionPlan expensive = test::plan_of(c, std::map<std::string, int>{{"1-6", 2}, {"2-6", 1}, {"4-6", 1}});
    CHECK(line_cost(expensive, c) == doctest::Approx(196.0));
    const ExpansionPlan costly = test::plan_of(c, std::map<std::string, int>{{"1-6", 2}, {"1-4", 1}, {"4-6", 1}});
    CHECK(line_cost(costly, c) > 220.0);
    CHECK(heuristic_filter(costly, c, three) == FilterReason::CostCap);

    const ExpansionPlan dc = test::plan_of(c, test::oracles()["dc"]["garver6/table2"]["plan"]);
    CHECK_FALSE(heuristic_filter(dc, c, DcStats{3, line_cost(dc, c), false}).has_value());
}

TEST_CASE("filter rejection performs no power flow")
{
    const Case c = test::fixture("garver6");
    EvalOptions o = options(Model::AC, GenerationMode::Dispatch, true);
    o.filters = true;
    o.dc_stats = DcStats{3, 110.0, false};
    const ExpansionPlan four = test::plan_of(c, std::map<std::string, int>{{"2-6", 1}, {"3-5", 1}, {"4-6", 1}, {"2-3", 1}});
    const Evaluation e = eval(c, four, o);
    CHECK(e.penalty.filtered == FilterReason::CorridorBand);
    CHECK(e.penalty.pf_calls == 0);
    CHECK(e.penalty.m == doctest::Approx(e.cost.v + c.penalties().infeasible));

    // filters only gate: a passing candidate scores exactly as in rigorous mode
    const ExpansionPlan t3 = test::plan_of(c, test::oracles()["dc"]["garver6/table3"]["plan"]);
    o.dc_stats = DcStats{3, 160.0, false};
    const Evaluation on = eval(c, t3, o);
    o.filters = false;
    const Evaluation off = eval(c, t3, o);
    CHECK_FALSE(on.penalty.filtered.has_value());
    CHECK(on.penalty.m == off.penalty.m);
    CHECK(on.penalty.pf_calls > 0);
}

TEST_CASE("zero penalty if and only if feasible")
{
    SUBCASE("feasible two-bus case")
    {
        const Case c = test::two_bus(0.5, 0.1);
        const Evaluation e = eval(c, ExpansionPlan::empty(c), options(Model::AC));
        CHECK(e.penalty.feasible);
        CHECK(e.penalty.m == e.cost.v);
        CHECK(e.penalty.h == 0.0);
    }
    SUBCASE("each violated class makes m exceed v")
    {
        struct Variant {
            const char* cls;
            double p, q, x, rating, v_min;
        };
        for (const Variant& var : {Variant{"flow_bound", 0.5, 0.0, 0.1, 0.45, 0.9},
                                   Variant{"v_bound", 0.5, 0.6, 0.2, 10.0, 0.95},
                                   Variant{"l_index_bound", 2.0, 0.2, 0.2, 10.0, 0.5}}) {
            Case::Data d = test::two_bus(var.p, var.q, var.x, 0.0, var.rating).data();
            d.buses[1].v_min = var.v_min;
            d.limits.v_min = var.v_min;
            const Case c(d);
            const Evaluation e = eval(c, ExpansionPlan::empty(c), options(Model::AC));
            INFO(var.cls);
            CHECK_FALSE(e.penalty.feasible);
            CHECK(e.penalty.m > e.cost.v);
            CHECK(e.penalty.per_class.count(var.cls) == 1);
        }
    }
    SUBCASE("non-convergence")
    {
        const Case c = test::two_bus(6.0);
        const Evaluation e = eval(c, ExpansionPlan::empty(c), options(Model::AC));
        CHECK_FALSE(e.penalty.feasible);
        CHECK(e.penalty.e_g > 0.0);
        CHECK(e.penalty.m >= c.penalties().infeasible);
    }
    SUBCASE("garver dc plans")
    {
        const Case c = test::fixture("garver6");
        for (const auto& plan : test::oracles()["garver_dc_enumeration"]["fixed"]["plans"]) {
            const Evaluation e = eval(c, test::plan_of(c, plan), options(Model::DC));
            CHECK(e.penalty.feasible);
            CHECK(e.penalty.m == e.cost.v);
        }
    }
}

TEST_CASE("single overloaded corridor composes one term")
{
    Case::Data d = test::two_bus(1.1, 0.0, 0.1, 0.0, 1.0).data();
    const Case c(d);
    const Evaluation e = eval(c, ExpansionPlan::empty(c), options(Model::DC));
    // bounds carry a 1e-9 tolerance
    CHECK(e.penalty.m == doctest::Approx(e.cost.v + c.penalties().kappa_flow * 0.1 * 0.1).epsilon(1e-7));
}

TEST_CASE("worsening a violation never lowers m")
{
    double last = 0.0;
    for (double p : {1.05, 1.1, 1.2, 1.4, 1.8}) {
        const Case c = test::two_bus(p, 0.0, 0.1, 0.0, 1.0);
        const double m = eval(c, ExpansionPlan::empty(c), options(Model::DC)).penalty.m;
        CHECK(m >= last);
        last = m;
    }
    last = 0.0;
    for (double q : {0.5, 0.6, 0.7, 0.8}) {
        Case::Data d = test::two_bus(0.5, q, 0.2).data();
        d.buses[1].v_min = d.limits.v_min = 0.95;
        const Case c(d);
        const double m = eval(c, ExpansionPlan::empty(c), options(Model::AC)).penalty.m;
        CHECK(m >= last);
        last = m;
    }
}

TEST_CASE("single-year horizon matches the static evaluation")
{
    Case::Data d = test::fixture("garver6").data();
    d.horizon = HorizonConfig{1, {1.0}, {1.0}, {1.0}};
    const Case c(d);
    const ExpansionPlan t3 = test::plan_of(c, test::oracles()["dc"]["garver6/table3"]["plan"]);
    const EvalOptions o = options(Model::AC, GenerationMode::Fixed, true);
    const Evaluation s = eval(c, t3, o);
    const Evaluation y = evaluate_dynamic(DynamicPlan({t3}), {case_controls(c, t3)}, c, o);
    CHECK(s.penalty.m == y.penalty.m);
    CHECK(y.cost.v_dym == s.cost.v);
}

TEST_CASE("dynamic encoding keeps cumulative plans monotone")
{
    const Case c = test::fixture("garver6_dynamic");
    const Encoding enc(c, Model::AC, GenerationMode::Dispatch, c.horizon()->years);
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> x(enc.dim());
        for (std::size_t j = 0; j < x.size(); ++j)
            x[j] = std::uniform_real_distribution<double>(enc.bounds().lo[j], enc.bounds().hi[j])(rng);
        const Decoded d = enc.decode(x);
        for (std::size_t y = 1; y < d.years.size(); ++y)
            for (std::size_t l = 0; l < c.corridors().size(); ++l) {
                CHECK(d.years[y].plan.additions[l] >= d.years[y - 1].plan.additions[l]);
                CHECK(d.years[y].plan.additions[l] <= c.corridors()[l].max_new);
            }
    }
}
