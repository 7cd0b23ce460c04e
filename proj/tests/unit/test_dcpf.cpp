#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "tnep/dc_power_flow.hpp"
#include "tnep/fitness.hpp"

using namespace tnep;

namespace {

std::vector<double> dispatch(const Case& c)
{
    std::vector<double> p;
    for (const Generator& g : c.generators()) p.push_back(g.p_dispatch);
    return p;
}

Case scaled(const Case& c, double alpha)
{
    Case::Data d = c.data();
    for (Bus& b : d.buses) b.p_demand *= alpha;
    for (Generator& g : d.generators) g.p_dispatch *= alpha;
    if (d.generation_plan)
        for (auto& [bus, p] : *d.generation_plan) p *= alpha;
    return Case(d);
}

} // namespace

TEST_CASE("single line network")
{
    Case::Data d = test::two_bus(1.0, 0.0, 0.5).data();
    const Case c(d);
    const DcSolution s = solve_dc(c, ExpansionPlan::empty(c), dispatch(c));
    CHECK(s.flow[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.theta[1] == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(s.slack_injection == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("zero demand gives zero flows")
{
    const Case c = scaled(test::fixture("garver6"), 0.0);
    const DcSolution s = solve_dc(c, test::plan_of(c, std::map<std::string, int>{{"2-6", 1}}), dispatch(c));
    for (double f : s.flow) CHECK(f == 0.0);
    for (double t : s.theta) CHECK(t == 0.0);
}

TEST_CASE("flows match the dense oracle")
{
    for (const auto& [key, ref] : test::oracles()["dc"].items()) {
        const Case c = test::fixture(key.substr(0, key.find('/')));
        const ExpansionPlan plan = test::plan_of(c, ref["plan"]);
        DcSolution s;
        if (ref.contains("outage")) {
            const auto l = ref["outage"].get<std::size_t>();
            s = solve_dc(c, plan, dispatch(c), l);
            const DcSolution comp = DcNetwork(c, plan, dispatch(c)).outage(l);
            for (std::size_t k = 0; k < s.flow.size(); ++k) CHECK(std::abs(comp.flow[k] - s.flow[k]) <= 1e-8);
        } else {
            s = solve_dc(c, plan, dispatch(c));
        }
        INFO(key);
        for (std::size_t k = 0; k < s.flow.size(); ++k) CHECK(std::abs(s.flow[k] - ref["flow"][k].get<double>()) <= 1e-8);
        for (std::size_t i = 0; i < s.theta.size(); ++i)
            CHECK(std::abs(s.theta[i] - ref["theta"][i].get<double>()) <= 1e-8);
        CHECK(std::abs(s.slack_injection - ref["slack"].get<double>()) <= 1e-8);
    }
}

TEST_CASE("flows scale linearly with injections")
{
    const Case c = test::fixture("ieee24");
    const ExpansionPlan p = ExpansionPlan::empty(c);
    const DcSolution base = solve_dc(c, p, dispatch(c));
    for (double alpha : {0.5, 2.0, 3.0}) {
        const Case s = scaled(c, alpha);
        const DcSolution sol = solve_dc(s, p, dispatch(s));
        for (std::size_t l = 0; l < base.flow.size(); ++l) CHECK(std::abs(sol.flow[l] - alpha * base.flow[l]) <= 1e-8);
    }
}

TEST_CASE("kirchhoff balance at every bus")
{
    const Case c = test::fixture("garver6");
    const ExpansionPlan p = test::plan_of(c, test::oracles()["dc"]["garver6/table3"]["plan"]);
    const std::vector<double> pg = dispatch(c);
    const DcSolution s = solve_dc(c, p, pg);
    std::vector<double> net = dc_injections(c, pg);
    net[c.slack_index()] = s.slack_injection;
    std::vector<double> out(c.buses().size(), 0.0);
    for (std::size_t l = 0; l < c.corridors().size(); ++l) {
        const auto [i, j] = c.ends(l);
        out[i] += s.flow[l];
        out[j] -= s.flow[l];
    }
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(std::abs(out[i] - net[i]) <= 1e-8);
}

TEST_CASE("removing one of two circuits halves the corridor share")
{
    // Two symmetric paths from the slack to the load: 1-2-4 and 1-3-4.
    Case::Data d;
    d.currency_unit = "1";
    d.buses = {{1, BusKind::Slack, 0, 0, 1, 0.9, 1.1}, {2, BusKind::PQ, 0, 0, 1, 0.9, 1.1},
               {3, BusKind::PQ, 0, 0, 1, 0.9, 1.1}, {4, BusKind::PQ, 1.0, 0, 1, 0.9, 1.1}};
    d.generators = {{1, 0, 5, -5, 5, 1, 1.0}};
    d.corridors = {{1, 1, 2, 0, 0.1, 0, 1, 1, 2, 0}, {2, 2, 4, 0, 0.1, 0, 1, 1, 2, 0},
                   {3, 1, 3, 0, 0.1, 0, 1, 1, 2, 0}, {4, 3, 4, 0, 0.1, 0, 1, 1, 2, 0}};
    const Case c(d);
    const ExpansionPlan p = ExpansionPlan::empty(c);
    const DcSolution base = solve_dc(c, p, dispatch(c));
    CHECK(base.flow[0] == doctest::Approx(0.5));
    // Halving the susceptance of 1-2 leaves path 1-2-4 with 2/3 of the other path's susceptance.
    const DcSolution out = solve_dc(c, p, dispatch(c), 0);
    const double y_a = 1.0 / (0.1 / 1 + 0.1 / 2), y_b = 1.0 / (0.1 / 2 + 0.1 / 2);
    CHECK(out.flow[0] == doctest::Approx(y_a / (y_a + y_b)).epsilon(1e-12));
    CHECK(std::abs(DcNetwork(c, p, dispatch(c)).outage(0).flow[0] - out.flow[0]) <= 1e-8);
}

TEST_CASE("islanded states throw")
{
    const Case c = test::fixture("garver6");
    CHECK_THROWS_AS(solve_dc(c, ExpansionPlan::empty(c), dispatch(c)), IslandingError);
    const ExpansionPlan p = test::plan_of(c, std::map<std::string, int>{{"2-6", 1}});
    CHECK_THROWS_AS(solve_dc(c, p, dispatch(c), *c.find_corridor(2, 6)), IslandingError);
}

TEST_CASE("dc fitness")
{
    SUBCASE("no overload gives line cost exactly")
    {
        const Case c = test::fixture("garver6");
        for (const auto& plan : test::oracles()["garver_dc_enumeration"]["fixed"]["plans"]) {
            const ExpansionPlan p = test::plan_of(c, plan);
            CHECK(dc_fitness(p, c, false) == line_cost(p, c));
        }
        const ExpansionPlan t2 = test::plan_of(c, test::oracles()["dc"]["garver6/table2"]["plan"]);
        CHECK(dc_fitness(t2, c, false) > line_cost(t2, c));
    }
    SUBCASE("quadratic overload term")
    {
        Case::Data d = test::two_bus(1.2, 0.0, 0.1, 0.0, 1.0).data();
        d.penalties.kappa_flow = 1.0;
        const Case c(d);
        CHECK(dc_fitness(ExpansionPlan::empty(c), c, false) == doctest::Approx(0.04).epsilon(1e-9));
    }
    SUBCASE("islanding costs the fixed penalty")
    {
        const Case c = test::fixture("garver6");
        CHECK(dc_fitness(ExpansionPlan::empty(c), c, false) >= c.penalties().infeasible);
    }
}
