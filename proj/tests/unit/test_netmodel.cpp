#include <doctest.h>

#include <random>

#include "support.hpp"
#include "tnep/network.hpp"

using namespace tnep;

TEST_CASE("fixture sizes and demand")
{
    const Case g = test::fixture("garver6");
    CHECK(g.buses().size() == 6);
    CHECK(g.corridors().size() == 15);
    CHECK(g.total_p_demand() == doctest::Approx(7.60).epsilon(1e-12));

    const Case r = test::fixture("ieee24");
    CHECK(r.buses().size() == 24);
    CHECK(r.corridors().size() == 41);
    CHECK(r.total_p_demand() == doctest::Approx(85.50).epsilon(1e-12));
    CHECK(r.generation_plan().has_value());

    const Case h = test::fixture("ieee118");
    CHECK(h.buses().size() == 118);
    CHECK(h.corridors().size() == 179);
    CHECK(h.reactive().empty());
    for (const Corridor& c : h.corridors()) CHECK(c.max_new == 2);
}

TEST_CASE("garver resistance is a tenth of the reactance")
{
    for (const char* name : {"garver6", "garver6_dynamic"})
        for (const Corridor& c : test::fixture(name).corridors()) CHECK(c.r == doctest::Approx(c.x / 10.0).epsilon(1e-12));
}

TEST_CASE("case invariants are enforced")
{
    Case::Data d = test::two_bus(0.5).data();
    d.buses[1].id = 1;
    CHECK_THROWS_AS(Case{d}, CaseError);

    d = test::two_bus(0.5).data();
    d.corridors[0].to_bus = 7;
    CHECK_THROWS_AS(Case{d}, CaseError);

    d = test::two_bus(0.5).data();
    d.buses[0].kind = BusKind::PQ;
    CHECK_THROWS_AS(Case{d}, CaseError);

    d = test::two_bus(0.5).data();
    d.penalties.kappa_v = 0.0;
    CHECK_THROWS_AS(Case{d}, CaseError);
}

TEST_CASE("line cost is additive over disjoint corridors")
{
    const Case c = test::fixture("garver6");
    const ExpansionPlan a = test::plan_of(c, std::map<std::string, int>{{"2-6", 2}, {"3-5", 1}});
    const ExpansionPlan b = test::plan_of(c, std::map<std::string, int>{{"4-6", 3}});
    ExpansionPlan ab = a;
    for (std::size_t l = 0; l < ab.additions.size(); ++l) ab.additions[l] += b.additions[l];
    CHECK(line_cost(ab, c) == doctest::Approx(line_cost(a, c) + line_cost(b, c)));
    CHECK(line_cost(ab, c) == doctest::Approx(2 * 30 + 20 + 3 * 30));
}

TEST_CASE("reactive cost is monotone with a fixed-cost step")
{
    const Case c = test::fixture("garver6");
    REQUIRE_FALSE(c.reactive().empty());
    ExpansionPlan p = ExpansionPlan::empty(c);
    double last = 0.0;
    for (double q : {0.0, 0.5e-6, 1.0e-6, 2.0e-6, 0.01, 0.1, 0.5}) {
        p.reactive[0] = q;
        const double cost = reactive_cost(p, c);
        CHECK(cost >= last);
        last = cost;
    }
    p.reactive[0] = kReactiveEpsilon;
    CHECK(reactive_cost(p, c) == 0.0);
    p.reactive[0] = 2.0 * kReactiveEpsilon;
    CHECK(reactive_cost(p, c) >= c.reactive()[0].fixed_cost);
}

TEST_CASE("undiscounted horizon equals the sum of yearly costs")
{
    const Case c = test::fixture("garver6_dynamic");
    const HorizonConfig h{3, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}};
    std::vector<ExpansionPlan> inc(3, ExpansionPlan::empty(c));
    inc[0].additions[*c.find_corridor(2, 6)] = 2;
    inc[1].additions[*c.find_corridor(3, 5)] = 1;
    inc[2].additions[*c.find_corridor(4, 6)] = 1;
    inc[1].reactive[0] = 0.2;
    const DynamicPlan plan(inc);
    const CostBreakdown cb = discounted_cost(plan, h, c);
    double sum = 0.0;
    for (double v : cb.per_year) sum += v;
    CHECK(cb.v_dym == doctest::Approx(sum));
    CHECK(cb.v_dym == doctest::Approx(total_cost(plan.cumulative(2), c).v));
}

TEST_CASE("cumulative plans never decrease")
{
    const Case c = test::fixture("garver6_dynamic");
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> n(0, 2);
    std::uniform_real_distribution<double> q(0.0, 0.3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<ExpansionPlan> inc(3, ExpansionPlan::empty(c));
        for (auto& p : inc) {
            for (int& a : p.additions) a = n(rng);
            for (double& r : p.reactive) r = q(rng);
        }
        const DynamicPlan plan(inc);
        for (std::size_t y = 1; y < 3; ++y) {
            const ExpansionPlan a = plan.cumulative(y - 1), b = plan.cumulative(y);
            for (std::size_t l = 0; l < a.additions.size(); ++l) CHECK(b.additions[l] >= a.additions[l]);
            for (std::size_t k = 0; k < a.reactive.size(); ++k) CHECK(b.reactive[k] >= a.reactive[k]);
        }
    }
}
