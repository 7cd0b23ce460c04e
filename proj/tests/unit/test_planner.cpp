#include <doctest.h>

#include "support.hpp"
#include "tnep/planner.hpp"

using namespace tnep;

namespace {

PlanRequest quick(bool security = false, GenerationMode gen = GenerationMode::Dispatch)
{
    PlanRequest r;
    r.security = security;
    r.gen = gen;
    r.ac_params.iter = 8;
    r.seed = 3;
    r.trials = 2;
    return r;
}

} // namespace

TEST_CASE("stored plans re-evaluate to the stored objective")
{
    const Case c = test::fixture("garver6");
    for (bool security : {false, true}) {
        const PlanRequest req = quick(security);
        const PlanResult r = plan(c, req);
        const PlanFile f = to_plan_file(r, c, req);
        const PlanFile back = parse_plan(dump_plan(f));
        CHECK(reevaluate(back, c).penalty.m == f.m);
        CHECK(back.m == r.trials[r.best_trial].m);
    }
}

TEST_CASE("stage-two best passes its own filters")
{
    const Case c = test::fixture("garver6");
    const PlanResult r = plan(c, quick());
    for (const TrialResult& t : r.trials) {
        if (!t.filters_used) continue;
        REQUIRE(t.ac);
        EvalOptions o;
        o.filters = true;
        o.dc_stats = t.dc_stats;
        const Evaluation e = Evaluator(c, o).evaluate(t.ac->best.x);
        CHECK_FALSE(e.penalty.filtered.has_value());
    }
    CHECK_FALSE(r.best.penalty.filtered.has_value());
}

TEST_CASE("burden comparison")
{
    const Case c = test::fixture("garver6");
    PlanRequest req = quick(false, GenerationMode::Fixed);
    const Burden b = compare_burden(c, req);
    CHECK(b.pf_n_proposed < b.pf_n_rigorous);
    CHECK(b.ff_n_proposed < b.ff_n_rigorous);
    req.filters = false;
    const Burden same = compare_burden(c, req);
    CHECK(same.reduction_pct == 0.0);
    CHECK(same.ff_n_proposed == same.ff_n_rigorous);
}

TEST_CASE("best of more trials is never worse")
{
    const Case c = test::fixture("garver6");
    PlanRequest req = quick();
    double last = 1e300;
    for (int t : {1, 2, 4}) {
        req.trials = t;
        const double m = plan(c, req).best.penalty.m;
        CHECK(m <= last);
        last = m;
    }
}

TEST_CASE("single-year horizon reproduces static planning")
{
    Case::Data d = test::fixture("garver6").data();
    d.horizon = HorizonConfig{1, {1.0}, {1.0}, {1.0}};
    const Case c(d);
    const PlanRequest req = quick();
    const PlanResult s = plan_static(c, req), y = plan_dynamic(c, req);
    CHECK(s.best.penalty.m == y.best.penalty.m);
    CHECK(s.genes == y.genes);
}

TEST_CASE("dynamic planning needs a horizon")
{
    const Case c = test::fixture("garver6");
    CHECK_THROWS_AS(plan_dynamic(c, quick()), CaseError);
}

TEST_CASE("l_max override")
{
    const Case c = test::fixture("garver6");
    PlanRequest req = quick();
    req.l_max = 0.25;
    CHECK(planning_case(c, req).limits().l_max == 0.25);
    CHECK(to_plan_file(plan(c, req), c, req).l_max == 0.25);
}
