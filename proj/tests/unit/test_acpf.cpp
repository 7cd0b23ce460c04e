#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "support.hpp"
#include "tnep/ac_power_flow.hpp"
#include "tnep/dc_power_flow.hpp"

using namespace tnep;

namespace {

PFSolution solve(const Case& c, const ExpansionPlan& p, const AcOptions& o = {})
{
    return solve_ac(build_admittance(c, p), c, default_controls(c, p), o);
}

/// Connected random network: a spanning chain plus extra corridors.
Case random_case(std::mt19937_64& rng, int n)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Case::Data d;
    d.currency_unit = "1";
    for (int i = 1; i <= n; ++i) {
        const BusKind k = i == 1 ? BusKind::Slack : (i % 3 == 0 ? BusKind::PV : BusKind::PQ);
        d.buses.push_back({i, k, 0.3 * u(rng), 0.1 * u(rng), 0.98 + 0.06 * u(rng), 0.9, 1.1});
        if (k != BusKind::PQ) d.generators.push_back({i, 0, 5, -5, 5, 1, 0.4 * u(rng)});
    }
    int id = 0;
    auto add = [&](int a, int b) {
        const double x = 0.05 + 0.3 * u(rng);
        d.corridors.push_back({++id, a, b, x * 0.2 * u(rng), x, 0.05 * u(rng), 1, 1, 1 + (u(rng) < 0.3), 1});
    };
    for (int i = 2; i <= n; ++i) add(i - 1, i);
    add(1, n);
    if (n > 3) add(2, n - 1);
    return Case(d);
}

} // namespace

TEST_CASE("admittance assembly")
{
    Case::Data d = test::two_bus(0.0).data();
    d.corridors[0].max_new = 2;
    const Case c(d);
    ExpansionPlan p = ExpansionPlan::empty(c);
    const Complex y1 = -1.0 / Complex(0.0, 0.1);
    CHECK(std::abs(build_admittance(c, p).y.coeff(0, 1) - y1) < 1e-12);
    p.additions[0] = 1;
    CHECK(std::abs(build_admittance(c, p).y.coeff(0, 1) - 2.0 * y1) < 1e-12);
    CHECK(std::abs(build_admittance(c, p, std::size_t{0}).y.coeff(0, 1) - y1) < 1e-12);
}

TEST_CASE("no-load flat case")
{
    Case::Data d = test::fixture("garver6").data();
    for (Bus& b : d.buses) {
        b.p_demand = b.q_demand = 0.0;
        b.v_setpoint = 1.0;
    }
    for (auto& g : d.generators) g.p_dispatch = 0.0;
    for (auto& cor : d.corridors) cor.b_shunt = 0.0;
    const Case c(d);
    const ExpansionPlan p = test::plan_of(c, std::map<std::string, int>{{"2-6", 1}});
    const PFSolution pf = solve(c, p);
    CHECK(pf.converged);
    CHECK(pf.iterations <= 2);
    for (std::size_t i = 0; i < c.buses().size(); ++i) {
        CHECK(std::abs(pf.v[i] - 1.0) < 1e-12);
        CHECK(std::abs(pf.theta[i]) < 1e-12);
    }
    CHECK(l_index(pf, build_admittance(c, p), c) == doctest::Approx(0.0));
}

TEST_CASE("two-bus closed form")
{
    const auto& ref = test::oracles()["two_bus"];
    const Case c = test::two_bus(ref["p"].get<double>(), 0.0, ref["x"].get<double>());
    const ExpansionPlan p = ExpansionPlan::empty(c);
    const PFSolution pf = solve(c, p, AcOptions{1e-12, 30, nullptr});
    REQUIRE(pf.converged);
    CHECK(std::abs(pf.theta[1] - ref["theta2"].get<double>()) <= 1e-8);
    CHECK(std::abs(pf.v[1] - ref["v2"].get<double>()) <= 1e-8);
    CHECK(std::abs(pf.theta[1] - -0.0500836) < 1e-6);
    CHECK(std::abs(pf.v[1] - 0.998746) < 1e-6);
    const double l = l_index(pf, build_admittance(c, p), c);
    CHECK(std::abs(l - ref["l_index"].get<double>()) <= 1e-8);
    CHECK(std::abs(l - 0.0501) <= 1e-3);

    const Case heavy = test::two_bus(ref["p_unsolvable"].get<double>(), 0.0, ref["x"].get<double>());
    const PFSolution bad = solve(heavy, ExpansionPlan::empty(heavy));
    CHECK_FALSE(bad.converged);
    CHECK(bad.max_mismatch > 1e-6);
}

TEST_CASE("analytic jacobian matches finite differences")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    for (int trial = 0; trial < 20; ++trial) {
        const Case c = random_case(rng, 4 + trial % 5);
        const ExpansionPlan p = ExpansionPlan::empty(c);
        const Admittance adm = build_admittance(c, p);
        const Controls ctl = default_controls(c, p);
        const detail::Layout lay = detail::make_layout(adm, c);
        std::vector<double> v(c.buses().size()), th(c.buses().size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = 1.0 + 0.25 * u(rng);
            th[i] = i == c.slack_index() ? 0.0 : u(rng);
        }
        const Eigen::MatrixXd J = detail::jacobian(adm, lay, v, th);
        const double h = 1e-6;
        double worst = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            for (int which = 0; which < 2; ++which) {
                const int col = which == 0 ? lay.angle_row[i] : lay.mag_row[i];
                if (col < 0) continue;
                std::vector<double>& z = which == 0 ? th : v;
                const double z0 = z[i];
                z[i] = z0 + h;
                const Eigen::VectorXd fp = detail::mismatch(adm, c, ctl, lay, v, th);
                z[i] = z0 - h;
                const Eigen::VectorXd fm = detail::mismatch(adm, c, ctl, lay, v, th);
                z[i] = z0;
                // mismatch is specified minus calculated
                const Eigen::VectorXd fd = -(fp - fm) / (2 * h);
                worst = std::max(worst, (fd - J.col(col)).cwiseAbs().maxCoeff());
            }
        }
        CHECK(worst <= 1e-5);
    }
}

TEST_CASE("garver solutions match the complex power oracle")
{
    const Case c = test::fixture("garver6");
    for (const char* name : {"table2", "table3"}) {
        const auto& ref = test::oracles()["ac"][std::string("garver6/") + name];
        const ExpansionPlan p = test::plan_of(c, ref["plan"]);
        const PFSolution pf = solve(c, p);
        INFO(name);
        REQUIRE(pf.converged);
        CHECK(pf.max_mismatch < 1e-6);
        for (std::size_t i = 0; i < c.buses().size(); ++i) {
            CHECK(std::abs(pf.v[i] - ref["v"][i].get<double>()) <= 1e-6);
            CHECK(std::abs(pf.theta[i] - ref["theta"][i].get<double>()) <= 1e-6);
        }
        for (std::size_t l = 0; l < c.corridors().size(); ++l) {
            CHECK(std::abs(pf.s_from[l] - ref["s_from"][l].get<double>()) <= 1e-6);
            CHECK(std::abs(pf.s_to[l] - ref["s_to"][l].get<double>()) <= 1e-6);
        }
        // open corridors carry nothing
        for (std::size_t l = 0; l < c.corridors().size(); ++l)
            if (p.circuits(c, l) == 0) CHECK(pf.s_from[l] == 0.0);
    }
}

TEST_CASE("losses are non-negative and starts agree")
{
    for (const char* name : {"garver6", "ieee118"}) {
        const Case c = test::fixture(name);
        const ExpansionPlan p = std::string(name) == "garver6"
                                    ? test::plan_of(c, test::oracles()["ac"]["garver6/table3"]["plan"])
                                    : ExpansionPlan::empty(c);
        const PFSolution flat = solve(c, p);
        INFO(std::string(name));
        REQUIRE(flat.converged);
        double gen = 0.0;
        for (double pg : flat.p_gen) gen += pg;
        CHECK(gen - c.total_p_demand() >= -1e-6);

        // start from the DC angles
        std::vector<double> pg;
        for (const Generator& g : c.generators()) pg.push_back(g.p_dispatch);
        PFSolution start = flat;
        start.theta = solve_dc(c, p, pg).theta;
        std::fill(start.v.begin(), start.v.end(), 1.0);
        const PFSolution warm = solve(c, p, AcOptions{1e-6, 30, &start});
        REQUIRE(warm.converged);
        double diff = 0.0;
        for (std::size_t i = 0; i < flat.v.size(); ++i) diff = std::max(diff, std::abs(flat.v[i] - warm.v[i]));
        CHECK(diff < 1e-6);
    }
}

TEST_CASE("l-index is invariant under bus relabelling")
{
    const Case c = test::fixture("garver6");
    const ExpansionPlan p = test::plan_of(c, test::oracles()["ac"]["garver6/table3"]["plan"]);
    const PFSolution pf = solve(c, p);
    const double l = l_index(pf, build_admittance(c, p), c);
    CHECK(l > 0.0);

    // reverse the bus order and renumber ids 1..6 -> 16..11
    Case::Data d = c.data();
    std::reverse(d.buses.begin(), d.buses.end());
    auto relabel = [](int id) { return 17 - id; };
    for (Bus& b : d.buses) b.id = relabel(b.id);
    for (Generator& g : d.generators) g.bus = relabel(g.bus);
    std::reverse(d.generators.begin(), d.generators.end());
    for (Corridor& cor : d.corridors) {
        cor.from_bus = relabel(cor.from_bus);
        cor.to_bus = relabel(cor.to_bus);
    }
    for (ReactiveCandidate& r : d.reactive) r.bus = relabel(r.bus);
    const Case q(d);
    const PFSolution pq = solve(q, p);
    REQUIRE(pq.converged);
    CHECK(std::abs(l_index(pq, build_admittance(q, p), q) - l) < 1e-9);
}
