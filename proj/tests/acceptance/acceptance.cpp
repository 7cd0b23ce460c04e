// Prints one PASS/FAIL line per acceptance criterion. The exit status is
// non-zero only when the checks could not be carried out.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tnep/case_io.hpp"
#include "tnep/planner.hpp"

namespace fs = std::filesystem;
using namespace tnep;

namespace {

std::ostringstream g_report;
int g_passed = 0;

void line(int id, bool ok, const std::string& what, double secs)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, "criterion %d %s  %s  [%.1f s]", id, ok ? "PASS" : "FAIL", what.c_str(), secs);
    std::puts(buf);
    std::fflush(stdout);
    g_report << buf << "\n";
    g_passed += ok;
}

Case fixture(const std::string& name) { return load_case(fs::path(TNEP_SOURCE_DIR) / "data" / (name + ".json")); }

bool within(double value, double target, double rel) { return std::abs(value - target) <= rel * std::abs(target); }

std::string f2(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string plan_text(const Case& c, const ExpansionPlan& p)
{
    std::string s;
    for (std::size_t l = 0; l < c.corridors().size(); ++l)
        if (p.additions[l])
            s += (s.empty() ? "" : " ") + std::to_string(c.corridors()[l].from_bus) + "-" +
                 std::to_string(c.corridors()[l].to_bus) + ":" + std::to_string(p.additions[l]);
    return "{" + s + "}";
}

ExpansionPlan plan_of(const Case& c, const std::map<std::pair<int, int>, int>& adds)
{
    ExpansionPlan p = ExpansionPlan::empty(c);
    for (const auto& [ends, n] : adds) p.additions[*c.find_corridor(ends.first, ends.second)] = n;
    return p;
}

PlanRequest request(bool security, GenerationMode gen, int trials, bool dynamic = false)
{
    PlanRequest r;
    r.security = security;
    r.gen = gen;
    r.dynamic = dynamic;
    r.trials = trials;
    r.seed = 1;
    return r;
}

const ExpansionPlan& final_plan(const PlanResult& r) { return r.best.decoded.years.back().plan; }

double max_l(const PlanResult& r)
{
    double l = 0.0;
    for (double v : r.best.l_index) l = std::max(l, v);
    return l;
}

std::string summary(const Case& c, const PlanResult& r)
{
    return "plan " + plan_text(c, final_plan(r)) + " v0=" + f2(r.best.cost.v0) + " v1=" + f2(r.best.cost.v1) +
           " v=" + f2(r.best.cost.v) + " L=" + f2(max_l(r)) + (r.best.penalty.feasible ? " feasible" : " penalised");
}

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

} // namespace

int main(int argc, char** argv)
{
    const bool nightly = argc > 1 && std::string(argv[1]) == "--nightly";
    const Case garver = fixture("garver6");

    // 1. Garver, base case, dispatchable generation
    auto t0 = Clock::now();
    {
        const PlanResult r = plan(garver, request(false, GenerationMode::Dispatch, 20));
        const bool ok = r.best.cost.v0 == 110.0 && within(r.best.cost.v, 123.67, 0.05);
        line(1, ok, "garver base dispatch: " + summary(garver, r) + " (target v0=110, v=123.67 +-5%)", since(t0));
    }

    // 2, 3 and 5 share the burden comparison runs
    t0 = Clock::now();
    const Burden fixed = compare_burden(garver, request(false, GenerationMode::Fixed, 20));
    const double fixed_secs = since(t0);
    {
        const PlanResult& r = fixed.proposed;
        const bool ok = final_plan(r) == plan_of(garver, {{{2, 6}, 1}, {{3, 5}, 1}, {{4, 6}, 2}}) &&
                        r.best.cost.v0 == 110.0 && within(r.best.cost.v1, 22.219, 0.15);
        line(2, ok,
             "garver base fixed: " + summary(garver, r) + " (target {2-6:1 3-5:1 4-6:2}, v0=110, v1=22.219 +-15%)",
             fixed.proposed.tp);
    }
    t0 = Clock::now();
    const Burden n1 = compare_burden(garver, request(true, GenerationMode::Dispatch, 20));
    const double n1_secs = since(t0);
    {
        const PlanResult& r = n1.proposed;
        const bool ok = final_plan(r) == plan_of(garver, {{{2, 6}, 2}, {{3, 5}, 2}, {{4, 6}, 2}}) &&
                        r.best.cost.v0 == 160.0 && within(r.best.cost.v, 183.86, 0.05) && r.best.l_index[0] < 0.45;
        line(3, ok,
             "garver N-1 dispatch: " + summary(garver, r) +
                 " (target {2-6:2 3-5:2 4-6:2}, v0=160, v=183.86 +-5%, L<0.45)",
             r.tp);
    }

    // 4. Garver N-1, fixed generation
    t0 = Clock::now();
    {
        const PlanResult r = plan(garver, request(true, GenerationMode::Fixed, 20));
        const bool ok = r.best.cost.v0 == 160.0 && within(r.best.cost.v, 194.85, 0.05);
        line(4, ok, "garver N-1 fixed: " + summary(garver, r) + " (target v0=160, v=194.85 +-5%)", since(t0));
    }

    // 5. ff_n of the proposed method against rigorous single-stage runs
    {
        const double rf = static_cast<double>(fixed.ff_n_proposed) / static_cast<double>(fixed.ff_n_rigorous);
        const double rn = static_cast<double>(n1.ff_n_proposed) / static_cast<double>(n1.ff_n_rigorous);
        const bool ok = rf <= 0.20 && rn <= 0.20;
        line(5, ok,
             "ff_n proposed/rigorous: base fixed " + std::to_string(fixed.ff_n_proposed) + "/" +
                 std::to_string(fixed.ff_n_rigorous) + "=" + f2(rf) + ", N-1 dispatch " +
                 std::to_string(n1.ff_n_proposed) + "/" + std::to_string(n1.ff_n_rigorous) + "=" + f2(rn) +
                 " (target <= 0.20 each)",
             fixed_secs + n1_secs);
    }

    // 6. IEEE 24-bus, base case, dispatchable
    t0 = Clock::now();
    const Case rts = fixture("ieee24");
    {
        const PlanResult r = plan(rts, request(false, GenerationMode::Dispatch, 10));
        const bool ok = within(r.best.cost.v0, 48.0, 0.05);
        line(6, ok, "ieee24 base dispatch: " + summary(rts, r) + " (target v0=48 +-5%)", since(t0));
    }

    // 7. IEEE 118-bus, base case, dispatchable
    t0 = Clock::now();
    const Case big = fixture("ieee118");
    {
        const PlanResult r = plan(big, request(false, GenerationMode::Dispatch, 10));
        const bool ok = r.best.penalty.feasible && r.best.cost.v0 <= 1.10 * 44.940;
        line(7, ok,
             "ieee118 base dispatch: " + summary(big, r) + " (target penalty-free with v0 <= " + f2(1.10 * 44.940) +
                 ")",
             since(t0));
    }
    if (nightly) {
        t0 = Clock::now();
        const PlanResult r = plan(big, request(true, GenerationMode::Dispatch, 10));
        const bool ok = within(r.best.cost.v0, 329.8688, 0.10) && r.best.l_index[0] < 0.45;
        line(7, ok, "ieee118 N-1 dispatch (nightly): " + summary(big, r) + " (target v0=329.869 +-10%, L<0.45)",
             since(t0));
    }

    // 8. Garver dynamic; IEEE 24-bus N-1 must come out penalty-free
    t0 = Clock::now();
    {
        const Case dyn = fixture("garver6_dynamic");
        const PlanResult r = plan(dyn, request(false, GenerationMode::Dispatch, 20, true));
        bool l_ok = true;
        for (double l : r.best.l_index) l_ok = l_ok && l < 0.45;
        const PlanResult s = plan(rts, request(true, GenerationMode::Dispatch, 10));
        const bool ok = within(r.best.cost.v_dym, 239.6724, 0.05) && l_ok && s.best.penalty.feasible;
        std::string years;
        for (std::size_t y = 0; y < r.best.l_index.size(); ++y) years += (y ? "," : "") + f2(r.best.l_index[y]);
        line(8, ok,
             "garver dynamic: v_dym=" + f2(r.best.cost.v_dym) + " yearly L=" + years +
                 (r.best.penalty.feasible ? " feasible" : " penalised") + "; ieee24 N-1: " + summary(rts, s) +
                 " (target v_dym=239.672 +-5%, L<0.45, ieee24 N-1 penalty-free)",
             since(t0));
    }

    // 9. Property suites
    t0 = Clock::now();
    {
        const int status = std::system((std::string(TNEP_UNIT_TESTS) + " > /dev/null 2>&1").c_str());
        line(9, status == 0, "property suites (unit_tests)", since(t0));
    }

    const int total = nightly ? 10 : 9;
    g_report << g_passed << "/" << total << " criteria passed\n";
    std::printf("%d/%d criteria passed\n", g_passed, total);
    std::ofstream(fs::path(TNEP_BINARY_DIR) / (nightly ? "acceptance_nightly.txt" : "acceptance.txt")) << g_report.str();
    return 0;
}
