#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "tnep/case_io.hpp"
#include "tnep/dc_power_flow.hpp"
#include "tnep/planner.hpp"

namespace fs = std::filesystem;
using namespace tnep;

namespace {

enum Exit { kOk = 0, kInfeasible = 1, kInput = 2, kNumerical = 3 };

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double v, int prec = 4)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

std::string plan_lines(const Case& c, const ExpansionPlan& inc)
{
    std::string s;
    for (std::size_t l = 0; l < c.corridors().size(); ++l) {
        if (inc.additions[l] == 0) continue;
        const Corridor& cor = c.corridors()[l];
        if (!s.empty()) s += "; ";
        s += "n_" + std::to_string(cor.from_bus) + "-" + std::to_string(cor.to_bus) + " = " +
             std::to_string(inc.additions[l]);
    }
    return s.empty() ? "none" : s;
}

std::string report(const PlanResult& r, const PlanFile& f, const Case& c)
{
    const Evaluation& e = r.best;
    std::ostringstream o;
    o << "case        " << c.name() << "\n"
      << "mode        model=" << f.model << " security=" << f.security << " generation=" << f.generation
      << " horizon=" << f.horizon << " filters=" << f.filters << "\n"
      << "seed        " << f.seed << " (trials " << f.trials << ")\n"
      << "currency    " << c.currency_unit() << "\n\n";
    for (std::size_t y = 0; y < e.decoded.years.size(); ++y) {
        const ExpansionPlan& inc = e.decoded.increments.increment(y);
        int lines = 0;
        for (int n : inc.additions) lines += n;
        if (f.years.size() > 1) o << "year " << y + 1 << "\n";
        o << "new lines constructed   " << plan_lines(c, inc) << "\n"
          << "no. of new lines        " << lines << "\n"
          << "reactive sources (p.u.)";
        if (c.reactive().empty()) o << " none";
        for (std::size_t k = 0; k < c.reactive().size(); ++k)
            o << "  bus " << c.reactive()[k].bus << ": " << fmt(inc.reactive[k]);
        o << "\n"
          << "v0                      " << fmt(f.years[y].v0) << "\n"
          << "v1                      " << fmt(f.years[y].v1) << "\n"
          << "L                       " << fmt(f.years[y].l_index) << "\n\n";
    }
    o << "v0          " << fmt(f.v0) << "\n"
      << "v1          " << fmt(f.v1) << "\n"
      << "v           " << fmt(f.v) << "\n";
    if (f.horizon == "dynamic") o << "v_dym       " << fmt(f.v_dym) << "\n";
    o << "m           " << fmt(f.m) << "\n"
      << "feasible    " << (f.feasible ? "yes" : "no") << "\n";
    for (const auto& [cls, amount] : e.penalty.per_class) o << "penalty     " << cls << " " << fmt(amount, 6) << "\n";
    o << "tp          " << fmt(r.tp, 2) << " secs\n"
      << "ff_n        " << f.ff_n << "\n"
      << "pf_n        " << f.pf_n << "\n";
    return o.str();
}

void write_text(const fs::path& p, const std::string& text)
{
    std::ofstream out(p);
    if (!out) throw InputError("cannot write " + p.string());
    out << text;
}

Model parse_model(const std::string& s) { return s == "dc" ? Model::DC : Model::AC; }

struct PlanArgs {
    std::string case_path;
    std::string model = "ac";
    std::string security = "none";
    std::string generation = "dispatch";
    std::string horizon = "static";
    std::string filters = "on";
    std::optional<std::uint64_t> seed;
    int trials = 1;
    std::optional<double> lmax;
    std::string out = ".";
};

int cmd_plan(const PlanArgs& a)
{
    const Case c = load_case(a.case_path);
    PlanRequest req;
    req.model = parse_model(a.model);
    req.security = a.security == "n1";
    req.gen = a.generation == "fixed" ? GenerationMode::Fixed : GenerationMode::Dispatch;
    req.dynamic = a.horizon == "dynamic";
    req.filters = a.filters == "on";
    req.l_max = a.lmax;
    req.trials = a.trials;
    req.seed = a.seed ? *a.seed : std::random_device{}();

    const PlanResult r = plan(c, req);
    const PlanFile f = to_plan_file(r, c, req);

    const fs::path out(a.out);
    fs::create_directories(out);
    save_plan(f, out / "plan.json");
    std::ostringstream csv;
    csv << "trial,iteration,best_m,ff_n\n";
    for (std::size_t t = 0; t < r.trials.size(); ++t) {
        const TrialResult& tr = r.trials[t];
        const RunStats& st = tr.ac ? tr.ac->stats : tr.dc->stats;
        for (std::size_t i = 0; i < st.history.size(); ++i) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", st.history[i]);
            csv << t + 1 << "," << i << "," << buf << "," << st.ff_history[i] << "\n";
        }
    }
    write_text(out / "convergence.csv", csv.str());
    const std::string rep = report(r, f, planning_case(c, req));
    write_text(out / "report.txt", rep);
    std::cout << rep;
    if (!f.feasible) {
        std::cerr << "best plan violates operating limits (m - v = " << fmt(f.m - (req.dynamic ? f.v_dym : f.v), 6)
                  << ")\n";
        return kInfeasible;
    }
    return kOk;
}

struct PfArgs {
    std::string case_path;
    std::string plan_path;
    int contingency = 0;
    int year = 1;
};

int cmd_pf(const PfArgs& a)
{
    const Case input = load_case(a.case_path);
    Decoded d;
    Case c = input;
    if (a.plan_path.empty()) {
        d.increments = DynamicPlan({ExpansionPlan::empty(c)});
        d.years.push_back(case_controls(c, ExpansionPlan::empty(c)));
    } else {
        const PlanFile f = load_plan(a.plan_path);
        c = planning_case(input, request_of(f));
        d = decode_plan_file(f, c);
    }
    if (a.year < 1 || a.year > static_cast<int>(d.years.size())) throw InputError("year out of range");
    const auto y = static_cast<std::size_t>(a.year - 1);
    const Case yc = c.horizon() ? c.year_view(a.year - 1) : c;
    const YearDecision& yd = d.years[y];

    std::optional<std::size_t> outage;
    if (a.contingency != 0) {
        const auto list = contingency_list(yc, yd.plan);
        if (a.contingency < 0 || a.contingency > static_cast<int>(list.size()))
            throw InputError("contingency " + std::to_string(a.contingency) + " does not exist (NC = " +
                             std::to_string(list.size()) + ")");
        outage = list[static_cast<std::size_t>(a.contingency - 1)].corridor;
    }
    const std::vector<int> circuits = circuits_in_service(yc, yd.plan, outage);
    if (!is_connected(yc, circuits)) {
        std::cout << "state is islanded\n";
        return kInfeasible;
    }
    const Admittance adm = build_admittance(yc, circuits);
    Controls ctl = default_controls(yc, yd.plan);
    ctl.p_gen = yd.p_gen;
    for (std::size_t i = 0; i < yc.buses().size(); ++i)
        if (yc.buses()[i].kind != BusKind::PQ) ctl.v_set[i] = yd.v_set[i];
    const PFSolution pf = solve_ac(adm, yc, ctl);

    std::printf("converged %s  iterations %d  max mismatch %.3e\n", pf.converged ? "yes" : "no", pf.iterations,
                pf.max_mismatch);
    if (!pf.converged) return kInfeasible;
    std::printf("%6s %10s %12s\n", "bus", "V (p.u.)", "theta (rad)");
    for (std::size_t i = 0; i < yc.buses().size(); ++i)
        std::printf("%6d %10.6f %12.6f\n", yc.buses()[i].id, pf.v[i], pf.theta[i]);
    std::printf("%6s %10s %10s\n", "gen", "P (p.u.)", "Q (p.u.)");
    for (std::size_t g = 0; g < yc.generators().size(); ++g)
        std::printf("%6d %10.6f %10.6f\n", yc.generators()[g].bus, pf.p_gen[g], pf.q_gen[g]);
    std::printf("%9s %8s %10s %10s %10s\n", "corridor", "circuits", "S_from", "S_to", "limit");
    for (std::size_t l = 0; l < yc.corridors().size(); ++l) {
        if (circuits[l] == 0) continue;
        const Corridor& cor = yc.corridors()[l];
        const double limit = derated_limit(cor, yd.plan.circuits(yc, l), outage && *outage == l);
        std::printf("%4d-%-4d %8d %10.6f %10.6f %10.6f\n", cor.from_bus, cor.to_bus, circuits[l], pf.s_from[l],
                    pf.s_to[l], limit);
    }
    if (!outage) std::printf("L-index %.6f\n", l_index(pf, adm, yc));
    return kOk;
}

struct TuneArgs {
    std::string case_path;
    std::string grid;
    std::string security = "n1";
    std::string generation = "dispatch";
    int trials = 5;
    int iter = 10;
    std::uint64_t seed = 1;
};

std::vector<TuneSetting> parse_grid(const std::string& spec, const MabcParams& base)
{
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw InputError("grid must look like e_h=1..6 or lim=2,4,6");
    const std::string key = spec.substr(0, eq);
    const std::string vals = spec.substr(eq + 1);
    if (key != "e_h" && key != "lim") throw InputError("grid parameter must be e_h or lim");
    std::vector<int> xs;
    if (const auto dots = vals.find(".."); dots != std::string::npos) {
        const int lo = std::stoi(vals.substr(0, dots));
        const int hi = std::stoi(vals.substr(dots + 2));
        for (int v = lo; v <= hi; ++v) xs.push_back(v);
    } else {
        std::stringstream ss(vals);
        for (std::string item; std::getline(ss, item, ',');)
            if (!item.empty()) xs.push_back(std::stoi(item));
    }
    if (xs.empty()) throw InputError("empty grid");
    std::vector<TuneSetting> grid;
    for (int v : xs) grid.push_back(key == "e_h" ? TuneSetting{v, base.lim} : TuneSetting{base.e_h, v});
    return grid;
}

int cmd_tune(const TuneArgs& a)
{
    const Case c = load_case(a.case_path);
    PlanRequest req;
    const std::vector<TuneSetting> grid = parse_grid(a.grid, req.ac_params);
    EvalOptions o;
    o.security = a.security == "n1";
    o.gen = a.generation == "fixed" ? GenerationMode::Fixed : GenerationMode::Dispatch;
    const Evaluator ev(c, o);
    const Objective obj = [&ev](std::span<const double> x) {
        const Evaluation e = ev.evaluate(x);
        return ObjectiveValue{e.penalty.m, true, e.penalty.pf_calls, e.penalty.feasible};
    };
    const auto rows = tune_sweep(obj, ev.encoding().bounds(), grid, req.ac_params, a.trials, a.iter, a.seed);

    const bool by_eh = a.grid.rfind("e_h", 0) == 0;
    std::printf("%-24s", by_eh ? "E_h" : "lim");
    for (const TuneRow& r : rows) std::printf(" %12d", by_eh ? r.setting.e_h : r.setting.lim);
    std::printf("\n");
    for (int t = 0; t < a.trials; ++t) {
        std::printf("variance, trial %-8d", t + 1);
        for (const TuneRow& r : rows) std::printf(" %12.4f", r.variance[static_cast<std::size_t>(t)]);
        std::printf("\n");
    }
    auto stat = [&](const char* name, auto get) {
        std::printf("%-24s", name);
        for (const TuneRow& r : rows) std::printf(" %12.4f", get(r));
        std::printf("\n");
    };
    stat("mean variance", [](const TuneRow& r) { return r.mean_variance; });
    stat("minimum cost", [](const TuneRow& r) { return r.min_cost; });
    stat("maximum cost", [](const TuneRow& r) { return r.max_cost; });
    stat("mean cost", [](const TuneRow& r) { return r.mean_cost; });
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Transmission network expansion planning"};
    app.require_subcommand(1);

    PlanArgs pa;
    auto* plan_cmd = app.add_subcommand("plan", "Run the planner and write plan.json, convergence.csv, report.txt");
    plan_cmd->add_option("--case", pa.case_path, "Case file")->required()->check(CLI::ExistingFile);
    plan_cmd->add_option("--model", pa.model)->check(CLI::IsMember({"ac", "dc"}));
    plan_cmd->add_option("--security", pa.security)->check(CLI::IsMember({"none", "n1"}));
    plan_cmd->add_option("--generation", pa.generation)->check(CLI::IsMember({"fixed", "dispatch"}));
    plan_cmd->add_option("--horizon", pa.horizon)->check(CLI::IsMember({"static", "dynamic"}));
    plan_cmd->add_option("--filters", pa.filters)->check(CLI::IsMember({"on", "off"}));
    plan_cmd->add_option("--seed", pa.seed);
    plan_cmd->add_option("--trials", pa.trials)->check(CLI::PositiveNumber);
    plan_cmd->add_option("--lmax", pa.lmax)->check(CLI::Range(0.0, 1.0));
    plan_cmd->add_option("--out", pa.out, "Output directory");

    PfArgs pf;
    auto* pf_cmd = app.add_subcommand("pf", "Solve one AC power flow of a stored plan");
    pf_cmd->add_option("--case", pf.case_path)->required()->check(CLI::ExistingFile);
    pf_cmd->add_option("--plan", pf.plan_path)->check(CLI::ExistingFile);
    pf_cmd->add_option("--contingency", pf.contingency, "0 = base case, k = k-th occupied corridor");
    pf_cmd->add_option("--year", pf.year);

    TuneArgs ta;
    auto* tune_cmd = app.add_subcommand("tune", "Population-variance sweep over e_h or lim");
    tune_cmd->add_option("--case", ta.case_path)->required()->check(CLI::ExistingFile);
    tune_cmd->add_option("--grid", ta.grid, "e_h=1..6 or lim=2,4,6")->required();
    tune_cmd->add_option("--security", ta.security)->check(CLI::IsMember({"none", "n1"}));
    tune_cmd->add_option("--generation", ta.generation)->check(CLI::IsMember({"fixed", "dispatch"}));
    tune_cmd->add_option("--trials", ta.trials)->check(CLI::PositiveNumber);
    tune_cmd->add_option("--iter", ta.iter)->check(CLI::NonNegativeNumber);
    tune_cmd->add_option("--seed", ta.seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInput;
    }

    try {
        if (*plan_cmd) return cmd_plan(pa);
        if (*pf_cmd) return cmd_pf(pf);
        if (*tune_cmd) return cmd_tune(ta);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInput;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInput;
    } catch (const CaseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kNumerical;
    }
    return kOk;
}
