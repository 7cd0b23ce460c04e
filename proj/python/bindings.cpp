#include <map>
#include <string>
#include <utility>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "tnep/case_io.hpp"
#include "tnep/dc_power_flow.hpp"
#include "tnep/fitness.hpp"
#include "tnep/planner.hpp"

namespace py = pybind11;
using namespace tnep;

namespace {

using Additions = std::map<std::pair<int, int>, int>;

ExpansionPlan to_plan(const Case& c, const Additions& adds)
{
    ExpansionPlan p = ExpansionPlan::empty(c);
    for (const auto& [ends, n] : adds) {
        const auto l = c.find_corridor(ends.first, ends.second);
        if (!l) throw py::value_error("no corridor " + std::to_string(ends.first) + "-" + std::to_string(ends.second));
        p.additions[*l] = n;
    }
    return p;
}

GenerationMode generation_of(const std::string& s)
{
    if (s == "dispatch") return GenerationMode::Dispatch;
    if (s == "fixed") return GenerationMode::Fixed;
    throw py::value_error("generation must be 'dispatch' or 'fixed'");
}

Model model_of(const std::string& s)
{
    if (s == "ac") return Model::AC;
    if (s == "dc") return Model::DC;
    throw py::value_error("model must be 'ac' or 'dc'");
}

py::object json_loads(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

py::dict evaluation_dict(const Evaluation& ev)
{
    py::dict d;
    d["m"] = ev.penalty.m;
    d["e_g"] = ev.penalty.e_g;
    d["h"] = ev.penalty.h;
    d["feasible"] = ev.penalty.feasible;
    d["per_class"] = ev.penalty.per_class;
    d["v0"] = ev.cost.v0;
    d["v1"] = ev.cost.v1;
    d["v"] = ev.cost.v;
    d["l_index"] = ev.l_index;
    d["pf_calls"] = ev.penalty.pf_calls;
    return d;
}

} // namespace

PYBIND11_MODULE(_tnep, m)
{
    m.doc() = "Transmission network expansion planning core";

    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<CaseError>(m, "CaseError", PyExc_ValueError);

    py::class_<Case>(m, "Case")
        .def_property_readonly("name", &Case::name)
        .def_property_readonly("base_mva", &Case::base_mva)
        .def_property_readonly("bus_ids",
                               [](const Case& c) {
                                   std::vector<int> ids;
                                   for (const auto& b : c.buses()) ids.push_back(b.id);
                                   return ids;
                               })
        .def_property_readonly("corridors",
                               [](const Case& c) {
                                   py::list out;
                                   for (const auto& k : c.corridors()) {
                                       py::dict d;
                                       d["id"] = k.id;
                                       d["from_bus"] = k.from_bus;
                                       d["to_bus"] = k.to_bus;
                                       d["existing"] = k.existing;
                                       d["max_new"] = k.max_new;
                                       d["circuit_cost"] = k.circuit_cost;
                                       out.append(d);
                                   }
                                   return out;
                               })
        .def_property_readonly("total_p_demand", &Case::total_p_demand)
        .def("dump", &dump_case)
        .def("__repr__", [](const Case& c) {
            return "<Case " + c.name() + ": " + std::to_string(c.buses().size()) + " buses, " +
                   std::to_string(c.corridors().size()) + " corridors>";
        });

    m.def("load_case", &load_case, py::arg("path"));
    m.def("parse_case", &parse_case, py::arg("text"), py::arg("origin") = "<memory>");
    m.def("checksum", &file_checksum, py::arg("path"));

    m.def(
        "plan",
        [](const Case& c, const std::string& model, bool security, const std::string& generation, bool dynamic,
           bool filters, std::uint64_t seed, int trials, std::optional<double> l_max) {
            PlanRequest r;
            r.model = model_of(model);
            r.security = security;
            r.gen = generation_of(generation);
            r.dynamic = dynamic;
            r.filters = filters;
            r.seed = seed;
            r.trials = trials;
            r.l_max = l_max;
            PlanResult res;
            {
                py::gil_scoped_release release;
                res = plan(c, r);
            }
            return json_loads(dump_plan(to_plan_file(res, c, r)));
        },
        py::arg("case"), py::kw_only(), py::arg("model") = "ac", py::arg("security") = false,
        py::arg("generation") = "dispatch", py::arg("dynamic") = false, py::arg("filters") = true,
        py::arg("seed") = 1, py::arg("trials") = 1, py::arg("l_max") = py::none(),
        "Runs the planner and returns the plan document as a dict.");

    m.def(
        "evaluate",
        [](const Case& c, const Additions& additions, const std::string& model, bool security,
           const std::string& generation) {
            EvalOptions o;
            o.model = model_of(model);
            o.security = security;
            o.gen = generation_of(generation);
            const ExpansionPlan p = to_plan(c, additions);
            return evaluation_dict(evaluate_static(p, case_controls(c, p), c, o));
        },
        py::arg("case"), py::arg("additions"), py::kw_only(), py::arg("model") = "ac", py::arg("security") = false,
        py::arg("generation") = "dispatch",
        "Modified objective of a plan at the case dispatch; additions map (from, to) to circuits.");

    m.def(
        "dc_flow",
        [](const Case& c, const Additions& additions) {
            const ExpansionPlan p = to_plan(c, additions);
            const DcSolution s = solve_dc(c, p, case_controls(c, p).p_gen);
            py::dict d;
            d["theta"] = s.theta;
            d["flow"] = s.flow;
            d["slack_injection"] = s.slack_injection;
            return d;
        },
        py::arg("case"), py::arg("additions") = Additions{}, "DC power flow at the case dispatch.");
}
