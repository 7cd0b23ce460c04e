#include "tnep/case_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tnep {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path.string());
    out << text;
    if (!out) throw FormatError("write failed for " + path.string());
}

json parse_json(const std::string& text, const std::string& origin)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // Translate the byte offset into line/column for the diagnostic.
        std::size_t line = 1, col = 1;
        const std::size_t end = std::min(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw FormatError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": parse error: " +
                          e.what());
    }
}

/// Field accessor that reports the JSON path of whatever went wrong.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

    const json& raw() const { return j_; }
    const std::string& path() const { return path_; }

    bool has(const char* key) const { return j_.is_object() && j_.contains(key); }

    Reader at(const char* key) const
    {
        if (!j_.is_object()) fail("expected an object");
        auto it = j_.find(key);
        if (it == j_.end()) throw FormatError(path_ + "." + key + ": missing required field");
        return Reader(*it, path_ + "." + key);
    }

    Reader at(std::size_t i) const { return Reader(j_.at(i), path_ + "[" + std::to_string(i) + "]"); }

    std::size_t size() const
    {
        if (!j_.is_array()) fail("expected an array");
        return j_.size();
    }

    double number() const
    {
        if (!j_.is_number()) fail("expected a number");
        return j_.get<double>();
    }

    int integer() const
    {
        if (!j_.is_number_integer()) fail("expected an integer");
        return j_.get<int>();
    }

    std::string string() const
    {
        if (!j_.is_string()) fail("expected a string");
        return j_.get<std::string>();
    }

    bool boolean() const
    {
        if (!j_.is_boolean()) fail("expected a boolean");
        return j_.get<bool>();
    }

    double number_or(const char* key, double fallback) const { return has(key) ? at(key).number() : fallback; }
    int integer_or(const char* key, int fallback) const { return has(key) ? at(key).integer() : fallback; }

    std::vector<double> numbers() const
    {
        std::vector<double> out(size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i).number();
        return out;
    }

    template <class V, class F>
    std::map<int, V> id_map(F&& conv) const
    {
        if (!j_.is_object()) fail("expected an object keyed by id");
        std::map<int, V> out;
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            int id = 0;
            try {
                std::size_t pos = 0;
                id = std::stoi(it.key(), &pos);
                if (pos != it.key().size()) throw std::invalid_argument(it.key());
            } catch (const std::exception&) {
                throw FormatError(path_ + ": key '" + it.key() + "' is not an integer id");
            }
            out.emplace(id, conv(Reader(it.value(), path_ + "." + it.key())));
        }
        return out;
    }

    [[noreturn]] void fail(const std::string& msg) const { throw FormatError(path_ + ": " + msg); }

private:
    const json& j_;
    std::string path_;
};

void check_schema(const Reader& root, const char* expected)
{
    const std::string version = root.at("schema_version").string();
    if (version != expected)
        throw FormatError(root.path() + ".schema_version: unsupported schema version '" + version + "' (expected '" +
                          expected + "')");
}

PenaltyConfig read_penalties(const Reader& r)
{
    PenaltyConfig p;
    p.eta = r.number_or("eta", p.eta);
    p.kappa_v = r.number_or("kappa_v", p.kappa_v);
    p.kappa_flow = r.number_or("kappa_flow", p.kappa_flow);
    p.kappa_qgen = r.number_or("kappa_qgen", p.kappa_qgen);
    p.kappa_pgen = r.number_or("kappa_pgen", p.kappa_pgen);
    p.kappa_qreac = r.number_or("kappa_qreac", p.kappa_qreac);
    p.kappa_l = r.number_or("kappa_l", p.kappa_l);
    p.infeasible = r.number_or("infeasible", p.infeasible);
    return p;
}

json write_penalties(const PenaltyConfig& p)
{
    return json{{"eta", p.eta},           {"kappa_v", p.kappa_v},         {"kappa_flow", p.kappa_flow},
                {"kappa_qgen", p.kappa_qgen}, {"kappa_pgen", p.kappa_pgen}, {"kappa_qreac", p.kappa_qreac},
                {"kappa_l", p.kappa_l},       {"infeasible", p.infeasible}};
}

template <class V>
json id_object(const std::map<int, V>& m)
{
    json out = json::object();
    for (const auto& [k, v] : m) out[std::to_string(k)] = v;
    return out;
}

} // namespace

Case parse_case(const std::string& text, const std::string& origin)
{
    const json doc = parse_json(text, origin);
    const Reader root(doc, origin);
    check_schema(root, kCaseSchema);

    Case::Data d;
    d.name = root.has("name") ? root.at("name").string() : std::string{};
    d.base_mva = root.at("base_mva").number();
    if (d.base_mva != 100.0) root.at("base_mva").fail("only a 100 MVA system base is supported");
    d.currency_unit = root.at("currency_unit").string();

    if (root.has("limits")) {
        const Reader lim = root.at("limits");
        d.limits.v_min = lim.number_or("v_min", d.limits.v_min);
        d.limits.v_max = lim.number_or("v_max", d.limits.v_max);
        d.limits.l_min = lim.number_or("l_min", d.limits.l_min);
        d.limits.l_max = lim.number_or("l_max", d.limits.l_max);
    }

    const Reader buses = root.at("buses");
    for (std::size_t i = 0; i < buses.size(); ++i) {
        const Reader b = buses.at(i);
        Bus bus;
        bus.id = b.at("id").integer();
        try {
            bus.kind = bus_kind_from_string(b.at("kind").string());
        } catch (const CaseError& e) {
            b.at("kind").fail(e.what());
        }
        bus.p_demand = b.number_or("p_demand", 0.0);
        bus.q_demand = b.number_or("q_demand", 0.0);
        bus.v_setpoint = b.number_or("v_setpoint", 1.0);
        bus.v_min = b.number_or("v_min", d.limits.v_min);
        bus.v_max = b.number_or("v_max", d.limits.v_max);
        d.buses.push_back(bus);
    }

    const Reader gens = root.at("generators");
    for (std::size_t i = 0; i < gens.size(); ++i) {
        const Reader g = gens.at(i);
        Generator gen;
        gen.bus = g.at("bus").integer();
        gen.p_min = g.number_or("p_min", 0.0);
        gen.p_max = g.at("p_max").number();
        gen.q_min = g.at("q_min").number();
        gen.q_max = g.at("q_max").number();
        gen.participation = g.number_or("participation", 1.0);
        gen.p_dispatch = g.number_or("p_dispatch", 0.0);
        d.generators.push_back(gen);
    }

    const Reader cors = root.at("corridors");
    for (std::size_t i = 0; i < cors.size(); ++i) {
        const Reader c = cors.at(i);
        Corridor cor;
        cor.id = c.at("id").integer();
        cor.from_bus = c.at("from_bus").integer();
        cor.to_bus = c.at("to_bus").integer();
        cor.r = c.number_or("r", 0.0);
        cor.x = c.at("x").number();
        cor.b_shunt = c.number_or("b_shunt", 0.0);
        cor.rating = c.at("rating").number();
        cor.circuit_cost = c.at("circuit_cost").number();
        cor.existing = c.integer_or("existing", 0);
        cor.max_new = c.integer_or("max_new", 0);
        d.corridors.push_back(cor);
    }

    if (root.has("reactive_candidates")) {
        const Reader rcs = root.at("reactive_candidates");
        for (std::size_t i = 0; i < rcs.size(); ++i) {
            const Reader r = rcs.at(i);
            ReactiveCandidate rc;
            rc.bus = r.at("bus").integer();
            rc.fixed_cost = r.at("fixed_cost").number();
            rc.variable_cost = r.at("variable_cost").number();
            rc.q_max = r.at("q_max").number();
            d.reactive.push_back(rc);
        }
    }

    if (root.has("horizon") && !root.at("horizon").raw().is_null()) {
        const Reader h = root.at("horizon");
        HorizonConfig hc;
        hc.years = h.at("years").integer();
        if (h.has("discount")) hc.discount = h.at("discount").numbers();
        if (h.has("load_scale")) hc.load_scale = h.at("load_scale").numbers();
        if (h.has("gen_scale")) hc.gen_scale = h.at("gen_scale").numbers();
        d.horizon = hc;
    }

    if (root.has("generation_plan") && !root.at("generation_plan").raw().is_null())
        d.generation_plan = root.at("generation_plan").id_map<double>([](const Reader& r) { return r.number(); });

    if (root.has("penalties")) d.penalties = read_penalties(root.at("penalties"));

    try {
        return Case(std::move(d));
    } catch (const CaseError& e) {
        throw CaseError(origin + ": " + e.what());
    }
}

Case load_case(const std::filesystem::path& path) { return parse_case(read_file(path), path.string()); }

std::string dump_case(const Case& c)
{
    json j;
    j["schema_version"] = kCaseSchema;
    j["name"] = c.name();
    j["base_mva"] = c.base_mva();
    j["currency_unit"] = c.currency_unit();
    const OperatingLimits& lim = c.limits();
    j["limits"] = {{"v_min", lim.v_min}, {"v_max", lim.v_max}, {"l_min", lim.l_min}, {"l_max", lim.l_max}};
    j["buses"] = json::array();
    for (const Bus& b : c.buses())
        j["buses"].push_back({{"id", b.id},
                              {"kind", to_string(b.kind)},
                              {"p_demand", b.p_demand},
                              {"q_demand", b.q_demand},
                              {"v_setpoint", b.v_setpoint},
                              {"v_min", b.v_min},
                              {"v_max", b.v_max}});
    j["generators"] = json::array();
    for (const Generator& g : c.generators())
        j["generators"].push_back({{"bus", g.bus},
                                   {"p_min", g.p_min},
                                   {"p_max", g.p_max},
                                   {"q_min", g.q_min},
                                   {"q_max", g.q_max},
                                   {"participation", g.participation},
                                   {"p_dispatch", g.p_dispatch}});
    j["corridors"] = json::array();
    for (const Corridor& l : c.corridors())
        j["corridors"].push_back({{"id", l.id},
                                  {"from_bus", l.from_bus},
                                  {"to_bus", l.to_bus},
                                  {"r", l.r},
                                  {"x", l.x},
                                  {"b_shunt", l.b_shunt},
                                  {"rating", l.rating},
                                  {"circuit_cost", l.circuit_cost},
                                  {"existing", l.existing},
                                  {"max_new", l.max_new}});
    j["reactive_candidates"] = json::array();
    for (const ReactiveCandidate& r : c.reactive())
        j["reactive_candidates"].push_back({{"bus", r.bus},
                                            {"fixed_cost", r.fixed_cost},
                                            {"variable_cost", r.variable_cost},
                                            {"q_max", r.q_max}});
    if (c.horizon()) {
        const HorizonConfig& h = *c.horizon();
        j["horizon"] = {{"years", h.years}, {"discount", h.discount}, {"load_scale", h.load_scale}, {"gen_scale", h.gen_scale}};
    }
    if (c.generation_plan()) j["generation_plan"] = id_object(*c.generation_plan());
    j["penalties"] = write_penalties(c.penalties());
    return j.dump(2) + "\n";
}

void save_case(const Case& c, const std::filesystem::path& path) { write_file(path, dump_case(c)); }

std::string dump_plan(const PlanFile& p)
{
    json j;
    j["schema_version"] = kPlanSchema;
    j["case"] = p.case_name;
    j["mode"] = {{"model", p.model},         {"security", p.security}, {"generation", p.generation},
                 {"horizon", p.horizon},     {"filters", p.filters},   {"l_max", p.l_max}};
    j["seed"] = p.seed;
    j["trials"] = p.trials;
    j["genes"] = p.genes;
    j["years"] = json::array();
    for (const PlanYear& y : p.years)
        j["years"].push_back({{"additions", id_object(y.additions)},
                              {"reactive", id_object(y.reactive)},
                              {"p_gen", id_object(y.p_gen)},
                              {"v_set", id_object(y.v_set)},
                              {"v0", y.v0},
                              {"v1", y.v1},
                              {"l_index", y.l_index}});
    j["cost"] = {{"v0", p.v0}, {"v1", p.v1}, {"v", p.v}, {"v_dym", p.v_dym}};
    j["penalty"] = {{"m", p.m}, {"e_g", p.e_g}, {"h", p.h}, {"feasible", p.feasible}};
    j["stats"] = {{"ff_n", p.ff_n}, {"pf_n", p.pf_n}, {"evaluations", p.evaluations},
                  {"iterations", p.iterations}};
    return j.dump(2) + "\n";
}

PlanFile parse_plan(const std::string& text, const std::string& origin)
{
    const json doc = parse_json(text, origin);
    const Reader root(doc, origin);
    check_schema(root, kPlanSchema);

    PlanFile p;
    p.case_name = root.at("case").string();
    const Reader mode = root.at("mode");
    p.model = mode.at("model").string();
    p.security = mode.at("security").string();
    p.generation = mode.at("generation").string();
    p.horizon = mode.at("horizon").string();
    p.filters = mode.at("filters").string();
    p.l_max = mode.at("l_max").number();
    if (!root.at("seed").raw().is_number_unsigned()) root.at("seed").fail("expected an unsigned integer");
    p.seed = root.at("seed").raw().get<std::uint64_t>();
    p.trials = root.at("trials").integer();
    p.genes = root.at("genes").numbers();
    const Reader years = root.at("years");
    for (std::size_t i = 0; i < years.size(); ++i) {
        const Reader y = years.at(i);
        PlanYear py;
        py.additions = y.at("additions").id_map<int>([](const Reader& r) { return r.integer(); });
        py.reactive = y.at("reactive").id_map<double>([](const Reader& r) { return r.number(); });
        py.p_gen = y.at("p_gen").id_map<double>([](const Reader& r) { return r.number(); });
        py.v_set = y.at("v_set").id_map<double>([](const Reader& r) { return r.number(); });
        py.v0 = y.at("v0").number();
        py.v1 = y.at("v1").number();
        py.l_index = y.at("l_index").number();
        p.years.push_back(std::move(py));
    }
    const Reader cost = root.at("cost");
    p.v0 = cost.at("v0").number();
    p.v1 = cost.at("v1").number();
    p.v = cost.at("v").number();
    p.v_dym = cost.at("v_dym").number();
    const Reader pen = root.at("penalty");
    p.m = pen.at("m").number();
    p.e_g = pen.at("e_g").number();
    p.h = pen.at("h").number();
    p.feasible = pen.at("feasible").boolean();
    const Reader st = root.at("stats");
    p.ff_n = st.at("ff_n").raw().get<std::int64_t>();
    p.pf_n = st.at("pf_n").raw().get<std::int64_t>();
    p.evaluations = st.at("evaluations").raw().get<std::int64_t>();
    p.iterations = st.at("iterations").integer();
    return p;
}

void save_plan(const PlanFile& plan, const std::filesystem::path& path) { write_file(path, dump_plan(plan)); }

PlanFile load_plan(const std::filesystem::path& path) { return parse_plan(read_file(path), path.string()); }

DynamicPlan plan_increments(const PlanFile& plan, const Case& c)
{
    std::vector<ExpansionPlan> incs;
    for (const PlanYear& y : plan.years) {
        ExpansionPlan p = ExpansionPlan::empty(c);
        for (const auto& [id, n] : y.additions) p.additions[c.corridor_index(id)] = n;
        for (const auto& [bus, q] : y.reactive) {
            auto k = c.reactive_at(c.bus_index(bus));
            if (!k) throw CaseError("plan has reactive source at bus " + std::to_string(bus) + " without a candidate");
            p.reactive[*k] = q;
        }
        incs.push_back(std::move(p));
    }
    return DynamicPlan(std::move(incs));
}

std::uint64_t file_checksum(const std::filesystem::path& path)
{
    const std::string bytes = read_file(path);
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace tnep
