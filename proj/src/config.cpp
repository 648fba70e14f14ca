#include "twotime/config.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "twotime/error.hpp"
#include "twotime/grid_io.hpp"
#include "twotime/presets.hpp"

namespace twotime {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& what)
{
    throw Error(ErrorKind::ValidationError, field + ": " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

/// Reads the members of one JSON object, tracking which keys were consumed so
/// that leftovers can be reported as unknown.
class Reader {
public:
    Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path))
    {
        if (!obj_.is_object())
            invalid(path_.empty() ? "<root>" : path_, "expected an object");
    }

    bool has(const char* key) const { return obj_.contains(key) && !obj_.at(key).is_null(); }
    std::string field(const char* key) const { return join(path_, key); }

    const json* raw(const char* key)
    {
        seen_.insert(key);
        return has(key) ? &obj_.at(key) : nullptr;
    }

    void number(const char* key, double& out)
    {
        if (const json* v = raw(key)) {
            if (!v->is_number())
                invalid(field(key), "expected a number");
            out = v->get<double>();
            if (!std::isfinite(out))
                invalid(field(key), "must be finite");
        }
    }

    template <class Int>
    void integer(const char* key, Int& out)
    {
        if (const json* v = raw(key)) {
            if (!v->is_number_integer())
                invalid(field(key), "expected an integer");
            if constexpr (std::is_unsigned_v<Int>) {
                if (v->is_number_unsigned())
                    out = v->get<Int>();
                else if (v->get<long long>() >= 0)
                    out = static_cast<Int>(v->get<long long>());
                else
                    invalid(field(key), "must be >= 0");
            } else {
                out = v->get<Int>();
            }
        }
    }

    void boolean(const char* key, bool& out)
    {
        if (const json* v = raw(key)) {
            if (!v->is_boolean())
                invalid(field(key), "expected true or false");
            out = v->get<bool>();
        }
    }

    void string(const char* key, std::string& out)
    {
        if (const json* v = raw(key)) {
            if (!v->is_string())
                invalid(field(key), "expected a string");
            out = v->get<std::string>();
        }
    }

    void numbers(const char* key, std::vector<double>& out)
    {
        if (const json* v = raw(key)) {
            if (!v->is_array())
                invalid(field(key), "expected an array of numbers");
            out.clear();
            for (std::size_t i = 0; i < v->size(); ++i) {
                const json& e = v->at(i);
                if (!e.is_number())
                    invalid(field(key) + "[" + std::to_string(i) + "]", "expected a number");
                out.push_back(e.get<double>());
                if (!std::isfinite(out.back()))
                    invalid(field(key) + "[" + std::to_string(i) + "]", "must be finite");
            }
        }
    }

    void interval(const char* key, Interval& out)
    {
        if (has(key)) {
            std::vector<double> v;
            numbers(key, v);
            if (v.size() != 2)
                invalid(field(key), "expected [lo, hi]");
            out = {v[0], v[1]};
        } else {
            seen_.insert(key);
        }
    }

    /// Rejects every member that no accessor asked for.
    void finish() const
    {
        for (const auto& item : obj_.items())
            if (!seen_.count(item.key()))
                invalid(join(path_, item.key()), "unknown key");
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

template <class Enum, std::size_t N>
Enum pick(const std::string& field, const std::string& value, const std::pair<const char*, Enum> (&table)[N])
{
    std::string allowed;
    for (const auto& [name, e] : table) {
        if (value == name)
            return e;
        allowed += allowed.empty() ? name : std::string(", ") + name;
    }
    invalid(field, "'" + value + "' is not one of " + allowed);
}

constexpr std::pair<const char*, Scenario> scenario_names[] = {
    {"infinite-well", Scenario::InfiniteWell}, {"finite-well", Scenario::FiniteWell}, {"barrier", Scenario::Barrier}};
constexpr std::pair<const char*, OutputFormat> format_names[] = {
    {"csv", OutputFormat::Csv}, {"pgm", OutputFormat::Pgm}, {"both", OutputFormat::Both}};
constexpr std::pair<const char*, Normalization> norm_names[] = {{"raw", Normalization::Raw},
                                                                {"max1", Normalization::Max1}};
constexpr std::pair<const char*, LineAxis> axis_names[] = {{"rows", LineAxis::AlongRows},
                                                           {"cols", LineAxis::AlongCols}};

json interval_json(Interval i) { return json::array({i.lo, i.hi}); }

void read_system(Reader r, SystemParams& s)
{
    r.number("m", s.m);
    r.number("M", s.M);
    r.number("PE", s.PE);
    r.number("D", s.D);
    r.finish();
}

void read_barrier_group(Reader& r, BarrierWavegroupConfig& w)
{
    r.number("v0", w.v0);
    r.number("dv", w.dv);
    r.number("V0", w.V0);
    r.number("dV", w.dV);
    r.integer("Nv", w.Nv);
    r.integer("NV", w.NV);
    r.number("span", w.span);
    r.number("x1_0", w.x1_0);
    r.number("x2_0", w.x2_0);
    r.finish();
}

void read_well_group(Reader& r, WellWavegroupConfig& w)
{
    r.number("n0", w.n0);
    r.number("dx", w.dx);
    r.number("V0", w.V0);
    r.number("dV", w.dV);
    r.integer("NV", w.NV);
    r.number("span", w.span);
    r.integer("n_min", w.n_min);
    r.integer("n_max", w.n_max);
    r.number("min_weight", w.min_weight);
    r.number("x1_0", w.x1_0);
    r.number("x2_0", w.x2_0);
    r.finish();
}

void read_wavegroup(const json& j, WavegroupConfig& out)
{
    Reader r(j, "wavegroup");
    std::string type;
    r.string("type", type);
    if (type == "barrier") {
        BarrierWavegroupConfig w;
        if (const auto* cur = std::get_if<BarrierWavegroupConfig>(&out))
            w = *cur;
        read_barrier_group(r, w);
        out = w;
    } else if (type == "well") {
        WellWavegroupConfig w;
        if (const auto* cur = std::get_if<WellWavegroupConfig>(&out))
            w = *cur;
        read_well_group(r, w);
        out = w;
    } else {
        invalid("wavegroup.type", "expected \"barrier\" or \"well\"");
    }
}

void read_grid(Reader r, GridSpec& g)
{
    r.interval("x1", g.x1);
    r.interval("x2", g.x2);
    r.integer("n1", g.n1);
    r.integer("n2", g.n2);
    r.numbers("times", g.times);
    r.finish();
}

AsynchSpec read_asynch(Reader r)
{
    AsynchSpec a;
    r.number("x1", a.x1);
    r.number("t1", a.t1);
    r.interval("x2", a.x2);
    r.integer("n2", a.n2);
    r.interval("t2", a.t2);
    r.integer("nt", a.nt);
    r.finish();
    return a;
}

void read_analysis(Reader r, AnalysisSpec& a)
{
    r.number("peak_threshold", a.peak_threshold);
    r.integer("min_separation", a.min_separation);
    if (const json* f = r.raw("fringe")) {
        Reader fr(*f, r.field("fringe"));
        FringeSpec spec;
        std::string axis = "cols";
        fr.string("axis", axis);
        spec.axis = pick(fr.field("axis"), axis, axis_names);
        fr.integer("line", spec.line);
        fr.interval("window", spec.window);
        fr.integer("time_index", spec.time_index);
        fr.finish();
        a.fringe = spec;
    }
    if (const json* t = r.raw("type2")) {
        Reader tr(*t, r.field("type2"));
        Type2Spec spec;
        tr.numbers("D", spec.D);
        tr.number("delay", spec.options.delay);
        tr.integer("box", spec.options.box);
        tr.number("box_widths", spec.options.box_widths);
        tr.finish();
        a.type2 = spec;
    }
    r.finish();
}

void require_interval(const std::string& field, Interval i, bool allow_point)
{
    if (!(std::isfinite(i.lo) && std::isfinite(i.hi)))
        invalid(field, "bounds must be finite");
    if (allow_point ? i.hi < i.lo : i.hi <= i.lo)
        invalid(field, "requires lo < hi");
}

} // namespace

const char* to_string(Scenario s)
{
    for (const auto& [name, e] : scenario_names)
        if (e == s)
            return name;
    return "unknown";
}

const char* to_string(OutputFormat f)
{
    for (const auto& [name, e] : format_names)
        if (e == f)
            return name;
    return "unknown";
}

void RunConfig::validate() const
{
    auto checked = [](const char* field, auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::ValidationError)
                throw;
            invalid(field, e.what());
        }
    };
    checked("system", [&] { system.validate(); });

    const bool well_group = std::holds_alternative<WellWavegroupConfig>(wavegroup);
    switch (scenario) {
    case Scenario::InfiniteWell:
        if (!well_group)
            invalid("wavegroup.type", "infinite-well requires a \"well\" wavegroup");
        if (system.kind != PotentialKind::InfiniteWell)
            invalid("system", "infinite-well requires hard walls");
        break;
    case Scenario::FiniteWell:
    case Scenario::Barrier:
        if (well_group)
            invalid("wavegroup.type", std::string(to_string(scenario)) + " requires a \"barrier\" wavegroup");
        if (system.kind != PotentialKind::Square)
            invalid("system", "square potential expected");
        if (scenario == Scenario::FiniteWell && !(system.PE < 0.0))
            invalid("system.PE", "finite-well requires PE < 0");
        if (scenario == Scenario::Barrier && system.PE < 0.0)
            invalid("system.PE", "barrier requires PE >= 0");
        break;
    }
    std::visit([&](const auto& w) { checked("wavegroup", [&] { w.validate(); }); }, wavegroup);

    checked("grid", [&] { grid.validate(); });
    for (std::size_t k = 0; k < asynch.size(); ++k) {
        const auto& a = asynch[k];
        const std::string f = "asynch[" + std::to_string(k) + "]";
        require_interval(f + ".x2", a.x2, false);
        require_interval(f + ".t2", a.t2, a.nt == 1);
        if (a.n2 < 2)
            invalid(f + ".n2", "must be >= 2");
        if (a.nt < 1)
            invalid(f + ".nt", "must be >= 1");
        if (a.nt == 1 && a.t2.lo != a.t2.hi)
            invalid(f + ".t2", "a single row needs lo == hi");
    }
    if (coeffs) {
        if (!(coeffs->E_min > 0.0))
            invalid("coeffs.E_min", "must be > 0");
        if (coeffs->E_max < coeffs->E_min)
            invalid("coeffs.E_max", "must be >= E_min");
        if (coeffs->count < 1)
            invalid("coeffs.count", "must be >= 1");
        if (coeffs->count == 1 && coeffs->E_max != coeffs->E_min)
            invalid("coeffs.count", "a single row needs E_min == E_max");
    }
    if (conserve.panels < 1)
        invalid("conserve.panels", "must be >= 1");
    if (!(analysis.peak_threshold > 0.0 && analysis.peak_threshold < 1.0))
        invalid("analysis.peak_threshold", "must lie in (0, 1)");
    if (analysis.fringe)
        require_interval("analysis.fringe.window", analysis.fringe->window, false);
    if (analysis.type2) {
        if (well_group)
            invalid("analysis.type2", "needs a barrier wavegroup");
        if (analysis.type2->D.empty())
            invalid("analysis.type2.D", "must list at least one half-width");
        for (double D : analysis.type2->D)
            if (!(D > 0.0))
                invalid("analysis.type2.D", "half-widths must be > 0");
        if (analysis.type2->options.box < 3)
            invalid("analysis.type2.box", "must be >= 3");
        if (!(analysis.type2->options.box_widths > 0.0))
            invalid("analysis.type2.box_widths", "must be > 0");
    }
    if (output.prefix.empty())
        invalid("output.prefix", "must not be empty");
    if (threads < 1)
        invalid("threads", "must be >= 1");
    if (!(fd_step >= 0.0) || !std::isfinite(fd_step))
        invalid("fd_step", "must be >= 0");
}

RunConfig config_from_json(const json& j)
{
    Reader r(j, "");
    RunConfig cfg;

    if (const json* p = r.raw("preset")) {
        if (!p->is_string())
            invalid("preset", "expected a string");
        cfg.preset = p->get<std::string>();
    }
    std::string scenario;
    if (!r.has("scenario"))
        invalid("scenario", "required");
    r.string("scenario", scenario);
    cfg.scenario = pick("scenario", scenario, scenario_names);
    cfg.system.kind = cfg.scenario == Scenario::InfiniteWell ? PotentialKind::InfiniteWell : PotentialKind::Square;

    if (!r.has("system"))
        invalid("system", "required");
    read_system(Reader(*r.raw("system"), "system"), cfg.system);
    if (!r.has("wavegroup"))
        invalid("wavegroup", "required");
    read_wavegroup(*r.raw("wavegroup"), cfg.wavegroup);
    r.boolean("include_pe_phase", cfg.include_pe_phase);

    if (const json* g = r.raw("grid"))
        read_grid(Reader(*g, "grid"), cfg.grid);
    if (const json* a = r.raw("asynch")) {
        if (!a->is_array())
            invalid("asynch", "expected an array");
        for (std::size_t k = 0; k < a->size(); ++k)
            cfg.asynch.push_back(read_asynch(Reader(a->at(k), "asynch[" + std::to_string(k) + "]")));
    }
    if (const json* c = r.raw("coeffs")) {
        Reader cr(*c, "coeffs");
        CoeffSweep sweep;
        cr.number("E_min", sweep.E_min);
        cr.number("E_max", sweep.E_max);
        cr.integer("count", sweep.count);
        cr.finish();
        cfg.coeffs = sweep;
    }
    if (const json* c = r.raw("conserve")) {
        Reader cr(*c, "conserve");
        cr.integer("segments", cfg.conserve.segments);
        cr.integer("seed", cfg.conserve.seed);
        cr.integer("panels", cfg.conserve.panels);
        cr.finish();
    }
    if (const json* a = r.raw("analysis"))
        read_analysis(Reader(*a, "analysis"), cfg.analysis);
    if (const json* o = r.raw("output")) {
        Reader orr(*o, "output");
        std::string format = to_string(cfg.output.format);
        std::string norm = to_string(cfg.output.normalization);
        orr.string("format", format);
        orr.string("normalize", norm);
        orr.string("prefix", cfg.output.prefix);
        orr.finish();
        cfg.output.format = pick("output.format", format, format_names);
        cfg.output.normalization = pick("output.normalize", norm, norm_names);
    }
    r.integer("threads", cfg.threads);
    r.number("fd_step", cfg.fd_step);
    r.finish();

    cfg.validate();
    return cfg;
}

RunConfig parse_config(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // e.byte is 1-based and points at the offending character
        std::size_t line = 1, col = 1;
        const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw Error(ErrorKind::ParseError, "config parse error at line " + std::to_string(line) + ", column " +
                                               std::to_string(col) + ": " + e.what());
    }
    if (!doc.is_object())
        invalid("<root>", "expected an object");

    if (doc.contains("anchors") && !doc.contains("preset"))
        invalid("anchors", "only valid together with \"preset\"");
    if (doc.contains("preset")) {
        if (!doc["preset"].is_string())
            invalid("preset", "expected a string");
        const std::string name = doc["preset"].get<std::string>();
        PresetAnchors anchors;
        if (doc.contains("anchors")) {
            Reader ar(doc["anchors"], "anchors");
            ar.number("m", anchors.m);
            ar.number("V0", anchors.V0);
            ar.number("D", anchors.D);
            ar.finish();
            doc.erase("anchors");
        }
        json base = config_to_json(make_preset(name, anchors));
        // objects merge member-wise, arrays and scalars replace, null deletes
        base.merge_patch(doc);
        return config_from_json(base);
    }
    return config_from_json(doc);
}

RunConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

json config_to_json(const RunConfig& cfg)
{
    json j;
    if (cfg.preset)
        j["preset"] = *cfg.preset;
    j["scenario"] = to_string(cfg.scenario);
    j["system"] = {{"m", cfg.system.m}, {"M", cfg.system.M}, {"PE", cfg.system.PE}, {"D", cfg.system.D}};
    if (const auto* b = std::get_if<BarrierWavegroupConfig>(&cfg.wavegroup)) {
        j["wavegroup"] = {{"type", "barrier"}, {"v0", b->v0}, {"dv", b->dv},     {"V0", b->V0},
                          {"dV", b->dV},       {"Nv", b->Nv}, {"NV", b->NV},     {"span", b->span},
                          {"x1_0", b->x1_0},   {"x2_0", b->x2_0}};
    } else {
        const auto& w = std::get<WellWavegroupConfig>(cfg.wavegroup);
        j["wavegroup"] = {{"type", "well"},   {"n0", w.n0},       {"dx", w.dx},
                          {"V0", w.V0},       {"dV", w.dV},       {"NV", w.NV},
                          {"span", w.span},   {"n_min", w.n_min}, {"n_max", w.n_max},
                          {"min_weight", w.min_weight}, {"x1_0", w.x1_0}, {"x2_0", w.x2_0}};
    }
    j["include_pe_phase"] = cfg.include_pe_phase;
    j["grid"] = {{"x1", interval_json(cfg.grid.x1)},
                 {"x2", interval_json(cfg.grid.x2)},
                 {"n1", cfg.grid.n1},
                 {"n2", cfg.grid.n2},
                 {"times", cfg.grid.times}};
    j["asynch"] = json::array();
    for (const auto& a : cfg.asynch)
        j["asynch"].push_back({{"x1", a.x1},
                               {"t1", a.t1},
                               {"x2", interval_json(a.x2)},
                               {"n2", a.n2},
                               {"t2", interval_json(a.t2)},
                               {"nt", a.nt}});
    if (cfg.coeffs)
        j["coeffs"] = {{"E_min", cfg.coeffs->E_min}, {"E_max", cfg.coeffs->E_max}, {"count", cfg.coeffs->count}};
    j["conserve"] = {
        {"segments", cfg.conserve.segments}, {"seed", cfg.conserve.seed}, {"panels", cfg.conserve.panels}};
    json analysis = {{"peak_threshold", cfg.analysis.peak_threshold},
                     {"min_separation", cfg.analysis.min_separation}};
    if (const auto& f = cfg.analysis.fringe)
        analysis["fringe"] = {{"axis", f->axis == LineAxis::AlongRows ? "rows" : "cols"},
                              {"line", f->line},
                              {"window", interval_json(f->window)},
                              {"time_index", f->time_index}};
    if (const auto& t = cfg.analysis.type2)
        analysis["type2"] = {{"D", t->D},
                             {"delay", t->options.delay},
                             {"box", t->options.box},
                             {"box_widths", t->options.box_widths}};
    j["analysis"] = analysis;
    j["output"] = {{"format", to_string(cfg.output.format)},
                   {"normalize", to_string(cfg.output.normalization)},
                   {"prefix", cfg.output.prefix}};
    j["threads"] = cfg.threads;
    j["fd_step"] = cfg.fd_step;
    return j;
}

std::string config_hash(const RunConfig& cfg)
{
    json j = config_to_json(cfg);
    j.erase("output");
    j.erase("threads");
    const std::string text = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace twotime
