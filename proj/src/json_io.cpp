#include "gsys/json_io.hpp"

#include <set>

namespace gsys {

using nlohmann::json;

namespace {

void require_keys(const json& j, const std::set<std::string>& allowed, const std::string& ctx) {
    if (!j.is_object()) throw ConfigError(ctx + ": expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key)) throw ConfigError(ctx + ": unknown field '" + key + "'");
    }
}

double get_number(const json& j, const char* key, const std::string& ctx) {
    if (!j.contains(key)) throw ConfigError(ctx + ": missing field '" + key + "'");
    if (!j.at(key).is_number()) throw ConfigError(ctx + "." + key + ": expected a number");
    return j.at(key).get<double>();
}

double get_number_or(const json& j, const char* key, double fallback, const std::string& ctx) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ConfigError(ctx + "." + key + ": expected a number");
    return j.at(key).get<double>();
}

json time_to_json(const TimePoint& t) {
    if (t.size() == 1) return t[0];
    return json(t);
}

json times_to_json(const std::vector<TimePoint>& ts) {
    json a = json::array();
    for (const auto& t : ts) a.push_back(time_to_json(t));
    return a;
}

json box_to_json(const std::vector<Interval>& box) {
    json a = json::array();
    for (const auto& b : box) a.push_back(json::array({b.lo, b.hi}));
    return a;
}

json opt_to_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

KernelSpec kernel_from_json(const json& j, const std::string& ctx) {
    require_keys(j, {"name", "scale", "length", "constant"}, ctx);
    KernelSpec k;
    if (!j.contains("name") || !j.at("name").is_string()) throw ConfigError(ctx + ": kernel needs a string 'name'");
    k.name = j.at("name").get<std::string>();
    k.scale = get_number_or(j, "scale", 1.0, ctx);
    k.length = get_number_or(j, "length", 1.0, ctx);
    k.constant = get_number_or(j, "constant", 0.0, ctx);
    return k;
}

json kernel_to_json(const KernelSpec& k) {
    return {{"name", k.name}, {"scale", k.scale}, {"length", k.length}, {"constant", k.constant}};
}

DriftSpec drift_from_json(const json& j, const std::string& ctx) {
    if (j.is_null()) return DriftSpec::none();
    require_keys(j, {"type", "coeffs", "offset", "lambda"}, ctx);
    if (!j.contains("type") || !j.at("type").is_string()) throw ConfigError(ctx + ": drift needs a string 'type'");
    const std::string type = j.at("type").get<std::string>();
    if (type == "none") {
        require_keys(j, {"type"}, ctx);
        return DriftSpec::none();
    }
    if (type == "linear") {
        if (!j.contains("coeffs") || !j.at("coeffs").is_array())
            throw ConfigError(ctx + ": linear drift needs an array 'coeffs'");
        std::vector<double> coeffs;
        for (const auto& c : j.at("coeffs")) {
            if (!c.is_number()) throw ConfigError(ctx + ".coeffs: expected numbers");
            coeffs.push_back(c.get<double>());
        }
        return DriftSpec::linear(std::move(coeffs), get_number_or(j, "offset", 0.0, ctx));
    }
    if (type == "self_similar")
        return DriftSpec::self_similar(get_number(j, "lambda", ctx), get_number_or(j, "offset", 0.0, ctx));
    throw ConfigError(ctx + ": unknown drift type '" + type + "'");
}

json drift_to_json(const DriftSpec& d) {
    switch (d.kind) {
        case DriftSpec::Kind::None: return {{"type", "none"}};
        case DriftSpec::Kind::Linear: return {{"type", "linear"}, {"coeffs", d.coeffs}, {"offset", d.offset}};
        case DriftSpec::Kind::SelfSimilar:
            return {{"type", "self_similar"}, {"lambda", d.lambda}, {"offset", d.offset}};
    }
    return {{"type", "none"}};
}

}  // namespace

nlohmann::json measure_to_json(const MeasureSpec& m) {
    json exp = json::array();
    for (const auto& t : m.exp_terms()) exp.push_back({{"weight", t.weight}, {"rate", t.rate}});
    json gauss = json::array();
    for (const auto& g : m.gauss_terms())
        gauss.push_back({{"mean", g.mean}, {"var", g.variance}, {"mass", g.total_mass}});
    return {{"exp", exp}, {"gauss", gauss}};
}

MeasureSpec measure_from_json(const json& j, const std::string& ctx) {
    require_keys(j, {"exp", "gauss"}, ctx);
    std::vector<ExpTerm> exps;
    if (j.contains("exp")) {
        if (!j.at("exp").is_array()) throw ConfigError(ctx + ".exp: expected an array");
        for (const auto& t : j.at("exp")) {
            require_keys(t, {"weight", "rate"}, ctx + ".exp[]");
            exps.push_back({get_number(t, "weight", ctx + ".exp[]"), get_number(t, "rate", ctx + ".exp[]")});
        }
    }
    std::vector<GaussianMeasure1D> gs;
    if (j.contains("gauss")) {
        if (!j.at("gauss").is_array()) throw ConfigError(ctx + ".gauss: expected an array");
        for (const auto& g : j.at("gauss")) {
            require_keys(g, {"mean", "var", "mass"}, ctx + ".gauss[]");
            gs.push_back({get_number(g, "mean", ctx + ".gauss[]"), get_number(g, "var", ctx + ".gauss[]"),
                          get_number_or(g, "mass", 1.0, ctx + ".gauss[]")});
        }
    }
    try {
        return MeasureSpec(std::move(exps), std::move(gs));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(ctx + ": " + e.what());
    }
}

nlohmann::json process_to_json(const ProcessSpec& p) {
    json j;
    j["dim"] = p.dim();
    if (const auto* k = std::get_if<StationaryKernelFamily>(&p.family())) {
        j["family"] = "stationary_kernel";
        j["kernel"] = kernel_to_json(k->kernel);
        j["mean_const"] = k->mean_const;
    } else if (const auto* s = std::get_if<StatIncrementFamily>(&p.family())) {
        j["family"] = "stat_increment";
        json g;
        g["name"] = s->gamma.name;
        if (s->gamma.name == "kernel_increment")
            g["kernel"] = kernel_to_json(s->gamma.kernel);
        else {
            g["scale"] = s->gamma.scale;
            if (s->gamma.name == "fbm") g["kappa"] = s->gamma.kappa;
        }
        j["gamma"] = g;
        j["drift"] = drift_to_json(s->drift);
    } else {
        const auto& f = std::get<FbmFamily>(p.family());
        j["family"] = "fbm";
        j["kappa"] = f.kappa;
        j["drift"] = drift_to_json(f.drift);
    }
    return j;
}

ProcessSpec process_from_json(const json& j, const std::string& ctx) {
    if (!j.is_object()) throw ConfigError(ctx + ": expected a JSON object");
    if (!j.contains("family") || !j.at("family").is_string())
        throw ConfigError(ctx + ": process needs a string 'family'");
    const std::string family = j.at("family").get<std::string>();
    const int dim = static_cast<int>(get_number_or(j, "dim", 1.0, ctx));
    try {
        if (family == "stationary_kernel") {
            require_keys(j, {"dim", "family", "kernel", "mean_const"}, ctx);
            if (!j.contains("kernel")) throw ConfigError(ctx + ": stationary_kernel needs 'kernel'");
            StationaryKernelFamily f;
            f.kernel = kernel_from_json(j.at("kernel"), ctx + ".kernel");
            f.mean_const = get_number_or(j, "mean_const", 0.0, ctx);
            return ProcessSpec(dim, f);
        }
        if (family == "stat_increment") {
            require_keys(j, {"dim", "family", "gamma", "drift"}, ctx);
            if (!j.contains("gamma")) throw ConfigError(ctx + ": stat_increment needs 'gamma'");
            const json& g = j.at("gamma");
            require_keys(g, {"name", "scale", "kappa", "kernel"}, ctx + ".gamma");
            GammaSpec gs;
            if (!g.contains("name") || !g.at("name").is_string())
                throw ConfigError(ctx + ".gamma: needs a string 'name'");
            gs.name = g.at("name").get<std::string>();
            gs.scale = get_number_or(g, "scale", 1.0, ctx + ".gamma");
            gs.kappa = get_number_or(g, "kappa", 1.0, ctx + ".gamma");
            if (g.contains("kernel")) gs.kernel = kernel_from_json(g.at("kernel"), ctx + ".gamma.kernel");
            StatIncrementFamily f;
            f.gamma = gs;
            f.drift = j.contains("drift") ? drift_from_json(j.at("drift"), ctx + ".drift") : DriftSpec::none();
            return ProcessSpec(dim, f);
        }
        if (family == "fbm") {
            require_keys(j, {"dim", "family", "kappa", "drift"}, ctx);
            FbmFamily f;
            f.kappa = get_number(j, "kappa", ctx);
            f.drift = j.contains("drift") ? drift_from_json(j.at("drift"), ctx + ".drift") : DriftSpec::none();
            return ProcessSpec(dim, f);
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(ctx + ": " + e.what());
    }
    throw ConfigError(ctx + ": unknown family '" + family + "'");
}

nlohmann::json pair_to_json(const PairSpec& p) {
    return {{"measure", measure_to_json(p.measure())},
            {"process", process_to_json(p.process())},
            {"initial_shift", p.initial_shift()}};
}

PairSpec pair_from_json(const json& j, const std::string& ctx) {
    require_keys(j, {"measure", "process", "initial_shift"}, ctx);
    if (!j.contains("measure") || !j.contains("process"))
        throw ConfigError(ctx + ": pair needs 'measure' and 'process'");
    try {
        return PairSpec(measure_from_json(j.at("measure"), ctx + ".measure"),
                        process_from_json(j.at("process"), ctx + ".process"),
                        get_number_or(j, "initial_shift", 0.0, ctx));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(ctx + ": " + e.what());
    } catch (const NotPsdError& e) {
        throw ConfigError(ctx + ": " + e.what());
    }
}

TimePoint time_from_json(const json& j, int dim, const std::string& ctx) {
    if (j.is_number()) {
        if (dim != 1) throw ConfigError(ctx + ": scalar time in a " + std::to_string(dim) + "-dimensional process");
        return {j.get<double>()};
    }
    if (!j.is_array()) throw ConfigError(ctx + ": expected a number or an array");
    TimePoint t;
    for (const auto& x : j) {
        if (!x.is_number()) throw ConfigError(ctx + ": time coordinates must be numbers");
        t.push_back(x.get<double>());
    }
    if (static_cast<int>(t.size()) != dim) throw ConfigError(ctx + ": time dimension mismatch");
    return t;
}

std::vector<Interval> boxes_from_json(const json& j, const std::string& ctx) {
    if (!j.is_array() || j.empty()) throw ConfigError(ctx + ": expected a nonempty array of [lo,hi] intervals");
    std::vector<Interval> out;
    for (const auto& b : j) {
        if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number())
            throw ConfigError(ctx + ": each box must be [lo, hi]");
        out.push_back({b[0].get<double>(), b[1].get<double>()});
    }
    return out;
}

StatDesign design_from_json(const json& j, int dim, const std::string& ctx) {
    require_keys(j, {"entries", "shifts"}, ctx);
    StatDesign d;
    if (!j.contains("entries") || !j.at("entries").is_array() || j.at("entries").empty())
        throw ConfigError(ctx + ": design needs a nonempty 'entries' array");
    for (const auto& e : j.at("entries")) {
        require_keys(e, {"times", "box"}, ctx + ".entries[]");
        if (!e.contains("times") || !e.at("times").is_array() || !e.contains("box"))
            throw ConfigError(ctx + ".entries[]: need 'times' and 'box'");
        DesignEntry de;
        for (const auto& t : e.at("times")) de.times.push_back(time_from_json(t, dim, ctx + ".entries[].times"));
        de.box = boxes_from_json(e.at("box"), ctx + ".entries[].box");
        if (de.box.size() != de.times.size())
            throw ConfigError(ctx + ".entries[]: box must carry one interval per time");
        d.entries.push_back(std::move(de));
    }
    if (j.contains("shifts")) {
        if (!j.at("shifts").is_array()) throw ConfigError(ctx + ".shifts: expected an array");
        for (const auto& s : j.at("shifts")) d.shifts.push_back(time_from_json(s, dim, ctx + ".shifts"));
    }
    return d;
}

nlohmann::json stationarity_report_to_json(const StationarityReport& r) {
    json comparisons = json::array();
    for (const auto& c : r.comparisons) {
        json jc;
        jc["times"] = times_to_json(c.base.times);
        jc["shift"] = time_to_json(c.shift);
        jc["box"] = box_to_json(c.base.box);
        jc["est_a"] = c.est_a.mean_count;
        jc["se_a"] = c.est_a.std_error;
        jc["est_b"] = c.est_b.mean_count;
        jc["se_b"] = c.est_b.std_error;
        jc["analytic"] = opt_to_json(c.analytic_a);
        jc["z"] = c.z;
        comparisons.push_back(jc);
    }
    return {{"comparisons", comparisons}, {"verdict", r.pass ? "pass" : "fail"}};
}

nlohmann::json equal_in_law_mc_report_to_json(const EqualInLawMcReport& r) {
    json comparisons = json::array();
    for (const auto& c : r.comparisons) {
        json jc;
        jc["times"] = times_to_json(c.entry.times);
        jc["shift"] = nullptr;
        jc["box"] = box_to_json(c.entry.box);
        jc["est_a"] = c.est_a.mean_count;
        jc["se_a"] = c.est_a.std_error;
        jc["est_b"] = c.est_b.mean_count;
        jc["se_b"] = c.est_b.std_error;
        jc["analytic"] = opt_to_json(c.analytic_a);
        jc["z"] = c.z;
        comparisons.push_back(jc);
    }
    return {{"comparisons", comparisons}, {"verdict", r.pass ? "pass" : "fail"}};
}

nlohmann::json classification_report_to_json(const ClassificationReport& r) {
    json params = json::object();
    switch (r.label.tag) {
        case FamilyLabel::Tag::S2:
            params["alpha"] = r.label.alpha;
            params["coeffs"] = r.label.linear_coeffs;
            params["c"] = r.label.offset_c;
            break;
        case FamilyLabel::Tag::S3:
            params["alpha"] = r.label.alpha;
            params["lambda"] = r.label.lambda;
            params["c"] = r.label.offset_c;
            break;
        case FamilyLabel::Tag::S1:
        case FamilyLabel::Tag::S1Star:
            params["kernel"] = r.label.kernel_id;
            params["c"] = r.label.offset_c;
            break;
        case FamilyLabel::Tag::NotStationary:
            break;
    }
    json evidence = json::array();
    for (const auto& e : r.evidence) evidence.push_back({{"check", e.check}, {"residual", e.residual}});
    return {{"label", to_string(r.label.tag)},
            {"params", params},
            {"evidence", evidence},
            {"canonical", r.canonical ? pair_to_json(*r.canonical) : json(nullptr)}};
}

nlohmann::json certificate_to_json(const EqualInLawCertificate& c) {
    json j;
    j["equal"] = c.equal;
    if (c.n0)
        j["n0"] = {{"mean", c.n0->mean}, {"var", c.n0->variance}};
    else
        j["n0"] = nullptr;
    j["direction"] = c.direction;
    j["reason"] = c.reason;
    return j;
}

}  // namespace gsys
