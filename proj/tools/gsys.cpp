// gsys: Gaussian particle system simulator, classifier, and verifier.
//
// Each subcommand reads one JSON config (strict schema) and emits a report to
// stdout or --output. Exit codes: 0 pass/success verdicts, 1 fail or
// not-stationary verdicts, 2 usage/config errors, 3 numeric overflow.

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "gsys/json_io.hpp"

namespace {

using nlohmann::json;
using namespace gsys;

struct CliOptions {
    std::string input;
    std::string output;
    std::string format = "json";
    std::optional<long long> seed;
    std::optional<int> replicates;
    std::optional<double> alpha;
    std::optional<double> tolerance;
    int threads = 1;
};

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open input file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // byte offset -> line/column diagnostic
        size_t line = 1, col = 1;
        for (size_t i = 0; i < std::min(e.byte, text.size()); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError("malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(col) +
                          ": " + e.what());
    }
}

void require_config_keys(const json& j, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key)) throw ConfigError("config: unknown field '" + key + "'");
    }
}

uint64_t config_seed(const json& j, const CliOptions& opt) {
    if (opt.seed) return static_cast<uint64_t>(*opt.seed);
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_integer()) throw ConfigError("config.seed: expected an integer");
        return j.at("seed").get<uint64_t>();
    }
    return 0;
}

int config_replicates(const json& j, const CliOptions& opt, int fallback) {
    if (opt.replicates) return *opt.replicates;
    if (j.contains("replicates")) {
        if (!j.at("replicates").is_number_integer()) throw ConfigError("config.replicates: expected an integer");
        return j.at("replicates").get<int>();
    }
    return fallback;
}

double config_alpha(const json& j, const CliOptions& opt) {
    if (opt.alpha) return *opt.alpha;
    if (j.contains("alpha")) {
        if (!j.at("alpha").is_number()) throw ConfigError("config.alpha: expected a number");
        return j.at("alpha").get<double>();
    }
    return 0.01;
}

double config_tolerance(const json& j, const CliOptions& opt) {
    if (opt.tolerance) return *opt.tolerance;
    if (j.contains("tolerance")) {
        if (!j.at("tolerance").is_number()) throw ConfigError("config.tolerance: expected a number");
        return j.at("tolerance").get<double>();
    }
    return 1e-9;
}

void emit(const CliOptions& opt, const std::string& text) {
    if (opt.output.empty() || opt.output == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(opt.output, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file '" + opt.output + "'");
    out << text;
}

std::string comparisons_text(const json& rep) {
    std::ostringstream os;
    os << std::left << std::setw(18) << "times" << std::setw(9) << "shift" << std::setw(22) << "box" << std::setw(12)
       << "est_a" << std::setw(12) << "est_b" << std::setw(12) << "analytic" << std::setw(10) << "z"
       << "\n";
    for (const auto& c : rep.at("comparisons")) {
        os << std::setw(18) << c.at("times").dump() << std::setw(9)
           << (c.at("shift").is_null() ? std::string("-") : c.at("shift").dump()) << std::setw(22)
           << c.at("box").dump();
        os << std::setw(12) << std::setprecision(6) << c.at("est_a").get<double>();
        os << std::setw(12) << c.at("est_b").get<double>();
        if (c.at("analytic").is_null())
            os << std::setw(12) << "-";
        else
            os << std::setw(12) << c.at("analytic").get<double>();
        os << std::setw(10) << std::setprecision(4) << c.at("z").get<double>() << "\n";
    }
    os << "verdict: " << rep.at("verdict").get<std::string>() << "\n";
    return os.str();
}

std::string comparisons_csv(const json& rep) {
    std::ostringstream os;
    os << "times,shift,box,est_a,se_a,est_b,se_b,analytic,z\n";
    os.precision(17);
    for (const auto& c : rep.at("comparisons")) {
        os << '"' << c.at("times").dump() << "\",";
        os << (c.at("shift").is_null() ? std::string() : c.at("shift").dump()) << ',';
        os << '"' << c.at("box").dump() << "\",";
        os << c.at("est_a").get<double>() << ',' << c.at("se_a").get<double>() << ',';
        os << c.at("est_b").get<double>() << ',' << c.at("se_b").get<double>() << ',';
        if (c.at("analytic").is_null())
            os << ',';
        else
            os << c.at("analytic").get<double>() << ',';
        os << c.at("z").get<double>() << "\n";
    }
    os << "verdict," << rep.at("verdict").get<std::string>() << ",,,,,,,\n";
    return os.str();
}

std::string render_report(const CliOptions& opt, const json& rep) {
    if (opt.format == "json") return rep.dump(2) + "\n";
    if (opt.format == "csv") return comparisons_csv(rep);
    return comparisons_text(rep);
}

std::vector<TimePoint> times_list_from(const json& j, int dim, const std::string& ctx) {
    if (!j.is_array() || j.empty()) throw ConfigError(ctx + ": expected a nonempty array of times");
    std::vector<TimePoint> ts;
    for (const auto& t : j) ts.push_back(time_from_json(t, dim, ctx));
    return ts;
}

int cmd_simulate(const json& cfg, const CliOptions& opt) {
    require_config_keys(cfg, {"pair", "times", "boxes", "replicates", "seed", "epsilon", "padding"});
    if (!cfg.contains("pair") || !cfg.contains("times") || !cfg.contains("boxes"))
        throw ConfigError("simulate config needs 'pair', 'times', 'boxes'");
    PairSpec pair = pair_from_json(cfg.at("pair"));
    const int dim = pair.process().dim();
    SimulationConfig sim{std::move(pair),
                         times_list_from(cfg.at("times"), dim, "config.times"),
                         boxes_from_json(cfg.at("boxes"), "config.boxes"),
                         config_replicates(cfg, opt, 100),
                         config_seed(cfg, opt),
                         std::nullopt,
                         -1.0};
    if (cfg.contains("epsilon")) sim.epsilon = cfg.at("epsilon").get<double>();
    if (cfg.contains("padding")) sim.window_padding = cfg.at("padding").get<double>();
    if (opt.format == "csv") {
        const auto samples = simulate_system_collect(sim, opt.threads);
        std::ostringstream os;
        write_samples_csv(os, samples);
        emit(opt, os.str());
        return 0;
    }
    size_t total_particles = 0;
    double window_lo = 0, window_hi = 0, bound = 0;
    simulate_system(
        sim,
        [&](size_t, const SystemSample& s) {
            total_particles += s.n_particles();
            window_lo = s.window_lo;
            window_hi = s.window_hi;
            bound = s.truncation_error_bound;
        },
        opt.threads);
    json out{{"window", {window_lo, window_hi}},
             {"truncation_error_bound", bound},
             {"replicates", sim.replicates},
             {"mean_particles", static_cast<double>(total_particles) / sim.replicates}};
    emit(opt, out.dump(2) + "\n");
    return 0;
}

int cmd_intensity(const json& cfg, const CliOptions& opt) {
    require_config_keys(cfg, {"pair", "times", "box", "replicates", "seed"});
    if (!cfg.contains("pair") || !cfg.contains("times") || !cfg.contains("box"))
        throw ConfigError("intensity config needs 'pair', 'times', 'box'");
    const PairSpec pair = pair_from_json(cfg.at("pair"));
    CountQuery q;
    q.times = times_list_from(cfg.at("times"), pair.process().dim(), "config.times");
    q.box = boxes_from_json(cfg.at("box"), "config.box");
    if (q.box.size() != q.times.size()) throw ConfigError("config.box: one interval per time required");
    const auto est = estimate_intensity_mc(pair, q, config_replicates(cfg, opt, 10000), config_seed(cfg, opt),
                                           0x494e54ULL, opt.threads);
    const auto analytic = analytic_intensity(pair, q);
    json out{{"times", cfg.at("times")},
             {"box", cfg.at("box")},
             {"analytic", analytic ? json(*analytic) : json(nullptr)},
             {"estimate", est.mean_count},
             {"std_error", est.std_error},
             {"replicates", est.replicates}};
    emit(opt, out.dump(2) + "\n");
    return 0;
}

int cmd_classify(const json& cfg, const CliOptions& opt) {
    require_config_keys(cfg, {"pair", "tolerance"});
    if (!cfg.contains("pair")) throw ConfigError("classify config needs 'pair'");
    const PairSpec pair = pair_from_json(cfg.at("pair"));
    const auto rep = classify_pair(pair, default_lattice(pair.process().dim()), config_tolerance(cfg, opt));
    emit(opt, classification_report_to_json(rep).dump(2) + "\n");
    return rep.label.tag == FamilyLabel::Tag::NotStationary ? 1 : 0;
}

int cmd_canonicalize(const json& cfg, const CliOptions& opt) {
    require_config_keys(cfg, {"pair"});
    if (!cfg.contains("pair")) throw ConfigError("canonicalize config needs 'pair'");
    const PairSpec pair = pair_from_json(cfg.at("pair"));
    emit(opt, pair_to_json(canonicalize(pair)).dump(2) + "\n");
    return 0;
}

int cmd_verify_stationarity(const json& cfg, const CliOptions& opt) {
    require_config_keys(cfg, {"pair", "design", "replicates", "seed", "alpha"});
    if (!cfg.contains("pair")) throw ConfigError("verify-stationarity config needs 'pair'");
    const PairSpec pair = pair_from_json(cfg.at("pair"));
    const int dim = pair.process().dim();
    const StatDesign design =
        cfg.contains("design") ? design_from_json(cfg.at("design"), dim) : default_stat_design(dim);
    if (design.shifts.empty()) throw ConfigError("config.design: stationarity design needs shifts");
    const auto rep = stationarity_test(pair, design, config_replicates(cfg, opt, 10000), config_alpha(cfg, opt),
                                       config_seed(cfg, opt), opt.threads);
    emit(opt, render_report(opt, stationarity_report_to_json(rep)));
    return rep.pass ? 0 : 1;
}

int cmd_equal_in_law(const json& cfg, const CliOptions& opt) {
    require_config_keys(cfg, {"pair_a", "pair_b", "design", "replicates", "seed", "alpha", "tolerance"});
    if (!cfg.contains("pair_a") || !cfg.contains("pair_b"))
        throw ConfigError("equal-in-law config needs 'pair_a' and 'pair_b'");
    const PairSpec pair_a = pair_from_json(cfg.at("pair_a"), "pair_a");
    const PairSpec pair_b = pair_from_json(cfg.at("pair_b"), "pair_b");
    const int dim = pair_a.process().dim();
    std::vector<DesignEntry> entries;
    if (cfg.contains("design"))
        entries = design_from_json(cfg.at("design"), dim).entries;
    else
        entries = default_law_design(dim);
    json analytic_part = nullptr;
    bool analytic_equal = true;  // vacuous when no analytic criterion applies
    try {
        const auto cert = equal_in_law_analytic(pair_a, pair_b, default_lattice(dim), config_tolerance(cfg, opt));
        analytic_part = certificate_to_json(cert);
        analytic_equal = cert.equal;
    } catch (const std::invalid_argument&) {
        // a non-stationary pair has no analytic criterion; MC decides alone
    }
    const auto mc = equal_in_law_mc(pair_a, pair_b, entries, config_replicates(cfg, opt, 10000),
                                    config_alpha(cfg, opt), config_seed(cfg, opt), opt.threads);
    const bool pass = analytic_equal && mc.pass;
    json out{{"analytic", analytic_part},
             {"mc", equal_in_law_mc_report_to_json(mc)},
             {"verdict", pass ? "pass" : "fail"}};
    emit(opt, opt.format == "json" ? out.dump(2) + "\n" : render_report(opt, equal_in_law_mc_report_to_json(mc)));
    return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian particle systems: simulate, classify, verify"};
    app.require_subcommand(1);
    CliOptions opt;
    app.add_option("--input", opt.input, "JSON config file")->required();
    app.add_option("--output", opt.output, "output path (default stdout)");
    app.add_option("--format", opt.format, "json|csv|text")->check(CLI::IsMember({"json", "csv", "text"}));
    app.add_option("--seed", opt.seed, "override config seed");
    app.add_option("--replicates", opt.replicates, "override config replicates");
    app.add_option("--alpha", opt.alpha, "override significance level");
    app.add_option("--tolerance", opt.tolerance, "override numeric tolerance");
    app.add_option("--threads", opt.threads, "worker threads (results are thread-count invariant)");

    auto* simulate = app.add_subcommand("simulate", "raw system samples (csv) or a window summary");
    auto* intensity = app.add_subcommand("intensity", "intensity of one box: analytic and Monte Carlo");
    auto* classify = app.add_subcommand("classify", "stationary family decision");
    auto* canonical = app.add_subcommand("canonicalize", "canonical S2/S3 representative");
    auto* verify = app.add_subcommand("verify-stationarity", "Monte Carlo stationarity test");
    auto* equal = app.add_subcommand("equal-in-law", "equality in law: analytic certificate plus Monte Carlo");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const json cfg = load_config(opt.input);
        if (simulate->parsed()) return cmd_simulate(cfg, opt);
        if (intensity->parsed()) return cmd_intensity(cfg, opt);
        if (classify->parsed()) return cmd_classify(cfg, opt);
        if (canonical->parsed()) return cmd_canonicalize(cfg, opt);
        if (verify->parsed()) return cmd_verify_stationarity(cfg, opt);
        if (equal->parsed()) return cmd_equal_in_law(cfg, opt);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const OverflowError& e) {
        std::cerr << "overflow: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
