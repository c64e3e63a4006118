// hadamard: command-line front end (eval, star, cycle, verify, oracle).

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hadamard_kit/serialize.hpp"
#include "hadamard_kit/verify.hpp"

using namespace hadamard_kit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitFailedChecks = 1;
constexpr int kExitUsage = 64;

struct Flags {
    std::string config;
    std::string out;
    std::string dump_cycle;
    std::optional<double> tol;
    std::uint64_t seed = 20240601;
    unsigned threads = 1;
    std::string suite;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void error_trailer(const std::string& kind, const std::string& message, int code) {
    json j = {{"error", kind}, {"message", message}, {"exit_code", code}};
    std::cerr << j.dump() << '\n';
}

json read_config(const std::string& path) {
    if (path.empty()) throw UsageError("--config is required");
    std::ifstream in(path);
    if (!in) fail(ErrorKind::ConfigError, "cannot open config '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::ConfigError, std::string("config is not valid JSON: ") + e.what());
    }
}

double checked_tol(double tol) {
    if (!(tol > 0.0 && tol <= 1e-2)) fail(ErrorKind::ConfigError, "tolerance must lie in (0, 1e-2]");
    return tol;
}

/// Writes to the file, or stdout when path is empty.
void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) fail(ErrorKind::ConfigError, "cannot write '" + path + "'");
    out << text;
}

struct Inputs {
    NamedSets sets;
    std::map<std::string, FunctionDef> functions;
};

Inputs load_inputs(const json& cfg) {
    Inputs in;
    if (cfg.contains("sets")) {
        if (!cfg.at("sets").is_object()) fail(ErrorKind::ConfigError, "'sets' must be an object");
        for (const auto& [name, rec] : cfg.at("sets").items()) {
            StarSet s = star_set_from_json(rec, &in.sets);
            if (s.label.empty() || s.label == "set") s.label = name;
            in.sets[name] = s;
        }
    }
    if (cfg.contains("functions")) {
        if (!cfg.at("functions").is_object()) fail(ErrorKind::ConfigError, "'functions' must be an object");
        for (const auto& [name, rec] : cfg.at("functions").items()) in.functions.emplace(name, function_from_json(rec, &in.sets));
    }
    return in;
}

const FunctionDef& function_ref(const Inputs& in, const json& j, std::string_view what) {
    if (!j.is_string()) fail(ErrorKind::ConfigError, std::string(what) + " must name a function");
    auto it = in.functions.find(j.get<std::string>());
    if (it == in.functions.end()) fail(ErrorKind::ConfigError, "unknown function '" + j.get<std::string>() + "'");
    return it->second;
}

StarSet set_ref(const Inputs& in, const json& j) {
    if (j.is_string() && in.sets.count(j.get<std::string>())) return in.sets.at(j.get<std::string>());
    return star_set_from_json(j, &in.sets);
}

/// "z": [values] or "grid": {center, radii, angles | count, phase}.
std::vector<cplx> points_from(const json& cfg) {
    std::vector<cplx> pts;
    if (cfg.contains("z")) {
        const auto& z = cfg.at("z");
        if (!z.is_array()) fail(ErrorKind::ConfigError, "'z' must be a list");
        for (const auto& v : z) pts.push_back(complex_from_json(v));
    }
    if (cfg.contains("grid")) {
        const auto& g = cfg.at("grid");
        cplx center = g.contains("center") ? complex_from_json(g.at("center")) : cplx(0.0);
        if (!g.contains("radii")) fail(ErrorKind::ConfigError, "grid needs 'radii'");
        std::vector<double> angles;
        if (g.contains("angles")) {
            for (const auto& a : g.at("angles")) angles.push_back(finite_from_json(a, "grid angle"));
        } else {
            int count = g.contains("counts") ? g.at("counts").get<int>() : g.value("count", 0);
            if (count <= 0) fail(ErrorKind::ConfigError, "grid needs 'angles' or a positive 'count'");
            double phase = g.contains("phase") ? finite_from_json(g.at("phase"), "grid phase") : 0.0;
            for (int k = 0; k < count; ++k) angles.push_back(phase + kTwoPi * k / count);
        }
        for (const auto& r : g.at("radii")) {
            double rr = finite_from_json(r, "grid radius");
            if (!(rr > 0.0)) fail(ErrorKind::ConfigError, "grid radii must be positive");
            for (double a : angles) pts.push_back(center + std::polar(rr, a));
        }
    }
    if (pts.empty()) fail(ErrorKind::ConfigError, "no evaluation points: give 'z' or 'grid'");
    return pts;
}

HadamardOptions product_options(const json& cfg, const Flags& flags) {
    HadamardOptions o;
    o.tol = checked_tol(flags.tol ? *flags.tol : cfg.value("tol", 1e-10));
    if (cfg.contains("margin")) o.margin = finite_from_json(cfg.at("margin"), "margin");
    if (!(o.margin > 0.0)) fail(ErrorKind::ConfigError, "margin must be positive");
    if (cfg.contains("eps")) o.eps = finite_from_json(cfg.at("eps"), "eps");
    o.prefer_anti_cauchy = cfg.value("prefer_anti_cauchy", false);
    o.threads = flags.threads;
    return o;
}

json options_json(const HadamardOptions& o) {
    return {{"tol", o.tol},
            {"margin", o.margin},
            {"eps", o.eps ? json(*o.eps) : json("auto: min(eps_max, region separation / 4)")},
            {"eps_max", o.synthesis.eps_max},
            {"max_arc_step", o.synthesis.max_arc_step},
            {"membership_tol", kDefaultMembershipTol},
            {"prefer_anti_cauchy", o.prefer_anti_cauchy},
            {"threads", o.threads}};
}

// ---------------------------------------------------------------------------

int cmd_eval(const Flags& flags) {
    auto t0 = std::chrono::steady_clock::now();
    json cfg = read_config(flags.config);
    Inputs in = load_inputs(cfg);
    const json prod = cfg.value("product", json::object());
    const FunctionDef& f1 = function_ref(in, prod.value("f1", json("f1")), "product.f1");
    const FunctionDef& f2 = function_ref(in, prod.value("f2", json("f2")), "product.f2");
    std::string mode = prod.value("mode", std::string("hadamard"));
    if (mode != "hadamard" && mode != "pohlen") fail(ErrorKind::ConfigError, "product.mode must be hadamard or pohlen");
    HadamardOptions opts = product_options(cfg, flags);
    std::vector<cplx> pts = points_from(cfg);

    json manifest = {{"command", "eval"}, {"config", flags.config}, {"inputs", cfg}, {"mode", mode},
                     {"seed", flags.seed}, {"options", options_json(opts)}, {"points", pts.size()}};
    GridResult result;
    json cycles_dump;
    if (cfg.contains("U") || cfg.contains("V")) {
        if (!cfg.contains("U") || !cfg.contains("V")) fail(ErrorKind::ConfigError, "localized evaluation needs both U and V");
        if (mode != "hadamard") fail(ErrorKind::ConfigError, "localized evaluation uses the generalized cycle");
        result = localized_product(f1, f2, set_ref(in, cfg.at("U")), set_ref(in, cfg.at("V")), pts, opts);
        manifest["strategy"] = "localized";
        manifest["cycle_hash"] = hash_hex(cycle_hash(result.cycle_used));
        cycles_dump = to_json(result.cycle_used);
    } else if (cfg.contains("K")) {
        if (mode != "hadamard") fail(ErrorKind::ConfigError, "shared-cycle evaluation uses the generalized cycle");
        result = hadamard_grid(f1, f2, set_ref(in, cfg.at("K")), pts, opts);
        manifest["strategy"] = "shared-cycle";
        manifest["cycle_hash"] = hash_hex(cycle_hash(result.cycle_used));
        cycles_dump = to_json(result.cycle_used);
    } else {
        Factor a = Factor::of(f1), b = Factor::of(f2);
        if (mode == "pohlen") {
            if (!a.singular.closure_has_inf() && !a.vanishes_at_inf)
                fail(ErrorKind::VanishingAtInfinityViolated, "f1 must vanish at infinity");
            if (!b.singular.closure_has_inf() && !b.vanishes_at_inf)
                fail(ErrorKind::VanishingAtInfinityViolated, "f2 must vanish at infinity");
        }
        std::vector<Cycle> cycles(pts.size());
        std::vector<double> eps_used(pts.size());
        result.points = pts;
        result.values.resize(pts.size());
        result.error_estimates.resize(pts.size());
        detail::parallel_for(pts.size(), opts.threads, [&](std::size_t i) {
            WindingSpec spec = mode == "pohlen"
                                   ? pohlen_winding_spec(a.singular, b.singular, pts[i], opts.prefer_anti_cauchy, opts.margin)
                                   : hadamard_winding_spec(a.singular, b.singular, pts[i], opts.margin);
            eps_used[i] = opts.eps ? *opts.eps : auto_eps(spec, opts.synthesis);
            cycles[i] = detail::cycle_for(spec, opts);
            ProductValue v = detail::integrate_product(a, b, pts[i], cycles[i], opts.tol);
            result.values[i] = v.value;
            result.error_estimates[i] = v.error_estimate;
        });
        manifest["strategy"] = "pointwise";
        json hashes = json::array(), dumps = json::array();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            hashes.push_back(hash_hex(cycle_hash(cycles[i])));
            json d = to_json(cycles[i]);
            d["z"] = complex_to_json(pts[i]);
            d["eps"] = eps_used[i];
            dumps.push_back(d);
        }
        manifest["cycle_hashes"] = hashes;
        manifest["eps_used"] = eps_used;
        cycles_dump = {{"cycles", dumps}};
    }

    std::ostringstream csv;
    write_grid_csv(csv, result);
    emit(flags.out, csv.str());
    if (!flags.dump_cycle.empty()) emit(flags.dump_cycle, cycles_dump.dump() + "\n");
    manifest["output"] = flags.out.empty() ? "stdout" : flags.out;
    manifest["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!flags.out.empty()) emit(flags.out + ".manifest.json", manifest.dump(2) + "\n");
    return kExitOk;
}

int cmd_star(const Flags& flags) {
    json cfg = read_config(flags.config);
    Inputs in = load_inputs(cfg);
    auto pick = [&](const char* key, const char* fallback) -> StarSet {
        if (cfg.contains(key)) return set_ref(in, cfg.at(key));
        if (in.sets.count(fallback)) return in.sets.at(fallback);
        fail(ErrorKind::ConfigError, std::string("star needs sets '") + key + "' or '" + fallback + "'");
    };
    StarSet s1 = pick("S1", "a");
    StarSet s2 = pick("S2", "b");
    json out = {{"S1", to_json(s1)},
                {"S2", to_json(s2)},
                {"S1_proper", is_proper(s1)},
                {"S2_proper", is_proper(s2)},
                {"star_eligible", star_eligible(s1, s2)},
                {"convolvable", convolvable(s1, s2)},
                {"strongly_convolvable", strongly_convolvable(s1, s2)}};
    try {
        StarSet p = set_product(s1, s2);
        out["product"] = to_json(p);
        out["product_proper"] = is_proper(p);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::IndeterminateProduct) throw;
        out["product"] = nullptr;
        out["product_error"] = e.what();
    }
    emit(flags.out, out.dump(2) + "\n");
    return kExitOk;
}

int cmd_cycle(const Flags& flags) {
    json cfg = read_config(flags.config);
    Inputs in = load_inputs(cfg);
    HadamardOptions opts = product_options(cfg, flags);
    auto set_or_function = [&](const char* key) -> StarSet {
        if (!cfg.contains(key)) fail(ErrorKind::ConfigError, std::string("cycle needs '") + key + "'");
        const auto& j = cfg.at(key);
        if (j.is_string() && in.functions.count(j.get<std::string>())) return in.functions.at(j.get<std::string>()).singular;
        return set_ref(in, j);
    };
    StarSet s1 = set_or_function("S1");
    StarSet s2 = set_or_function("S2");
    std::string mode = cfg.value("mode", std::string("hadamard"));
    json report = {{"mode", mode}, {"options", options_json(opts)}};
    Cycle c;
    WindingSpec spec;
    if (cfg.contains("K")) {
        StarSet k = set_ref(in, cfg.at("K"));
        c = shared_cycle(s1, s2, k, opts.margin, opts.synthesis);
        spec = hadamard_winding_spec_against(s1, set_product(k, set_inverse(s2)));
        report["K"] = to_json(k);
    } else {
        if (!cfg.contains("z")) fail(ErrorKind::ConfigError, "cycle needs 'z' or 'K'");
        cplx z = complex_from_json(cfg.at("z"));
        if (mode == "pohlen") {
            spec = pohlen_winding_spec(s1, s2, z, opts.prefer_anti_cauchy, opts.margin);
            report["pohlen_kind"] = std::string(to_string(pohlen_kind(s1, s2, opts.prefer_anti_cauchy)));
        } else if (mode == "hadamard") {
            spec = hadamard_winding_spec(s1, s2, z, opts.margin);
        } else {
            fail(ErrorKind::ConfigError, "mode must be hadamard or pohlen");
        }
        report["eps"] = opts.eps ? *opts.eps : auto_eps(spec, opts.synthesis);
        c = detail::cycle_for(spec, opts);
        report["z"] = complex_to_json(z);
    }
    CertifyReport cert = certify(c, spec);
    json violations = json::array();
    for (const auto& v : cert.violations)
        violations.push_back({{"point", complex_to_json(v.point)},
                              {"required", v.required},
                              {"actual", v.actual ? json(*v.actual) : json("on cycle")},
                              {"tag", v.tag}});
    report["certified"] = cert.ok;
    report["probes_checked"] = cert.probes_checked;
    report["violations"] = violations;
    report["winding_at_zero"] = spec.winding_at_zero;
    report["region_separation"] = spec.margin;
    report["cycle_hash"] = hash_hex(cycle_hash(c));
    report["terms"] = c.terms.size();
    report["weighted_length"] = c.weighted_length();
    if (!flags.dump_cycle.empty()) emit(flags.dump_cycle, to_json(c).dump() + "\n");
    emit(flags.out, report.dump(2) + "\n");
    return cert.ok ? kExitOk : kExitNumeric;
}

int cmd_verify(const Flags& flags) {
    if (!suite_exists(flags.suite)) throw UsageError("unknown suite '" + flags.suite + "'");
    VerifyOptions v;
    v.seed = flags.seed;
    v.threads = flags.threads;
    if (flags.tol) v.tol = checked_tol(*flags.tol);
    json reports = json::array();
    bool ok = true;
    for (const auto& s : suites()) {
        if (flags.suite != "all" && flags.suite != s.name) continue;
        SuiteReport r = run_suite(s.name, v);
        ok = ok && r.passed;
        reports.push_back(to_json(r));
    }
    json out = {{"suite", flags.suite}, {"passed", ok}, {"seed", v.seed}, {"tol", v.tol}, {"threads", v.threads},
                {"reports", reports}};
    emit(flags.out, out.dump(2) + "\n");
    return ok ? kExitOk : kExitFailedChecks;
}

int cmd_oracle(const Flags& flags) {
    json cfg = read_config(flags.config);
    Inputs in = load_inputs(cfg);
    const FunctionDef& f = function_ref(in, cfg.value("function", json("f")), "function");
    if (!cfg.contains("r") || !cfg.contains("N")) fail(ErrorKind::ConfigError, "oracle needs 'r' and 'N'");
    double r = finite_from_json(cfg.at("r"), "r");
    long n = cfg.at("N").get<long>();
    if (!(r > 0.0) || n < 0) fail(ErrorKind::ConfigError, "oracle needs r > 0 and N >= 0");
    std::vector<cplx> coeffs = taylor_coeffs(f, r, static_cast<std::size_t>(n));
    json out = json::object();
    if (cfg.contains("with")) {
        const FunctionDef& g = function_ref(in, cfg.at("with"), "with");
        double rg = cfg.contains("r_with") ? finite_from_json(cfg.at("r_with"), "r_with") : r;
        coeffs = series_hadamard(coeffs, taylor_coeffs(g, rg, static_cast<std::size_t>(n)));
        out["product"] = true;
    }
    json cs = json::array();
    for (cplx c : coeffs) cs.push_back(complex_to_json(c));
    out["coefficients"] = cs;
    if (cfg.contains("z") || cfg.contains("grid")) {
        json vals = json::array();
        for (cplx z : points_from(cfg)) vals.push_back({{"z", complex_to_json(z)}, {"value", complex_to_json(eval_series(coeffs, z))}});
        out["values"] = vals;
    }
    emit(flags.out, out.dump(2) + "\n");
    return kExitOk;
}

unsigned default_threads() {
    if (const char* t = std::getenv("HADAMARD_KIT_THREADS")) {
        int n = std::atoi(t);
        if (n > 0) return static_cast<unsigned>(n);
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalized Hadamard products on the Riemann sphere"};
    app.require_subcommand(1);
    Flags flags;
    flags.threads = default_threads();
    double tol_flag = 0.0;

    auto common = [&](CLI::App* sub, bool config) {
        if (config) sub->add_option("--config", flags.config, "JSON run configuration")->required();
        sub->add_option("--out", flags.out, "output file (stdout when omitted)");
        sub->add_option("--tol", tol_flag, "quadrature tolerance in (0, 1e-2]");
        sub->add_option("--seed", flags.seed, "seed for randomized probes");
        sub->add_option("--threads", flags.threads, "worker threads (default $HADAMARD_KIT_THREADS or 1)")
            ->check(CLI::PositiveNumber);
    };
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a product on points or a grid; writes CSV and manifest");
    common(eval_cmd, true);
    eval_cmd->add_option("--dump-cycle", flags.dump_cycle, "write the cycle(s) used as JSON");
    auto* star_cmd = app.add_subcommand("star", "set product and eligibility verdicts");
    common(star_cmd, true);
    auto* cycle_cmd = app.add_subcommand("cycle", "synthesize, certify and dump a cycle");
    common(cycle_cmd, true);
    cycle_cmd->add_option("--dump-cycle", flags.dump_cycle, "write the cycle as JSON");
    auto* verify_cmd = app.add_subcommand("verify", "run a verification suite");
    common(verify_cmd, false);
    verify_cmd->add_option("suite", flags.suite, "suite name or 'all'")->required();
    auto* oracle_cmd = app.add_subcommand("oracle", "Taylor coefficients and series products");
    common(oracle_cmd, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        error_trailer("UsageError", e.what(), kExitUsage);
        return kExitUsage;
    }
    for (auto* sub : {eval_cmd, star_cmd, cycle_cmd, verify_cmd, oracle_cmd})
        if (sub->count("--tol")) flags.tol = tol_flag;

    try {
        if (*eval_cmd) return cmd_eval(flags);
        if (*star_cmd) return cmd_star(flags);
        if (*cycle_cmd) return cmd_cycle(flags);
        if (*verify_cmd) return cmd_verify(flags);
        if (*oracle_cmd) return cmd_oracle(flags);
    } catch (const UsageError& e) {
        error_trailer("UsageError", e.what(), kExitUsage);
        return kExitUsage;
    } catch (const Error& e) {
        int code = is_numeric_failure(e.kind()) ? kExitNumeric : kExitDomain;
        error_trailer(std::string(to_string(e.kind())), e.what(), code);
        return code;
    } catch (const json::exception& e) {
        error_trailer("ConfigError", e.what(), kExitDomain);
        return kExitDomain;
    }
    return kExitUsage;
}
