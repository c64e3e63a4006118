#pragma once

// JSON records for sets, functions and cycles; CSV output for grid results.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "hadamard_kit/cycles.hpp"
#include "hadamard_kit/errors.hpp"
#include "hadamard_kit/functions.hpp"
#include "hadamard_kit/hadamard.hpp"
#include "hadamard_kit/sphere_sets.hpp"

namespace hadamard_kit {

using json = nlohmann::json;
using NamedSets = std::map<std::string, StarSet>;

// ---------------------------------------------------------------------------
// Extended reals and complex numbers
// ---------------------------------------------------------------------------

inline double ext_real_from_json(const json& j) {
    if (j.is_number()) {
        double x = j.get<double>();
        if (!std::isfinite(x)) fail(ErrorKind::ConfigError, "non-finite number");
        return x;
    }
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "-inf") return -kInf;
        if (s == "+inf" || s == "inf") return kInf;
    }
    fail(ErrorKind::ConfigError, "expected a number or \"-inf\"/\"+inf\", got " + j.dump());
}

inline json ext_real_to_json(double x) {
    if (x == kInf) return "+inf";
    if (x == -kInf) return "-inf";
    return x;
}

inline double finite_from_json(const json& j, std::string_view what) {
    if (!j.is_number()) fail(ErrorKind::ConfigError, std::string(what) + ": expected a number, got " + j.dump());
    double x = j.get<double>();
    if (!std::isfinite(x)) fail(ErrorKind::ConfigError, std::string(what) + ": non-finite");
    return x;
}

/// A complex value as a number or a [re, im] pair.
inline cplx complex_from_json(const json& j) {
    if (j.is_number()) return {finite_from_json(j, "complex"), 0.0};
    if (j.is_array() && j.size() == 2) return {finite_from_json(j[0], "re"), finite_from_json(j[1], "im")};
    fail(ErrorKind::ConfigError, "expected a complex number as x or [re, im], got " + j.dump());
}

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

// ---------------------------------------------------------------------------
// Set presets
// ---------------------------------------------------------------------------

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

/// Number, "pi", or a product/quotient of those with an optional leading sign ("-pi/2", "3*pi/4").
inline double preset_number(const std::string& text) {
    std::string s = trim(text);
    if (s.empty()) fail(ErrorKind::ConfigError, "empty preset argument");
    double sign = 1.0;
    if (s[0] == '-' || s[0] == '+') {
        if (s[0] == '-') sign = -1.0;
        s = trim(s.substr(1));
    }
    double value = 1.0;
    char op = '*';
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t next = s.find_first_of("*/", pos);
        std::string tok = trim(s.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
        double x;
        if (tok == "pi") {
            x = kPi;
        } else {
            char* end = nullptr;
            x = std::strtod(tok.c_str(), &end);
            if (tok.empty() || end != tok.c_str() + tok.size())
                fail(ErrorKind::ConfigError, "bad preset argument '" + text + "'");
        }
        value = op == '*' ? value * x : value / x;
        if (next == std::string::npos) break;
        op = s[next];
        pos = next + 1;
    }
    if (!std::isfinite(value)) fail(ErrorKind::ConfigError, "non-finite preset argument '" + text + "'");
    return sign * value;
}

}  // namespace detail

/// Parses "name(a, b, ...)" (an optional "preset:" prefix is ignored). Besides the set presets,
/// the builtin function names (log1p, li2, log, exp) yield their singular sets and "empty" the empty set.
inline StarSet set_preset(std::string_view spec) {
    std::string s = detail::trim(spec);
    if (s.rfind("preset:", 0) == 0) s = detail::trim(s.substr(7));
    std::string name = s;
    std::vector<double> args;
    auto open = s.find('(');
    if (open != std::string::npos) {
        if (s.back() != ')') fail(ErrorKind::ConfigError, "malformed preset '" + s + "'");
        name = detail::trim(s.substr(0, open));
        std::string inner = s.substr(open + 1, s.size() - open - 2);
        if (!detail::trim(inner).empty()) {
            std::size_t pos = 0;
            while (true) {
                auto comma = inner.find(',', pos);
                args.push_back(detail::preset_number(inner.substr(pos, comma == std::string::npos ? std::string::npos
                                                                                                  : comma - pos)));
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
        }
    }
    if (name == "factorial" || name == "factorials" || name == "discrete" || name == "sequence")
        fail(ErrorKind::UnrepresentableSet,
             "'" + s + "' has infinitely many components; only finite unions of log-polar boxes are supported "
             "(approximate it by a ray or disk complement that contains it)");
    auto want = [&](std::size_t n) {
        if (args.size() != n)
            fail(ErrorKind::ConfigError, "preset " + name + " takes " + std::to_string(n) + " arguments");
    };
    auto positive = [&](double x) {
        if (!(x > 0.0)) fail(ErrorKind::ConfigError, "preset " + name + " needs positive radii");
        return x;
    };
    StarSet out;
    if (name == "ray") {
        want(2);
        out = presets::ray(args[0], positive(args[1]));
    } else if (name == "segment0") {
        want(2);
        out = presets::segment0(args[0], positive(args[1]));
    } else if (name == "point") {
        if (args.size() == 1) args.push_back(0.0);
        want(2);
        if (args[0] == 0.0 && args[1] == 0.0) fail(ErrorKind::ConfigError, "point preset at 0");
        out = presets::point(cplx(args[0], args[1]));
    } else if (name == "disk_complement") {
        want(1);
        out = presets::disk_complement(positive(args[0]));
    } else if (name == "punctured_disk") {
        want(1);
        out = presets::punctured_disk(positive(args[0]));
    } else if (name == "annulus") {
        want(2);
        if (!(positive(args[0]) <= positive(args[1]))) fail(ErrorKind::ConfigError, "annulus needs r1 <= r2");
        out = presets::annulus(args[0], args[1]);
    } else if (name == "empty") {
        want(0);
        out = StarSet({}, "empty");
    } else if (name == "log1p" || name == "li2" || name == "log" || name == "exp") {
        want(0);
        out = builtin_singular_set(name);
    } else {
        fail(ErrorKind::ConfigError, "unknown set preset '" + name + "'");
    }
    out.label = s;
    return out;
}

// ---------------------------------------------------------------------------
// StarSet records
// ---------------------------------------------------------------------------

inline json to_json(const LogPolarBox& b) {
    json arc = b.arc.is_full() ? json("full") : json::array({b.arc.lo(), b.arc.width()});
    return {{"rho", json::array({ext_real_to_json(b.rho_lo), ext_real_to_json(b.rho_hi)})}, {"arc", arc}};
}

inline json to_json(const StarSet& s) {
    json boxes = json::array();
    for (const auto& b : s.boxes) boxes.push_back(to_json(b));
    return {{"label", s.label}, {"boxes", boxes}};
}

inline LogPolarBox box_from_json(const json& j) {
    if (!j.is_object() || !j.contains("rho") || !j.contains("arc"))
        fail(ErrorKind::ConfigError, "box record needs 'rho' and 'arc': " + j.dump());
    const auto& rho = j.at("rho");
    if (!rho.is_array() || rho.size() != 2) fail(ErrorKind::ConfigError, "box 'rho' must be [lo, hi]");
    double lo = ext_real_from_json(rho[0]);
    double hi = ext_real_from_json(rho[1]);
    if (lo == kInf || hi == -kInf || lo > hi) fail(ErrorKind::ConfigError, "box needs -inf <= lo <= hi <= +inf");
    const auto& arc = j.at("arc");
    if (arc.is_string() && arc.get<std::string>() == "full") return LogPolarBox(lo, hi, Arc::full());
    if (arc.is_array() && arc.size() == 2) {
        double t = finite_from_json(arc[0], "arc lo");
        double w = finite_from_json(arc[1], "arc width");
        if (w < 0.0) fail(ErrorKind::ConfigError, "arc width must be non-negative");
        return LogPolarBox(lo, hi, w >= kTwoPi ? Arc::full() : Arc::interval(t, w));
    }
    fail(ErrorKind::ConfigError, "box 'arc' must be \"full\" or [theta_lo, width]");
}

/// A set is a box record, a preset string, or "set:NAME" referring to `named`.
inline StarSet star_set_from_json(const json& j, const NamedSets* named = nullptr) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s.rfind("set:", 0) == 0) {
            std::string key = s.substr(4);
            if (!named || !named->count(key)) fail(ErrorKind::ConfigError, "unknown set '" + key + "'");
            return named->at(key);
        }
        return set_preset(s);
    }
    if (!j.is_object() || !j.contains("boxes")) fail(ErrorKind::ConfigError, "set record needs 'boxes': " + j.dump());
    std::vector<LogPolarBox> boxes;
    for (const auto& b : j.at("boxes")) boxes.push_back(box_from_json(b));
    return StarSet(std::move(boxes), j.value("label", std::string("set")));
}

// ---------------------------------------------------------------------------
// Function records
// ---------------------------------------------------------------------------

/// `{ "expr": str, "singular": set | "preset:NAME" | "set:NAME", "vanishes_at_inf": bool }`
inline FunctionDef function_from_json(const json& j, const NamedSets* named = nullptr) {
    if (!j.is_object() || !j.contains("expr") || !j.contains("singular"))
        fail(ErrorKind::ConfigError, "function record needs 'expr' and 'singular': " + j.dump());
    if (!j.at("expr").is_string()) fail(ErrorKind::ConfigError, "function 'expr' must be a string");
    bool vanishes = false;
    if (j.contains("vanishes_at_inf")) {
        if (!j.at("vanishes_at_inf").is_boolean()) fail(ErrorKind::ConfigError, "'vanishes_at_inf' must be a bool");
        vanishes = j.at("vanishes_at_inf").get<bool>();
    }
    StarSet singular = star_set_from_json(j.at("singular"), named);
    return make_function(j.at("expr").get<std::string>(), std::move(singular), vanishes);
}

inline json to_json(const FunctionDef& f) {
    return {{"expr", to_text(f.expr)}, {"singular", to_json(f.singular)}, {"vanishes_at_inf", f.vanishes_at_inf}};
}

// ---------------------------------------------------------------------------
// Cycles
// ---------------------------------------------------------------------------

inline json to_json(const Cycle& c) {
    json terms = json::array();
    for (const auto& t : c.terms) {
        json vs = json::array();
        for (const auto& v : t.path.vertices()) vs.push_back(complex_to_json(v));
        terms.push_back({{"multiplicity", t.multiplicity}, {"vertices", vs}});
    }
    return {{"terms", terms}};
}

inline Cycle cycle_from_json(const json& j) {
    if (!j.is_object() || !j.contains("terms")) fail(ErrorKind::ConfigError, "cycle record needs 'terms'");
    Cycle c;
    for (const auto& t : j.at("terms")) {
        std::vector<cplx> vs;
        for (const auto& v : t.at("vertices")) vs.push_back(complex_from_json(v));
        c.add(Path(std::move(vs)), t.at("multiplicity").get<int>());
    }
    return c;
}

/// 64-bit FNV-1a over multiplicities and the raw bytes of every vertex.
inline std::uint64_t cycle_hash(const Cycle& c) {
    std::uint64_t h = 14695981039346656037ull;
    auto feed = [&](const void* p, std::size_t n) {
        const auto* bytes = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= bytes[i];
            h *= 1099511628211ull;
        }
    };
    for (const auto& t : c.terms) {
        std::int64_t m = t.multiplicity;
        feed(&m, sizeof m);
        std::uint64_t n = t.path.vertices().size();
        feed(&n, sizeof n);
        for (const auto& v : t.path.vertices()) {
            double xy[2] = {v.real() == 0.0 ? 0.0 : v.real(), v.imag() == 0.0 ? 0.0 : v.imag()};
            feed(xy, sizeof xy);
        }
    }
    return h;
}

inline std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline void write_grid_csv(std::ostream& os, const GridResult& g) {
    os << "re_z,im_z,re_val,im_val,err_est\n";
    for (std::size_t i = 0; i < g.points.size(); ++i) {
        os << format_real(g.points[i].real()) << ',' << format_real(g.points[i].imag()) << ','
           << format_real(g.values[i].real()) << ',' << format_real(g.values[i].imag()) << ','
           << format_real(g.error_estimates[i]) << '\n';
    }
}

}  // namespace hadamard_kit
