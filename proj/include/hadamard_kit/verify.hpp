#pragma once

// Verification suites with per-check deltas; shared by the CLI `verify` command and the
// acceptance runner.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hadamard_kit/cycles.hpp"
#include "hadamard_kit/functions.hpp"
#include "hadamard_kit/hadamard.hpp"
#include "hadamard_kit/quadrature.hpp"
#include "hadamard_kit/serialize.hpp"
#include "hadamard_kit/sphere_sets.hpp"

namespace hadamard_kit {

struct CheckResult {
    std::string name;
    double delta = 0.0;  // observed deviation (0/1 for boolean checks)
    double threshold = 0.0;
    bool passed = false;
    std::string note;
};

struct SuiteReport {
    std::string suite;
    bool passed = true;
    std::vector<CheckResult> checks;
    double seconds = 0.0;
};

struct VerifyOptions {
    std::uint64_t seed = 20240601;
    unsigned threads = 1;
    double tol = 1e-10;
};

inline json to_json(const CheckResult& c) {
    json j = {{"name", c.name}, {"passed", c.passed}, {"delta", c.delta}, {"threshold", c.threshold}};
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

inline json to_json(const SuiteReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back(to_json(c));
    return {{"suite", r.suite}, {"passed", r.passed}, {"seconds", r.seconds}, {"checks", checks}};
}

namespace detail {

class Recorder {
public:
    explicit Recorder(SuiteReport& r) : r_(r) {}

    /// Passes iff delta <= threshold (NaN fails).
    void value(const std::string& name, double delta, double threshold, std::string note = {}) {
        bool ok = delta <= threshold;
        r_.checks.push_back({name, delta, threshold, ok, std::move(note)});
        r_.passed = r_.passed && ok;
    }

    void boolean(const std::string& name, bool ok, std::string note = {}) {
        r_.checks.push_back({name, ok ? 0.0 : 1.0, 0.0, ok, std::move(note)});
        r_.passed = r_.passed && ok;
    }

    /// Runs fn; a thrown Error becomes a failed check instead of aborting the suite.
    void guard(const std::string& name, const std::function<void()>& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            r_.checks.push_back({name, INFINITY, 0.0, false, e.what()});
            r_.passed = false;
        }
    }

private:
    SuiteReport& r_;
};

inline FunctionDef fn(const std::string& text, StarSet s, bool vanishes) {
    return make_function(text, std::move(s), vanishes);
}

inline std::vector<cplx> ring_points(double r, int n, double phase) {
    std::vector<cplx> out;
    for (int k = 0; k < n; ++k) out.push_back(std::polar(r, phase + kTwoPi * k / n));
    return out;
}

inline HadamardOptions hopts(const VerifyOptions& v) {
    HadamardOptions o;
    o.tol = v.tol;
    o.threads = v.threads;
    return o;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

/// Geometric pair against 1/(1 - z/6) and against the truncated series product.
inline void suite_series_oracle(detail::Recorder& rec, const VerifyOptions& v) {
    auto f = detail::fn("1/(1-z/2)", presets::point(2.0), true);
    auto g = detail::fn("1/(1-z/3)", presets::point(3.0), true);
    auto o = detail::hopts(v);
    std::vector<cplx> zs;
    for (cplx z : detail::ring_points(0.5, 8, 0.1)) zs.push_back(z);
    for (cplx z : detail::ring_points(1.0, 8, 0.35)) zs.push_back(z);
    for (cplx z : detail::ring_points(3.0, 9, 0.2)) zs.push_back(z);

    const std::size_t n = 80;
    std::vector<cplx> a, b, c;
    rec.guard("taylor coefficients", [&] {
        // sample each factor close to its pole so coefficient errors stay below |z|^-n for |z| <= 3
        a = taylor_coeffs(f, 1.9, n);
        b = taylor_coeffs(g, 2.9, n);
        c = series_hadamard(a, b);
        double coeff = 0.0;
        for (std::size_t k = 0; k <= n; ++k) coeff = std::max(coeff, std::abs(c[k] - std::pow(6.0, -double(k))));
        rec.value("series coefficients a_n b_n vs 6^-n", coeff, 1e-14);
    });

    double worst_exact = 0.0, worst_series = 0.0, worst_cycle = 0.0;
    rec.guard("geometric oracle at 25 points", [&] {
        int idx = 0;
        for (cplx z : zs) {
            cplx h = hadamard_at(f, g, z, o);
            worst_exact = std::max(worst_exact, std::abs(h - 1.0 / (1.0 - z / 6.0)));
            if (!c.empty()) {
                double q = std::abs(z) / 6.0;
                double bound = std::pow(q, double(n + 1)) / (1.0 - q);
                worst_series = std::max(worst_series, std::abs(h - eval_series(c, z)) - bound);
            }
            if (idx++ % 5 == 0) {
                auto spec = hadamard_winding_spec(f.singular, g.singular, z, o.margin);
                HadamardOptions half = o;
                half.eps = auto_eps(spec, o.synthesis) / 2.0;
                worst_cycle = std::max(worst_cycle, std::abs(h - hadamard_at(f, g, z, half)));
            }
        }
        rec.value("|hadamard_at - 1/(1-z/6)| over 25 z", worst_exact, 1e-8);
        if (!c.empty()) rec.value("|hadamard_at - truncated series| beyond truncation bound", worst_series, 1e-8);
        rec.value("cycle choice eps vs eps/2 (5 z)", worst_cycle, 10.0 * v.tol);
    });
}

/// log1p * log1p = Li2: values, class equality and jumps across the cut.
inline void suite_dilog(detail::Recorder& rec, const VerifyOptions& v) {
    auto l = detail::fn("log1p(z)", builtin_singular_set("log1p"), false);
    auto li = detail::fn("li2(z)", builtin_singular_set("li2"), false);
    auto o = detail::hopts(v);
    std::vector<cplx> inside, outside;
    for (int k = 0; k < 20; ++k) inside.push_back(std::polar(0.15 + 0.04 * k, 0.4 + 0.31 * k));
    for (int k = 0; k < 10; ++k) outside.push_back(std::polar(1.2 + 0.45 * k, 0.35 + 0.55 * k));
    rec.guard("values in |z|<1", [&] {
        double worst = 0.0;
        for (cplx z : inside) worst = std::max(worst, std::abs(hadamard_at(l, l, z, o) - li2(z)));
        rec.value("|log1p*log1p - li2| at 20 z in |z|<1", worst, 1e-7);
    });
    rec.guard("values in |z|>1", [&] {
        double worst = 0.0;
        for (cplx z : outside) worst = std::max(worst, std::abs(hadamard_at(l, l, z, o) - li2(z)));
        rec.value("|log1p*log1p - li2| at 10 z in |z|>1 off [1,inf)", worst, 1e-7);
    });
    rec.guard("class equality", [&] {
        auto prod = cohom_convolve(class_of(l), class_of(l), o);
        rec.boolean("product set is ray [1,inf)", approx_equal(prod.set, presets::ray(0.0, 1.0)));
        auto report = class_equality_report(prod.rep.fn, Factor::of(li).fn, prod.set, 4);
        double worst = 0.0;
        for (const auto& lm : report.loops)
            for (cplx m : lm.moments) worst = std::max(worst, std::abs(m) / lm.threshold);
        rec.boolean("class_equal_mod_entire(product, li2, moments=4)", report.equal,
                    "max |moment|/threshold = " + format_real(worst));
        Evaluator li_eval = [](cplx z) { return li2(z); };
        rec.boolean("control: li2 is not log1p mod entire",
                    !class_equal_mod_entire(li_eval, l, presets::ray(0.0, 1.0), 4));
        Evaluator li_eval2 = li_eval;
        for (double x : {1.5, 2.0, 4.0}) {
            cplx jp = jump(prod.rep.fn, x, 1e-5);
            cplx jl = jump(li_eval2, x, 1e-5);
            rec.value("jump at x=" + format_real(x) + " vs li2", std::abs(jp - jl), 1e-6);
        }
    });
}

/// f1 * f2 - f2 * f1 = f1(0) f2(inf) for the admissible closure pattern.
inline void suite_defect(detail::Recorder& rec, const VerifyOptions& v) {
    auto f1 = detail::fn("1/(z-2)", presets::point(2.0), true);
    auto f2 = detail::fn("exp(1/z)", presets::punctured_disk(0.1), false);
    auto w = detail::fn("1/(1-2*z)", set_union(presets::point(0.5), presets::punctured_disk(0.1)), true);
    auto o = detail::hopts(v);
    std::vector<cplx> zs;
    for (cplx z : detail::ring_points(1.0, 5, 0.3)) zs.push_back(z);
    for (cplx z : detail::ring_points(1.5, 5, 0.9)) zs.push_back(z);
    rec.guard("defect exp(1/z)", [&] {
        double worst = 0.0;
        for (cplx z : zs) worst = std::max(worst, std::abs(commutativity_defect(f1, f2, z, o) + 0.5));
        rec.value("|defect(1/(z-2), exp(1/z)) + 1/2| at 10 z", worst, 1e-7);
    });
    rec.guard("defect 1/(1-2z)", [&] {
        double worst = 0.0;
        for (cplx z : zs) worst = std::max(worst, std::abs(commutativity_defect(f1, w, z, o)));
        rec.value("|defect(1/(z-2), 1/(1-2z))| at 10 z", worst, 1e-9);
    });
}

/// Small loop around 0 picks out f1(0) f2(inf).
inline void suite_residue(detail::Recorder& rec, const VerifyOptions& v) {
    struct Case {
        FunctionDef f1, f2;
        cplx z, expect;
        std::string name;
    };
    std::vector<Case> cases;
    rec.guard("residue pairs", [&] {
        cases.push_back({detail::fn("1/(z-2)", presets::point(2.0), true),
                         detail::fn("exp(1/z)", presets::punctured_disk(0.1), false), 1.0, -0.5,
                         "1/(z-2), exp(1/z)"});
        cases.push_back({detail::fn("1/((z-2)*(z+3))", set_union(presets::point(2.0), presets::point(-3.0)), true),
                         detail::fn("2+1/z", presets::punctured_disk(0.1), false), cplx(1.0, 0.5), -1.0 / 3.0,
                         "1/((z-2)(z+3)), 2+1/z"});
        cases.push_back({detail::fn("1+1/(1-z/2)", presets::point(2.0), false),
                         detail::fn("(3*z+1)/(z-0.05)", presets::point(0.05), false), cplx(-0.7, 0.9), 6.0,
                         "1+1/(1-z/2), (3z+1)/(z-0.05)"});
        cases.push_back({detail::fn("1/(z-2)", presets::point(2.0), true),
                         detail::fn("1/(1-2*z)", presets::point(0.5), true), cplx(0.0, 1.5), 0.0,
                         "1/(z-2), 1/(1-2z) (f2(inf)=0)"});
    });
    auto o = detail::hopts(v);
    for (const auto& c : cases)
        rec.guard(c.name, [&] {
            cplx expect = eval(c.f1, 0.0) * value_at_infinity(c.f2);
            rec.value("oracle f1(0)f2(inf) for " + c.name, std::abs(expect - c.expect), 1e-9);
            for (double r : {1e-2, 1e-3})
                rec.value("residue loop r=" + format_real(r) + ": " + c.name,
                          std::abs(residue_zero_loop(c.f1, c.f2, c.z, r, o) - c.expect), 1e-8);
        });
}

/// Classical (Pohlen) cycle against the generalized one, plus continuity at 0.
inline void suite_pohlen(detail::Recorder& rec, const VerifyOptions& v) {
    struct Pair {
        FunctionDef f1, f2;
        std::string name;
    };
    std::vector<Pair> pairs;
    rec.guard("pohlen pairs", [&] {
        pairs.push_back({detail::fn("1/(1-z/3)", presets::point(3.0), true),
                         detail::fn("1/(1-z/5)", presets::point(5.0), true), "1/(1-z/3), 1/(1-z/5)"});
        pairs.push_back({detail::fn("1/(z+4)", presets::point(-4.0), true),
                         detail::fn("1/(z-5)", presets::point(5.0), true), "1/(z+4), 1/(z-5)"});
        pairs.push_back({detail::fn("1/((z-2)*(z+3))", set_union(presets::point(2.0), presets::point(-3.0)), true),
                         detail::fn("(z+1)/(z^2+16)",
                                    set_union(presets::point(cplx(0.0, 4.0)), presets::point(cplx(0.0, -4.0))), true),
                         "1/((z-2)(z+3)), (z+1)/(z^2+16)"});
    });
    auto o = detail::hopts(v);
    std::vector<cplx> zs;
    for (double r : {0.5, 2.0, 7.0, 25.0})
        for (cplx z : detail::ring_points(r, 5, 0.3 + r)) zs.push_back(z);
    for (const auto& p : pairs) {
        rec.guard(p.name, [&] {
            double worst = 0.0;
            for (cplx z : zs) worst = std::max(worst, std::abs(pohlen_at(p.f1, p.f2, z, o) - hadamard_at(p.f1, p.f2, z, o)));
            rec.value("|pohlen - hadamard| at 20 z: " + p.name, worst, 1e-8);
            cplx at0 = eval(p.f1, 0.0) * eval(p.f2, 0.0);
            rec.value("continuity (f1*f2)(0.01) vs f1(0)f2(0): " + p.name,
                      std::abs(pohlen_at(p.f1, p.f2, 0.01, o) - at0), 1e-3);
        });
    }
}

namespace detail {

struct RandomConfig {
    std::vector<WindingRegion> regions;
    int zero = 0;
};

/// Disjoint boxes on a coarse lattice with random windings; optionally a segment to 0 and a ray to inf.
inline RandomConfig random_config(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> count(1, 4), wind(-2, 2), zw(-1, 1), coin(0, 2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RandomConfig cfg;
    cfg.zero = zw(rng);
    std::vector<LogPolarBox> placed;
    auto far_enough = [&](const LogPolarBox& b) {
        for (const auto& p : placed)
            if (box_distance(b, p) < 0.3) return false;
        return true;
    };
    int want = count(rng);
    for (int tries = 0; tries < 200 && int(placed.size()) < want; ++tries) {
        double lo = -1.5 + 3.0 * u(rng);
        double h = 0.05 + 0.6 * u(rng);
        bool full = coin(rng) == 0;
        LogPolarBox b(lo, lo + h, full ? Arc::full() : Arc::interval(kTwoPi * u(rng), 0.2 + 2.5 * u(rng)));
        if (!far_enough(b)) continue;
        placed.push_back(b);
        int w = wind(rng);
        cfg.regions.push_back({StarSet({b}, "box" + std::to_string(placed.size())), w});
    }
    if (coin(rng) == 0) {
        LogPolarBox seg(-kInf, -2.5, Arc::point(kTwoPi * u(rng)));
        if (far_enough(seg)) {
            placed.push_back(seg);
            cfg.regions.push_back({StarSet({seg}, "to-zero"), cfg.zero});
        }
    }
    if (coin(rng) == 0) {
        LogPolarBox ray(2.5, kInf, Arc::point(kTwoPi * u(rng)));
        if (far_enough(ray)) {
            placed.push_back(ray);
            cfg.regions.push_back({StarSet({ray}, "to-inf"), 0});
        }
    }
    return cfg;
}

}  // namespace detail

/// Randomized winding configurations: certification and independence of the chosen cycle.
inline void suite_homology(detail::Recorder& rec, const VerifyOptions& v) {
    std::mt19937_64 rng(v.seed);
    int certified = 0, total = 50;
    double worst_probes = kInf, worst_diff = 0.0, worst_exact = 0.0;
    std::string first_failure;
    for (int i = 0; i < total; ++i) {
        auto cfg = detail::random_config(rng);
        try {
            WindingSpec spec = make_winding_spec(cfg.regions, cfg.zero);
            double eps = auto_eps(spec);
            Cycle c1 = synthesize_cycle(spec, eps);
            Cycle c2 = synthesize_cycle(spec, eps / 2.0);
            std::size_t boxes = 0;
            for (const auto& r : spec.regions) boxes += r.set.boxes.size();
            auto rep1 = certify(c1, spec);
            auto rep2 = certify(c2, spec);
            worst_probes = std::min(worst_probes, double(rep1.probes_checked) / double(std::max<std::size_t>(boxes, 1)));
            if (rep1.ok && rep2.ok) ++certified;
            else if (first_failure.empty()) first_failure = "config " + std::to_string(i) + " failed certification";

            // Poles sit inside regions (winding known) and at 0.
            std::vector<std::pair<cplx, int>> poles;
            for (const auto& r : spec.regions)
                for (const auto& b : r.set.boxes) poles.push_back({box_sample(b, 0.5, 0.5, 1.0), r.winding});
            std::vector<std::function<cplx(cplx)>> integrands = {
                [&](cplx w) {
                    cplx s = 0.0;
                    for (auto& p : poles) s += 1.0 / (w - p.first);
                    return s;
                },
                [&](cplx w) {
                    cplx s = 0.0;
                    for (std::size_t k = 0; k < poles.size(); ++k) s += double(k + 1) / ((w - poles[k].first) * (w - poles[k].first));
                    return s;
                },
                [](cplx w) { return 1.0 / w; },
                [](cplx w) { return 1.0 / (w * w) + w * w; },
                [&](cplx w) {
                    cplx s = 1.0;
                    for (auto& p : poles) s *= 1.0 / (w - p.first);
                    return s * std::exp(0.1 * w);
                },
            };
            for (std::size_t k = 0; k < integrands.size(); ++k) {
                cplx i1 = integrate_cycle(integrands[k], c1, v.tol).value;
                cplx i2 = integrate_cycle(integrands[k], c2, v.tol).value;
                worst_diff = std::max(worst_diff, std::abs(i1 - i2) / (1.0 + std::abs(i1)));
                if (k == 0) {
                    double expect = 0.0;
                    for (auto& p : poles) expect += p.second;
                    worst_exact = std::max(worst_exact, std::abs(i1 - cplx(0.0, kTwoPi * expect)));
                }
                if (k == 2)
                    worst_exact = std::max(worst_exact, std::abs(i1 - cplx(0.0, kTwoPi * spec.winding_at_zero)));
            }
        } catch (const std::exception& e) {
            if (first_failure.empty()) first_failure = "config " + std::to_string(i) + ": " + e.what();
        }
    }
    rec.value("configurations certified (eps and eps/2)", double(total - certified), 0.0,
              std::to_string(certified) + "/" + std::to_string(total) + (first_failure.empty() ? "" : "; " + first_failure));
    rec.value("min certify probes per box (need >= 64)", worst_probes >= 64.0 ? 0.0 : 64.0 - worst_probes, 0.0,
              format_real(worst_probes));
    rec.value("max |I(eps) - I(eps/2)|/(1+|I|) over 5 integrands", worst_diff, 1e-8);
    rec.value("winding-weighted residue sums vs 2 pi i * winding", worst_exact, 1e-8);
}

/// One shared cycle for a compact K against pointwise products.
inline void suite_shared_cycle(detail::Recorder& rec, const VerifyOptions& v) {
    auto o = detail::hopts(v);
    struct Case {
        FunctionDef f1, f2;
        StarSet k;
        std::string name;
    };
    std::vector<Case> cases;
    rec.guard("shared-cycle pairs", [&] {
        cases.push_back({detail::fn("1/(1-z/2)", presets::point(2.0), true),
                         detail::fn("1/(1-z/3)", presets::point(3.0), true), presets::annulus(0.5, 3.0), "geometric"});
        cases.push_back({detail::fn("log1p(z)", builtin_singular_set("log1p"), false),
                         detail::fn("log1p(z)", builtin_singular_set("log1p"), false),
                         StarSet({LogPolarBox(std::log(0.3), std::log(3.0), Arc::interval(0.5, kTwoPi - 1.0))}, "K"),
                         "dilog"});
        cases.push_back({detail::fn("1/(z-2)", presets::point(2.0), true),
                         detail::fn("exp(1/z)", presets::punctured_disk(0.1), false), presets::annulus(0.5, 2.0),
                         "1/(z-2), exp(1/z)"});
    });
    for (const auto& c : cases)
        rec.guard(c.name, [&] {
            std::vector<cplx> grid;
            const auto& b = c.k.boxes.front();
            for (int i = 0; i < 20; ++i) grid.push_back(box_sample(b, (i % 4 + 0.5) / 4.0, (i / 4 + 0.5) / 5.0));
            GridResult g = hadamard_grid(c.f1, c.f2, c.k, grid, o);
            double worst = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                cplx p = hadamard_at(c.f1, c.f2, grid[i], o);
                worst = std::max(worst, std::abs(g.values[i] - p) / (1.0 + std::abs(p)));
            }
            rec.value("max |grid - pointwise|/(1+|value|): " + c.name, worst, 1e-8);
        });
}

namespace detail {

/// Random set on a lattice; the unbounded direction (if any) is fixed per call so products stay defined.
inline StarSet random_lattice_set(std::mt19937_64& rng, int direction) {
    std::uniform_int_distribution<int> nb(1, 4), cell(-6, 6), span(0, 4), arcpos(0, 15), arcw(0, 12), coin(0, 3);
    std::vector<LogPolarBox> boxes;
    int n = nb(rng);
    for (int i = 0; i < n; ++i) {
        double lo = 0.5 * cell(rng);
        double hi = lo + 0.5 * span(rng);
        if (direction < 0 && coin(rng) == 0) lo = -kInf;
        if (direction > 0 && coin(rng) == 0) hi = kInf;
        int w = arcw(rng);
        Arc arc = coin(rng) == 0 ? Arc::full() : Arc::interval(arcpos(rng) * kPi / 8.0, w * kPi / 8.0);
        boxes.emplace_back(lo, hi, arc);
    }
    return StarSet(std::move(boxes), "random");
}

inline bool raster_proper(const StarSet& s, int n) {
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (const auto& b : s.boxes)
        for (double x : {b.rho_lo, b.rho_hi})
            if (std::isfinite(x)) {
                lo = any ? std::min(lo, x) : x;
                hi = any ? std::max(hi, x) : x;
                any = true;
            }
    lo -= 1.0;
    hi += 1.0;
    for (int i = 0; i < n; ++i) {
        double rho = lo + (hi - lo) * (i + 0.5) / n;
        for (int j = 0; j < n; ++j) {
            double theta = kTwoPi * (j + 0.5) / n;
            bool hit = false;
            for (const auto& b : s.boxes)
                if (rho >= b.rho_lo && rho <= b.rho_hi && b.arc.contains(theta, 0.0)) {
                    hit = true;
                    break;
                }
            if (!hit) return true;
        }
    }
    return false;
}

}  // namespace detail

inline void suite_set_calculus(detail::Recorder& rec, const VerifyOptions& v) {
    std::mt19937_64 rng(v.seed + 1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> dir(-1, 1);
    const int samples = 10000;
    double worst_prod = 0.0, worst_inv = 0.0, worst_scale = 0.0;
    for (int k = 0; k < samples; ++k) {
        int d = dir(rng);
        StarSet s1 = detail::random_lattice_set(rng, d);
        StarSet s2 = detail::random_lattice_set(rng, d);
        const auto& b1 = s1.boxes[k % s1.boxes.size()];
        const auto& b2 = s2.boxes[(k / 3) % s2.boxes.size()];
        cplx a = box_sample(b1, u(rng), u(rng)), b = box_sample(b2, u(rng), u(rng));
        worst_prod = std::max(worst_prod, set_distance(set_product(s1, s2), a * b));
        worst_inv = std::max(worst_inv, set_distance(set_inverse(s1), 1.0 / a));
        cplx z = std::polar(std::exp(4.0 * u(rng) - 2.0), kTwoPi * u(rng));
        worst_scale = std::max(worst_scale, set_distance(set_scale(z, s1), z * a));
    }
    rec.value("product soundness: max dist(S1S2, ab), 1e4 samples", worst_prod, 1e-9);
    rec.value("inverse soundness: max dist(S^-1, 1/a), 1e4 samples", worst_inv, 1e-9);
    rec.value("scale soundness: max dist(zS, za), 1e4 samples", worst_scale, 1e-9);

    StarSet neg = presets::ray(kPi, 1.0);
    StarSet prod = set_product(neg, neg);
    StarSet want = presets::ray(0.0, 1.0);
    double box_delta = INFINITY;
    if (prod.boxes.size() == 1) {
        const auto& p = prod.boxes[0];
        const auto& w = want.boxes[0];
        box_delta = std::max({std::abs(p.rho_lo - w.rho_lo), p.rho_hi == w.rho_hi ? 0.0 : INFINITY,
                              std::abs(p.arc.width() - w.arc.width()),
                              circular_distance(p.arc.lo(), w.arc.lo())});
    }
    rec.value("(-inf,-1] * (-inf,-1] = [1,inf) at box level", box_delta, 0.0);

    int agree = 0, proper = 0;
    const int configs = 20;
    for (int k = 0; k < configs; ++k) {
        StarSet s = detail::random_lattice_set(rng, dir(rng));
        if (k % 2 == 0) {
            // denser sets so both verdicts occur
            StarSet t = detail::random_lattice_set(rng, 0);
            for (auto b : t.boxes) s.boxes.push_back(LogPolarBox(-kInf, kInf, b.arc));
            if (k % 4 == 0) s.boxes.push_back(LogPolarBox(-kInf, kInf, Arc::interval(0.0, kPi)));
            if (k % 4 == 0) s.boxes.push_back(LogPolarBox(-kInf, kInf, Arc::interval(kPi, kPi)));
        }
        bool exact = is_proper(s);
        bool raster = detail::raster_proper(s, 1000);
        agree += exact == raster;
        proper += exact;
    }
    rec.value("properness sweep vs 1e6-point raster, 20 configs", double(configs - agree), 0.0,
              std::to_string(proper) + " proper, " + std::to_string(configs - proper) + " improper");
}

inline void suite_quadrature(detail::Recorder& rec, const VerifyOptions& v) {
    (void)v;
    double worst = 0.0;
    for (double r : {0.1, 1.0, 10.0})
        for (int k = -3; k <= 3; ++k) {
            auto res = circle_integral([k](cplx z) { return std::pow(z, k); }, 0.0, r, 1);
            cplx expect = k == -1 ? cplx(0.0, kTwoPi) : cplx(0.0);
            worst = std::max(worst, std::abs(res.value - expect) / std::max(1.0, std::pow(r, k + 1)));
        }
    rec.value("residue battery z^k, k=-3..3, r in {0.1,1,10} (scaled by max(1,r^(k+1)))", worst, 1e-12);
    auto cf = circle_integral([](cplx z) { return std::exp(z) / (z - 0.3); }, 0.0, 1.0, 1);
    rec.value("Cauchy formula |I/(2 pi i) - e^0.3|", std::abs(cf.value / cplx(0.0, kTwoPi) - std::exp(0.3)), 1e-10);
    auto rev = circle_integral([](cplx z) { return std::exp(z) / (z - 0.3); }, 0.0, 1.0, -1);
    rec.value("orientation reversal", std::abs(rev.value + cf.value), 1e-13);
}

inline void suite_localized(detail::Recorder& rec, const VerifyOptions& v) {
    auto o = detail::hopts(v);
    rec.guard("localized dilog", [&] {
        auto l = detail::fn("log1p(z)", builtin_singular_set("log1p"), false);
        StarSet u1 = presets::annulus(0.1, 3.0), v1 = thicken(presets::ray(0.0, 1.0), 0.2);
        StarSet u2 = presets::annulus(0.5, 5.0), v2 = thicken(presets::ray(0.0, 1.0), 0.35);
        std::vector<cplx> grid;
        for (int k = 0; k < 12; ++k) grid.push_back(std::polar(0.7 + 0.18 * k, 0.5 + 0.45 * k));
        GridResult a = localized_product(l, l, u1, v1, grid, o);
        GridResult b = localized_product(l, l, u2, v2, grid, o);
        double ga = 0.0, gb = 0.0, ab = 0.0, li = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            cplx g = hadamard_at(l, l, grid[i], o);
            ga = std::max(ga, std::abs(a.values[i] - g));
            gb = std::max(gb, std::abs(b.values[i] - g));
            ab = std::max(ab, std::abs(a.values[i] - b.values[i]));
            li = std::max(li, std::abs(a.values[i] - li2(grid[i])));
        }
        rec.value("window 1 vs global product", ga, 1e-8);
        rec.value("window 2 vs global product", gb, 1e-8);
        rec.value("window 1 vs window 2 on the overlap", ab, 1e-8);
        rec.value("window 1 vs li2", li, 1e-8);
        rec.boolean("cycles differ between windows", cycle_hash(a.cycle_used) != cycle_hash(b.cycle_used));
    });
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

struct SuiteEntry {
    std::string name;
    std::string title;
    void (*run)(detail::Recorder&, const VerifyOptions&);
};

inline const std::vector<SuiteEntry>& suites() {
    static const std::vector<SuiteEntry> all = {
        {"series-oracle", "Geometric-series oracle", suite_series_oracle},
        {"dilog", "Dilogarithm identity", suite_dilog},
        {"defect", "Commutativity defect", suite_defect},
        {"residue", "Residue identity", suite_residue},
        {"pohlen", "Pohlen equivalence", suite_pohlen},
        {"homology", "Homology/certification", suite_homology},
        {"shared-cycle", "Shared-cycle coherence", suite_shared_cycle},
        {"set-calculus", "Set calculus", suite_set_calculus},
        {"quadrature", "Quadrature battery", suite_quadrature},
        {"localized", "Localized computation", suite_localized},
    };
    return all;
}

inline bool suite_exists(const std::string& name) {
    if (name == "all") return true;
    for (const auto& s : suites())
        if (s.name == name) return true;
    return false;
}

inline SuiteReport run_suite(const std::string& name, const VerifyOptions& v = {}) {
    for (const auto& s : suites()) {
        if (s.name != name) continue;
        SuiteReport report;
        report.suite = name;
        detail::Recorder rec(report);
        auto t0 = std::chrono::steady_clock::now();
        rec.guard(name, [&] { s.run(rec, v); });
        report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (report.checks.empty()) rec.boolean("suite produced checks", false);
        return report;
    }
    fail(ErrorKind::ConfigError, "unknown suite '" + name + "'");
}

}  // namespace hadamard_kit
