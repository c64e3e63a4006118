#pragma once

// Generalized and classical Hadamard products, commutativity defect, residue loop,
// shared-cycle grids, class convolution and class-equality testing.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "hadamard_kit/cycles.hpp"
#include "hadamard_kit/errors.hpp"
#include "hadamard_kit/functions.hpp"
#include "hadamard_kit/quadrature.hpp"
#include "hadamard_kit/set_difference.hpp"
#include "hadamard_kit/sphere_sets.hpp"

namespace hadamard_kit {

using Evaluator = std::function<cplx(cplx)>;

struct HadamardOptions {
    double tol = 1e-10;
    double margin = kDefaultMargin;
    std::optional<double> eps;  // synthesis dilation; automatic when empty
    SynthesisOptions synthesis;
    bool prefer_anti_cauchy = false;
    unsigned threads = 1;
};

/// A factor of a product: evaluator, singular set, and the vanishing-at-infinity flag.
struct Factor {
    Evaluator fn;
    StarSet singular;
    bool vanishes_at_inf = false;

    static Factor of(const FunctionDef& f) {
        return {[f](cplx z) { return eval(f, z); }, f.singular, f.vanishes_at_inf};
    }
};

struct ProductValue {
    cplx value;
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
};

namespace detail {

inline const cplx kTwoPiI(0.0, kTwoPi);

inline ProductValue integrate_product(const Factor& a, const Factor& b, cplx z, const Cycle& c, double tol) {
    auto g = [&](cplx zeta) { return a.fn(zeta) * b.fn(z / zeta) / zeta; };
    QuadResult q = integrate_cycle(g, c, tol);
    return {q.value / kTwoPiI, q.error_estimate / kTwoPi, q.evaluations};
}

inline Cycle cycle_for(const WindingSpec& spec, const HadamardOptions& opts) {
    return opts.eps ? synthesize_cycle(spec, *opts.eps, opts.synthesis) : synthesize_cycle(spec, opts.synthesis);
}

}  // namespace detail

/// (1/2 pi i) times the integral of a(zeta) b(z/zeta) dzeta/zeta over a synthesized
/// generalized Hadamard cycle.
inline ProductValue hadamard_value(const Factor& a, const Factor& b, cplx z, const HadamardOptions& opts = {}) {
    WindingSpec spec = hadamard_winding_spec(a.singular, b.singular, z, opts.margin);
    return detail::integrate_product(a, b, z, detail::cycle_for(spec, opts), opts.tol);
}

inline cplx hadamard_at(const FunctionDef& f1, const FunctionDef& f2, cplx z, const HadamardOptions& opts = {}) {
    return hadamard_value(Factor::of(f1), Factor::of(f2), z, opts).value;
}

/// Same integral over the classical Hadamard-table cycle.
inline ProductValue pohlen_value(const Factor& a, const Factor& b, cplx z, const HadamardOptions& opts = {}) {
    if (!a.singular.closure_has_inf() && !a.vanishes_at_inf)
        fail(ErrorKind::VanishingAtInfinityViolated, "f1 must vanish at infinity when infinity is off its singular set");
    if (!b.singular.closure_has_inf() && !b.vanishes_at_inf)
        fail(ErrorKind::VanishingAtInfinityViolated, "f2 must vanish at infinity when infinity is off its singular set");
    WindingSpec spec = pohlen_winding_spec(a.singular, b.singular, z, opts.prefer_anti_cauchy, opts.margin);
    return detail::integrate_product(a, b, z, detail::cycle_for(spec, opts), opts.tol);
}

inline cplx pohlen_at(const FunctionDef& f1, const FunctionDef& f2, cplx z, const HadamardOptions& opts = {}) {
    return pohlen_value(Factor::of(f1), Factor::of(f2), z, opts).value;
}

/// f1 * f2 - f2 * f1 for the pattern 0, inf not in cl S1; 0 in cl S2; inf not in cl S2.
inline cplx commutativity_defect(const FunctionDef& f1, const FunctionDef& f2, cplx z,
                                 const HadamardOptions& opts = {}) {
    const StarSet& s1 = f1.singular;
    const StarSet& s2 = f2.singular;
    if (s1.closure_has_zero() || s1.closure_has_inf() || !s2.closure_has_zero() || s2.closure_has_inf())
        fail(ErrorKind::PreconditionViolated, "defect needs 0, inf off cl S1, 0 in cl S2, inf off cl S2");
    return hadamard_at(f1, f2, z, opts) - hadamard_at(f2, f1, z, opts);
}

/// (1/2 pi i) times the CCW integral of f1(zeta) f2(z/zeta)/zeta on |zeta| = r.
inline ProductValue residue_zero_loop_value(const FunctionDef& f1, const FunctionDef& f2, cplx z, double r,
                                            const HadamardOptions& opts = {}) {
    if (f1.singular.closure_has_zero() || f2.singular.closure_has_inf())
        fail(ErrorKind::PreconditionViolated, "residue loop needs 0 off cl S1 and inf off cl S2");
    auto g = [&](cplx zeta) { return eval(f1, zeta) * eval(f2, z / zeta) / zeta; };
    QuadResult q = circle_integral(g, cplx(0.0), r, 1, opts.tol);
    return {q.value / detail::kTwoPiI, q.error_estimate / kTwoPi, q.evaluations};
}

inline cplx residue_zero_loop(const FunctionDef& f1, const FunctionDef& f2, cplx z, double r,
                              const HadamardOptions& opts = {}) {
    return residue_zero_loop_value(f1, f2, z, r, opts).value;
}

// ---------------------------------------------------------------------------
// Grids
// ---------------------------------------------------------------------------

struct GridResult {
    std::vector<cplx> points;
    std::vector<cplx> values;
    std::vector<double> error_estimates;
    Cycle cycle_used;
};

namespace detail {

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    next.store(n);
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline GridResult grid_on_cycle(const Factor& a, const Factor& b, Cycle cycle, const std::vector<cplx>& grid,
                                const HadamardOptions& opts) {
    GridResult res;
    res.points = grid;
    res.values.resize(grid.size());
    res.error_estimates.resize(grid.size());
    parallel_for(grid.size(), opts.threads, [&](std::size_t i) {
        ProductValue v = integrate_product(a, b, grid[i], cycle, opts.tol);
        res.values[i] = v.value;
        res.error_estimates[i] = v.error_estimate;
    });
    res.cycle_used = std::move(cycle);
    return res;
}

}  // namespace detail

/// Evaluates the product on a grid inside the compact K with one shared cycle.
inline GridResult hadamard_grid(const Factor& a, const Factor& b, const StarSet& k, const std::vector<cplx>& grid,
                                const HadamardOptions& opts = {}) {
    for (cplx z : grid)
        if (z == cplx(0.0) || !set_contains(k, z))
            fail(ErrorKind::GridOutsideWindow, "grid point " + format_complex(z) + " lies outside K");
    Cycle c = shared_cycle(a.singular, b.singular, k, opts.margin, opts.synthesis);
    return detail::grid_on_cycle(a, b, std::move(c), grid, opts);
}

inline GridResult hadamard_grid(const FunctionDef& f1, const FunctionDef& f2, const StarSet& k,
                                const std::vector<cplx>& grid, const HadamardOptions& opts = {}) {
    return hadamard_grid(Factor::of(f1), Factor::of(f2), k, grid, opts);
}

/// Product on U minus V using the shared cycle of the compact K = cl(U) \ V.
inline GridResult localized_product(const FunctionDef& f1, const FunctionDef& f2, const StarSet& u, const StarSet& v,
                                    const std::vector<cplx>& grid, const HadamardOptions& opts = {}) {
    if (!strongly_convolvable(f1.singular, f2.singular))
        fail(ErrorKind::NotStronglyConvolvable, f1.singular.label + " and " + f2.singular.label);
    if (!u.compact()) fail(ErrorKind::PreconditionViolated, "U must have compact closure in C*");
    StarSet prod = set_product(f1.singular, f2.singular);
    for (const auto& pb : prod.boxes) {
        bool covered = false;
        for (const auto& vb : v.boxes)
            covered = covered || (vb.rho_lo <= pb.rho_lo && pb.rho_hi <= vb.rho_hi &&
                                  (vb.arc.is_full() || (!pb.arc.is_full() && vb.arc.contains(pb.arc.lo(), 0.0) &&
                                                        vb.arc.contains(pb.arc.hi(), 0.0) &&
                                                        pb.arc.width() <= vb.arc.width())));
        if (!covered) fail(ErrorKind::PreconditionViolated, "V must contain S1 S2");
    }
    for (cplx z : grid) {
        if (z == cplx(0.0) || !set_contains(u, z) || set_contains(v, z, 0.0))
            fail(ErrorKind::GridOutsideWindow, "grid point " + format_complex(z) + " is not in U \\ V");
    }
    StarSet k = set_difference(u, v);
    Factor a = Factor::of(f1), b = Factor::of(f2);
    Cycle c = shared_cycle(a.singular, b.singular, k, opts.margin, opts.synthesis);
    return detail::grid_on_cycle(a, b, std::move(c), grid, opts);
}

// ---------------------------------------------------------------------------
// Classes modulo Hol(C*)
// ---------------------------------------------------------------------------

/// Memoizing evaluator of a computed product; safe for concurrent use.
class ProductRepresentative {
public:
    ProductRepresentative(Factor a, Factor b, HadamardOptions opts)
        : a_(std::move(a)), b_(std::move(b)), opts_(std::move(opts)) {}

    cplx operator()(cplx z) const {
        auto key = std::make_tuple(z.real(), z.imag(), opts_.tol);
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = cache_.find(key);
            if (it != cache_.end()) return it->second;
        }
        cplx v = hadamard_value(a_, b_, z, opts_).value;
        std::lock_guard<std::mutex> lock(mutex_);
        cache_.emplace(key, v);
        return v;
    }

    /// Fills the cache for a grid inside the compact K using one shared cycle.
    GridResult evaluate_grid(const StarSet& k, const std::vector<cplx>& grid) const {
        GridResult r = hadamard_grid(a_, b_, k, grid, opts_);
        std::lock_guard<std::mutex> lock(mutex_);
        for (std::size_t i = 0; i < grid.size(); ++i)
            cache_.emplace(std::make_tuple(grid[i].real(), grid[i].imag(), opts_.tol), r.values[i]);
        return r;
    }

    std::size_t cached() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return cache_.size();
    }

private:
    Factor a_, b_;
    HadamardOptions opts_;
    mutable std::mutex mutex_;
    mutable std::map<std::tuple<double, double, double>, cplx> cache_;
};

/// A class in Hol(C* \ S) / Hol(C*) given by a representative.
struct CohomClass {
    StarSet set;
    Factor rep;
    std::shared_ptr<const ProductRepresentative> product;  // set for computed products

    cplx operator()(cplx z) const { return rep.fn(z); }
};

inline CohomClass class_of(const FunctionDef& f) { return {f.singular, Factor::of(f), nullptr}; }

inline CohomClass class_of(const FunctionDef& f, const StarSet& support) {
    return {support, Factor::of(f), nullptr};
}

/// [f1] * [f2] = [f1 * f2], the representative being the pointwise product.
inline CohomClass cohom_convolve(const CohomClass& a, const CohomClass& b, const HadamardOptions& opts = {}) {
    if (!strongly_convolvable(a.set, b.set)) fail(ErrorKind::NotStronglyConvolvable, a.set.label + " and " + b.set.label);
    Factor fa{a.rep.fn, a.set, a.rep.vanishes_at_inf};
    Factor fb{b.rep.fn, b.set, b.rep.vanishes_at_inf};
    auto rep = std::make_shared<const ProductRepresentative>(fa, fb, opts);
    StarSet set = set_product(a.set, b.set);
    Factor f{[rep](cplx z) { return (*rep)(z); }, set, false};
    return {set, std::move(f), rep};
}

struct LoopMoments {
    std::vector<cplx> moments;
    double max_difference = 0.0;
    double threshold = 0.0;
    bool ok = true;
};

struct ClassEqualityReport {
    bool equal = true;
    std::vector<LoopMoments> loops;
};

struct ClassEqualityOptions {
    double loop_distance = 0.25;
    double window_pad = 1.0;
    double relative_tol = 1e-7;
    double quad_tol = 1e-10;
};

/// Loops around each cluster of S (window-clipped); crossings with unbounded rays are
/// polyline vertices so the integrand is never evaluated on S.
inline std::vector<Path> cluster_loops(const StarSet& s, const ClassEqualityOptions& opts = {}) {
    std::vector<double> finite;
    for (const auto& b : s.boxes) {
        if (std::isfinite(b.rho_lo)) finite.push_back(b.rho_lo);
        if (std::isfinite(b.rho_hi)) finite.push_back(b.rho_hi);
    }
    double lo = finite.empty() ? -opts.window_pad : *std::min_element(finite.begin(), finite.end()) - opts.window_pad;
    double hi = finite.empty() ? opts.window_pad : *std::max_element(finite.begin(), finite.end()) + opts.window_pad;
    std::vector<LogPolarBox> rects;
    std::vector<double> crossings;
    for (const auto& b : s.boxes) {
        if (!b.bounded() && b.arc.width() > 0.0) continue;  // sector reaching 0 or inf: no loop can enclose it
        LogPolarBox clipped(std::max(b.rho_lo, lo), std::min(b.rho_hi, hi), b.arc);
        if (clipped.rho_lo > clipped.rho_hi) continue;
        rects.push_back(box_dilate(clipped, opts.loop_distance));
        if (!b.bounded()) {
            crossings.push_back(b.arc.lo());
            LogPolarBox dil = rects.back();
            if (b.reaches_infinity()) rects.back() = LogPolarBox(dil.rho_lo, hi, dil.arc);
            if (b.reaches_zero()) rects.back() = LogPolarBox(lo, rects.back().rho_hi, dil.arc);
        }
    }
    std::vector<Path> loops;
    if (rects.empty()) return loops;
    detail::CylinderGrid grid(rects, crossings);
    auto cov = grid.coverage(rects);
    for (const auto& loop : detail::boundary_loops(grid, cov))
        loops.emplace_back(detail::loop_to_polyline(grid, loop, kPi / 64.0));
    return loops;
}

/// Morera-moment test: the moments of (g - h) zeta^k, k < moments, vanish on every cluster loop.
inline ClassEqualityReport class_equality_report(const Evaluator& g, const Evaluator& h, const StarSet& s,
                                                 int moments = 4, const ClassEqualityOptions& opts = {}) {
    ClassEqualityReport rep;
    for (const Path& p : cluster_loops(s, opts)) {
        Cycle c;
        c.add(p, 1);
        LoopMoments lm;
        std::map<std::pair<double, double>, cplx> diff_cache;
        auto diff = [&](cplx zeta) {
            auto key = std::make_pair(zeta.real(), zeta.imag());
            auto it = diff_cache.find(key);
            if (it != diff_cache.end()) return it->second;
            cplx d = g(zeta) - h(zeta);
            lm.max_difference = std::max(lm.max_difference, std::abs(d));
            diff_cache.emplace(key, d);
            return d;
        };
        for (int k = 0; k < moments; ++k) {
            auto integrand = [&](cplx zeta) { return diff(zeta) * std::pow(zeta, k); };
            lm.moments.push_back(integrate_cycle(integrand, c, opts.quad_tol).value);
        }
        lm.threshold = opts.relative_tol * (1.0 + lm.max_difference);
        for (cplx m : lm.moments) lm.ok = lm.ok && std::abs(m) < lm.threshold;
        rep.equal = rep.equal && lm.ok;
        rep.loops.push_back(std::move(lm));
    }
    return rep;
}

inline bool class_equal_mod_entire(const Evaluator& g, const Evaluator& h, const StarSet& s, int moments = 4,
                                   const ClassEqualityOptions& opts = {}) {
    return class_equality_report(g, h, s, moments, opts).equal;
}

inline bool class_equal_mod_entire(const Evaluator& g, const FunctionDef& h, const StarSet& s, int moments = 4,
                                   const ClassEqualityOptions& opts = {}) {
    return class_equal_mod_entire(g, Factor::of(h).fn, s, moments, opts);
}

/// g(x + i eps) - g(x - i eps).
inline cplx jump(const Evaluator& g, double x, double eps) { return g(cplx(x, eps)) - g(cplx(x, -eps)); }

}  // namespace hadamard_kit
