#pragma once

// Polygonal 1-cycles in C*, winding numbers, and synthesis of cycles that realize a
// prescribed winding function. A homology class of cycles in the complement of a
// closed set is determined by its winding numbers, so a cycle is "correct" exactly
// when its winding data matches the prescription; certify() checks that.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hadamard_kit/detail/cylinder_grid.hpp"
#include "hadamard_kit/errors.hpp"
#include "hadamard_kit/sphere_sets.hpp"

namespace hadamard_kit {

inline constexpr double kVertexSeparation = 1e-12;
inline constexpr double kOnCycleDistance = 1e-9;

/// Closed polyline (last vertex joins the first). Vertices avoid 0.
class Path {
public:
    Path() = default;

    explicit Path(std::vector<cplx> vertices) : vertices_(std::move(vertices)) {
        if (vertices_.size() < 3) fail(ErrorKind::PreconditionViolated, "a path needs at least 3 vertices");
        for (std::size_t i = 0; i < vertices_.size(); ++i) {
            const cplx& a = vertices_[i];
            const cplx& b = vertices_[(i + 1) % vertices_.size()];
            if (a == cplx(0.0, 0.0)) fail(ErrorKind::PreconditionViolated, "path vertex at 0");
            if (std::abs(a - b) <= kVertexSeparation)
                fail(ErrorKind::PreconditionViolated, "consecutive path vertices coincide");
        }
    }

    const std::vector<cplx>& vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    cplx vertex(std::size_t i) const { return vertices_[i % vertices_.size()]; }

    double length() const {
        double len = 0.0;
        for (std::size_t i = 0; i < vertices_.size(); ++i) len += std::abs(vertex(i + 1) - vertex(i));
        return len;
    }

    Path reversed() const {
        std::vector<cplx> v(vertices_.rbegin(), vertices_.rend());
        return Path(std::move(v));
    }

private:
    std::vector<cplx> vertices_;
};

struct CycleTerm {
    Path path;
    int multiplicity = 1;
};

/// Formal integer combination of closed paths.
struct Cycle {
    std::vector<CycleTerm> terms;

    bool empty() const { return terms.empty(); }

    void add(Path p, int multiplicity) {
        if (multiplicity != 0) terms.push_back({std::move(p), multiplicity});
    }

    double weighted_length() const {
        double len = 0.0;
        for (const auto& t : terms) len += std::abs(t.multiplicity) * t.path.length();
        return len;
    }

    friend Cycle operator+(Cycle a, const Cycle& b) {
        a.terms.insert(a.terms.end(), b.terms.begin(), b.terms.end());
        return a;
    }

    friend Cycle operator-(const Cycle& c) {
        Cycle out = c;
        for (auto& t : out.terms) t.multiplicity = -t.multiplicity;
        return out;
    }
};

/// Counter-clockwise (orientation +1) or clockwise (-1) regular polygon inscribed in a circle.
inline Path circle_path(cplx center, double radius, int orientation = 1, double max_step = kPi / 64.0) {
    auto n = static_cast<std::size_t>(std::ceil(kTwoPi / max_step));
    n = std::max<std::size_t>(n, 8);
    std::vector<cplx> v;
    v.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        double t = kTwoPi * double(k) / double(n);
        v.push_back(center + std::polar(radius, orientation >= 0 ? t : -t));
    }
    return Path(std::move(v));
}

inline double segment_distance(cplx a, cplx b, cplx w) {
    cplx d = b - a;
    double len2 = std::norm(d);
    if (len2 == 0.0) return std::abs(w - a);
    double t = std::clamp(((w - a) * std::conj(d)).real() / len2, 0.0, 1.0);
    return std::abs(w - (a + t * d));
}

inline double distance_to_support(const Cycle& c, cplx w) {
    double best = kInf;
    for (const auto& term : c.terms) {
        const auto& v = term.path.vertices();
        for (std::size_t i = 0; i < v.size(); ++i) best = std::min(best, segment_distance(v[i], v[(i + 1) % v.size()], w));
    }
    return best;
}

namespace detail {

inline double swept_angle(const std::vector<cplx>& v, cplx w, int subdivisions) {
    double total = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        cplx a = v[i] - w;
        cplx b = v[(i + 1) % v.size()] - w;
        for (int s = 0; s < subdivisions; ++s) {
            cplx p = a + (b - a) * (double(s) / subdivisions);
            cplx q = a + (b - a) * (double(s + 1) / subdivisions);
            total += std::arg(q * std::conj(p));
        }
    }
    return total;
}

}  // namespace detail

/// Total signed turns around w before rounding.
inline double winding_turns(const Cycle& c, cplx w, int subdivisions = 1) {
    double total = 0.0;
    for (const auto& term : c.terms) total += term.multiplicity * detail::swept_angle(term.path.vertices(), w, subdivisions);
    return total / kTwoPi;
}

/// Summed signed angles, rounded to the nearest integer. Retries with subdivided edges
/// while the rounding residual is 0.25 or more.
inline int winding_number(const Cycle& c, cplx w) {
    if (distance_to_support(c, w) <= kOnCycleDistance)
        fail(ErrorKind::PointOnCycle, "winding number requested on the cycle support");
    for (int subdivisions = 1; subdivisions <= 8; subdivisions *= 2) {
        double turns = winding_turns(c, w, subdivisions);
        double rounded = std::round(turns);
        if (std::abs(turns - rounded) < 0.25) return static_cast<int>(rounded);
    }
    fail(ErrorKind::PointOnCycle, "winding number did not settle to an integer");
}

// ---------------------------------------------------------------------------
// Winding prescriptions
// ---------------------------------------------------------------------------

/// A closed region the cycle must avoid, with the winding number it must have there.
struct WindingRegion {
    StarSet set;
    int winding = 0;
};

struct Probe {
    cplx point;
    int required = 0;
    std::string tag;
};

/// Computable stand-in for a homology class: forbidden regions with their windings,
/// the winding around 0, and sample probes. Winding around inf is always 0.
struct WindingSpec {
    std::vector<WindingRegion> regions;
    int winding_at_zero = 0;
    std::vector<Probe> probes;
    /// Smallest cylinder distance between regions that need different windings.
    double margin = kInf;
    double rho_min_window = -2.0;
    double rho_max_window = 2.0;

    std::vector<StarSet> forbidden() const {
        std::vector<StarSet> out;
        for (const auto& r : regions) out.push_back(r.set);
        return out;
    }

    cplx zero_proxy() const { return std::polar(std::exp(rho_min_window - 1.0), 0.3); }
    cplx far_field() const { return std::polar(std::exp(rho_max_window + 1.0), 0.3); }
};

inline constexpr double kWindowPad = 2.0;

namespace detail {

/// Representative points of a box: center and corners of its window-clipped rectangle.
inline std::vector<cplx> box_representatives(const LogPolarBox& b, double rho_min, double rho_max) {
    double lo = std::max(b.rho_lo, rho_min);
    double hi = std::min(b.rho_hi, rho_max);
    double t0 = b.arc.lo();
    double w = b.arc.is_full() ? 1.5 * kPi : b.arc.width();
    std::vector<cplx> pts;
    pts.push_back(std::polar(std::exp(0.5 * (lo + hi)), t0 + 0.5 * w));
    for (double rho : {lo, hi})
        for (double t : {t0, t0 + w}) pts.push_back(std::polar(std::exp(rho), t));
    return pts;
}

}  // namespace detail

/// Validates a prescription and fills in window, margin and probes.
inline WindingSpec make_winding_spec(std::vector<WindingRegion> regions, int winding_at_zero) {
    WindingSpec spec;
    spec.regions = std::move(regions);
    spec.winding_at_zero = winding_at_zero;

    std::vector<double> finite;
    for (const auto& r : spec.regions) {
        for (const auto& b : r.set.boxes) {
            if (b.reaches_zero() && r.winding != winding_at_zero)
                fail(ErrorKind::InvalidSpec, "a region reaching 0 must carry the winding prescribed at 0");
            if (b.reaches_infinity() && r.winding != 0)
                fail(ErrorKind::InvalidSpec, "a region reaching infinity must have winding 0");
            if (std::isfinite(b.rho_lo)) finite.push_back(b.rho_lo);
            if (std::isfinite(b.rho_hi)) finite.push_back(b.rho_hi);
        }
    }
    if (finite.empty()) {
        spec.rho_min_window = -kWindowPad;
        spec.rho_max_window = kWindowPad;
    } else {
        spec.rho_min_window = *std::min_element(finite.begin(), finite.end()) - kWindowPad;
        spec.rho_max_window = *std::max_element(finite.begin(), finite.end()) + kWindowPad;
    }

    for (std::size_t i = 0; i < spec.regions.size(); ++i)
        for (std::size_t j = i + 1; j < spec.regions.size(); ++j)
            if (spec.regions[i].winding != spec.regions[j].winding)
                spec.margin = std::min(spec.margin, set_distance(spec.regions[i].set, spec.regions[j].set));

    for (std::size_t i = 0; i < spec.regions.size(); ++i) {
        const auto& r = spec.regions[i];
        for (const auto& b : r.set.boxes)
            for (cplx p : detail::box_representatives(b, spec.rho_min_window, spec.rho_max_window))
                spec.probes.push_back({p, r.winding, "region " + std::to_string(i) + " (" + r.set.label + ")"});
    }
    spec.probes.push_back({spec.zero_proxy(), winding_at_zero, "zero-proxy"});
    spec.probes.push_back({spec.far_field(), 0, "far-field"});
    return spec;
}

/// Winding data of the generalized Hadamard cycle for S1 against T = z S2^-1 (or K S2^-1):
///   lambda(w) = -[w in S1] + [inf in cl S1]   on S1 u T,
///   lambda(0) = -[0 in cl S1] + [inf in cl S1].
inline WindingSpec hadamard_winding_spec_against(const StarSet& s1, const StarSet& t) {
    const int inf1 = s1.closure_has_inf() ? 1 : 0;
    const int zero1 = s1.closure_has_zero() ? 1 : 0;
    return make_winding_spec({{s1, -1 + inf1}, {t, inf1}}, -zero1 + inf1);
}

inline constexpr double kDefaultMargin = 1e-7;

inline WindingSpec hadamard_winding_spec(const StarSet& s1, const StarSet& s2, cplx z, double margin = kDefaultMargin) {
    if (!strongly_convolvable(s1, s2)) fail(ErrorKind::NotStronglyConvolvable, s1.label + " and " + s2.label);
    if (z == cplx(0.0, 0.0)) fail(ErrorKind::PreconditionViolated, "z must be nonzero");
    StarSet t = set_scale(z, set_inverse(s2));
    if (set_distance(s1, t) < 2.0 * margin)
        fail(ErrorKind::PointInProduct, "z lies in (or within the margin of) S1 S2");
    return hadamard_winding_spec_against(s1, t);
}

/// Cauchy / anti-Cauchy cycle kinds of the classical Hadamard-cycle table.
enum class PohlenKind { Cauchy, CauchyPlus, AntiCauchy, AntiCauchyMinus };

inline std::string_view to_string(PohlenKind k) {
    switch (k) {
        case PohlenKind::Cauchy: return "cc";
        case PohlenKind::CauchyPlus: return "cc+";
        case PohlenKind::AntiCauchy: return "acc";
        case PohlenKind::AntiCauchyMinus: return "acc-";
    }
    return "?";
}

/// Table lookup by which of {0, inf} lie in Omega_i = P^1 minus cl(S_i).
/// The ambiguous "cc+ or acc-" cell resolves to cc+ unless prefer_anti_cauchy is set.
inline PohlenKind pohlen_kind(const StarSet& s1, const StarSet& s2, bool prefer_anti_cauchy = false) {
    const bool z1 = !s1.closure_has_zero(), i1 = !s1.closure_has_inf();
    const bool z2 = !s2.closure_has_zero(), i2 = !s2.closure_has_inf();
    auto impossible = [] { fail(ErrorKind::TableCaseImpossible, "this (Omega1, Omega2) pattern cannot occur"); };
    if (z2 && i2) {
        if (z1 && i1) return prefer_anti_cauchy ? PohlenKind::AntiCauchyMinus : PohlenKind::CauchyPlus;
        if (i1) return PohlenKind::AntiCauchyMinus;
        if (z1) return PohlenKind::CauchyPlus;
        return PohlenKind::Cauchy;
    }
    if (i2) {
        if (i1) return PohlenKind::AntiCauchyMinus;
        impossible();
    }
    if (z2) {
        if (z1) return PohlenKind::CauchyPlus;
        impossible();
    }
    if (z1 && i1) return PohlenKind::AntiCauchy;
    impossible();
    return PohlenKind::Cauchy;
}

inline WindingSpec pohlen_winding_spec(const StarSet& s1, const StarSet& s2, cplx z, bool prefer_anti_cauchy = false,
                                       double margin = kDefaultMargin) {
    if (!strongly_convolvable(s1, s2)) fail(ErrorKind::NotStronglyConvolvable, s1.label + " and " + s2.label);
    PohlenKind kind = pohlen_kind(s1, s2, prefer_anti_cauchy);
    if (z == cplx(0.0, 0.0)) fail(ErrorKind::PreconditionViolated, "z must be nonzero");
    StarSet k = set_scale(z, set_inverse(s2));
    if (set_distance(s1, k) < 2.0 * margin) fail(ErrorKind::PointInProduct, "z lies in (or within the margin of) S1 S2");
    switch (kind) {
        case PohlenKind::Cauchy: return make_winding_spec({{s1, 0}, {k, 1}}, 0);
        case PohlenKind::CauchyPlus: return make_winding_spec({{s1, 0}, {k, 1}}, 1);
        case PohlenKind::AntiCauchy: return make_winding_spec({{s1, -1}, {k, 0}}, 0);
        case PohlenKind::AntiCauchyMinus: return make_winding_spec({{s1, -1}, {k, 0}}, -1);
    }
    return {};
}

// ---------------------------------------------------------------------------
// Certification
// ---------------------------------------------------------------------------

struct Violation {
    cplx point;
    int required = 0;
    std::optional<int> actual;  // empty when the probe sits on the cycle
    std::string tag;
};

struct CertifyReport {
    bool ok = true;
    std::size_t probes_checked = 0;
    std::vector<Violation> violations;
};

inline constexpr std::size_t kRingProbes = 64;

namespace detail {

/// Probes around the boundary of a box (clipped to the window), pushed outward by offset
/// on the sides that are true boundaries.
inline std::vector<cplx> ring_probes(const LogPolarBox& b, double rho_min, double rho_max, double offset) {
    double lo = b.reaches_zero() ? rho_min : b.rho_lo - offset;
    double hi = b.reaches_infinity() ? rho_max : b.rho_hi + offset;
    std::vector<cplx> pts;
    if (b.arc.is_full()) {
        const std::size_t half = kRingProbes / 2;
        for (std::size_t k = 0; k < half; ++k) {
            double t = kTwoPi * (double(k) + 0.37) / double(half);
            pts.push_back(std::polar(std::exp(lo), t));
            pts.push_back(std::polar(std::exp(hi), t));
        }
        return pts;
    }
    double t0 = b.arc.lo() - offset;
    double t1 = b.arc.hi() + offset;
    const std::size_t side = kRingProbes / 4;
    for (std::size_t k = 0; k < side; ++k) {
        double s = double(k) / double(side);
        pts.push_back(std::polar(std::exp(lo + s * (hi - lo)), t0));
        pts.push_back(std::polar(std::exp(hi), t0 + s * (t1 - t0)));
        pts.push_back(std::polar(std::exp(hi - s * (hi - lo)), t1));
        pts.push_back(std::polar(std::exp(lo), t1 - s * (t1 - t0)));
    }
    return pts;
}

}  // namespace detail

/// Checks the winding number at every WindingSpec probe plus a 64-probe ring around every region box.
inline CertifyReport certify(const Cycle& c, const WindingSpec& spec, double ring_offset = 0.0) {
    CertifyReport report;
    auto check = [&](cplx p, int required, const std::string& tag) {
        ++report.probes_checked;
        try {
            int actual = winding_number(c, p);
            if (actual != required) report.violations.push_back({p, required, actual, tag});
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::PointOnCycle) throw;
            report.violations.push_back({p, required, std::nullopt, tag});
        }
    };
    for (const auto& probe : spec.probes) check(probe.point, probe.required, probe.tag);
    for (std::size_t i = 0; i < spec.regions.size(); ++i) {
        const auto& r = spec.regions[i];
        for (const auto& b : r.set.boxes)
            for (cplx p : detail::ring_probes(b, spec.rho_min_window, spec.rho_max_window, ring_offset))
                check(p, r.winding, "ring of region " + std::to_string(i));
    }
    report.ok = report.violations.empty();
    return report;
}

// ---------------------------------------------------------------------------
// Synthesis
// ---------------------------------------------------------------------------

struct SynthesisOptions {
    double max_arc_step = kPi / 64.0;
    double eps_max = 0.1;
};

/// Largest admissible dilation: a quarter of the region separation, capped at eps_max.
inline double auto_eps(const WindingSpec& spec, const SynthesisOptions& opts = {}) {
    return std::min(opts.eps_max, 0.25 * spec.margin);
}

namespace detail {

inline Cycle build_cycle(const WindingSpec& spec, double eps, const SynthesisOptions& opts) {
    std::set<int> values;
    for (const auto& r : spec.regions)
        if (r.winding != 0) values.insert(r.winding);
    if (spec.winding_at_zero != 0) values.insert(spec.winding_at_zero);

    // Disk around 0 carrying the zero winding, grown up to just below the first obstacle.
    double rho_zero = -kInf;
    if (spec.winding_at_zero != 0) {
        double lowest = kInf;
        for (const auto& r : spec.regions) {
            if (r.winding == spec.winding_at_zero) continue;
            double gap = r.winding != 0 ? 2.0 * eps : eps;
            for (const auto& b : r.set.boxes) lowest = std::min(lowest, b.rho_lo - gap);
        }
        rho_zero = std::isfinite(lowest) ? lowest : std::max(std::log(eps), spec.rho_min_window - 0.5);
    }

    const double step = std::min(opts.max_arc_step, std::sqrt(2.0 * eps));
    Cycle cycle;
    for (int v : values) {
        std::vector<LogPolarBox> rects;
        for (const auto& r : spec.regions)
            if (r.winding == v)
                for (const auto& b : r.set.boxes) rects.push_back(box_dilate(b, eps));
        if (v == spec.winding_at_zero) rects.emplace_back(-kInf, rho_zero, Arc::full());
        CylinderGrid grid(rects);
        auto cov = grid.coverage(rects);
        for (const auto& loop : boundary_loops(grid, cov)) cycle.add(Path(loop_to_polyline(grid, loop, step)), v);
    }
    return cycle;
}

}  // namespace detail

/// Builds the cycle as signed boundaries of eps-dilated region clusters on the log-polar
/// cylinder (plus a disk around 0 when it needs nonzero winding), then certifies it.
/// Retries with eps/2 and eps/4 before giving up.
inline Cycle synthesize_cycle(const WindingSpec& spec, double eps, const SynthesisOptions& opts = {}) {
    if (!(eps > 0.0) || eps >= 0.5 * spec.margin)
        fail(ErrorKind::NoMargin, "eps must be positive and below half the region separation");
    double attempt = eps;
    for (int tries = 0; tries < 3; ++tries, attempt *= 0.5) {
        Cycle c = detail::build_cycle(spec, attempt, opts);
        if (certify(c, spec, 0.25 * attempt).ok) return c;
    }
    fail(ErrorKind::SynthesisFailed, "cycle failed certification after two eps halvings");
}

inline Cycle synthesize_cycle(const WindingSpec& spec, const SynthesisOptions& opts = {}) {
    if (!(spec.margin > 0.0)) fail(ErrorKind::NoMargin, "regions with different windings touch");
    return synthesize_cycle(spec, auto_eps(spec, opts), opts);
}

/// One cycle valid as a generalized Hadamard cycle for every z in the compact set K.
inline Cycle shared_cycle(const StarSet& s1, const StarSet& s2, const StarSet& k, double margin = kDefaultMargin,
                          const SynthesisOptions& opts = {}) {
    if (!strongly_convolvable(s1, s2)) fail(ErrorKind::NotStronglyConvolvable, s1.label + " and " + s2.label);
    if (!k.compact() || k.empty()) fail(ErrorKind::PreconditionViolated, "K must be a nonempty compact box union");
    StarSet t = set_product(k, set_inverse(s2));
    if (set_distance(s1, t) < 2.0 * margin) fail(ErrorKind::NoMargin, "K meets (or nearly meets) S1 S2");
    return synthesize_cycle(hadamard_winding_spec_against(s1, t), opts);
}

}  // namespace hadamard_kit
