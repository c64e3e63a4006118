#pragma once

// Riemann-sphere arithmetic and a calculus of closed subsets of C* stored as
// finite unions of log-polar boxes. Multiplication on C* is addition in
// (log|z|, arg z), so products, inverses and rescalings of box unions are exact.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "hadamard_kit/errors.hpp"

namespace hadamard_kit {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kArcTol = 1e-12;
inline constexpr double kDefaultMembershipTol = 1e-9;

/// Reduces an angle to [0, 2pi).
inline double wrap_angle(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    if (t >= kTwoPi - 1e-15) t = 0.0;
    return t;
}

/// Shortest distance between two angles on the circle.
inline double circular_distance(double a, double b) {
    double d = wrap_angle(a - b);
    return std::min(d, kTwoPi - d);
}

// ---------------------------------------------------------------------------
// SpherePoint
// ---------------------------------------------------------------------------

struct Infinity {
    friend bool operator==(Infinity, Infinity) { return true; }
};

/// A point of P^1 = C u {inf}. Infinity is its own alternative, never a large float.
class SpherePoint {
public:
    SpherePoint(cplx v) : value_(v) {}  // NOLINT(google-explicit-constructor)
    SpherePoint(double v) : value_(cplx(v, 0.0)) {}  // NOLINT(google-explicit-constructor)
    SpherePoint(Infinity) : value_(Infinity{}) {}  // NOLINT(google-explicit-constructor)

    static SpherePoint infinity() { return SpherePoint(Infinity{}); }

    bool is_infinity() const { return std::holds_alternative<Infinity>(value_); }
    bool is_zero() const { return !is_infinity() && std::get<cplx>(value_) == cplx(0.0, 0.0); }

    cplx value() const {
        if (is_infinity()) fail(ErrorKind::PreconditionViolated, "SpherePoint::value on infinity");
        return std::get<cplx>(value_);
    }

    friend bool operator==(const SpherePoint& a, const SpherePoint& b) { return a.value_ == b.value_; }

private:
    std::variant<cplx, Infinity> value_;
};

/// Multiplication extended to M = P^1 x P^1 minus {(0,inf), (inf,0)}.
inline SpherePoint ext_mul(const SpherePoint& a, const SpherePoint& b) {
    if ((a.is_zero() && b.is_infinity()) || (a.is_infinity() && b.is_zero()))
        fail(ErrorKind::UndefinedProduct, "0 * inf is outside the domain of the extended product");
    if (a.is_infinity() || b.is_infinity()) return SpherePoint::infinity();
    return SpherePoint(a.value() * b.value());
}

inline SpherePoint sphere_inv(const SpherePoint& a) {
    if (a.is_infinity()) return SpherePoint(cplx(0.0, 0.0));
    if (a.is_zero()) return SpherePoint::infinity();
    return SpherePoint(1.0 / a.value());
}

// ---------------------------------------------------------------------------
// Arc
// ---------------------------------------------------------------------------

/// Angular footprint: either the whole circle or a closed interval of width < 2pi.
class Arc {
public:
    static Arc full() { return Arc(); }

    static Arc interval(double theta_lo, double width) {
        if (width < 0.0) fail(ErrorKind::PreconditionViolated, "arc width must be non-negative");
        if (width >= kTwoPi - kArcTol) return full();
        Arc a;
        a.full_ = false;
        a.lo_ = wrap_angle(theta_lo);
        a.width_ = width;
        return a;
    }

    static Arc point(double theta) { return interval(theta, 0.0); }

    bool is_full() const { return full_; }
    double lo() const { return full_ ? 0.0 : lo_; }
    double width() const { return full_ ? kTwoPi : width_; }
    double hi() const { return lo() + width(); }

    /// Angular distance from theta to the arc (0 inside).
    double distance(double theta) const {
        if (full_) return 0.0;
        double d = wrap_angle(theta - lo_);
        if (d <= width_) return 0.0;
        return std::min(d - width_, kTwoPi - d);
    }

    bool contains(double theta, double tol = kArcTol) const { return distance(theta) <= tol; }

    /// Minkowski sum on the circle; saturates to the full circle.
    Arc operator+(const Arc& other) const {
        if (full_ || other.full_) return full();
        return interval(lo_ + other.lo_, width_ + other.width_);
    }

    Arc negated() const { return full_ ? full() : interval(-lo_ - width_, width_); }
    Arc rotated(double phi) const { return full_ ? full() : interval(lo_ + phi, width_); }
    Arc dilated(double delta) const { return full_ ? full() : interval(lo_ - delta, width_ + 2.0 * delta); }

    /// Circular gap between two arcs (0 when they meet).
    friend double arc_gap(const Arc& a, const Arc& b) {
        if (a.full_ || b.full_) return 0.0;
        double ab = wrap_angle(b.lo_ - a.lo_);
        double ba = wrap_angle(a.lo_ - b.lo_);
        if (ab <= a.width_ + kArcTol || ba <= b.width_ + kArcTol) return 0.0;
        return std::max(0.0, std::min(ab - a.width_, ba - b.width_));
    }

    friend bool approx_equal(const Arc& a, const Arc& b, double tol) {
        if (a.full_ != b.full_) return false;
        if (a.full_) return true;
        return circular_distance(a.lo_, b.lo_) <= tol && std::abs(a.width_ - b.width_) <= tol;
    }

private:
    Arc() = default;
    bool full_ = true;
    double lo_ = 0.0;
    double width_ = 0.0;
};

// ---------------------------------------------------------------------------
// LogPolarBox
// ---------------------------------------------------------------------------

/// Extended-real sum where -inf + finite = -inf and +inf + finite = +inf.
/// Mixed infinities are rejected by the callers.
inline double ext_add(double a, double b) { return a + b; }

/// {z in C* : rho_lo <= log|z| <= rho_hi, arg z in arc}. Never contains 0 or inf.
struct LogPolarBox {
    double rho_lo = 0.0;
    double rho_hi = 0.0;
    Arc arc = Arc::full();

    LogPolarBox() = default;
    LogPolarBox(double lo, double hi, Arc a) : rho_lo(lo), rho_hi(hi), arc(a) {
        if (std::isnan(lo) || std::isnan(hi) || lo > hi || lo == kInf || hi == -kInf)
            fail(ErrorKind::PreconditionViolated, "log-polar box needs -inf <= rho_lo <= rho_hi <= +inf");
    }

    bool reaches_zero() const { return rho_lo == -kInf; }
    bool reaches_infinity() const { return rho_hi == kInf; }
    bool bounded() const { return !reaches_zero() && !reaches_infinity(); }

    double rho_gap(double rho) const {
        if (rho < rho_lo) return rho_lo - rho;
        if (rho > rho_hi) return rho - rho_hi;
        return 0.0;
    }

    /// Distance in the cylinder metric from (rho, theta).
    double distance(double rho, double theta) const { return std::hypot(rho_gap(rho), arc.distance(theta)); }

    double distance(cplx z) const { return distance(std::log(std::abs(z)), std::arg(z)); }
};

inline LogPolarBox box_product(const LogPolarBox& a, const LogPolarBox& b) {
    if ((a.reaches_zero() && b.reaches_infinity()) || (a.reaches_infinity() && b.reaches_zero()))
        fail(ErrorKind::IndeterminateProduct, "box product would require 0 * inf");
    return LogPolarBox(ext_add(a.rho_lo, b.rho_lo), ext_add(a.rho_hi, b.rho_hi), a.arc + b.arc);
}

inline LogPolarBox box_inverse(const LogPolarBox& b) { return LogPolarBox(-b.rho_hi, -b.rho_lo, b.arc.negated()); }

inline LogPolarBox box_scale(cplx z, const LogPolarBox& b) {
    double shift = std::log(std::abs(z));
    return LogPolarBox(b.rho_lo + shift, b.rho_hi + shift, b.arc.rotated(std::arg(z)));
}

inline LogPolarBox box_dilate(const LogPolarBox& b, double delta) {
    double lo = b.reaches_zero() ? -kInf : b.rho_lo - delta;
    double hi = b.reaches_infinity() ? kInf : b.rho_hi + delta;
    return LogPolarBox(lo, hi, b.arc.dilated(delta));
}

/// Cylinder-metric distance between two boxes.
inline double box_distance(const LogPolarBox& a, const LogPolarBox& b) {
    double rgap = 0.0;
    if (a.rho_hi < b.rho_lo) rgap = b.rho_lo - a.rho_hi;
    else if (b.rho_hi < a.rho_lo) rgap = a.rho_lo - b.rho_hi;
    return std::hypot(rgap, arc_gap(a.arc, b.arc));
}

inline bool approx_equal(const LogPolarBox& a, const LogPolarBox& b, double tol) {
    auto close = [tol](double x, double y) { return x == y || std::abs(x - y) <= tol; };
    return close(a.rho_lo, b.rho_lo) && close(a.rho_hi, b.rho_hi) && approx_equal(a.arc, b.arc, tol);
}

/// Finite rho range used when a box must be sampled or drawn; infinite ends are clipped
/// `pad` units beyond the finite end (or to [-pad, pad] for a doubly infinite box).
inline std::pair<double, double> clipped_rho(const LogPolarBox& b, double pad = 4.0) {
    double lo = b.rho_lo;
    double hi = b.rho_hi;
    if (b.reaches_zero() && b.reaches_infinity()) return {-pad, pad};
    if (b.reaches_zero()) lo = hi - pad;
    if (b.reaches_infinity()) hi = lo + pad;
    return {lo, hi};
}

/// Point of the box with parameters (u, v) in [0,1]^2 over its clipped rectangle.
inline cplx box_sample(const LogPolarBox& b, double u, double v, double pad = 4.0) {
    auto [lo, hi] = clipped_rho(b, pad);
    double rho = lo + u * (hi - lo);
    double theta = b.arc.lo() + v * (b.arc.is_full() ? kTwoPi : b.arc.width());
    return std::polar(std::exp(rho), theta);
}

// ---------------------------------------------------------------------------
// StarSet
// ---------------------------------------------------------------------------

/// Closed subset of C* as a finite union of log-polar boxes.
struct StarSet {
    std::vector<LogPolarBox> boxes;
    std::string label;

    StarSet() = default;
    StarSet(std::vector<LogPolarBox> b, std::string l = {}) : boxes(std::move(b)), label(std::move(l)) {}

    bool empty() const { return boxes.empty(); }

    /// 0 lies in the closure in P^1.
    bool closure_has_zero() const {
        return std::any_of(boxes.begin(), boxes.end(), [](const LogPolarBox& b) { return b.reaches_zero(); });
    }

    /// inf lies in the closure in P^1.
    bool closure_has_inf() const {
        return std::any_of(boxes.begin(), boxes.end(), [](const LogPolarBox& b) { return b.reaches_infinity(); });
    }

    /// Every box has finite rho range, i.e. the set is compact in C*.
    bool compact() const {
        return std::all_of(boxes.begin(), boxes.end(), [](const LogPolarBox& b) { return b.bounded(); });
    }
};

/// Sorts boxes and merges those with identical arcs and overlapping rho ranges.
inline StarSet normalize(const StarSet& s) {
    std::vector<LogPolarBox> boxes = s.boxes;
    auto key = [](const LogPolarBox& b) {
        return std::make_tuple(b.arc.is_full(), b.arc.lo(), b.arc.width(), b.rho_lo, b.rho_hi);
    };
    std::sort(boxes.begin(), boxes.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
    std::vector<LogPolarBox> out;
    for (const auto& b : boxes) {
        if (!out.empty()) {
            auto& last = out.back();
            if (approx_equal(last.arc, b.arc, kArcTol) && b.rho_lo <= last.rho_hi + kArcTol &&
                last.rho_lo <= b.rho_hi + kArcTol) {
                last.rho_lo = std::min(last.rho_lo, b.rho_lo);
                last.rho_hi = std::max(last.rho_hi, b.rho_hi);
                continue;
            }
        }
        out.push_back(b);
    }
    return StarSet(std::move(out), s.label);
}

inline bool approx_equal(const StarSet& a, const StarSet& b, double tol = 1e-9) {
    StarSet na = normalize(a);
    StarSet nb = normalize(b);
    if (na.boxes.size() != nb.boxes.size()) return false;
    std::vector<bool> used(nb.boxes.size(), false);
    for (const auto& x : na.boxes) {
        bool found = false;
        for (std::size_t j = 0; j < nb.boxes.size(); ++j) {
            if (!used[j] && approx_equal(x, nb.boxes[j], tol)) {
                used[j] = true;
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

inline StarSet set_union(const StarSet& a, const StarSet& b, std::string label = {}) {
    std::vector<LogPolarBox> boxes = a.boxes;
    boxes.insert(boxes.end(), b.boxes.begin(), b.boxes.end());
    return StarSet(std::move(boxes), label.empty() ? a.label + " u " + b.label : std::move(label));
}

/// Exact product {z1 z2}: union of pairwise box products.
inline StarSet set_product(const StarSet& s1, const StarSet& s2) {
    std::vector<LogPolarBox> boxes;
    boxes.reserve(s1.boxes.size() * s2.boxes.size());
    for (const auto& a : s1.boxes)
        for (const auto& b : s2.boxes) boxes.push_back(box_product(a, b));
    return normalize(StarSet(std::move(boxes), "(" + s1.label + ")(" + s2.label + ")"));
}

inline StarSet set_inverse(const StarSet& s) {
    std::vector<LogPolarBox> boxes;
    boxes.reserve(s.boxes.size());
    for (const auto& b : s.boxes) boxes.push_back(box_inverse(b));
    return StarSet(std::move(boxes), "(" + s.label + ")^-1");
}

inline StarSet set_scale(cplx z, const StarSet& s) {
    if (z == cplx(0.0, 0.0)) fail(ErrorKind::PreconditionViolated, "set_scale needs a nonzero factor");
    std::vector<LogPolarBox> boxes;
    boxes.reserve(s.boxes.size());
    for (const auto& b : s.boxes) boxes.push_back(box_scale(z, b));
    return StarSet(std::move(boxes), "z(" + s.label + ")");
}

/// Cylinder distance from z to S (infinite for the empty set).
inline double set_distance(const StarSet& s, cplx z) {
    double rho = std::log(std::abs(z));
    double theta = std::arg(z);
    double best = kInf;
    for (const auto& b : s.boxes) best = std::min(best, b.distance(rho, theta));
    return best;
}

/// Cylinder distance between two sets (infinite if either is empty).
inline double set_distance(const StarSet& a, const StarSet& b) {
    double best = kInf;
    for (const auto& x : a.boxes)
        for (const auto& y : b.boxes) best = std::min(best, box_distance(x, y));
    return best;
}

inline bool set_contains(const StarSet& s, cplx z, double tol = kDefaultMembershipTol) {
    if (z == cplx(0.0, 0.0)) fail(ErrorKind::PreconditionViolated, "membership is only defined on C*");
    return set_distance(s, z) <= tol;
}

namespace detail {

/// True when the closed arcs cover the whole circle.
inline bool arcs_cover_circle(const std::vector<Arc>& arcs) {
    std::vector<std::pair<double, double>> pieces;
    for (const auto& a : arcs) {
        if (a.is_full()) return true;
        double lo = a.lo();
        double hi = lo + a.width();
        if (hi <= kTwoPi) {
            pieces.emplace_back(lo, hi);
        } else {
            pieces.emplace_back(lo, kTwoPi);
            pieces.emplace_back(0.0, hi - kTwoPi);
        }
    }
    std::sort(pieces.begin(), pieces.end());
    double reach = 0.0;
    for (const auto& [lo, hi] : pieces) {
        if (lo > reach + kArcTol) return false;
        reach = std::max(reach, hi);
    }
    return reach >= kTwoPi - kArcTol;
}

}  // namespace detail

/// Exact slab sweep: the set is proper iff some rho slab (or breakpoint line) is not
/// fully covered in angle.
inline bool is_proper(const StarSet& s) {
    if (s.empty()) return true;
    std::vector<double> breaks;
    for (const auto& b : s.boxes) {
        if (std::isfinite(b.rho_lo)) breaks.push_back(b.rho_lo);
        if (std::isfinite(b.rho_hi)) breaks.push_back(b.rho_hi);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    std::vector<double> samples;
    if (breaks.empty()) {
        samples.push_back(0.0);
    } else {
        samples.push_back(breaks.front() - 1.0);
        for (std::size_t i = 0; i < breaks.size(); ++i) {
            samples.push_back(breaks[i]);
            if (i + 1 < breaks.size()) samples.push_back(0.5 * (breaks[i] + breaks[i + 1]));
        }
        samples.push_back(breaks.back() + 1.0);
    }
    for (double rho : samples) {
        std::vector<Arc> arcs;
        for (const auto& b : s.boxes)
            if (b.rho_lo <= rho && rho <= b.rho_hi) arcs.push_back(b.arc);
        if (!detail::arcs_cover_circle(arcs)) return true;
    }
    return false;
}

/// No box of one set reaches 0 while a box of the other reaches inf (closure product inside M).
inline bool closures_in_m(const StarSet& s1, const StarSet& s2) {
    return !((s1.closure_has_zero() && s2.closure_has_inf()) || (s1.closure_has_inf() && s2.closure_has_zero()));
}

inline bool star_eligible(const StarSet& s1, const StarSet& s2) {
    if (!closures_in_m(s1, s2)) return false;
    if (!is_proper(s1) || !is_proper(s2)) return false;
    return is_proper(set_product(s1, s2));
}

/// Within box unions, S1 n K S2^-1 is compact for every compact K exactly when no box pair
/// runs off to 0 and inf in opposite directions.
inline bool convolvable(const StarSet& s1, const StarSet& s2) { return closures_in_m(s1, s2); }

inline bool strongly_convolvable(const StarSet& s1, const StarSet& s2) {
    return convolvable(s1, s2) && star_eligible(s1, s2);
}

/// Box dilation by delta in rho (finite ends only) and in angle.
inline StarSet thicken(const StarSet& s, double delta) {
    if (!(delta > 0.0)) fail(ErrorKind::PreconditionViolated, "thicken needs delta > 0");
    std::vector<LogPolarBox> boxes;
    boxes.reserve(s.boxes.size());
    for (const auto& b : s.boxes) boxes.push_back(box_dilate(b, delta));
    return StarSet(std::move(boxes), "thicken(" + s.label + ")");
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

namespace presets {

/// Ray {r e^{i angle} : r >= r0}.
inline StarSet ray(double angle, double r0) {
    return StarSet({LogPolarBox(std::log(r0), kInf, Arc::point(angle))}, "ray");
}

/// Segment {r e^{i angle} : 0 < r <= r0}.
inline StarSet segment0(double angle, double r0) {
    return StarSet({LogPolarBox(-kInf, std::log(r0), Arc::point(angle))}, "segment0");
}

inline StarSet point(cplx p) {
    double rho = std::log(std::abs(p));
    return StarSet({LogPolarBox(rho, rho, Arc::point(std::arg(p)))}, "point");
}

/// C* minus the open disk D(0, s).
inline StarSet disk_complement(double s) {
    return StarSet({LogPolarBox(std::log(s), kInf, Arc::full())}, "disk_complement");
}

/// Closed punctured disk 0 < |z| <= t.
inline StarSet punctured_disk(double t) {
    return StarSet({LogPolarBox(-kInf, std::log(t), Arc::full())}, "punctured_disk");
}

/// Closed annulus r1 <= |z| <= r2.
inline StarSet annulus(double r1, double r2) {
    return StarSet({LogPolarBox(std::log(r1), std::log(r2), Arc::full())}, "annulus");
}

}  // namespace presets

}  // namespace hadamard_kit
