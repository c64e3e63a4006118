#pragma once

// Adaptive Gauss-Kronrod (G7/K15) integration of complex integrands along the
// straight segments of a Cycle.

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hadamard_kit/cycles.hpp"
#include "hadamard_kit/errors.hpp"

namespace hadamard_kit {

struct QuadResult {
    cplx value{0.0, 0.0};
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
};

struct QuadOptions {
    double tol = 1e-10;
    int max_depth = 24;
};

namespace detail {

// Kronrod abscissae (positive half, descending) and weights; Gauss weights sit on the odd nodes.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                              0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    cplx kronrod;
    double error;
    double abs_integral;
};

/// One K15 panel over the straight segment [a, b] (including the jacobian), with the
/// QUADPACK-style scaled error estimate.
template <class G>
Panel gk15(G& g, cplx a, cplx b, std::size_t& evals) {
    const cplx mid = 0.5 * (a + b);
    const cplx half = 0.5 * (b - a);
    const double hl = std::abs(half);
    std::array<cplx, 15> f{};
    f[14] = g(mid);
    for (int j = 0; j < 7; ++j) {
        f[2 * j] = g(mid - half * kXgk[j]);
        f[2 * j + 1] = g(mid + half * kXgk[j]);
    }
    evals += 15;
    cplx k = kWgk[7] * f[14];
    cplx gs = kWg[3] * f[14];
    double absk = kWgk[7] * std::abs(f[14]);
    for (int j = 0; j < 7; ++j) {
        k += kWgk[j] * (f[2 * j] + f[2 * j + 1]);
        absk += kWgk[j] * (std::abs(f[2 * j]) + std::abs(f[2 * j + 1]));
        if (j % 2 == 1) gs += kWg[j / 2] * (f[2 * j] + f[2 * j + 1]);
    }
    const cplx mean = 0.5 * k;
    double asc = kWgk[7] * std::abs(f[14] - mean);
    for (int j = 0; j < 7; ++j) asc += kWgk[j] * (std::abs(f[2 * j] - mean) + std::abs(f[2 * j + 1] - mean));
    asc *= hl;
    double err = std::abs((k - gs) * half);
    if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    const double abs_int = absk * hl;
    err = std::max(err, 50.0 * DBL_EPSILON * abs_int);
    return {k * half, err, abs_int};
}

inline std::string point_text(cplx z) {
    std::ostringstream os;
    os.precision(17);
    os << "(" << z.real() << ", " << z.imag() << ")";
    return os.str();
}

}  // namespace detail

/// Sum over terms of multiplicity times the path integral of g(zeta) dzeta.
/// Globally adaptive: the panel with the largest weighted error is bisected until the
/// total estimate meets tol. Each segment is integrated in a canonical direction so a
/// reversed path gives negated panel values.
template <class G>
QuadResult integrate_cycle(G&& g, const Cycle& c, const QuadOptions& opts = {}) {
    struct Item {
        cplx a, b;
        std::size_t term, segment;
        bool flip;
        int depth;
        detail::Panel panel;
        double weight;
        double weighted_error() const { return weight * panel.error; }
    };
    QuadResult res;
    std::vector<Item> items;

    auto evaluate = [&](Item& it) {
        auto guarded = [&](cplx zeta) -> cplx {
            cplx val;
            try {
                val = g(zeta);
            } catch (const Error& e) {
                fail(ErrorKind::IntegrandFailure, "term " + std::to_string(it.term) + " segment " +
                                                      std::to_string(it.segment) +
                                                      " at zeta=" + detail::point_text(zeta) + ": " + e.what());
            }
            if (!std::isfinite(val.real()) || !std::isfinite(val.imag()))
                fail(ErrorKind::IntegrandFailure, "non-finite integrand on term " + std::to_string(it.term) +
                                                      " segment " + std::to_string(it.segment) +
                                                      " at zeta=" + detail::point_text(zeta));
            return val;
        };
        it.panel = detail::gk15(guarded, it.a, it.b, res.evaluations);
    };

    for (std::size_t t = 0; t < c.terms.size(); ++t) {
        const auto& term = c.terms[t];
        const auto& v = term.path.vertices();
        for (std::size_t i = 0; i < v.size(); ++i) {
            cplx a = v[i];
            cplx b = v[(i + 1) % v.size()];
            bool flip = std::make_pair(b.real(), b.imag()) < std::make_pair(a.real(), a.imag());
            if (flip) std::swap(a, b);
            Item it{a, b, t, i, flip, 0, {}, double(std::abs(term.multiplicity))};
            evaluate(it);
            items.push_back(it);
        }
    }

    auto by_error = [&](std::size_t x, std::size_t y) { return items[x].weighted_error() < items[y].weighted_error(); };
    std::vector<std::size_t> heap(items.size());
    for (std::size_t i = 0; i < heap.size(); ++i) heap[i] = i;
    std::make_heap(heap.begin(), heap.end(), by_error);
    double total = 0.0;
    for (const auto& it : items) total += it.weighted_error();

    while (total > opts.tol && !heap.empty()) {
        std::pop_heap(heap.begin(), heap.end(), by_error);
        std::size_t idx = heap.back();
        heap.pop_back();
        Item cur = items[idx];
        if (cur.panel.error <= 50.0 * DBL_EPSILON * cur.panel.abs_integral * 1.0000001) continue;  // roundoff-limited
        if (cur.depth >= opts.max_depth)
            fail(ErrorKind::ToleranceNotMet, "panel bisection depth exhausted on term " + std::to_string(cur.term) +
                                                 " segment " + std::to_string(cur.segment));
        cplx m = 0.5 * (cur.a + cur.b);
        Item left = cur, right = cur;
        left.b = m;
        right.a = m;
        left.depth = right.depth = cur.depth + 1;
        evaluate(left);
        evaluate(right);
        total += left.weighted_error() + right.weighted_error() - cur.weighted_error();
        items[idx] = left;
        items.push_back(right);
        heap.push_back(idx);
        std::push_heap(heap.begin(), heap.end(), by_error);
        heap.push_back(items.size() - 1);
        std::push_heap(heap.begin(), heap.end(), by_error);
    }

    // Sum leaves segment by segment in path order.
    std::vector<std::size_t> order(items.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const auto& p = items[x];
        const auto& q = items[y];
        if (p.term != q.term) return p.term < q.term;
        if (p.segment != q.segment) return p.segment < q.segment;
        return std::make_pair(p.a.real(), p.a.imag()) < std::make_pair(q.a.real(), q.a.imag());
    });
    for (std::size_t i : order) {
        const auto& it = items[i];
        cplx val = it.flip ? -it.panel.kronrod : it.panel.kronrod;
        res.value += double(c.terms[it.term].multiplicity) * val;
        res.error_estimate += it.weighted_error();
    }
    return res;
}

template <class G>
QuadResult integrate_cycle(G&& g, const Cycle& c, double tol) {
    QuadOptions opts;
    opts.tol = tol;
    return integrate_cycle(std::forward<G>(g), c, opts);
}

/// Integral over a discretized circle (inscribed polygon, max_step radians per chord).
template <class G>
QuadResult circle_integral(G&& g, cplx center, double radius, int orientation = 1, double tol = 1e-10,
                           double max_step = kPi / 64.0) {
    if (!(radius > 0.0)) fail(ErrorKind::PreconditionViolated, "circle radius must be positive");
    Cycle c;
    c.add(circle_path(center, radius, orientation, max_step), 1);
    return integrate_cycle(std::forward<G>(g), c, tol);
}

}  // namespace hadamard_kit
