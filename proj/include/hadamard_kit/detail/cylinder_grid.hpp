#pragma once

// Rectilinear cell decomposition of the log-polar cylinder R x S^1 induced by a
// family of boxes. Used for set differences and for extracting the oriented
// boundary of a box union.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "hadamard_kit/sphere_sets.hpp"

namespace hadamard_kit::detail {

inline constexpr double kBreakMergeTol = 1e-12;

class CylinderGrid {
public:
    explicit CylinderGrid(const std::vector<LogPolarBox>& boxes, const std::vector<double>& extra_theta = {}) {
        for (const auto& b : boxes) {
            if (std::isfinite(b.rho_lo)) rho_.push_back(b.rho_lo);
            if (std::isfinite(b.rho_hi)) rho_.push_back(b.rho_hi);
            if (!b.arc.is_full()) {
                theta_.push_back(wrap_angle(b.arc.lo()));
                theta_.push_back(wrap_angle(b.arc.hi()));
            }
        }
        for (double t : extra_theta) theta_.push_back(wrap_angle(t));
        for (double t : {0.0, 0.5 * kPi, kPi, 1.5 * kPi}) theta_.push_back(t);
        merge_sorted(rho_);
        merge_sorted(theta_);
        if (theta_.size() > 1 && theta_.back() > kTwoPi - kBreakMergeTol) theta_.pop_back();
    }

    /// Rows: 0 = (-inf, b0], i = [b_{i-1}, b_i], last = [b_last, +inf).
    std::size_t rows() const { return rho_.size() + 1; }
    std::size_t cols() const { return theta_.size(); }

    const std::vector<double>& rho_lines() const { return rho_; }
    const std::vector<double>& theta_lines() const { return theta_; }

    double row_lo(std::size_t i) const { return i == 0 ? -kInf : rho_[i - 1]; }
    double row_hi(std::size_t i) const { return i == rho_.size() ? kInf : rho_[i]; }
    bool row_finite(std::size_t i) const { return i > 0 && i < rho_.size(); }

    double row_probe(std::size_t i) const {
        if (rho_.empty()) return 0.0;
        if (i == 0) return rho_.front() - 1.0;
        if (i == rho_.size()) return rho_.back() + 1.0;
        return 0.5 * (rho_[i - 1] + rho_[i]);
    }

    double col_lo(std::size_t j) const { return theta_[j]; }
    double col_hi(std::size_t j) const { return j + 1 == theta_.size() ? theta_[0] + kTwoPi : theta_[j + 1]; }
    double col_probe(std::size_t j) const { return 0.5 * (col_lo(j) + col_hi(j)); }

    /// covered[i][j] is true when cell (i, j) lies inside some box.
    std::vector<std::vector<char>> coverage(const std::vector<LogPolarBox>& boxes) const {
        std::vector<std::vector<char>> cov(rows(), std::vector<char>(cols(), 0));
        for (std::size_t i = 0; i < rows(); ++i) {
            double rho = row_probe(i);
            for (std::size_t j = 0; j < cols(); ++j) {
                double theta = col_probe(j);
                for (const auto& b : boxes) {
                    if (b.rho_lo <= rho && rho <= b.rho_hi && b.arc.distance(theta) <= 0.0) {
                        cov[i][j] = 1;
                        break;
                    }
                }
            }
        }
        return cov;
    }

private:
    static void merge_sorted(std::vector<double>& v) {
        std::sort(v.begin(), v.end());
        std::vector<double> out;
        for (double x : v)
            if (out.empty() || x - out.back() > kBreakMergeTol) out.push_back(x);
        v = std::move(out);
    }

    std::vector<double> rho_;
    std::vector<double> theta_;
};

/// Oriented grid edge between two grid vertices (rho line index, theta line index).
struct GridEdge {
    std::size_t r0, c0, r1, c1;
    bool along_theta;
    std::size_t column;  // for theta edges: the column swept
    bool theta_increasing;
};

/// Oriented boundary of the covered cells, region on the left in (rho, theta),
/// which maps to counter-clockwise-positive orientation in C. Returns closed loops.
inline std::vector<std::vector<GridEdge>> boundary_loops(const CylinderGrid& g,
                                                         const std::vector<std::vector<char>>& cov) {
    const std::size_t nr = g.rows();
    const std::size_t nc = g.cols();
    std::vector<GridEdge> edges;
    for (std::size_t k = 0; k + 1 < nr; ++k) {
        for (std::size_t j = 0; j < nc; ++j) {
            bool lower = cov[k][j] != 0;
            bool upper = cov[k + 1][j] != 0;
            if (lower == upper) continue;
            std::size_t ja = j;
            std::size_t jb = (j + 1) % nc;
            if (lower) edges.push_back({k, ja, k, jb, true, j, true});
            else edges.push_back({k, jb, k, ja, true, j, false});
        }
    }
    for (std::size_t i = 0; i < nr; ++i) {
        for (std::size_t j = 0; j < nc; ++j) {
            std::size_t jn = (j + 1) % nc;
            bool left = cov[i][j] != 0;
            bool right = cov[i][jn] != 0;
            if (left == right) continue;
            if (!g.row_finite(i))
                fail(ErrorKind::SynthesisFailed, "region boundary would run to 0 or infinity along a ray");
            if (right) edges.push_back({i - 1, jn, i, jn, false, 0, false});
            else edges.push_back({i, jn, i - 1, jn, false, 0, false});
        }
    }

    std::multimap<std::pair<std::size_t, std::size_t>, std::size_t> outgoing;
    for (std::size_t e = 0; e < edges.size(); ++e) outgoing.emplace(std::make_pair(edges[e].r0, edges[e].c0), e);
    std::vector<char> used(edges.size(), 0);
    std::vector<std::vector<GridEdge>> loops;
    for (std::size_t start = 0; start < edges.size(); ++start) {
        if (used[start]) continue;
        std::vector<GridEdge> loop;
        std::size_t cur = start;
        const auto origin = std::make_pair(edges[start].r0, edges[start].c0);
        while (true) {
            used[cur] = 1;
            loop.push_back(edges[cur]);
            auto at = std::make_pair(edges[cur].r1, edges[cur].c1);
            if (at == origin) break;
            std::size_t next = edges.size();
            auto range = outgoing.equal_range(at);
            for (auto it = range.first; it != range.second; ++it) {
                if (!used[it->second]) {
                    next = it->second;
                    break;
                }
            }
            if (next == edges.size()) fail(ErrorKind::SynthesisFailed, "unbalanced boundary edge graph");
            cur = next;
        }
        loops.push_back(std::move(loop));
    }
    return loops;
}

/// Maps a grid loop into C through (rho, theta) -> exp(rho + i theta); constant-rho edges
/// become circular arcs discretized at <= max_step radians per chord.
inline std::vector<std::complex<double>> loop_to_polyline(const CylinderGrid& g, const std::vector<GridEdge>& loop,
                                                          double max_step) {
    std::vector<std::complex<double>> pts;
    const auto& rl = g.rho_lines();
    for (const auto& e : loop) {
        double rho = rl[e.r0];
        if (e.along_theta) {
            double a = g.col_lo(e.column);
            double b = g.col_hi(e.column);
            if (!e.theta_increasing) std::swap(a, b);
            auto n = static_cast<std::size_t>(std::ceil(std::abs(b - a) / max_step));
            n = std::max<std::size_t>(n, 1);
            double r = std::exp(rho);
            for (std::size_t s = 0; s < n; ++s) pts.push_back(std::polar(r, a + (b - a) * double(s) / double(n)));
        } else {
            pts.push_back(std::polar(std::exp(rho), g.theta_lines()[e.c0]));
        }
    }
    return pts;
}

}  // namespace hadamard_kit::detail
