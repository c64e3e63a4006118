#pragma once

#include <vector>

#include "hadamard_kit/detail/cylinder_grid.hpp"
#include "hadamard_kit/sphere_sets.hpp"

namespace hadamard_kit {

/// Closure of A minus B, computed cell by cell on the induced cylinder grid.
/// Measure-zero parts of A (degenerate boxes) are dropped.
inline StarSet set_difference(const StarSet& a, const StarSet& b) {
    std::vector<LogPolarBox> all = a.boxes;
    all.insert(all.end(), b.boxes.begin(), b.boxes.end());
    detail::CylinderGrid grid(all);
    auto in_a = grid.coverage(a.boxes);
    auto in_b = grid.coverage(b.boxes);

    std::vector<LogPolarBox> out;
    const std::size_t nc = grid.cols();
    for (std::size_t i = 0; i < grid.rows(); ++i) {
        std::vector<char> keep(nc);
        bool any = false;
        bool all_kept = true;
        for (std::size_t j = 0; j < nc; ++j) {
            keep[j] = in_a[i][j] && !in_b[i][j];
            any = any || keep[j];
            all_kept = all_kept && keep[j];
        }
        if (!any) continue;
        if (all_kept) {
            out.emplace_back(grid.row_lo(i), grid.row_hi(i), Arc::full());
            continue;
        }
        // Start the run scan just after a dropped column so runs do not wrap.
        std::size_t start = 0;
        while (keep[start]) ++start;
        for (std::size_t step = 1; step <= nc; ++step) {
            std::size_t j = (start + step) % nc;
            if (!keep[j]) continue;
            double lo = grid.col_lo(j);
            double width = grid.col_hi(j) - lo;
            std::size_t k = (j + 1) % nc;
            while (keep[k] && step < nc) {
                width += grid.col_hi(k) - grid.col_lo(k);
                k = (k + 1) % nc;
                ++step;
            }
            out.emplace_back(grid.row_lo(i), grid.row_hi(i), Arc::interval(lo, width));
        }
    }
    return normalize(StarSet(std::move(out), "(" + a.label + ")\\(" + b.label + ")"));
}

}  // namespace hadamard_kit
