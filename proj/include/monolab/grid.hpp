// Uniform box grids with Simpson weights, point masks, and a composite
// multi-resolution quadrature (fine cluster boxes cut out of a coarse box,
// edges snapped to panel boundaries so Simpson stays valid piecewise).
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "monolab/su2.hpp"

namespace monolab {

struct Ball {
    Vec3 center;
    double radius = 0;
};

struct Grid3 {
    Vec3 center;
    double half_width = 1.0;
    int n = 3;  // points per axis, odd
    std::vector<Ball> excluded;

    Grid3() = default;
    Grid3(const Vec3& c, double hw, int n_pts) : center(c), half_width(hw), n(n_pts) {
        if (n < 3 || n % 2 == 0)
            throw Error(Err::ConfigParse, "Grid3: n must be odd and >= 3");
        if (hw <= 0) throw Error(Err::ConfigParse, "Grid3: half_width must be positive");
    }

    double spacing() const { return 2.0 * half_width / (n - 1); }

    Vec3 point(int i, int j, int k) const {
        const double h = spacing();
        return {center.x - half_width + i * h, center.y - half_width + j * h,
                center.z - half_width + k * h};
    }

    bool masked(const Vec3& p) const {
        for (const auto& b : excluded)
            if (norm2(p - b.center) < b.radius * b.radius) return true;
        return false;
    }

    std::int64_t total_points() const {
        return std::int64_t(n) * n * n;
    }
};

// 1D Simpson weight for index i on an n-point (n odd) uniform grid, times h/3
inline double simpson_w(int i, int n) {
    if (i == 0 || i == n - 1) return 1.0;
    return (i % 2 == 1) ? 4.0 : 2.0;
}

// Integrates f over the box, skipping masked points (their cells count as
// excluded volume).  Deterministic ordered accumulation.
struct BoxQuadrature {
    double value = 0;
    double excluded_volume = 0;
};

BoxQuadrature integrate_box(const Grid3& g, const std::function<double(const Vec3&)>& f,
                            int threads = 0);

// Composite quadrature: a coarse box plus disjoint fine boxes.  Fine boxes
// are integrated with their own Simpson rule; the coarse integrand is zeroed
// on panels covered by a fine box.  Callers should align fine-box edges with
// coarse panel boundaries (see snap_box) to keep the seam second order.
struct CompositeGrid {
    Grid3 coarse;
    std::vector<Grid3> fine;

    bool in_fine(const Vec3& p, int skip = -1) const {
        for (size_t b = 0; b < fine.size(); ++b) {
            if (int(b) == skip) continue;
            const Grid3& f = fine[b];
            if (std::abs(p.x - f.center.x) < f.half_width &&
                std::abs(p.y - f.center.y) < f.half_width &&
                std::abs(p.z - f.center.z) < f.half_width)
                return true;
        }
        return false;
    }
};

// Snap a requested box (center, half-width) onto the coarse panel lattice.
Grid3 snap_box(const Grid3& coarse, const Vec3& center, double half_width, int n_fine);

double integrate_composite(const CompositeGrid& grid,
                           const std::function<double(const Vec3&)>& f, int threads = 0);

// Same quadrature, vector-valued integrand: f(p, out) writes `dim` components.
std::vector<double> integrate_composite_multi(
    const CompositeGrid& grid, int dim,
    const std::function<void(const Vec3&, double*)>& f, int threads = 0);

// Deterministic chunked parallel map-reduce over [0, count).  The chunk
// decomposition and the combination order are fixed, so results do not
// depend on the thread count.
double parallel_sum(std::int64_t count, const std::function<double(std::int64_t)>& term,
                    int threads = 0);

// Pairwise (cascade) sum of a vector, deterministic.
double pairwise_sum(const std::vector<double>& v);

}  // namespace monolab
