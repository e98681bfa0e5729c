#include "monolab/grid.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace monolab {

double pairwise_sum(const std::vector<double>& v) {
    // cascade to keep rounding independent of accumulation chunking
    std::vector<double> acc = v;
    size_t m = acc.size();
    if (m == 0) return 0.0;
    while (m > 1) {
        size_t half = (m + 1) / 2;
        for (size_t i = 0; i < m / 2; ++i) acc[i] = acc[2 * i] + acc[2 * i + 1];
        if (m % 2 == 1) acc[m / 2] = acc[m - 1];
        m = half;
    }
    return acc[0];
}

double parallel_sum(std::int64_t count, const std::function<double(std::int64_t)>& term,
                    int threads) {
    if (count <= 0) return 0.0;
    const std::int64_t chunk = 8192;
    const std::int64_t nchunks = (count + chunk - 1) / chunk;
    std::vector<double> partial(size_t(nchunks), 0.0);

    int nthreads = threads > 0 ? threads : int(std::thread::hardware_concurrency());
    nthreads = std::max(1, std::min<int>(nthreads, 64));

    std::atomic<std::int64_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::int64_t c = next.fetch_add(1);
            if (c >= nchunks) break;
            const std::int64_t lo = c * chunk;
            const std::int64_t hi = std::min(count, lo + chunk);
            double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
            std::int64_t i = lo;
            for (; i + 3 < hi; i += 4) {
                s0 += term(i);
                s1 += term(i + 1);
                s2 += term(i + 2);
                s3 += term(i + 3);
            }
            for (; i < hi; ++i) s0 += term(i);
            partial[size_t(c)] = (s0 + s1) + (s2 + s3);
        }
    };

    if (nthreads == 1 || nchunks == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return pairwise_sum(partial);
}

namespace {

struct AxisBox {
    Vec3 center;
    double hw;
};

// Simpson weight of a node inside one 2-cell panel: position 0,1,2 -> 1,4,1
inline double panel_w(int pos) { return pos == 1 ? 4.0 : 1.0; }

// Node weight assembled from the panels incident to it that are kept.
// keep(IP, JP, KP) decides whether a panel survives (not cut out by a hole).
template <typename Keep>
double node_weight(int i, int j, int k, int n, const Keep& keep) {
    const int np = (n - 1) / 2;
    double w = 0;
    // panels along one axis touching node i: indices ceil((i-2)/2)..i/2 clipped
    auto range = [np](int idx, int& lo, int& hi) {
        lo = std::max(0, (idx - 2 + 1) / 2);  // ceil((i-2)/2)
        hi = std::min(np - 1, idx / 2);
        if (idx % 2 == 1) lo = hi = (idx - 1) / 2;  // interior-of-panel node
    };
    int ilo, ihi, jlo, jhi, klo, khi;
    range(i, ilo, ihi);
    range(j, jlo, jhi);
    range(k, klo, khi);
    for (int ip = ilo; ip <= ihi; ++ip)
        for (int jp = jlo; jp <= jhi; ++jp)
            for (int kp = klo; kp <= khi; ++kp) {
                if (!keep(ip, jp, kp)) continue;
                w += panel_w(i - 2 * ip) * panel_w(j - 2 * jp) * panel_w(k - 2 * kp);
            }
    return w;
}

}  // namespace

BoxQuadrature integrate_box(const Grid3& g, const std::function<double(const Vec3&)>& f,
                            int threads) {
    const int n = g.n;
    const double h = g.spacing();
    const double cell = h * h * h / 27.0;
    std::atomic<std::int64_t> masked_count{0};
    auto keep_all = [](int, int, int) { return true; };

    auto term = [&](std::int64_t idx) -> double {
        const int i = int(idx / (std::int64_t(n) * n));
        const int j = int((idx / n) % n);
        const int k = int(idx % n);
        const Vec3 p = g.point(i, j, k);
        if (g.masked(p)) {
            masked_count.fetch_add(1, std::memory_order_relaxed);
            return 0.0;
        }
        const double w = node_weight(i, j, k, n, keep_all);
        return w * f(p);
    };

    BoxQuadrature q;
    q.value = cell * parallel_sum(g.total_points(), term, threads);
    q.excluded_volume = double(masked_count.load()) * h * h * h;
    return q;
}

Grid3 snap_box(const Grid3& coarse, const Vec3& center, double half_width, int n_fine) {
    const double hc = coarse.spacing();
    const Vec3 origin = {coarse.center.x - coarse.half_width,
                         coarse.center.y - coarse.half_width,
                         coarse.center.z - coarse.half_width};
    // center on the even-index node lattice, half-width a whole number of panels
    auto snap_even = [&](double x, double o) {
        const double idx = (x - o) / hc;
        const double even = 2.0 * std::round(idx / 2.0);
        return o + even * hc;
    };
    Vec3 c = {snap_even(center.x, origin.x), snap_even(center.y, origin.y),
              snap_even(center.z, origin.z)};
    const double panels = std::max(1.0, std::ceil(half_width / (2.0 * hc) - 1e-9));
    const double hw = panels * 2.0 * hc;
    if (n_fine % 2 == 0) ++n_fine;
    return Grid3(c, hw, n_fine);
}

double integrate_composite(const CompositeGrid& grid,
                           const std::function<double(const Vec3&)>& f, int threads) {
    const Grid3& cg = grid.coarse;
    const int n = cg.n;
    const double h = cg.spacing();
    const double cell = h * h * h / 27.0;

    // a coarse panel is dropped iff fully inside some fine box
    auto panel_kept = [&](int ip, int jp, int kp) -> bool {
        const Vec3 pc = cg.point(2 * ip + 1, 2 * jp + 1, 2 * kp + 1);
        for (const Grid3& fb : grid.fine) {
            const double m = fb.half_width - h + 1e-9 * h;
            if (std::abs(pc.x - fb.center.x) <= m && std::abs(pc.y - fb.center.y) <= m &&
                std::abs(pc.z - fb.center.z) <= m)
                return false;
        }
        return true;
    };

    auto coarse_term = [&](std::int64_t idx) -> double {
        const int i = int(idx / (std::int64_t(n) * n));
        const int j = int((idx / n) % n);
        const int k = int(idx % n);
        const double w = node_weight(i, j, k, n, panel_kept);
        if (w == 0.0) return 0.0;
        const Vec3 p = cg.point(i, j, k);
        if (cg.masked(p)) return 0.0;
        return w * f(p);
    };

    std::vector<double> parts;
    parts.push_back(cell * parallel_sum(cg.total_points(), coarse_term, threads));
    for (const Grid3& fb : grid.fine)
        parts.push_back(integrate_box(fb, f, threads).value);
    return pairwise_sum(parts);
}

namespace {

// chunked deterministic reduction of a vector-valued weighted node sum
void multi_accumulate(const Grid3& g, int dim,
                      const std::function<double(int, int, int)>& weight,
                      const std::function<void(const Vec3&, double*)>& f, int threads,
                      std::vector<double>& out) {
    const int n = g.n;
    const std::int64_t count = g.total_points();
    const std::int64_t chunk = 8192;
    const std::int64_t nchunks = (count + chunk - 1) / chunk;
    std::vector<std::vector<double>> partial;
    partial.resize(size_t(nchunks));

    int nthreads = threads > 0 ? threads : int(std::thread::hardware_concurrency());
    nthreads = std::max(1, std::min(nthreads, 64));
    std::atomic<std::int64_t> next{0};

    auto worker = [&]() {
        std::vector<double> scratch(static_cast<size_t>(dim), 0.0);
        for (;;) {
            const std::int64_t c = next.fetch_add(1);
            if (c >= nchunks) break;
            std::vector<double> acc(static_cast<size_t>(dim), 0.0);
            const std::int64_t lo = c * chunk;
            const std::int64_t hi = std::min(count, lo + chunk);
            for (std::int64_t idx = lo; idx < hi; ++idx) {
                const int i = int(idx / (std::int64_t(n) * n));
                const int j = int((idx / n) % n);
                const int k = int(idx % n);
                const double w = weight(i, j, k);
                if (w == 0.0) continue;
                const Vec3 p = g.point(i, j, k);
                if (g.masked(p)) continue;
                f(p, scratch.data());
                for (int d = 0; d < dim; ++d) acc[size_t(d)] += w * scratch[size_t(d)];
            }
            partial[size_t(c)] = std::move(acc);
        }
    };

    if (nthreads == 1 || nchunks == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    const double cell = std::pow(g.spacing(), 3) / 27.0;
    for (int d = 0; d < dim; ++d) {
        std::vector<double> comp;
        comp.reserve(size_t(nchunks));
        for (const auto& pc : partial)
            comp.push_back(pc.empty() ? 0.0 : pc[size_t(d)]);
        out[size_t(d)] += cell * pairwise_sum(comp);
    }
}

}  // namespace

std::vector<double> integrate_composite_multi(
    const CompositeGrid& grid, int dim, const std::function<void(const Vec3&, double*)>& f,
    int threads) {
    const Grid3& cg = grid.coarse;
    const double h = cg.spacing();
    auto panel_kept = [&](int ip, int jp, int kp) -> bool {
        const Vec3 pc = cg.point(2 * ip + 1, 2 * jp + 1, 2 * kp + 1);
        for (const Grid3& fb : grid.fine) {
            const double m = fb.half_width - h + 1e-9 * h;
            if (std::abs(pc.x - fb.center.x) <= m && std::abs(pc.y - fb.center.y) <= m &&
                std::abs(pc.z - fb.center.z) <= m)
                return false;
        }
        return true;
    };

    std::vector<double> out(size_t(dim), 0.0);
    multi_accumulate(
        cg, dim,
        [&](int i, int j, int k) { return node_weight(i, j, k, cg.n, panel_kept); }, f,
        threads, out);
    auto keep_all = [](int, int, int) { return true; };
    for (const Grid3& fb : grid.fine)
        multi_accumulate(
            fb, dim, [&](int i, int j, int k) { return node_weight(i, j, k, fb.n, keep_all); },
            f, threads, out);
    return out;
}

}  // namespace monolab
