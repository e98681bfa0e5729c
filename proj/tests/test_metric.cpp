#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "monolab/bps.hpp"
#include "monolab/linear_model.hpp"
#include "monolab/metric.hpp"

using namespace monolab;
using namespace monolab::preglue;
using namespace monolab::metric;

namespace {

GramOptions fast_opts() {
    GramOptions o;
    o.coarse_n = 101;
    o.fine_n = 61;
    return o;
}

}  // namespace

TEST_CASE("single cluster: Gram reduces to 2 pi I4") {
    ClusterSpec s = ClusterSpec::make({{1, 0, 0}}, {1}, 1.0, 0.1);
    Pregluing p = build_pregluing(s, SpliceLayout{});
    VariationBasis b = variation_basis(p);
    REQUIRE(b.size() == 4);
    GramReport g = gram(b, p, fast_opts());
    for (size_t a = 0; a < 4; ++a)
        for (size_t bb = 0; bb < 4; ++bb) {
            const double want = (a == bb) ? 2.0 * M_PI : 0.0;
            CHECK(std::abs(g.at(a, bb) - want) < 0.01 * 2.0 * M_PI);
        }
    CHECK(g.min_eigenvalue > 0);
}

TEST_CASE("basis matches the exact tangents near a single cluster") {
    ClusterSpec s = ClusterSpec::make({{1, 0, 0}}, {1}, 1.0, 0.1);
    Pregluing p = build_pregluing(s, SpliceLayout{});
    VariationBasis b = variation_basis(p);
    auto bg = bps::bps_field(s.center_z(0), 1.0);
    for (int comp = 0; comp < 4; ++comp) {
        TangentField tau = linear::moduli_tangent(bg, comp, 1e-3);
        // inside the core the basis is the exact tangent
        for (const Vec3 off : {Vec3{0.4, 0.1, 0}, Vec3{0, -0.8, 0.5}}) {
            const Vec3 z = s.center_z(0) + off;
            const GaugeContext ctx = p.impl->context_at(z);
            const TangentValue want = tau(z);
            const TangentValue got = b.eval(size_t(comp), z, ctx);
            double diff = norm(want.phi - got.phi);
            for (int l = 0; l < 3; ++l) diff += norm(want.a[l] - got.a[l]);
            CHECK(diff < 1e-6);
        }
        // outside the splice the basis is the abelian model, which the exact
        // tangent approaches exponentially (gauge-invariant magnitudes)
        const Vec3 z = s.center_z(0) + Vec3{0, 1.3 * p.impl->r_out(), 0};
        const GaugeContext ctx = p.impl->context_at(z);
        const double mag_model = std::sqrt(norm2(b.eval(size_t(comp), z, ctx)));
        const double mag_exact = std::sqrt(norm2(tau(z)));
        CHECK(std::abs(mag_model - mag_exact) <
              2.0 * std::exp(-2.0 * p.impl->r_in()) + 1e-8);
    }
}

TEST_CASE("two clusters: block structure at eps = 0.05") {
    ClusterSpec s = ClusterSpec::make({{1, 0, 0}, {-1, 0, 0}}, {1, 1}, 1.0, 0.05);
    Pregluing p = build_pregluing(s, SpliceLayout{});
    VariationBasis b = variation_basis(p);
    GramReport g = gram(b, p, fast_opts());

    CHECK(g.block_dev_max < std::max(0.02, 3.0 * s.epsilon));
    CHECK(g.off_block_max < 0.5 * s.epsilon * 2.0 * M_PI);
    CHECK(g.symmetry_error < 1e-10 * 2.0 * M_PI);
    CHECK(g.min_eigenvalue > 0);

    // the leading off-block entry is the abelian interaction pi eps / sqrt(2)
    const double predicted = M_PI * s.epsilon / std::sqrt(2.0);
    CHECK(g.off_block_max == doctest::Approx(predicted).epsilon(0.03));

    // hyperkahler-compatible isotropy: diagonal entries agree within C eps
    for (size_t j = 0; j < 2; ++j) {
        const double d0 = g.at(4 * j, 4 * j);
        for (size_t c = 1; c < 4; ++c)
            CHECK(std::abs(g.at(4 * j + c, 4 * j + c) - d0) < 0.02 * d0);
    }
}

TEST_CASE("halving eps halves the off-block coupling") {
    ClusterSpec s1 = ClusterSpec::make({{1, 0, 0}, {-1, 0, 0}}, {1, 1}, 1.0, 0.1);
    ClusterSpec s2 = s1;
    s2.epsilon = 0.05;
    GramOptions o = fast_opts();
    Pregluing p1 = build_pregluing(s1, SpliceLayout{});
    Pregluing p2 = build_pregluing(s2, SpliceLayout{});
    const double off1 = gram(variation_basis(p1), p1, o).off_block_max;
    const double off2 = gram(variation_basis(p2), p2, o).off_block_max;
    CHECK(off2 / off1 < 0.7);
}

TEST_CASE("mass scaling multiplies the Gram by the mass") {
    ClusterSpec s = ClusterSpec::make({{1, 0, 0}}, {1}, 2.0, 0.1);
    Pregluing p = build_pregluing(s, SpliceLayout{});
    GramReport g = gram(variation_basis(p), p, fast_opts());
    for (size_t a = 0; a < 4; ++a)
        CHECK(g.at(a, a) == doctest::Approx(2.0 * 2.0 * M_PI).epsilon(0.02));
}

TEST_CASE("global rotation of the configuration leaves the deviations") {
    GramOptions o;
    o.coarse_n = 81;
    o.fine_n = 41;
    ClusterSpec s = ClusterSpec::make({{1, 0, 0}, {-1, 0, 0}}, {1, 1}, 1.0, 0.05);
    const double c = std::cos(0.5), sn = std::sin(0.5);
    ClusterSpec sr = ClusterSpec::make({{c, sn, 0}, {-c, -sn, 0}}, {1, 1}, 1.0, 0.05);
    Pregluing p = build_pregluing(s, SpliceLayout{});
    Pregluing pr = build_pregluing(sr, SpliceLayout{});
    GramReport g = gram(variation_basis(p), p, o);
    GramReport gr = gram(variation_basis(pr), pr, o);
    CHECK(std::abs(gr.off_block_max - g.off_block_max) < 0.02 * g.off_block_max + 1e-4);
    CHECK(std::abs(gr.block_dev_max - g.block_dev_max) < 0.01);
}

TEST_CASE("variations are approximately Coulomb in the interstitial region") {
    ClusterSpec s = ClusterSpec::make({{1, 0, 0}, {-1, 0, 0}}, {1, 1}, 1.0, 0.05);
    Pregluing p = build_pregluing(s, SpliceLayout{});
    VariationBasis b = variation_basis(p);
    const std::vector<Vec3> pts = {{0, 3, 0}, {0, 0, 6}, {5, 5, 5}, {8, -2, 1}};
    for (size_t e = 0; e < b.size(); ++e)
        CHECK(coulomb_defect(b, e, p, pts) < 0.1 * s.epsilon);
}

TEST_CASE("translation variation decays away from its cluster") {
    ClusterSpec s = ClusterSpec::make({{1, 0, 0}, {-1, 0, 0}}, {1, 1}, 1.0, 0.05);
    Pregluing p = build_pregluing(s, SpliceLayout{});
    VariationBasis b = variation_basis(p);
    // outside its R_out ball only the O(eps)-scale abelian tail remains
    const Vec3 z = s.center_z(1) + Vec3{0, 2.0, 0};  // deep in the other cluster zone
    const GaugeContext ctx = p.impl->context_at(z);
    const double mag = std::sqrt(norm2(b.eval(1, z, ctx)));
    const double tail_scale =
        dirac::kappa / norm2(z - s.center_z(0));  // ~ amp / r^2
    CHECK(mag < 3.0 * tail_scale);
    CHECK(mag > 0.2 * tail_scale);
}

TEST_CASE("metric sweep fits the off-block decay rate") {
    GramOptions o;
    o.coarse_n = 81;
    o.fine_n = 41;
    ClusterSpec s = ClusterSpec::make({{1, 0, 0}, {-1, 0, 0}}, {1, 1}, 1.0, 0.1);
    auto res = metric_sweep(s, {0.1, 0.05, 0.025}, SpliceLayout{}, o);
    REQUIRE(res.rows.size() == 3);
    CHECK(res.off_block_fit.slope == doctest::Approx(1.0).epsilon(0.25));
    CHECK(res.off_block_fit.r2 > 0.98);
    CHECK_THROWS_AS(metric_sweep(s, {0.1, 0.05}, SpliceLayout{}, o), Error);
}

TEST_CASE("centre of the glued field tracks the charge-weighted mean") {
    {
        ClusterSpec s = ClusterSpec::make({{1, 0, 0}, {-1, 0, 0}}, {1, 1}, 1.0, 0.05);
        Pregluing p = build_pregluing(s, SpliceLayout{});
        const auto rep = centre_sum_check(p);
        CHECK(norm(rep.fitted_centre) < 0.05 / s.epsilon);
    }
    {
        ClusterSpec s = ClusterSpec::make({{1.2, 0.3, 0}, {-0.8, 0, 0.1}}, {1, 1}, 1.0, 0.05);
        Pregluing p = build_pregluing(s, SpliceLayout{});
        const auto rep = centre_sum_check(p);
        CHECK(rep.mismatch < 0.01 * std::max(1.0, norm(rep.charge_weighted_mean)));
    }
    {
        ClusterSpec s = ClusterSpec::make({{0.6, -0.3, 0.2}}, {1}, 1.0, 0.1);
        Pregluing p = build_pregluing(s, SpliceLayout{});
        const auto rep = centre_sum_check(p);
        CHECK(rep.mismatch < 0.01 * norm(s.center_z(0)));
    }
}
