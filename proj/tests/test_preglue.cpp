#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "monolab/bps.hpp"
#include "monolab/preglue.hpp"

using namespace monolab;
using namespace monolab::preglue;

namespace {

ClusterSpec antipodal(double eps, double mass = 1.0) {
    return ClusterSpec::make({{1, 0, 0}, {-1, 0, 0}}, {1, 1}, mass, eps);
}

}  // namespace

TEST_CASE("cluster spec normalization and validation") {
    ClusterSpec s = antipodal(0.1);
    double q = 0;
    for (const Vec3& z : s.zetas) q += norm2(z);
    CHECK(q == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.min_separation == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(ClusterSpec::make({{0, 0, 0}}, {1}, 1.0, 0.1), Error);
    CHECK_THROWS_AS(ClusterSpec::make({{1, 0, 0}, {1, 0, 0}}, {1, 1}, 1.0, 0.1), Error);
    CHECK_THROWS_AS(ClusterSpec::make({{1, 0, 0}}, {2}, 1.0, 0.1), Error);
}

TEST_CASE("cutoff profile is monotone with flat ends") {
    CHECK(smoothstep_down(-0.5) == 1.0);
    CHECK(smoothstep_down(1.5) == 0.0);
    CHECK(smoothstep_down(0.5) == doctest::Approx(0.5));
    double prev = 1.0;
    for (int i = 1; i <= 20; ++i) {
        const double v = smoothstep_down(i / 20.0);
        CHECK(v <= prev + 1e-15);
        prev = v;
    }
}

TEST_CASE("degenerate single cluster: the splice reproduces the exact field") {
    ClusterSpec s = ClusterSpec::make({{1, 0, 0}}, {1}, 1.0, 0.1);
    SpliceLayout layout;
    Pregluing p = build_pregluing(s, layout);
    const Vec3 z1 = s.center_z(0);

    // interstitial residual: only the exponential tail mismatch survives
    double worst = 0;
    for (const Vec3 off : {Vec3{1.3, 0.2, 0}, Vec3{0, 1.4, 0.3}, Vec3{-1.2, 0, 0.7}}) {
        const Vec3 z = z1 + off * p.impl->r_out();
        worst = std::max(worst, p.impl->residual_at(z, 1e-3));
    }
    CHECK(worst < std::exp(-p.impl->r_in()) + 1e-5);

    // core region residual equals the exact-field floor
    CHECK(p.impl->residual_at(z1 + Vec3{0.3, 0.1, 0}, 1e-3) < 1e-5);

    // |Phi| matches the isolated monopole everywhere sampled
    auto exact = bps::bps_field(z1, 1.0);
    for (const Vec3 off : {Vec3{0.5, 0, 0}, Vec3{0, 3.0, 0}, Vec3{5.0, 4.0, 1.0}}) {
        const Vec3 z = z1 + off;
        CHECK(std::abs(norm(p.field.higgs(z)) - norm(exact.higgs(z))) < 2e-3);
    }
}

TEST_CASE("two clusters: regions, context, continuity across the splice") {
    ClusterSpec s = antipodal(0.1);
    SpliceLayout layout;
    Pregluing p = build_pregluing(s, layout);
    const Vec3 z1 = s.center_z(0);

    CHECK(p.impl->region_of(z1) == Region::Core);
    CHECK(p.impl->region_of(z1 + Vec3{0, 0.6 * p.impl->r_out(), 0}) == Region::Annulus);
    CHECK(p.impl->region_of({0, 0, 0}) == Region::Interstitial);
    CHECK(p.impl->region_of({0, 0, 3.0 / s.epsilon}) == Region::Far);

    // the Higgs magnitude is continuous through the annulus (gauge invariant)
    const Vec3 dir = normalized(Vec3{0.3, 0.8, 0.52});
    double prev = -1;
    for (double r = 0.5 * p.impl->r_in(); r < 1.3 * p.impl->r_out(); r += 0.08) {
        const Vec3 z = z1 + dir * r;
        const double v = norm(p.field.higgs(z));
        if (prev >= 0) CHECK(std::abs(v - prev) < 0.05);
        prev = v;
    }
}

TEST_CASE("interstitial connection is diagonal; off-diagonal is exponentially small") {
    ClusterSpec s = antipodal(0.05);
    SpliceLayout layout;
    Pregluing p = build_pregluing(s, layout);
    const Su2 q = bps::diag_direction();
    double worst = 0;
    for (const Vec3 z : {Vec3{0, 2, 0}, Vec3{0, 0, 5}, Vec3{3, 3, 3},
                         Vec3{0.6 / s.epsilon, 2, 2}}) {
        const GaugeContext ctx = p.impl->context_at(z);
        if (ctx.core >= 0) continue;
        for (const Su2& ai : p.impl->potential(z, ctx)) {
            auto [d0, d1] = split(ai, q);
            worst = std::max(worst, norm(d1));
        }
        auto [p0, p1] = split(p.impl->higgs(z, ctx), q);
        worst = std::max(worst, norm(p1));
    }
    CHECK(worst < std::exp(-p.impl->r_in()));
}

TEST_CASE("annulus: abelianized cluster data and the Dirac field are close") {
    ClusterSpec s = antipodal(0.05);
    SpliceLayout layout;
    Pregluing p = build_pregluing(s, layout);
    const Vec3 z1 = s.center_z(0);
    const Su2 q = bps::diag_direction();

    // compare the diagonal parts of the two splice constituents mid-annulus
    const Vec3 dir = normalized(Vec3{0, 0.6, 0.8});
    const Vec3 z = z1 + dir * (0.5 * (p.impl->r_in() + p.impl->r_out()));
    const GaugeContext ctx = p.impl->context_at(z);

    const SuGroup g = p.impl->cluster_rotation(0, z, ctx);
    auto bpsf = bps::bps_field(z1, s.mass);
    const Su2 phi_b = ad_action(g, bpsf.higgs(z));
    const auto& dspec = p.impl->interstitial_spec();
    const Su2 phi_d = q * (s.mass - dirac::kappa / norm(z - dspec.poles[0].z) -
                           dirac::kappa / norm(z - dspec.poles[1].z));
    CHECK(norm(phi_b - phi_d) < 2.0 * s.epsilon + std::exp(-p.impl->r_in()));

    // and the potentials: abelianized cluster connection vs the summed Dirac
    // potential, componentwise within C (e^{-R_in} + eps)
    const SuGroup gi = conjugate(g);
    const SuTriple ab = bpsf.potential(z);
    const double hstep = 1e-5;
    double worst = 0;
    for (int i = 0; i < 3; ++i) {
        const Vec3 dz = axis_vec(i) * hstep;
        const SuGroup gp = p.impl->cluster_rotation(0, z + dz, ctx);
        const SuGroup gm = p.impl->cluster_rotation(0, z - dz, ctx);
        const SuGroup d{(gp.w - gm.w) / (2 * hstep), (gp.v - gm.v) / (2 * hstep)};
        const Su2 a_b = ad_action(g, ab[i]) - su2_part(d * gi);
        Su2 a_d;
        for (size_t pl = 0; pl < dspec.poles.size(); ++pl)
            a_d += q * dirac::one_pole_potential(dspec.poles[pl].z, dspec.poles[pl].k,
                                                 ctx.strings[pl], z)[i];
        worst = std::max(worst, norm(a_b - a_d));
    }
    CHECK(worst < 2.0 * (std::exp(-p.impl->r_in()) + s.epsilon));
}

TEST_CASE("total boundary charge from the large-sphere Higgs flux") {
    ClusterSpec s = antipodal(0.1);
    SpliceLayout layout;
    Pregluing p = build_pregluing(s, layout);
    CHECK(std::abs(large_sphere_charge(p) - 2.0) < 1e-4);
}

TEST_CASE("phases do not move gauge-invariant data") {
    ClusterSpec s0 = antipodal(0.1);
    ClusterSpec s1 = ClusterSpec::make({{1, 0, 0}, {-1, 0, 0}}, {1, 1}, 1.0, 0.1,
                                       {1.3, -0.4});
    SpliceLayout layout;
    Pregluing p0 = build_pregluing(s0, layout);
    Pregluing p1 = build_pregluing(s1, layout);
    for (const Vec3 z : {Vec3{0, 1, 0}, s0.center_z(0) + Vec3{0.4, 0.2, 0},
                         s0.center_z(0) + Vec3{0, 0.7 * p0.impl->r_out(), 0}}) {
        CHECK(std::abs(norm(p0.field.higgs(z)) - norm(p1.field.higgs(z))) < 1e-10);
        CHECK(std::abs(p0.impl->residual_at(z, 1e-3) - p1.impl->residual_at(z, 1e-3)) <
              2e-5);
    }
}

TEST_CASE("layout validation: overlap and string collisions are rejected") {
    ClusterSpec s = antipodal(0.1);
    SpliceLayout bad;
    bad.r_out_factor = 0.6;  // exceeds half the separation
    CHECK_THROWS_AS(build_pregluing(s, bad), Error);
}

TEST_CASE("uncorrected interstitial Higgs is covariantly constant") {
    ClusterSpec s = antipodal(0.1);
    Pregluing naive = build_pregluing(s, SpliceLayout{}, HiggsCorrection::None);
    MonopoleField f;
    struct Ctxmap : FieldMap {
        std::shared_ptr<const PregluedField> impl;
        GaugeContext ctx;
        Su2 higgs(const Vec3& q) const override { return impl->higgs(q, ctx); }
        SuTriple potential(const Vec3& q) const override { return impl->potential(q, ctx); }
    };
    for (const Vec3 z : {Vec3{0, 2, 0}, Vec3{0, 0, 6}, Vec3{4, 4, 4}}) {
        auto cm = std::make_shared<Ctxmap>();
        cm->impl = naive.impl;
        cm->ctx = naive.impl->context_at(z);
        f.map = cm;
        f.mass = 1.0;
        double worst = 0;
        for (int i = 0; i < 3; ++i)
            worst = std::max(worst, norm(covariant_derivative(f, z, i, 1e-4)));
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("naive vs corrected: interstitial residual magnitudes") {
    ClusterSpec s = antipodal(0.1);
    SpliceLayout layout;
    Pregluing naive = build_pregluing(s, layout, HiggsCorrection::None);
    Pregluing corr = build_pregluing(s, layout, HiggsCorrection::FirstOrder);

    // near the splice boundary the naive field sees the uncancelled abelian
    // curvature ~ kappa/r^2; the corrected field is exact there
    const Vec3 z = s.center_z(0) + Vec3{0, 1.05 * naive.impl->r_out(), 0};
    const double rn = naive.impl->residual_at(z, 1e-3);
    const double rc = corr.impl->residual_at(z, 1e-3);
    const double expect = dirac::kappa / std::pow(1.05 * naive.impl->r_out(), 2);
    CHECK(rn > 0.3 * expect);
    CHECK(rn < 3.0 * expect);
    CHECK(rc < 1e-6);
}

TEST_CASE("gm curvature form: flux pairing, antisymmetry, closedness") {
    ClusterSpec s = ClusterSpec::make({{1, 0, 0}, {-0.6, 0.7, 0.2}, {0.1, -0.8, 0.5}},
                                      {1, 1, 1}, 1.0, 0.05);
    GmCurvatureForm f = gm_curvature_form(s, 0);

    // flux of the j-around-i sphere is k_i under the pinned normalization
    CHECK(std::abs(gm_flux(f, 1, 0.12) - 1.0) < 1e-5);
    CHECK(std::abs(gm_flux(f, 2, 0.10) - 1.0) < 1e-5);

    // eta_ij = -eta_ji as evaluators
    auto eta = [&](size_t i, size_t j, const ConfigTangent& U, const ConfigTangent& V) {
        return sphere_form(s.zetas[i] - s.zetas[j], U[i] - U[j], V[i] - V[j]);
    };
    ConfigTangent U(3), V(3);
    U[0] = {0.3, -0.1, 0.7};
    U[1] = {-0.2, 0.5, 0.1};
    U[2] = {0.9, 0.2, -0.3};
    V[0] = {0.1, 0.8, -0.5};
    V[1] = {0.4, -0.6, 0.2};
    V[2] = {-0.7, 0.3, 0.6};
    CHECK(eta(0, 1, U, V) == doctest::Approx(-eta(1, 0, U, V)).epsilon(1e-14));

    // numeric exterior derivative vanishes at the h^2 level
    ConfigTangent W(3);
    W[0] = {0.2, 0.1, -0.4};
    W[1] = {-0.5, 0.3, 0.8};
    W[2] = {0.1, -0.9, 0.2};
    CHECK(std::abs(gm_exterior_derivative(f, U, V, W, 1e-4)) < 1e-6);

    CHECK_THROWS_AS(gm_flux(f, 0, 0.1), Error);
}

TEST_CASE("the correction never slows any region's residual decay") {
    ClusterSpec s = antipodal(0.1);
    ResidualScanOptions opt;
    opt.grid_n = 61;
    const auto res = residual_orders(s, {0.1, 0.05, 0.025}, SpliceLayout{}, opt);
    for (int reg = 0; reg < 4; ++reg) {
        for (const std::string kind : {"sup", "sup_over_eps", "l2"}) {
            double naive = 0, corrected = 0;
            bool have_n = false, have_c = false;
            for (const auto& f : res.fits) {
                if (int(f.region) != reg || f.norm_kind != kind) continue;
                if (f.correction == HiggsCorrection::None) {
                    naive = f.fit.slope;
                    have_n = true;
                } else {
                    corrected = f.fit.slope;
                    have_c = true;
                }
            }
            if (!(have_n && have_c)) continue;
            INFO("region ", reg, " kind ", kind);
            CHECK(corrected >= naive - 0.05);
        }
    }
    // and the corrected norms themselves never exceed the naive ones
    for (size_t i = 0; i < res.points.size() / 2; ++i) {
        const auto& naive_pt = res.points[i];
        const auto& corr_pt = res.points[i + res.points.size() / 2];
        for (size_t r = 0; r < naive_pt.norms.size(); ++r)
            CHECK(corr_pt.norms[r].sup <= naive_pt.norms[r].sup * 1.001 + 1e-12);
    }
}

TEST_CASE("log-log fitting machinery") {
    // exact power law comes back with r2 = 1
    std::vector<double> xs = {0.1, 0.05, 0.025}, ys;
    for (double x : xs) ys.push_back(3.0 * x * x);
    const SlopeFit f = fit_loglog(xs, ys);
    CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(fit_loglog({0.1}, {1.0}), Error);
}
