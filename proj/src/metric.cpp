#include "monolab/metric.hpp"

#include <cmath>

#include "monolab/bps.hpp"
#include "monolab/linear_model.hpp"

namespace monolab {
namespace metric {

namespace {

// exact moduli tangent of the (phased) hedgehog at `center`, in its own gauge
TangentValue hedgehog_tangent(const Vec3& center, double mass, double phase, int component,
                              const Vec3& z) {
    TangentValue v;
    const SuTriple grad = bps::bps_covariant_gradient(center, mass, z);
    if (component == 0) {
        for (int i = 0; i < 3; ++i) v.a[i] = -grad[i];
        v.phi = Su2();
    } else {
        const int e = component - 1;
        const SuTriple sF = bps::bps_curvature(center, mass, z);
        // (iota_e F)_l = eps_{elm} (*F)_m
        for (int l = 0; l < 3; ++l) {
            Su2 s;
            for (int m = 0; m < 3; ++m) {
                if (m == e || m == l || e == l) continue;
                const double sign = ((l - e + 3) % 3 == 1) ? 1.0 : -1.0;
                s += sF[m] * sign;
            }
            v.a[l] = s;
        }
        v.phi = grad[e];
    }
    if (phase != 0.0) {
        // tangents transform adjointly under the framing gauge action
        const Vec3 w = z - center;
        const double r = norm(w);
        if (r > 1e-14) {
            const double s = 2.0 * mass * r;
            const Su2 phi_bg = Su2(w * (-mass * bps::higgs_profile(s) / r));
            const SuGroup g = su2_exp(phi_bg * phase);
            for (int i = 0; i < 3; ++i) v.a[i] = ad_action(g, v.a[i]);
            v.phi = ad_action(g, v.phi);
        }
    }
    return v;
}

}  // namespace

TangentValue VariationBasis::eval(size_t e, const Vec3& z,
                                  const preglue::GaugeContext& ctx) const {
    const Element& el = elements[e];
    const auto& spec = field->spec();
    const Vec3 zj = spec.center_z(el.cluster);
    const double mass = spec.mass;
    const double phase = spec.phases[el.cluster];

    if (ctx.core == int(el.cluster)) {
        return hedgehog_tangent(zj, mass, phase, el.component, z);
    }

    TangentValue model = tail_model_value(el.tail, z);
    if (ctx.core >= 0) {
        // express the abelian-gauge model in the host cluster's hedgehog gauge
        const Vec3 host = spec.center_z(size_t(ctx.core));
        if (norm(z - host) < 0.15)  // direction unresolved within a cell of the centre
            return model;
        const SuGroup g = field->cluster_rotation(size_t(ctx.core), z, ctx);
        const SuGroup gi = conjugate(g);
        for (int i = 0; i < 3; ++i) model.a[i] = ad_action(gi, model.a[i]);
        model.phi = ad_action(gi, model.phi);
        return model;
    }

    // abelian context: blend the rotated exact tangent with the pole model
    const double chi = field->cluster_chi(el.cluster, z);
    if (chi <= 0.0) return model;
    const SuGroup g = field->cluster_rotation(el.cluster, z, ctx);
    TangentValue exact = hedgehog_tangent(zj, mass, phase, el.component, z);
    for (int i = 0; i < 3; ++i) exact.a[i] = ad_action(g, exact.a[i]);
    exact.phi = ad_action(g, exact.phi);
    return exact * chi + model * (1.0 - chi);
}

VariationBasis variation_basis(const preglue::Pregluing& p) {
    VariationBasis b;
    b.field = p.impl;
    const auto& spec = p.spec;
    for (size_t j = 0; j < spec.zetas.size(); ++j) {
        for (int comp = 0; comp < 4; ++comp) {
            VariationBasis::Element el;
            el.cluster = j;
            el.component = comp;
            el.tail.pole = spec.center_z(j);
            el.tail.amplitude = dirac::kappa * spec.charges[j];
            el.tail.su2_dir = bps::diag_direction();
            if (comp == 0) {
                el.tail.kind = AbelianTailModel::Kind::PhaseOfPole;
            } else {
                el.tail.kind = AbelianTailModel::Kind::TranslationOfPole;
                el.tail.direction = comp - 1;
            }
            b.elements.push_back(el);
        }
    }
    return b;
}

GramReport gram(const VariationBasis& basis, const preglue::Pregluing& p,
                const GramOptions& opt) {
    const size_t nf = basis.size();
    const size_t npairs = nf * nf;
    const auto& spec = p.spec;

    double zmax = 0;
    for (size_t j = 0; j < spec.zetas.size(); ++j)
        zmax = std::max(zmax, norm(spec.center_z(j)));
    const double Wc = opt.box_margin * (zmax + p.impl->r_out());

    CompositeGrid cg;
    cg.coarse = Grid3({0, 0, 0}, Wc, opt.coarse_n | 1);
    for (size_t j = 0; j < spec.zetas.size(); ++j)
        cg.fine.push_back(
            snap_box(cg.coarse, spec.center_z(j), opt.fine_half_width, opt.fine_n | 1));

    const double L = Wc;  // inscribed sphere; exterior handled analytically
    auto integrand = [&](const Vec3& z, double* out) {
        if (norm2(z) > L * L) {
            for (size_t q = 0; q < npairs; ++q) out[q] = 0.0;
            return;
        }
        const preglue::GaugeContext ctx = basis.field->context_at(z);
        std::vector<TangentValue> vals(nf);
        for (size_t e = 0; e < nf; ++e) vals[e] = basis.eval(e, z, ctx);
        for (size_t a = 0; a < nf; ++a)
            for (size_t b = 0; b < nf; ++b) out[a * nf + b] = inner(vals[a], vals[b]);
    };

    std::vector<double> box_part =
        integrate_composite_multi(cg, int(npairs), integrand, opt.threads);

    // exterior of the ball: all cutoffs are inactive, fields equal their models
    for (size_t a = 0; a < nf; ++a) {
        for (size_t b = 0; b < nf; ++b) {
            auto tail_density = [&](const Vec3& z) {
                return inner(tail_model_value(basis.elements[a].tail, z),
                             tail_model_value(basis.elements[b].tail, z));
            };
            box_part[a * nf + b] += integrate_sphere_exterior({0, 0, 0}, L, tail_density);
        }
    }

    GramReport rep;
    rep.n_clusters = spec.zetas.size();
    rep.epsilon = spec.epsilon;
    rep.matrix = std::move(box_part);
    rep.target.assign(npairs, 0.0);
    for (size_t j = 0; j < rep.n_clusters; ++j) {
        const double t = 2.0 * M_PI * spec.mass * spec.charges[j];
        for (int c = 0; c < 4; ++c) {
            const size_t idx = (4 * j + size_t(c)) * nf + (4 * j + size_t(c));
            rep.target[idx] = t;
        }
    }

    for (size_t a = 0; a < nf; ++a) {
        for (size_t b = 0; b < nf; ++b) {
            const double gab = rep.matrix[a * nf + b];
            rep.symmetry_error =
                std::max(rep.symmetry_error, std::abs(gab - rep.matrix[b * nf + a]));
            if (a / 4 == b / 4) {
                const double tgt = rep.target[a * nf + a];
                const double want = (a == b) ? tgt : 0.0;
                rep.block_dev_max =
                    std::max(rep.block_dev_max, std::abs(gab - want) / tgt);
            } else {
                rep.off_block_max = std::max(rep.off_block_max, std::abs(gab));
            }
        }
    }

    // smallest eigenvalue by inverse-power-free Gershgorin-style bound first,
    // then a few Jacobi sweeps for the exact symmetric spectrum
    {
        std::vector<double> m = rep.matrix;
        const size_t n = nf;
        for (int sweep = 0; sweep < 24; ++sweep) {
            for (size_t pq = 0; pq < n; ++pq)
                for (size_t q = pq + 1; q < n; ++q) {
                    const double app = m[pq * n + pq], aqq = m[q * n + q],
                                 apq = m[pq * n + q];
                    if (std::abs(apq) < 1e-14) continue;
                    const double theta = 0.5 * std::atan2(2 * apq, aqq - app);
                    const double c = std::cos(theta), s = std::sin(theta);
                    for (size_t r = 0; r < n; ++r) {
                        const double mrp = m[r * n + pq], mrq = m[r * n + q];
                        m[r * n + pq] = c * mrp - s * mrq;
                        m[r * n + q] = s * mrp + c * mrq;
                    }
                    for (size_t r = 0; r < n; ++r) {
                        const double mpr = m[pq * n + r], mqr = m[q * n + r];
                        m[pq * n + r] = c * mpr - s * mqr;
                        m[q * n + r] = s * mpr + c * mqr;
                    }
                }
        }
        double mineig = 1e300;
        for (size_t i = 0; i < n; ++i) mineig = std::min(mineig, m[i * n + i]);
        rep.min_eigenvalue = mineig;
    }
    return rep;
}

double coulomb_defect(const VariationBasis& basis, size_t element,
                      const preglue::Pregluing& p, const std::vector<Vec3>& points,
                      double h_fd) {
    double worst = 0;
    for (const Vec3& z : points) {
        const preglue::GaugeContext ctx = basis.field->context_at(z);
        // d* of the tangent against the glued background, all in context gauge
        TangentField u;
        u.eval = [&](const Vec3& q) { return basis.eval(element, q, ctx); };
        MonopoleField bg;
        struct Ctxmap : FieldMap {
            const preglue::PregluedField* f;
            preglue::GaugeContext ctx;
            Su2 higgs(const Vec3& q) const override { return f->higgs(q, ctx); }
            SuTriple potential(const Vec3& q) const override { return f->potential(q, ctx); }
        };
        auto cm = std::make_shared<Ctxmap>();
        cm->f = basis.field.get();
        cm->ctx = ctx;
        bg.map = cm;
        bg.mass = p.spec.mass;
        worst = std::max(worst, norm(linear::coulomb_functional(bg, u, z, h_fd)));
    }
    return worst;
}

MetricSweepResult metric_sweep(const preglue::ClusterSpec& base_spec,
                               const std::vector<double>& eps_sweep,
                               const preglue::SpliceLayout& layout,
                               const GramOptions& opt) {
    if (eps_sweep.size() < 3)
        throw Error(Err::InsufficientSweep, "metric_sweep: need >= 3 sweep points");
    MetricSweepResult res;
    std::vector<double> xs, ys;
    for (double eps : eps_sweep) {
        preglue::ClusterSpec spec = base_spec;
        spec.epsilon = eps;
        preglue::Pregluing p =
            preglue::build_pregluing(spec, layout, preglue::HiggsCorrection::FirstOrder);
        VariationBasis b = variation_basis(p);
        GramReport g = gram(b, p, opt);
        MetricSweepRow row;
        row.epsilon = eps;
        row.block_dev_max = g.block_dev_max;
        row.off_block_max = g.off_block_max;
        res.rows.push_back(row);
        if (g.off_block_max > 0) {
            xs.push_back(eps);
            ys.push_back(g.off_block_max);
        }
    }
    if (xs.size() >= 2) res.off_block_fit = preglue::fit_loglog(xs, ys);
    return res;
}

CentreSumReport centre_sum_check(const preglue::Pregluing& p) {
    const auto& spec = p.spec;
    double zmax = 0;
    Vec3 mean{};
    int ktot = 0;
    for (size_t j = 0; j < spec.zetas.size(); ++j) {
        zmax = std::max(zmax, norm(spec.center_z(j)));
        mean += spec.center_z(j) * double(spec.charges[j]);
        ktot += spec.charges[j];
    }
    mean = mean / double(ktot);

    const double base = std::max(2.0 * (zmax + p.impl->r_out()), 1.5 * p.impl->far_radius());
    std::vector<double> shells = {base, 1.3 * base, 1.7 * base, 2.2 * base};
    bps::CentreFit fit = bps::centre_of(p.field, shells);

    CentreSumReport rep;
    rep.fitted_centre = fit.centre;
    rep.charge_weighted_mean = mean;
    rep.mismatch = norm(fit.centre - mean);
    rep.fit_residual = fit.residual;
    return rep;
}

}  // namespace metric
}  // namespace monolab
