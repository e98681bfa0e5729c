#include "monolab/preglue.hpp"

#include <algorithm>
#include <cmath>

#include "monolab/bps.hpp"

namespace monolab {
namespace preglue {

ClusterSpec ClusterSpec::make(std::vector<Vec3> zetas, std::vector<int> charges, double mass,
                              double epsilon, std::vector<double> phases) {
    ClusterSpec s;
    if (zetas.empty()) throw Error(Err::ConfigParse, "cluster spec: no points");
    if (charges.size() != zetas.size())
        throw Error(Err::ConfigParse, "cluster spec: charges/zetas size mismatch");
    if (phases.empty()) phases.assign(zetas.size(), 0.0);
    if (phases.size() != zetas.size())
        throw Error(Err::ConfigParse, "cluster spec: phases size mismatch");
    if (mass <= 0 || epsilon <= 0)
        throw Error(Err::ConfigParse, "cluster spec: mass and epsilon must be positive");
    for (int k : charges)
        if (k != 1)
            throw Error(Err::ConfigParse, "cluster spec: only charge-1 clusters supported");

    double q = 0;
    for (const Vec3& zt : zetas) {
        if (norm(zt) < 1e-12)
            throw Error(Err::ConfigParse, "cluster spec: zeta at the origin");
        q += norm2(zt);
    }
    const double scale = 1.0 / std::sqrt(q);
    for (Vec3& zt : zetas) zt *= scale;

    s.zetas = std::move(zetas);
    s.charges = std::move(charges);
    s.mass = mass;
    s.epsilon = epsilon;
    s.phases = std::move(phases);

    s.min_radius = 1e30;
    s.min_separation = 1e30;
    for (size_t i = 0; i < s.zetas.size(); ++i) {
        s.min_radius = std::min(s.min_radius, norm(s.zetas[i]));
        for (size_t j = i + 1; j < s.zetas.size(); ++j) {
            const double d = norm(s.zetas[i] - s.zetas[j]);
            if (d < 1e-9)
                throw Error(Err::CoincidentPoints, "cluster spec: coincident zetas");
            s.min_separation = std::min(s.min_separation, d);
        }
    }
    if (s.zetas.size() == 1) s.min_separation = 2.0 * s.min_radius;
    return s;
}

int ClusterSpec::total_charge() const {
    int k = k0;
    for (int c : charges) k += c;
    return k;
}

double smoothstep_down(double u) {
    if (u <= 0) return 1.0;
    if (u >= 1) return 0.0;
    const double s = u * u * u * (u * (6.0 * u - 15.0) + 10.0);
    return 1.0 - s;
}

std::string region_name(Region r) {
    switch (r) {
        case Region::Core: return "core";
        case Region::Annulus: return "annulus";
        case Region::Interstitial: return "interstitial";
        default: return "far";
    }
}

// ---------------------------------------------------------------------------

PregluedField::PregluedField(ClusterSpec spec, SpliceLayout layout, HiggsCorrection corr)
    : spec_(std::move(spec)), layout_(layout), corr_(corr) {
    r_out_ = layout_.r_out(spec_);
    r_in_ = layout_.r_in(spec_);
    far_radius_ = 2.0 / spec_.epsilon;
    if (!(r_in_ > 0 && r_in_ < r_out_))
        throw Error(Err::LayoutOverlap, "pregluing: invalid layout radii");
    if (r_out_ >= 0.5 * spec_.min_separation / spec_.epsilon)
        throw Error(Err::LayoutOverlap, "pregluing: splice balls overlap");

    dirac_.mass = spec_.mass;
    for (size_t j = 0; j < spec_.zetas.size(); ++j) {
        dirac::Pole p;
        p.z = spec_.center_z(j);
        p.k = spec_.charges[j];
        p.string_dir = normalized(spec_.zetas[j]);  // outward, away from the others
        dirac_.poles.push_back(p);
        cluster_fields_.push_back(
            bps::bps_field(p.z, spec_.mass, spec_.phases[j]));
    }
    // the string ray selected near another cluster (the farthest-ray rule at
    // its centre) must clear that cluster's splice ball
    for (size_t i = 0; i < dirac_.poles.size(); ++i) {
        for (size_t j = 0; j < dirac_.poles.size(); ++j) {
            if (i == j) continue;
            const Vec3 w = dirac_.poles[j].z - dirac_.poles[i].z;
            const Vec3 d = normalized(dirac_.poles[i].string_dir);
            auto ray_dist = [&](const Vec3& dir) {
                const double t = std::max(0.0, dot(w, dir));
                return norm(w - dir * t);
            };
            if (std::max(ray_dist(d), ray_dist(-d)) < r_out_ + 1e-9)
                throw Error(Err::PatchString,
                            "pregluing: string ray crosses another splice ball");
        }
    }
}

GaugeContext PregluedField::context_at(const Vec3& z) const {
    GaugeContext ctx;
    for (size_t j = 0; j < dirac_.poles.size(); ++j) {
        const double r = norm(z - dirac_.poles[j].z);
        if (r < 0.75 * r_in_) ctx.core = int(j);
    }
    ctx.strings.resize(dirac_.poles.size());
    for (size_t j = 0; j < dirac_.poles.size(); ++j) {
        // place the string on the ray farther from z
        const Vec3 w = z - dirac_.poles[j].z;
        const Vec3 d = normalized(dirac_.poles[j].string_dir);
        auto ray_dist = [&](const Vec3& dir) {
            const double t = dot(w, dir);
            if (t <= 0) return norm(w);
            return std::sqrt(std::max(0.0, norm2(w) - t * t));
        };
        ctx.strings[j] = (ray_dist(d) >= ray_dist(-d)) ? d : -d;
    }
    return ctx;
}

Region PregluedField::region_of(const Vec3& z) const {
    for (const auto& p : dirac_.poles) {
        const double r = norm(z - p.z);
        if (r <= r_in_) return Region::Core;
        if (r <= r_out_) return Region::Annulus;
    }
    if (norm(z) >= far_radius_) return Region::Far;
    return Region::Interstitial;
}

double PregluedField::cluster_chi(size_t j, const Vec3& z) const {
    const double r = norm(z - dirac_.poles[j].z);
    return smoothstep_down((r - r_in_) / (r_out_ - r_in_));
}

SuGroup PregluedField::cluster_rotation(size_t j, const Vec3& z,
                                        const GaugeContext& ctx) const {
    const Vec3 w = z - dirac_.poles[j].z;
    const double r = norm(w);
    if (r < 1e-12)
        throw Error(Err::OnString, "pregluing: abelian rotation at a cluster centre");
    return bps::abelian_rotation(w / r, ctx.strings[j]);
}

Su2 PregluedField::higgs_abelian(const Vec3& z, const GaugeContext& ctx) const {
    const Su2 q = bps::diag_direction();
    double s = spec_.mass;
    if (corr_ == HiggsCorrection::FirstOrder) {
        for (const auto& p : dirac_.poles) s -= dirac::kappa * p.k / norm(z - p.z);
    }
    Su2 phi = q * s;

    // blend with the abelianized cluster Higgs inside the annulus
    for (size_t j = 0; j < dirac_.poles.size(); ++j) {
        const double chi = cluster_chi(j, z);
        if (chi <= 0.0) continue;
        const SuGroup g = cluster_rotation(j, z, ctx);
        const Su2 phi_b = ad_action(g, cluster_fields_[j].higgs(z));
        phi = phi_b * chi + phi * (1.0 - chi);
        break;  // annuli are disjoint
    }
    return phi;
}

SuTriple PregluedField::potential_abelian(const Vec3& z, const GaugeContext& ctx) const {
    const Su2 q = bps::diag_direction();
    SuTriple a{};
    for (size_t j = 0; j < dirac_.poles.size(); ++j) {
        const auto& p = dirac_.poles[j];
        const Vec3 apj = dirac::one_pole_potential(p.z, p.k, ctx.strings[j], z);
        for (int i = 0; i < 3; ++i) a[i] += q * apj[i];
    }

    for (size_t j = 0; j < dirac_.poles.size(); ++j) {
        const double chi = cluster_chi(j, z);
        if (chi <= 0.0) continue;
        // abelianized cluster potential: Ad(g) A - (dg) g^{-1}, dg by a short
        // central difference of the rotation field
        const SuGroup g = cluster_rotation(j, z, ctx);
        const SuGroup ginv = conjugate(g);
        const SuTriple ab = cluster_fields_[j].potential(z);
        const double h = 1e-5;
        for (int i = 0; i < 3; ++i) {
            const Vec3 dz = axis_vec(i) * h;
            const SuGroup gp = cluster_rotation(j, z + dz, ctx);
            const SuGroup gm = cluster_rotation(j, z - dz, ctx);
            const SuGroup d{(gp.w - gm.w) * (0.5 / h), (gp.v - gm.v) * (0.5 / h)};
            const Su2 a_b = ad_action(g, ab[i]) - su2_part(d * ginv);
            a[i] = a_b * chi + a[i] * (1.0 - chi);
        }
        break;
    }
    return a;
}

Su2 PregluedField::higgs(const Vec3& z, const GaugeContext& ctx) const {
    if (ctx.core >= 0) return cluster_fields_[size_t(ctx.core)].higgs(z);
    return higgs_abelian(z, ctx);
}

SuTriple PregluedField::potential(const Vec3& z, const GaugeContext& ctx) const {
    if (ctx.core >= 0) return cluster_fields_[size_t(ctx.core)].potential(z);
    return potential_abelian(z, ctx);
}

namespace {

// FieldMap adapter with a frozen gauge context
class ContextMap : public FieldMap {
public:
    ContextMap(const PregluedField* f, GaugeContext ctx) : f_(f), ctx_(std::move(ctx)) {}
    Su2 higgs(const Vec3& z) const override { return f_->higgs(z, ctx_); }
    SuTriple potential(const Vec3& z) const override { return f_->potential(z, ctx_); }

private:
    const PregluedField* f_;
    GaugeContext ctx_;
};

// auto-context adapter: values only; derivatives of this map are meaningless
// across context seams, use PregluedField::residual_at instead
class AutoMap : public FieldMap {
public:
    explicit AutoMap(std::shared_ptr<const PregluedField> f) : f_(std::move(f)) {}
    Su2 higgs(const Vec3& z) const override { return f_->higgs(z, f_->context_at(z)); }
    SuTriple potential(const Vec3& z) const override {
        return f_->potential(z, f_->context_at(z));
    }

private:
    std::shared_ptr<const PregluedField> f_;
};

}  // namespace

double PregluedField::residual_at(const Vec3& z, double h_fd) const {
    MonopoleField f;
    f.map = std::make_shared<ContextMap>(this, context_at(z));
    f.mass = spec_.mass;
    f.charge = spec_.total_charge();
    f.mode = EvalMode::Sampled;
    return bogomolny_residual_at(f, z, h_fd);
}

Pregluing build_pregluing(const ClusterSpec& spec, const SpliceLayout& layout,
                          HiggsCorrection correction) {
    Pregluing p;
    p.spec = spec;
    p.layout = layout;
    p.correction = correction;
    p.impl = std::make_shared<PregluedField>(spec, layout, correction);
    p.field.map = std::make_shared<AutoMap>(p.impl);
    p.field.mass = spec.mass;
    p.field.charge = spec.total_charge();
    p.field.mode = EvalMode::Sampled;
    return p;
}

// ---------------------------------------------------------------------------

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw Error(Err::InsufficientSweep, "fit_loglog: need at least two points");
    const size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        if (x[i] <= 0 || y[i] <= 0)
            throw Error(Err::InsufficientSweep, "fit_loglog: nonpositive data");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        syy += ly * ly;
    }
    const double det = n * sxx - sx * sx;
    SlopeFit f;
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sy - f.slope * sx) / n;
    const double ss_tot = syy - sy * sy / n;
    double ss_res = 0;
    for (size_t i = 0; i < n; ++i) {
        const double pred = f.intercept + f.slope * std::log(x[i]);
        ss_res += std::pow(std::log(y[i]) - pred, 2);
    }
    f.r2 = (ss_tot > 1e-30) ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

ResidualOrdersResult residual_orders(const ClusterSpec& base_spec,
                                     const std::vector<double>& eps_sweep,
                                     const SpliceLayout& layout,
                                     const ResidualScanOptions& opt) {
    if (eps_sweep.size() < 3)
        throw Error(Err::InsufficientSweep, "residual_orders: need >= 3 sweep points");

    ResidualOrdersResult result;
    for (HiggsCorrection corr : {HiggsCorrection::None, HiggsCorrection::FirstOrder}) {
        for (double eps : eps_sweep) {
            ClusterSpec spec = base_spec;
            spec.epsilon = eps;
            Pregluing p = build_pregluing(spec, layout, corr);

            Grid3 g({0, 0, 0}, opt.box_factor / eps, opt.grid_n | 1);

            struct Acc {
                double sup = 0, l2sq = 0;
                std::int64_t n = 0;
            };
            std::array<Acc, 4> acc{};

            const int n = g.n;
            std::vector<std::pair<int, double>> rows(size_t(g.total_points()),
                                                     {-1, 0.0});
            parallel_sum(
                g.total_points(),
                [&](std::int64_t idx) -> double {
                    const int i = int(idx / (std::int64_t(n) * n));
                    const int jj = int((idx / n) % n);
                    const int kk = int(idx % n);
                    const Vec3 z = g.point(i, jj, kk);
                    const Region reg = p.impl->region_of(z);
                    double r;
                    try {
                        r = p.impl->residual_at(z, opt.h_fd);
                    } catch (const Error&) {
                        return 0.0;  // string ray / centre guard: skip point
                    }
                    rows[size_t(idx)] = {int(reg), r};
                    return 0.0;
                },
                opt.threads);

            const double h3 = std::pow(g.spacing(), 3);
            for (const auto& [reg, r] : rows) {
                if (reg < 0) continue;
                Acc& a = acc[size_t(reg)];
                a.sup = std::max(a.sup, r);
                a.l2sq += r * r * h3;
                ++a.n;
            }

            ResidualScanPoint pt;
            pt.epsilon = eps;
            pt.correction = corr;
            for (int reg = 0; reg < 4; ++reg) {
                RegionNorms rn;
                rn.region = Region(reg);
                rn.sup = acc[size_t(reg)].sup;
                rn.sup_over_eps = acc[size_t(reg)].sup / eps;
                rn.l2 = std::sqrt(acc[size_t(reg)].l2sq);
                rn.samples = acc[size_t(reg)].n;
                pt.norms.push_back(rn);
            }
            result.points.push_back(std::move(pt));
        }
    }

    // slope fits per (correction, region, norm kind)
    for (HiggsCorrection corr : {HiggsCorrection::None, HiggsCorrection::FirstOrder}) {
        for (int reg = 0; reg < 4; ++reg) {
            for (const std::string& kind : {std::string("sup"), std::string("sup_over_eps"),
                                            std::string("l2")}) {
                std::vector<double> xs, ys;
                for (const auto& pt : result.points) {
                    if (pt.correction != corr) continue;
                    const RegionNorms& rn = pt.norms[size_t(reg)];
                    double v = kind == "sup" ? rn.sup
                               : kind == "sup_over_eps" ? rn.sup_over_eps
                                                        : rn.l2;
                    if (v > 0 && rn.samples > 0) {
                        xs.push_back(pt.epsilon);
                        ys.push_back(v);
                    }
                }
                if (xs.size() >= 2) {
                    ResidualOrdersResult::Fit f;
                    f.correction = corr;
                    f.region = Region(reg);
                    f.norm_kind = kind;
                    f.fit = fit_loglog(xs, ys);
                    result.fits.push_back(f);
                }
            }
        }
    }
    return result;
}

double large_sphere_charge(const Pregluing& p, double radius_factor) {
    double zmax = 0;
    for (size_t j = 0; j < p.spec.zetas.size(); ++j)
        zmax = std::max(zmax, norm(p.spec.center_z(j)));
    const double R = radius_factor * (zmax + p.impl->r_out());
    const double hr = 1e-3 * R;
    auto integrand = [&](const Vec3& z) {
        const Vec3 nh = normalized(z);
        const double sp = norm(p.field.higgs(z + nh * hr));
        const double sm = norm(p.field.higgs(z - nh * hr));
        return (sp - sm) / (2.0 * hr);
    };
    return integrate_sphere({0, 0, 0}, R, integrand, 64, 128) / (2.0 * M_PI);
}

// ---------------------------------------------------------------------------

double sphere_form(const Vec3& w, const Vec3& p, const Vec3& q) {
    const double r = norm(w);
    if (r < 1e-12) throw Error(Err::CoincidentPoints, "sphere_form: zero separation");
    return -dot(w, cross(p, q)) / (r * r * r);
}

double GmCurvatureForm::operator()(const ConfigTangent& U, const ConfigTangent& V) const {
    if (U.size() != zetas.size() || V.size() != zetas.size())
        throw Error(Err::ConfigParse, "gm form: tangent size mismatch");
    double s = 0;
    for (size_t i = 0; i < zetas.size(); ++i) {
        if (i == j) continue;
        s += charges[i] * sphere_form(zetas[j] - zetas[i], U[j] - U[i], V[j] - V[i]);
    }
    return s;
}

GmCurvatureForm gm_curvature_form(const ClusterSpec& spec, size_t j) {
    if (j >= spec.zetas.size())
        throw Error(Err::ConfigParse, "gm_curvature_form: index out of range");
    GmCurvatureForm f;
    f.zetas = spec.zetas;
    f.charges = spec.charges;
    f.j = j;
    return f;
}

double gm_flux(const GmCurvatureForm& form, size_t around_pole, double radius, int n_theta,
               int n_phi) {
    // move zeta_j over the sphere of `radius` around zeta_i, pull back, integrate;
    // composite 4-point Gauss in theta, trapezoid in phi
    const size_t i = around_pole;
    if (i == form.j) throw Error(Err::ConfigParse, "gm_flux: pole equals moving index");
    static const double gx[4] = {-0.8611363115940526, -0.3399810435848563,
                                 0.3399810435848563, 0.8611363115940526};
    static const double gw[4] = {0.3478548451374538, 0.6521451548625461,
                                 0.6521451548625461, 0.3478548451374538};
    const int panels = std::max(1, n_theta / 4);
    double total = 0;
    for (int pnl = 0; pnl < panels; ++pnl) {
        const double a = M_PI * pnl / panels, b = M_PI * (pnl + 1) / panels;
        for (int q = 0; q < 4; ++q) {
            const double th = 0.5 * (a + b) + 0.5 * (b - a) * gx[q];
            const double wth = 0.5 * (b - a) * gw[q];
            for (int ip = 0; ip < n_phi; ++ip) {
                const double ph = 2.0 * M_PI * ip / n_phi;
                const Vec3 nh{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                              std::cos(th)};
                const Vec3 tth{std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph),
                               -std::sin(th)};
                const Vec3 tph{-std::sin(ph), std::cos(ph), 0};
                GmCurvatureForm moved = form;
                moved.zetas[form.j] = form.zetas[i] + nh * radius;
                ConfigTangent U(form.zetas.size()), V(form.zetas.size());
                U[form.j] = tth * radius;
                V[form.j] = tph * (radius * std::sin(th));
                total += moved(U, V) * wth * (2.0 * M_PI / n_phi);
            }
        }
    }
    return -total / (4.0 * M_PI);
}

double gm_exterior_derivative(const GmCurvatureForm& form, const ConfigTangent& U,
                              const ConfigTangent& V, const ConfigTangent& W, double h) {
    // dF(U,V,W) = U[F(V,W)] - V[F(U,W)] + W[F(U,V)] for constant frames
    auto directional = [&](const ConfigTangent& dir, const ConfigTangent& A,
                           const ConfigTangent& B) {
        GmCurvatureForm fp = form, fm = form;
        for (size_t i = 0; i < form.zetas.size(); ++i) {
            fp.zetas[i] = form.zetas[i] + dir[i] * h;
            fm.zetas[i] = form.zetas[i] - dir[i] * h;
        }
        return (fp(A, B) - fm(A, B)) / (2.0 * h);
    };
    return directional(U, V, W) - directional(V, U, W) + directional(W, U, V);
}

}  // namespace preglue
}  // namespace monolab
