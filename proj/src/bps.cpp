#include "monolab/bps.hpp"

#include <cmath>

namespace monolab {
namespace bps {

double higgs_profile(double s) {
    if (s < 1e-4) return s / 3.0 - s * s * s / 45.0;  // coth s - 1/s near 0
    return 1.0 / std::tanh(s) - 1.0 / s;
}

double higgs_profile_deriv(double s) {
    if (s < 1e-4) return 1.0 / 3.0 - s * s / 15.0;
    const double sh = std::sinh(s);
    return 1.0 / (s * s) - 1.0 / (sh * sh);
}

double gauge_profile(double s) {
    if (s < 1e-4) return 1.0 - s * s / 6.0 + 7.0 * s * s * s * s / 360.0;
    if (s > 700.0) return 0.0;
    return s / std::sinh(s);
}

double gauge_profile_deriv(double s) {
    if (s < 1e-4) return -s / 3.0 + 7.0 * s * s * s / 90.0;
    if (s > 700.0) return 0.0;
    // K' = (1/s - coth s) K
    return (1.0 / s - 1.0 / std::tanh(s)) * gauge_profile(s);
}

namespace {

// W(r) = (1 - K(2mr)) / (2r), the transverse gauge amplitude
double w_amp(double r, double mass) {
    const double s = 2.0 * mass * r;
    if (s < 1e-4) {
        // (1-K)/ (2r) = m s/6 - ... = m^2 r /3 + O(r^3)
        return mass * mass * r / 3.0 * (1.0 - 7.0 * s * s / 60.0);
    }
    return (1.0 - gauge_profile(s)) / (2.0 * r);
}

double w_amp_deriv(double r, double mass) {
    const double s = 2.0 * mass * r;
    if (s < 1e-4) return mass * mass / 3.0;
    const double K = gauge_profile(s);
    const double Kp = gauge_profile_deriv(s);
    return -mass * Kp / r - (1.0 - K) / (2.0 * r * r);
}

class HedgehogMap : public FieldMap {
public:
    HedgehogMap(const Vec3& c, double m) : center_(c), mass_(m) {}

    Su2 higgs(const Vec3& z) const override {
        const Vec3 w = z - center_;
        const double r = norm(w);
        if (r < 1e-14) return Su2();
        const double s = 2.0 * mass_ * r;
        const double h = -mass_ * higgs_profile(s);  // Phi^a = h(r) x^a
        return Su2(w * (h / r));
    }

    SuTriple potential(const Vec3& z) const override {
        const Vec3 w = z - center_;
        const double r = norm(w);
        SuTriple a;
        if (r < 1e-14) return a;
        const double W = w_amp(r, mass_);
        const Vec3 xh = w / r;
        // A_i^a = eps_{aij} xh_j W(r)
        for (int i = 0; i < 3; ++i) {
            Vec3 col;  // component a of A_i
            for (int aa = 0; aa < 3; ++aa) {
                double v = 0;
                const int j = 3 - aa - i;  // only one non-zero eps index
                if (aa != i && j >= 0 && j < 3 && j != aa && j != i) {
                    // eps_{a i j}
                    const int perm = (i - aa + 3) % 3;  // 1: even, 2: odd
                    v = (perm == 1 ? 1.0 : -1.0) * xh[j] * W;
                }
                col.set(aa, v);
            }
            a[i] = Su2(col);
        }
        return a;
    }

    bool analytic_derivatives() const override { return true; }

    SuTriple higgs_grad(const Vec3& z) const override {
        const Vec3 w = z - center_;
        const double r = norm(w);
        SuTriple g;
        if (r < 1e-10) {
            // dPhi_i^a = h'(0) delta_ia with h'(0) = -2 m^2/3
            const double hp0 = -2.0 * mass_ * mass_ / 3.0;
            for (int i = 0; i < 3; ++i) {
                Vec3 col;
                col.set(i, hp0);
                g[i] = Su2(col);
            }
            return g;
        }
        const double s = 2.0 * mass_ * r;
        const double h = -mass_ * higgs_profile(s);
        const double hp = -2.0 * mass_ * mass_ * higgs_profile_deriv(s);
        const Vec3 xh = w / r;
        // d_i (h xh_a) = hp xh_i xh_a + (h/r)(delta_ia - xh_i xh_a)
        for (int i = 0; i < 3; ++i) {
            Vec3 col;
            for (int aa = 0; aa < 3; ++aa) {
                const double delta = (aa == i) ? 1.0 : 0.0;
                col.set(aa, hp * xh[i] * xh[aa] + (h / r) * (delta - xh[i] * xh[aa]));
            }
            g[i] = Su2(col);
        }
        return g;
    }

    SuJacobian potential_grad(const Vec3& z) const override {
        const Vec3 w = z - center_;
        const double r = norm(w);
        SuJacobian J;
        if (r < 1e-10) {
            // A ~ eps_{aij} x_j m^2/3: d_i A_j^a = eps_{aji} W'(0)-type linear term
            const double W0 = mass_ * mass_ / 3.0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    Vec3 col;
                    for (int aa = 0; aa < 3; ++aa) col.set(aa, eps(aa, j, i) * W0);
                    J[i][j] = Su2(col);
                }
            return J;
        }
        const double W = w_amp(r, mass_);
        const double Wp = w_amp_deriv(r, mass_);
        const Vec3 xh = w / r;
        // d_i (eps_{ajk} xh_k W) = eps_{ajk} [ (delta_ik - xh_i xh_k) W / r
        //                                      + xh_k Wp xh_i ]
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                Vec3 col;
                for (int aa = 0; aa < 3; ++aa) {
                    double v = 0;
                    for (int k = 0; k < 3; ++k) {
                        const double e = eps(aa, j, k);
                        if (e == 0) continue;
                        const double dik = (i == k) ? 1.0 : 0.0;
                        v += e * ((dik - xh[i] * xh[k]) * W / r + xh[k] * Wp * xh[i]);
                    }
                    col.set(aa, v);
                }
                J[i][j] = Su2(col);
            }
        return J;
    }

    static double eps(int a, int b, int c) {
        if (a == b || b == c || a == c) return 0.0;
        return ((b - a + 3) % 3 == 1) ? 1.0 : -1.0;
    }

private:
    Vec3 center_;
    double mass_;
};

// exp(t Phi) as an analytic gauge map on the hedgehog
class PhasedMap : public FieldMap {
public:
    PhasedMap(std::shared_ptr<const HedgehogMap> base, double t) : base_(std::move(base)), t_(t) {}

    Su2 higgs(const Vec3& z) const override { return base_->higgs(z); }  // commutes

    SuTriple potential(const Vec3& z) const override {
        const Su2 phi = base_->higgs(z);
        const SuGroup g = su2_exp(phi * t_);
        SuTriple a = base_->potential(z);
        const SuTriple dphi = base_->higgs_grad(z);
        SuTriple out;
        for (int i = 0; i < 3; ++i)
            out[i] = ad_action(g, a[i]) - dexp_right(phi * t_, dphi[i] * t_);
        return out;
    }

    bool analytic_derivatives() const override { return false; }

private:
    std::shared_ptr<const HedgehogMap> base_;
    double t_;
};

}  // namespace

MonopoleField bps_field(const Vec3& center, double mass, double phase) {
    if (mass <= 0) throw Error(Err::ConfigParse, "bps_field: mass must be positive");
    auto hedgehog = std::make_shared<HedgehogMap>(center, mass);
    MonopoleField f;
    f.mass = mass;
    f.charge = 1;
    if (phase == 0.0) {
        f.map = hedgehog;
        f.mode = EvalMode::Analytic;
    } else {
        f.map = std::make_shared<PhasedMap>(hedgehog, phase);
        f.mode = EvalMode::Analytic;
    }
    return f;
}

SuTriple bps_covariant_gradient(const Vec3& center, double mass, const Vec3& z) {
    const Vec3 w = z - center;
    const double r = norm(w);
    SuTriple out;
    if (r < 1e-12) {
        const double hp0 = -2.0 * mass * mass / 3.0;
        for (int i = 0; i < 3; ++i) {
            Vec3 col;
            col.set(i, hp0);
            out[i] = Su2(col);
        }
        return out;
    }
    const double s = 2.0 * mass * r;
    const double h = -mass * higgs_profile(s);
    const double hp = -2.0 * mass * mass * higgs_profile_deriv(s);
    const double K = gauge_profile(s);
    const Vec3 xh = w / r;
    // (grad_A Phi)_i^a = hp xh_i xh_a + (h K / r)(delta_ia - xh_i xh_a)
    for (int i = 0; i < 3; ++i) {
        Vec3 col;
        for (int aa = 0; aa < 3; ++aa) {
            const double delta = (aa == i) ? 1.0 : 0.0;
            col.set(aa, hp * xh[i] * xh[aa] + (h * K / r) * (delta - xh[i] * xh[aa]));
        }
        out[i] = Su2(col);
    }
    return out;
}

SuTriple bps_curvature(const Vec3& center, double mass, const Vec3& z) {
    const Vec3 w = z - center;
    const double r = norm(w);
    SuTriple out;
    if (r < 1e-12) {
        const double c = -2.0 * mass * mass / 3.0;
        for (int i = 0; i < 3; ++i) {
            Vec3 col;
            col.set(i, c);
            out[i] = Su2(col);
        }
        return out;
    }
    const double W = w_amp(r, mass);
    const double Wp = w_amp_deriv(r, mass);
    const Vec3 xh = w / r;
    // (*F)_i^a = (2W^2 - 2W/r) xh_i xh_a - (Wp + W/r)(delta_ia - xh_i xh_a)
    const double rad = 2.0 * W * W - 2.0 * W / r;
    const double trans = -(Wp + W / r);
    for (int i = 0; i < 3; ++i) {
        Vec3 col;
        for (int aa = 0; aa < 3; ++aa) {
            const double delta = (aa == i) ? 1.0 : 0.0;
            col.set(aa, rad * xh[i] * xh[aa] + trans * (delta - xh[i] * xh[aa]));
        }
        out[i] = Su2(col);
    }
    return out;
}

// ---------------------------------------------------------------------------

Su2 diag_direction() { return Su2(0.0, 0.0, -1.0); }  // diag(i,-i) normalized

SuGroup abelian_rotation(const Vec3& n_hat, const Vec3& string_dir) {
    // rotate n_hat to e3 smoothly away from n_hat = string_dir: first a rigid
    // rotation q0 sending string_dir to -e3, then the standard chart.
    const Vec3 e3{0, 0, 1};
    const Vec3 target = -string_dir;
    // q0: rotate string_dir -> -e3, i.e. target(-string) -> e3
    SuGroup q0;
    {
        const double c = dot(target, e3);
        if (c > 1.0 - 1e-14) {
            q0 = SuGroup::identity();
        } else if (c < -1.0 + 1e-14) {
            q0 = SuGroup{0.0, Vec3{1, 0, 0}};  // rotation by pi about e1
        } else {
            const Vec3 ax = cross(target, e3);
            const double w = std::sqrt(0.5 * (1.0 + c));
            q0 = SuGroup{w, ax * (0.5 / w)};
        }
    }
    // n' = Ad(q0) n_hat (rotation on coefficient vectors)
    const Vec3 np = ad_action(q0, Su2(n_hat)).c;
    // standard chart: rotate n' -> e3, singular only at n' = -e3
    const double c = dot(np, e3);
    SuGroup q1;
    if (c > 1.0 - 1e-15) {
        q1 = SuGroup::identity();
    } else {
        if (c < -1.0 + 1e-12)
            throw Error(Err::OnString, "abelian_rotation: point on excluded ray");
        const Vec3 ax = cross(np, e3);
        const double w = std::sqrt(0.5 * (1.0 + c));
        q1 = SuGroup{w, ax * (0.5 / w)};
    }
    return q1 * q0;
}

namespace {

class AbelianizedMap : public FieldMap {
public:
    AbelianizedMap(std::shared_ptr<const FieldMap> base, Vec3 string_dir, double floor)
        : base_(std::move(base)), string_(normalized(string_dir)), floor_(floor) {}

    SuGroup rotation(const Vec3& z) const {
        const Su2 phi = base_->higgs(z);
        const double n = norm(phi);
        if (n < floor_) throw Error(Err::SmallHiggs, "abelianize: |Phi| too small");
        // n_hat = -Phi-hat so that Phi maps onto -e3 = diag_direction()
        return abelian_rotation(-(phi.c / n), string_);
    }

    Su2 higgs(const Vec3& z) const override {
        return ad_action(rotation(z), base_->higgs(z));
    }

    SuTriple potential(const Vec3& z) const override {
        const SuGroup g = rotation(z);
        SuTriple a = base_->potential(z);
        SuTriple out;
        const double h = 1e-5;
        const SuGroup ginv = conjugate(g);
        for (int i = 0; i < 3; ++i) {
            const Vec3 dz = axis_vec(i) * h;
            const SuGroup gp = rotation(z + dz);
            const SuGroup gm = rotation(z - dz);
            const SuGroup d{(gp.w - gm.w) * (0.5 / h), (gp.v - gm.v) * (0.5 / h)};
            out[i] = ad_action(g, a[i]) - su2_part(d * ginv);
        }
        return out;
    }

private:
    std::shared_ptr<const FieldMap> base_;
    Vec3 string_;
    double floor_;
};

}  // namespace

MonopoleField abelianize(const MonopoleField& f, Patch patch, double r_min,
                         AbelianizeReport* report) {
    const Vec3 string_dir = (patch == Patch::North) ? Vec3{0, 0, -1} : Vec3{0, 0, 1};
    // precondition: |Phi| >= mass/2 on a sample shell at r_min
    const double shell = std::max(r_min, 1e-3);
    for (int i = 0; i < 16; ++i) {
        const double th = std::acos(-1.0 + 2.0 * (i + 0.5) / 16.0);
        const double ph = 2.39996322972865332 * i;  // golden-angle spread
        const Vec3 p{shell * std::sin(th) * std::cos(ph), shell * std::sin(th) * std::sin(ph),
                     shell * std::cos(th)};
        if (norm(f.higgs(p)) < 0.5 * f.mass)
            throw Error(Err::SmallHiggs, "abelianize: |Phi| < mass/2 at r_min shell");
    }
    MonopoleField out = f;
    out.map = std::make_shared<AbelianizedMap>(f.map, string_dir, 0.25 * f.mass);
    out.mode = EvalMode::Sampled;

    if (report) {
        report->shell_radius = 10.0;
        const Su2 q = diag_direction();
        for (int i = 0; i < 32; ++i) {
            const double th = std::acos(-0.95 + 1.9 * (i + 0.5) / 32.0);
            const double ph = 2.39996322972865332 * i;
            const Vec3 p{report->shell_radius * std::sin(th) * std::cos(ph),
                         report->shell_radius * std::sin(th) * std::sin(ph),
                         report->shell_radius * std::cos(th)};
            auto [p0, p1] = split(out.higgs(p), q);
            report->max_offdiag_phi = std::max(report->max_offdiag_phi, norm(p1));
            for (const Su2& ai : out.potential(p)) {
                auto [a0, a1] = split(ai, q);
                report->max_offdiag_a = std::max(report->max_offdiag_a, norm(a1));
            }
        }
    }
    return out;
}

CentreFit centre_of(const MonopoleField& f, const std::vector<double>& shells) {
    if (shells.size() < 2)
        throw Error(Err::FitIllConditioned, "centre_of: need at least two shells");
    // shell averages A(r) = m - c1/r and dipole moments D_i(r) = -c1 v_i / r^2
    const int n_theta = 48, n_phi = 96;
    std::vector<double> avg(shells.size());
    std::vector<Vec3> dip(shells.size());
    for (size_t s = 0; s < shells.size(); ++s) {
        const double R = shells[s];
        double a = 0;
        Vec3 d{};
        for (int it = 0; it < n_theta; ++it) {
            const double ct = -1.0 + (2.0 * it + 1.0) / n_theta;
            const double st = std::sqrt(1.0 - ct * ct);
            for (int ip = 0; ip < n_phi; ++ip) {
                const double ph = 2.0 * M_PI * ip / n_phi;
                const Vec3 nh{st * std::cos(ph), st * std::sin(ph), ct};
                const double v = norm(f.higgs(nh * R));
                a += v;
                d += nh * v;
            }
        }
        const double npts = double(n_theta) * n_phi;
        avg[s] = a / npts;
        dip[s] = d * (3.0 / npts);
    }
    // least squares for (m, c1) in avg = m - c1/r
    double S = double(shells.size()), Sx = 0, Sxx = 0, Sy = 0, Sxy = 0;
    for (size_t s = 0; s < shells.size(); ++s) {
        const double x = 1.0 / shells[s];
        Sx += x;
        Sxx += x * x;
        Sy += avg[s];
        Sxy += x * avg[s];
    }
    const double det = S * Sxx - Sx * Sx;
    if (std::abs(det) < 1e-14)
        throw Error(Err::FitIllConditioned, "centre_of: degenerate shell set");
    const double c1 = -(S * Sxy - Sx * Sy) / det;
    const double m = (Sy + c1 * Sx) / S;
    if (m <= 0 || c1 <= 0)
        throw Error(Err::FitIllConditioned, "centre_of: fit gave non-positive mass/charge");

    // dipole: D(r) = -c1 * v / r^2  =>  v = -D r^2 / c1, average over shells
    Vec3 v{};
    for (size_t s = 0; s < shells.size(); ++s)
        v += dip[s] * (-shells[s] * shells[s] / c1);
    v = v / double(shells.size());

    CentreFit fit;
    fit.mass = m;
    fit.pole_coeff = c1;
    fit.centre = v / m;
    double res = 0;
    for (size_t s = 0; s < shells.size(); ++s)
        res += std::pow(avg[s] - (m - c1 / shells[s]), 2);
    fit.residual = std::sqrt(res / double(shells.size()));
    return fit;
}

}  // namespace bps
}  // namespace monolab
