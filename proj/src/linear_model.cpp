#include "monolab/linear_model.hpp"

#include <cmath>
#include <random>

#include "monolab/bps.hpp"

namespace monolab {
namespace linear {

namespace {

std::array<FourValue, 3> fd_jacobian(const FourField& u, const Vec3& z, double h) {
    std::array<FourValue, 3> j;
    for (int i = 0; i < 3; ++i) {
        const Vec3 dz = axis_vec(i) * h;
        j[i] = (u(z + dz) - u(z - dz)) * (0.5 / h);
    }
    return j;
}

FourValue assemble_model(const std::array<FourValue, 3>& j) {
    // curl a - grad phi; div a
    FourValue out;
    Vec3 curl{j[1].a.z - j[2].a.y, j[2].a.x - j[0].a.z, j[0].a.y - j[1].a.x};
    Vec3 gradphi{j[0].phi, j[1].phi, j[2].phi};
    out.a = curl - gradphi;
    out.phi = j[0].a.x + j[1].a.y + j[2].a.z;
    return out;
}

}  // namespace

FourValue model_apply(const FourField& u, const Vec3& z, double h) {
    const auto j = u.jac ? u.jac(z) : fd_jacobian(u, z, h);
    return assemble_model(j);
}

FourValue model_apply_twice(const FourField& u, const Vec3& z, double h) {
    FourField lu;
    lu.eval = [&u, h](const Vec3& p) { return model_apply(u, p, h); };
    return model_apply(lu, z, h);
}

FourField kernel_f0() {
    FourField f;
    f.eval = [](const Vec3& z) -> FourValue {
        const double r3 = std::pow(norm2(z), 1.5);
        return {0.0, z / r3};
    };
    f.jac = [](const Vec3& z) -> std::array<FourValue, 3> {
        const double r2 = norm2(z);
        const double r3 = std::pow(r2, 1.5), r5 = r3 * r2;
        std::array<FourValue, 3> j;
        for (int i = 0; i < 3; ++i) {
            Vec3 da = axis_vec(i) / r3 - z * (3.0 * z[i] / r5);
            j[i] = {0.0, da};
        }
        return j;
    };
    return f;
}

FourField kernel_fc(const Vec3& c) {
    FourField f;
    f.eval = [c](const Vec3& z) -> FourValue {
        const double r3 = std::pow(norm2(z), 1.5);
        return {dot(c, z) / r3, cross(z, c) / r3};  // -(c x z) = z x c
    };
    f.jac = [c](const Vec3& z) -> std::array<FourValue, 3> {
        const double r2 = norm2(z);
        const double r3 = std::pow(r2, 1.5), r5 = r3 * r2;
        std::array<FourValue, 3> j;
        for (int i = 0; i < 3; ++i) {
            const double dphi = c[i] / r3 - 3.0 * dot(c, z) * z[i] / r5;
            const Vec3 da = cross(axis_vec(i), c) / r3 - cross(z, c) * (3.0 * z[i] / r5);
            j[i] = {dphi, da};
        }
        return j;
    };
    return f;
}

// ---------------------------------------------------------------------------
// harmonic seed table (R^4-valued harmonic polynomials assembled from scalar
// harmonics placed in one slot at a time)

namespace {

// scalar harmonic polynomials by degree
double harmonic_poly(int degree, int which, const Vec3& z, Vec3* grad) {
    const double x = z.x, y = z.y, w = z.z;
    switch (degree) {
        case 0:
            if (grad) *grad = {0, 0, 0};
            return 1.0;
        case 1:
            if (grad) *grad = axis_vec(which);
            return z[which];
        case 2:
            switch (which) {
                case 0:
                    if (grad) *grad = {y, x, 0};
                    return x * y;
                case 1:
                    if (grad) *grad = {0, w, y};
                    return y * w;
                case 2:
                    if (grad) *grad = {w, 0, x};
                    return x * w;
                case 3:
                    if (grad) *grad = {2 * x, -2 * y, 0};
                    return x * x - y * y;
                default:
                    if (grad) *grad = {2 * x, 2 * y, -4 * w};
                    return x * x + y * y - 2 * w * w;
            }
        case 3:
        default:
            switch (which) {
                case 0:
                    if (grad) *grad = {y * w, x * w, x * y};
                    return x * y * w;
                case 1:  // x^3 - 3 x y^2
                    if (grad) *grad = {3 * x * x - 3 * y * y, -6 * x * y, 0};
                    return x * x * x - 3 * x * y * y;
                case 2:  // z^3 - (3/2) z (x^2 + y^2)
                    if (grad)
                        *grad = {-3.0 * x * w, -3.0 * y * w,
                                 3 * w * w - 1.5 * (x * x + y * y)};
                    return w * w * w - 1.5 * w * (x * x + y * y);
                default:  // y^3 - 3 y x^2
                    if (grad) *grad = {-6 * x * y, 3 * y * y - 3 * x * x, 0};
                    return y * y * y - 3 * y * x * x;
            }
    }
}

int harmonic_count(int degree) {
    switch (degree) {
        case 0: return 1;
        case 1: return 3;
        case 2: return 5;
        default: return 4;  // a spanning sample, not the full space
    }
}

// the R^4-valued seed: harmonic h placed in slot (0..3); slot 0 = phi
FourField seed_field(int degree, int which, int slot, double radial_power) {
    FourField f;
    f.eval = [=](const Vec3& z) -> FourValue {
        const double r2 = norm2(z);
        const double rp = std::pow(r2, 0.5 * radial_power);
        const double v = harmonic_poly(degree, which, z, nullptr) * rp;
        FourValue out;
        if (slot == 0)
            out.phi = v;
        else
            out.a.set(slot - 1, v);
        return out;
    };
    f.jac = [=](const Vec3& z) -> std::array<FourValue, 3> {
        Vec3 grad;
        const double hval = harmonic_poly(degree, which, z, &grad);
        const double r2 = norm2(z);
        const double rp = std::pow(r2, 0.5 * radial_power);
        // d_i (h r^p) = (grad h)_i r^p + h p r^(p-2) z_i
        std::array<FourValue, 3> j;
        for (int i = 0; i < 3; ++i) {
            const double d = grad[i] * rp + hval * radial_power * std::pow(r2, 0.5 * radial_power - 1.0) * z[i];
            FourValue out;
            if (slot == 0)
                out.phi = d;
            else
                out.a.set(slot - 1, d);
            j[i] = out;
        }
        return j;
    };
    return f;
}

}  // namespace

std::vector<HarmonicSeed> harmonic_seed_table(int max_degree) {
    std::vector<HarmonicSeed> t;
    for (int d = 0; d <= max_degree; ++d)
        for (int w = 0; w < harmonic_count(d); ++w) t.push_back({d, w});
    return t;
}

FourField homogeneous_solution_negative(const HarmonicSeed& seed) {
    // u = L(|z|^(-2n-1) h), homogeneous of degree -2-n; here we place the
    // harmonic in the phi slot (the a-slots give the quaternionic partners)
    const int n = seed.degree;
    FourField base = seed_field(n, seed.index, 0, double(-2 * n - 1));
    FourField u;
    u.eval = [base](const Vec3& z) { return model_apply(base, z); };
    return u;
}

FourField homogeneous_solution_positive(const HarmonicSeed& seed) {
    // u = L h with h harmonic of degree n+1: homogeneous of degree n
    const int n = seed.degree;
    FourField base = seed_field(n, seed.index, 0, 0.0);
    FourField u;
    u.eval = [base](const Vec3& z) { return model_apply(base, z); };
    return u;
}

TangentValue quaternion_action(int i, const TangentValue& u) {
    // left multiplication of phi + a1 i + a2 j + a3 k by the i-th unit
    TangentValue out;
    switch (i) {
        case 1:
            out.phi = -u.a[0];
            out.a[0] = u.phi;
            out.a[1] = -u.a[2];
            out.a[2] = u.a[1];
            break;
        case 2:
            out.phi = -u.a[1];
            out.a[0] = u.a[2];
            out.a[1] = u.phi;
            out.a[2] = -u.a[0];
            break;
        case 3:
            out.phi = -u.a[2];
            out.a[0] = -u.a[1];
            out.a[1] = u.a[0];
            out.a[2] = u.phi;
            break;
        default:
            out = u;
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

struct TangentJac {
    std::array<SuTriple, 3> da;  // da[i][l] = d_i a_l
    SuTriple dphi;               // dphi[i]
};

TangentJac fd_tangent_jac(const TangentField& u, const Vec3& z, double h) {
    TangentJac j;
    for (int i = 0; i < 3; ++i) {
        const Vec3 dz = axis_vec(i) * h;
        const TangentValue up = u(z + dz), um = u(z - dz);
        for (int l = 0; l < 3; ++l) j.da[i][l] = (up.a[l] - um.a[l]) * (0.5 / h);
        j.dphi[i] = (up.phi - um.phi) * (0.5 / h);
    }
    return j;
}

TangentValue coupled_first_order(const MonopoleField& bg, const TangentField& u,
                                 const Vec3& z, double h) {
    // [*d_A, -d_A; -d_A*, 0] on (a, phi) with covariant pieces
    const TangentJac j = fd_tangent_jac(u, z, h);
    const SuTriple A = bg.potential(z);
    const TangentValue uz = u(z);

    // covariant derivatives: D_i a_l = d_i a_l + [A_i, a_l], D_i phi likewise
    std::array<SuTriple, 3> Da;
    SuTriple Dphi;
    for (int i = 0; i < 3; ++i) {
        for (int l = 0; l < 3; ++l) Da[i][l] = j.da[i][l] + bracket(A[i], uz.a[l]);
        Dphi[i] = j.dphi[i] + bracket(A[i], uz.phi);
    }

    TangentValue out;
    // (*d_A a)_i = eps_ijk D_j a_k
    out.a[0] = Da[1][2] - Da[2][1] - Dphi[0];
    out.a[1] = Da[2][0] - Da[0][2] - Dphi[1];
    out.a[2] = Da[0][1] - Da[1][0] - Dphi[2];
    // -d_A* a = sum_i D_i a_i
    out.phi = Da[0][0] + Da[1][1] + Da[2][2];
    return out;
}

}  // namespace

TangentValue coupled_apply(const MonopoleField& bg, const TangentField& u, const Vec3& z,
                           double h) {
    TangentValue out = coupled_first_order(bg, u, z, h);
    const Su2 phi_bg = bg.higgs(z);
    const TangentValue uz = u(z);
    for (int i = 0; i < 3; ++i) out.a[i] += bracket(phi_bg, uz.a[i]);
    out.phi += bracket(phi_bg, uz.phi);
    return out;
}

TangentValue coupled_apply_adjoint(const MonopoleField& bg, const TangentField& u,
                                   const Vec3& z, double h) {
    TangentValue out = coupled_first_order(bg, u, z, h);
    const Su2 phi_bg = bg.higgs(z);
    const TangentValue uz = u(z);
    for (int i = 0; i < 3; ++i) out.a[i] -= bracket(phi_bg, uz.a[i]);
    out.phi -= bracket(phi_bg, uz.phi);
    return out;
}

Su2 coulomb_functional(const MonopoleField& bg, const TangentField& u, const Vec3& z,
                       double h) {
    const TangentJac j = fd_tangent_jac(u, z, h);
    const SuTriple A = bg.potential(z);
    const TangentValue uz = u(z);
    Su2 div;
    for (int i = 0; i < 3; ++i) div += j.da[i][i] + bracket(A[i], uz.a[i]);
    return div - bracket(bg.higgs(z), uz.phi);
}

TangentField moduli_tangent(const MonopoleField& bg, int index, double h) {
    TangentField t;
    t.decaying = true;
    auto map = bg.map;
    MonopoleField local = bg;
    if (index == 0) {
        t.eval = [local, h](const Vec3& z) -> TangentValue {
            TangentValue v;
            const SuTriple g = covariant_gradient(local, z, h);
            for (int i = 0; i < 3; ++i) v.a[i] = -g[i];
            v.phi = Su2();
            return v;
        };
    } else {
        const int e = index - 1;
        t.eval = [local, e, h](const Vec3& z) -> TangentValue {
            TangentValue v;
            const SuTriple sF = curvature(local, z, h);
            // (iota_e F)_l = F_el = eps_{elm} (*F)_m
            for (int l = 0; l < 3; ++l) {
                Su2 s;
                for (int m = 0; m < 3; ++m) {
                    const int perm = (l - e + 3) % 3;
                    if (e == l || m == e || m == l) continue;
                    const double sign = (perm == 1) ? 1.0 : -1.0;
                    s += sF[m] * sign;
                }
                v.a[l] = s;
            }
            v.phi = covariant_gradient(local, z, h)[e];
            return v;
        };
    }
    return t;
}

// ---------------------------------------------------------------------------

WeitzenbockReport weitzenbock_check(const MonopoleField& bg, const TangentField& u,
                                    const Grid3& g, double h, double residual_tol,
                                    int threads) {
    WeitzenbockReport rep;
    // on-shell precondition sampled on a few probe points inside the grid
    double maxres = 0;
    for (int i = 0; i < 8; ++i) {
        const double t = (i + 0.5) / 8.0;
        const Vec3 p = g.center + Vec3{g.half_width * 0.5 * std::cos(6.28 * t),
                                       g.half_width * 0.5 * std::sin(6.28 * t),
                                       g.half_width * (t - 0.5)};
        maxres = std::max(maxres, bogomolny_residual_at(bg, p, h));
    }
    rep.background_residual = maxres;
    if (maxres > residual_tol)
        throw Error(Err::ResidualTooLarge, "weitzenbock_check: background off shell");

    auto lhs_density = [&](const Vec3& z) {
        return norm2(coupled_apply_adjoint(bg, u, z, h));
    };
    auto rhs_density = [&](const Vec3& z) {
        const TangentJac j = fd_tangent_jac(u, z, h);
        const SuTriple A = bg.potential(z);
        const Su2 phi_bg = bg.higgs(z);
        const TangentValue uz = u(z);
        double s = 0;
        for (int i = 0; i < 3; ++i) {
            for (int l = 0; l < 3; ++l) s += norm2(j.da[i][l] + bracket(A[i], uz.a[l]));
            s += norm2(j.dphi[i] + bracket(A[i], uz.phi));
        }
        for (int l = 0; l < 3; ++l) s += norm2(bracket(phi_bg, uz.a[l]));
        s += norm2(bracket(phi_bg, uz.phi));
        return s;
    };

    rep.lhs = integrate_box(g, lhs_density, threads).value;
    rep.rhs = integrate_box(g, rhs_density, threads).value;
    rep.gap = std::abs(rep.lhs - rep.rhs) / std::max(std::abs(rep.lhs), 1e-30);
    return rep;
}

TangentField random_bump_field(std::uint64_t seed, const Vec3& c, double R) {
    std::mt19937_64 rng(seed);
    auto draw = [&rng]() {
        // uniform in [-1, 1], reproducible across platforms
        return 2.0 * (double(rng() >> 11) * (1.0 / 9007199254740992.0)) - 1.0;
    };
    // low-order polynomial coefficients per su2 slot and field component
    std::array<std::array<double, 4>, 16> coef{};
    for (auto& row : coef)
        for (auto& v : row) v = draw();

    TangentField t;
    t.decaying = true;
    t.eval = [=](const Vec3& z) -> TangentValue {
        TangentValue out;
        const Vec3 w = (z - c) / R;
        const double q = norm2(w);
        if (q >= 1.0) return out;
        const double b = std::exp(1.0 - 1.0 / (1.0 - q));  // C^infty bump
        int idx = 0;
        auto poly = [&](int comp) {
            const auto& cc = coef[comp];
            return cc[0] + cc[1] * w.x + cc[2] * w.y + cc[3] * w.z;
        };
        for (int l = 0; l < 3; ++l) {
            Vec3 col{poly(idx), poly(idx + 1), poly(idx + 2)};
            out.a[l] = Su2(col * b);
            idx += 3;
        }
        Vec3 colp{poly(12), poly(13), poly(14)};
        out.phi = Su2(colp * b);
        return out;
    };
    return t;
}

TangentField correlated_bump_field(const MonopoleField& bg, double R, double mix) {
    TangentField tau0 = moduli_tangent(bg, 0, 1e-3);
    TangentField u;
    u.eval = [tau0, R, mix](const Vec3& z) {
        const double q = norm2(z) / (R * R);
        if (q >= 1.0) return TangentValue{};
        const double b = std::exp(1.0 - 1.0 / (1.0 - q));
        const TangentValue v = tau0(z);
        return (v + quaternion_action(1, v) * mix) * b;
    };
    return u;
}

namespace {

struct ScaledMap : FieldMap {
    std::shared_ptr<const FieldMap> base;
    double higgs_factor = 1.0, potential_factor = 1.0;
    Su2 higgs(const Vec3& z) const override { return base->higgs(z) * higgs_factor; }
    SuTriple potential(const Vec3& z) const override {
        SuTriple a = base->potential(z);
        for (int i = 0; i < 3; ++i) a[i] = a[i] * potential_factor;
        return a;
    }
};

}  // namespace

MonopoleField detune_higgs(const MonopoleField& bg, double factor) {
    auto m = std::make_shared<ScaledMap>();
    m->base = bg.map;
    m->higgs_factor = factor;
    MonopoleField out = bg;
    out.map = m;
    out.mass = bg.mass * factor;
    out.mode = EvalMode::Sampled;
    return out;
}

MonopoleField detune_potential(const MonopoleField& bg, double factor) {
    auto m = std::make_shared<ScaledMap>();
    m->base = bg.map;
    m->potential_factor = factor;
    MonopoleField out = bg;
    out.map = m;
    out.mode = EvalMode::Sampled;
    return out;
}

// ---------------------------------------------------------------------------

IndicialReport indicial_roots_check() {
    IndicialReport rep;
    const Vec3 samples[4] = {{0.8, -0.3, 0.5}, {-1.2, 0.9, 0.4}, {0.3, 1.4, -0.8},
                             {-0.5, -0.7, 1.1}};

    auto add = [&](const std::string& name, double value, double tol, bool want_small) {
        IndicialReport::Line l;
        l.name = name;
        l.value = value;
        l.tolerance = tol;
        l.pass = want_small ? (value <= tol) : (value > tol);
        rep.lines.push_back(l);
    };

    // degree -2 family: f0 and three independent fc
    {
        double worst = 0;
        FourField f0 = kernel_f0();
        for (const Vec3& z : samples) worst = std::max(worst, norm(model_apply(f0, z)));
        for (int i = 0; i < 3; ++i) {
            FourField fc = kernel_fc(axis_vec(i));
            for (const Vec3& z : samples) worst = std::max(worst, norm(model_apply(fc, z)));
        }
        add("degree_-2_kernel", worst, 1e-9, true);
    }

    // negative branch, seeds of degree 1 and 2 -> homogeneity -3, -4
    for (int deg : {0, 1}) {
        double worst = 0;
        for (const auto& s : harmonic_seed_table(deg)) {
            if (s.degree != deg) continue;
            FourField u = homogeneous_solution_negative(s);
            for (const Vec3& z : samples) {
                // FD application of L to the numerically assembled u
                const FourValue lu = model_apply(u, z, 2e-4);
                worst = std::max(worst, norm(lu) / std::max(1.0, norm(u(z))));
            }
        }
        add("degree_" + std::to_string(-2 - deg) + "_family", worst, 5e-5, true);
    }

    // positive branch: u = L h with polynomial harmonic seeds of degree <= 3
    for (int deg : {1, 2, 3}) {
        double worst = 0;
        for (const auto& s : harmonic_seed_table(deg)) {
            if (s.degree != deg) continue;
            FourField u = homogeneous_solution_positive(s);
            for (const Vec3& z : samples)
                worst = std::max(worst, norm(model_apply(u, z, 1e-3)));
        }
        add("degree_" + std::to_string(deg - 1) + "_family", worst, 1e-7, true);
    }

    // exclusion: no kernel element of pure rate 1/r; the finite ansatz
    // u = (c0, cv)/r has |Lu| bounded below on the unit sphere
    {
        double best = 1e30;
        std::mt19937_64 rng(12345);
        for (int trial = 0; trial < 256; ++trial) {
            double c0 = 2.0 * (double(rng() >> 11) * (1.0 / 9007199254740992.0)) - 1.0;
            Vec3 cv{2.0 * (double(rng() >> 11) * (1.0 / 9007199254740992.0)) - 1.0,
                    2.0 * (double(rng() >> 11) * (1.0 / 9007199254740992.0)) - 1.0,
                    2.0 * (double(rng() >> 11) * (1.0 / 9007199254740992.0)) - 1.0};
            const double nn = std::sqrt(c0 * c0 + norm2(cv));
            if (nn < 1e-6) continue;
            c0 /= nn;
            cv = cv / nn;
            // L(r^{-1}(c0, cv)) = ((c0 z - z x cv)/r^3, -cv.z/r^3)
            double worst_pt = 0;
            for (const Vec3& z : samples) {
                const double r2 = norm2(z);
                const double r3 = std::pow(r2, 1.5);
                const Vec3 arow = (z * c0 - cross(z, cv)) / r3;
                const double phirow = -dot(cv, z) / r3;
                worst_pt = std::max(worst_pt,
                                    std::sqrt(norm2(arow) + phirow * phirow) * r2);
            }
            best = std::min(best, worst_pt);
        }
        add("rate_-1_excluded", best, 0.3, false);
    }

    return rep;
}

}  // namespace linear
}  // namespace monolab
