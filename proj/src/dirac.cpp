#include "monolab/dirac.hpp"

#include <cmath>

#include "monolab/bps.hpp"

namespace monolab {
namespace dirac {

void DiracSpec::validate() const {
    if (mass <= 0) throw Error(Err::ConfigParse, "dirac: mass must be positive");
    for (size_t i = 0; i < poles.size(); ++i) {
        if (poles[i].k == 0) throw Error(Err::ConfigParse, "dirac: pole with k = 0");
        if (norm(poles[i].string_dir) < 1e-12)
            throw Error(Err::ConfigParse, "dirac: zero string direction");
        for (size_t j = i + 1; j < poles.size(); ++j)
            if (norm(poles[i].z - poles[j].z) < 1e-10)
                throw Error(Err::CoincidentPoints, "dirac: coincident poles");
    }
}

int DiracSpec::total_charge() const {
    int k = 0;
    for (const auto& p : poles) k += p.k;
    return k;
}

double higgs_scalar(const DiracSpec& spec, const Vec3& z, double guard) {
    double s = spec.mass;
    for (const auto& p : spec.poles) {
        const double r = norm(z - p.z);
        if (r < guard) throw Error(Err::AtPole, "dirac: evaluation at a pole");
        s -= kappa * p.k / r;
    }
    return s;
}

Vec3 higgs_scalar_grad(const DiracSpec& spec, const Vec3& z) {
    Vec3 g{};
    for (const auto& p : spec.poles) {
        const Vec3 w = z - p.z;
        const double r = norm(w);
        if (r < 1e-12) throw Error(Err::AtPole, "dirac: gradient at a pole");
        g += w * (kappa * p.k / (r * r * r));
    }
    return g;
}

Su2 higgs(const DiracSpec& spec, const Vec3& z) {
    return bps::diag_direction() * higgs_scalar(spec, z);
}

Vec3 one_pole_potential(const Vec3& pole, int k, const Vec3& string_dir, const Vec3& z,
                        double guard) {
    const Vec3 w = z - pole;
    const double r = norm(w);
    const Vec3 n = -normalized(string_dir);  // local axis; string at w along -n
    const double u = dot(n, w);
    const double denom = r * (r + u);
    if (denom < guard * guard)
        throw Error(Err::OnString, "dirac: evaluation on a string ray");
    return cross(n, w) * (kappa * k / denom);
}

Vec3 one_pole_curvature(const Vec3& pole, int k, const Vec3& z) {
    const Vec3 w = z - pole;
    const double r = norm(w);
    if (r < 1e-12) throw Error(Err::AtPole, "dirac: curvature at a pole");
    return w * (kappa * k / (r * r * r));
}

namespace {

// gradient d_i a_l of the one-pole potential (closed form)
std::array<Vec3, 3> one_pole_potential_grad(const Vec3& pole, int k, const Vec3& string_dir,
                                            const Vec3& z) {
    const Vec3 w = z - pole;
    const double r = norm(w);
    const Vec3 n = -normalized(string_dir);
    const double u = dot(n, w);
    const double G = 1.0 / (r * (r + u));
    const Vec3 nxw = cross(n, w);
    std::array<Vec3, 3> da;  // da[i] = d_i a
    for (int i = 0; i < 3; ++i) {
        const Vec3 ei = axis_vec(i);
        const double dGinv = 2.0 * w[i] + u * w[i] / r + r * n[i];
        da[i] = kappa * k * (cross(n, ei) * G - nxw * (G * G * dGinv));
    }
    return da;
}

// pick the string orientation whose ray is farther from z
Vec3 auto_string(const Pole& p, const Vec3& z) {
    auto ray_dist = [&](const Vec3& d) {
        const Vec3 w = z - p.z;
        const double t = dot(w, d);
        if (t <= 0) return norm(w);
        return std::sqrt(std::max(0.0, norm2(w) - t * t));
    };
    const Vec3 d = normalized(p.string_dir);
    return (ray_dist(d) >= ray_dist(-d)) ? d : -d;
}

class DiracSu2Map : public FieldMap {
public:
    DiracSu2Map(DiracSpec spec, bool auto_patch) : spec_(std::move(spec)), auto_(auto_patch) {}

    Su2 higgs(const Vec3& z) const override { return dirac::higgs(spec_, z); }

    SuTriple potential(const Vec3& z) const override {
        return analytic_potential_impl(spec_, z, auto_);
    }

    bool analytic_derivatives() const override { return true; }

    SuTriple higgs_grad(const Vec3& z) const override {
        const Vec3 g = higgs_scalar_grad(spec_, z);
        SuTriple out;
        for (int i = 0; i < 3; ++i) out[i] = bps::diag_direction() * g[i];
        return out;
    }

    SuJacobian potential_grad(const Vec3& z) const override {
        SuJacobian J{};
        for (const auto& p : spec_.poles) {
            const Vec3 sd = auto_ ? auto_string(p, z) : normalized(p.string_dir);
            auto da = one_pole_potential_grad(p.z, p.k, sd, z);
            for (int i = 0; i < 3; ++i)
                for (int l = 0; l < 3; ++l)
                    J[i][l] += bps::diag_direction() * da[i][l];
        }
        return J;
    }

    static SuTriple analytic_potential_impl(const DiracSpec& spec, const Vec3& z,
                                            bool auto_patch) {
        Vec3 sum{};
        for (const auto& p : spec.poles) {
            const Vec3 sd = auto_patch ? auto_string(p, z) : normalized(p.string_dir);
            sum += one_pole_potential(p.z, p.k, sd, z);
        }
        SuTriple out;
        for (int i = 0; i < 3; ++i) out[i] = bps::diag_direction() * sum[i];
        return out;
    }

private:
    DiracSpec spec_;
    bool auto_;
};

}  // namespace

SuTriple analytic_potential(const DiracSpec& spec, const Vec3& z, bool auto_patch) {
    return DiracSu2Map::analytic_potential_impl(spec, z, auto_patch);
}

SuTriple analytic_curvature(const DiracSpec& spec, const Vec3& z) {
    Vec3 sum{};
    for (const auto& p : spec.poles) sum += one_pole_curvature(p.z, p.k, z);
    SuTriple out;
    for (int i = 0; i < 3; ++i) out[i] = bps::diag_direction() * sum[i];
    return out;
}

MonopoleField su2_field(const DiracSpec& spec, bool auto_patch) {
    spec.validate();
    MonopoleField f;
    f.map = std::make_shared<DiracSu2Map>(spec, auto_patch);
    f.mass = spec.mass;
    f.charge = spec.total_charge();
    f.mode = EvalMode::Analytic;
    return f;
}

FluxResult flux(const DiracSpec& spec, const Vec3& center, double radius, int n_quad) {
    for (const auto& p : spec.poles) {
        const double d = std::abs(norm(p.z - center) - radius);
        if (d < 1e-6 * radius + 4.0 * radius / n_quad)
            throw Error(Err::SphereHitsPole, "flux: sphere passes too close to a pole");
    }
    auto integrand = [&](const Vec3& z) {
        const Vec3 nh = normalized(z - center);
        return dot(higgs_scalar_grad(spec, z), nh);
    };
    const double c = 1.0 / (2.0 * M_PI);
    const double v1 = c * integrate_sphere(center, radius, integrand, n_quad, 2 * n_quad);
    const double v2 = c * integrate_sphere(center, radius, integrand, 2 * n_quad, 4 * n_quad);
    return {v2, std::abs(v2 - v1)};
}

// ---------------------------------------------------------------------------

Vec3 DiracConnection::potential_u1(const Vec3& z) const {
    Vec3 a{};
    for (const auto& p : spec.poles) {
        const Vec3 sd = auto_string(p, z);
        a += one_pole_potential(p.z, p.k, sd, z);
    }
    if (grad_mu) a += grad_mu(z);
    return a;
}

FramingPhases framing_phase_compare(const DiracConnection& a, const DiracConnection& b,
                                    int n_segments) {
    if (a.spec.poles.size() != b.spec.poles.size())
        throw Error(Err::ConfigParse, "framing_phase_compare: specs differ");
    for (size_t i = 0; i < a.spec.poles.size(); ++i)
        if (norm(a.spec.poles[i].z - b.spec.poles[i].z) > 1e-12 ||
            a.spec.poles[i].k != b.spec.poles[i].k)
            throw Error(Err::ConfigParse, "framing_phase_compare: specs differ");

    auto diff = [&](const Vec3& z) { return b.potential_u1(z) - a.potential_u1(z); };

    // the difference must be closed; sample the curl by central differences
    FramingPhases out;
    {
        const double h = 1e-4;
        const Vec3 probes[3] = {{3.1, 1.7, -2.3}, {-4.2, 0.9, 1.1}, {1.3, -3.7, 2.9}};
        for (const Vec3& q : probes) {
            Vec3 curl{};
            for (int i = 0; i < 3; ++i) {
                const int j = (i + 1) % 3, k = (i + 2) % 3;
                const Vec3 dj = axis_vec(j) * h, dk = axis_vec(k) * h;
                const double djak = (diff(q + dj)[k] - diff(q - dj)[k]) * (0.5 / h);
                const double dkaj = (diff(q + dk)[j] - diff(q - dk)[j]) * (0.5 / h);
                curl.set(i, djak - dkaj);
            }
            out.max_curl_mismatch = std::max(out.max_curl_mismatch, norm(curl));
        }
        if (out.max_curl_mismatch > 1e-5)
            throw Error(Err::NonclosedDifference,
                        "framing_phase_compare: difference is not closed");
    }

    // integrate from a far anchor (u | S_infinity = 0) to each pole
    const Vec3 far_anchor = normalized(Vec3{0.3, 0.42, 0.86}) * 5e3;
    for (const auto& p : a.spec.poles) {
        // approach transverse to the string to stay off both rays
        Vec3 t = cross(normalized(p.string_dir), Vec3{0.71, -0.7, 0.08});
        if (norm(t) < 1e-6) t = cross(normalized(p.string_dir), Vec3{0.1, 0.97, 0.22});
        const Vec3 end = p.z + normalized(t) * 1e-3;
        // composite Simpson along the segment, graded toward the pole end so
        // the near-field of the difference is resolved on a long path
        const Vec3 seg = end - far_anchor;
        const int n = 2 * std::max(128, n_segments);
        const double grade = 4.0;
        auto path = [&](double tt) {
            const double s = 1.0 - std::pow(1.0 - tt, grade);
            return far_anchor + seg * s;
        };
        auto speed = [&](double tt) { return grade * std::pow(1.0 - tt, grade - 1.0); };
        double integral = 0;
        for (int i = 0; i < n; i += 2) {
            const double t0 = double(i) / n, t1 = double(i + 1) / n, t2 = double(i + 2) / n;
            const double dt = 1.0 / n;
            const double f0 = dot(diff(path(t0)), seg) * speed(t0);
            const double f1 = dot(diff(path(t1)), seg) * speed(t1);
            const double f2 = dot(diff(path(t2)), seg) * speed(t2);
            integral += dt * (f0 + 4.0 * f1 + f2) / 3.0;
        }
        double phase = std::remainder(integral, 2.0 * M_PI);
        out.phase.push_back(phase);
    }
    return out;
}

}  // namespace dirac
}  // namespace monolab
