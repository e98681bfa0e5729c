// Fields on R^3: gauge potential + Higgs pairs, covariant differencing,
// curvature, the first-order residual |*F_A - grad_A Phi|, energy and L2
// pairings.  Analytic derivative callbacks are used when a field provides
// them; otherwise 2nd-order central differences with a stencil width h that
// is independent of any sampling grid.
#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "monolab/grid.hpp"
#include "monolab/su2.hpp"

namespace monolab {

using SuTriple = std::array<Su2, 3>;          // one su(2) value per spatial slot
using SuJacobian = std::array<SuTriple, 3>;   // [i][j] = d_i A_j

// Abstract evaluator for a configuration (A, Phi).
class FieldMap {
public:
    virtual ~FieldMap() = default;
    virtual Su2 higgs(const Vec3& z) const = 0;
    virtual SuTriple potential(const Vec3& z) const = 0;

    virtual bool analytic_derivatives() const { return false; }
    virtual SuTriple higgs_grad(const Vec3&) const {
        throw Error(Err::ConfigParse, "field: no analytic higgs_grad");
    }
    virtual SuJacobian potential_grad(const Vec3&) const {
        throw Error(Err::ConfigParse, "field: no analytic potential_grad");
    }
};

enum class EvalMode { Analytic, Sampled };

struct MonopoleField {
    std::shared_ptr<const FieldMap> map;
    double mass = 1.0;
    int charge = 0;
    EvalMode mode = EvalMode::Analytic;

    Su2 higgs(const Vec3& z) const { return map->higgs(z); }
    SuTriple potential(const Vec3& z) const { return map->potential(z); }
};

// Tangent-type pair (a, phi)
struct TangentValue {
    SuTriple a{};
    Su2 phi{};

    TangentValue operator+(const TangentValue& o) const {
        TangentValue r;
        for (int i = 0; i < 3; ++i) r.a[i] = a[i] + o.a[i];
        r.phi = phi + o.phi;
        return r;
    }
    TangentValue operator-(const TangentValue& o) const {
        TangentValue r;
        for (int i = 0; i < 3; ++i) r.a[i] = a[i] - o.a[i];
        r.phi = phi - o.phi;
        return r;
    }
    TangentValue operator*(double s) const {
        TangentValue r;
        for (int i = 0; i < 3; ++i) r.a[i] = a[i] * s;
        r.phi = phi * s;
        return r;
    }
};

inline double inner(const TangentValue& u, const TangentValue& v) {
    double s = inner(u.phi, v.phi);
    for (int i = 0; i < 3; ++i) s += inner(u.a[i], v.a[i]);
    return s;
}

inline double norm2(const TangentValue& u) { return inner(u, u); }

// Tail metadata for L2 pairings: a declared abelian far-field model that the
// field approaches (used to integrate the exterior of the quadrature domain).
struct AbelianTailModel {
    enum class Kind { PhaseOfPole, TranslationOfPole };
    Kind kind = Kind::PhaseOfPole;
    Vec3 pole;          // pole location
    double amplitude;   // kappa * k of the pole
    int direction = 0;  // translation axis (TranslationOfPole only)
    Su2 su2_dir;        // diagonal direction in su(2)
};

struct TangentField {
    std::function<TangentValue(const Vec3&)> eval;
    bool decaying = false;
    std::optional<AbelianTailModel> tail;

    TangentValue operator()(const Vec3& z) const { return eval(z); }
};

// Closed form of a declared tail model (exact abelian pole fields).
TangentValue tail_model_value(const AbelianTailModel& m, const Vec3& z);

// ---------------------------------------------------------------------------
// differential operators

// grad_A Phi in one direction: central difference of Phi plus [A_dir, Phi]
Su2 covariant_derivative(const MonopoleField& f, const Vec3& z, int direction, double h);

// grid-aware variant: refuses stencils that touch masked points
Su2 covariant_derivative(const MonopoleField& f, const Grid3& g, const Vec3& z,
                         int direction, double h);

// all three directions at once
SuTriple covariant_gradient(const MonopoleField& f, const Vec3& z, double h);

// Hodge-dual curvature (*F)_i = (F_23, F_31, F_12), F_ij = d_i A_j - d_j A_i + [A_i, A_j]
SuTriple curvature(const MonopoleField& f, const Vec3& z, double h);

// pointwise |*F_A - grad_A Phi|
double bogomolny_residual_at(const MonopoleField& f, const Vec3& z, double h);

struct ResidualSummary {
    double max = 0;
    double l2 = 0;            // sqrt of the volume integral of |res|^2
    std::int64_t samples = 0;
    std::int64_t masked = 0;
};

struct ResidualField {
    std::vector<double> values;  // per grid point, masked -> -1
    ResidualSummary summary;
};

ResidualField bogomolny_residual(const MonopoleField& f, const Grid3& g, double h,
                                 int threads = 0);

// ---------------------------------------------------------------------------
// energy and pairings

struct EnergyReport {
    double total = 0;
    double box_value = 0;
    double tail_value = 0;
    double tail_error_estimate = 0;
    double excluded_volume = 0;
};

// Quadrature of |F_A|^2 + |grad_A Phi|^2 over box /\ ball(L), plus the far
// field integrated radially on spherical shells from L outward.  L defaults
// to the inscribed sphere of the box.
EnergyReport ymh_energy(const MonopoleField& f, const Grid3& g, double h_fd = 1e-3,
                        int threads = 0);

struct PairReport {
    double value = 0;
    double box_value = 0;
    double tail_value = 0;
    double tail_bound = 0;
};

// integral over the box (inscribed-ball masked) of <u, v> pointwise, plus the
// exterior contribution of the declared tail models when both sides carry one.
PairReport l2_pair(const TangentField& u, const TangentField& v, const Grid3& g,
                   int threads = 0);

// ---------------------------------------------------------------------------
// gauge transformations

struct GaugeMap {
    std::function<SuGroup(const Vec3&)> g;
    // optional analytic derivative: (d_i g) g^{-1} as su(2) values
    std::function<SuTriple(const Vec3&)> dg_ginv;
};

// A -> g A g^-1 - (dg) g^-1, Phi -> g Phi g^-1
MonopoleField gauge_transform(const MonopoleField& f, const GaugeMap& gauge,
                              double h_dg = 1e-4);

// ---------------------------------------------------------------------------
// spherical far-field quadrature (tails)

// integrate f over the exterior of the sphere |z - c| = L, f smooth and
// decaying at least like 1/r^4; radial substitution u = L/r with Gauss
// panels, product angular rule.
double integrate_sphere_exterior(const Vec3& c, double L,
                                 const std::function<double(const Vec3&)>& f,
                                 int n_radial = 24, int n_theta = 24, int n_phi = 48);

// integral of f over the sphere |z - c| = R (surface measure)
double integrate_sphere(const Vec3& c, double R,
                        const std::function<double(const Vec3&)>& f, int n_theta = 64,
                        int n_phi = 128);

}  // namespace monolab
