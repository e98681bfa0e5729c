// The linearized first-order operator and its flat model
//   L (a, phi) = (curl a - grad phi, div a)          (model)
//   L_(A,Phi)  = model coupled through A plus ad(Phi)  (background)
// together with the four moduli tangent fields of a background monopole,
// homogeneous-solution checks, and the on-shell Bochner-type identity.
#pragma once

#include <functional>
#include <vector>

#include "monolab/field.hpp"

namespace monolab {
namespace linear {

// scalar 4-component field (phi, a1, a2, a3) for the uncoupled model
struct FourValue {
    double phi = 0;
    Vec3 a{};

    FourValue operator+(const FourValue& o) const { return {phi + o.phi, a + o.a}; }
    FourValue operator-(const FourValue& o) const { return {phi - o.phi, a - o.a}; }
    FourValue operator*(double s) const { return {phi * s, a * s}; }
};

inline double norm(const FourValue& v) {
    return std::sqrt(v.phi * v.phi + norm2(v.a));
}

struct FourField {
    std::function<FourValue(const Vec3&)> eval;
    // optional exact Jacobian: jac(z)[i] = d_i (phi, a)
    std::function<std::array<FourValue, 3>(const Vec3&)> jac;

    FourValue operator()(const Vec3& z) const { return eval(z); }
};

// L u = (curl a - grad phi, div a); exact Jacobian used when available
FourValue model_apply(const FourField& u, const Vec3& z, double h = 1e-4);

// L^2 should equal the (positive) componentwise Laplacian -sum d_i^2
FourValue model_apply_twice(const FourField& u, const Vec3& z, double h = 1e-3);

// kernel elements of the model operator (degree -2 family)
FourField kernel_f0();
FourField kernel_fc(const Vec3& c);

// u = L(|z|^(-2n-1) h) for a harmonic seed; returns the field with exact jac
// for the built-in seed table (degree 0..3)
struct HarmonicSeed {
    int degree = 0;
    int index = 0;  // which basis element
};
std::vector<HarmonicSeed> harmonic_seed_table(int max_degree);
FourField homogeneous_solution_negative(const HarmonicSeed& seed);  // degree -2-n
FourField homogeneous_solution_positive(const HarmonicSeed& seed);  // degree n

// quaternionic action: I_i maps (phi, a) as quaternion left multiplication
TangentValue quaternion_action(int i, const TangentValue& u);

// ---------------------------------------------------------------------------
// coupled operator at a background

// L_(A,Phi)(a,phi) = (curl_A a - grad_A phi + [Phi, a], div_A a + [Phi, phi])
TangentValue coupled_apply(const MonopoleField& bg, const TangentField& u, const Vec3& z,
                           double h = 1e-3);

// adjoint: same first-order part, -ad(Phi)
TangentValue coupled_apply_adjoint(const MonopoleField& bg, const TangentField& u,
                                   const Vec3& z, double h = 1e-3);

// Coulomb-slice functional d*_(A,Phi)(a,phi) = div_A a - [Phi, phi] (sign of
// the bottom row of L)
Su2 coulomb_functional(const MonopoleField& bg, const TangentField& u, const Vec3& z,
                       double h = 1e-3);

// ---------------------------------------------------------------------------
// moduli tangent fields of a background

// index 0: phase ((-grad_A Phi), 0); 1..3: translations ((iota_e F), grad_e Phi)
TangentField moduli_tangent(const MonopoleField& bg, int index, double h = 1e-3);

// ---------------------------------------------------------------------------
// Bochner/Weitzenboeck gap on shell

struct WeitzenbockReport {
    double lhs = 0;   // |L* u|^2 integrated
    double rhs = 0;   // |grad_A u|^2 + |ad(Phi) u|^2 integrated
    double gap = 0;   // relative
    double background_residual = 0;
};

WeitzenbockReport weitzenbock_check(const MonopoleField& bg, const TangentField& u,
                                    const Grid3& g, double h = 1e-3,
                                    double residual_tol = 1e-6, int threads = 0);

// deterministic random bump field supported in |z - c| < R
TangentField random_bump_field(std::uint64_t seed, const Vec3& c, double R);

// Background-correlated bump (tau_0 mixed with a quaternion partner under a
// bump window): couples to the on-shell defect much more strongly than
// uncorrelated noise, which makes it the right probe for negative controls.
TangentField correlated_bump_field(const MonopoleField& bg, double R, double mix = 0.7);

// detuned copies of a background for negative controls
MonopoleField detune_higgs(const MonopoleField& bg, double factor);
MonopoleField detune_potential(const MonopoleField& bg, double factor);

// ---------------------------------------------------------------------------
// indicial-root style checks on the finite ansatz families

struct IndicialReport {
    struct Line {
        std::string name;
        double value = 0;
        double tolerance = 0;
        bool pass = false;
    };
    std::vector<Line> lines;
    bool all_pass() const {
        for (const auto& l : lines)
            if (!l.pass) return false;
        return true;
    }
};

IndicialReport indicial_roots_check();

}  // namespace linear
}  // namespace monolab
