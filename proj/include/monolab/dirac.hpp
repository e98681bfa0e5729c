// Abelian multi-pole monopoles embedded diagonally in SU(2): harmonic Higgs
// field with poles, patchwise vector potentials, fluxes and framing phases.
//
// Conventions (pinned by the charge-1 tail calibration): the scalar part is
//   s(z) = mass - kappa * sum_j k_j / |z - z_j|,  kappa = 1/2,
// embedded as Phi = s * q with q = diag(i,-i) normalized; fluxes are
//   flux(S) = (1/2pi) oint_S grad(s) . n dA   (outward normal)
// which gives +k_j around pole j.
#pragma once

#include <optional>
#include <vector>

#include "monolab/field.hpp"

namespace monolab {
namespace dirac {

inline constexpr double kappa = 0.5;

struct Pole {
    Vec3 z;
    int k = 1;
    Vec3 string_dir{0, 0, -1};  // ray direction carrying the potential string
};

struct DiracSpec {
    std::vector<Pole> poles;
    double mass = 1.0;

    void validate() const;
    int total_charge() const;
};

// scalar Higgs part s(z); throws AtPole within `guard` of a pole
double higgs_scalar(const DiracSpec& spec, const Vec3& z, double guard = 1e-9);

// grad s
Vec3 higgs_scalar_grad(const DiracSpec& spec, const Vec3& z);

// embedded su(2) Higgs: s(z) * diag_direction
Su2 higgs(const DiracSpec& spec, const Vec3& z);

// one-pole vector potential with string along `string_dir` through the pole;
// amplitude = kappa * k.  Closed form, throws OnString near the ray.
Vec3 one_pole_potential(const Vec3& pole, int k, const Vec3& string_dir, const Vec3& z,
                        double guard = 1e-8);

// analytic curl of one_pole_potential (equals kappa k (z-p)/|z-p|^3)
Vec3 one_pole_curvature(const Vec3& pole, int k, const Vec3& z);

// summed potential; per-pole patch: if auto_patch, each pole uses its own or
// the opposite string, whichever ray is farther from z
SuTriple analytic_potential(const DiracSpec& spec, const Vec3& z, bool auto_patch = true);

// (*F)_i of the full spec (sum of one-pole curvatures, embedded)
SuTriple analytic_curvature(const DiracSpec& spec, const Vec3& z);

// The spec as a MonopoleField (diagonal SU(2) embedding, analytic derivatives)
MonopoleField su2_field(const DiracSpec& spec, bool auto_patch = true);

// ---------------------------------------------------------------------------
// fluxes

struct FluxResult {
    double value = 0;       // (1/2pi) oint grad(s).n dA
    double quad_error = 0;  // difference between two quadrature refinements
};

FluxResult flux(const DiracSpec& spec, const Vec3& center, double radius, int n_quad = 64);

// ---------------------------------------------------------------------------
// framed Dirac connections: a base spec plus an exact u(1) shift a -> a + d(mu)

struct DiracConnection {
    DiracSpec spec;
    // optional deformation: value of mu (real scalar) and its gradient
    std::function<double(const Vec3&)> mu;
    std::function<Vec3(const Vec3&)> grad_mu;

    Vec3 potential_u1(const Vec3& z) const;  // real coefficient 1-form (along q)
};

// relative phase e^{i u_j} per pole, from the line integral of (b - a) along
// a path from far away to a point near pole j; result in (-pi, pi].
struct FramingPhases {
    std::vector<double> phase;   // per pole, mod 2pi
    double max_curl_mismatch = 0;
};

FramingPhases framing_phase_compare(const DiracConnection& a, const DiracConnection& b,
                                    int n_segments = 256);

}  // namespace dirac
}  // namespace monolab
