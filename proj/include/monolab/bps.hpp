// The exact charge-1 spherically symmetric monopole in the first-order
// (self-dual) limit: hedgehog profiles, translations, mass scaling, framing
// phase, analytic derivatives, and the two-patch abelian gauge used for
// splicing.
#pragma once

#include <memory>

#include "monolab/field.hpp"

namespace monolab {
namespace bps {

// Radial profiles.  With s = 2 m r:
//   higgs_profile P(s)  = coth s - 1/s          (|Phi| = m P)
//   gauge_profile K(s)  = s / sinh s            (off-diagonal decay)
// Both are smooth at s = 0 (P ~ s/3, K ~ 1 - s^2/6).
double higgs_profile(double s);
double higgs_profile_deriv(double s);
double gauge_profile(double s);
double gauge_profile_deriv(double s);

struct BpsProfile {
    double mass = 1.0;
    double H(double r) const { return mass * higgs_profile(2.0 * mass * r); }
    double K(double r) const { return gauge_profile(2.0 * mass * r); }
};

// Hedgehog field centred at `center` with the given mass; framing phase t
// acts as the gauge transformation exp(t Phi).
MonopoleField bps_field(const Vec3& center, double mass, double phase = 0.0);

// Analytic covariant gradient and curvature of the unphased hedgehog
// (closed forms; independent routes, they agree only because the profiles
// solve the radial reduction).
SuTriple bps_covariant_gradient(const Vec3& center, double mass, const Vec3& z);
SuTriple bps_curvature(const Vec3& center, double mass, const Vec3& z);

// ---------------------------------------------------------------------------
// abelian (two-patch) gauge

enum class Patch { North, South };  // North excludes the ray center - t e3

// Rotation g(z) with Ad(g) Phi-hat = the diagonal direction q = -e3 for the
// hedgehog at `center`; string_dir is the unit ray direction excluded by the
// active patch (the hedgehog direction that cannot be rotated smoothly).
SuGroup abelian_rotation(const Vec3& n_hat, const Vec3& string_dir);

// The diagonal su(2) direction the abelian gauge aligns the Higgs with:
// q = -e3, i.e. diag(i, -i) normalized.
Su2 diag_direction();

struct AbelianizeReport {
    double max_offdiag_phi = 0;   // sup |split(Phi)_perp| on the sample shell
    double max_offdiag_a = 0;
    double shell_radius = 0;
};

// Gauge representative with Phi rotated onto diag_direction() on the patch.
// r_min guards the region where |Phi| >= mass/2 must hold.
MonopoleField abelianize(const MonopoleField& f, Patch patch, double r_min,
                         AbelianizeReport* report = nullptr);

// Fit of |Phi| ~ m - k/(2r) - (k/2) (v.n)/r^2 on sample shells; returns v/m.
struct CentreFit {
    Vec3 centre;
    double mass = 0;
    double pole_coeff = 0;  // fitted coefficient of 1/r (should be k/2)
    double residual = 0;
};

CentreFit centre_of(const MonopoleField& f, const std::vector<double>& shells);

}  // namespace bps
}  // namespace monolab
