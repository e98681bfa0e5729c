// Pregluing on the epsilon-fiber in flat coordinates: charge-1 cluster
// monopoles at z_j = zeta_j / eps, spliced through their two-patch abelian
// gauge into the interstitial multi-pole Dirac field, with or without the
// first-order abelian Higgs correction.  Region-resolved residual norms and
// their decay orders in eps, plus the pairwise-difference curvature forms on
// configuration space.
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "monolab/dirac.hpp"
#include "monolab/field.hpp"

namespace monolab {
namespace preglue {

struct ClusterSpec {
    std::vector<Vec3> zetas;   // normalized so sum |zeta_i|^2 = 1
    std::vector<int> charges;  // k_j (v1: all 1)
    int k0 = 0;                // central charge (v1: 0)
    double mass = 1.0;
    double epsilon = 0.1;
    std::vector<double> phases;

    double min_separation = 0;  // min pairwise |zeta_i - zeta_j|
    double min_radius = 0;      // min |zeta_i|

    static ClusterSpec make(std::vector<Vec3> zetas, std::vector<int> charges, double mass,
                            double epsilon, std::vector<double> phases = {});

    int total_charge() const;
    Vec3 center_z(size_t j) const { return zetas[j] / epsilon; }
};

struct SpliceLayout {
    double r_out_factor = 0.4;  // R_out = factor * (min separation in z coords)
    double r_in_factor = 0.5;   // R_in = factor * R_out

    double r_out(const ClusterSpec& s) const {
        return r_out_factor * s.min_separation / s.epsilon;
    }
    double r_in(const ClusterSpec& s) const { return r_in_factor * r_out(s); }
};

// C^2 monotone cutoff: 1 at u<=0, 0 at u>=1
double smoothstep_down(double u);

enum class Region { Core, Annulus, Interstitial, Far };

std::string region_name(Region r);

// Which interstitial Higgs the construction carries.
enum class HiggsCorrection { None, FirstOrder };  // naive vs eps Phi_1

class PregluedField;

struct Pregluing {
    std::shared_ptr<const PregluedField> impl;
    MonopoleField field;  // auto-context evaluator (values are gauge-local)
    ClusterSpec spec;
    SpliceLayout layout;
    HiggsCorrection correction;
};

Pregluing build_pregluing(const ClusterSpec& spec, const SpliceLayout& layout,
                          HiggsCorrection correction = HiggsCorrection::FirstOrder);

// Gauge context: core gauge of one cluster, or the abelian gauge with a
// string-patch choice per pole.  Stencils are evaluated in the context fixed
// at their center, so every derivative sees one smooth gauge.
struct GaugeContext {
    int core = -1;               // cluster index, or -1 for abelian
    std::vector<Vec3> strings;   // per-pole string ray directions
};

class PregluedField {
public:
    PregluedField(ClusterSpec spec, SpliceLayout layout, HiggsCorrection corr);

    GaugeContext context_at(const Vec3& z) const;
    Region region_of(const Vec3& z) const;

    Su2 higgs(const Vec3& z, const GaugeContext& ctx) const;
    SuTriple potential(const Vec3& z, const GaugeContext& ctx) const;

    // residual with the whole stencil evaluated in the context of z
    double residual_at(const Vec3& z, double h_fd) const;

    // rotation into the abelian gauge around cluster j (throws on string/center)
    SuGroup cluster_rotation(size_t j, const Vec3& z, const GaugeContext& ctx) const;

    double r_in() const { return r_in_; }
    double r_out() const { return r_out_; }
    double far_radius() const { return far_radius_; }
    const ClusterSpec& spec() const { return spec_; }
    const dirac::DiracSpec& interstitial_spec() const { return dirac_; }

    double cluster_chi(size_t j, const Vec3& z) const;

private:
    Su2 higgs_abelian(const Vec3& z, const GaugeContext& ctx) const;
    SuTriple potential_abelian(const Vec3& z, const GaugeContext& ctx) const;

    ClusterSpec spec_;
    SpliceLayout layout_;
    HiggsCorrection corr_;
    dirac::DiracSpec dirac_;  // pole bookkeeping for the interstitial field
    std::vector<MonopoleField> cluster_fields_;
    double r_in_ = 0, r_out_ = 0, far_radius_ = 0;
};

// ---------------------------------------------------------------------------
// residual decay orders

struct RegionNorms {
    Region region;
    double sup = 0;
    double sup_over_eps = 0;
    double l2 = 0;
    std::int64_t samples = 0;
};

struct ResidualScanPoint {
    double epsilon;
    HiggsCorrection correction;
    std::vector<RegionNorms> norms;
};

struct SlopeFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
};

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct ResidualOrdersResult {
    std::vector<ResidualScanPoint> points;
    // fitted slope per (correction, region, norm kind)
    struct Fit {
        HiggsCorrection correction;
        Region region;
        std::string norm_kind;
        SlopeFit fit;
    };
    std::vector<Fit> fits;
};

struct ResidualScanOptions {
    int grid_n = 101;
    double h_fd = 1e-3;
    double box_factor = 3.0;  // box half width = factor / eps
    int threads = 0;
};

ResidualOrdersResult residual_orders(const ClusterSpec& base_spec,
                                     const std::vector<double>& eps_sweep,
                                     const SpliceLayout& layout,
                                     const ResidualScanOptions& opt = {});

// total boundary charge of the built field from the Higgs flux on a large
// sphere (gauge-invariant measurement on the glued data)
double large_sphere_charge(const Pregluing& p, double radius_factor = 1.25);

// ---------------------------------------------------------------------------
// configuration-space curvature forms (pairwise-difference pullbacks)

using ConfigTangent = std::vector<Vec3>;  // one R^3 slot per moving point

// the sphere generator pulled back at w: tau(p, q) = -w . (p x q) / |w|^3
double sphere_form(const Vec3& w, const Vec3& p, const Vec3& q);

struct GmCurvatureForm {
    std::vector<Vec3> zetas;
    std::vector<int> charges;
    size_t j = 0;

    // F_{a_j}(U, V) = sum_{i != j} k_i tau|_{zeta_j - zeta_i}(U_j - U_i, V_j - V_i)
    double operator()(const ConfigTangent& U, const ConfigTangent& V) const;
};

GmCurvatureForm gm_curvature_form(const ClusterSpec& spec, size_t j);

// c1-normalized flux of the form over the sphere of zeta_j motion around
// zeta_i: -(1/4pi) * oint, which evaluates to k_i
double gm_flux(const GmCurvatureForm& form, size_t around_pole, double radius,
               int n_theta = 96, int n_phi = 192);

// numeric exterior derivative on a constant 3-frame at the base configuration
double gm_exterior_derivative(const GmCurvatureForm& form, const ConfigTangent& U,
                              const ConfigTangent& V, const ConfigTangent& W,
                              double h = 1e-4);

}  // namespace preglue
}  // namespace monolab
