// L2 Gram matrices of cluster variation fields on pregluing configurations:
// per-cluster phase + translation tangents, cut off through the splice
// annulus into their abelian pole models, paired on a composite grid with
// exact spherical far-field tails.  Targets: block-diagonal 2 pi m k_j I_4.
#pragma once

#include <string>
#include <vector>

#include "monolab/preglue.hpp"

namespace monolab {
namespace metric {

struct VariationBasis {
    // flattened: cluster j, component a (0 = phase, 1..3 = translations)
    struct Element {
        size_t cluster = 0;
        int component = 0;
        AbelianTailModel tail;
    };
    std::vector<Element> elements;
    std::shared_ptr<const preglue::PregluedField> field;

    size_t size() const { return elements.size(); }

    // value of element e at z in the gauge context ctx
    TangentValue eval(size_t e, const Vec3& z, const preglue::GaugeContext& ctx) const;
};

VariationBasis variation_basis(const preglue::Pregluing& p);

struct GramOptions {
    int coarse_n = 121;
    int fine_n = 81;
    double fine_half_width = 4.0;
    double box_margin = 1.15;  // coarse half width = margin * (|z|max + R_out)
    int threads = 0;
};

struct GramReport {
    size_t n_clusters = 0;
    std::vector<double> matrix;  // row-major (4N)^2
    std::vector<double> target;  // block-diagonal 2 pi m k_j I4
    double off_block_max = 0;
    double block_dev_max = 0;    // max relative deviation within diagonal blocks
    double symmetry_error = 0;
    double min_eigenvalue = 0;
    double epsilon = 0;

    double at(size_t a, size_t b) const { return matrix[a * 4 * n_clusters + b]; }
};

GramReport gram(const VariationBasis& basis, const preglue::Pregluing& p,
                const GramOptions& opt = {});

// Coulomb-slice diagnostic: |d*_(A,Phi) u| sampled on interstitial points
double coulomb_defect(const VariationBasis& basis, size_t element,
                      const preglue::Pregluing& p, const std::vector<Vec3>& points,
                      double h_fd = 1e-3);

// ---------------------------------------------------------------------------

struct MetricSweepRow {
    double epsilon = 0;
    double block_dev_max = 0;
    double off_block_max = 0;
};

struct MetricSweepResult {
    std::vector<MetricSweepRow> rows;
    preglue::SlopeFit off_block_fit;  // log-log fit of off_block_max vs eps
};

MetricSweepResult metric_sweep(const preglue::ClusterSpec& base_spec,
                               const std::vector<double>& eps_sweep,
                               const preglue::SpliceLayout& layout,
                               const GramOptions& opt = {});

// ---------------------------------------------------------------------------

struct CentreSumReport {
    Vec3 fitted_centre;
    Vec3 charge_weighted_mean;
    double mismatch = 0;
    double fit_residual = 0;
};

CentreSumReport centre_sum_check(const preglue::Pregluing& p);

}  // namespace metric
}  // namespace monolab
