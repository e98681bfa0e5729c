// Numeric gates used by the verification suite and emitted in run manifests.
#pragma once

namespace monolab {
namespace tol {

// first-order residual of the exact charge-1 field
inline constexpr double bps_residual_analytic = 1e-10;
inline constexpr double bps_residual_fd = 1e-5;  // at h = 1e-3

// energy identity: 4 pi m k within 1%
inline constexpr double energy_rel = 0.01;

// tangent-norm identity: 2 pi m k within 1%
inline constexpr double tau_gram_rel = 0.01;

// abelian integrality
inline constexpr double flux_abs = 1e-5;
inline constexpr double laplace_slope_dev = 0.2;

// model-operator kernel / L^2 = Laplacian
inline constexpr double kernel_abs = 1e-9;
inline constexpr double l2_slope_dev = 0.2;

// on-shell Bochner identity
inline constexpr double weitzenbock_gap = 0.02;
inline constexpr double weitzenbock_control_gap = 0.10;

// residual order sweep
inline constexpr double naive_slope = 1.0;
inline constexpr double naive_slope_dev = 0.25;
inline constexpr double naive_r2_min = 0.98;
inline constexpr double corrected_slope_gain = 0.75;

// leading-order metric
inline constexpr double gram_block_rel_floor = 0.02;   // max(2%, 3 eps)
inline constexpr double gram_block_eps_factor = 3.0;
inline constexpr double gram_offblock_eps_factor = 0.5;  // <= 0.5 eps * 2 pi
inline constexpr double gram_halving_ratio = 0.7;

// pairwise-difference flux pairing
inline constexpr double gm_flux_abs = 1e-5;

}  // namespace tol
}  // namespace monolab
