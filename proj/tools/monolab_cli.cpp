// monolab command line: reproducible scenario runs with CSV/JSON artifacts
// and a manifest per run.  Exit codes: 0 all gates pass, 1 gate failure,
// 2 config error, 3 I/O error.
#include <cmath>
#include <cstdio>
#include <random>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "monolab/bps.hpp"
#include "monolab/dirac.hpp"
#include "monolab/io.hpp"
#include "monolab/linear_model.hpp"
#include "monolab/metric.hpp"
#include "monolab/preglue.hpp"
#include "monolab/tolerances.hpp"

using namespace monolab;
using preglue::Pregluing;
using preglue::build_pregluing;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "1.0.0";

struct RunContext {
    std::string command;
    std::string spec_path;
    std::string out_dir = "out";
    int grid_n = 0;
    double h_fd = 1e-3;
    int threads = 0;
    std::vector<double> sweep;
    long seed = 12345;
    bool strict = false;

    std::vector<std::string> artifacts;
    std::vector<std::string> failures;
    std::vector<std::string> warnings;

    void gate(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
    void warn(const std::string& what) { warnings.push_back(what); }

    std::string path(const std::string& name) {
        artifacts.push_back(name);
        return (fs::path(out_dir) / name).string();
    }
};

nlohmann::json tolerance_table() {
    nlohmann::json t;
    t["bps_residual_analytic"] = tol::bps_residual_analytic;
    t["bps_residual_fd"] = tol::bps_residual_fd;
    t["energy_rel"] = tol::energy_rel;
    t["tau_gram_rel"] = tol::tau_gram_rel;
    t["flux_abs"] = tol::flux_abs;
    t["laplace_slope_dev"] = tol::laplace_slope_dev;
    t["kernel_abs"] = tol::kernel_abs;
    t["l2_slope_dev"] = tol::l2_slope_dev;
    t["weitzenbock_gap"] = tol::weitzenbock_gap;
    t["weitzenbock_control_gap"] = tol::weitzenbock_control_gap;
    t["naive_slope"] = tol::naive_slope;
    t["naive_slope_dev"] = tol::naive_slope_dev;
    t["naive_r2_min"] = tol::naive_r2_min;
    t["corrected_slope_gain"] = tol::corrected_slope_gain;
    t["gram_block_rel_floor"] = tol::gram_block_rel_floor;
    t["gram_block_eps_factor"] = tol::gram_block_eps_factor;
    t["gram_offblock_eps_factor"] = tol::gram_offblock_eps_factor;
    t["gram_halving_ratio"] = tol::gram_halving_ratio;
    t["gm_flux_abs"] = tol::gm_flux_abs;
    return t;
}

void write_manifest(RunContext& ctx) {
    nlohmann::json m;
    m["tool"] = "monolab";
    m["version"] = kVersion;
    m["command"] = ctx.command;
    m["seed"] = ctx.seed;
    m["threads_flag"] = ctx.threads;
    m["h_fd"] = ctx.h_fd;
    if (!ctx.spec_path.empty()) {
        m["spec"] = ctx.spec_path;
        m["spec_hash"] = io::file_hash(ctx.spec_path);
    }
    m["tolerances"] = tolerance_table();
    m["artifacts"] = ctx.artifacts;
    m["gate_failures"] = ctx.failures;
    m["warnings"] = ctx.warnings;
    io::write_text((fs::path(ctx.out_dir) / "manifest.json").string(), m.dump(2) + "\n");
}

std::string fmt(double v) { return io::format_double(v); }

// ---------------------------------------------------------------------------

int run_bps_check(RunContext& ctx) {
    io::CsvWriter csv({"metric", "value", "threshold", "pass"});
    auto note = [&](const std::string& name, double value, double threshold, bool ok) {
        csv.row({name, fmt(value), fmt(threshold), ok ? "1" : "0"});
        ctx.gate(ok, name);
    };

    auto f = bps::bps_field({0, 0, 0}, 1.0);
    double worst_an = 0;
    for (double r = 0.2; r <= 10.0; r += 0.2)
        for (const Vec3 dir : {Vec3{1, 0, 0}, Vec3{0.6, 0.64, 0.48}, Vec3{0, -0.8, 0.6}})
            worst_an = std::max(worst_an, bogomolny_residual_at(f, dir * r, ctx.h_fd));
    note("residual_analytic_max", worst_an, tol::bps_residual_analytic,
         worst_an <= tol::bps_residual_analytic);

    struct Wrapper : FieldMap {
        std::shared_ptr<const FieldMap> base;
        Su2 higgs(const Vec3& p) const override { return base->higgs(p); }
        SuTriple potential(const Vec3& p) const override { return base->potential(p); }
    };
    auto w = std::make_shared<Wrapper>();
    w->base = f.map;
    MonopoleField ffd = f;
    ffd.map = w;
    double worst_fd = 0;
    for (double r = 0.2; r <= 10.0; r += 0.4)
        for (const Vec3 dir : {Vec3{1, 0, 0}, Vec3{0.6, 0.64, 0.48}})
            worst_fd = std::max(worst_fd, bogomolny_residual_at(ffd, dir * r, 1e-3));
    note("residual_fd_max", worst_fd, tol::bps_residual_fd, worst_fd <= tol::bps_residual_fd);

    const int n = ctx.grid_n > 0 ? (ctx.grid_n | 1) : 161;
    Grid3 g({0, 0, 0}, 12.0, n);
    const auto e1 = ymh_energy(f, g, ctx.h_fd, ctx.threads);
    note("energy_m1", e1.total, 4.0 * M_PI,
         std::abs(e1.total - 4.0 * M_PI) <= tol::energy_rel * 4.0 * M_PI);
    const auto e2 = ymh_energy(bps::bps_field({0, 0, 0}, 2.0), g, ctx.h_fd, ctx.threads);
    note("energy_m2", e2.total, 8.0 * M_PI,
         std::abs(e2.total - 8.0 * M_PI) <= tol::energy_rel * 8.0 * M_PI);

    const auto fit = bps::centre_of(f, {8.0, 10.0, 12.5, 15.0});
    note("centre_norm", norm(fit.centre), 1e-3, norm(fit.centre) <= 1e-3);
    note("pole_coefficient", fit.pole_coeff, 0.5, std::abs(fit.pole_coeff - 0.5) <= 0.01);

    // tangent Gram on the same grid
    Pregluing p = build_pregluing(preglue::ClusterSpec::make({{1, 0, 0}}, {1}, 1.0, 0.1),
                                  preglue::SpliceLayout{});
    metric::GramOptions go;
    go.coarse_n = 101;
    go.fine_n = 61;
    go.threads = ctx.threads;
    const auto gr = metric::gram(metric::variation_basis(p), p, go);
    double dev = 0;
    for (size_t a = 0; a < 4; ++a)
        for (size_t b = 0; b < 4; ++b)
            dev = std::max(dev, std::abs(gr.at(a, b) - ((a == b) ? 2.0 * M_PI : 0.0)));
    note("tau_gram_dev", dev, tol::tau_gram_rel * 2.0 * M_PI,
         dev <= tol::tau_gram_rel * 2.0 * M_PI);

    csv.save(ctx.path("bps_check.csv"));
    return 0;
}

int run_dirac_field(RunContext& ctx) {
    auto spec = io::load_dirac_spec(ctx.spec_path);
    auto f = dirac::su2_field(spec);

    const int n = ctx.grid_n > 0 ? (ctx.grid_n | 1) : 33;
    double hw = 4.0;
    for (const auto& p : spec.poles) hw = std::max(hw, 2.0 * norm(p.z));
    Grid3 g({0, 0, 0}, hw, n);
    for (const auto& p : spec.poles) g.excluded.push_back({p.z, 3.0 * g.spacing()});

    const auto snap = io::sample_field(f, g);
    io::write_snapshot_csv(snap, ctx.path("dirac_field.csv"));
    io::write_snapshot_binary(snap, ctx.path("dirac_field.mlf"));

    // residual samples off poles/strings (analytic derivatives)
    io::CsvWriter csv({"x", "y", "z", "residual"});
    double worst = 0;
    for (int i = 0; i < 64; ++i) {
        const double th = std::acos(-1.0 + 2.0 * (i + 0.5) / 64.0);
        const double ph = 2.39996322972865332 * i;
        const Vec3 z = Vec3{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                            std::cos(th)} *
                       (0.5 * hw);
        double r;
        try {
            r = bogomolny_residual_at(f, z, 0.0);
        } catch (const Error&) {
            continue;
        }
        worst = std::max(worst, r);
        csv.row({fmt(z.x), fmt(z.y), fmt(z.z), fmt(r)});
    }
    csv.save(ctx.path("dirac_residual.csv"));
    ctx.gate(worst <= 1e-10, "dirac_residual_analytic");
    return 0;
}

int run_flux(RunContext& ctx) {
    auto spec = io::load_dirac_spec(ctx.spec_path);
    io::CsvWriter csv({"label", "cx", "cy", "cz", "radius", "flux", "quad_error",
                       "nearest_integer", "pass"});
    bool all_ok = true;
    auto emit = [&](const std::string& label, const Vec3& c, double R) {
        const auto fl = dirac::flux(spec, c, R);
        const double nearest = std::round(fl.value);
        const bool ok = std::abs(fl.value - nearest) <= tol::flux_abs;
        all_ok = all_ok && ok;
        csv.row({label, fmt(c.x), fmt(c.y), fmt(c.z), fmt(R), fmt(fl.value),
                 fmt(fl.quad_error), fmt(nearest), ok ? "1" : "0"});
    };

    double dmin = 1e30, zmax = 0;
    for (size_t i = 0; i < spec.poles.size(); ++i) {
        zmax = std::max(zmax, norm(spec.poles[i].z));
        for (size_t j = i + 1; j < spec.poles.size(); ++j)
            dmin = std::min(dmin, norm(spec.poles[i].z - spec.poles[j].z));
    }
    if (spec.poles.size() == 1) dmin = 2.0;
    for (size_t i = 0; i < spec.poles.size(); ++i)
        emit("pole_" + std::to_string(i), spec.poles[i].z, 0.4 * dmin);
    emit("total", {0, 0, 0}, 2.0 * zmax + 3.0 * dmin);

    csv.save(ctx.path("fluxes.csv"));
    ctx.gate(all_ok, "flux_integrality");

    // harmonicity: 7-point Laplacian of the scalar part decays at rate h^2
    std::mt19937_64 rng(std::uint64_t(ctx.seed));
    auto draw = [&]() { return 2.0 * (double(rng() >> 11) / 9007199254740992.0) - 1.0; };
    std::vector<double> slopes;
    const double span = zmax + dmin;
    for (int trial = 0; trial < 64 && slopes.size() < 16; ++trial) {
        Vec3 z{span * draw(), span * draw(), span * draw()};
        bool near = false;
        for (const auto& p : spec.poles)
            if (norm(z - p.z) < 0.3 * dmin) near = true;
        if (near) continue;
        auto lap = [&](double h) {
            double acc = -6.0 * dirac::higgs_scalar(spec, z);
            for (int i = 0; i < 3; ++i)
                acc += dirac::higgs_scalar(spec, z + axis_vec(i) * h) +
                       dirac::higgs_scalar(spec, z - axis_vec(i) * h);
            return std::abs(acc / (h * h));
        };
        const double l0 = lap(0.01 * dmin), l2 = lap(0.0025 * dmin);
        if (l2 < 1e-12) continue;
        slopes.push_back(std::log(l0 / l2) / std::log(4.0));
    }
    std::sort(slopes.begin(), slopes.end());
    const double med = slopes.empty() ? 0.0 : slopes[slopes.size() / 2];
    io::CsvWriter hcsv({"quantity", "value", "expected", "pass"});
    const bool h_ok = !slopes.empty() && std::abs(med - 2.0) <= tol::laplace_slope_dev;
    hcsv.row({"laplacian_slope_median", fmt(med), "2", h_ok ? "1" : "0"});
    hcsv.save(ctx.path("harmonicity.csv"));
    ctx.gate(h_ok, "harmonicity_order");
    return 0;
}

int run_preglue(RunContext& ctx) {
    preglue::SpliceLayout layout;
    auto spec = io::load_cluster_spec(ctx.spec_path, nullptr, &layout);
    Pregluing p = build_pregluing(spec, layout);

    const int n = ctx.grid_n > 0 ? (ctx.grid_n | 1) : 81;
    Grid3 g({0, 0, 0}, 3.0 / spec.epsilon, n);

    std::array<double, 4> sup{};
    std::array<long long, 4> cnt{};
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k) {
                const Vec3 z = g.point(i, j, k);
                const auto reg = p.impl->region_of(z);
                double r;
                try {
                    r = p.impl->residual_at(z, ctx.h_fd);
                } catch (const Error&) {
                    continue;
                }
                sup[size_t(reg)] = std::max(sup[size_t(reg)], r);
                ++cnt[size_t(reg)];
            }

    io::CsvWriter csv({"region", "sup_residual", "samples"});
    for (int r = 0; r < 4; ++r)
        csv.row({preglue::region_name(preglue::Region(r)), fmt(sup[size_t(r)]),
                 std::to_string(cnt[size_t(r)])});
    csv.save(ctx.path("preglue_regions.csv"));

    const double charge = preglue::large_sphere_charge(p);
    io::CsvWriter ccsv({"quantity", "value", "expected", "pass"});
    const bool chern_ok = std::abs(charge - spec.total_charge()) <= 1e-4;
    ccsv.row({"boundary_charge", fmt(charge), fmt(double(spec.total_charge())),
              chern_ok ? "1" : "0"});
    ccsv.save(ctx.path("preglue_charge.csv"));
    ctx.gate(chern_ok, "boundary_charge");

    // configuration-space flux pairings: k_i for every moving/encircled pair
    if (spec.zetas.size() >= 2) {
        io::CsvWriter gcsv({"moving", "around", "flux", "expected", "pass"});
        bool gm_ok = true;
        const double R = 0.2 * spec.min_separation;
        for (size_t j = 0; j < spec.zetas.size(); ++j) {
            const auto form = preglue::gm_curvature_form(spec, j);
            for (size_t i = 0; i < spec.zetas.size(); ++i) {
                if (i == j) continue;
                const double fl = preglue::gm_flux(form, i, R);
                const bool ok = std::abs(fl - spec.charges[i]) <= tol::gm_flux_abs;
                gm_ok = gm_ok && ok;
                gcsv.row({std::to_string(j), std::to_string(i), fmt(fl),
                          std::to_string(spec.charges[i]), ok ? "1" : "0"});
            }
        }
        gcsv.save(ctx.path("gm_flux.csv"));
        ctx.gate(gm_ok, "gm_flux_pairing");
    }
    return 0;
}

int run_residual_scan(RunContext& ctx) {
    preglue::SpliceLayout layout;
    std::vector<double> sweep;
    auto spec = io::load_cluster_spec(ctx.spec_path, &sweep, &layout);
    if (!ctx.sweep.empty()) sweep = ctx.sweep;
    if (sweep.size() < 3)
        throw Error(Err::InsufficientSweep, "residual-scan: need >= 3 sweep epsilons");

    preglue::ResidualScanOptions opt;
    opt.grid_n = ctx.grid_n > 0 ? (ctx.grid_n | 1) : 101;
    opt.h_fd = ctx.h_fd;
    opt.threads = ctx.threads;
    const auto res = preglue::residual_orders(spec, sweep, layout, opt);

    // every row carries the fitted slope/r2 of its (correction, region, kind) series
    auto fit_for = [&](preglue::HiggsCorrection c, preglue::Region r,
                       const std::string& kind) -> const preglue::SlopeFit* {
        for (const auto& f : res.fits)
            if (f.correction == c && f.region == r && f.norm_kind == kind) return &f.fit;
        return nullptr;
    };

    io::CsvWriter csv({"epsilon", "correction", "region", "norm_kind", "value", "samples",
                       "slope", "r2"});
    for (const auto& pt : res.points) {
        const std::string corr =
            pt.correction == preglue::HiggsCorrection::FirstOrder ? "first_order" : "none";
        for (const auto& rn : pt.norms) {
            const std::string reg = preglue::region_name(rn.region);
            for (const std::string kind : {"sup", "sup_over_eps", "l2"}) {
                const double v = kind == "sup" ? rn.sup
                                 : kind == "sup_over_eps" ? rn.sup_over_eps
                                                          : rn.l2;
                const preglue::SlopeFit* f = fit_for(pt.correction, rn.region, kind);
                csv.row({fmt(pt.epsilon), corr, reg, kind, fmt(v),
                         std::to_string(rn.samples), f ? fmt(f->slope) : "",
                         f ? fmt(f->r2) : ""});
            }
        }
    }
    csv.save(ctx.path("residual_scan.csv"));

    double naive_slope = 0, naive_r2 = 0, corr_slope = 0;
    for (const auto& f : res.fits) {
        if (f.region == preglue::Region::Interstitial && f.norm_kind == "sup_over_eps") {
            if (f.correction == preglue::HiggsCorrection::None) {
                naive_slope = f.fit.slope;
                naive_r2 = f.fit.r2;
            } else {
                corr_slope = f.fit.slope;
            }
        }
    }

    ctx.gate(std::abs(naive_slope - tol::naive_slope) <= tol::naive_slope_dev,
             "naive_interstitial_slope");
    ctx.gate(naive_r2 >= tol::naive_r2_min, "naive_interstitial_r2");
    ctx.gate(corr_slope - naive_slope >= tol::corrected_slope_gain,
             "corrected_slope_gain");
    return 0;
}

int run_metric_gram(RunContext& ctx) {
    preglue::SpliceLayout layout;
    auto spec = io::load_cluster_spec(ctx.spec_path, nullptr, &layout);
    Pregluing p = build_pregluing(spec, layout);
    metric::GramOptions go;
    if (ctx.grid_n > 0) go.coarse_n = ctx.grid_n | 1;
    go.threads = ctx.threads;
    const auto g = metric::gram(metric::variation_basis(p), p, go);

    nlohmann::json j;
    j["epsilon"] = g.epsilon;
    j["n_clusters"] = g.n_clusters;
    std::vector<std::string> labels;
    for (size_t c = 0; c < g.n_clusters; ++c)
        for (const char* comp : {"phase", "t1", "t2", "t3"})
            labels.push_back("cluster" + std::to_string(c) + "." + comp);
    j["labels"] = labels;
    j["matrix"] = g.matrix;
    j["target"] = g.target;
    j["block_dev_max"] = g.block_dev_max;
    j["off_block_max"] = g.off_block_max;
    j["symmetry_error"] = g.symmetry_error;
    j["min_eigenvalue"] = g.min_eigenvalue;
    io::write_text(ctx.path("gram.json"), j.dump(2) + "\n");

    io::CsvWriter csv({"quantity", "value", "bound", "pass"});
    const double bdev_bound = std::max(tol::gram_block_rel_floor,
                                       tol::gram_block_eps_factor * spec.epsilon);
    const double off_bound = tol::gram_offblock_eps_factor * spec.epsilon * 2.0 * M_PI;
    const bool okb = g.block_dev_max <= bdev_bound;
    const bool oko = g.n_clusters < 2 || g.off_block_max <= off_bound;
    csv.row({"block_dev_max", fmt(g.block_dev_max), fmt(bdev_bound), okb ? "1" : "0"});
    csv.row({"off_block_max", fmt(g.off_block_max), fmt(off_bound), oko ? "1" : "0"});
    csv.row({"min_eigenvalue", fmt(g.min_eigenvalue), "0", g.min_eigenvalue > 0 ? "1" : "0"});
    csv.save(ctx.path("gram_summary.csv"));
    ctx.gate(okb, "gram_block_dev");
    ctx.gate(oko, "gram_off_block");
    ctx.gate(g.min_eigenvalue > 0, "gram_positive");
    return 0;
}

int run_metric_sweep(RunContext& ctx) {
    preglue::SpliceLayout layout;
    std::vector<double> sweep;
    auto spec = io::load_cluster_spec(ctx.spec_path, &sweep, &layout);
    if (!ctx.sweep.empty()) sweep = ctx.sweep;
    if (sweep.size() < 3)
        throw Error(Err::InsufficientSweep, "metric-sweep: need >= 3 sweep epsilons");

    metric::GramOptions go;
    if (ctx.grid_n > 0) go.coarse_n = ctx.grid_n | 1;
    go.threads = ctx.threads;
    const auto res = metric::metric_sweep(spec, sweep, layout, go);

    io::CsvWriter csv({"epsilon", "block_dev_max", "offblock_max", "slope", "r2"});
    for (const auto& row : res.rows)
        csv.row({fmt(row.epsilon), fmt(row.block_dev_max), fmt(row.off_block_max),
                 fmt(res.off_block_fit.slope), fmt(res.off_block_fit.r2)});
    csv.save(ctx.path("metric_sweep.csv"));

    ctx.gate(res.off_block_fit.slope >= 0.75, "offblock_decay_rate");
    for (const auto& row : res.rows) {
        const double bbound = std::max(tol::gram_block_rel_floor,
                                       tol::gram_block_eps_factor * row.epsilon);
        const double obound = tol::gram_offblock_eps_factor * row.epsilon * 2.0 * M_PI;
        ctx.gate(row.block_dev_max <= bbound, "block_dev_at_eps_" + fmt(row.epsilon));
        ctx.gate(row.off_block_max <= obound, "off_block_at_eps_" + fmt(row.epsilon));
    }
    // halving ratios
    for (size_t i = 0; i + 1 < res.rows.size(); ++i) {
        if (std::abs(res.rows[i].epsilon - 2.0 * res.rows[i + 1].epsilon) < 1e-12) {
            const double ratio = res.rows[i + 1].off_block_max / res.rows[i].off_block_max;
            ctx.gate(ratio <= tol::gram_halving_ratio, "offblock_halving_ratio");
        }
    }
    return 0;
}

int run_linear_check(RunContext& ctx) {
    nlohmann::json lines = nlohmann::json::array();
    bool all_ok = true;
    auto note = [&](const std::string& name, double value, double tolerance, bool ok) {
        nlohmann::json l;
        l["name"] = name;
        l["value"] = value;
        l["tolerance"] = tolerance;
        l["pass"] = ok;
        lines.push_back(l);
        all_ok = all_ok && ok;
    };

    // model kernel at seeded random points
    {
        std::mt19937_64 rng(std::uint64_t(ctx.seed));
        auto draw = [&]() { return 2.0 * (double(rng() >> 11) / 9007199254740992.0) - 1.0; };
        double worst = 0;
        linear::FourField f0 = linear::kernel_f0();
        for (int t = 0; t < 20; ++t) {
            Vec3 z{2 * draw(), 2 * draw(), 2 * draw()};
            if (norm(z) < 0.3) z = Vec3{1, 1, 1};
            worst = std::max(worst, linear::norm(linear::model_apply(f0, z)));
            for (int i = 0; i < 3; ++i)
                worst = std::max(
                    worst, linear::norm(linear::model_apply(linear::kernel_fc(axis_vec(i)), z)));
        }
        note("model_kernel_max", worst, tol::kernel_abs, worst <= tol::kernel_abs);
    }

    // L^2 = Laplacian convergence on seeded smooth fields
    {
        std::mt19937_64 rng(std::uint64_t(ctx.seed) + 1);
        auto draw = [&]() { return 0.4 + 0.8 * (double(rng() >> 11) / 9007199254740992.0); };
        double worst_dev = 0;
        for (int rep = 0; rep < 5; ++rep) {
            const double ax = draw(), ay = draw(), az = draw();
            linear::FourField u;
            u.eval = [=](const Vec3& z) -> linear::FourValue {
                return {std::sin(ax * z.x) * std::cos(ay * z.y),
                        Vec3{std::cos(az * z.z), std::sin(ax * z.x + 0.3 * z.y), 0.1 * z.x * z.y}};
            };
            auto lap = [=](const Vec3& z) -> linear::FourValue {
                return {(ax * ax + ay * ay) * std::sin(ax * z.x) * std::cos(ay * z.y),
                        Vec3{az * az * std::cos(az * z.z),
                             (ax * ax + 0.09) * std::sin(ax * z.x + 0.3 * z.y), 0.0}};
            };
            const Vec3 z{0.4, -0.2, 0.7};
            std::vector<double> errs;
            for (double h : {2e-2, 1e-2, 5e-3})
                errs.push_back(linear::norm(linear::model_apply_twice(u, z, h) - lap(z)));
            const double slope = std::log(errs[0] / errs[2]) / std::log(4.0);
            worst_dev = std::max(worst_dev, std::abs(slope - 2.0));
        }
        note("l2_laplacian_slope_dev", worst_dev, tol::l2_slope_dev,
             worst_dev <= tol::l2_slope_dev);
    }

    // weitzenbock on shell and negative control
    {
        auto bg = bps::bps_field({0, 0, 0}, 1.0);
        Grid3 g({1.5, 0, 0}, 2.4, 49);
        double max_gap = 0;
        for (std::uint64_t s = 1; s <= 5; ++s) {
            TangentField u =
                linear::random_bump_field(std::uint64_t(ctx.seed) + s, {1.5, 0, 0}, 2.0);
            max_gap = std::max(max_gap, linear::weitzenbock_check(bg, u, g, ctx.h_fd).gap);
        }
        note("weitzenbock_gap_max", max_gap, tol::weitzenbock_gap,
             max_gap <= tol::weitzenbock_gap);

        Grid3 gc({0, 0, 0}, 2.65, 55);
        TangentField probe = linear::correlated_bump_field(bg, 2.5);
        const auto ctrl =
            linear::weitzenbock_check(linear::detune_potential(bg, 1.2), probe, gc, ctx.h_fd, 1e9);
        note("weitzenbock_control_gap", ctrl.gap, tol::weitzenbock_control_gap,
             ctrl.gap >= tol::weitzenbock_control_gap);
    }

    // indicial families
    {
        const auto rep = linear::indicial_roots_check();
        for (const auto& l : rep.lines) note("indicial_" + l.name, l.value, l.tolerance, l.pass);
    }

    io::write_text(ctx.path("linear_check.json"), lines.dump(2) + "\n");
    ctx.gate(all_ok, "linear_checks");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"monolab: first-order monopole fields, splices, and moduli pairings"};
    app.set_version_flag("--version", kVersion);
    app.fallthrough();

    RunContext ctx;
    app.add_option("--out", ctx.out_dir, "output directory");
    app.add_option("--spec", ctx.spec_path, "scenario spec file (JSON)");
    app.add_option("--grid-n", ctx.grid_n, "grid points per axis (odd)");
    app.add_option("--h-fd", ctx.h_fd, "finite-difference stencil width");
    app.add_option("--threads", ctx.threads, "worker threads (0 = hardware)");
    app.add_option("--sweep", ctx.sweep, "epsilon sweep values")->delimiter(',');
    app.add_option("--seed", ctx.seed, "seed for randomized samples");
    app.add_flag("--strict", ctx.strict, "treat warnings as gate failures");

    app.require_subcommand(1);
    app.add_subcommand("bps-check", "exactness, energy, centre and tangent norms of the charge-1 field");
    app.add_subcommand("dirac-field", "sample a pole spec to CSV/binary and check its residual");
    app.add_subcommand("flux", "sphere fluxes and harmonicity order of a pole spec");
    app.add_subcommand("preglue", "build a splice: region residuals, boundary charge, flux pairings");
    app.add_subcommand("residual-scan", "epsilon sweep of region residual norms with slope fits");
    app.add_subcommand("metric-gram", "variation Gram matrix at one epsilon");
    app.add_subcommand("metric-sweep", "Gram deviations across the epsilon sweep");
    app.add_subcommand("linear-check", "model kernel, Laplacian order, Bochner gap, indicial families");

    CLI11_PARSE(app, argc, argv);
    ctx.command = app.get_subcommands().front()->get_name();

    try {
        fs::create_directories(ctx.out_dir);

        const bool needs_spec = ctx.command != "bps-check" && ctx.command != "linear-check";
        if (needs_spec && ctx.spec_path.empty())
            throw Error(Err::ConfigParse, ctx.command + ": --spec is required");

        if (ctx.command == "bps-check") run_bps_check(ctx);
        else if (ctx.command == "dirac-field") run_dirac_field(ctx);
        else if (ctx.command == "flux") run_flux(ctx);
        else if (ctx.command == "preglue") run_preglue(ctx);
        else if (ctx.command == "residual-scan") run_residual_scan(ctx);
        else if (ctx.command == "metric-gram") run_metric_gram(ctx);
        else if (ctx.command == "metric-sweep") run_metric_sweep(ctx);
        else if (ctx.command == "linear-check") run_linear_check(ctx);

        if (ctx.strict && !ctx.warnings.empty())
            for (const auto& w : ctx.warnings) ctx.failures.push_back("warning: " + w);

        write_manifest(ctx);
        if (!ctx.failures.empty()) {
            for (const auto& f : ctx.failures)
                std::fprintf(stderr, "gate failed: %s\n", f.c_str());
            return 1;
        }
        std::printf("%s: all gates passed\n", ctx.command.c_str());
        return 0;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        switch (e.kind) {
            case Err::ConfigParse: return 2;
            case Err::IoError: return 3;
            default: return 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
