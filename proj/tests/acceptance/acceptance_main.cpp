// Verification suite: one line per criterion, exit 0 iff all pass.
//
//  1  exactness of the charge-1 field (analytic and finite-difference routes)
//  2  energy identity 4 pi m k at m = 1 and m = 2
//  3  tangent-norm identity 2 pi delta_ab
//  4  abelian integrality and harmonicity order
//  5  model-operator kernel and L^2 = Laplacian order
//  6  on-shell Bochner identity and its negative control
//  7  splice residual decay orders in epsilon
//  8  leading-order block metric
//  9  pairwise-difference flux pairing and closedness
// 10  bit-identical artifacts across repeated runs
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdarg>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "monolab/bps.hpp"
#include "monolab/dirac.hpp"
#include "monolab/io.hpp"
#include "monolab/linear_model.hpp"
#include "monolab/metric.hpp"
#include "monolab/preglue.hpp"
#include "monolab/tolerances.hpp"

using namespace monolab;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int criterion, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
    std::printf("%s  criterion %2d  %-28s  %s  (%.1fs)\n", pass ? "PASS" : "FAIL",
                criterion, name.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

MonopoleField fd_view(const MonopoleField& f) {
    struct Wrapper : FieldMap {
        std::shared_ptr<const FieldMap> base;
        Su2 higgs(const Vec3& p) const override { return base->higgs(p); }
        SuTriple potential(const Vec3& p) const override { return base->potential(p); }
    };
    auto w = std::make_shared<Wrapper>();
    w->base = f.map;
    MonopoleField out = f;
    out.map = w;
    return out;
}

// --------------------------------------------------------------------------

void criterion_1() {
    Timer t;
    auto f = bps::bps_field({0, 0, 0}, 1.0);
    auto ffd = fd_view(f);
    double worst_an = 0, worst_fd = 0;
    for (double r = 0.2; r <= 10.0; r += 0.1) {
        for (const Vec3 dir : {Vec3{1, 0, 0}, Vec3{0.6, 0.64, 0.48}, Vec3{0, -0.8, 0.6},
                               Vec3{-0.28, 0.96, 0}}) {
            worst_an = std::max(worst_an, bogomolny_residual_at(f, dir * r, 1e-3));
            worst_fd = std::max(worst_fd, bogomolny_residual_at(ffd, dir * r, 1e-3));
        }
    }
    const bool ok = worst_an <= tol::bps_residual_analytic && worst_fd <= tol::bps_residual_fd;
    report(1, "field exactness", ok,
           fmt("analytic %.2e <= %.0e, fd %.2e <= %.0e", worst_an,
               tol::bps_residual_analytic, worst_fd, tol::bps_residual_fd),
           t.seconds());
}

void criterion_2() {
    Timer t;
    Grid3 g({0, 0, 0}, 12.0, 161);
    const double e1 = ymh_energy(bps::bps_field({0, 0, 0}, 1.0), g).total;
    const double e2 = ymh_energy(bps::bps_field({0, 0, 0}, 2.0), g).total;
    const double d1 = std::abs(e1 - 4.0 * M_PI) / (4.0 * M_PI);
    const double d2 = std::abs(e2 - 8.0 * M_PI) / (8.0 * M_PI);
    const bool ok = d1 <= tol::energy_rel && d2 <= tol::energy_rel;
    report(2, "energy identity", ok,
           fmt("m=1: %.6f vs 4pi (%.2e), m=2: %.6f vs 8pi (%.2e)", e1, d1, e2, d2),
           t.seconds());
}

void criterion_3() {
    Timer t;
    auto spec = preglue::ClusterSpec::make({{1, 0, 0}}, {1}, 1.0, 0.1);
    auto p = preglue::build_pregluing(spec, preglue::SpliceLayout{});
    metric::GramOptions go;
    go.coarse_n = 101;
    go.fine_n = 61;
    const auto g = metric::gram(metric::variation_basis(p), p, go);
    double dev = 0;
    for (size_t a = 0; a < 4; ++a)
        for (size_t b = 0; b < 4; ++b)
            dev = std::max(dev, std::abs(g.at(a, b) - ((a == b) ? 2.0 * M_PI : 0.0)));
    const bool ok = dev <= tol::tau_gram_rel * 2.0 * M_PI;
    report(3, "tangent-norm identity", ok,
           fmt("max |Gram - 2pi I| = %.2e <= %.2e", dev, tol::tau_gram_rel * 2.0 * M_PI),
           t.seconds());
}

void criterion_4() {
    Timer t;
    bool ok = true;
    std::string detail;

    dirac::DiracSpec s3;
    s3.mass = 1.0;
    s3.poles.push_back({{0, 0, 0}, 3, {0, 0, -1}});
    const double f3 = dirac::flux(s3, {0, 0, 0}, 1.5).value;
    ok = ok && std::abs(f3 - 3.0) <= tol::flux_abs;

    dirac::DiracSpec s2;
    s2.mass = 1.0;
    s2.poles.push_back({{1, 0, 0}, 1, {0, 0, -1}});
    s2.poles.push_back({{-1, 0, 0}, -2, {0, 0, 1}});
    const double fm1 = dirac::flux(s2, {0, 0, 0}, 6.0).value;
    ok = ok && std::abs(fm1 - (-1.0)) <= tol::flux_abs;

    // harmonicity: 7-point Laplacian decays at rate 2 over two h-halvings
    std::mt19937_64 rng(2024);
    auto draw = [&]() { return 2.0 * (double(rng() >> 11) / 9007199254740992.0) - 1.0; };
    std::vector<double> slopes;
    for (int trial = 0; trial < 24 && slopes.size() < 12; ++trial) {
        Vec3 z{3 * draw(), 3 * draw(), 3 * draw()};
        if (norm(z - s2.poles[0].z) < 0.7 || norm(z - s2.poles[1].z) < 0.7) continue;
        auto lap = [&](double h) {
            double acc = -6.0 * dirac::higgs_scalar(s2, z);
            for (int i = 0; i < 3; ++i)
                acc += dirac::higgs_scalar(s2, z + axis_vec(i) * h) +
                       dirac::higgs_scalar(s2, z - axis_vec(i) * h);
            return std::abs(acc / (h * h));
        };
        const double l0 = lap(0.02), l2 = lap(0.005);
        if (l2 < 1e-10) continue;
        slopes.push_back(std::log(l0 / l2) / std::log(4.0));
    }
    std::sort(slopes.begin(), slopes.end());
    const double med = slopes[slopes.size() / 2];
    ok = ok && std::abs(med - 2.0) <= tol::laplace_slope_dev;

    report(4, "abelian integrality", ok,
           fmt("flux(k=3)=%.7f, flux(1,-2)=%.7f, laplace slope %.3f", f3, fm1, med),
           t.seconds());
}

void criterion_5() {
    Timer t;
    std::mt19937_64 rng(7);
    auto draw = [&]() { return 2.0 * (double(rng() >> 11) / 9007199254740992.0) - 1.0; };
    double worst = 0;
    linear::FourField f0 = linear::kernel_f0();
    const Vec3 cs[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (int k = 0; k < 20; ++k) {
        Vec3 z{2 * draw(), 2 * draw(), 2 * draw()};
        if (norm(z) < 0.3) z = Vec3{0.8, -0.6, 1.1};
        worst = std::max(worst, linear::norm(linear::model_apply(f0, z)));
        for (const Vec3& c : cs)
            worst = std::max(worst, linear::norm(linear::model_apply(linear::kernel_fc(c), z)));
    }
    bool ok = worst <= tol::kernel_abs;

    double worst_dev = 0;
    for (int rep = 0; rep < 5; ++rep) {
        const double ax = 0.5 + 0.4 * std::abs(draw()), ay = 0.5 + 0.4 * std::abs(draw()),
                     az = 0.5 + 0.4 * std::abs(draw());
        linear::FourField u;
        u.eval = [=](const Vec3& z) -> linear::FourValue {
            return {std::sin(ax * z.x) * std::cos(ay * z.y),
                    Vec3{std::cos(az * z.z), std::sin(ax * z.x + 0.3 * z.y),
                         std::sin(ay * z.y) * std::cos(az * z.x)}};
        };
        auto lap = [=](const Vec3& z) -> linear::FourValue {
            return {(ax * ax + ay * ay) * std::sin(ax * z.x) * std::cos(ay * z.y),
                    Vec3{az * az * std::cos(az * z.z),
                         (ax * ax + 0.09) * std::sin(ax * z.x + 0.3 * z.y),
                         (ay * ay + az * az) * std::sin(ay * z.y) * std::cos(az * z.x)}};
        };
        const Vec3 z{0.4, -0.2, 0.7};
        std::vector<double> errs;
        for (double h : {2e-2, 1e-2, 5e-3})
            errs.push_back(linear::norm(linear::model_apply_twice(u, z, h) - lap(z)));
        const double slope = std::log(errs[0] / errs[2]) / std::log(4.0);
        worst_dev = std::max(worst_dev, std::abs(slope - 2.0));
    }
    ok = ok && worst_dev <= tol::l2_slope_dev;

    report(5, "model-operator kernel", ok,
           fmt("kernel max %.2e <= %.0e, L^2=Lap slope dev %.3f <= %.1f", worst,
               tol::kernel_abs, worst_dev, tol::l2_slope_dev),
           t.seconds());
}

void criterion_6() {
    Timer t;
    auto bg = bps::bps_field({0, 0, 0}, 1.0);
    Grid3 g({1.5, 0, 0}, 2.4, 49);
    double max_gap = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        TangentField u = linear::random_bump_field(seed, {1.5, 0, 0}, 2.0);
        max_gap = std::max(max_gap, linear::weitzenbock_check(bg, u, g, 1e-3).gap);
    }
    bool ok = max_gap <= tol::weitzenbock_gap;

    Grid3 gc({0, 0, 0}, 2.65, 55);
    TangentField probe = linear::correlated_bump_field(bg, 2.5);
    const double control =
        linear::weitzenbock_check(linear::detune_potential(bg, 1.2), probe, gc, 1e-3, 1e9)
            .gap;
    ok = ok && control >= tol::weitzenbock_control_gap;

    report(6, "on-shell Bochner identity", ok,
           fmt("gap %.2e <= %.2f, control %.3f >= %.2f", max_gap, tol::weitzenbock_gap,
               control, tol::weitzenbock_control_gap),
           t.seconds());
}

void criterion_7() {
    Timer t;
    auto spec = preglue::ClusterSpec::make({{1, 0, 0}, {-1, 0, 0}}, {1, 1}, 1.0, 0.1);
    preglue::ResidualScanOptions opt;
    opt.grid_n = 101;
    const auto res =
        preglue::residual_orders(spec, {0.1, 0.05, 0.025}, preglue::SpliceLayout{}, opt);
    double naive_slope = 0, naive_r2 = 0, corr_slope = 0;
    for (const auto& f : res.fits) {
        if (f.region != preglue::Region::Interstitial || f.norm_kind != "sup_over_eps")
            continue;
        if (f.correction == preglue::HiggsCorrection::None) {
            naive_slope = f.fit.slope;
            naive_r2 = f.fit.r2;
        } else {
            corr_slope = f.fit.slope;
        }
    }
    const bool ok = std::abs(naive_slope - tol::naive_slope) <= tol::naive_slope_dev &&
                    naive_r2 >= tol::naive_r2_min &&
                    corr_slope - naive_slope >= tol::corrected_slope_gain;
    report(7, "splice residual orders", ok,
           fmt("naive slope %.3f (r2 %.4f), corrected %.3f, gain %.2f >= %.2f", naive_slope,
               naive_r2, corr_slope, corr_slope - naive_slope, tol::corrected_slope_gain),
           t.seconds());
}

void criterion_8() {
    Timer t;
    auto spec = preglue::ClusterSpec::make({{1, 0, 0}, {-1, 0, 0}}, {1, 1}, 1.0, 0.1);
    metric::GramOptions go;
    go.coarse_n = 121;
    go.fine_n = 61;
    bool ok = true;
    std::vector<double> offs;
    std::string detail;
    for (double eps : {0.1, 0.05, 0.025}) {
        preglue::ClusterSpec s = spec;
        s.epsilon = eps;
        auto p = preglue::build_pregluing(s, preglue::SpliceLayout{});
        const auto g = metric::gram(metric::variation_basis(p), p, go);
        const double bbound = std::max(tol::gram_block_rel_floor,
                                       tol::gram_block_eps_factor * eps);
        const double obound = tol::gram_offblock_eps_factor * eps * 2.0 * M_PI;
        ok = ok && g.block_dev_max <= bbound && g.off_block_max <= obound;
        offs.push_back(g.off_block_max);
        detail += fmt("eps %.3f: block %.1e/%.1e off %.4f/%.4f; ", eps, g.block_dev_max,
                      bbound, g.off_block_max, obound);
    }
    for (size_t i = 0; i + 1 < offs.size(); ++i)
        ok = ok && (offs[i + 1] / offs[i] <= tol::gram_halving_ratio);
    detail += fmt("ratios %.3f %.3f", offs[1] / offs[0], offs[2] / offs[1]);
    report(8, "leading-order metric", ok, detail, t.seconds());
}

void criterion_9() {
    Timer t;
    auto spec = preglue::ClusterSpec::make({{1, 0, 0}, {-0.6, 0.7, 0.2}, {0.1, -0.8, 0.5}},
                                           {1, 1, 1}, 1.0, 0.05);
    auto form = preglue::gm_curvature_form(spec, 0);
    const double fl1 = preglue::gm_flux(form, 1, 0.12);
    const double fl2 = preglue::gm_flux(form, 2, 0.10);
    bool ok = std::abs(fl1 - 1.0) <= tol::gm_flux_abs && std::abs(fl2 - 1.0) <= tol::gm_flux_abs;

    preglue::ConfigTangent U(3), V(3), W(3);
    U[0] = {0.3, -0.1, 0.7};
    U[1] = {-0.2, 0.5, 0.1};
    U[2] = {0.9, 0.2, -0.3};
    V[0] = {0.1, 0.8, -0.5};
    V[1] = {0.4, -0.6, 0.2};
    V[2] = {-0.7, 0.3, 0.6};
    W[0] = {0.2, 0.1, -0.4};
    W[1] = {-0.5, 0.3, 0.8};
    W[2] = {0.1, -0.9, 0.2};
    const double d1 = std::abs(preglue::gm_exterior_derivative(form, U, V, W, 2e-3));
    const double d2 = std::abs(preglue::gm_exterior_derivative(form, U, V, W, 1e-3));
    // closed form: the FD exterior derivative shrinks at the h^2 rate
    ok = ok && d2 <= 0.35 * d1 + 1e-12;

    report(9, "pairwise flux pairing", ok,
           fmt("fluxes %.7f, %.7f; dF %.1e -> %.1e", fl1, fl2, d1, d2), t.seconds());
}

void criterion_10(const std::string& cli, const std::string& scratch) {
    Timer t;
    if (cli.empty()) {
        report(10, "determinism", false, "no CLI path provided", t.seconds());
        return;
    }
    const fs::path dir = scratch.empty() ? fs::temp_directory_path() / "monolab_acc"
                                         : fs::path(scratch);
    fs::create_directories(dir);
    const std::string spec = (dir / "poles.json").string();
    io::write_text(spec, R"({"mass": 1.0, "poles": [[1,0,0,1],[-1,0,0,-2]],
                             "strings": ["north", "south"]})");
    const std::string cspec = (dir / "cluster.json").string();
    io::write_text(cspec, R"({"zetas": [[1,0,0],[-1,0,0]], "charges": [1,1],
                              "mass": 1.0, "epsilon": 0.1,
                              "sweep": [0.1, 0.05, 0.025]})");

    auto run = [&](const std::string& args, const std::string& out) {
        const std::string cmd = cli + " " + args + " --out " + (dir / out).string() +
                                " --seed 4242 > /dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
    };
    bool ok = true;
    ok &= run("bps-check", "b1");
    ok &= run("bps-check", "b2");
    ok &= run("flux --spec " + spec, "f1");
    ok &= run("flux --spec " + spec, "f2");
    // the thread count must not leak into the results
    ok &= run("residual-scan --grid-n 61 --threads 1 --spec " + cspec, "r1");
    ok &= run("residual-scan --grid-n 61 --threads 2 --spec " + cspec, "r2");
    ok &= run("metric-gram --grid-n 81 --threads 1 --spec " + cspec, "g1");
    ok &= run("metric-gram --grid-n 81 --threads 2 --spec " + cspec, "g2");
    ok &= run("preglue --grid-n 41 --spec " + cspec, "p1");
    ok &= run("preglue --grid-n 41 --spec " + cspec, "p2");
    ok &= run("linear-check", "l1");
    ok &= run("linear-check", "l2");

    auto same = [&](const std::string& a, const std::string& b, const std::string& name) {
        return io::read_text((dir / a / name).string()) ==
               io::read_text((dir / b / name).string());
    };
    bool identical = true;
    identical = identical && same("b1", "b2", "bps_check.csv");
    identical = identical && same("f1", "f2", "fluxes.csv");
    identical = identical && same("f1", "f2", "harmonicity.csv");
    identical = identical && same("r1", "r2", "residual_scan.csv");
    identical = identical && same("g1", "g2", "gram.json");
    identical = identical && same("g1", "g2", "gram_summary.csv");
    identical = identical && same("p1", "p2", "preglue_regions.csv");
    identical = identical && same("p1", "p2", "gm_flux.csv");
    identical = identical && same("l1", "l2", "linear_check.json");

    // a malformed config exits with the config code
    const std::string bad = (dir / "bad.json").string();
    io::write_text(bad, "{ nope");
    const int rc = std::system((cli + " flux --spec " + bad + " --out " +
                                (dir / "bad_out").string() + " > /dev/null 2>&1")
                                   .c_str());
    const bool config_code = WIFEXITED(rc) && WEXITSTATUS(rc) == 2;

    report(10, "determinism", ok && identical && config_code,
           fmt("runs ok=%d, bytes identical=%d, config exit=2: %d", int(ok), int(identical),
               int(config_code)),
           t.seconds());
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli, scratch;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        if (flag == "--cli") cli = argv[i + 1];
        if (flag == "--scratch") scratch = argv[i + 1];
    }

    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10(cli, scratch);

    if (g_failures) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
