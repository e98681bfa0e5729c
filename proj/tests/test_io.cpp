#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>

#include "monolab/bps.hpp"
#include "monolab/io.hpp"

using namespace monolab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path dir;
    TempDir() {
        dir = fs::temp_directory_path() / "monolab_io_test";
        fs::create_directories(dir);
    }
    ~TempDir() { fs::remove_all(dir); }
    std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("double formatting round-trips") {
    for (double v : {1.0, -0.3333333333333333, 6.283185307179586, 1e-17, 12345.6789}) {
        const std::string s = io::format_double(v);
        CHECK(std::stod(s) == v);
    }
}

TEST_CASE("csv writer enforces the header width and uses LF endings") {
    io::CsvWriter csv({"a", "b"});
    csv.row({"1", "2"});
    CHECK(csv.str() == "a,b\n1,2\n");
    CHECK_THROWS_AS(csv.row({"1"}), Error);
}

TEST_CASE("binary snapshot round-trip is exact") {
    TempDir tmp;
    auto f = bps::bps_field({0.2, -0.1, 0.4}, 1.0);
    Grid3 g({0, 0, 0}, 2.0, 9);
    const auto snap = io::sample_field(f, g);
    const std::string path = tmp / "snap.mlf";
    io::write_snapshot_binary(snap, path);
    const auto back = io::read_snapshot_binary(path);
    CHECK(back.nx == snap.nx);
    CHECK(back.spacing == snap.spacing);
    CHECK(back.components == snap.components);
    REQUIRE(back.data.size() == snap.data.size());
    for (size_t i = 0; i < snap.data.size(); ++i) CHECK(back.data[i] == snap.data[i]);

    io::write_snapshot_csv(snap, tmp / "snap.csv");
    const std::string text = io::read_text(tmp / "snap.csv");
    CHECK(text.find("x,y,z,a1_1") == 0);
    CHECK(text.find("\r") == std::string::npos);
}

TEST_CASE("sampled evaluator reproduces the source field to O(h^2)") {
    auto f = bps::bps_field({0, 0, 0}, 1.0);
    Grid3 g({2.0, 0, 0}, 1.5, 31);  // off-centre box, away from the core
    auto sampled = io::snapshot_field(io::sample_field(f, g), f.mass, f.charge);
    const double h = g.spacing();
    double worst = 0;
    for (const Vec3 z : {Vec3{2.2, 0.31, -0.44}, Vec3{1.47, -0.8, 0.63}, Vec3{2.9, 0.9, 0.9}}) {
        worst = std::max(worst, norm(sampled.higgs(z) - f.higgs(z)));
        const SuTriple as = sampled.potential(z), ae = f.potential(z);
        for (int i = 0; i < 3; ++i) worst = std::max(worst, norm(as[i] - ae[i]));
    }
    CHECK(worst < 3.0 * h * h);
    CHECK_THROWS_AS(sampled.higgs({9.0, 0, 0}), Error);
}

TEST_CASE("snapshot format rejects a truncated file") {
    TempDir tmp;
    io::write_text(tmp / "bad.mlf", "MLF1 garbage");
    CHECK_THROWS_AS(io::read_snapshot_binary(tmp / "bad.mlf"), Error);
}

TEST_CASE("dirac spec parsing and diagnostics") {
    TempDir tmp;
    io::write_text(tmp / "ok.json",
                   R"({"mass": 1.0, "poles": [[0,0,0,3]], "strings": ["north"]})");
    auto spec = io::load_dirac_spec(tmp / "ok.json");
    CHECK(spec.poles.size() == 1);
    CHECK(spec.poles[0].k == 3);
    CHECK(spec.total_charge() == 3);

    io::write_text(tmp / "bad.json", "{ not json");
    try {
        io::load_dirac_spec(tmp / "bad.json");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind == Err::ConfigParse);
        // the diagnostic carries a position
        CHECK(std::string(e.what()).find("parse error") != std::string::npos);
    }

    io::write_text(tmp / "zero_k.json", R"({"mass": 1.0, "poles": [[0,0,0,0]]})");
    CHECK_THROWS_AS(io::load_dirac_spec(tmp / "zero_k.json"), Error);
}

TEST_CASE("cluster spec parsing with sweep and layout") {
    TempDir tmp;
    io::write_text(tmp / "c.json", R"({
        "zetas": [[1,0,0],[-1,0,0]],
        "charges": [1,1],
        "mass": 1.0,
        "sweep": [0.1, 0.05],
        "layout": {"r_out_factor": 0.35}
    })");
    std::vector<double> sweep;
    preglue::SpliceLayout layout;
    auto spec = io::load_cluster_spec(tmp / "c.json", &sweep, &layout);
    CHECK(spec.epsilon == 0.1);
    CHECK(sweep.size() == 2);
    CHECK(layout.r_out_factor == 0.35);
    CHECK(spec.zetas.size() == 2);
}

TEST_CASE("file hash is stable and content-sensitive") {
    TempDir tmp;
    io::write_text(tmp / "a", "hello");
    io::write_text(tmp / "b", "hello");
    io::write_text(tmp / "c", "hellp");
    CHECK(io::file_hash(tmp / "a") == io::file_hash(tmp / "b"));
    CHECK(io::file_hash(tmp / "a") != io::file_hash(tmp / "c"));
}
