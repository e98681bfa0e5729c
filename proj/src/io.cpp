#include "monolab/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace monolab {
namespace io {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : cols_(header.size()) {
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) buf_ += ',';
        buf_ += header[i];
    }
    buf_ += '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != cols_) throw Error(Err::IoError, "csv: column count mismatch");
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) buf_ += ',';
        buf_ += cells[i];
    }
    buf_ += '\n';
}

void CsvWriter::save(const std::string& path) const { write_text(path, buf_); }

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Err::IoError, "cannot open for writing: " + path);
    out.write(content.data(), std::streamsize(content.size()));
    if (!out) throw Error(Err::IoError, "write failed: " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Err::IoError, "cannot open: " + path);
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return s;
}

std::string file_hash(const std::string& path) {
    const std::string bytes = read_text(path);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------

FieldSnapshot sample_field(const MonopoleField& f, const Grid3& g) {
    FieldSnapshot s;
    s.nx = s.ny = s.nz = g.n;
    s.origin = {g.center.x - g.half_width, g.center.y - g.half_width,
                g.center.z - g.half_width};
    s.spacing = g.spacing();
    s.components = 12;  // A (3x3) + Phi (3)
    s.data.assign(std::size_t(s.nx) * s.ny * s.nz * s.components, 0.0);
    for (int ix = 0; ix < s.nx; ++ix)
        for (int iy = 0; iy < s.ny; ++iy)
            for (int iz = 0; iz < s.nz; ++iz) {
                const Vec3 p = g.point(ix, iy, iz);
                if (g.masked(p)) {
                    for (int c = 0; c < s.components; ++c)
                        s.data[size_t(s.index(ix, iy, iz, c))] = 0.0;
                    continue;
                }
                const SuTriple a = f.potential(p);
                const Su2 phi = f.higgs(p);
                int c = 0;
                for (int i = 0; i < 3; ++i)
                    for (int k = 0; k < 3; ++k)
                        s.data[size_t(s.index(ix, iy, iz, c++))] = a[i].c[k];
                for (int k = 0; k < 3; ++k)
                    s.data[size_t(s.index(ix, iy, iz, c++))] = phi.c[k];
            }
    return s;
}

void write_snapshot_csv(const FieldSnapshot& s, const std::string& path) {
    std::vector<std::string> header = {"x", "y", "z"};
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k)
            header.push_back("a" + std::to_string(i + 1) + "_" + std::to_string(k + 1));
    for (int k = 0; k < 3; ++k) header.push_back("phi_" + std::to_string(k + 1));
    CsvWriter csv(header);
    for (int ix = 0; ix < s.nx; ++ix)
        for (int iy = 0; iy < s.ny; ++iy)
            for (int iz = 0; iz < s.nz; ++iz) {
                std::vector<std::string> row = {
                    format_double(s.origin.x + ix * s.spacing),
                    format_double(s.origin.y + iy * s.spacing),
                    format_double(s.origin.z + iz * s.spacing)};
                for (int c = 0; c < s.components; ++c)
                    row.push_back(format_double(s.data[size_t(s.index(ix, iy, iz, c))]));
                csv.row(row);
            }
    csv.save(path);
}

namespace {

void check_little_endian() {
    const std::uint32_t probe = 1;
    unsigned char b;
    std::memcpy(&b, &probe, 1);
    if (b != 1) throw Error(Err::IoError, "binary snapshots require a little-endian host");
}

}  // namespace

void write_snapshot_binary(const FieldSnapshot& s, const std::string& path) {
    check_little_endian();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Err::IoError, "cannot open for writing: " + path);
    out.write("MLF1", 4);
    const std::int32_t dims[4] = {s.nx, s.ny, s.nz, s.components};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    const double geo[4] = {s.origin.x, s.origin.y, s.origin.z, s.spacing};
    out.write(reinterpret_cast<const char*>(geo), sizeof(geo));
    out.write(reinterpret_cast<const char*>(s.data.data()),
              std::streamsize(s.data.size() * sizeof(double)));
    if (!out) throw Error(Err::IoError, "write failed: " + path);
}

FieldSnapshot read_snapshot_binary(const std::string& path) {
    check_little_endian();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Err::IoError, "cannot open: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "MLF1", 4) != 0)
        throw Error(Err::IoError, "bad snapshot magic: " + path);
    std::int32_t dims[4];
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    double geo[4];
    in.read(reinterpret_cast<char*>(geo), sizeof(geo));
    FieldSnapshot s;
    s.nx = dims[0];
    s.ny = dims[1];
    s.nz = dims[2];
    s.components = dims[3];
    s.origin = {geo[0], geo[1], geo[2]};
    s.spacing = geo[3];
    if (s.nx <= 0 || s.ny <= 0 || s.nz <= 0 || s.components <= 0)
        throw Error(Err::IoError, "bad snapshot dims: " + path);
    s.data.assign(std::size_t(s.nx) * s.ny * s.nz * s.components, 0.0);
    in.read(reinterpret_cast<char*>(s.data.data()),
            std::streamsize(s.data.size() * sizeof(double)));
    if (!in) throw Error(Err::IoError, "truncated snapshot: " + path);
    return s;
}

namespace {

class SampledMap : public FieldMap {
public:
    SampledMap(FieldSnapshot s) : s_(std::move(s)) {
        if (s_.components != 12)
            throw Error(Err::IoError, "snapshot_field: expected 12 components");
    }

    Su2 higgs(const Vec3& z) const override {
        double v[12];
        interpolate(z, v);
        return Su2(v[9], v[10], v[11]);
    }

    SuTriple potential(const Vec3& z) const override {
        double v[12];
        interpolate(z, v);
        SuTriple a;
        for (int i = 0; i < 3; ++i) a[i] = Su2(v[3 * i], v[3 * i + 1], v[3 * i + 2]);
        return a;
    }

private:
    void interpolate(const Vec3& z, double* out) const {
        const double fx = (z.x - s_.origin.x) / s_.spacing;
        const double fy = (z.y - s_.origin.y) / s_.spacing;
        const double fz = (z.z - s_.origin.z) / s_.spacing;
        const int ix = int(std::floor(fx)), iy = int(std::floor(fy)), iz = int(std::floor(fz));
        if (ix < 0 || iy < 0 || iz < 0 || ix + 1 >= s_.nx || iy + 1 >= s_.ny ||
            iz + 1 >= s_.nz)
            throw Error(Err::IoError, "snapshot_field: evaluation outside the sampled box");
        const double tx = fx - ix, ty = fy - iy, tz = fz - iz;
        for (int c = 0; c < 12; ++c) {
            double acc = 0;
            for (int dx = 0; dx < 2; ++dx)
                for (int dy = 0; dy < 2; ++dy)
                    for (int dz = 0; dz < 2; ++dz) {
                        const double w = (dx ? tx : 1 - tx) * (dy ? ty : 1 - ty) *
                                         (dz ? tz : 1 - tz);
                        acc += w * s_.data[size_t(s_.index(ix + dx, iy + dy, iz + dz, c))];
                    }
            out[c] = acc;
        }
    }

    FieldSnapshot s_;
};

}  // namespace

MonopoleField snapshot_field(FieldSnapshot snapshot, double mass, int charge) {
    MonopoleField f;
    f.map = std::make_shared<SampledMap>(std::move(snapshot));
    f.mass = mass;
    f.charge = charge;
    f.mode = EvalMode::Sampled;
    return f;
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::json parse_file(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Err::ConfigParse,
                    std::string("config parse error in ") + path + ": " + e.what());
    }
    return j;
}

Vec3 parse_vec3(const nlohmann::json& a, const char* what) {
    if (!a.is_array() || a.size() != 3)
        throw Error(Err::ConfigParse, std::string("expected [x,y,z] for ") + what);
    return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

}  // namespace

dirac::DiracSpec load_dirac_spec(const std::string& path) {
    const nlohmann::json j = parse_file(path);
    dirac::DiracSpec spec;
    try {
        spec.mass = j.value("mass", 1.0);
        if (!j.contains("poles") || !j["poles"].is_array())
            throw Error(Err::ConfigParse, "dirac spec: missing poles array");
        std::vector<std::string> strings;
        if (j.contains("strings")) strings = j["strings"].get<std::vector<std::string>>();
        size_t idx = 0;
        for (const auto& pj : j["poles"]) {
            if (!pj.is_array() || pj.size() != 4)
                throw Error(Err::ConfigParse, "dirac spec: pole must be [x, y, z, k]");
            dirac::Pole p;
            p.z = {pj[0].get<double>(), pj[1].get<double>(), pj[2].get<double>()};
            p.k = pj[3].get<int>();
            if (idx < strings.size()) {
                if (strings[idx] == "north")
                    p.string_dir = {0, 0, -1};
                else if (strings[idx] == "south")
                    p.string_dir = {0, 0, 1};
                else
                    throw Error(Err::ConfigParse, "dirac spec: string must be north|south");
            }
            spec.poles.push_back(p);
            ++idx;
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(Err::ConfigParse, std::string("dirac spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

preglue::ClusterSpec load_cluster_spec(const std::string& path,
                                       std::vector<double>* sweep_out,
                                       preglue::SpliceLayout* layout_out) {
    const nlohmann::json j = parse_file(path);
    try {
        std::vector<Vec3> zetas;
        for (const auto& zj : j.at("zetas")) zetas.push_back(parse_vec3(zj, "zeta"));
        std::vector<int> charges;
        if (j.contains("charges"))
            charges = j["charges"].get<std::vector<int>>();
        else
            charges.assign(zetas.size(), 1);
        const double mass = j.value("mass", 1.0);
        double eps = j.value("epsilon", 0.0);
        std::vector<double> phases;
        if (j.contains("phases")) phases = j["phases"].get<std::vector<double>>();
        if (sweep_out && j.contains("sweep"))
            *sweep_out = j["sweep"].get<std::vector<double>>();
        if (eps <= 0) {
            if (sweep_out && !sweep_out->empty())
                eps = sweep_out->front();
            else
                throw Error(Err::ConfigParse, "cluster spec: epsilon or sweep required");
        }
        if (layout_out && j.contains("layout")) {
            layout_out->r_out_factor = j["layout"].value("r_out_factor", 0.4);
            layout_out->r_in_factor = j["layout"].value("r_in_factor", 0.5);
        }
        return preglue::ClusterSpec::make(zetas, charges, mass, eps, phases);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Err::ConfigParse, std::string("cluster spec: ") + e.what());
    }
}

}  // namespace io
}  // namespace monolab
