// CSV/JSON/binary emission and scenario configs.  CSV: comma separated,
// '.' decimal, header row, LF endings, shortest round-trip doubles.  Binary
// snapshots: "MLF1" header with dims/origin/spacing, little-endian float64
// body, row-major with z fastest.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "monolab/dirac.hpp"
#include "monolab/field.hpp"
#include "monolab/preglue.hpp"

namespace monolab {
namespace io {

std::string format_double(double v);

struct CsvWriter {
    explicit CsvWriter(std::vector<std::string> header);
    void row(const std::vector<std::string>& cells);
    std::string str() const { return buf_; }
    void save(const std::string& path) const;

private:
    std::string buf_;
    size_t cols_;
};

// ---------------------------------------------------------------------------
// sampled field snapshots

struct FieldSnapshot {
    int nx = 0, ny = 0, nz = 0;
    Vec3 origin;
    double spacing = 0;
    int components = 0;              // values per grid point
    std::vector<double> data;        // [(ix*ny + iy)*nz + iz]*components + c

    std::int64_t index(int ix, int iy, int iz, int c) const {
        return ((std::int64_t(ix) * ny + iy) * nz + iz) * components + c;
    }
};

FieldSnapshot sample_field(const MonopoleField& f, const Grid3& g);

void write_snapshot_csv(const FieldSnapshot& s, const std::string& path);
void write_snapshot_binary(const FieldSnapshot& s, const std::string& path);
FieldSnapshot read_snapshot_binary(const std::string& path);

// trilinear evaluator over a 12-component (A, Phi) snapshot; this is how
// externally produced cluster fields enter the pipeline
MonopoleField snapshot_field(FieldSnapshot snapshot, double mass, int charge);

// ---------------------------------------------------------------------------
// configs (JSON documents)

dirac::DiracSpec load_dirac_spec(const std::string& path);
preglue::ClusterSpec load_cluster_spec(const std::string& path,
                                       std::vector<double>* sweep_out = nullptr,
                                       preglue::SpliceLayout* layout_out = nullptr);

// FNV-1a of the file bytes, hex string
std::string file_hash(const std::string& path);

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

}  // namespace io
}  // namespace monolab
