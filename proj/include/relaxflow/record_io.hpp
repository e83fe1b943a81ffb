#pragma once

#include "relaxflow/spectral_field.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace relaxflow {

/// One row of the long-format series table.
struct SeriesRow {
    std::string run_id;
    double t = 0.0;
    std::string name;
    double value = 0.0;
};

/// Writes "run_id,t,name,value" rows with round-trip precision.
void write_series_csv(const std::string& path, const std::vector<SeriesRow>& rows);
void write_json(const std::string& path, const nlohmann::json& j);
void write_text(const std::string& path, const std::string& text);

/// Binary spectral snapshot, little-endian:
///   char[8]  magic "RFSPEC01"
///   uint32   dim, n, ncomp, dtype (1 = complex128)
///   float64  domain length, time
///   payload  ncomp * n^dim complex values as (re, im) float64 pairs,
///            component-major, modes in FFTW order.
struct Snapshot {
    int dim = 2;
    int n = 0;
    double length = 0.0;
    double time = 0.0;
    std::vector<ComplexArray> components;
};

inline constexpr char kSnapshotMagic[9] = "RFSPEC01";

/// Concatenates the components of the given fields (all on one grid).
Snapshot make_snapshot(const std::vector<const SpectralField*>& fields, double time);
void write_snapshot(const std::string& path, const Snapshot& s);
Snapshot read_snapshot(const std::string& path);

} // namespace relaxflow
