#include "relaxflow/record_io.hpp"

#include "relaxflow/errors.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace relaxflow {

namespace {

template <class T>
T to_little(T v)
{
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        unsigned char b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
        std::memcpy(&v, b, sizeof(T));
        return v;
    }
}

template <class T>
void put(std::ofstream& out, T v)
{
    v = to_little(v);
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T take(std::ifstream& in)
{
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw ConfigError("snapshot truncated");
    return to_little(v);
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out)
{
    std::ofstream out(path, mode);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    return out;
}

} // namespace

void write_series_csv(const std::string& path, const std::vector<SeriesRow>& rows)
{
    auto out = open_out(path);
    out << "run_id,t,name,value\n";
    char buf[64];
    for (const auto& r : rows) {
        out << r.run_id << ',';
        std::snprintf(buf, sizeof buf, "%.17g", r.t);
        out << buf << ',' << r.name << ',';
        std::snprintf(buf, sizeof buf, "%.17g", r.value);
        out << buf << '\n';
    }
}

void write_json(const std::string& path, const nlohmann::json& j)
{
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

void write_text(const std::string& path, const std::string& text)
{
    auto out = open_out(path);
    out << text;
}

Snapshot make_snapshot(const std::vector<const SpectralField*>& fields, double time)
{
    if (fields.empty()) throw ConfigError("snapshot needs at least one field");
    const Grid& g = fields.front()->grid();
    Snapshot s{g.dim(), g.n(), g.length(), time, {}};
    for (const auto* f : fields) {
        if (f->grid() != g) throw ConfigError("snapshot fields must share one grid");
        for (int c = 0; c < f->components(); ++c) s.components.push_back((*f)[c]);
    }
    return s;
}

void write_snapshot(const std::string& path, const Snapshot& s)
{
    auto out = open_out(path, std::ios::out | std::ios::binary);
    out.write(kSnapshotMagic, 8);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.dim));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.n));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.components.size()));
    put<std::uint32_t>(out, 1u);
    put<double>(out, s.length);
    put<double>(out, s.time);
    for (const auto& comp : s.components) {
        for (const auto& v : comp) {
            put<double>(out, v.real());
            put<double>(out, v.imag());
        }
    }
    if (!out) throw ConfigError("failed writing snapshot '" + path + "'");
}

Snapshot read_snapshot(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open snapshot '" + path + "'");
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kSnapshotMagic, 8) != 0) throw ConfigError("not a snapshot file: '" + path + "'");
    Snapshot s;
    s.dim = static_cast<int>(take<std::uint32_t>(in));
    s.n = static_cast<int>(take<std::uint32_t>(in));
    const auto ncomp = take<std::uint32_t>(in);
    const auto dtype = take<std::uint32_t>(in);
    if (dtype != 1) throw ConfigError("unsupported snapshot dtype");
    if (s.dim < 1 || s.dim > 3 || s.n < 1) throw ConfigError("corrupt snapshot header");
    s.length = take<double>(in);
    s.time = take<double>(in);
    std::size_t size = 1;
    for (int i = 0; i < s.dim; ++i) size *= static_cast<std::size_t>(s.n);
    s.components.assign(ncomp, ComplexArray(size));
    for (auto& comp : s.components) {
        for (auto& v : comp) {
            const double re = take<double>(in);
            const double im = take<double>(in);
            v = {re, im};
        }
    }
    return s;
}

} // namespace relaxflow
