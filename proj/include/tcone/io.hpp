#pragma once

// Artifact formats: field binaries with JSON metadata, PGM phase bitmaps,
// CSV tables, the flat key-value config and the run manifest.
//
// Field binary layout (little-endian):
//     uint32 ndim (= 2), uint32 n0, uint32 n1, float64 d0, float64 d1,
//     n0 * n1 float64 values, index j * n0 + i (axis 0 fastest).
// d0 and d1 are the first grid spacings; the exact node coordinates are in
// the JSON sidecar.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/crc.hpp>
#include <json.hpp>

#include "tcone/errors.hpp"
#include "tcone/grid.hpp"

namespace tcone::io {

using json = nlohmann::ordered_json;

/// 17 significant digits, enough to round-trip any binary64.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

template <class T>
void put_le(std::string& out, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    out.append(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get_le(const std::string& in, std::size_t& pos) {
    if (pos + sizeof(T) > in.size()) throw DomainError("field binary: truncated data");
    unsigned char b[sizeof(T)];
    std::memcpy(b, in.data() + pos, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    pos += sizeof(T);
    return v;
}

}  // namespace detail

inline std::string field_binary(const pde::ScalarField& f) {
    const auto& g = f.grid;
    std::string out;
    out.reserve(28 + 8 * f.values.size());
    detail::put_le<std::uint32_t>(out, 2);
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.n0()));
    detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.n1()));
    detail::put_le<double>(out, g.c0[1] - g.c0[0]);
    detail::put_le<double>(out, g.c1[1] - g.c1[0]);
    for (double v : f.values) detail::put_le<double>(out, v);
    return out;
}

struct FieldData {
    std::uint32_t n0 = 0;
    std::uint32_t n1 = 0;
    double d0 = 0.0;
    double d1 = 0.0;
    std::vector<double> values;
};

inline FieldData parse_field_binary(const std::string& bytes) {
    std::size_t pos = 0;
    FieldData d;
    const auto ndim = detail::get_le<std::uint32_t>(bytes, pos);
    if (ndim != 2) throw DomainError("field binary: unsupported dimension count");
    d.n0 = detail::get_le<std::uint32_t>(bytes, pos);
    d.n1 = detail::get_le<std::uint32_t>(bytes, pos);
    d.d0 = detail::get_le<double>(bytes, pos);
    d.d1 = detail::get_le<double>(bytes, pos);
    const std::size_t count = static_cast<std::size_t>(d.n0) * d.n1;
    d.values.resize(count);
    for (auto& v : d.values) v = detail::get_le<double>(bytes, pos);
    if (pos != bytes.size()) throw DomainError("field binary: trailing bytes");
    return d;
}

inline json field_metadata(const pde::ScalarField& f, const std::string& binary_name) {
    const auto& g = f.grid;
    json j;
    j["binary"] = binary_name;
    j["layout"] = "little-endian float64, index j * n0 + i";
    j["shape"] = g.shape == pde::GridShape::Planar ? "planar" : "cone-axisym";
    j["n_eff"] = g.n_eff;
    j["n0"] = g.n0();
    j["n1"] = g.n1();
    j["axis0"] = g.shape == pde::GridShape::Planar ? "x" : "rho";
    j["axis1"] = g.shape == pde::GridShape::Planar ? "y" : "theta";
    j["radius"] = g.radius;
    j["interface_param"] = g.interface_param;
    j["alpha"] = f.cfg.alpha;
    j["beta"] = f.cfg.beta;
    j["cg_iterations"] = f.stats.iterations;
    j["cg_rel_residual"] = f.stats.rel_residual;
    j["coords0"] = g.c0;
    j["coords1"] = g.c1;
    return j;
}

/// Binary PGM, one byte per cell, 255 = E, first row at the top (largest y).
inline std::string phase_pgm(const std::vector<std::uint8_t>& phase, std::size_t n) {
    std::string out = "P5\n" + std::to_string(n) + " " + std::to_string(n) + "\n255\n";
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t j = n - 1 - r;
        for (std::size_t i = 0; i < n; ++i) out.push_back(static_cast<char>(phase[j * n + i] ? 255 : 0));
    }
    return out;
}

/// Minimal CSV builder; numbers use fmt().
class Csv {
public:
    explicit Csv(const std::vector<std::string>& header) { row_strings(header); }

    void row(const std::vector<double>& values) {
        std::vector<std::string> s;
        s.reserve(values.size());
        for (double v : values) s.push_back(fmt(v));
        row_strings(s);
    }

    void row_strings(const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k) text_ += ',';
            text_ += cells[k];
        }
        text_ += '\n';
    }

    [[nodiscard]] const std::string& str() const { return text_; }

private:
    std::string text_;
};

/// Flat "key = value" text; '#' starts a comment. Duplicate keys are rejected.
inline std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string{};
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
        }
        if (!out.emplace(key, value).second) throw ConfigError("config: duplicate key '" + key + "'");
    }
    return out;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed for '" + path + "'");
}

inline std::string crc32_hex(const std::string& bytes) {
    boost::crc_32_type crc;
    crc.process_bytes(bytes.data(), bytes.size());
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(crc.checksum()));
    return buf;
}

}  // namespace tcone::io
