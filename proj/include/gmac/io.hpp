#pragma once

// Output formatting shared by the CLI: CSV with a '#' config-echo header,
// JSON records, and the binary stream format for raw A_n samples.

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "gmac/simulator.hpp"

namespace gmac {

inline constexpr const char* artifact_version = "1.0.0";

/// Formats a double with 9 significant digits, the CSV-wide convention.
inline std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

/// One "key = value" comment line of the config-echo header.
inline void header_line(std::ostream& os, const std::string& key, const std::string& value) {
    os << "# " << key << " = " << value << "\n";
}

struct CsvWriter {
    std::ostream& os;

    void header(const std::vector<std::pair<std::string, std::string>>& config) {
        header_line(os, "artifact_version", artifact_version);
        for (const auto& [k, v] : config) header_line(os, k, v);
    }

    void columns(const std::vector<std::string>& names) {
        for (std::size_t i = 0; i < names.size(); ++i)
            os << (i ? "," : "") << names[i];
        os << "\n";
    }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i)
            os << (i ? "," : "") << fmt9(values[i]);
        os << "\n";
    }
};

/// Writes raw A_n sums as little-endian float64 pairs behind a 16-byte
/// header: magic "GMAC-AN1", then n and trials as u32.
inline void write_an_stream(std::ostream& os, const AnSamples& s) {
    char header[16] = {'G', 'M', 'A', 'C', '-', 'A', 'N', '1'};
    auto put_u32 = [&](std::size_t off, std::uint32_t v) {
        for (int b = 0; b < 4; ++b) header[off + b] = static_cast<char>((v >> (8 * b)) & 0xFF);
    };
    put_u32(8, static_cast<std::uint32_t>(s.n));
    put_u32(12, static_cast<std::uint32_t>(s.trials));
    os.write(header, 16);
    static_assert(sizeof(double) == 8);
    for (const SumSample& v : s.sums) {
        // assumes little-endian host for the payload doubles
        os.write(reinterpret_cast<const char*>(&v.sum1), 8);
        os.write(reinterpret_cast<const char*>(&v.sum12), 8);
    }
}

}  // namespace gmac
