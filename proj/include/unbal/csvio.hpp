#pragma once
/*
Number formatting and CSV preamble helpers. All numeric output uses the
shortest round-trip decimal form (std::to_chars), so identical runs
produce byte-identical files.
*/

#include <charconv>
#include <cstdint>
#include <ostream>
#include <string>

namespace unbal {

inline std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Comment lines carrying enough metadata to reproduce the file exactly.
inline void write_csv_preamble(std::ostream& os, const std::string& version,
                               const std::string& resolved_config,
                               std::uint64_t seed) {
    os << "# unbal " << version << "\n";
    os << "# config: " << resolved_config << "\n";
    os << "# seed: " << seed << "\n";
}

} // namespace unbal
