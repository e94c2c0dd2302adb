/*
 * table_io.hpp: deterministic text output. All numbers are printed with
 * up to 17 significant digits via std::to_chars, which round-trips every
 * double exactly and produces identical bytes on every run and platform.
 */

#pragma once

#include <charconv>
#include <ostream>
#include <string>
#include <vector>

#include "sweep.hpp"

namespace crw {

inline std::string format_number(double value) {
    char buffer[64];
    const auto res = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                   std::chars_format::general, 17);
    return std::string(buffer, res.ptr);
}

/// Plain text table; cells are preformatted strings.
struct OutputTable {
    std::vector<std::string> header{};
    std::vector<std::vector<std::string>> rows{};
};

inline void write_csv(std::ostream& out, const OutputTable& table) {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        out << (i ? "," : "") << table.header[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << row[i];
        }
        out << '\n';
    }
}

/// Sweep rows as a table with the fixed column set k,E,detuning,R,T.
/// The detuning cell is empty when the sweep has no reference emitter.
inline OutputTable spectrum_to_table(const SpectrumRecord& record) {
    OutputTable table;
    table.header = {"k", "E", "detuning", "R", "T"};
    table.rows.reserve(record.rows.size());
    for (const SpectrumRow& row : record.rows) {
        table.rows.push_back({format_number(row.k), format_number(row.energy),
                              row.detuning ? format_number(*row.detuning)
                                           : std::string{},
                              format_number(row.reflectance),
                              format_number(row.transmittance)});
    }
    return table;
}

inline OutputTable windows_to_table(const std::vector<ReflectionWindow>& ws) {
    OutputTable table;
    table.header = {"k_lo", "k_hi", "max_R", "slope_lo", "slope_hi"};
    table.rows.reserve(ws.size());
    for (const ReflectionWindow& w : ws) {
        table.rows.push_back({format_number(w.k_lo), format_number(w.k_hi),
                              format_number(w.max_reflectance),
                              format_number(w.slope_lo),
                              format_number(w.slope_hi)});
    }
    return table;
}

/// Sweep rows as JSON lines; detuning is null without a reference emitter.
inline void write_json_lines(std::ostream& out, const SpectrumRecord& record) {
    for (const SpectrumRow& row : record.rows) {
        out << "{\"k\":" << format_number(row.k)
            << ",\"E\":" << format_number(row.energy) << ",\"detuning\":";
        if (row.detuning) {
            out << format_number(*row.detuning);
        } else {
            out << "null";
        }
        out << ",\"R\":" << format_number(row.reflectance)
            << ",\"T\":" << format_number(row.transmittance) << "}\n";
    }
}

} // namespace crw
