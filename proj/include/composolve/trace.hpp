#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace composolve {

/// Column-labelled table of per-iteration diagnostics. Values are stored as
/// doubles; integral values render as integers so CSV output is stable and
/// byte-deterministic for a fixed run.
struct IterateTrace {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    IterateTrace() = default;
    explicit IterateTrace(std::vector<std::string> cols) : columns(std::move(cols)) {}

    void add_row(std::vector<double> row) {
        if (!columns.empty() && row.size() != columns.size())
            throw std::logic_error("trace row width does not match columns");
        rows.push_back(std::move(row));
    }

    bool empty() const { return rows.empty(); }
    std::size_t size() const { return rows.size(); }

    /// Renders one value the same way every time: integers without a decimal
    /// point, everything else with 17 significant digits (round-trip exact).
    static std::string format_value(double v) {
        if (std::isnan(v)) return "nan";
        if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
        if (v == std::floor(v) && std::fabs(v) < 9.007199254740992e15) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
            return buf;
        }
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }

    std::string to_csv() const {
        std::string out = "# schema=composolve.trace.v1\n";
        for (std::size_t c = 0; c < columns.size(); ++c) {
            out += columns[c];
            out += (c + 1 < columns.size()) ? ',' : '\n';
        }
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                out += format_value(row[c]);
                out += (c + 1 < row.size()) ? ',' : '\n';
            }
        }
        return out;
    }

    void write_csv(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open trace output: " + path);
        f << to_csv();
    }
};

} // namespace composolve
