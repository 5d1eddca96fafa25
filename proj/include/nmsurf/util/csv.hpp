#pragma once

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace nmsurf {

/// Minimal CSV writer: header row, then fixed-order value rows.
/// Doubles are printed with %.17g so files round-trip exactly.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header)
        : out_(path) {
        if (!out_) throw std::runtime_error("cannot open " + path);
        for (std::size_t i = 0; i < header.size(); ++i)
            out_ << (i ? "," : "") << header[i];
        out_ << "\n";
        cols_ = header.size();
    }

    void row(const std::vector<double>& values) {
        if (values.size() != cols_) throw std::runtime_error("csv row width mismatch");
        char buf[32];
        for (std::size_t i = 0; i < values.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", values[i]);
            out_ << (i ? "," : "") << buf;
        }
        out_ << "\n";
    }

private:
    std::ofstream out_;
    std::size_t cols_ = 0;
};

} // namespace nmsurf
