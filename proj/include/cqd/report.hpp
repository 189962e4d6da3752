// SPDX-License-Identifier: MIT
#pragma once

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace cqd {

enum class ReportFormat { Csv, Json };

struct ColumnSummary {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation, 0 for a single row
    double min = 0.0;
    double max = 0.0;

    friend bool operator==(const ColumnSummary&, const ColumnSummary&) = default;
};

struct Check {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
};

struct Report {
    std::string experiment;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<Check> checks;

    [[nodiscard]] bool passed() const;
};

/// Per-column statistics; empty when there are no rows.
std::map<std::string, ColumnSummary> summarize(const std::vector<std::string>& columns,
                                               const std::vector<std::vector<double>>& rows);

std::string to_csv(const Report& r);
std::string to_json(const Report& r);

/// Writes the report; throws IoError when the path cannot be written.
void emit_report(const Report& r, const std::filesystem::path& path, ReportFormat format);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace cqd
