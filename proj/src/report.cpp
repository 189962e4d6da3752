// SPDX-License-Identifier: MIT
#include "cqd/report.hpp"

#include "cqd/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

namespace cqd {

bool Report::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::map<std::string, ColumnSummary> summarize(const std::vector<std::string>& columns,
                                               const std::vector<std::vector<double>>& rows) {
    std::map<std::string, ColumnSummary> out;
    if (rows.empty()) return out;
    const double n = static_cast<double>(rows.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        ColumnSummary s;
        s.min = rows.front().at(c);
        s.max = rows.front().at(c);
        double sum = 0.0;
        for (const auto& row : rows) {
            const double v = row.at(c);
            sum += v;
            s.min = std::min(s.min, v);
            s.max = std::max(s.max, v);
        }
        s.mean = sum / n;
        if (rows.size() > 1) {
            double ss = 0.0;
            for (const auto& row : rows) ss += (row[c] - s.mean) * (row[c] - s.mean);
            s.std = std::sqrt(ss / (n - 1.0));
        }
        out[columns[c]] = s;
    }
    return out;
}

std::string to_csv(const Report& r) {
    std::string out;
    for (std::size_t c = 0; c < r.columns.size(); ++c) {
        if (c > 0) out += ',';
        out += r.columns[c];
    }
    out += '\n';
    for (const auto& row : r.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) out += ',';
            out += format_double(row[c]);
        }
        out += '\n';
    }
    return out;
}

std::string to_json(const Report& r) {
    nlohmann::ordered_json doc;
    doc["experiment"] = r.experiment;
    doc["config"] = r.config;
    doc["columns"] = r.columns;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : r.rows) doc["rows"].push_back(row);
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();
    for (const auto& [name, s] : summarize(r.columns, r.rows)) {
        summary[name] = {{"mean", s.mean}, {"std", s.std}, {"min", s.min}, {"max", s.max}};
    }
    doc["summary"] = summary;
    doc["checks"] = nlohmann::ordered_json::array();
    for (const Check& c : r.checks) {
        doc["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"threshold", c.threshold}});
    }
    doc["passed"] = r.passed();
    return doc.dump(2) + "\n";
}

void emit_report(const Report& r, const std::filesystem::path& path, ReportFormat format) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << (format == ReportFormat::Csv ? to_csv(r) : to_json(r));
    out.flush();
    if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace cqd
