#include "dualband/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <vector>

#include "dualband/numerics.hpp"

namespace dualband {

namespace {

constexpr const char* kDatasetHeader = "d_m,theta_rad,cm_power_db,delay_s,mpc_power_dbm,label";
constexpr const char* kReportHeader = "model,combo,mean,std,n";

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

// Splits one CSV line; supports double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(const std::string& line, const std::string& path,
                                        std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            if (!cur.empty()) fail(path, line_no, "unexpected quote inside unquoted field");
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) fail(path, line_no, "unterminated quoted field");
    fields.push_back(cur);
    return fields;
}

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

double parse_number(const std::string& field, const std::string& path, std::size_t line_no,
                    const std::string& what) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        fail(path, line_no, "malformed " + what + " value '" + field + "'");
    return value;
}

long parse_int(const std::string& field, const std::string& path, std::size_t line_no,
               const std::string& what) {
    long value = 0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        fail(path, line_no, "malformed " + what + " value '" + field + "'");
    return value;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    return in;
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open file for writing: " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

Dataset parse_dataset_csv(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    ++line_no;
    if (strip_cr(line) != kDatasetHeader)
        fail(path, line_no, std::string("expected header '") + kDatasetHeader + "'");
    Dataset ds;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_csv_line(line, path, line_no);
        if (fields.size() != 6)
            fail(path, line_no, "expected 6 fields, got " + std::to_string(fields.size()));
        Example ex;
        for (int f = 0; f < kFeatureCount; ++f) {
            if (fields[f].empty()) continue;
            ex.features.values[f] = parse_number(fields[f], path, line_no, kFeatureNames[f]);
        }
        const long label = parse_int(fields[5], path, line_no, "label");
        if (label != 0 && label != 1) fail(path, line_no, "label must be 0 or 1");
        ex.label = static_cast<int>(label);
        try {
            ex.features.validate();
        } catch (const std::exception& e) {
            fail(path, line_no, e.what());
        }
        ds.examples.push_back(std::move(ex));
    }
    if (ds.empty()) throw std::runtime_error(path + ": no data rows");
    return ds;
}

void write_dataset_csv(const std::string& path, const Dataset& ds) {
    std::string out = std::string(kDatasetHeader) + "\n";
    for (const Example& ex : ds.examples) {
        for (int f = 0; f < kFeatureCount; ++f) {
            if (ex.features.values[f]) out += format_double(*ex.features.values[f]);
            out += ',';
        }
        out += std::to_string(ex.label);
        out += '\n';
    }
    write_file_atomic(path, out);
}

void write_report_csv(const std::string& path, const ExperimentReport& report) {
    if (report.rows.empty()) throw std::invalid_argument("write_report_csv: report has no rows");
    std::string out;
    for (const auto& [key, value] : report.metadata) out += "#" + key + "=" + value + "\n";
    out += std::string(kReportHeader) + "\n";
    for (const ReportRow& row : report.rows) {
        out += quote_if_needed(row.model) + "," + quote_if_needed(row.combo) + "," +
               format_double(row.mean) + "," + format_double(row.stddev) + "," + std::to_string(row.n) +
               "\n";
    }
    write_file_atomic(path, out);
}

ExperimentReport parse_report_csv(const std::string& path) {
    std::ifstream in = open_input(path);
    ExperimentReport report;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        if (!header_seen && line.front() == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) fail(path, line_no, "metadata line missing '='");
            report.metadata.emplace_back(line.substr(1, eq - 1), line.substr(eq + 1));
            continue;
        }
        if (!header_seen) {
            if (line != kReportHeader)
                fail(path, line_no, std::string("expected header '") + kReportHeader + "'");
            header_seen = true;
            continue;
        }
        const auto fields = split_csv_line(line, path, line_no);
        if (fields.size() != 5)
            fail(path, line_no, "expected 5 fields, got " + std::to_string(fields.size()));
        ReportRow row;
        row.model = fields[0];
        row.combo = fields[1];
        row.mean = parse_number(fields[2], path, line_no, "mean");
        row.stddev = parse_number(fields[3], path, line_no, "std");
        row.n = static_cast<int>(parse_int(fields[4], path, line_no, "n"));
        report.rows.push_back(std::move(row));
    }
    if (!header_seen || report.rows.empty()) throw std::runtime_error(path + ": no report rows");
    return report;
}

void write_report_markdown(const std::string& path, const ExperimentReport& report) {
    if (report.rows.empty()) throw std::invalid_argument("write_report_markdown: report has no rows");
    // Columns: distinct feature combinations, in first-seen order; "-" rows listed separately.
    std::vector<std::string> combos;
    std::vector<std::string> models;
    for (const ReportRow& row : report.rows) {
        if (row.combo == "-") continue;
        if (std::find(combos.begin(), combos.end(), row.combo) == combos.end())
            combos.push_back(row.combo);
        if (std::find(models.begin(), models.end(), row.model) == models.end())
            models.push_back(row.model);
    }
    std::string out = "# Misclassification report\n\n";
    const auto fmt = [](const ReportRow& row) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.4f (%.4f)", row.mean, row.stddev);
        return std::string(buf);
    };
    if (!combos.empty()) {
        out += "| model |";
        for (const auto& c : combos) out += " " + c + " |";
        out += "\n|---|";
        for (std::size_t i = 0; i < combos.size(); ++i) out += "---|";
        out += "\n";
        for (const auto& m : models) {
            out += "| " + m + " |";
            for (const auto& c : combos) {
                const ReportRow* row = report.find(m, c);
                out += row ? " " + fmt(*row) + " |" : " - |";
            }
            out += "\n";
        }
        out += "\n";
    }
    for (const ReportRow& row : report.rows) {
        if (row.combo != "-") continue;
        out += "- " + row.model + ": " + fmt(row) + " over " + std::to_string(row.n) + " runs\n";
    }
    out += "\nValues are mean (sample standard deviation) of the misclassification fraction.\n";
    if (!report.metadata.empty()) {
        out += "\n";
        for (const auto& [key, value] : report.metadata) out += "- " + key + ": " + value + "\n";
    }
    write_file_atomic(path, out);
}

}  // namespace dualband
