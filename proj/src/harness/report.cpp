#include "omega/harness/report.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

namespace omega::harness {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t begin = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, begin);
        out.push_back(line.substr(begin, pos == std::string_view::npos ? std::string_view::npos : pos - begin));
        if (pos == std::string_view::npos) {
            return out;
        }
        begin = pos + 1;
    }
}

std::uint64_t to_u64(std::string_view field, std::size_t line) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw ReportFormatError("line " + std::to_string(line) + ": bad integer '" + std::string(field) + "'");
    }
    return v;
}

}  // namespace

std::string report_header() { return std::string(telemetry::kGcEventColumns) + "," + kReportExtraColumns; }

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return buf;
}

void RunReport::set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : metadata_) {
        if (k == key) {
            v = value;
            return;
        }
    }
    metadata_.emplace_back(key, value);
}

void RunReport::set(const std::string& key, std::uint64_t value) { set(key, std::to_string(value)); }

void RunReport::set(const std::string& key, double value) { set(key, format_double(value)); }

std::optional<std::string> RunReport::get(std::string_view key) const {
    for (const auto& [k, v] : metadata_) {
        if (k == key) {
            return v;
        }
    }
    return std::nullopt;
}

std::uint64_t RunReport::get_u64(std::string_view key, std::uint64_t fallback) const {
    auto v = get(key);
    if (!v) {
        return fallback;
    }
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    return ec == std::errc{} ? out : fallback;
}

double RunReport::get_double(std::string_view key, double fallback) const {
    auto v = get(key);
    if (!v) {
        return fallback;
    }
    try {
        return std::stod(*v);
    } catch (const std::exception&) {
        return fallback;
    }
}

std::optional<bool> RunReport::get_flag(std::string_view key) const {
    auto v = get(key);
    if (!v) {
        return std::nullopt;
    }
    return *v == "true";
}

std::string RunReport::to_csv() const {
    std::ostringstream out;
    for (const auto& [k, v] : metadata_) {
        out << "# " << k << '=' << v << '\n';
    }
    out << report_header() << '\n';
    for (const ReportRow& r : rows) {
        out << telemetry::to_csv(r.event) << ',' << r.workload << ',' << r.cycle << ',' << r.live_objects << '\n';
    }
    return out.str();
}

RunReport RunReport::parse(std::string_view text) {
    RunReport report;
    bool header_seen = false;
    std::size_t line_no = 0;
    std::size_t begin = 0;
    while (begin < text.size()) {
        std::size_t end = text.find('\n', begin);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(begin, end - begin);
        begin = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            continue;
        }
        if (line.starts_with("#")) {
            line.remove_prefix(1);
            if (line.starts_with(" ")) {
                line.remove_prefix(1);
            }
            const std::size_t eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw ReportFormatError("line " + std::to_string(line_no) + ": metadata without '='");
            }
            report.set(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
            continue;
        }
        if (!header_seen) {
            if (line != report_header()) {
                throw ReportFormatError("line " + std::to_string(line_no) + ": unexpected header");
            }
            header_seen = true;
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 10) {
            throw ReportFormatError("line " + std::to_string(line_no) + ": expected 10 fields, got " +
                                    std::to_string(f.size()));
        }
        ReportRow row;
        row.event = {to_u64(f[0], line_no), to_u64(f[1], line_no), to_u64(f[2], line_no), to_u64(f[3], line_no),
                     to_u64(f[4], line_no), to_u64(f[5], line_no), to_u64(f[6], line_no)};
        row.workload = std::string(f[7]);
        row.cycle = to_u64(f[8], line_no);
        row.live_objects = to_u64(f[9], line_no);
        report.rows.push_back(std::move(row));
    }
    if (!header_seen) {
        throw ReportFormatError("missing header row");
    }
    return report;
}

}  // namespace omega::harness
