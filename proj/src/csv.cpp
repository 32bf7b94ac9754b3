#include "capmimo/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <system_error>

namespace capmimo {

namespace {

constexpr std::string_view kErrorPrefix = "error:";
constexpr std::size_t kColumns = 12;

double parse_double(const std::string& text, const char* column) {
    if (text == "nan")
        return std::numeric_limits<double>::quiet_NaN();
    if (text == "inf")
        return std::numeric_limits<double>::infinity();
    if (text == "-inf")
        return -std::numeric_limits<double>::infinity();
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw std::invalid_argument(std::string("bad number in column ") + column + ": '" + text + "'");
    return value;
}

std::size_t parse_count(const std::string& text, const char* column) {
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw std::invalid_argument(std::string("bad count in column ") + column + ": '" + text + "'");
    return value;
}

}  // namespace

std::string format_double(double value) {
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos)
        return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_csv_record(std::string_view line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    fields.back() += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    if (quoted)
        throw std::invalid_argument("unterminated quoted CSV field");
    return fields;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows, const CsvOptions& opts) {
    out << kSweepCsvHeader << '\n';
    for (const SweepRow& row : rows) {
        std::string tag(to_string(row.tag));
        if (!row.ok())
            tag = std::string(kErrorPrefix) + tag;
        out << csv_escape(row.scenario) << ',' << format_double(row.d) << ',' << row.m1 << ',' << row.m2 << ','
            << row.ref_m << ',' << format_double(row.mi_nats) << ',' << format_double(row.mi_bits()) << ','
            << format_double(row.mi_ref_nats) << ',' << format_double(row.abs_gap) << ','
            << format_double(row.n_used) << ',' << tag << ',';
        if (opts.timing && row.wall_time_s)
            out << format_double(*row.wall_time_s);
        out << '\n';
    }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("empty CSV: header row missing");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != kSweepCsvHeader)
        throw std::invalid_argument("unexpected CSV header: " + line);

    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const std::vector<std::string> f = split_csv_record(line);
        if (f.size() != kColumns)
            throw std::invalid_argument("expected " + std::to_string(kColumns) + " fields, got " +
                                        std::to_string(f.size()));
        SweepRow row;
        row.scenario = f[0];
        row.d = parse_double(f[1], "d_m");
        row.m1 = parse_count(f[2], "m1");
        row.m2 = parse_count(f[3], "m2");
        row.ref_m = parse_count(f[4], "ref_m");
        row.mi_nats = parse_double(f[5], "mi_nats");
        row.mi_ref_nats = parse_double(f[7], "mi_ref_nats");
        row.abs_gap = parse_double(f[8], "abs_gap");
        row.n_used = parse_double(f[9], "n_used");

        std::string_view tag = f[10];
        if (tag.starts_with(kErrorPrefix)) {
            tag.remove_prefix(kErrorPrefix.size());
            row.error = "failed";
        }
        const auto parsed = parse_model_tag(tag);
        if (!parsed)
            throw std::invalid_argument("unknown model_tag: " + f[10]);
        row.tag = *parsed;
        if (!f[11].empty())
            row.wall_time_s = parse_double(f[11], "wall_time_s");
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace capmimo
