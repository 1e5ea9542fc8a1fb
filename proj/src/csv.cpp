#include "volalab/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "volalab/errors.hpp"

namespace volalab {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Reads all nonempty lines, strips CR and a UTF-8 BOM on the first line.
std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw EmptyFile("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (lines.empty() && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (!strip(line).empty()) lines.push_back(line);
    }
    if (lines.empty()) throw EmptyFile("file has no content: " + path);
    return lines;
}

double parse_number(const std::string& path, long line_no, const std::string& text) {
    const std::string t = strip(text);
    double value{};
    const char* first = t.data();
    const char* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw MalformedRow(path, line_no, "cannot parse number '" + text + "'");
    }
    return value;
}

Date parse_date_field(const std::string& path, long line_no, const std::string& text) {
    try {
        return Date::parse(strip(text));
    } catch (const std::invalid_argument& e) {
        throw MalformedRow(path, line_no, e.what());
    }
}

template <typename Row>
void sort_and_check_dates(const std::string& path, std::vector<Row>& rows) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].date == rows[i - 1].date) {
            throw DuplicateDate(path + ": duplicate date " + rows[i].date.to_string());
        }
    }
}

}  // namespace

PriceSeries load_price_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (strip(lines[0]) != "date,close") {
        throw MalformedRow(path, 1, "expected header 'date,close', got '" + lines[0] + "'");
    }
    if (lines.size() < 2) throw EmptyFile("no data rows in " + path);

    struct Row {
        Date date;
        double close;
    };
    std::vector<Row> rows;
    rows.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const long line_no = static_cast<long>(i) + 1;
        const auto fields = split_fields(lines[i]);
        if (fields.size() != 2) {
            throw MalformedRow(path, line_no, "expected 2 fields, got " + std::to_string(fields.size()));
        }
        Row row;
        row.date = parse_date_field(path, line_no, fields[0]);
        row.close = parse_number(path, line_no, fields[1]);
        if (!(row.close > 0.0)) {
            throw NonPositivePrice(path + ":" + std::to_string(line_no) + ": close " +
                                   std::to_string(row.close) + " must be positive");
        }
        rows.push_back(row);
    }
    sort_and_check_dates(path, rows);

    PriceSeries out;
    out.dates.reserve(rows.size());
    out.closes.reserve(rows.size());
    for (const auto& r : rows) {
        out.dates.push_back(r.date);
        out.closes.push_back(r.close);
    }
    return out;
}

FactorTable load_factor_csv(const std::string& path, Units units) {
    const auto lines = read_lines(path);
    const auto header = split_fields(lines[0]);

    auto column = [&](const std::string& name) -> std::size_t {
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (strip(header[j]) == name) return j;
        }
        throw MissingColumn(path + ": missing column '" + name + "'");
    };
    const std::size_t c_date = column("date");
    const std::size_t c_mkt = column("mkt_rf");
    const std::size_t c_smb = column("smb");
    const std::size_t c_hml = column("hml");
    const std::size_t c_umd = column("umd");
    const std::size_t c_rf = column("rf");

    if (lines.size() < 2) throw EmptyFile("no data rows in " + path);
    const double scale = units == Units::percent ? 0.01 : 1.0;

    struct Row {
        Date date;
        double mkt_rf, smb, hml, umd, rf;
    };
    std::vector<Row> rows;
    rows.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const long line_no = static_cast<long>(i) + 1;
        const auto fields = split_fields(lines[i]);
        if (fields.size() != header.size()) {
            throw MalformedRow(path, line_no, "expected " + std::to_string(header.size()) +
                                                  " fields, got " + std::to_string(fields.size()));
        }
        Row row;
        row.date = parse_date_field(path, line_no, fields[c_date]);
        row.mkt_rf = scale * parse_number(path, line_no, fields[c_mkt]);
        row.smb = scale * parse_number(path, line_no, fields[c_smb]);
        row.hml = scale * parse_number(path, line_no, fields[c_hml]);
        row.umd = scale * parse_number(path, line_no, fields[c_umd]);
        row.rf = scale * parse_number(path, line_no, fields[c_rf]);
        rows.push_back(row);
    }
    sort_and_check_dates(path, rows);

    FactorTable out;
    for (const auto& r : rows) {
        out.dates.push_back(r.date);
        out.mkt_rf.push_back(r.mkt_rf);
        out.smb.push_back(r.smb);
        out.hml.push_back(r.hml);
        out.umd.push_back(r.umd);
        out.rf.push_back(r.rf);
    }
    return out;
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

void write_price_csv(const std::string& path, const PriceSeries& series) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << "date,close\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << series.dates[i].to_string() << ',' << format_double(series.closes[i]) << '\n';
    }
}

void write_factor_csv(const std::string& path, const FactorTable& table) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << "date,mkt_rf,smb,hml,umd,rf\n";
    for (std::size_t i = 0; i < table.size(); ++i) {
        out << table.dates[i].to_string() << ',' << format_double(table.mkt_rf[i]) << ','
            << format_double(table.smb[i]) << ',' << format_double(table.hml[i]) << ','
            << format_double(table.umd[i]) << ',' << format_double(table.rf[i]) << '\n';
    }
}

}  // namespace volalab
