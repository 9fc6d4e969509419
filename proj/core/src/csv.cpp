#include "sdd/csv.hpp"
#include "sdd/error.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace sdd {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    if (text == "nan") return std::nan("");
    if (text == "inf") return INFINITY;
    if (text == "-inf") return -INFINITY;
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw Error(ErrorCode::parse_error, "not a number: '" + std::string(text) + "'");
    }
    return v;
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw Error(ErrorCode::io_error, "cannot open " + path.string());
}

void CsvWriter::meta(std::string_view key, std::string_view value) {
    out_ << "# " << key << " = " << value << '\n';
}

void CsvWriter::header(std::initializer_list<std::string_view> columns) {
    for (auto c : columns) cell(c);
    end_row();
}

void CsvWriter::header(const std::vector<std::string>& columns) {
    for (const auto& c : columns) cell(std::string_view(c));
    end_row();
}

void CsvWriter::sep() {
    if (row_open_) out_ << ',';
    row_open_ = true;
}

CsvWriter& CsvWriter::cell(double v) {
    sep();
    out_ << format_double(v);
    return *this;
}

CsvWriter& CsvWriter::cell(long long v) {
    sep();
    out_ << v;
    return *this;
}

CsvWriter& CsvWriter::cell(unsigned long long v) {
    sep();
    out_ << v;
    return *this;
}

CsvWriter& CsvWriter::cell(std::string_view v) {
    sep();
    out_ << v;
    return *this;
}

void CsvWriter::end_row() {
    out_ << '\n';
    row_open_ = false;
    if (!out_) throw Error(ErrorCode::io_error, "CSV write failed");
}

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return i;
    }
    throw Error(ErrorCode::parse_error, "missing CSV column " + std::string(name));
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

} // namespace

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find(" = ");
            if (eq != std::string::npos && line.size() > 2) {
                table.meta.emplace_back(line.substr(2, eq - 2), line.substr(eq + 3));
            }
            continue;
        }
        if (!have_header) {
            table.columns = split_row(line);
            have_header = true;
        } else {
            table.rows.push_back(split_row(line));
        }
    }
    return table;
}

} // namespace sdd
