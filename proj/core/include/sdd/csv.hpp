#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sdd {

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text);

// CSV writer: `#`-prefixed metadata lines, one header row, LF endings.
class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path);

    void meta(std::string_view key, std::string_view value);
    void header(std::initializer_list<std::string_view> columns);
    void header(const std::vector<std::string>& columns);

    CsvWriter& cell(double v);
    CsvWriter& cell(long long v);
    CsvWriter& cell(unsigned long long v);
    CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
    CsvWriter& cell(std::size_t v) { return cell(static_cast<unsigned long long>(v)); }
    CsvWriter& cell(std::string_view v);
    void end_row();

private:
    void sep();

    std::ofstream out_;
    bool row_open_ = false;
};

struct CsvTable {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

} // namespace sdd
