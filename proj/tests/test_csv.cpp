#include "sdd/csv.hpp"
#include "sdd/error.hpp"
#include "sdd/rng.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sdd;

TEST(FormatDouble, RoundTripsRandomBitPatterns) {
    Rng rng(99);
    int checked = 0;
    while (checked < 20000) {
        const double v = std::bit_cast<double>(rng());
        if (!std::isfinite(v)) continue;
        EXPECT_EQ(parse_double(format_double(v)), v);
        ++checked;
    }
    for (double v : {0.0, -0.0, 1.0, 0.1, 1e-300, 5e-324, 1.7976931348623157e308}) {
        EXPECT_EQ(parse_double(format_double(v)), v);
    }
    EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(FormatDouble, RejectsGarbage) {
    EXPECT_THROW(parse_double("1.0x"), Error);
    EXPECT_THROW(parse_double(""), Error);
}

TEST(CsvWriter, WritesMetadataHeaderAndLfRows) {
    const auto path = std::filesystem::temp_directory_path() / "sdd_csv_test.csv";
    {
        CsvWriter w(path);
        w.meta("seed", "4");
        w.header({"a", "b"});
        w.cell(0.25).cell(3);
        w.end_row();
        w.cell(-1e-9).cell(std::string_view("x"));
        w.end_row();
    }
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), "# seed = 4\na,b\n0.25,3\n-1e-09,x\n");
    const CsvTable t = read_csv(path);
    ASSERT_EQ(t.meta.size(), 1u);
    EXPECT_EQ(t.meta[0].first, "seed");
    EXPECT_EQ(t.column("b"), 1u);
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(parse_double(t.rows[1][0]), -1e-9);
    std::filesystem::remove(path);
}
