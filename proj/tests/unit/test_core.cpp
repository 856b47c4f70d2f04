/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "rfw/core/csv.hpp"
#include "rfw/core/error.hpp"
#include "rfw/core/rational.hpp"
#include "rfw/core/sampling.hpp"
#include "rfw/core/timestamp.hpp"

using namespace rfw;

namespace {

std::string read_fixture(const std::string& name) {
    std::ifstream in(std::string(RFW_FIXTURE_DIR) + "/" + name, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Days from 1970-01-01 by counting whole years and months; independent of the library's civil-date code.
std::int64_t epoch_ns(int y, int mo, int d, int h, int mi, int s, int ms) {
    static const int month_days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    auto leap = [](int yr) { return (yr % 4 == 0 && yr % 100 != 0) || yr % 400 == 0; };
    std::int64_t days = 0;
    for (int yr = 1970; yr < y; ++yr) days += leap(yr) ? 366 : 365;
    for (int m = 1; m < mo; ++m) days += month_days[m - 1] + (m == 2 && leap(y) ? 1 : 0);
    days += d - 1;
    return ((days * 86400 + h * 3600 + mi * 60 + s) * 1000 + ms) * 1'000'000LL;
}

}  // namespace

TEST(Timestamp, IsoParsesToEpochNanoseconds) {
    auto t = parse_iso8601("2024-01-01T00:00:00.200Z");
    ASSERT_TRUE(t);
    EXPECT_EQ(t->ns, 1704067200200000000LL);
    EXPECT_EQ(t->ns, epoch_ns(2024, 1, 1, 0, 0, 0, 200));
}

TEST(Timestamp, IsoVariants) {
    EXPECT_EQ(parse_iso8601("2024-02-29 13:45:10")->ns, epoch_ns(2024, 2, 29, 13, 45, 10, 0));
    EXPECT_EQ(parse_iso8601("2024-01-01T02:00:00+02:00")->ns, epoch_ns(2024, 1, 1, 0, 0, 0, 0));
    EXPECT_EQ(parse_iso8601("1999-12-31")->ns, epoch_ns(1999, 12, 31, 0, 0, 0, 0));
    EXPECT_FALSE(parse_iso8601("2024-13-01"));
    EXPECT_FALSE(parse_iso8601("hello"));
    EXPECT_FALSE(parse_iso8601("-80"));
}

TEST(Timestamp, FormatRoundTrip) {
    for (std::int64_t ns : std::initializer_list<std::int64_t>{0, 1704067200200000000LL, epoch_ns(2031, 7, 4, 23, 59, 59, 999)}) {
        const auto s = format_iso8601_ms(Timestamp{ns});
        EXPECT_EQ(parse_iso8601(s)->ns, ns) << s;
    }
    EXPECT_EQ(format_iso8601_ms(Timestamp{1704067200200000000LL}), "2024-01-01T00:00:00.200Z");
}

TEST(Timestamp, EpochMagnitudes) {
    EXPECT_EQ(timestamp_from_epoch(1704067200.0)->ns, 1704067200000000000LL);
    EXPECT_EQ(timestamp_from_epoch(1704067200200.0)->ns, 1704067200200000000LL);
    EXPECT_EQ(timestamp_from_epoch(1704067200200000000.0)->ns, 1704067200200000000LL);
}

TEST(Duration, ParseAndFormat) {
    EXPECT_EQ(parse_duration("1s").ns(), 1'000'000'000);
    EXPECT_EQ(parse_duration("100ms").ns(), 100'000'000);
    EXPECT_EQ(parse_duration("2min").ns(), 120'000'000'000);
    EXPECT_EQ(format_duration(Duration::from_millis(100)), "100ms");
    EXPECT_EQ(format_duration(Duration::from_seconds(60)), "60s");
    try {
        parse_duration("0s");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonPositiveDelta);
    }
    EXPECT_THROW(Duration{-5}, Error);
}

TEST(Duration, FloorIsTowardsNegativeInfinity) {
    EXPECT_EQ(floor_to(1700, 1000), 1000);
    EXPECT_EQ(floor_to(-1, 1000), -1000);
    EXPECT_EQ(floor_to(2000, 1000), 2000);
}

TEST(Csv, InfersTypesAndNulls) {
    const Table t = ingest_csv("t,f,RSRP,name\n2024-01-01T00:00:00.200Z,1950,-80,\"\"\n2024-01-01T00:00:01Z,2140,,abc\n", "RF");
    ASSERT_EQ(t.row_count(), 2u);
    EXPECT_EQ(t.column("t").type, ColumnType::Timestamp);
    EXPECT_EQ(t.column("t").cells[0].as_timestamp().ns, 1704067200200000000LL);
    EXPECT_EQ(t.column("f").type, ColumnType::Integer);
    EXPECT_EQ(t.column("RSRP").cells[0].as_double(), -80.0);
    EXPECT_TRUE(t.column("RSRP").cells[1].is_null());
    EXPECT_EQ(t.column("name").cells[0], Cell::text(""));
}

TEST(Csv, MixedIntegerAndDecimalIsNumber) {
    const Table t = ingest_csv("x\n1\n2.5\n", "T");
    EXPECT_EQ(t.column("x").type, ColumnType::Number);
    EXPECT_EQ(t.column("x").cells[0].as_double(), 1.0);
}

TEST(Csv, StrayTextKeptAsText) {
    std::string src = "r\n";
    for (int i = 0; i < 40; ++i) src += std::to_string(-80 - i) + ".5\n";
    src += "ERR\n";
    const Table t = ingest_csv(src, "T");
    EXPECT_EQ(t.column("r").type, ColumnType::Number);
    EXPECT_EQ(t.column("r").cells.back(), Cell::text("ERR"));
}

TEST(Csv, RaggedRowReportsRecordIndex) {
    try {
        ingest_csv("a,b\n1,2\n3\n", "T");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MalformedCsv);
        ASSERT_TRUE(e.row());
        EXPECT_EQ(*e.row(), 3u);
    }
}

TEST(Csv, EmptyInput) {
    try {
        ingest_csv("", "T");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyFile);
    }
}

TEST(Csv, QuotedFieldsAndBom) {
    const Table t = ingest_csv("\xEF\xBB\xBFname,v\n\"a,b\",1\n\"say \"\"hi\"\"\",2\n", "T");
    EXPECT_EQ(t.column_names(), (std::vector<std::string>{"name", "v"}));
    EXPECT_EQ(t.column("name").cells[0].as_text(), "a,b");
    EXPECT_EQ(t.column("name").cells[1].as_text(), "say \"hi\"");
}

TEST(Csv, ExportReingestsIdentically) {
    const std::string src = read_fixture("f1_rf.csv");
    const Table t = ingest_csv(src, "RF");
    const std::string out = export_csv(t);
    EXPECT_EQ(ingest_csv(out, "RF"), t);
    EXPECT_EQ(export_csv(ingest_csv(out, "RF")), out);
}

TEST(Csv, EpochColumnsWhenEnabled) {
    CsvOptions opt;
    opt.timestamp_formats = {"iso8601", "epoch"};
    const Table t = ingest_csv("timestamp,v\n1704067200.2,1\n1704067201.2,2\n", "T", opt);
    EXPECT_EQ(t.column("timestamp").type, ColumnType::Timestamp);
    EXPECT_EQ(t.column("timestamp").cells[0].as_timestamp().ns, 1704067200200000000LL);
    EXPECT_EQ(ingest_csv("timestamp,v\n1704067200.2,1\n", "T").column("timestamp").type, ColumnType::Number);
}

TEST(Csv, DuplicateColumnRejected) {
    try {
        ingest_csv("a,a\n1,2\n", "T");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DuplicateColumn);
    }
}

TEST(Rational, ParseAndCompare) {
    EXPECT_EQ(Rational::parse("0.10"), Rational(1, 10));
    EXPECT_EQ(Rational::parse("10%"), Rational(1, 10));
    EXPECT_EQ(Rational::parse("3/40"), Rational(3, 40));
    EXPECT_TRUE(Rational(2, 20) <= Rational::parse("0.1"));
    EXPECT_TRUE(Rational(3, 43) < Rational(1, 10));
    EXPECT_TRUE(Rational(5, 43) > Rational(1, 10));
    EXPECT_EQ(Rational::from_double(0.1), Rational(1, 10));
    EXPECT_THROW(Rational::parse("abc"), Error);
}

TEST(Sampling, SortIsStableWithNullsLast) {
    const Table t = ingest_csv("t,v\n2024-01-01T00:00:02Z,a\n,b\n2024-01-01T00:00:01Z,c\n2024-01-01T00:00:01Z,d\n", "T");
    EXPECT_FALSE(is_sorted_by_time(t, "t"));
    const Table s = sort_by_time(t, "t");
    EXPECT_TRUE(is_sorted_by_time(s, "t"));
    std::vector<std::string> order;
    for (const auto& c : s.column("v").cells) order.push_back(c.as_text());
    EXPECT_EQ(order, (std::vector<std::string>{"c", "d", "a", "b"}));
}

TEST(Sampling, SmallTableIsOneSlice) {
    const Table t = ingest_csv(read_fixture("f1_rf.csv"), "RF");
    const auto slices = sample_window_slices(t, "timestamp", Duration{}, SampleSpec{});
    ASSERT_EQ(slices.size(), 1u);
    EXPECT_EQ(slices[0], t);
}

TEST(Sampling, WindowsAreDeterministicAndBucketAligned) {
    std::string src = "t,v\n";
    for (int i = 0; i < 20000; ++i)
        src += format_iso8601_ms(Timestamp{1704067200000000000LL + i * 250'000'000LL}) + "," + std::to_string(i) + "\n";
    const Table t = ingest_csv(src, "T");
    SampleSpec spec{3, 50, 7};
    const auto a = sample_window_slices(t, "t", Duration{}, spec);
    const auto b = sample_window_slices(t, "t", Duration{}, spec);
    ASSERT_EQ(a, b);
    ASSERT_FALSE(a.empty());
    std::size_t rows = 0;
    for (const auto& s : a) {
        rows += s.row_count();
        // four rows per second; a whole number of buckets per window
        EXPECT_EQ(s.row_count() % 4, 0u);
        EXPECT_EQ(s.column("t").cells.front().as_timestamp().ns % 1'000'000'000, 0);
    }
    EXPECT_LE(rows, 3u * 50 * 4);
    EXPECT_GT(rows, 0u);
}
