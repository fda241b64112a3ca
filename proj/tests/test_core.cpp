#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "adex/csv_io.hpp"
#include "adex/ranges.hpp"
#include "adex/rng.hpp"
#include "adex/types.hpp"

using namespace adex;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    auto dir = fs::temp_directory_path() / "adex_core_test";
    fs::create_directories(dir);
    return dir;
}

fs::path write_file(const std::string& name, const std::string& content) {
    fs::path path = temp_dir() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

} // namespace

TEST(ReadTrace, FillsMissingCells) {
    auto path = write_file("t1.csv", "t,a,b\n0,1.5,\n1,2.5,3\n2,,4\n");
    Trace trace = read_trace(path, 0.0);
    EXPECT_EQ(trace.record_count(), 3u);
    EXPECT_EQ(trace.feature_count(), 2u);
    EXPECT_DOUBLE_EQ(trace.values.at(0, 1), 0.0);
    EXPECT_DOUBLE_EQ(trace.values.at(2, 0), 0.0);
    EXPECT_DOUBLE_EQ(trace.values.at(1, 1), 3.0);
    Trace filled = read_trace(path, -7.25);
    EXPECT_DOUBLE_EQ(filled.values.at(0, 1), -7.25);
}

TEST(ReadTrace, HeaderOnlyIsEmptyTrace) {
    auto path = write_file("t2.csv", "t,a,b\n");
    Trace trace = read_trace(path);
    EXPECT_EQ(trace.record_count(), 0u);
    EXPECT_EQ(trace.feature_count(), 2u);
}

TEST(ReadTrace, NonMonotonicTimestampsRejected) {
    auto path = write_file("t3.csv", "t,a\n5,1\n4,2\n6,3\n");
    EXPECT_THROW(read_trace(path), IntegrityError);
}

TEST(ReadTrace, MalformedHeaderRejected) {
    auto path = write_file("t4.csv", "time,a\n0,1\n");
    EXPECT_THROW(read_trace(path), FormatError);
    auto path2 = write_file("t5.csv", "t\n0\n");
    EXPECT_THROW(read_trace(path2), FormatError);
}

TEST(ReadTrace, NonFiniteValuesRejected) {
    auto path = write_file("t7.csv", "t,a\n0,nan\n");
    EXPECT_THROW(read_trace(path), FormatError);
    auto path2 = write_file("t8.csv", "t,a\n0,inf\n");
    EXPECT_THROW(read_trace(path2), FormatError);
}

TEST(ReadTrace, RaggedRowRejected) {
    auto path = write_file("t6.csv", "t,a,b\n0,1,2\n1,3\n");
    EXPECT_THROW(read_trace(path), FormatError);
}

TEST(TraceIo, RoundTripsShortDecimalsBitExactly) {
    Rng rng(2024);
    Trace trace;
    trace.trace_id = "rt";
    trace.features = {"a", "b", "c"};
    trace.values = Matrix(200, 3);
    for (std::size_t r = 0; r < 200; ++r) {
        trace.timestamps.push_back(static_cast<std::int64_t>(10 * r));
        for (std::size_t c = 0; c < 3; ++c) {
            // A decimal with at most 9 significant digits.
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.*g", 9,
                          rng.uniform(-1e6, 1e6) * std::pow(10.0, rng.uniform(-3.0, 3.0)));
            trace.values.at(r, c) = std::strtod(buf, nullptr);
        }
    }
    auto path = temp_dir() / "rt.csv";
    write_trace(trace, path);
    Trace back = read_trace(path);
    ASSERT_EQ(back.record_count(), trace.record_count());
    for (std::size_t r = 0; r < trace.record_count(); ++r)
        for (std::size_t c = 0; c < 3; ++c)
            EXPECT_EQ(back.values.at(r, c), trace.values.at(r, c));

    // A second round trip is byte-stable.
    auto path2 = temp_dir() / "rt2.csv";
    write_trace(back, path2);
    std::ifstream a(path), b(path2);
    std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    EXPECT_EQ(sa, sb);
}

TEST(GroundTruth, ParsesEmptyEeiAsNone) {
    auto path = write_file("gt1.csv",
                           std::string(kGroundTruthHeader) + "\n1,t1,T2,100,200,,\n");
    auto table = read_ground_truth(path);
    ASSERT_EQ(table.size(), 1u);
    EXPECT_FALSE(table[0].has_eei());
    EXPECT_EQ(table[0].anomaly_type, AnomalyType::BurstyInputCrash);
    EXPECT_EQ(table[0].interval_end(), 200);
}

TEST(GroundTruth, ParsesEei) {
    auto path = write_file("gt2.csv",
                           std::string(kGroundTruthHeader) + "\n1,t1,T1,100,200,200,260\n");
    auto table = read_ground_truth(path);
    ASSERT_EQ(table.size(), 1u);
    EXPECT_TRUE(table[0].has_eei());
    EXPECT_EQ(*table[0].extended_effect_start, 200);
    EXPECT_EQ(table[0].interval_end(), 260);
}

TEST(GroundTruth, InvertedIntervalRejected) {
    auto path = write_file("gt3.csv",
                           std::string(kGroundTruthHeader) + "\n1,t1,T1,200,100,,\n");
    EXPECT_THROW(read_ground_truth(path), IntegrityError);
}

TEST(GroundTruth, UnknownTypeRejected) {
    auto path = write_file("gt4.csv",
                           std::string(kGroundTruthHeader) + "\n1,t1,T9,100,200,,\n");
    EXPECT_THROW(read_ground_truth(path), FormatError);
}

TEST(GroundTruth, RoundTrips) {
    GroundTruthTable table;
    GroundTruthEntry e;
    e.app_id = 3;
    e.trace_id = "tr";
    e.anomaly_type = AnomalyType::ExecutorFailure;
    e.root_cause_start = 10;
    e.root_cause_end = 20;
    e.extended_effect_start = 20;
    e.extended_effect_end = 55;
    table.push_back(e);
    auto path = temp_dir() / "gt_rt.csv";
    write_ground_truth(table, path);
    auto back = read_ground_truth(path);
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0].app_id, 3);
    EXPECT_EQ(back[0].anomaly_type, AnomalyType::ExecutorFailure);
    EXPECT_EQ(*back[0].extended_effect_end, 55);
}

TEST(Ranges, ExtractsMaximalRuns) {
    auto ranges = ranges_from_binary({0, 1, 1, 0, 1});
    ASSERT_EQ(ranges.size(), 2u);
    EXPECT_EQ(ranges[0].start, 1u);
    EXPECT_EQ(ranges[0].end, 3u);
    EXPECT_EQ(ranges[1].start, 4u);
    EXPECT_EQ(ranges[1].end, 5u);
}

TEST(Ranges, AllZerosAndAllOnes) {
    EXPECT_TRUE(ranges_from_binary({0, 0, 0}).empty());
    auto ranges = ranges_from_binary({1, 1, 1, 1});
    ASSERT_EQ(ranges.size(), 1u);
    EXPECT_EQ(ranges[0].start, 0u);
    EXPECT_EQ(ranges[0].end, 4u);
}

TEST(Ranges, BinaryRoundTripIsExact) {
    Rng rng(7);
    for (int round = 0; round < 200; ++round) {
        std::size_t n = 1 + rng.uniform_index(64);
        std::vector<int> binary(n);
        for (auto& v : binary)
            v = rng.bernoulli(0.4) ? 1 : 0;
        auto ranges = ranges_from_binary(binary);
        for (std::size_t i = 1; i < ranges.size(); ++i) {
            EXPECT_LT(ranges[i - 1].end, ranges[i].start); // disjoint and non-adjacent
        }
        EXPECT_EQ(binary_from_ranges(ranges, n), binary);
    }
}

TEST(AnomalyRanges, UnionOfRciAndEei) {
    Trace trace;
    trace.trace_id = "t1";
    trace.features = {"a"};
    for (int64_t t = 0; t < 400; ++t)
        trace.timestamps.push_back(t);
    trace.values = Matrix(400, 1);

    GroundTruthEntry e;
    e.trace_id = "t1";
    e.anomaly_type = AnomalyType::BurstyInput;
    e.root_cause_start = 100;
    e.root_cause_end = 200;
    e.extended_effect_start = 200;
    e.extended_effect_end = 260;
    auto ranges = anomaly_ranges({e}, trace);
    ASSERT_EQ(ranges.size(), 1u);
    EXPECT_EQ(ranges[0].start, 100u);
    EXPECT_EQ(ranges[0].end, 260u);
    EXPECT_EQ(ranges[0].length(), 160u); // RCI length + EEI length
}

TEST(AnomalyRanges, NoEeiYieldsRciOnly) {
    Trace trace;
    trace.trace_id = "t1";
    trace.features = {"a"};
    for (int64_t t = 0; t < 300; ++t)
        trace.timestamps.push_back(t);
    trace.values = Matrix(300, 1);
    GroundTruthEntry e;
    e.trace_id = "t1";
    e.root_cause_start = 50;
    e.root_cause_end = 80;
    auto ranges = anomaly_ranges({e}, trace);
    ASSERT_EQ(ranges.size(), 1u);
    EXPECT_EQ(ranges[0].start, 50u);
    EXPECT_EQ(ranges[0].end, 80u);
}

TEST(AnomalyRanges, OverlapIsIntegrityError) {
    Trace trace;
    trace.trace_id = "t1";
    trace.features = {"a"};
    for (int64_t t = 0; t < 100; ++t)
        trace.timestamps.push_back(t);
    trace.values = Matrix(100, 1);
    GroundTruthEntry e1, e2;
    e1.trace_id = e2.trace_id = "t1";
    e1.root_cause_start = 10;
    e1.root_cause_end = 20;
    e2.root_cause_start = 15;
    e2.root_cause_end = 25;
    EXPECT_THROW(anomaly_ranges({e1, e2}, trace), IntegrityError);
}

TEST(AnomalyRanges, OutsideSpanIsIntegrityError) {
    Trace trace;
    trace.trace_id = "t1";
    trace.features = {"a"};
    for (int64_t t = 0; t < 100; ++t)
        trace.timestamps.push_back(t);
    trace.values = Matrix(100, 1);
    GroundTruthEntry e;
    e.trace_id = "t1";
    e.root_cause_start = 90;
    e.root_cause_end = 300;
    EXPECT_THROW(anomaly_ranges({e}, trace), IntegrityError);
}

TEST(AnomalyRanges, OffGridSnapsWithWarning) {
    Trace trace;
    trace.trace_id = "t1";
    trace.features = {"a"};
    for (int64_t t = 0; t < 100; ++t)
        trace.timestamps.push_back(15 * t);
    trace.values = Matrix(100, 1);
    GroundTruthEntry e;
    e.trace_id = "t1";
    e.root_cause_start = 100; // not a multiple of 15 -> snaps to record 7
    e.root_cause_end = 250;
    std::vector<std::string> warnings;
    auto ranges = anomaly_ranges({e}, trace, &warnings);
    ASSERT_EQ(ranges.size(), 1u);
    EXPECT_EQ(ranges[0].start, 7u);
    EXPECT_EQ(ranges[0].end, 17u);
    EXPECT_FALSE(warnings.empty());
}
