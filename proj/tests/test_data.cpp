#include "rfcast/data.hpp"
#include "rfcast/synthetic.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using rfcast::Aggregation;
using rfcast::Frequency;
using rfcast::Quarter;

namespace {

std::vector<rfcast::RawObservation> parse(const std::string& text, Frequency f = Frequency::quarterly) {
    std::istringstream in(text);
    return rfcast::parse_csv(in, f, "test.csv");
}

std::string error_of(auto&& fn) {
    try {
        fn();
    } catch (const rfcast::Error& e) {
        return e.what();
    }
    return "";
}

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

} // namespace

TEST(Csv, ParsesRowsInFileOrder) {
    const auto obs = parse("period,value\n1990Q1,2.5\n1990Q2,3.0\n");
    ASSERT_EQ(obs.size(), 2U);
    EXPECT_EQ(obs[0].period, "1990Q1");
    EXPECT_EQ(*obs[1].value, 3.0);
}

TEST(Csv, MissingValuesAreKept) {
    const auto obs = parse("period,value\n1990-01,1\n1990-02,\n", Frequency::monthly);
    ASSERT_EQ(obs.size(), 2U);
    EXPECT_FALSE(obs[1].value.has_value());
}

TEST(Csv, CrlfAndBomAccepted) {
    const auto obs = parse("\xEF\xBB\xBFperiod,value\r\n1990Q1,2.5\r\n1990Q2,-1e-2\r\n");
    ASSERT_EQ(obs.size(), 2U);
    EXPECT_EQ(*obs[1].value, -0.01);
}

TEST(Csv, ErrorsCarryLineNumbers) {
    EXPECT_NE(error_of([] { (void)parse("period,value\n1990Q1,abc\n"); }).find("line 2"), std::string::npos);
    const auto dup = error_of([] { (void)parse("period,value\n1990Q1,1\n1990Q2,2\n1990Q1,3\n"); });
    EXPECT_NE(dup.find("line 4"), std::string::npos);
    EXPECT_NE(dup.find("duplicate"), std::string::npos);
    EXPECT_NE(error_of([] { (void)parse("date,value\n"); }).find("line 1"), std::string::npos);
    EXPECT_NE(error_of([] { (void)parse("period,value\n1990Q1,1,2\n"); }).find("line 2"), std::string::npos);
    EXPECT_THROW((void)parse(""), rfcast::ParseError);
}

TEST(Csv, FrequencyMismatchFailsAtParseTime) {
    EXPECT_THROW((void)parse("period,value\n1990-01,1\n", Frequency::quarterly), rfcast::ParseError);
    EXPECT_THROW((void)parse("period,value\n1990Q1,1\n", Frequency::monthly), rfcast::ParseError);
    EXPECT_THROW((void)parse("period,value\n1990-13,1\n", Frequency::monthly), rfcast::ParseError);
}

TEST(Csv, LoadCsvFromDisk) {
    const auto dir = fresh_dir("rfcast_csv_test");
    write(dir / "a.csv", "period,value\n1990Q1,2.5\n1990Q2,3.0\n");
    EXPECT_EQ(rfcast::load_csv((dir / "a.csv").string(), Frequency::quarterly).size(), 2U);
    EXPECT_THROW((void)rfcast::load_csv((dir / "missing.csv").string(), Frequency::quarterly), rfcast::Error);
    fs::remove_all(dir);
}

TEST(Monthly, AverageAndLast) {
    const auto obs = parse("period,value\n1990-01,4.0\n1990-02,5.0\n1990-03,6.0\n", Frequency::monthly);
    const auto avg = rfcast::monthly_to_quarterly(obs, Aggregation::average);
    ASSERT_EQ(avg.size(), 1U);
    EXPECT_EQ(avg.start(), (Quarter{1990, 1}));
    EXPECT_EQ(avg.values()[0], 5.0);
    EXPECT_EQ(rfcast::monthly_to_quarterly(obs, Aggregation::last).values()[0], 6.0);
}

TEST(Monthly, IncompleteQuarterAndGaps) {
    const auto missing = parse("period,value\n1990-01,4.0\n1990-03,6.0\n", Frequency::monthly);
    const auto msg = error_of([&] { (void)rfcast::monthly_to_quarterly(missing, Aggregation::average); });
    EXPECT_NE(msg.find("1990Q1"), std::string::npos) << msg;
    EXPECT_EQ(rfcast::monthly_to_quarterly(missing, Aggregation::last).values()[0], 6.0);

    const auto blank = parse("period,value\n1990-01,4.0\n1990-02,5\n1990-03,\n", Frequency::monthly);
    EXPECT_THROW((void)rfcast::monthly_to_quarterly(blank, Aggregation::last), rfcast::DomainError);

    const auto gap = parse("period,value\n1990-01,1\n1990-02,1\n1990-03,1\n1990-07,1\n1990-08,1\n1990-09,1\n",
                           Frequency::monthly);
    EXPECT_THROW((void)rfcast::monthly_to_quarterly(gap, Aggregation::average), rfcast::AlignmentError);
}

TEST(Quarterly, GapsAndMissingValues) {
    EXPECT_THROW((void)rfcast::quarterly_series(parse("period,value\n1990Q1,1\n1990Q3,2\n"), "x"), rfcast::AlignmentError);
    EXPECT_THROW((void)rfcast::quarterly_series(parse("period,value\n1990Q1,1\n1990Q2,\n"), "x"), rfcast::DomainError);
    const auto s = rfcast::quarterly_series(parse("period,value\n1990Q2,2\n1990Q1,1\n"), "x");
    EXPECT_EQ(s.start(), (Quarter{1990, 1}));
    EXPECT_EQ(s.values(), (std::vector<double>{1, 2}));
}

TEST(Manifest, AssemblesUsShapedSnapshot) {
    const auto dir = fresh_dir("rfcast_manifest_test");
    const auto path = rfcast::synthetic::write_raw_snapshot(dir, 1);
    const auto manifest = rfcast::load_manifest(path);
    EXPECT_EQ(manifest.country, rfcast::Country::US);
    std::ostringstream log;
    const auto ds = rfcast::assemble_dataset(manifest, &log);
    for (const char* id : {"gdp_growth_third_estimate", "tbill_3m", "gov_bond_10y", "equity_pct_change",
                           "debt_gdp_ratio", "spf_mean_h1", "spf_mean_h3"}) {
        EXPECT_TRUE(ds.contains(id)) << id;
        EXPECT_NE(log.str().find(std::string("series ") + id), std::string::npos);
    }
    EXPECT_EQ(ds.size(), 7U);
    EXPECT_EQ(ds.at("equity_pct_change").start(), (Quarter{1960, 2}));
    EXPECT_EQ(ds.at("tbill_3m").start(), (Quarter{1960, 1}));
    EXPECT_EQ(ds.at("debt_gdp_ratio").end(), (Quarter{2016, 4}));

    const auto again = rfcast::assemble_dataset(manifest);
    for (const auto& [id, s] : ds) {
        EXPECT_EQ(again.at(id).values(), s.values());
        EXPECT_EQ(again.at(id).start(), s.start());
    }
    fs::remove_all(dir);
}

TEST(Manifest, MissingFileNamesTheSeries) {
    const auto dir = fresh_dir("rfcast_manifest_missing");
    const auto path = rfcast::synthetic::write_raw_snapshot(dir, 2);
    fs::remove(dir / "raw" / "gov_bond_10y.csv");
    const auto msg = error_of([&] { (void)rfcast::assemble_dataset(rfcast::load_manifest(path)); });
    EXPECT_NE(msg.find("gov_bond_10y"), std::string::npos) << msg;
    fs::remove_all(dir);
}

TEST(Manifest, RatioSpansOverlap) {
    const auto dir = fresh_dir("rfcast_manifest_ratio");
    write(dir / "num.csv", "period,value\n2000Q1,2\n2000Q2,4\n2000Q3,6\n");
    write(dir / "den.csv", "period,value\n2000Q2,2\n2000Q3,3\n2000Q4,5\n");
    write(dir / "m.manifest",
          "country = UK\n[n]\nfile = num.csv\nfrequency = quarterly\ntransform = ratio_numerator\nratio = r\n"
          "[d]\nfile = den.csv\nfrequency = quarterly\ntransform = ratio_denominator\nratio = r\n");
    const auto ds = rfcast::assemble_dataset(rfcast::load_manifest(dir / "m.manifest"));
    ASSERT_EQ(ds.size(), 1U);
    EXPECT_EQ(ds.at("r").start(), (Quarter{2000, 2}));
    EXPECT_EQ(ds.at("r").values(), (std::vector<double>{2.0, 2.0}));
    fs::remove_all(dir);
}

TEST(Manifest, SchemaErrors) {
    auto parse_manifest = [](const std::string& text) {
        std::istringstream in(text);
        return rfcast::parse_manifest(rfcast::parse_key_value(in, "m"), ".", "m");
    };
    EXPECT_THROW((void)parse_manifest("country = FR\n"), rfcast::Error);
    EXPECT_THROW((void)parse_manifest("country = US\ncolour = red\n"), rfcast::ConfigError);
    EXPECT_THROW((void)parse_manifest("country = US\n[a]\nfile = a.csv\nfrequency = weekly\n"), rfcast::ConfigError);
    EXPECT_THROW((void)parse_manifest("country = US\n[a]\nfile = a.csv\nfrequency = monthly\n"), rfcast::ConfigError);
    EXPECT_THROW((void)parse_manifest("country = US\n[a]\nfile = a.csv\nfrequency = quarterly\naggregation = last\n"),
                 rfcast::ConfigError);
    EXPECT_THROW((void)parse_manifest("country = US\n[a]\nfile = a.csv\nfrequency = quarterly\n"
                                      "transform = ratio_numerator\nratio = r\n"),
                 rfcast::ConfigError);
    EXPECT_THROW((void)parse_manifest("country = US\n[a]\nfile = a.csv\nfrequency = quarterly\n[a]\nfile = b.csv\n"
                                      "frequency = quarterly\n"),
                 rfcast::Error);
    const auto ok = parse_manifest("country = UK\n[a]\nfile = a.csv\nfrequency = monthly\naggregation = last\n"
                                   "transform = pct_change\n");
    ASSERT_EQ(ok.entries.size(), 1U);
    EXPECT_EQ(ok.entries[0].transform, rfcast::Transform::pct_change);
}

TEST(Manifest, DeclaredFrequencyIsEnforced) {
    const auto dir = fresh_dir("rfcast_manifest_freq");
    write(dir / "q.csv", "period,value\n2000Q1,1\n2000Q2,2\n");
    write(dir / "m.manifest", "country = US\n[x]\nfile = q.csv\nfrequency = monthly\naggregation = last\n");
    const auto msg = error_of([&] { (void)rfcast::assemble_dataset(rfcast::load_manifest(dir / "m.manifest")); });
    EXPECT_NE(msg.find("'x'"), std::string::npos) << msg;
    EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
    fs::remove_all(dir);
}
