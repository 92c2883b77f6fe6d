#include "rfcast/quarter.hpp"

#include <gtest/gtest.h>

#include <random>

using rfcast::format_quarter;
using rfcast::parse_quarter;
using rfcast::Quarter;
using rfcast::quarter_add;
using rfcast::quarter_diff;

TEST(Quarter, AddWithinYear) { EXPECT_EQ(quarter_add(Quarter(1990, 1), 1), Quarter(1990, 2)); }

TEST(Quarter, AddRollsOverYear) { EXPECT_EQ(quarter_add(Quarter(1990, 4), 1), Quarter(1991, 1)); }

TEST(Quarter, AddBackwardSixQuarters) {
    // 1970Q2 -> Q1, 1969Q4, Q3, Q2, Q1, 1968Q4.
    EXPECT_EQ(quarter_add(Quarter(1970, 2), -6), Quarter(1968, 4));
}

TEST(Quarter, DiffCountsSampleSpan) {
    EXPECT_EQ(quarter_diff(Quarter(2016, 2), Quarter(1990, 2)), 104);
    EXPECT_EQ(quarter_diff(Quarter(1990, 2), Quarter(1990, 2)), 0);
    EXPECT_EQ(quarter_diff(Quarter(1990, 1), Quarter(1990, 3)), -2);
    EXPECT_EQ(quarter_diff(Quarter(1990, 1), Quarter(1970, 2)) + 1, 80);
}

TEST(Quarter, Ordering) {
    EXPECT_LT(Quarter(1989, 4), Quarter(1990, 1));
    EXPECT_LT(Quarter(1990, 1), Quarter(1990, 2));
    EXPECT_GT(Quarter(2016, 2), Quarter(2016, 1));
}

TEST(Quarter, ParseAndFormat) {
    EXPECT_EQ(parse_quarter("1990Q2"), Quarter(1990, 2));
    EXPECT_EQ(parse_quarter("2016Q2"), Quarter(2016, 2));
    EXPECT_EQ(format_quarter(Quarter(1968, 4)), "1968Q4");
}

TEST(Quarter, ParseErrorsNameTheToken) {
    for (const char* bad : {"1990Q5", "1990Q0", "1990", "Q1", "1990q1", "19x0Q1", "1990Q12", "", "+1990Q1"}) {
        try {
            (void)parse_quarter(bad);
            FAIL() << "accepted " << bad;
        } catch (const rfcast::ParseError& e) {
            EXPECT_NE(std::string(e.what()).find(std::string("'") + bad + "'"), std::string::npos) << e.what();
        }
    }
}

TEST(Quarter, ConstructorRejectsBadQuarter) { EXPECT_THROW(Quarter(2000, 5), rfcast::DomainError); }

TEST(Quarter, RangeParsing) {
    const auto r = rfcast::parse_quarter_range("1990Q2:2016Q2");
    EXPECT_EQ(r.first, Quarter(1990, 2));
    EXPECT_EQ(r.size(), 105);
    EXPECT_THROW((void)rfcast::parse_quarter_range("2016Q2:1990Q2"), rfcast::ParseError);
    EXPECT_THROW((void)rfcast::parse_quarter_range("2016Q2"), rfcast::ParseError);
}

TEST(QuarterProperty, AddDiffInverseAndAssociative) {
    std::mt19937_64 gen(42);
    std::uniform_int_distribution<int> year(-50, 3000);
    std::uniform_int_distribution<int> qd(1, 4);
    std::uniform_int_distribution<int> step(-5000, 5000);
    for (int i = 0; i < 5000; ++i) {
        const Quarter q(year(gen), qd(gen));
        const int a = step(gen);
        const int b = step(gen);
        EXPECT_EQ(quarter_diff(quarter_add(q, a), q), a);
        EXPECT_EQ(quarter_add(quarter_add(q, a), b), quarter_add(q, a + b));
        const Quarter r = quarter_add(q, a);
        if (r.year >= 0) {
            EXPECT_EQ(parse_quarter(format_quarter(r)), r);
        }
    }
}
