#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "egmrsi/config.hpp"
#include "egmrsi/errors.hpp"
#include "egmrsi/rng.hpp"
#include "egmrsi/trace.hpp"

using namespace egmrsi;

TEST(Config, DefaultsAreValid) {
    EXPECT_EQ(RunConfig{}.violations(), "");
}

TEST(Config, RoundTripsThroughText) {
    RunConfig cfg;
    cfg.steps = 1234;
    cfg.seed = 99;
    cfg.gamma = 0.25;
    cfg.env.task_schedule = {{0, 0}, {1, 10}};
    cfg.goal_world.shift_levels = {0.0, 3.5};
    const std::string text = to_string(cfg);
    const RunConfig back = parse_config_string(text);
    EXPECT_EQ(to_string(back), text);
    EXPECT_EQ(back.steps, 1234u);
    EXPECT_EQ(back.seed, 99u);
    EXPECT_EQ(back.gamma, 0.25);
    EXPECT_EQ(back.env.task_schedule, cfg.env.task_schedule);
}

TEST(Config, IgnoresCommentsAndBlankLines) {
    const RunConfig cfg = parse_config_string("# header\n\nrun.steps = 77   # trailing\n");
    EXPECT_EQ(cfg.steps, 77u);
}

TEST(Config, ParseErrorsCarryLineNumbers) {
    const auto line_of = [](const std::string& text) -> std::size_t {
        try {
            parse_config_string(text);
        } catch (const ParseError& e) {
            EXPECT_NE(std::string(e.what()).find("line " + std::to_string(e.line())), std::string::npos);
            return e.line();
        }
        return 0;
    };
    EXPECT_EQ(line_of("run.steps = 5\nno equals sign\n"), 2u);
    EXPECT_EQ(line_of("\n\nrun.bogus = 1\n"), 3u);
    EXPECT_EQ(line_of("run.steps = 5\nrun.steps = 6\n"), 2u);
    EXPECT_EQ(line_of("run.steps = five\n"), 1u);
}

TEST(Config, LoadValidatesAndItemizesReasons) {
    RunConfig cfg;
    cfg.meta_rate = 0.0;
    cfg.safety.audit_every = 0;
    const std::string bad = cfg.violations();
    EXPECT_NE(bad.find("run.meta_rate"), std::string::npos);
    EXPECT_NE(bad.find("safety.audit_every"), std::string::npos);
    EXPECT_THROW(cfg.validate(), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/config.cfg"), ConfigError);
}

TEST(Config, RejectsOverflowingWeightCombination) {
    RunConfig cfg;
    cfg.s_cap = 1000.0;
    EXPECT_NE(cfg.violations().find("overflow"), std::string::npos);
}

namespace {

TraceRow random_row(Rng& rng, std::int64_t t) {
    TraceRow r;
    for (const TraceColumn& col : kTraceColumns) {
        if (col.real) r.*col.real = rng.normal(0.0, std::exp(rng.uniform(-20.0, 20.0)));
        else r.*col.integer = static_cast<std::int64_t>(rng.below(1000)) - 1;
    }
    r.t = t;
    return r;
}

}  // namespace

TEST(Trace, RoundTripPreservesNineDigits) {
    Rng rng(1);
    std::vector<TraceRow> rows;
    for (int i = 0; i < 200; ++i) rows.push_back(random_row(rng, i));
    std::stringstream ss;
    write_trace(ss, rows);
    const std::vector<TraceRow> back = read_trace(ss);
    ASSERT_EQ(back.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (const TraceColumn& col : kTraceColumns) {
            if (col.real) {
                ASSERT_EQ(back[i].*col.real, serialized(rows[i].*col.real)) << col.name;
            } else {
                ASSERT_EQ(back[i].*col.integer, rows[i].*col.integer) << col.name;
            }
        }
    }
    // A second pass is a fixed point.
    std::stringstream again;
    write_trace(again, back);
    EXPECT_TRUE(read_trace(again) == back);
}

TEST(Trace, MalformedRowsReportTheirLine) {
    std::stringstream ss;
    ss << trace_header() << "\n" << format_row(TraceRow{}) << "\n1,2,3\n";
    try {
        read_trace(ss);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    std::string row = format_row(TraceRow{});
    row.replace(0, 1, "x");
    std::stringstream bad_value(trace_header() + "\n" + row + "\n");
    EXPECT_THROW(read_trace(bad_value), ParseError);
    std::stringstream bad_header("t,c\n");
    EXPECT_THROW(read_trace(bad_header), ParseError);
    std::stringstream empty("");
    EXPECT_THROW(read_trace(empty), ParseError);
}

TEST(Trace, HeaderOnlyParsesToNoRows) {
    std::stringstream ss(trace_header() + "\n");
    EXPECT_TRUE(read_trace(ss).empty());
}

TEST(KeyValueReport, RoundTripsAndKeepsOrder) {
    KeyValueReport r;
    r.set("b", 1.5);
    r.set("a", std::size_t{3});
    r.set("flag", true);
    r.set_exact("x", 0.1);
    r.set("b", 2.5);
    std::stringstream ss(r.str());
    const KeyValueReport back = KeyValueReport::parse(ss);
    EXPECT_EQ(back.entries(), r.entries());
    EXPECT_EQ(back.entries().front().first, "b");
    EXPECT_EQ(back.get_real("x"), 0.1);
    EXPECT_THROW(back.get("missing"), Error);
}
