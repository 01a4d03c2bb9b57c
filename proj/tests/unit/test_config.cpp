#include <sstream>

#include <gtest/gtest.h>

#include "safeplan/config.hpp"

using namespace safeplan;

namespace {

AppConfig parse(const std::string& text)
{
    std::istringstream in(text);
    return parse_config(in);
}

}  // namespace

TEST(Config, DefaultsMatchTableOneScenario)
{
    const auto c = load_config("");
    EXPECT_DOUBLE_EQ(c.planner.v, 0.2);
    EXPECT_DOUBLE_EQ(c.planner.gains.k0, 4.0);
    EXPECT_DOUBLE_EQ(c.planner.gains.k1, 2.0);
    EXPECT_DOUBLE_EQ(c.ds, 0.2);
    EXPECT_DOUBLE_EQ(c.fit.ds, 0.2);
    EXPECT_DOUBLE_EQ(c.start.x1, 0.9);
    EXPECT_DOUBLE_EQ(c.goal.y, 6.8);
    EXPECT_EQ(c.planner.max_iterations, 120);
}

TEST(Config, ParsesKeysCommentsAndWhitespace)
{
    const auto c = parse("# room run\nplanner.v = 0.1\n  map.ds=0.15   # inline\n\n"
                         "planner.seed = 7\nfit.conservative = false\nplanner.start_theta = 7\n");
    EXPECT_DOUBLE_EQ(c.planner.v, 0.1);
    EXPECT_DOUBLE_EQ(c.ds, 0.15);
    EXPECT_DOUBLE_EQ(c.planner.ds, 0.15);
    EXPECT_DOUBLE_EQ(c.fit.ds, 0.15);
    EXPECT_EQ(c.planner.rng_seed, 7u);
    EXPECT_FALSE(c.fit.conservative);
    EXPECT_NEAR(c.start.theta, 7 - 2 * 3.141592653589793, 1e-12);
}

TEST(Config, StrictErrors)
{
    EXPECT_THROW(parse("planner.speed = 1\n"), ConfigError);
    EXPECT_THROW(parse("planner.v = 0.1\nplanner.v = 0.2\n"), ConfigError);
    EXPECT_THROW(parse("planner.v = fast\n"), ConfigError);
    EXPECT_THROW(parse("planner.v 0.1\n"), ConfigError);
    EXPECT_THROW(parse("planner.steps = 2.5\n"), ConfigError);
    EXPECT_THROW(parse("planner.v = -1\n"), ConfigError);
    EXPECT_THROW(parse("planner.goal_bias = 1\n"), ConfigError);
    EXPECT_THROW(parse("fit.conservative = maybe\n"), ConfigError);
    EXPECT_THROW(parse("map.ds = nan\n"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/config.txt"), ConfigError);
}

TEST(Config, CanonicalTextRoundTrips)
{
    const auto c = parse("planner.v = 0.1\nmap.ds = 0.15\nplanner.start_x = 6.5\n"
                         "planner.goal_x = 3.6\nsim.dt = 0.005\nplanner.seed = 12345678901\n");
    const std::string text = to_text(c);
    const auto back = parse(text);
    EXPECT_EQ(to_text(back), text);
    EXPECT_EQ(back.planner.rng_seed, 12345678901u);
    EXPECT_DOUBLE_EQ(back.sim.dt, 0.005);
    std::size_t lines = 0;
    for (const char ch : text)
        lines += ch == '\n' ? 1 : 0;
    EXPECT_EQ(lines, config_keys().size());
}
