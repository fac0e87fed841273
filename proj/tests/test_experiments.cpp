#include <gtest/gtest.h>

#include <set>

#include "experiments.hpp"

using namespace infospike::experiments;

TEST(Config, SectionsAndComments) {
    const auto cfg = parse_config("# top\nkappa = 0.2\n\n[delay]\ndt = 6 ; inline\n[grid]\nsize=10\n");
    ASSERT_EQ(cfg.size(), 3u);
    EXPECT_EQ(cfg.at("kappa"), "0.2");
    EXPECT_EQ(cfg.at("delay.dt"), "6");
    EXPECT_EQ(cfg.at("grid.size"), "10");
}

TEST(Config, MalformedLinesThrow) {
    EXPECT_THROW(parse_config("kappa 0.2\n"), ConfigError);
    EXPECT_THROW(parse_config("[delay\n"), ConfigError);
    EXPECT_THROW(parse_config("[]\n"), ConfigError);
    EXPECT_THROW(parse_config("= 3\n"), ConfigError);
}

TEST(Config, AppliesTopLevelThenOwnSection) {
    Params p({{"kappa", "0.1", ParamType::number, ""}, {"dt", "6", ParamType::number, ""}});
    apply_config(p, parse_config("kappa = 0.3\n[delay]\nkappa = 0.05\n[grid]\ndt = 99\n"), "delay");
    EXPECT_DOUBLE_EQ(p.num("kappa"), 0.05);
    EXPECT_DOUBLE_EQ(p.num("dt"), 6.0);
}

TEST(Params, TypedAccessAndValidation) {
    Params p({{"x", "1.5", ParamType::number, ""},
              {"n", "3", ParamType::integer, ""},
              {"f", "yes", ParamType::flag, ""},
              {"l", "1, 2,3", ParamType::list, ""},
              {"s", "abc", ParamType::text, ""}});
    EXPECT_DOUBLE_EQ(p.num("x"), 1.5);
    EXPECT_EQ(p.integer("n"), 3);
    EXPECT_TRUE(p.flag("f"));
    EXPECT_EQ(p.list("l"), (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(p.text("s"), "abc");
    EXPECT_THROW(p.set("n", "2.5"), ConfigError);
    EXPECT_THROW(p.set("x", "nan"), ConfigError);
    EXPECT_THROW(p.set("f", "maybe"), ConfigError);
    EXPECT_THROW(p.set("l", "1,,2"), ConfigError);
    EXPECT_THROW(p.set("missing", "1"), ConfigError);
    EXPECT_THROW(p.num("missing"), ConfigError);
    EXPECT_EQ(p.integer("n"), 3);
}

TEST(Seeds, SingleAndRange) {
    EXPECT_EQ(parse_seeds("7"), (std::vector<std::uint64_t>{7}));
    EXPECT_EQ(parse_seeds("2..4"), (std::vector<std::uint64_t>{2, 3, 4}));
    EXPECT_THROW(parse_seeds("4..2"), ConfigError);
    EXPECT_THROW(parse_seeds("-1"), ConfigError);
    EXPECT_THROW(parse_seeds("x"), ConfigError);
}

TEST(Seeds, RequiredCount) {
    EXPECT_EQ(required(0.8, 10), 8u);
    EXPECT_EQ(required(0.7, 10), 7u);
    EXPECT_EQ(required(0.5, 3), 2u);
}

TEST(Table, Csv) {
    Table t{"t", {"a", "b"}, {}};
    t.add({1L, 0.5});
    t.add({"x", 2});
    EXPECT_EQ(t.csv(), "a,b\n1,0.5\nx,2\n");
}

TEST(Registry, NamesAndDefaults) {
    const std::set<std::string> want{"delay",     "detect", "memory", "entropy-toy", "composite",
                                     "stdp",      "alpha-design", "grid", "faults", "oracle"};
    std::set<std::string> have;
    for (const auto& e : registry()) {
        have.insert(e.name);
        EXPECT_NO_THROW(defaults(e)) << e.name;
    }
    EXPECT_EQ(have, want);
    EXPECT_EQ(find("nope"), nullptr);
}

TEST(Registry, DeterministicPerSeedAcrossThreads) {
    const Experiment* e = find("composite");
    ASSERT_NE(e, nullptr);
    Params p = defaults(*e);
    p.set("a_both", "10");
    p.set("b_unsupervised", "10");
    const auto one = run_seeds(*e, p, {3, 4, 5}, 1);
    const auto many = run_seeds(*e, p, {3, 4, 5}, 3);
    ASSERT_EQ(one.size(), many.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        EXPECT_EQ(one[i].seed, many[i].seed);
        EXPECT_EQ(one[i].tables.front().csv(), many[i].tables.front().csv());
    }
    EXPECT_NE(one[0].tables.front().csv(), one[1].tables.front().csv());
}

TEST(Registry, BadParametersSurfaceAsConfigError) {
    const Experiment* e = find("delay");
    Params p = defaults(*e);
    p.set("dt", "2.5");
    EXPECT_THROW(run_seeds(*e, p, {0}, 1), ConfigError);
    const Experiment* g = find("grid");
    Params q = defaults(*g);
    q.set("arch", "bogus");
    EXPECT_THROW(run_seeds(*g, q, {0}, 1), ConfigError);
}
