#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "racer/action_space.hpp"

using namespace racer;

TEST_CASE("build (6, 20, 3, 5): the 15-action reference set") {
    auto s = DiscreteActionSpace::build(6, 20, 3, 5);
    REQUIRE(s.size() == 15);
    CHECK(s.speeds() == std::vector<double>{2, 4, 6});
    CHECK(s.angles() == std::vector<double>{-20, -10, 0, 10, 20});
    // angle-major ascending, speed ascending within angle
    CHECK(s[0].steering_deg == -20);
    CHECK(s[0].speed_mps == 2);
    CHECK(s[2].speed_mps == 6);
    CHECK(s[14].steering_deg == 20);
    CHECK(s[14].speed_mps == 6);
}

TEST_CASE("build (8, 30, 3, 7) with {3,5,8} override: the 21-action set") {
    auto s = DiscreteActionSpace::build(8, 30, 3, 7);
    REQUIRE(s.size() == 21);
    CHECK(s.angles() == std::vector<double>{-30, -20, -10, 0, 10, 20, 30});

    auto o = s.with_speeds({3, 5, 8});
    REQUIRE(o.size() == 21);
    CHECK(o.speeds() == std::vector<double>{3, 5, 8});
    bool has_l30_8 = false, has_0_3 = false;
    for (int i = 0; i < o.size(); ++i) {
        if (o[i].steering_deg == -30 && o[i].speed_mps == 8) has_l30_8 = true;
        if (o[i].steering_deg == 0 && o[i].speed_mps == 3) has_0_3 = true;
    }
    CHECK(has_l30_8);
    CHECK(has_0_3);
}

TEST_CASE("degenerate granularity (v, 0, 1, 1) gives a single straight action") {
    auto s = DiscreteActionSpace::build(3.5, 0, 1, 1);
    REQUIRE(s.size() == 1);
    CHECK(s[0].steering_deg == 0);
    CHECK(s[0].speed_mps == 3.5);
}

TEST_CASE("override with the even set reproduces build() output") {
    auto s = DiscreteActionSpace::build(8, 30, 3, 7);
    auto o = s.with_speeds({8.0 / 3.0, 16.0 / 3.0, 8.0});
    REQUIRE(o.size() == s.size());
    for (int i = 0; i < s.size(); ++i) {
        CHECK(o[i].steering_deg == s[i].steering_deg);
        CHECK(o[i].speed_mps == doctest::Approx(s[i].speed_mps).epsilon(1e-12));
    }
}

TEST_CASE("override to a single speed keeps one action per angle") {
    auto s = DiscreteActionSpace::build(8, 30, 3, 7).with_speeds({8});
    REQUIRE(s.size() == 7);
    for (int i = 0; i < s.size(); ++i) CHECK(s[i].speed_mps == 8);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(DiscreteActionSpace::build(6, 20, 3, 4), std::invalid_argument);  // even
    CHECK_THROWS_AS(DiscreteActionSpace::build(0, 20, 3, 5), std::invalid_argument);
    CHECK_THROWS_AS(DiscreteActionSpace::build(6, -1, 3, 5), std::invalid_argument);
    CHECK_THROWS_AS(DiscreteActionSpace::build(6, 20, 0, 5), std::invalid_argument);
    auto s = DiscreteActionSpace::build(6, 20, 3, 5);
    CHECK_THROWS_AS(s.with_speeds({}), std::invalid_argument);
    CHECK_THROWS_AS(s.with_speeds({-1.0}), std::invalid_argument);
    CHECK_THROWS_AS(s.with_speeds({7.0}), std::invalid_argument);  // > max_speed
    CHECK_THROWS_AS(s.with_speeds({2.0, 2.0}), std::invalid_argument);
}

TEST_CASE("index mapping is a bijection; angles symmetric and contain zero") {
    for (auto [ms, ma, sg, ag] :
         {std::tuple{6.0, 20.0, 3, 5}, {8.0, 30.0, 3, 7}, {4.0, 15.0, 2, 3}, {2.0, 0.0, 1, 1}}) {
        auto s = DiscreteActionSpace::build(ms, ma, sg, ag);
        CHECK(s.size() == sg * ag);
        std::set<std::pair<double, double>> uniq;
        for (int i = 0; i < s.size(); ++i) uniq.insert({s[i].steering_deg, s[i].speed_mps});
        CHECK(static_cast<int>(uniq.size()) == s.size());  // bijection

        bool has_zero = false;
        for (double a : s.angles()) {
            if (a == 0) has_zero = true;
            CHECK(std::count(s.angles().begin(), s.angles().end(), -a) == 1);  // closed under negation
        }
        CHECK(has_zero);
        for (double v : s.speeds()) {
            CHECK(v > 0);
            CHECK(v <= ms);
        }
    }
}

TEST_CASE("nearest maps continuous commands onto the grid") {
    auto s = DiscreteActionSpace::build(6, 20, 3, 5);
    int i = s.nearest(-12.0, 4.4);
    CHECK(s[i].steering_deg == -10);
    CHECK(s[i].speed_mps == 4);
    i = s.nearest(25.0, 9.0);
    CHECK(s[i].steering_deg == 20);
    CHECK(s[i].speed_mps == 6);
}
