#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "pfopt/schedule.hpp"

using namespace pfopt;

TEST_CASE("constant schedule") {
    Schedule s{ScheduleKind::constant, 10, 0, 0.0};
    for (std::uint64_t t = 0; t < 10; ++t) CHECK(multiplier(s, t) == 1.0);
}

TEST_CASE("cosine endpoints and midpoint") {
    Schedule s{ScheduleKind::cosine, 11, 0, 0.0};
    CHECK(multiplier(s, 0) == 1.0);
    CHECK(std::abs(multiplier(s, 10)) <= 1e-15);
    CHECK(std::abs(multiplier(s, 5) - 0.5) <= 1e-15);
    s.floor = 0.1;
    CHECK(std::abs(multiplier(s, 10) - 0.1) <= 1e-15);
    CHECK(std::abs(multiplier(s, 2) - 0.91405764746872631) <= 1e-15);
}

TEST_CASE("cosine warmup") {
    Schedule s{ScheduleKind::cosine_warmup, 10000, 2000, 0.0};
    CHECK(multiplier(s, 0) == 1.0 / 2000.0);
    CHECK(multiplier(s, 1999) == 1.0);
    CHECK(multiplier(s, 2000) == 1.0);
    CHECK(std::abs(multiplier(s, 9999)) <= 1e-15);
}

TEST_CASE("cosine phases are monotone") {
    Schedule s{ScheduleKind::cosine_warmup, 500, 50, 0.05};
    for (std::uint64_t t = 1; t < 50; ++t) CHECK(multiplier(s, t) > multiplier(s, t - 1));
    for (std::uint64_t t = 51; t < 500; ++t) CHECK(multiplier(s, t) <= multiplier(s, t - 1));
    for (std::uint64_t t = 0; t < 500; ++t) {
        CHECK(multiplier(s, t) > 0.0);
        CHECK(multiplier(s, t) <= 1.0);
    }
}

TEST_CASE("schedule errors") {
    CHECK_THROWS_AS(multiplier(Schedule{ScheduleKind::cosine, 10, 0, 0.0}, 10), std::out_of_range);
    CHECK_THROWS_AS(validate(Schedule{ScheduleKind::cosine, 0, 0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(Schedule{ScheduleKind::cosine_warmup, 10, 10, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(Schedule{ScheduleKind::cosine, 10, 0, 1.5}), std::invalid_argument);
    CHECK(parse_schedule_kind(to_string(ScheduleKind::cosine_warmup)) == ScheduleKind::cosine_warmup);
}
