#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "pfopt/vecmath.hpp"

using namespace pfopt;

TEST_CASE("construction rejects non-finite entries") {
    CHECK_THROWS_AS(ParamVector({1.0, std::nan("")}), std::invalid_argument);
    CHECK_THROWS_AS(ParamVector({std::numeric_limits<double>::infinity()}), std::invalid_argument);
    CHECK_THROWS_AS(ParamVector(3, std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
    CHECK_NOTHROW(ParamVector(std::vector<double>{0.0, -1.0, 1e300}));
    ParamVector z(4);
    CHECK(z.size() == 4);
    CHECK(z[3] == 0.0);
}

TEST_CASE("elementwise square and sqrt") {
    ParamVector v{1.0, -2.0, 3.0};
    CHECK(elementwise_square(v) == ParamVector{1.0, 4.0, 9.0});
    CHECK(elementwise_sqrt(ParamVector{4.0, 0.0, 2.25}) == ParamVector{2.0, 0.0, 1.5});
    CHECK_THROWS_AS(elementwise_sqrt(ParamVector{1.0, -1e-300}), std::domain_error);
    try {
        (void)elementwise_sqrt(ParamVector{1.0, 2.0, -3.0});
        FAIL("expected throw");
    } catch (const std::domain_error& e) {
        CHECK(std::string(e.what()).find('2') != std::string::npos);
    }
}

TEST_CASE("preconditioned division") {
    auto q = preconditioned_div(ParamVector{2.0, 4.0}, ParamVector{1.0, 3.0}, 1.0);
    CHECK(q == ParamVector{1.0, 1.0});
    CHECK_THROWS_AS(preconditioned_div(ParamVector{1.0}, ParamVector{0.0}, 0.0), std::domain_error);
    CHECK_THROWS_AS(preconditioned_div(ParamVector{1.0, 2.0}, ParamVector{1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("running max") {
    CHECK(running_max(ParamVector{1.0, 5.0, -2.0}, ParamVector{3.0, 4.0, -1.0}) == ParamVector{3.0, 5.0, -1.0});
    CHECK_THROWS_AS(running_max(ParamVector{1.0}, ParamVector{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("norms and distances") {
    ParamVector v{3.0, -4.0};
    CHECK(l2_norm(v.span()) == 5.0);
    CHECK(squared_l2_norm(v.span()) == 25.0);
    CHECK(l1_norm(v.span()) == 7.0);
    CHECK(linf_norm(v.span()) == 4.0);
    ParamVector w{0.0, 0.0};
    CHECK(l2_distance(v.span(), w.span()) == 5.0);
    CHECK(linf_distance(v.span(), w.span()) == 4.0);
    CHECK(dot(v.span(), ParamVector{1.0, 1.0}.span()) == -1.0);
    CHECK(l2_norm(ParamVector{}.span()) == 0.0);
    CHECK_THROWS_AS(dot(v.span(), ParamVector{1.0}.span()), std::invalid_argument);
}

TEST_CASE("axpy") {
    ParamVector y{1.0, 1.0};
    axpy(2.0, ParamVector{1.0, -1.0}.span(), y.span());
    CHECK(y == ParamVector{3.0, -1.0});
}

TEST_CASE("norm properties on random vectors") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n(0.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 1 + trial % 37;
        std::vector<double> a(d), b(d);
        for (auto& e : a) e = n(rng);
        for (auto& e : b) e = n(rng);
        ParamVector x(a), y(b);
        const double l1 = l1_norm(x.span()), l2 = l2_norm(x.span()), li = linf_norm(x.span());
        CHECK(li <= l2 * (1 + 1e-15));
        CHECK(l2 <= l1 * (1 + 1e-15));
        CHECK(l1 <= std::sqrt(double(d)) * l2 * (1 + 1e-12));
        CHECK(std::abs(dot(x.span(), y.span())) <= l2 * l2_norm(y.span()) * (1 + 1e-12));
        CHECK(l2_distance(x.span(), y.span()) <= l2 + l2_norm(y.span()) + 1e-12);
        CHECK(std::abs(squared_l2_norm(x.span()) - l2 * l2) <= 1e-12 * (1 + l2 * l2));
        auto sq = elementwise_square(x);
        auto back = elementwise_sqrt(sq);
        for (std::size_t i = 0; i < d; ++i) CHECK(back[i] == doctest::Approx(std::abs(a[i])).epsilon(1e-15));
    }
}
