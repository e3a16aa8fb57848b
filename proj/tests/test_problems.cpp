#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <random>
#include <set>

#include "pfopt/problems.hpp"

using namespace pfopt;

namespace {

ParamVector random_point(std::mt19937_64& rng, std::size_t d, double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    ParamVector x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = n(rng);
    return x;
}

void check_fd_gradient(const Problem& p, const ParamVector& x) {
    auto g = full_gradient(p, x.span());
    for (std::size_t i = 0; i < p.dim; ++i) {
        const double h = 1e-6 * (1.0 + std::abs(x[i]));
        ParamVector xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double fd = (loss(p, xp.span()) - loss(p, xm.span())) / (2 * h);
        CAPTURE(i);
        CHECK(std::abs(fd - g[i]) <= 1e-5 * std::max(1.0, std::abs(g[i])));
    }
}

Problem small(ProblemKind k, std::uint64_t seed) {
    SyntheticOptions o;
    o.l2_reg = 0.05;
    o.hidden = 4;
    return make_synthetic(k, 5, 30, seed, o);
}

}  // namespace

TEST_CASE("finite-difference gradients") {
    std::mt19937_64 rng(1);
    for (auto k : {ProblemKind::quadratic, ProblemKind::least_squares, ProblemKind::logistic, ProblemKind::tiny_mlp}) {
        CAPTURE(to_string(k));
        auto p = small(k, 3);
        for (int rep = 0; rep < 5; ++rep) check_fd_gradient(p, random_point(rng, p.dim, 0.5));
    }
    // away from the kinks
    auto a = make_synthetic(ProblemKind::abs_sum, 6, 1, 0);
    check_fd_gradient(a, ParamVector{0.3, -0.7, 1.1, -2.0, 0.05, 0.9});
}

TEST_CASE("worked minimizer example") {
    Problem p;
    p.kind = ProblemKind::quadratic;
    p.dim = 2;
    p.A = Matrix(2, 2);
    p.A(0, 0) = 1.0;
    p.A(1, 1) = 2.0;
    p.b = {1.0, 2.0};
    auto m = solve_minimizer(p);
    CHECK(std::abs(m.x_star[0] - 1.0) <= 1e-12);
    CHECK(std::abs(m.x_star[1] - 1.0) <= 1e-12);
    CHECK(std::abs(m.f_star - -1.5) <= 1e-12);
}

TEST_CASE("singular quadratic asks for regularization") {
    Problem p;
    p.kind = ProblemKind::quadratic;
    p.dim = 2;
    p.A = Matrix(2, 2);
    p.A(0, 0) = 1.0;
    p.b = {1.0, 1.0};
    CHECK_THROWS_AS(solve_minimizer(p), std::domain_error);
    p.l2_reg = 0.1;
    CHECK_NOTHROW(solve_minimizer(p));
}

TEST_CASE("logistic Newton certificate") {
    SyntheticOptions o;
    o.l2_reg = 0.1;
    auto p = make_synthetic(ProblemKind::logistic, 10, 200, 8, o);
    auto m = solve_minimizer(p);
    CHECK(m.method == MinimizerMethod::newton);
    CHECK(m.grad_norm <= 1e-10);
    CHECK(l2_norm(full_gradient(p, m.x_star.span()).span()) <= 1e-10);
    std::mt19937_64 rng(2);
    for (int i = 0; i < 20; ++i) CHECK(loss(p, random_point(rng, 10, 0.3).span()) >= m.f_star);
}

TEST_CASE("least squares minimizer is consistent with the loss") {
    auto p = make_synthetic(ProblemKind::least_squares, 6, 40, 4);
    auto m = solve_minimizer(p);
    CHECK(std::abs(loss(p, m.x_star.span()) - m.f_star) <= 1e-12);
    CHECK(l2_norm(full_gradient(p, m.x_star.span()).span()) <= 1e-8);
}

TEST_CASE("logistic loss by hand") {
    Problem p;
    p.kind = ProblemKind::logistic;
    p.dim = 2;
    p.l2_reg = 0.1;
    p.X = Matrix(3, 2);
    const double rows[3][2] = {{1.0, 2.0}, {-1.0, 0.5}, {0.3, -0.7}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) p.X(i, j) = rows[i][j];
    p.y = {1.0, -1.0, 1.0};
    CHECK(std::abs(loss(p, ParamVector{0.5, -1.0}.span()) - 0.85268001131439053) <= 1e-14);
}

TEST_CASE("abs_sum gradient is bounded by sqrt(d)") {
    auto p = make_synthetic(ProblemKind::abs_sum, 20, 1, 0);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) {
        auto g = full_gradient(p, random_point(rng, 20).span());
        CHECK(l2_norm(g.span()) <= std::sqrt(20.0) + 1e-12);
    }
    auto m = solve_minimizer(p);
    CHECK(m.f_star == 0.0);
    CHECK(m.x_star == ParamVector(20));
}

TEST_CASE("convexity along random segments") {
    std::mt19937_64 rng(6);
    for (auto k : {ProblemKind::quadratic, ProblemKind::least_squares, ProblemKind::logistic, ProblemKind::abs_sum}) {
        auto p = small(k, 9);
        for (int rep = 0; rep < 20; ++rep) {
            auto a = random_point(rng, p.dim), b = random_point(rng, p.dim);
            ParamVector mid(p.dim);
            for (std::size_t i = 0; i < p.dim; ++i) mid[i] = 0.5 * (a[i] + b[i]);
            CHECK(loss(p, mid.span()) <= 0.5 * (loss(p, a.span()) + loss(p, b.span())) + 1e-12);
        }
    }
}

TEST_CASE("minibatch gradients are unbiased") {
    auto p = make_synthetic(ProblemKind::logistic, 3, 20, 2);
    ParamVector x{0.2, -0.4, 0.1};
    auto full = full_gradient(p, x.span());
    NoiseModel noise{NoiseKind::minibatch, 0.0, 4, 77};
    const int draws = 40000;
    std::vector<double> mean(3, 0.0), sq(3, 0.0);
    for (int t = 0; t < draws; ++t) {
        auto g = stochastic_gradient(p, noise, x.span(), std::uint64_t(t));
        for (int i = 0; i < 3; ++i) {
            mean[i] += g[i];
            sq[i] += g[i] * g[i];
        }
    }
    for (int i = 0; i < 3; ++i) {
        mean[i] /= draws;
        const double var = sq[i] / draws - mean[i] * mean[i];
        const double se = std::sqrt(var / draws);
        CHECK(std::abs(mean[i] - full[i]) <= 4 * se);
    }
}

TEST_CASE("additive noise has the configured spread and is reproducible") {
    auto p = make_synthetic(ProblemKind::abs_sum, 4, 1, 0);
    ParamVector x{1.0, -1.0, 2.0, -2.0};
    NoiseModel noise{NoiseKind::additive_gaussian, 0.5, 1, 12};
    double sum = 0.0, sq = 0.0;
    const int draws = 20000;
    for (int t = 0; t < draws; ++t) {
        auto g = stochastic_gradient(p, noise, x.span(), std::uint64_t(t));
        const double e = g[0] - 1.0;
        sum += e;
        sq += e * e;
    }
    CHECK(std::abs(sum / draws) <= 4 * 0.5 / std::sqrt(double(draws)));
    CHECK(std::abs(std::sqrt(sq / draws) - 0.5) <= 0.02);
    CHECK(stochastic_gradient(p, noise, x.span(), 5) == stochastic_gradient(p, noise, x.span(), 5));
    CHECK_FALSE(stochastic_gradient(p, noise, x.span(), 5) == stochastic_gradient(p, noise, x.span(), 6));
}

TEST_CASE("minibatch requires data") {
    auto p = make_synthetic(ProblemKind::quadratic, 3, 10, 0);
    NoiseModel noise{NoiseKind::minibatch, 0.0, 2, 0};
    CHECK_THROWS_AS(stochastic_gradient(p, noise, ParamVector(3).span(), 0), std::invalid_argument);
}

TEST_CASE("synthetic generation") {
    SyntheticOptions o;
    o.mu = 0.1;
    auto a = make_synthetic(ProblemKind::quadratic, 8, 20, 5, o);
    auto b = make_synthetic(ProblemKind::quadratic, 8, 20, 5, o);
    CHECK(problem_to_json(a) == problem_to_json(b));
    CHECK(min_eigenvalue(a) >= 0.1 - 1e-12);
    o.condition = 100.0;
    auto c = make_synthetic(ProblemKind::quadratic, 8, 20, 5, o);
    CHECK(std::abs(condition_number(c) - 100.0) <= 1e-8);

    auto l = make_synthetic(ProblemKind::logistic, 4, 50, 1);
    std::set<double> labels(l.y.begin(), l.y.end());
    CHECK(labels == std::set<double>{-1.0, 1.0});

    auto mlp = make_synthetic(ProblemKind::tiny_mlp, 3, 10, 1);
    CHECK(mlp.dim == tiny_mlp_dim(3, 16));
    CHECK(tiny_mlp_dim(3, 16) == 16 * 5 + 1);
    CHECK_THROWS_AS(solve_minimizer(mlp), std::exception);
}

TEST_CASE("problem file round trip") {
    auto p = small(ProblemKind::logistic, 12);
    const auto path = std::filesystem::temp_directory_path() / "pfopt_problem_test.json";
    save_problem(p, path);
    auto q = load_problem(path);
    std::filesystem::remove(path);
    CHECK(q == p);
}

TEST_CASE("validation catches inconsistent data") {
    Problem p;
    p.kind = ProblemKind::quadratic;
    p.dim = 2;
    p.A = Matrix(2, 3);
    p.b = {1.0, 1.0};
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    auto l = small(ProblemKind::logistic, 1);
    l.y[0] = 0.5;
    CHECK_THROWS_AS(validate(l), std::invalid_argument);
}
