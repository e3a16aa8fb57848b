#pragma once

// Convex benchmark problems (plus one small nonconvex network) behind a
// seeded stochastic gradient oracle.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pfopt/vecmath.hpp"

namespace pfopt {

enum class ProblemKind { quadratic, least_squares, logistic, abs_sum, tiny_mlp };

std::string_view to_string(ProblemKind k);
ProblemKind parse_problem_kind(std::string_view s);

/// Row-major dense matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

    friend bool operator==(const Matrix&, const Matrix&) = default;
};

/// A benchmark objective.
///
///   quadratic      f(x) = 1/2 x'Ax - b'x                         (A, b)
///   least_squares  f(x) = 1/(2m) |Xx - y|^2                      (X, y)
///   logistic       f(w) = 1/m sum log(1 + exp(-y_i <w, x_i>))    (X, y in {-1,+1})
///   abs_sum        f(x) = |x|_1
///   tiny_mlp       f(p) = 1/(2m) sum (net_p(x_i) - y_i)^2, net = d_in -> hidden tanh -> 1
///
/// Every kind adds l2_reg/2 |x|^2 (coupled weight decay).
struct Problem {
    ProblemKind kind = ProblemKind::quadratic;
    std::size_t dim = 0;
    double l2_reg = 0.0;
    Matrix A;
    std::vector<double> b;
    Matrix X;
    std::vector<double> y;
    std::size_t hidden = 16;

    std::size_t num_samples() const { return X.rows; }
    bool has_samples() const { return kind == ProblemKind::least_squares || kind == ProblemKind::logistic ||
                                      kind == ProblemKind::tiny_mlp; }

    friend bool operator==(const Problem&, const Problem&) = default;
};

// Parameter count of the tiny_mlp network for d_in inputs.
std::size_t tiny_mlp_dim(std::size_t d_in, std::size_t hidden);

// Throws std::invalid_argument when the problem data is inconsistent.
void validate(const Problem& p);

enum class NoiseKind { none, additive_gaussian, minibatch };

std::string_view to_string(NoiseKind k);
NoiseKind parse_noise_kind(std::string_view s);

struct NoiseModel {
    NoiseKind kind = NoiseKind::none;
    double sigma = 0.0;
    std::size_t batch_size = 1;
    std::uint64_t seed = 0;
};

enum class MinimizerMethod { closed_form, newton };

struct Minimizer {
    ParamVector x_star;
    double f_star = 0.0;
    MinimizerMethod method = MinimizerMethod::closed_form;
    double tolerance = 0.0;
    // |grad f(x_star)|_2 actually reached
    double grad_norm = 0.0;
    std::size_t iterations = 0;
};

double loss(const Problem& p, std::span<const double> x);

ParamVector full_gradient(const Problem& p, std::span<const double> x);
void full_gradient_into(const Problem& p, std::span<const double> x, std::span<double> out);

// Draws are a deterministic function of (noise.seed, step). Minibatch indices
// are i.i.d. uniform with replacement.
ParamVector stochastic_gradient(const Problem& p, const NoiseModel& noise, std::span<const double> x,
                                std::uint64_t step);
void stochastic_gradient_into(const Problem& p, const NoiseModel& noise, std::span<const double> x,
                              std::uint64_t step, std::span<double> out);

Minimizer solve_minimizer(const Problem& p);

struct SyntheticOptions {
    // quadratic: A = M'M/m + mu*I, or eigenvalues log-spaced on [mu, mu*condition] when condition > 0
    double mu = 0.1;
    double condition = 0.0;
    // logistic: distance between the two class means
    double margin = 2.0;
    // least_squares / tiny_mlp: label noise std
    double label_noise = 0.1;
    double l2_reg = 0.0;
    std::size_t hidden = 16;
};

// d is the parameter dimension, except for tiny_mlp where it is the input
// dimension (the parameter count is tiny_mlp_dim(d, hidden)).
Problem make_synthetic(ProblemKind kind, std::size_t d, std::size_t m, std::uint64_t seed,
                       const SyntheticOptions& opts = {});

// Spectral condition number of the quadratic's regularized Hessian.
double condition_number(const Problem& p);
double min_eigenvalue(const Problem& p);

std::string problem_to_json(const Problem& p);
Problem problem_from_json(std::string_view text);
void save_problem(const Problem& p, const std::filesystem::path& path);
Problem load_problem(const std::filesystem::path& path);

}  // namespace pfopt
