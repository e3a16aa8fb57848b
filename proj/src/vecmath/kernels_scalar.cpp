#include "pfopt/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace pfopt::kernels {
namespace {

void square(const double* in, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = in[i] * in[i];
}

void sqrt_(const double* in, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::sqrt(in[i]);
}

void precond_div(const double* num, const double* s, double delta, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = num[i] / (delta + s[i]);
}

void max_(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] < b[i] ? b[i] : a[i];
}

double sum_squares(const double* v, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += v[i] * v[i];
    return acc;
}

double sum_abs(const double* v, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::fabs(v[i]);
    return acc;
}

double max_abs(const double* v, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(v[i]));
    return m;
}

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sum_sq_diff(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void accumulate_square(const double* g, double* acc, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += g[i] * g[i];
}

void ema(double beta, const double* g, double* m, std::size_t n) {
    const double one_minus = 1.0 - beta;
    for (std::size_t i = 0; i < n; ++i) m[i] = beta * m[i] + one_minus * g[i];
}

void ema_square(double beta, const double* g, double* v, std::size_t n) {
    const double one_minus = 1.0 - beta;
    for (std::size_t i = 0; i < n; ++i) v[i] = beta * v[i] + one_minus * (g[i] * g[i]);
}

void scaled_sqrt(double factor, const double* v, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::sqrt(factor * v[i]);
}

void adaptive_step(double scale, const double* num, const double* s, double delta, double* x,
                   std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (num[i] == 0.0) continue;
        x[i] -= scale * (num[i] / (delta + s[i]));
    }
}

constexpr KernelTable kScalar{
    "scalar",     square,      sqrt_,        precond_div, max_,
    sum_squares,  sum_abs,     max_abs,      dot,         sum_sq_diff,
    max_abs_diff, axpy,        accumulate_square, ema,    ema_square,
    scaled_sqrt,  adaptive_step,
};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace pfopt::kernels
