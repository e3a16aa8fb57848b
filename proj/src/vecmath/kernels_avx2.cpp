#include "pfopt/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace pfopt::kernels {
namespace {

constexpr std::size_t kLanes = 4;

inline __m256d abs_pd(__m256d v) {
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

// Lane order is fixed so the result is reproducible run to run.
inline double hsum(__m256d v) {
    alignas(32) double lanes[kLanes];
    _mm256_store_pd(lanes, v);
    return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

inline double hmax(__m256d v) {
    alignas(32) double lanes[kLanes];
    _mm256_store_pd(lanes, v);
    return std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
}

void square(const double* in, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d v = _mm256_loadu_pd(in + i);
        _mm256_storeu_pd(out + i, _mm256_mul_pd(v, v));
    }
    for (; i < n; ++i) out[i] = in[i] * in[i];
}

void sqrt_(const double* in, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) _mm256_storeu_pd(out + i, _mm256_sqrt_pd(_mm256_loadu_pd(in + i)));
    for (; i < n; ++i) out[i] = std::sqrt(in[i]);
}

void precond_div(const double* num, const double* s, double delta, double* out, std::size_t n) {
    const __m256d vd = _mm256_set1_pd(delta);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d den = _mm256_add_pd(vd, _mm256_loadu_pd(s + i));
        _mm256_storeu_pd(out + i, _mm256_div_pd(_mm256_loadu_pd(num + i), den));
    }
    for (; i < n; ++i) out[i] = num[i] / (delta + s[i]);
}

void max_(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        // max_pd(x, y) = x > y ? x : y, matching the scalar a < b ? b : a
        _mm256_storeu_pd(out + i, _mm256_max_pd(_mm256_loadu_pd(b + i), _mm256_loadu_pd(a + i)));
    }
    for (; i < n; ++i) out[i] = a[i] < b[i] ? b[i] : a[i];
}

double sum_squares(const double* v, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d x = _mm256_loadu_pd(v + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(x, x));
    }
    double total = hsum(acc);
    for (; i < n; ++i) total += v[i] * v[i];
    return total;
}

double sum_abs(const double* v, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) acc = _mm256_add_pd(acc, abs_pd(_mm256_loadu_pd(v + i)));
    double total = hsum(acc);
    for (; i < n; ++i) total += std::fabs(v[i]);
    return total;
}

double max_abs(const double* v, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) acc = _mm256_max_pd(acc, abs_pd(_mm256_loadu_pd(v + i)));
    double m = hmax(acc);
    for (; i < n; ++i) m = std::max(m, std::fabs(v[i]));
    return m;
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes)
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    double total = hsum(acc);
    for (; i < n; ++i) total += a[i] * b[i];
    return total;
}

double sum_sq_diff(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    double total = hsum(acc);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        total += d * d;
    }
    return total;
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes)
        acc = _mm256_max_pd(acc, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i))));
    double m = hmax(acc);
    for (; i < n; ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void accumulate_square(const double* g, double* acc, std::size_t n) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d v = _mm256_loadu_pd(g + i);
        _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_mul_pd(v, v)));
    }
    for (; i < n; ++i) acc[i] += g[i] * g[i];
}

void ema(double beta, const double* g, double* m, std::size_t n) {
    const double one_minus = 1.0 - beta;
    const __m256d vb = _mm256_set1_pd(beta);
    const __m256d vo = _mm256_set1_pd(one_minus);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d keep = _mm256_mul_pd(vb, _mm256_loadu_pd(m + i));
        const __m256d fresh = _mm256_mul_pd(vo, _mm256_loadu_pd(g + i));
        _mm256_storeu_pd(m + i, _mm256_add_pd(keep, fresh));
    }
    for (; i < n; ++i) m[i] = beta * m[i] + one_minus * g[i];
}

void ema_square(double beta, const double* g, double* v, std::size_t n) {
    const double one_minus = 1.0 - beta;
    const __m256d vb = _mm256_set1_pd(beta);
    const __m256d vo = _mm256_set1_pd(one_minus);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d gi = _mm256_loadu_pd(g + i);
        const __m256d keep = _mm256_mul_pd(vb, _mm256_loadu_pd(v + i));
        const __m256d fresh = _mm256_mul_pd(vo, _mm256_mul_pd(gi, gi));
        _mm256_storeu_pd(v + i, _mm256_add_pd(keep, fresh));
    }
    for (; i < n; ++i) v[i] = beta * v[i] + one_minus * (g[i] * g[i]);
}

void scaled_sqrt(double factor, const double* v, double* out, std::size_t n) {
    const __m256d vf = _mm256_set1_pd(factor);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes)
        _mm256_storeu_pd(out + i, _mm256_sqrt_pd(_mm256_mul_pd(vf, _mm256_loadu_pd(v + i))));
    for (; i < n; ++i) out[i] = std::sqrt(factor * v[i]);
}

void adaptive_step(double scale, const double* num, const double* s, double delta, double* x,
                   std::size_t n) {
    const __m256d vscale = _mm256_set1_pd(scale);
    const __m256d vd = _mm256_set1_pd(delta);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d g = _mm256_loadu_pd(num + i);
        const __m256d q = _mm256_div_pd(g, _mm256_add_pd(vd, _mm256_loadu_pd(s + i)));
        const __m256d live = _mm256_cmp_pd(g, zero, _CMP_NEQ_OQ);
        const __m256d delta_x = _mm256_and_pd(live, _mm256_mul_pd(vscale, q));
        _mm256_storeu_pd(x + i, _mm256_sub_pd(_mm256_loadu_pd(x + i), delta_x));
    }
    for (; i < n; ++i) {
        if (num[i] == 0.0) continue;
        x[i] -= scale * (num[i] / (delta + s[i]));
    }
}

constexpr KernelTable kAvx2{
    "avx2",       square,      sqrt_,        precond_div, max_,
    sum_squares,  sum_abs,     max_abs,      dot,         sum_sq_diff,
    max_abs_diff, axpy,        accumulate_square, ema,    ema_square,
    scaled_sqrt,  adaptive_step,
};

}  // namespace

const KernelTable* avx2_kernel_table_unchecked() { return &kAvx2; }

}  // namespace pfopt::kernels
