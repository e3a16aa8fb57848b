#pragma once

// Raw elementwise and reduction kernels behind ParamVector arithmetic.
//
// Every kernel exists in a scalar reference table and, on x86-64 builds, an
// AVX2 table. The active table is picked once at startup from the CPU
// features and can be forced with PFOPT_KERNELS=scalar|avx2 or
// select_backend(). Elementwise kernels round identically in both tables
// (no FMA contraction); reductions use four partial sums in the AVX2 table
// and agree with the scalar table to ~1e-15 relative.

#include <cstddef>
#include <string_view>

namespace pfopt::kernels {

struct KernelTable {
    const char* name;

    // out[i] = in[i]^2
    void (*square)(const double* in, double* out, std::size_t n);
    // out[i] = sqrt(in[i]); caller guarantees in[i] >= 0
    void (*sqrt)(const double* in, double* out, std::size_t n);
    // out[i] = num[i] / (delta + s[i])
    void (*precond_div)(const double* num, const double* s, double delta, double* out, std::size_t n);
    // out[i] = max(a[i], b[i])
    void (*max)(const double* a, const double* b, double* out, std::size_t n);

    double (*sum_squares)(const double* v, std::size_t n);
    double (*sum_abs)(const double* v, std::size_t n);
    double (*max_abs)(const double* v, std::size_t n);
    double (*dot)(const double* a, const double* b, std::size_t n);
    // sum_i (a[i] - b[i])^2
    double (*sum_sq_diff)(const double* a, const double* b, std::size_t n);
    // max_i |a[i] - b[i]|
    double (*max_abs_diff)(const double* a, const double* b, std::size_t n);

    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // acc[i] += g[i]^2
    void (*accumulate_square)(const double* g, double* acc, std::size_t n);
    // m[i] = beta * m[i] + (1 - beta) * g[i]
    void (*ema)(double beta, const double* g, double* m, std::size_t n);
    // v[i] = beta * v[i] + (1 - beta) * g[i]^2
    void (*ema_square)(double beta, const double* g, double* v, std::size_t n);
    // out[i] = sqrt(factor * v[i])
    void (*scaled_sqrt)(double factor, const double* v, double* out, std::size_t n);
    // x[i] -= scale * (num[i] / (delta + s[i])); coordinates with num[i] == 0 are left alone
    void (*adaptive_step)(double scale, const double* num, const double* s, double delta, double* x,
                          std::size_t n);
};

enum class Backend { scalar, avx2 };

const KernelTable& scalar_table();
// nullptr when the build or the CPU lacks AVX2.
const KernelTable* avx2_table();

bool backend_available(Backend b);
// Throws std::invalid_argument when the backend is unavailable.
void select_backend(Backend b);
Backend active_backend();
const KernelTable& active();

std::string_view backend_name(Backend b);

}  // namespace pfopt::kernels
