#include "pfopt/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace pfopt::kernels {

#ifdef PFOPT_HAVE_AVX2
const KernelTable* avx2_kernel_table_unchecked();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(PFOPT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Backend initial_backend() {
    if (const char* env = std::getenv("PFOPT_KERNELS")) {
        const std::string want(env);
        if (want == "scalar") return Backend::scalar;
        if (want == "avx2" && cpu_has_avx2()) return Backend::avx2;
    }
    return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() {
    static std::atomic<Backend> backend{initial_backend()};
    return backend;
}

}  // namespace

const KernelTable* avx2_table() {
#ifdef PFOPT_HAVE_AVX2
    static const bool ok = cpu_has_avx2();
    return ok ? avx2_kernel_table_unchecked() : nullptr;
#else
    return nullptr;
#endif
}

bool backend_available(Backend b) { return b == Backend::scalar || avx2_table() != nullptr; }

void select_backend(Backend b) {
    if (!backend_available(b))
        throw std::invalid_argument("kernel backend '" + std::string(backend_name(b)) + "' is not available");
    current().store(b);
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

const KernelTable& active() {
    return active_backend() == Backend::avx2 ? *avx2_table() : scalar_table();
}

std::string_view backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

}  // namespace pfopt::kernels
