#include "pfopt/vecmath.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pfopt/kernels.hpp"

namespace pfopt {
namespace {

void require_finite(const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i]))
            throw std::invalid_argument("ParamVector: non-finite entry at index " + std::to_string(i));
    }
}

}  // namespace

ParamVector::ParamVector(std::size_t n, double fill) : values_(n, fill) { require_finite(values_); }

ParamVector::ParamVector(std::vector<double> values) : values_(std::move(values)) { require_finite(values_); }

ParamVector::ParamVector(std::initializer_list<double> values) : values_(values) { require_finite(values_); }

void require_same_length(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw std::invalid_argument(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                                    std::to_string(b) + ")");
    }
}

ParamVector elementwise_square(const ParamVector& v) {
    ParamVector out(v.size());
    kernels::active().square(v.data(), out.data(), v.size());
    return out;
}

ParamVector elementwise_sqrt(const ParamVector& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] < 0.0)
            throw std::domain_error("elementwise_sqrt: negative entry at index " + std::to_string(i));
    }
    ParamVector out(v.size());
    kernels::active().sqrt(v.data(), out.data(), v.size());
    return out;
}

ParamVector preconditioned_div(const ParamVector& num, const ParamVector& s, double delta) {
    require_same_length(num.size(), s.size(), "preconditioned_div");
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (delta + s[i] == 0.0)
            throw std::domain_error("preconditioned_div: zero denominator at index " + std::to_string(i));
    }
    ParamVector out(num.size());
    kernels::active().precond_div(num.data(), s.data(), delta, out.data(), num.size());
    return out;
}

ParamVector running_max(const ParamVector& a, const ParamVector& b) {
    require_same_length(a.size(), b.size(), "running_max");
    ParamVector out(a.size());
    kernels::active().max(a.data(), b.data(), out.data(), a.size());
    return out;
}

double squared_l2_norm(std::span<const double> v) { return kernels::active().sum_squares(v.data(), v.size()); }

double l2_norm(std::span<const double> v) { return std::sqrt(squared_l2_norm(v)); }

double l1_norm(std::span<const double> v) { return kernels::active().sum_abs(v.data(), v.size()); }

double linf_norm(std::span<const double> v) { return kernels::active().max_abs(v.data(), v.size()); }

double dot(std::span<const double> a, std::span<const double> b) {
    require_same_length(a.size(), b.size(), "dot");
    return kernels::active().dot(a.data(), b.data(), a.size());
}

double l2_distance(std::span<const double> a, std::span<const double> b) {
    require_same_length(a.size(), b.size(), "l2_distance");
    return std::sqrt(kernels::active().sum_sq_diff(a.data(), b.data(), a.size()));
}

double linf_distance(std::span<const double> a, std::span<const double> b) {
    require_same_length(a.size(), b.size(), "linf_distance");
    return kernels::active().max_abs_diff(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    require_same_length(x.size(), y.size(), "axpy");
    kernels::active().axpy(alpha, x.data(), y.data(), x.size());
}

bool all_finite(std::span<const double> v) {
    for (double e : v)
        if (!std::isfinite(e)) return false;
    return true;
}

}  // namespace pfopt
