#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace pfopt {

/// Dense vector of doubles with a fixed length.
///
/// Construction rejects NaN/Inf. Library operations keep entries finite given
/// finite inputs; mutable access through data()/span() is for optimizer
/// kernels that maintain that themselves.
class ParamVector {
public:
    ParamVector() = default;
    explicit ParamVector(std::size_t n, double fill = 0.0);
    explicit ParamVector(std::vector<double> values);
    ParamVector(std::initializer_list<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }

    const double* data() const noexcept { return values_.data(); }
    double* data() noexcept { return values_.data(); }

    std::span<const double> span() const noexcept { return values_; }
    std::span<double> span() noexcept { return values_; }

    auto begin() const noexcept { return values_.begin(); }
    auto end() const noexcept { return values_.end(); }

    const std::vector<double>& values() const noexcept { return values_; }

    friend bool operator==(const ParamVector&, const ParamVector&) = default;

private:
    std::vector<double> values_;
};

// Throws std::invalid_argument naming `what` when the lengths differ.
void require_same_length(std::size_t a, std::size_t b, const char* what);

ParamVector elementwise_square(const ParamVector& v);
// Throws std::domain_error naming the first negative index.
ParamVector elementwise_sqrt(const ParamVector& v);
// num[i] / (delta + s[i]). Throws std::domain_error when a denominator is zero.
ParamVector preconditioned_div(const ParamVector& num, const ParamVector& s, double delta);
ParamVector running_max(const ParamVector& a, const ParamVector& b);

double l2_norm(std::span<const double> v);
double squared_l2_norm(std::span<const double> v);
double l1_norm(std::span<const double> v);
double linf_norm(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);
double l2_distance(std::span<const double> a, std::span<const double> b);
double linf_distance(std::span<const double> a, std::span<const double> b);

// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

bool all_finite(std::span<const double> v);

}  // namespace pfopt
