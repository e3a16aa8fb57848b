#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "pfopt/vecmath.hpp"

namespace pfopt {

/// Streaming eta-weighted iterate average at
///     tau = argmax_t  sum_{i<t} eta_i / eta_t
/// in O(d) memory. Ties keep the earliest t.
class AverageTracker {
public:
    AverageTracker() = default;
    explicit AverageTracker(std::size_t dim);

    // Call once per step, in order, with x_t and the eta_t used at that step.
    // Throws std::invalid_argument when eta_t <= 0 or the length is wrong.
    void observe(std::span<const double> x_t, double eta_t);

    struct Average {
        std::uint64_t tau;
        ParamVector x_bar;
    };

    // Throws std::logic_error before any candidate ratio has been recorded.
    Average current_average() const;

    bool has_average() const noexcept { return tau_.has_value(); }
    std::uint64_t observations() const noexcept { return count_; }
    double best_ratio() const noexcept { return best_ratio_; }
    double eta_sum() const noexcept { return sum_eta_; }

private:
    std::size_t dim_ = 0;
    std::uint64_t count_ = 0;
    double sum_eta_ = 0.0;
    std::vector<double> weighted_sum_;
    double best_ratio_ = 0.0;
    std::optional<std::uint64_t> tau_;
    std::vector<double> snapshot_;
};

}  // namespace pfopt
