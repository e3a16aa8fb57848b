#include "pfopt/averaging.hpp"

#include <cmath>
#include <stdexcept>

#include "pfopt/kernels.hpp"

namespace pfopt {

AverageTracker::AverageTracker(std::size_t dim) : dim_(dim), weighted_sum_(dim, 0.0), snapshot_(dim, 0.0) {}

void AverageTracker::observe(std::span<const double> x_t, double eta_t) {
    if (dim_ == 0 && count_ == 0) {
        dim_ = x_t.size();
        weighted_sum_.assign(dim_, 0.0);
        snapshot_.assign(dim_, 0.0);
    }
    require_same_length(dim_, x_t.size(), "AverageTracker::observe");
    if (!(eta_t > 0.0) || !std::isfinite(eta_t))
        throw std::invalid_argument("AverageTracker::observe: eta must be positive and finite");

    // candidate ratio uses the sum strictly before t
    if (count_ > 0) {
        const double ratio = sum_eta_ / eta_t;
        if (ratio > best_ratio_) {
            best_ratio_ = ratio;
            tau_ = count_;
            for (std::size_t i = 0; i < dim_; ++i) snapshot_[i] = weighted_sum_[i] / sum_eta_;
        }
    }
    sum_eta_ += eta_t;
    kernels::active().axpy(eta_t, x_t.data(), weighted_sum_.data(), dim_);
    ++count_;
}

AverageTracker::Average AverageTracker::current_average() const {
    if (!tau_) throw std::logic_error("AverageTracker: no averaged iterate yet (needs two observations)");
    return {*tau_, ParamVector(snapshot_)};
}

}  // namespace pfopt
