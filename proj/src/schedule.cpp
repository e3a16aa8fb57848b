#include "pfopt/schedule.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pfopt {
namespace {

double cosine_phase(double floor, double progress) {
    return floor + (1.0 - floor) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

}  // namespace

std::string_view to_string(ScheduleKind k) {
    switch (k) {
        case ScheduleKind::constant: return "constant";
        case ScheduleKind::cosine: return "cosine";
        case ScheduleKind::cosine_warmup: return "cosine_warmup";
    }
    return "?";
}

ScheduleKind parse_schedule_kind(std::string_view s) {
    for (auto k : {ScheduleKind::constant, ScheduleKind::cosine, ScheduleKind::cosine_warmup})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown schedule kind '" + std::string(s) + "'");
}

void validate(const Schedule& s) {
    if (s.total_steps == 0) throw std::invalid_argument("schedule: total_steps must be positive");
    if (s.warmup_steps >= s.total_steps) throw std::invalid_argument("schedule: warmup_steps must be < total_steps");
    if (!(s.floor >= 0.0 && s.floor <= 1.0)) throw std::invalid_argument("schedule: floor must lie in [0, 1]");
}

double multiplier(const Schedule& s, std::uint64_t t) {
    validate(s);
    if (t >= s.total_steps)
        throw std::out_of_range("schedule: step " + std::to_string(t) + " outside [0, " +
                                std::to_string(s.total_steps) + ")");
    const auto T = static_cast<double>(s.total_steps);
    switch (s.kind) {
        case ScheduleKind::constant:
            return 1.0;
        case ScheduleKind::cosine:
            if (s.total_steps == 1) return 1.0;
            return cosine_phase(s.floor, static_cast<double>(t) / (T - 1.0));
        case ScheduleKind::cosine_warmup: {
            const auto W = static_cast<double>(s.warmup_steps);
            if (t < s.warmup_steps) return (static_cast<double>(t) + 1.0) / W;
            const double span = T - 1.0 - W;
            if (span <= 0.0) return 1.0;
            return cosine_phase(s.floor, (static_cast<double>(t) - W) / span);
        }
    }
    return 1.0;
}

}  // namespace pfopt
