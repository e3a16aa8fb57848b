#pragma once

#include <cstdint>
#include <string_view>

namespace pfopt {

enum class ScheduleKind { constant, cosine, cosine_warmup };

std::string_view to_string(ScheduleKind k);
ScheduleKind parse_schedule_kind(std::string_view s);

/// Step-size multiplier applied on top of an optimizer's own rate.
struct Schedule {
    ScheduleKind kind = ScheduleKind::constant;
    std::uint64_t total_steps = 1;
    std::uint64_t warmup_steps = 0;
    // final multiplier of the cosine phase
    double floor = 0.0;
};

// Throws std::invalid_argument for T = 0, W >= T, or floor outside [0, 1].
void validate(const Schedule& s);

// constant: 1
// cosine: floor + (1 - floor) * (1 + cos(pi * t / (T - 1))) / 2
// cosine_warmup: (t + 1) / W while t < W, then the cosine over [W, T - 1]
// Throws std::out_of_range unless 0 <= t < T.
double multiplier(const Schedule& s, std::uint64_t t);

}  // namespace pfopt
