#pragma once

#include <cstddef>
#include <optional>
#include <string>

namespace caring {

/// Quality degrades past this many jointly generated frames; plans beyond it
/// carry a warning but still run.
inline constexpr std::size_t kSoftFrameCap = 196;
/// Hard limit on frames in one sampling call.
inline constexpr std::size_t kHardFrameCap = 512;
/// Hard limit on a whole plan. Steps are sampled one call each, so a plan
/// may exceed the per-call cap.
inline constexpr std::size_t kPlanFrameCap = 1024;

/// Warning text when `frames` exceeds the soft cap, empty otherwise.
std::optional<std::string> frame_budget_warning(std::size_t frames);
/// Throws ValidationError when `frames` exceeds `hard_cap`.
void require_within_hard_cap(std::size_t frames, std::size_t hard_cap = kHardFrameCap);

}  // namespace caring
