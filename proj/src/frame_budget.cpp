#include "caring/frame_budget.hpp"

#include "caring/errors.hpp"

namespace caring {

std::optional<std::string> frame_budget_warning(std::size_t frames) {
  if (frames <= kSoftFrameCap) return std::nullopt;
  return "frame number " + std::to_string(frames) + " exceeds " + std::to_string(kSoftFrameCap) +
         "; motion quality may degrade past the training length";
}

void require_within_hard_cap(std::size_t frames, std::size_t hard_cap) {
  if (frames > hard_cap) {
    throw ValidationError("frames", std::to_string(frames) + " frames exceeds the hard cap of " +
                                        std::to_string(hard_cap));
  }
}

}  // namespace caring
