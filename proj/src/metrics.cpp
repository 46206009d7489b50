#include "caring/metrics.hpp"

#include <limits>
#include <string>

#include "caring/errors.hpp"
#include "caring/io.hpp"

namespace caring {

TransitionSpec TransitionSpec::from_first_frames(const std::vector<std::size_t>& first_frames) {
  TransitionSpec spec;
  for (auto b : first_frames) {
    if (b == 0) {
      throw ValidationError("boundaries", "a boundary cannot start at frame 0");
    }
    spec.boundaries.emplace_back(b - 1, b);
  }
  return spec;
}

void TransitionSpec::validate(std::size_t clip_length) const {
  if (boundaries.empty()) {
    throw ValidationError("boundaries", "transition distance needs at least one boundary");
  }
  for (std::size_t i = 0; i < boundaries.size(); ++i) {
    const auto [last, first] = boundaries[i];
    if (first != last + 1 || first >= clip_length) {
      throw ValidationError("boundaries[" + std::to_string(i) + "]",
                            "expected consecutive frames (i, i+1) inside a clip of " +
                                std::to_string(clip_length) + " frames");
    }
  }
}

void SpatialSpec::validate(std::size_t clip_length) const {
  if (targets.empty()) {
    throw ValidationError("targets", "spatial distance needs at least one conditioned frame");
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i].frame >= clip_length) {
      throw ValidationError("targets[" + std::to_string(i) + "].frame",
                            "frame index outside the clip");
    }
  }
}

double transition_distance(const MotionClip& clip, const TransitionSpec& spec) {
  spec.validate(clip.size());
  const auto joints = clip.joint_count();
  double sum = 0.0;
  for (const auto& [last, first] : spec.boundaries) {
    const auto& a = clip.frame(last);
    const auto& b = clip.frame(first);
    for (std::size_t j = 0; j < joints; ++j) {
      sum += (a[j] - b[j]).norm();
    }
  }
  return sum / static_cast<double>(spec.boundaries.size() * joints);
}

double spatial_distance(const MotionClip& clip, const SpatialSpec& spec) {
  spec.validate(clip.size());
  double sum = 0.0;
  for (const auto& target : spec.targets) {
    const auto root = clip.root(target.frame);
    sum += (Vec2{root.x, root.y} - target.target).norm();
  }
  return sum / static_cast<double>(spec.targets.size());
}

MetricsReport report(const MotionClip& before, const MotionClip& after,
                     const TransitionSpec& transitions, const std::optional<SpatialSpec>& spatial) {
  if (before.size() != after.size() || before.boundaries() != after.boundaries()) {
    throw ValidationError("report", "before/after clips must share length and boundary metadata");
  }
  MetricsReport r;
  r.before.transition_m = transition_distance(before, transitions);
  r.after.transition_m = transition_distance(after, transitions);
  if (r.after.transition_m == r.before.transition_m) {
    r.ratio = 1.0;
  } else if (r.after.transition_m == 0.0) {
    r.ratio = std::numeric_limits<double>::infinity();
  } else {
    r.ratio = r.before.transition_m / r.after.transition_m;
  }
  if (spatial) {
    r.before.spatial_m = spatial_distance(before, *spatial);
    r.after.spatial_m = spatial_distance(after, *spatial);
    r.plausible = *r.after.spatial_m < r.threshold_m;
  }
  return r;
}

namespace {

json variant_json(const VariantMetrics& v) {
  json j{{"transition_m", v.transition_m}};
  j["spatial_m"] = v.spatial_m ? json(*v.spatial_m) : json(nullptr);
  return j;
}

VariantMetrics variant_from_json(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("transition_m")) {
    throw ParseError(path + ": expected {transition_m, spatial_m}");
  }
  VariantMetrics v;
  v.transition_m = json_number(j["transition_m"], path + ".transition_m");
  if (j.contains("spatial_m") && !j["spatial_m"].is_null()) {
    v.spatial_m = json_number(j["spatial_m"], path + ".spatial_m");
  }
  return v;
}

}  // namespace

json to_json(const MetricsReport& r) {
  json j{{"before", variant_json(r.before)},
         {"after", variant_json(r.after)},
         {"plausibility_threshold_m", r.threshold_m}};
  // JSON has no infinity; an unbounded improvement is written as null.
  j["ratio"] = std::isfinite(r.ratio) ? json(r.ratio) : json(nullptr);
  j["plausible"] = r.plausible ? json(*r.plausible) : json(nullptr);
  return j;
}

MetricsReport report_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("report: expected an object");
  MetricsReport r;
  r.before = variant_from_json(j.value("before", json()), "before");
  r.after = variant_from_json(j.value("after", json()), "after");
  if (!j.contains("ratio")) throw ParseError("ratio: missing field");
  r.ratio = j["ratio"].is_null() ? std::numeric_limits<double>::infinity()
                                 : json_number(j["ratio"], "ratio");
  if (j.contains("plausible") && !j["plausible"].is_null()) {
    if (!j["plausible"].is_boolean()) throw ParseError("plausible: expected a boolean");
    r.plausible = j["plausible"].get<bool>();
  }
  if (j.contains("plausibility_threshold_m")) {
    r.threshold_m = json_number(j["plausibility_threshold_m"], "plausibility_threshold_m");
  }
  return r;
}

std::string serialize_report(const MetricsReport& r) { return to_json(r).dump(2) + "\n"; }

MetricsReport parse_report(std::string_view text) { return report_from_json(parse_json_text(text)); }

}  // namespace caring
