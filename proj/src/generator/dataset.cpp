#include "caring/generator/dataset.hpp"

#include <numbers>
#include <random>

#include "caring/errors.hpp"
#include "caring/humanoid.hpp"
#include "caring/io.hpp"

namespace caring::gen {

namespace {

// Segment lengths for one sequence: a single segment, or a split somewhere
// in the middle half.
std::vector<std::size_t> segment_lengths(const SyntheticOptions& o, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const bool split = o.max_segments >= 2 && o.frames >= 8 && unit(rng) < 0.5;
  if (!split) return {o.frames};
  std::uniform_int_distribution<std::size_t> cut(o.frames / 4, o.frames - o.frames / 4);
  const auto first = cut(rng);
  return {first, o.frames - first};
}

void check_options(const SyntheticOptions& o) {
  if (o.count == 0) throw ValidationError("count", "dataset needs at least one sequence");
  if (o.frames < 2) throw ValidationError("frames", "sequences need at least 2 frames");
  if (o.max_segments < 1 || o.max_segments > 2) {
    throw ValidationError("max_segments", "supported values are 1 and 2");
  }
}

}  // namespace

void Dataset::validate() const {
  if (sequences.empty()) throw ValidationError("sequences", "dataset is empty");
  const auto& first = sequences.front().clip;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    const auto& s = sequences[i];
    const auto path = "sequences[" + std::to_string(i) + "]";
    if (!(s.clip.skeleton() == first.skeleton()) || s.clip.fps() != first.fps()) {
      throw ValidationError(path, "skeleton or fps differs from the first sequence");
    }
    ConditionAssignment a{s.segments};
    a.validate();
    if (a.total_frames() != s.clip.size()) {
      throw ValidationError(path + ".segments", "segments do not cover the clip");
    }
  }
}

Dataset make_two_class_dataset(const SyntheticOptions& o) {
  check_options(o);
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, 0.004);
  const double fps = kDefaultFps;
  Dataset ds;
  ds.task = "two-class";
  for (std::size_t n = 0; n < o.count; ++n) {
    const auto lengths = segment_lengths(o, rng);
    Vec3 p{2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0, 1.0};
    std::vector<Frame> frames;
    std::vector<ConditionSegment> segments;
    std::size_t at = 0;
    for (auto len : lengths) {
      const bool right = unit(rng) < 0.5;
      const double speed = (0.6 + 0.8 * unit(rng)) / fps;
      const double vx = right ? speed : -speed;
      for (std::size_t i = 0; i < len; ++i) {
        if (!frames.empty()) {
          p.x += vx + jitter(rng);
          p.y += jitter(rng);
        }
        frames.push_back({p});
      }
      segments.push_back({right ? kMoveRight : kMoveLeft, at, at + len});
      at += len;
    }
    ds.sequences.push_back({MotionClip(point_skeleton(1), fps, std::move(frames)), std::move(segments)});
  }
  return ds;
}

Dataset make_humanoid_dataset(const SyntheticOptions& o) {
  check_options(o);
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> pick_action(0, 4);
  const double fps = kDefaultFps;
  Dataset ds;
  ds.task = "humanoid";
  for (std::size_t n = 0; n < o.count; ++n) {
    const auto lengths = segment_lengths(o, rng);
    HumanoidState state;
    state.heading = 2.0 * std::numbers::pi * unit(rng);
    state.phase = 2.0 * std::numbers::pi * unit(rng);
    state.root_xy = {4.0 * unit(rng) - 2.0, 4.0 * unit(rng) - 2.0};
    std::vector<Frame> frames;
    std::vector<ConditionSegment> segments;
    std::size_t at = 0;
    for (auto len : lengths) {
      const auto action = static_cast<HumanoidAction>(pick_action(rng));
      const auto& phrases = action_phrases(action);
      std::uniform_int_distribution<std::size_t> pick_phrase(0, phrases.size() - 1);
      auto part = synthesize_action(action, len, fps, state, rng);
      frames.insert(frames.end(), part.begin(), part.end());
      segments.push_back({phrases[pick_phrase(rng)], at, at + len});
      at += len;
    }
    ds.sequences.push_back({MotionClip(humanoid_skeleton(), fps, std::move(frames)), std::move(segments)});
  }
  return ds;
}

Dataset make_dataset(const std::string& task, const SyntheticOptions& options) {
  if (task == "two-class") return make_two_class_dataset(options);
  if (task == "humanoid") return make_humanoid_dataset(options);
  throw ValidationError("task", "unknown synthetic task '" + task + "' (two-class, humanoid)");
}

nlohmann::json to_json(const Dataset& dataset) {
  nlohmann::json seqs = nlohmann::json::array();
  for (const auto& s : dataset.sequences) {
    nlohmann::json segs = nlohmann::json::array();
    for (const auto& seg : s.segments) {
      segs.push_back({{"text", seg.text}, {"begin", seg.begin}, {"end", seg.end}});
    }
    seqs.push_back({{"motion", caring::to_json(s.clip)}, {"segments", std::move(segs)}});
  }
  return {{"task", dataset.task}, {"sequences", std::move(seqs)}};
}

Dataset dataset_from_json(const nlohmann::json& j) {
  Dataset ds;
  try {
    ds.task = j.value("task", "");
    for (const auto& s : j.at("sequences")) {
      std::vector<ConditionSegment> segs;
      for (const auto& seg : s.at("segments")) {
        segs.push_back({seg.at("text").get<std::string>(), seg.at("begin").get<std::size_t>(),
                        seg.at("end").get<std::size_t>()});
      }
      ds.sequences.push_back({motion_from_json(s.at("motion")), std::move(segs)});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed dataset: ") + e.what());
  }
  ds.validate();
  return ds;
}

}  // namespace caring::gen
