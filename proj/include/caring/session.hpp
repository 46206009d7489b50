#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "caring/frame_budget.hpp"
#include "caring/instructions.hpp"
#include "caring/motion.hpp"

namespace caring {

inline constexpr std::size_t kDefaultFramesPerStep = 90;

enum class StepStatus { draft, contextualized };
enum class StepScale { full_body, hands_only };

const char* to_string(StepStatus s);
const char* to_string(StepScale s);
StepStatus step_status_from_string(std::string_view s);
StepScale step_scale_from_string(std::string_view s);

struct InstructionStep {
  std::string id;
  std::string text;
  StepStatus status = StepStatus::draft;
  StepScale scale = StepScale::full_body;
  /// Author override for the keypoint match; must name a snapshot object.
  std::optional<std::string> target_object_id;

  friend bool operator==(const InstructionStep&, const InstructionStep&) = default;
};

struct Detection {
  std::string object_id;
  Pose6Dof pose;
  double confidence = 1.0;
  friend bool operator==(const Detection&, const Detection&) = default;
};

struct SnapshotEvent {
  double t_s = 0.0;
  std::vector<Detection> detections;
  friend bool operator==(const SnapshotEvent&, const SnapshotEvent&) = default;
};

/// Walk recording plus object detections captured while scanning a place.
struct ScanLog {
  std::vector<TrajectorySample> trajectory_samples;
  std::vector<SnapshotEvent> snapshot_events;

  /// Non-decreasing timestamps per stream, finite values, confidences in
  /// [0, 1], unit quaternions. Throws ValidationError.
  void validate() const;
  /// Samples with repeated timestamps collapse to the last one. Requires at
  /// least two distinct timestamps.
  Trajectory trajectory() const;

  friend bool operator==(const ScanLog&, const ScanLog&) = default;
};

inline constexpr int kScanLogVersion = 1;

/// Line-delimited records, one JSON object per line:
///   {"v":1,"type":"sample","t_s":..,"x_m":..,"y_m":..}
///   {"v":1,"type":"snapshot","t_s":..,"detections":[{"object_id":..,
///     "pose_6dof":{"position":[x,y,z],"quaternion":[w,x,y,z]},"confidence":..}]}
/// Blank lines are skipped. Throws ParseError naming the line.
ScanLog parse_scan_log(std::string_view text);
std::string serialize_scan_log(const ScanLog& log);

struct ContextGroup {
  std::string id;
  /// Member steps in script order.
  std::vector<std::string> step_ids;
  std::optional<Trajectory> trajectory;
  /// Objects seen at the end of the scan.
  std::vector<Keypoint> snapshot;
  std::vector<std::string> warnings;

  bool scanned() const { return trajectory.has_value(); }
  friend bool operator==(const ContextGroup&, const ContextGroup&) = default;
};

struct PlanStep {
  std::string step_id;
  std::string condition_text;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::optional<Keypoint> target;
  /// Present for every grouped step.
  std::optional<Trajectory> trajectory;
  StepScale scale = StepScale::full_body;

  std::size_t frames() const { return end - begin; }
  friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

struct GenerationPlan {
  std::vector<PlanStep> steps;
  double fps = kDefaultFps;
  Skeleton skeleton;
  std::vector<std::string> warnings;

  std::size_t total_frames() const { return steps.empty() ? 0 : steps.back().end; }
  /// Ranges contiguous from 0, non-empty texts, valid targets and paths.
  void validate() const;
  friend bool operator==(const GenerationPlan&, const GenerationPlan&) = default;
};

struct Project {
  std::string id;
  std::string task;
  std::vector<InstructionStep> steps;
  std::vector<ContextGroup> groups;
  /// Last accepted scan per group id.
  std::map<std::string, ScanLog> scan_logs;
  std::optional<GenerationPlan> plan_cache;
  std::size_t frames_per_step = kDefaultFramesPerStep;
  std::uint64_t next_step = 1;
  std::uint64_t next_group = 1;

  const InstructionStep& step(std::string_view id) const;
  const ContextGroup& group(std::string_view id) const;
  /// Group holding the step, if any.
  const ContextGroup* group_of(std::string_view step_id) const;
  /// Ids of steps that are still drafts, in script order.
  std::vector<std::string> draft_step_ids() const;

  /// Unique ids, valid group membership, non-empty texts. Throws ValidationError.
  void validate() const;
  friend bool operator==(const Project&, const Project&) = default;
};

Project make_project(std::string id);

/// Asks the client for steps. Throws ValidationError on empty task text,
/// IoError when the client fails and ParseError on unusable responses.
std::vector<InstructionStep> refine_instructions(const std::string& task_text,
                                                 InstructionClient& client,
                                                 std::uint64_t first_id = 1);

/// Replaces the script (and drops groups and scans) with refined steps.
void set_task(Project& project, const std::string& task_text, InstructionClient& client);

struct StepEdit {
  std::optional<std::string> text{};
  std::optional<StepScale> scale{};
  std::optional<StepStatus> status{};
  /// Outer empty: unchanged. Inner empty: clear the override.
  std::optional<std::optional<std::string>> target_object_id{};
};

/// A text change reverts a contextualized step to draft unless the same edit
/// sets the status explicitly.
const InstructionStep& edit_step(Project& project, std::string_view step_id, const StepEdit& edit);

enum class InsertPosition { before, after };

/// Inserts a new draft step next to `anchor_id`, or appends when no anchor
/// is given. Returns the new step.
const InstructionStep& insert_step(Project& project, const std::string& text,
                                   const std::optional<std::string>& anchor_id = std::nullopt,
                                   InsertPosition where = InsertPosition::after,
                                   StepScale scale = StepScale::full_body);

struct DeleteReport {
  /// Group the step was detached from.
  std::optional<std::string> detached_from;
  /// True when the group became empty and was removed.
  bool group_removed = false;
};

DeleteReport delete_step(Project& project, std::string_view step_id);

/// Groups steps that happen at one place. Steps must exist, be distinct and
/// not belong to another group.
const ContextGroup& create_group(Project& project, const std::vector<std::string>& step_ids);

/// Attaches a scan to a group: trajectory from the samples, snapshot from the
/// last snapshot event. Member steps become contextualized. Returns warnings
/// (a log without snapshots is stored trajectory-only).
std::vector<std::string> ingest_scan(Project& project, std::string_view group_id,
                                     const ScanLog& log);

struct CompileOptions {
  double fps = kDefaultFps;
  Skeleton skeleton = humanoid_skeleton();
  std::size_t hard_cap = kPlanFrameCap;
};

/**
 * Builds the executable plan. Every step gets `frames_per_step` consecutive
 * frames and its own text as condition. Grouped steps split their group's
 * path into equal arc-length slices and pick up the snapshot object whose id
 * occurs in the step text (case-insensitive; longest id wins).
 *
 * Throws ConflictError listing draft step ids, ValidationError when the
 * project is empty or over the hard cap.
 */
GenerationPlan compile_plan(const Project& project, const CompileOptions& options = {});

nlohmann::json to_json(const InstructionStep& s);
nlohmann::json to_json(const ScanLog& log);
ScanLog scan_log_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ContextGroup& g);
nlohmann::json to_json(const PlanStep& s);
nlohmann::json to_json(const GenerationPlan& plan);
GenerationPlan plan_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Project& p);
Project project_from_json(const nlohmann::json& j);

void save_project(const Project& project, const std::filesystem::path& path);
Project load_project(const std::filesystem::path& path);
GenerationPlan load_plan(const std::filesystem::path& path);

}  // namespace caring
