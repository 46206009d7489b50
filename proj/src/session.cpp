#include "caring/session.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "caring/errors.hpp"
#include "caring/frame_budget.hpp"
#include "caring/guidance.hpp"
#include "caring/io.hpp"

namespace caring {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string idx(std::string_view name, std::size_t i) {
  return std::string(name) + "[" + std::to_string(i) + "]";
}

void require_text(const std::string& text, const std::string& field) {
  if (blank(text)) throw ValidationError(field, "step text must not be empty");
}

std::vector<InstructionStep>::iterator find_step(Project& p, std::string_view id) {
  auto it = std::find_if(p.steps.begin(), p.steps.end(),
                         [&](const InstructionStep& s) { return s.id == id; });
  if (it == p.steps.end()) throw NotFoundError("unknown step '" + std::string(id) + "'");
  return it;
}

std::vector<ContextGroup>::iterator find_group(Project& p, std::string_view id) {
  auto it = std::find_if(p.groups.begin(), p.groups.end(),
                         [&](const ContextGroup& g) { return g.id == id; });
  if (it == p.groups.end()) throw NotFoundError("unknown group '" + std::string(id) + "'");
  return it;
}

std::size_t script_index(const Project& p, std::string_view id) {
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    if (p.steps[i].id == id) return i;
  }
  throw NotFoundError("unknown step '" + std::string(id) + "'");
}

Keypoint keypoint_of(const Detection& d) {
  Keypoint k;
  k.object_id = d.object_id;
  k.x_m = d.pose.position.x;
  k.y_m = d.pose.position.y;
  k.pose_6dof = d.pose;
  return k;
}

// Snapshot object named by the step: explicit override first, otherwise the
// longest object id occurring in the text.
std::optional<Keypoint> match_target(const InstructionStep& step, const ContextGroup& group) {
  if (step.target_object_id) {
    for (const auto& k : group.snapshot) {
      if (k.object_id == *step.target_object_id) return k;
    }
    throw ValidationError("steps." + step.id + ".target_object_id",
                          "object '" + *step.target_object_id + "' is not in group " + group.id +
                              "'s snapshot");
  }
  const auto text = lower(step.text);
  const Keypoint* best = nullptr;
  for (const auto& k : group.snapshot) {
    if (k.object_id.empty()) continue;
    if (text.find(lower(k.object_id)) == std::string::npos) continue;
    if (best == nullptr || k.object_id.size() > best->object_id.size()) best = &k;
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

}  // namespace

const char* to_string(StepStatus s) {
  return s == StepStatus::draft ? "draft" : "contextualized";
}

const char* to_string(StepScale s) {
  return s == StepScale::full_body ? "full_body" : "hands_only";
}

StepStatus step_status_from_string(std::string_view s) {
  if (s == "draft") return StepStatus::draft;
  if (s == "contextualized") return StepStatus::contextualized;
  throw ValidationError("status", "expected draft or contextualized, got '" + std::string(s) + "'");
}

StepScale step_scale_from_string(std::string_view s) {
  if (s == "full_body") return StepScale::full_body;
  if (s == "hands_only") return StepScale::hands_only;
  throw ValidationError("scale", "expected full_body or hands_only, got '" + std::string(s) + "'");
}

// ---- scan logs ----

void ScanLog::validate() const {
  for (std::size_t i = 0; i < trajectory_samples.size(); ++i) {
    const auto& s = trajectory_samples[i];
    const auto f = idx("trajectory_samples", i);
    if (!std::isfinite(s.t_s) || !std::isfinite(s.x_m) || !std::isfinite(s.y_m)) {
      throw ValidationError(f, "non-finite value");
    }
    if (i > 0 && s.t_s < trajectory_samples[i - 1].t_s) {
      throw ValidationError(f + ".t_s", "timestamps must not decrease");
    }
  }
  for (std::size_t i = 0; i < snapshot_events.size(); ++i) {
    const auto& e = snapshot_events[i];
    const auto f = idx("snapshot_events", i);
    if (!std::isfinite(e.t_s)) throw ValidationError(f + ".t_s", "non-finite timestamp");
    if (i > 0 && e.t_s < snapshot_events[i - 1].t_s) {
      throw ValidationError(f + ".t_s", "timestamps must not decrease");
    }
    for (std::size_t k = 0; k < e.detections.size(); ++k) {
      const auto& d = e.detections[k];
      const auto df = f + "." + idx("detections", k);
      if (d.object_id.empty()) throw ValidationError(df + ".object_id", "must not be empty");
      if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) {
        throw ValidationError(df + ".confidence", "must lie in [0, 1]");
      }
      try {
        keypoint_of(d).validate();
      } catch (const ValidationError& err) {
        throw ValidationError(df + "." + err.field, err.what());
      }
    }
  }
}

Trajectory ScanLog::trajectory() const {
  validate();
  Trajectory t;
  for (const auto& s : trajectory_samples) {
    if (!t.samples.empty() && t.samples.back().t_s == s.t_s) {
      t.samples.back() = s;
    } else {
      t.samples.push_back(s);
    }
  }
  if (t.samples.size() < 2) {
    throw ValidationError("trajectory_samples",
                          "trajectory required: need at least two samples with distinct timestamps");
  }
  t.validate();
  return t;
}

nlohmann::json to_json(const ScanLog& log) {
  json samples = json::array();
  for (const auto& s : log.trajectory_samples) {
    samples.push_back({{"t_s", s.t_s}, {"x_m", s.x_m}, {"y_m", s.y_m}});
  }
  json events = json::array();
  for (const auto& e : log.snapshot_events) {
    json dets = json::array();
    for (const auto& d : e.detections) {
      dets.push_back(
          {{"object_id", d.object_id}, {"pose_6dof", to_json(d.pose)}, {"confidence", d.confidence}});
    }
    events.push_back({{"t_s", e.t_s}, {"detections", std::move(dets)}});
  }
  return {{"trajectory_samples", std::move(samples)}, {"snapshot_events", std::move(events)}};
}

namespace {

TrajectorySample sample_from_json(const json& j, const std::string& path) {
  return {json_number(require_field(j, "t_s", path), path + ".t_s"),
          json_number(require_field(j, "x_m", path), path + ".x_m"),
          json_number(require_field(j, "y_m", path), path + ".y_m")};
}

SnapshotEvent event_from_json(const json& j, const std::string& path) {
  SnapshotEvent e;
  e.t_s = json_number(require_field(j, "t_s", path), path + ".t_s");
  const auto& dets = require_field(j, "detections", path);
  if (!dets.is_array()) throw ParseError(path + ".detections: expected an array");
  for (std::size_t k = 0; k < dets.size(); ++k) {
    const auto dp = path + "." + idx("detections", k);
    Detection d;
    const auto& id = require_field(dets[k], "object_id", dp);
    if (!id.is_string()) throw ParseError(dp + ".object_id: expected a string");
    d.object_id = id.get<std::string>();
    d.pose = pose_from_json(require_field(dets[k], "pose_6dof", dp), dp + ".pose_6dof");
    if (dets[k].contains("confidence")) {
      d.confidence = json_number(dets[k]["confidence"], dp + ".confidence");
    }
    e.detections.push_back(std::move(d));
  }
  return e;
}

}  // namespace

ScanLog scan_log_from_json(const nlohmann::json& j) {
  ScanLog log;
  const auto& samples = require_field(j, "trajectory_samples", "scan_log");
  const auto& events = require_field(j, "snapshot_events", "scan_log");
  if (!samples.is_array() || !events.is_array()) throw ParseError("scan_log: expected arrays");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    log.trajectory_samples.push_back(sample_from_json(samples[i], idx("trajectory_samples", i)));
  }
  for (std::size_t i = 0; i < events.size(); ++i) {
    log.snapshot_events.push_back(event_from_json(events[i], idx("snapshot_events", i)));
  }
  return log;
}

ScanLog parse_scan_log(std::string_view text) {
  ScanLog log;
  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (blank(line)) continue;
    const auto path = "line " + std::to_string(line_no);
    json rec;
    try {
      rec = parse_json_text(line);
    } catch (const ParseError& e) {
      throw ParseError(path + ": " + e.what());
    }
    const auto& v = require_field(rec, "v", path);
    if (!v.is_number_integer() || v.get<int>() != kScanLogVersion) {
      throw ParseError(path + ".v: unsupported scan-log version " + v.dump());
    }
    const auto& type = require_field(rec, "type", path);
    if (type == "sample") {
      log.trajectory_samples.push_back(sample_from_json(rec, path));
    } else if (type == "snapshot") {
      log.snapshot_events.push_back(event_from_json(rec, path));
    } else {
      throw ParseError(path + ".type: expected sample or snapshot, got " + type.dump());
    }
  }
  return log;
}

std::string serialize_scan_log(const ScanLog& log) {
  std::string out;
  for (const auto& s : log.trajectory_samples) {
    json rec = {{"v", kScanLogVersion}, {"type", "sample"}, {"t_s", s.t_s}, {"x_m", s.x_m},
                {"y_m", s.y_m}};
    out += rec.dump() + "\n";
  }
  const auto events = to_json(log)["snapshot_events"];
  for (const auto& e : events) {
    json rec = {{"v", kScanLogVersion}, {"type", "snapshot"}, {"t_s", e["t_s"]},
                {"detections", e["detections"]}};
    out += rec.dump() + "\n";
  }
  return out;
}

// ---- plan ----

void GenerationPlan::validate() const {
  if (!(fps > 0.0) || !std::isfinite(fps)) throw ValidationError("fps", "must be positive");
  skeleton.validate();
  std::size_t expected = 0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    const auto f = idx("steps", i);
    if (blank(s.condition_text)) throw ValidationError(f + ".condition_text", "must not be empty");
    if (s.begin != expected || s.end <= s.begin) {
      throw ValidationError(f, "frame ranges must be non-empty and contiguous from 0");
    }
    expected = s.end;
    if (s.target) s.target->validate();
    if (s.trajectory) s.trajectory->validate();
  }
}

// ---- project ----

Project make_project(std::string id) {
  Project p;
  p.id = std::move(id);
  return p;
}

const InstructionStep& Project::step(std::string_view id) const {
  for (const auto& s : steps) {
    if (s.id == id) return s;
  }
  throw NotFoundError("unknown step '" + std::string(id) + "'");
}

const ContextGroup& Project::group(std::string_view id) const {
  for (const auto& g : groups) {
    if (g.id == id) return g;
  }
  throw NotFoundError("unknown group '" + std::string(id) + "'");
}

const ContextGroup* Project::group_of(std::string_view step_id) const {
  for (const auto& g : groups) {
    if (std::find(g.step_ids.begin(), g.step_ids.end(), step_id) != g.step_ids.end()) return &g;
  }
  return nullptr;
}

std::vector<std::string> Project::draft_step_ids() const {
  std::vector<std::string> ids;
  for (const auto& s : steps) {
    if (s.status == StepStatus::draft) ids.push_back(s.id);
  }
  return ids;
}

void Project::validate() const {
  if (frames_per_step == 0) throw ValidationError("frames_per_step", "must be positive");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto f = idx("steps", i);
    if (steps[i].id.empty()) throw ValidationError(f + ".id", "must not be empty");
    if (!ids.insert(steps[i].id).second) throw ValidationError(f + ".id", "duplicate step id");
    require_text(steps[i].text, f + ".text");
  }
  std::set<std::string> grouped;
  std::set<std::string> group_ids;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& g = groups[i];
    const auto f = idx("groups", i);
    if (!group_ids.insert(g.id).second) throw ValidationError(f + ".id", "duplicate group id");
    if (g.step_ids.empty()) throw ValidationError(f + ".step_ids", "must not be empty");
    for (const auto& sid : g.step_ids) {
      if (!ids.contains(sid)) throw ValidationError(f + ".step_ids", "unknown step '" + sid + "'");
      if (!grouped.insert(sid).second) {
        throw ValidationError(f + ".step_ids", "step '" + sid + "' is in more than one group");
      }
    }
    if (g.trajectory) g.trajectory->validate();
  }
  for (const auto& [gid, log] : scan_logs) {
    if (!group_ids.contains(gid)) {
      throw ValidationError("scan_logs." + gid, "scan log for an unknown group");
    }
  }
}

std::vector<InstructionStep> refine_instructions(const std::string& task_text,
                                                 InstructionClient& client,
                                                 std::uint64_t first_id) {
  if (blank(task_text)) throw ValidationError("text", "task text must not be empty");
  const auto texts = parse_step_list(client.complete(task_text));
  std::vector<InstructionStep> steps;
  for (const auto& t : texts) {
    InstructionStep s;
    s.id = "s" + std::to_string(first_id++);
    s.text = t;
    steps.push_back(std::move(s));
  }
  return steps;
}

void set_task(Project& project, const std::string& task_text, InstructionClient& client) {
  auto steps = refine_instructions(task_text, client, project.next_step);
  project.next_step += steps.size();
  project.task = task_text;
  project.steps = std::move(steps);
  project.groups.clear();
  project.scan_logs.clear();
  project.plan_cache.reset();
}

const InstructionStep& edit_step(Project& project, std::string_view step_id, const StepEdit& edit) {
  auto it = find_step(project, step_id);
  InstructionStep next = *it;
  if (edit.text) {
    require_text(*edit.text, "text");
    if (*edit.text != next.text) {
      next.text = *edit.text;
      next.status = StepStatus::draft;
    }
  }
  if (edit.scale) next.scale = *edit.scale;
  if (edit.status) next.status = *edit.status;
  if (edit.target_object_id) next.target_object_id = *edit.target_object_id;
  *it = std::move(next);
  project.plan_cache.reset();
  return *it;
}

const InstructionStep& insert_step(Project& project, const std::string& text,
                                   const std::optional<std::string>& anchor_id,
                                   InsertPosition where, StepScale scale) {
  require_text(text, "text");
  auto pos = project.steps.end();
  if (anchor_id) {
    pos = find_step(project, *anchor_id);
    if (where == InsertPosition::after) ++pos;
  }
  InstructionStep s;
  s.id = "s" + std::to_string(project.next_step++);
  s.text = text;
  s.scale = scale;
  auto inserted = project.steps.insert(pos, std::move(s));
  project.plan_cache.reset();
  return *inserted;
}

DeleteReport delete_step(Project& project, std::string_view step_id) {
  auto it = find_step(project, step_id);
  DeleteReport report;
  for (auto g = project.groups.begin(); g != project.groups.end(); ++g) {
    auto m = std::find(g->step_ids.begin(), g->step_ids.end(), step_id);
    if (m == g->step_ids.end()) continue;
    report.detached_from = g->id;
    g->step_ids.erase(m);
    if (g->step_ids.empty()) {
      project.scan_logs.erase(g->id);
      project.groups.erase(g);
      report.group_removed = true;
    }
    break;
  }
  project.steps.erase(it);
  project.plan_cache.reset();
  return report;
}

const ContextGroup& create_group(Project& project, const std::vector<std::string>& step_ids) {
  if (step_ids.empty()) throw ValidationError("step_ids", "a group needs at least one step");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < step_ids.size(); ++i) {
    const auto& sid = step_ids[i];
    const auto f = idx("step_ids", i);
    if (!seen.insert(sid).second) throw ValidationError(f, "duplicate step '" + sid + "'");
    script_index(project, sid);
    if (const auto* g = project.group_of(sid)) {
      throw ValidationError(f, "step '" + sid + "' already belongs to group " + g->id);
    }
  }
  ContextGroup g;
  g.id = "g" + std::to_string(project.next_group++);
  g.step_ids = step_ids;
  std::sort(g.step_ids.begin(), g.step_ids.end(), [&](const std::string& a, const std::string& b) {
    return script_index(project, a) < script_index(project, b);
  });
  project.groups.push_back(std::move(g));
  project.plan_cache.reset();
  return project.groups.back();
}

std::vector<std::string> ingest_scan(Project& project, std::string_view group_id,
                                     const ScanLog& log) {
  auto g = find_group(project, group_id);
  auto trajectory = log.trajectory();
  std::vector<std::string> warnings;
  std::vector<Keypoint> snapshot;
  if (log.snapshot_events.empty()) {
    warnings.push_back("scan log has no snapshot event; group " + g->id +
                       " stored with trajectory only");
  } else {
    for (const auto& d : log.snapshot_events.back().detections) snapshot.push_back(keypoint_of(d));
  }
  g->trajectory = std::move(trajectory);
  g->snapshot = std::move(snapshot);
  g->warnings = warnings;
  for (auto& s : project.steps) {
    if (std::find(g->step_ids.begin(), g->step_ids.end(), s.id) != g->step_ids.end()) {
      s.status = StepStatus::contextualized;
    }
  }
  project.scan_logs[g->id] = log;
  project.plan_cache.reset();
  return warnings;
}

GenerationPlan compile_plan(const Project& project, const CompileOptions& options) {
  project.validate();
  if (project.steps.empty()) throw ValidationError("steps", "project has no steps");
  if (auto drafts = project.draft_step_ids(); !drafts.empty()) {
    std::string msg = "steps not contextualized:";
    for (const auto& id : drafts) msg += " " + id;
    throw ConflictError(msg, std::move(drafts));
  }
  const std::size_t total = project.steps.size() * project.frames_per_step;
  require_within_hard_cap(total, options.hard_cap);

  GenerationPlan plan;
  plan.fps = options.fps;
  plan.skeleton = options.skeleton;
  if (auto w = frame_budget_warning(total)) plan.warnings.push_back(*w);

  std::size_t begin = 0;
  for (const auto& step : project.steps) {
    PlanStep ps;
    ps.step_id = step.id;
    ps.condition_text = step.text;
    ps.begin = begin;
    ps.end = begin + project.frames_per_step;
    ps.scale = step.scale;
    begin = ps.end;
    if (const auto* g = project.group_of(step.id)) {
      if (!g->trajectory) {
        throw ValidationError("groups." + g->id + ".trajectory",
                              "group has no scan; upload one before generating");
      }
      const auto pos = static_cast<std::size_t>(
          std::find(g->step_ids.begin(), g->step_ids.end(), step.id) - g->step_ids.begin());
      const double len = g->trajectory->arc_length();
      const double k = static_cast<double>(g->step_ids.size());
      ps.trajectory = trajectory_between(*g->trajectory, len * static_cast<double>(pos) / k,
                                         len * static_cast<double>(pos + 1) / k);
      ps.target = match_target(step, *g);
    } else if (step.target_object_id) {
      throw ValidationError("steps." + step.id + ".target_object_id",
                            "only grouped steps can target snapshot objects");
    }
    plan.steps.push_back(std::move(ps));
  }
  for (const auto& g : project.groups) {
    for (const auto& w : g.warnings) plan.warnings.push_back(w);
  }
  plan.validate();
  return plan;
}

// ---- JSON ----

nlohmann::json to_json(const InstructionStep& s) {
  json j{{"id", s.id}, {"text", s.text}, {"status", to_string(s.status)},
         {"scale", to_string(s.scale)}};
  j["target_object_id"] = s.target_object_id ? json(*s.target_object_id) : json(nullptr);
  return j;
}

nlohmann::json to_json(const ContextGroup& g) {
  json snap = json::array();
  for (const auto& k : g.snapshot) snap.push_back(to_json(k));
  return {{"id", g.id},
          {"step_ids", g.step_ids},
          {"trajectory", g.trajectory ? to_json(*g.trajectory) : json(nullptr)},
          {"snapshot", std::move(snap)},
          {"warnings", g.warnings}};
}

nlohmann::json to_json(const PlanStep& s) {
  return {{"step_id", s.step_id},
          {"condition_text", s.condition_text},
          {"begin", s.begin},
          {"end", s.end},
          {"scale", to_string(s.scale)},
          {"target", s.target ? to_json(*s.target) : json(nullptr)},
          {"trajectory", s.trajectory ? to_json(*s.trajectory) : json(nullptr)}};
}

nlohmann::json to_json(const GenerationPlan& plan) {
  json steps = json::array();
  for (const auto& s : plan.steps) steps.push_back(to_json(s));
  return {{"fps", plan.fps},
          {"skeleton", to_json(plan.skeleton)},
          {"total_frames", plan.total_frames()},
          {"warnings", plan.warnings},
          {"steps", std::move(steps)}};
}

namespace {

std::string string_field(const json& j, const char* key, const std::string& path) {
  const auto& v = require_field(j, key, path);
  if (!v.is_string()) throw ParseError(path + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::size_t size_field(const json& j, const char* key, const std::string& path) {
  const auto& v = require_field(j, key, path);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ParseError(path + "." + key + ": expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::vector<std::string> string_list(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path + ": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw ParseError(path + ": expected an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

bool present(const json& j, const char* key) { return j.contains(key) && !j[key].is_null(); }

InstructionStep step_from_json(const json& j, const std::string& path) {
  InstructionStep s;
  s.id = string_field(j, "id", path);
  s.text = string_field(j, "text", path);
  s.status = step_status_from_string(string_field(j, "status", path));
  s.scale = step_scale_from_string(string_field(j, "scale", path));
  if (present(j, "target_object_id")) s.target_object_id = string_field(j, "target_object_id", path);
  return s;
}

ContextGroup group_from_json(const json& j, const std::string& path) {
  ContextGroup g;
  g.id = string_field(j, "id", path);
  g.step_ids = string_list(require_field(j, "step_ids", path), path + ".step_ids");
  if (present(j, "trajectory")) g.trajectory = trajectory_from_json(j["trajectory"]);
  if (j.contains("snapshot")) {
    for (const auto& k : j["snapshot"]) g.snapshot.push_back(keypoint_from_json(k));
  }
  if (j.contains("warnings")) g.warnings = string_list(j["warnings"], path + ".warnings");
  return g;
}

}  // namespace

GenerationPlan plan_from_json(const nlohmann::json& j) {
  GenerationPlan plan;
  plan.fps = json_number(require_field(j, "fps", "plan"), "plan.fps");
  plan.skeleton = skeleton_from_json(require_field(j, "skeleton", "plan"));
  if (j.contains("warnings")) plan.warnings = string_list(j["warnings"], "plan.warnings");
  const auto& steps = require_field(j, "steps", "plan");
  if (!steps.is_array()) throw ParseError("plan.steps: expected an array");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    const auto path = "plan." + idx("steps", i);
    PlanStep ps;
    ps.step_id = s.contains("step_id") ? string_field(s, "step_id", path) : "s" + std::to_string(i + 1);
    ps.condition_text = string_field(s, "condition_text", path);
    ps.begin = size_field(s, "begin", path);
    ps.end = size_field(s, "end", path);
    if (s.contains("scale")) ps.scale = step_scale_from_string(string_field(s, "scale", path));
    if (present(s, "target")) ps.target = keypoint_from_json(s["target"]);
    if (present(s, "trajectory")) ps.trajectory = trajectory_from_json(s["trajectory"]);
    plan.steps.push_back(std::move(ps));
  }
  plan.validate();
  return plan;
}

nlohmann::json to_json(const Project& p) {
  json steps = json::array();
  for (const auto& s : p.steps) steps.push_back(to_json(s));
  json groups = json::array();
  for (const auto& g : p.groups) groups.push_back(to_json(g));
  json logs = json::object();
  for (const auto& [gid, log] : p.scan_logs) logs[gid] = to_json(log);
  return {{"id", p.id},
          {"task", p.task},
          {"frames_per_step", p.frames_per_step},
          {"next_step", p.next_step},
          {"next_group", p.next_group},
          {"steps", std::move(steps)},
          {"groups", std::move(groups)},
          {"scan_logs", std::move(logs)},
          {"plan", p.plan_cache ? to_json(*p.plan_cache) : json(nullptr)}};
}

Project project_from_json(const nlohmann::json& j) {
  Project p;
  p.id = string_field(j, "id", "project");
  if (j.contains("task")) p.task = string_field(j, "task", "project");
  if (j.contains("frames_per_step")) p.frames_per_step = size_field(j, "frames_per_step", "project");
  if (j.contains("next_step")) p.next_step = size_field(j, "next_step", "project");
  if (j.contains("next_group")) p.next_group = size_field(j, "next_group", "project");
  const auto& steps = require_field(j, "steps", "project");
  if (!steps.is_array()) throw ParseError("project.steps: expected an array");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    p.steps.push_back(step_from_json(steps[i], "project." + idx("steps", i)));
  }
  if (j.contains("groups")) {
    for (std::size_t i = 0; i < j["groups"].size(); ++i) {
      p.groups.push_back(group_from_json(j["groups"][i], "project." + idx("groups", i)));
    }
  }
  if (j.contains("scan_logs")) {
    for (const auto& [gid, log] : j["scan_logs"].items()) p.scan_logs[gid] = scan_log_from_json(log);
  }
  if (present(j, "plan")) p.plan_cache = plan_from_json(j["plan"]);
  p.validate();
  return p;
}

void save_project(const Project& project, const std::filesystem::path& path) {
  write_text_file(path, to_json(project).dump(2) + "\n");
}

Project load_project(const std::filesystem::path& path) {
  return project_from_json(parse_json_text(read_text_file(path)));
}

GenerationPlan load_plan(const std::filesystem::path& path) {
  return plan_from_json(parse_json_text(read_text_file(path)));
}

}  // namespace caring
