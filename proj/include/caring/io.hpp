#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "caring/motion.hpp"

namespace caring {

using nlohmann::json;

/// Parses JSON text. Bare NaN / Infinity / -Infinity tokens (as written by
/// Python's json module) are accepted and become non-finite numbers inside
/// the returned document's coordinate positions; everything else must be
/// strict JSON. Throws ParseError.
json parse_json_text(std::string_view text);

/// Reads a number that may have been one of the non-finite tokens above.
double json_number(const json& value, const std::string& field);

/// j[key] or ParseError naming `path.key`.
const json& require_field(const json& j, const char* key, const std::string& path);

std::string read_text_file(const std::filesystem::path& path);
/// Writes atomically (temp file + rename). Throws IoError.
void write_text_file(const std::filesystem::path& path, std::string_view text);

json to_json(const Skeleton& skeleton);
Skeleton skeleton_from_json(const json& j);

json to_json(const MotionClip& clip);
MotionClip motion_from_json(const json& j);

/// Canonical motion text: fixed key order, one frame per line, shortest
/// round-trip number formatting. Equal clips give byte-identical text.
std::string serialize_motion(const MotionClip& clip);
MotionClip parse_motion(std::string_view text);

MotionClip load_motion(const std::filesystem::path& path);
void save_motion(const MotionClip& clip, const std::filesystem::path& path);

json to_json(const Trajectory& trajectory);
Trajectory trajectory_from_json(const json& j);
Trajectory load_trajectory(const std::filesystem::path& path);

json to_json(const Pose6Dof& pose);
/// {"position": [x, y, z], "quaternion": [w, x, y, z]}; quaternion optional.
Pose6Dof pose_from_json(const json& j, const std::string& path);

json to_json(const Keypoint& keypoint);
Keypoint keypoint_from_json(const json& j);

}  // namespace caring
