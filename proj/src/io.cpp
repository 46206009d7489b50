#include "caring/io.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include "caring/errors.hpp"

namespace caring {

namespace {

constexpr std::string_view kNanMarker = "__caring_nan__";
constexpr std::string_view kPosInfMarker = "__caring_inf__";
constexpr std::string_view kNegInfMarker = "__caring_-inf__";

// Rewrites bare non-finite tokens outside strings into marker strings.
std::string quote_nonfinite_tokens(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_string = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      out.push_back(c);
      if (c == '\\' && i + 1 < text.size()) {
        out.push_back(text[++i]);
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
      out.push_back(c);
      continue;
    }
    auto match = [&](std::string_view token) { return text.substr(i, token.size()) == token; };
    if (match("NaN")) {
      out += '"';
      out += kNanMarker;
      out += '"';
      i += 2;
    } else if (match("-Infinity")) {
      out += '"';
      out += kNegInfMarker;
      out += '"';
      i += 8;
    } else if (match("Infinity")) {
      out += '"';
      out += kPosInfMarker;
      out += '"';
      i += 7;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string number_text(double v) { return json(v).dump(); }

}  // namespace

const json& require_field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) {
    throw ParseError(path + ": expected an object");
  }
  auto it = j.find(key);
  if (it == j.end()) {
    throw ParseError(path + (path.empty() ? "" : ".") + key + ": missing field");
  }
  return *it;
}

namespace {

std::size_t json_index(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ParseError(path + ": expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

}  // namespace

json parse_json_text(std::string_view text) {
  try {
    return json::parse(quote_nonfinite_tokens(text));
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

double json_number(const json& value, const std::string& field_path) {
  if (value.is_number()) {
    return value.get<double>();
  }
  if (value.is_string()) {
    const auto& s = value.get_ref<const std::string&>();
    if (s == kNanMarker) return std::numeric_limits<double>::quiet_NaN();
    if (s == kPosInfMarker) return std::numeric_limits<double>::infinity();
    if (s == kNegInfMarker) return -std::numeric_limits<double>::infinity();
  }
  if (value.is_null()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  throw ParseError(field_path + ": expected a number");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string() + " for reading");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open " + path.string() + " for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
      throw IoError("write failed for " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot replace " + path.string());
  }
}

json to_json(const Skeleton& skeleton) {
  return json{{"joint_names", skeleton.joint_names},
              {"root_index", skeleton.root_index},
              {"height_m", skeleton.height_m}};
}

Skeleton skeleton_from_json(const json& j) {
  Skeleton s;
  const auto& names = require_field(j, "joint_names", "skeleton");
  if (!names.is_array()) {
    throw ParseError("skeleton.joint_names: expected an array of strings");
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!names[i].is_string()) {
      throw ParseError("skeleton.joint_names[" + std::to_string(i) + "]: expected a string");
    }
    s.joint_names.push_back(names[i].get<std::string>());
  }
  if (j.contains("root_index")) {
    s.root_index = json_index(j["root_index"], "skeleton.root_index");
  }
  if (j.contains("height_m")) {
    s.height_m = json_number(j["height_m"], "skeleton.height_m");
  }
  s.validate();
  return s;
}

json to_json(const MotionClip& clip) {
  json frames = json::array();
  for (const auto& f : clip.frames()) {
    json jf = json::array();
    for (const auto& p : f) {
      jf.push_back({p.x, p.y, p.z});
    }
    frames.push_back(std::move(jf));
  }
  json j{{"fps", clip.fps()},
         {"skeleton", to_json(clip.skeleton())},
         {"label", clip.label()},
         {"frames", std::move(frames)}};
  if (!clip.boundaries().empty()) {
    j["boundaries"] = clip.boundaries();
  }
  return j;
}

MotionClip motion_from_json(const json& j) {
  const double fps = json_number(require_field(j, "fps", ""), "fps");
  Skeleton skeleton = skeleton_from_json(require_field(j, "skeleton", ""));
  std::string label;
  if (j.contains("label")) {
    if (!j["label"].is_string()) throw ParseError("label: expected a string");
    label = j["label"].get<std::string>();
  }
  std::vector<std::size_t> boundaries;
  if (j.contains("boundaries") && !j["boundaries"].is_null()) {
    const auto& jb = j["boundaries"];
    if (!jb.is_array()) throw ParseError("boundaries: expected an array");
    for (std::size_t i = 0; i < jb.size(); ++i) {
      boundaries.push_back(json_index(jb[i], "boundaries[" + std::to_string(i) + "]"));
    }
  }
  const auto& jframes = require_field(j, "frames", "");
  if (!jframes.is_array()) throw ParseError("frames: expected an array");
  std::vector<Frame> frames;
  frames.reserve(jframes.size());
  for (std::size_t f = 0; f < jframes.size(); ++f) {
    const auto path = "frames[" + std::to_string(f) + "]";
    if (!jframes[f].is_array()) throw ParseError(path + ": expected an array of joints");
    Frame frame;
    frame.reserve(jframes[f].size());
    for (std::size_t k = 0; k < jframes[f].size(); ++k) {
      const auto& p = jframes[f][k];
      const auto jpath = path + "[" + std::to_string(k) + "]";
      if (!p.is_array() || p.size() != 3) throw ParseError(jpath + ": expected [x, y, z]");
      frame.push_back({json_number(p[0], jpath), json_number(p[1], jpath), json_number(p[2], jpath)});
    }
    frames.push_back(std::move(frame));
  }
  return MotionClip(std::move(skeleton), fps, std::move(frames), std::move(label),
                    std::move(boundaries));
}

std::string serialize_motion(const MotionClip& clip) {
  std::string out = "{\n";
  out += "  \"fps\": " + number_text(clip.fps()) + ",\n";
  out += "  \"skeleton\": " + to_json(clip.skeleton()).dump() + ",\n";
  out += "  \"label\": " + json(clip.label()).dump() + ",\n";
  if (!clip.boundaries().empty()) {
    out += "  \"boundaries\": " + json(clip.boundaries()).dump() + ",\n";
  }
  out += "  \"frames\": [\n";
  for (std::size_t f = 0; f < clip.size(); ++f) {
    out += "    [";
    const auto& frame = clip.frame(f);
    for (std::size_t k = 0; k < frame.size(); ++k) {
      if (k > 0) out += ",";
      out += "[" + number_text(frame[k].x) + "," + number_text(frame[k].y) + "," +
             number_text(frame[k].z) + "]";
    }
    out += f + 1 < clip.size() ? "],\n" : "]\n";
  }
  out += "  ]\n}\n";
  return out;
}

MotionClip parse_motion(std::string_view text) { return motion_from_json(parse_json_text(text)); }

MotionClip load_motion(const std::filesystem::path& path) { return parse_motion(read_text_file(path)); }

void save_motion(const MotionClip& clip, const std::filesystem::path& path) {
  write_text_file(path, serialize_motion(clip));
}

json to_json(const Trajectory& trajectory) {
  json samples = json::array();
  for (const auto& s : trajectory.samples) {
    samples.push_back({{"t_s", s.t_s}, {"x_m", s.x_m}, {"y_m", s.y_m}});
  }
  return json{{"frame_of_reference", trajectory.frame_of_reference}, {"samples", std::move(samples)}};
}

Trajectory trajectory_from_json(const json& j) {
  Trajectory t;
  const json* samples = &j;
  if (j.is_object()) {
    if (j.contains("frame_of_reference")) {
      t.frame_of_reference = j["frame_of_reference"].get<std::string>();
    }
    samples = &require_field(j, "samples", "");
  }
  if (!samples->is_array()) throw ParseError("samples: expected an array");
  for (std::size_t i = 0; i < samples->size(); ++i) {
    const auto& s = (*samples)[i];
    const auto path = "samples[" + std::to_string(i) + "]";
    t.samples.push_back({json_number(require_field(s, "t_s", path), path + ".t_s"),
                         json_number(require_field(s, "x_m", path), path + ".x_m"),
                         json_number(require_field(s, "y_m", path), path + ".y_m")});
  }
  t.validate();
  return t;
}

Trajectory load_trajectory(const std::filesystem::path& path) {
  return trajectory_from_json(parse_json_text(read_text_file(path)));
}

json to_json(const Keypoint& keypoint) {
  json j{{"object_id", keypoint.object_id}, {"x_m", keypoint.x_m}, {"y_m", keypoint.y_m}};
  if (keypoint.pose_6dof) {
    j["pose_6dof"] = to_json(*keypoint.pose_6dof);
  }
  return j;
}

json to_json(const Pose6Dof& pose) {
  return {{"position", {pose.position.x, pose.position.y, pose.position.z}},
          {"quaternion", pose.quaternion}};
}

Pose6Dof pose_from_json(const json& j, const std::string& path) {
  Pose6Dof pose;
  const auto& pos = require_field(j, "position", path);
  if (!pos.is_array() || pos.size() != 3) throw ParseError(path + ".position: expected [x, y, z]");
  pose.position = {json_number(pos[0], path), json_number(pos[1], path), json_number(pos[2], path)};
  if (j.contains("quaternion")) {
    const auto& q = j["quaternion"];
    if (!q.is_array() || q.size() != 4) {
      throw ParseError(path + ".quaternion: expected [w, x, y, z]");
    }
    for (std::size_t i = 0; i < 4; ++i) pose.quaternion[i] = json_number(q[i], path);
  }
  return pose;
}

Keypoint keypoint_from_json(const json& j) {
  Keypoint k;
  const auto& id = require_field(j, "object_id", "keypoint");
  if (!id.is_string()) throw ParseError("keypoint.object_id: expected a string");
  k.object_id = id.get<std::string>();
  if (j.contains("pose_6dof") && !j["pose_6dof"].is_null()) {
    k.pose_6dof = pose_from_json(j["pose_6dof"], "keypoint.pose_6dof");
  }
  if (j.contains("x_m") || !k.pose_6dof) {
    k.x_m = json_number(require_field(j, "x_m", "keypoint"), "keypoint.x_m");
    k.y_m = json_number(require_field(j, "y_m", "keypoint"), "keypoint.y_m");
  } else {
    k.x_m = k.pose_6dof->position.x;
    k.y_m = k.pose_6dof->position.y;
  }
  k.validate();
  return k;
}

}  // namespace caring
