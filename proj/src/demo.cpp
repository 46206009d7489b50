#include "caring/demo.hpp"

#include <cctype>
#include <cmath>

#include "caring/guidance.hpp"

namespace caring {

namespace {

bool mentions(const std::string& text, const std::string& id) {
  auto lower = [](std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  return lower(text).find(lower(id)) != std::string::npos;
}

}  // namespace

ScanLog demo_scan_log(const Scenario& scenario, double step_length_m) {
  const double total = step_length_m * static_cast<double>(scenario.steps.size());
  // Dense polyline of x = s, y = 0.3 sin(s / 2); its arc length is close to s.
  Trajectory dense;
  constexpr double kDs = 0.05;
  const auto n = static_cast<std::size_t>(std::ceil(total / kDs));
  double s_acc = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = total * static_cast<double>(i) / static_cast<double>(n);
    const double y = 0.3 * std::sin(x / 2.0);
    if (i > 0) s_acc += std::hypot(x - dense.samples.back().x_m, y - dense.samples.back().y_m);
    dense.samples.push_back({s_acc / kDemoWalkSpeed, x, y});
  }
  ScanLog log;
  const double length = dense.arc_length();
  const auto samples = static_cast<std::size_t>(std::ceil(length / 0.25));
  for (std::size_t i = 0; i <= samples; ++i) {
    const double s = length * static_cast<double>(i) / static_cast<double>(samples);
    const auto p = point_at_arc_length(dense, s);
    log.trajectory_samples.push_back({s / kDemoWalkSpeed, p.x, p.y});
  }
  SnapshotEvent snap;
  snap.t_s = log.trajectory_samples.back().t_s;
  const double k = static_cast<double>(scenario.steps.size());
  for (const auto& id : scenario.objects) {
    for (std::size_t i = 0; i < scenario.steps.size(); ++i) {
      if (!mentions(scenario.steps[i], id)) continue;
      const auto p = point_at_arc_length(dense, length * static_cast<double>(i + 1) / k);
      Detection d;
      d.object_id = id;
      d.pose.position = {p.x, p.y + 0.2, 0.8};
      d.confidence = 0.9;
      snap.detections.push_back(d);
      break;
    }
  }
  log.snapshot_events.push_back(std::move(snap));
  return log;
}

Project demo_project(const Scenario& scenario, const std::string& project_id) {
  auto p = make_project(project_id);
  MockInstructionClient client;
  set_task(p, scenario.task, client);
  std::vector<std::string> ids;
  for (const auto& s : p.steps) ids.push_back(s.id);
  const auto gid = create_group(p, ids).id;
  ingest_scan(p, gid, demo_scan_log(scenario));
  return p;
}

}  // namespace caring
