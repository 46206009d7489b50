// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "caring/demo.hpp"
#include "caring/errors.hpp"
#include "caring/generator/sample.hpp"
#include "caring/generator/train.hpp"
#include "caring/guidance.hpp"
#include "caring/io.hpp"
#include "caring/metrics.hpp"
#include "caring/session.hpp"
#include "caring/smoothing.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"
#include "service_util.hpp"
#include "suite.hpp"
#include "test_util.hpp"

using namespace caring;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned tolerances and thresholds.
constexpr double kSmoothingMedianRatio = 3.0;
constexpr double kSmoothingSeconds = 5.0;
constexpr double kBlendFixtureTol = 1e-5;
constexpr double kUpsampleTol = 1e-12;
constexpr int kLengthTrials = 1000;
constexpr int kOracleInstances = 200;
constexpr double kOracleTol = 1e-12;
constexpr double kPinnedSpatialTol = 1e-9;
constexpr double kGradientTol = 1e-4;
constexpr int kFollowSeeds = 100;
constexpr int kPerFrameMinCorrect = 90;
constexpr int kPrefixMaxSecondCorrect = 60;
constexpr double kDiffusionSeconds = 600.0;
constexpr std::size_t kScenarioFrames = 360;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failed checks; the first failure message is kept.
struct Checks {
  bool ok = true;
  std::string first_failure;
  void expect(bool cond, const std::string& what) {
    if (!cond && ok) first_failure = what;
    ok = ok && cond;
  }
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Outcome smoothing_efficacy() {
  const auto t0 = Clock::now();
  std::size_t l = 0;
  const auto suite = testkit::load_smoothing_suite(&l);
  std::vector<double> ratios;
  int improved = 0;
  double min_jump = 1e9;
  double max_jump = 0.0;
  for (const auto& p : suite) {
    const std::vector<MotionClip> clips{p.first, p.second};
    const auto naive = concat(clips);
    const auto smooth = stitch(clips, BlendConfig{l});
    const auto spec = TransitionSpec::from_first_frames(naive.boundaries());
    const double before = transition_distance(naive, spec);
    const double after = transition_distance(smooth, spec);
    improved += after < before;
    ratios.push_back(before / after);
    min_jump = std::min(min_jump, p.jump_m);
    max_jump = std::max(max_jump, p.jump_m);
  }
  const double secs = seconds_since(t0);
  const double med = median(ratios);
  Checks c;
  c.expect(suite.size() == 50, "suite has " + std::to_string(suite.size()) + " pairs");
  c.expect(min_jump >= 0.1 && max_jump <= 1.0, "injected jumps outside 0.1-1.0 m");
  c.expect(improved == static_cast<int>(suite.size()), "stitch did not improve every pair");
  c.expect(med >= kSmoothingMedianRatio, "median ratio below " + fmt(kSmoothingMedianRatio));
  c.expect(secs < kSmoothingSeconds, "runtime over " + fmt(kSmoothingSeconds) + " s");
  return {c.ok, c.first_failure + (c.ok ? "" : "; ") + std::to_string(improved) + "/" +
                    std::to_string(suite.size()) + " improved, median ratio " + fmt(med) + "x, " +
                    fmt(secs, 3) + " s"};
}

Outcome blend_analytics() {
  Checks c;
  for (std::size_t l = 2; l <= 64; l += 2) c.expect(blend_weight(l / 2, l) == 0.5, "weight at L/2 for L=" + std::to_string(l));

  const TransitionSegment tail({Frame{{0, 0, 0}}, Frame{{0, 0, 0}}});
  const TransitionSegment head({Frame{{1, 1, 1}}, Frame{{1, 1, 1}}});
  const auto k = blend_transition(tail, head, BlendConfig{2});
  c.expect(k.size() == 2 && std::abs(k[0][0].x - 0.26894) < kBlendFixtureTol && std::abs(k[1][0].x - 0.5) < kBlendFixtureTol,
           "L=2 fixture");

  const auto up = upsample_linear(std::vector<Frame>{Frame{{0, 0, 0}}, Frame{{1, 1, 1}}});
  const double want[] = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  c.expect(up.size() == 4, "upsample length");
  for (std::size_t i = 0; i < std::min<std::size_t>(up.size(), 4); ++i) {
    c.expect(std::abs(up[i][0].x - want[i]) < kUpsampleTol, "upsample value " + std::to_string(i));
  }

  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> count(1, 6);
  std::uniform_int_distribution<int> extra(0, 30);
  std::uniform_int_distribution<int> joints(1, 6);
  int preserved = 0;
  for (int trial = 0; trial < kLengthTrials; ++trial) {
    const std::size_t l = 2 + static_cast<std::size_t>(trial % 20);
    std::vector<MotionClip> clips;
    std::size_t total = 0;
    const auto j = static_cast<std::size_t>(joints(rng));
    for (int n = count(rng); n > 0; --n) {
      clips.push_back(testkit::random_clip(rng, 2 * l + static_cast<std::size_t>(extra(rng)), j));
      total += clips.back().size();
    }
    preserved += stitch(clips, BlendConfig{l}).size() == total;
  }
  c.expect(preserved == kLengthTrials, "stitch changed length");
  return {c.ok, c.ok ? "alpha(L/2)=0.5 for even L<=64; K=[" + fmt(k[0][0].x, 6) + ", " + fmt(k[1][0].x, 6) +
                           "]; upsample exact; length kept " + std::to_string(preserved) + "/" +
                           std::to_string(kLengthTrials)
                     : c.first_failure};
}

Outcome metric_oracles() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> joints(1, 8);
  std::uniform_int_distribution<int> boundaries(1, 6);
  std::uniform_int_distribution<std::size_t> frames(8, 60);
  double worst_t = 0.0;
  double worst_s = 0.0;
  for (int i = 0; i < kOracleInstances; ++i) {
    const auto n = frames(rng);
    const auto c = testkit::random_clip(rng, n, static_cast<std::size_t>(joints(rng)), 3.0);
    std::uniform_int_distribution<std::size_t> pick(1, n - 1);
    std::vector<std::size_t> firsts;
    for (int k = boundaries(rng); k > 0; --k) firsts.push_back(pick(rng));
    std::sort(firsts.begin(), firsts.end());
    firsts.erase(std::unique(firsts.begin(), firsts.end()), firsts.end());
    worst_t = std::max(worst_t, std::abs(transition_distance(c, TransitionSpec::from_first_frames(firsts)) -
                                         testkit::brute_transition(c, firsts)));
    SpatialSpec s;
    std::uniform_int_distribution<std::size_t> any(0, n - 1);
    std::uniform_real_distribution<double> xy(-3.0, 3.0);
    for (int k = boundaries(rng); k > 0; --k) s.targets.push_back({any(rng), {xy(rng), xy(rng)}});
    worst_s = std::max(worst_s, std::abs(spatial_distance(c, s) - testkit::brute_spatial(c, s)));
  }
  const bool ok = worst_t <= kOracleTol && worst_s <= kOracleTol;
  return {ok, std::to_string(kOracleInstances) + " instances, max |diff| transition " + fmt(worst_t, 3) + ", spatial " +
                  fmt(worst_s, 3)};
}

Outcome spatial_plausibility() {
  std::size_t l = 0;
  const auto suite = testkit::load_smoothing_suite(&l);
  double worst = 0.0;
  for (const auto& p : suite) {
    const auto clip = stitch(std::vector<MotionClip>{p.first, p.second}, BlendConfig{l});
    const auto start = clip.root(0);
    const auto end = clip.root(clip.size() - 1);
    const Vec2 goal = Vec2{end.x, end.y} + p.target_offset;
    Trajectory path;
    path.samples = {{0.0, start.x, start.y},
                    {1.0, 0.5 * (start.x + goal.x) + 0.3, 0.5 * (start.y + goal.y) - 0.3},
                    {2.0, goal.x, goal.y}};
    SpatialSpec spec;
    spec.targets.push_back({clip.size() - 1, goal});
    for (auto schedule : {StrengthSchedule::ramp, StrengthSchedule::constant}) {
      const auto guided = apply_root_guidance(clip, resample_trajectory(path, clip.size(), schedule));
      worst = std::max(worst, spatial_distance(guided, spec));
    }
  }
  const bool ok = worst <= kPinnedSpatialTol && worst < kPlausibilityThresholdM;
  return {ok, std::to_string(suite.size()) + " instances x 2 schedules, max spatial_distance " + fmt(worst, 3) + " m"};
}

int correct_direction(const MotionClip& clip, std::size_t begin, std::size_t end, bool right) {
  return (gen::mean_root_velocity_x(clip, begin, end) > 0.0) == right ? 1 : 0;
}

Outcome toy_diffusion() {
  Checks c;
  std::string detail;

  // (a)
  double worst_grad = 0.0;
  for (auto mode : {gen::ConditioningMode::per_frame, gen::ConditioningMode::prefix}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      worst_grad = std::max(worst_grad, testkit::gradient_relative_error(testkit::make_grad_fixture(mode, seed)));
    }
  }
  c.expect(worst_grad < kGradientTol, "(a) gradient error " + fmt(worst_grad, 3));
  detail += "(a) grad rel err " + fmt(worst_grad, 2);

  const auto t0 = Clock::now();
  gen::SyntheticOptions data;
  data.count = 500;
  data.seed = 7;
  data.frames = 40;
  gen::TrainConfig cfg;
  cfg.steps = 1500;
  cfg.batch = 16;
  cfg.hidden = 48;
  const auto per_frame = gen::train(gen::make_two_class_dataset(data), cfg).denoiser;
  // Single-prompt baseline: sees one label per clip.
  auto single = data;
  single.max_segments = 1;
  auto prefix_cfg = cfg;
  prefix_cfg.mode = gen::ConditioningMode::prefix;
  const auto prefix = gen::train(gen::make_two_class_dataset(single), prefix_cfg).denoiser;
  const auto& sched = per_frame.schedule();

  // (b)
  {
    const auto a = gen::ConditionAssignment::consecutive({gen::kMoveRight, gen::kMoveLeft}, {20, 20});
    gen::SampleOptions o;
    o.seed = 31;
    const bool same = sample(a, per_frame, sched, o).frames() == sample(a, per_frame, sched, o).frames() &&
                      sample_prefix_mode(a, prefix, sched, o).frames() == sample_prefix_mode(a, prefix, sched, o).frames();
    auto small = cfg;
    small.steps = 50;
    const auto ds = gen::make_two_class_dataset(data);
    const bool retrain = gen::train(ds, small).denoiser == gen::train(ds, small).denoiser;
    c.expect(same && retrain, "(b) resample or retrain differs");
    detail += "; (b) bit-identical " + std::string(same && retrain ? "yes" : "no");
  }

  // (c)
  {
    const auto a = gen::ConditionAssignment::consecutive({gen::kMoveRight, "pick up the box", gen::kMoveLeft}, {13, 7, 20});
    const Eigen::MatrixXd want = a.condition_map(per_frame.embedder());
    bool exact = true;
    int calls = 0;
    gen::SampleOptions o;
    o.observer = [&](const gen::DenoiserCall& call) {
      if (!call.conditional) return;
      ++calls;
      if (call.conditions.cols() != 40) {
        exact = false;
        return;
      }
      for (Eigen::Index f = 0; f < 40; ++f) {
        const auto& text = a.segments[a.segment_of(static_cast<std::size_t>(f))].text;
        exact = exact && call.conditions.col(f) == per_frame.embedder().embed(text) && call.conditions.col(f) == want.col(f);
      }
    };
    sample(a, per_frame, sched, o);
    c.expect(exact && calls == sched.steps(), "(c) condition map mismatch");
    detail += "; (c) map exact over " + std::to_string(calls) + " calls";
  }

  // (d)
  int pf1 = 0;
  int pf2 = 0;
  int px1 = 0;
  int px2 = 0;
  for (int s = 0; s < kFollowSeeds; ++s) {
    const bool r1 = (s & 1) != 0;
    const bool r2 = (s & 2) != 0;
    const auto a = gen::ConditionAssignment::consecutive({r1 ? gen::kMoveRight : gen::kMoveLeft,
                                                          r2 ? gen::kMoveRight : gen::kMoveLeft},
                                                         {20, 20});
    gen::SampleOptions o;
    o.seed = static_cast<std::uint64_t>(s);
    const auto m = sample(a, per_frame, sched, o);
    pf1 += correct_direction(m, 0, 20, r1);
    pf2 += correct_direction(m, 20, 40, r2);
    const auto p = sample_prefix_mode(a, prefix, sched, o);
    px1 += correct_direction(p, 0, 20, r1);
    px2 += correct_direction(p, 20, 40, r2);
  }
  const double secs = seconds_since(t0);
  c.expect(pf1 >= kPerFrameMinCorrect && pf2 >= kPerFrameMinCorrect, "(d) per-frame below 90%");
  c.expect(px2 <= kPrefixMaxSecondCorrect, "(d) prefix second segment above 60%");
  c.expect(secs < kDiffusionSeconds, "(d) over 10 min");
  detail += "; (d) per-frame " + std::to_string(pf1) + "%/" + std::to_string(pf2) + "%, prefix " + std::to_string(px1) +
            "%/" + std::to_string(px2) + "% (" + fmt(secs, 3) + " s)";
  return {c.ok, c.ok ? detail : c.first_failure + "; " + detail};
}

Outcome end_to_end() {
  using testkit::LiveService;
  LiveService svc("caring_acceptance_e2e", 600);
  Checks c;
  auto r = svc.post("/projects", {{"task", "Use a 3D printer"}});
  c.expect(r && r->status == 201, "create/refine");
  const auto project = LiveService::body(r);
  const auto id = project["id"].get<std::string>();
  std::vector<std::string> ids;
  for (const auto& s : project["steps"]) ids.push_back(s["id"]);
  c.expect(ids.size() == 4, "refine gave " + std::to_string(ids.size()) + " steps");

  r = svc.post("/projects/" + id + "/groups", {{"step_ids", ids}});
  c.expect(r && r->status == 201, "group");
  const auto gid = LiveService::body(r)["group"]["id"].get<std::string>();
  r = svc.client->Post("/projects/" + id + "/groups/" + gid + "/scan",
                       serialize_scan_log(demo_scan_log(find_scenario("use-a-3d-printer"))), "application/x-ndjson");
  c.expect(r && r->status == 200, "scan");

  auto run = [&](std::uint64_t seed) {
    auto g = svc.post("/projects/" + id + "/generate", {{"seed", seed}});
    c.expect(g && g->status == 202, "generate");
    auto job = svc.wait_job(LiveService::body(g)["id"]);
    c.expect(job["state"] == "done", "job " + job.dump());
    return job;
  };
  const auto job = run(42);
  if (!c.ok) return {false, c.first_failure};
  const auto mid = job["result_motion_ref"].get<std::string>();
  const auto text = svc.client->Get("/motions/" + mid)->body;
  const auto metrics = nlohmann::json::parse(svc.client->Get("/motions/" + mid + "/metrics")->body);

  const MotionClip motion = parse_motion(text);  // rejects ragged or non-finite frames
  c.expect(motion.size() == kScenarioFrames, "motion has " + std::to_string(motion.size()) + " frames");
  c.expect(motion.boundaries() == std::vector<std::size_t>{90, 180, 270}, "boundaries");
  c.expect(motion.skeleton() == humanoid_skeleton(), "skeleton");
  const double before = metrics["before"]["transition_m"];
  const double after = metrics["after"]["transition_m"];
  c.expect(after < before, "no transition improvement");
  c.expect(metrics["plausible"] == true, "not plausible");

  const auto again = run(42);
  const auto text2 = svc.client->Get("/motions/" + again["result_motion_ref"].get<std::string>())->body;
  c.expect(text2 == text, "same seed gave different bytes");
  const std::string detail = std::to_string(motion.size()) + " frames, transition " + fmt(before) + " -> " + fmt(after) +
                             " m (" + fmt(before / after, 3) + "x), spatial " +
                             fmt(metrics["after"]["spatial_m"].get<double>(), 3) + " m, repeat byte-identical " +
                             (text2 == text ? "yes" : "no");
  return {c.ok, c.ok ? detail : c.first_failure + "; " + detail};
}

Outcome soft_cap() {
  Checks c;
  const auto plan = compile_plan(demo_project(find_scenario("use-a-3d-printer")));
  const bool warned = plan.warnings.size() == 1 && plan.warnings[0].find("frame number 360 exceeds 196") != std::string::npos;
  c.expect(warned, "360-frame plan has no soft-cap warning");

  auto p = make_project("cap");
  insert_step(p, "walk forward");
  edit_step(p, "s1", {.status = StepStatus::contextualized});
  p.frames_per_step = 196;
  c.expect(compile_plan(p).warnings.empty(), "196 frames warned");
  p.frames_per_step = 197;
  c.expect(compile_plan(p).warnings.size() == 1, "197 frames not warned");

  for (int i = 0; i < 11; ++i) insert_step(p, "step " + std::to_string(i));
  for (const auto& s : std::vector<InstructionStep>(p.steps)) edit_step(p, s.id, {.status = StepStatus::contextualized});
  p.frames_per_step = kDefaultFramesPerStep;
  bool plan_rejected = false;
  try {
    compile_plan(p);
  } catch (const ValidationError&) {
    plan_rejected = true;
  }
  c.expect(plan_rejected, "1080-frame plan accepted");

  bool sample_rejected = false;
  try {
    require_within_hard_cap(kHardFrameCap + 1);
  } catch (const ValidationError&) {
    sample_rejected = true;
  }
  c.expect(sample_rejected, "sampling over the per-call cap accepted");
  return {c.ok, c.ok ? "360-frame plan warned; 196 silent, 197 warned; 1080 > " + std::to_string(kPlanFrameCap) +
                           " plan and " + std::to_string(kHardFrameCap + 1) + "-frame sample rejected"
                     : c.first_failure};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"smoothing efficacy", smoothing_efficacy}, {"blend analytics", blend_analytics},
      {"metric oracles", metric_oracles},         {"spatial plausibility", spatial_plausibility},
      {"toy diffusion", toy_diffusion},           {"end-to-end scenario", end_to_end},
      {"196-frame soft cap", soft_cap},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << "criterion " << i + 1 << " " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
