#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>

#include "caring/demo.hpp"
#include "caring/errors.hpp"
#include "caring/io.hpp"
#include "service_util.hpp"

using namespace caring;
using nlohmann::json;

namespace {

// Project with the printer script, one group over all steps and the demo scan.
std::string ready_project(testkit::LiveService& s) {
  auto r = s.post("/projects", {{"task", "Use a 3D printer"}});
  const auto id = testkit::LiveService::body(r)["id"].get<std::string>();
  r = s.post("/projects/" + id + "/groups", {{"step_ids", {"s1", "s2", "s3", "s4"}}});
  const auto gid = testkit::LiveService::body(r)["group"]["id"].get<std::string>();
  const auto scan = serialize_scan_log(demo_scan_log(find_scenario("use-a-3d-printer")));
  s.client->Post("/projects/" + id + "/groups/" + gid + "/scan", scan, "application/x-ndjson");
  return id;
}

}  // namespace

TEST(ErrorResponse, MapsExceptionTypes) {
  EXPECT_EQ(error_response(ValidationError("blend_len", "bad")).first, 422);
  EXPECT_EQ(error_response(ValidationError("blend_len", "bad")).second["error"]["fields"], json({"blend_len"}));
  EXPECT_EQ(error_response(NotFoundError("x")).first, 404);
  const auto c = error_response(ConflictError("drafts", {"s1", "s3"}));
  EXPECT_EQ(c.first, 409);
  EXPECT_EQ(c.second["error"]["ids"], json({"s1", "s3"}));
  EXPECT_EQ(error_response(ParseError("x")).first, 400);
  EXPECT_EQ(error_response(IoError("x")).first, 502);
  EXPECT_EQ(error_response(std::runtime_error("x")).first, 500);
}

TEST(JobModel, TransitionsAndJson) {
  Job j;
  j.id = "j1";
  j.project_id = "p1";
  j.plan = compile_plan(demo_project(find_scenario("making-tea")));
  EXPECT_THROW(j.advance(JobState::done), ConflictError);
  j.advance(JobState::running);
  EXPECT_THROW(j.advance(JobState::queued), ConflictError);
  j.advance(JobState::failed);
  EXPECT_THROW(j.advance(JobState::running), ConflictError);
  j.error_detail = "boom";
  EXPECT_EQ(job_from_json(to_json(j)), j);
}

TEST(JobRunner, FifoWithOneJobPerProject) {
  std::mutex mu;
  std::vector<std::string> order;
  std::atomic<int> in_flight_a{0};
  std::atomic<bool> overlap{false};
  {
    JobRunner runner(3, [&](const std::string& id) {
      if (id[0] == 'a' && ++in_flight_a > 1) overlap = true;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
      {
        std::lock_guard lock(mu);
        order.push_back(id);
      }
      if (id[0] == 'a') --in_flight_a;
    });
    for (int i = 0; i < 5; ++i) runner.submit("a" + std::to_string(i), "pa");
    runner.submit("b0", "pb");
    runner.drain();
  }
  EXPECT_FALSE(overlap);
  std::vector<std::string> a_order;
  for (const auto& id : order) {
    if (id[0] == 'a') a_order.push_back(id);
  }
  EXPECT_EQ(a_order, (std::vector<std::string>{"a0", "a1", "a2", "a3", "a4"}));
  EXPECT_EQ(order.size(), 6u);
}

TEST(Store, PersistsAcrossInstances) {
  const auto dir = std::filesystem::temp_directory_path() / "caring_store_test";
  std::filesystem::remove_all(dir);
  std::string pid;
  {
    Store s(dir);
    pid = s.create_project().id;
    s.mutate(pid, [](Project& p) { insert_step(p, "Wave"); });
    EXPECT_THROW(s.mutate(pid, [](Project& p) { insert_step(p, " "); }), ValidationError);
  }
  Store s(dir);
  EXPECT_EQ(s.project(pid).steps.size(), 1u);
  EXPECT_NE(s.create_project().id, pid);
  EXPECT_THROW(s.project("../etc"), NotFoundError);
  EXPECT_THROW(s.job("j404"), NotFoundError);
  EXPECT_THROW(s.motion_text("m1"), NotFoundError);
  std::filesystem::remove_all(dir);
}

class ServiceApi : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { svc_ = new testkit::LiveService("caring_service_api"); }
  static void TearDownTestSuite() {
    delete svc_;
    svc_ = nullptr;
  }
  static testkit::LiveService* svc_;
};
testkit::LiveService* ServiceApi::svc_ = nullptr;

TEST_F(ServiceApi, HealthAndCors) {
  auto r = svc_->client->Get("/health");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(testkit::LiveService::body(r)["version"], kVersion);
  EXPECT_EQ(r->get_header_value("Access-Control-Allow-Origin"), "*");
  r = svc_->client->Options("/projects");
  EXPECT_EQ(r->status, 204);
  EXPECT_NE(r->get_header_value("Access-Control-Allow-Methods").find("PATCH"), std::string::npos);
  r = svc_->client->Get("/nowhere");
  EXPECT_EQ(r->status, 404);
  EXPECT_EQ(testkit::LiveService::body(r)["error"]["code"], "not_found");
}

TEST_F(ServiceApi, ProjectLifecycle) {
  auto r = svc_->post("/projects", json::object());
  EXPECT_EQ(r->status, 201);
  const auto id = testkit::LiveService::body(r)["id"].get<std::string>();
  EXPECT_TRUE(testkit::LiveService::body(r)["steps"].empty());

  r = svc_->post("/projects/" + id + "/task", {{"text", "Making Tea"}});
  EXPECT_EQ(r->status, 200);
  auto p = testkit::LiveService::body(r);
  ASSERT_EQ(p["steps"].size(), 4u);
  EXPECT_EQ(p["steps"][0]["text"], "Boil the water");
  EXPECT_EQ(p["steps"][0]["status"], "draft");

  r = svc_->patch("/projects/" + id + "/steps/s2", {{"text", "Put a cup on the table"}, {"scale", "hands_only"}});
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(testkit::LiveService::body(r)["step"]["scale"], "hands_only");

  r = svc_->post("/projects/" + id + "/steps", {{"text", "Stir"}, {"anchor", "s4"}, {"position", "after"}});
  EXPECT_EQ(r->status, 201);
  EXPECT_EQ(testkit::LiveService::body(r)["step"]["id"], "s5");
  EXPECT_EQ(testkit::LiveService::body(r)["project"]["steps"][4]["id"], "s5");

  r = svc_->post("/projects/" + id + "/groups", {{"step_ids", {"s1", "s2"}}});
  EXPECT_EQ(r->status, 201);
  const auto gid = testkit::LiveService::body(r)["group"]["id"].get<std::string>();

  r = svc_->client->Delete("/projects/" + id + "/steps/s1");
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(testkit::LiveService::body(r)["detached_from"], gid);
  EXPECT_EQ(testkit::LiveService::body(r)["group_removed"], false);

  r = svc_->client->Get("/projects/" + id);
  EXPECT_EQ(testkit::LiveService::body(r)["steps"].size(), 4u);
}

TEST_F(ServiceApi, ErrorStatuses) {
  auto r = svc_->client->Get("/projects/p999");
  EXPECT_EQ(r->status, 404);
  r = svc_->post("/projects", {{"task", "Making Tea"}});
  const auto id = testkit::LiveService::body(r)["id"].get<std::string>();

  r = svc_->client->Post("/projects/" + id + "/steps", "{nope", "application/json");
  EXPECT_EQ(r->status, 400);
  r = svc_->post("/projects/" + id + "/steps", {{"text", ""}});
  EXPECT_EQ(r->status, 422);
  EXPECT_EQ(testkit::LiveService::body(r)["error"]["fields"], json({"text"}));
  r = svc_->patch("/projects/" + id + "/steps/s1", {{"scale", "tiny"}});
  EXPECT_EQ(r->status, 422);
  r = svc_->patch("/projects/" + id + "/steps/s77", {{"text", "x"}});
  EXPECT_EQ(r->status, 404);
  r = svc_->post("/projects/" + id + "/task", {{"text", "  "}});
  EXPECT_EQ(r->status, 422);

  r = svc_->post("/projects/" + id + "/generate", json::object());
  EXPECT_EQ(r->status, 409);
  EXPECT_EQ(testkit::LiveService::body(r)["error"]["ids"], json({"s1", "s2", "s3", "s4"}));
  r = svc_->client->Get("/projects/" + id + "/plan");
  EXPECT_EQ(r->status, 409);

  r = svc_->post("/projects/" + id + "/groups", {{"step_ids", {"s1"}}});
  const auto gid = testkit::LiveService::body(r)["group"]["id"].get<std::string>();
  r = svc_->client->Post("/projects/" + id + "/groups/" + gid + "/scan", "{\"v\":1,\"type\":\"sample\"", "text/plain");
  EXPECT_EQ(r->status, 400);
  r = svc_->client->Post("/projects/" + id + "/groups/g999/scan", serialize_scan_log(demo_scan_log(find_scenario("making-tea"))),
                         "text/plain");
  EXPECT_EQ(r->status, 404);
  EXPECT_EQ(svc_->client->Get("/jobs/j999")->status, 404);
  EXPECT_EQ(svc_->client->Get("/motions/m999")->status, 404);
}

TEST_F(ServiceApi, ScanWithoutSnapshotWarns) {
  auto r = svc_->post("/projects", {{"task", "Closing a Window"}});
  const auto id = testkit::LiveService::body(r)["id"].get<std::string>();
  r = svc_->post("/projects/" + id + "/groups", {{"step_ids", {"s1", "s2", "s3"}}});
  const auto gid = testkit::LiveService::body(r)["group"]["id"].get<std::string>();
  auto log = demo_scan_log(find_scenario("closing-a-window"));
  log.snapshot_events.clear();
  r = svc_->client->Post("/projects/" + id + "/groups/" + gid + "/scan", serialize_scan_log(log), "text/plain");
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(testkit::LiveService::body(r)["warnings"].size(), 1u);
  EXPECT_EQ(testkit::LiveService::body(r)["project"]["steps"][0]["status"], "contextualized");
  r = svc_->client->Get("/projects/" + id + "/plan");
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(testkit::LiveService::body(r)["warnings"].size(), 2u);
}

TEST_F(ServiceApi, GenerateIsAsyncAndSeedDeterministic) {
  const auto id = ready_project(*svc_);
  auto r = svc_->post("/projects/" + id + "/generate", {{"seed", 5}});
  ASSERT_EQ(r->status, 202);
  auto job = testkit::LiveService::body(r);
  EXPECT_EQ(r->get_header_value("Location"), "/jobs/" + job["id"].get<std::string>());
  EXPECT_EQ(job["plan"]["total_frames"], 360);
  EXPECT_EQ(job["warnings"].size(), 1u);

  // Later edits do not leak into the submitted job.
  svc_->patch("/projects/" + id + "/steps/s1", {{"text", "Grab the PVA spool"}});
  job = svc_->wait_job(job["id"]);
  ASSERT_EQ(job["state"], "done") << job.dump();
  EXPECT_EQ(job["plan"]["steps"][0]["condition_text"], "Pick up PVA");
  const auto mid = job["result_motion_ref"].get<std::string>();
  const auto first = svc_->client->Get("/motions/" + mid)->body;
  const auto motion = parse_motion(first);
  EXPECT_EQ(motion.size(), 360u);
  EXPECT_EQ(motion.boundaries(), (std::vector<std::size_t>{90, 180, 270}));
  const auto metrics = json::parse(svc_->client->Get("/motions/" + mid + "/metrics")->body);
  EXPECT_LT(metrics["after"]["transition_m"].get<double>(), metrics["before"]["transition_m"].get<double>());

  r = svc_->post("/projects/" + id + "/generate", {{"seed", 5}});
  EXPECT_EQ(r->status, 409);
  svc_->patch("/projects/" + id + "/steps/s1", {{"status", "contextualized"}});
  svc_->patch("/projects/" + id + "/steps/s1", {{"text", "Pick up PVA"}, {"status", "contextualized"}});
  r = svc_->post("/projects/" + id + "/generate", {{"seed", 5}});
  ASSERT_EQ(r->status, 202);
  job = svc_->wait_job(testkit::LiveService::body(r)["id"]);
  EXPECT_EQ(svc_->client->Get("/motions/" + job["result_motion_ref"].get<std::string>())->body, first);
}

TEST_F(ServiceApi, GenerateValidatesOptions) {
  const auto id = ready_project(*svc_);
  auto r = svc_->post("/projects/" + id + "/generate", {{"blend_len", 46}});
  EXPECT_EQ(r->status, 422);
  EXPECT_EQ(testkit::LiveService::body(r)["error"]["fields"], json({"blend_len"}));
  r = svc_->post("/projects/" + id + "/generate", {{"blend_len", 0}});
  EXPECT_EQ(r->status, 422);
  r = svc_->post("/projects/" + id + "/generate", {{"guidance_scale", -2}});
  EXPECT_EQ(r->status, 422);
  r = svc_->post("/projects/" + id + "/generate", {{"seed", "five"}});
  EXPECT_EQ(r->status, 422);
  EXPECT_EQ(testkit::LiveService::body(r)["error"]["fields"], json({"seed"}));
}

TEST(ServiceRestart, QueuedJobsResumeAndRunningJobsFail) {
  const std::string name = "caring_service_restart";
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  {
    Store s(dir);
    auto p = demo_project(find_scenario("closing-a-window"), "unused");
    const auto pid = s.create_project().id;
    s.mutate(pid, [&](Project& pr) {
      const auto keep = pr.id;
      pr = p;
      pr.id = keep;
    });
    Job queued;
    queued.project_id = pid;
    queued.plan = compile_plan(s.project(pid));
    queued = s.create_job(queued);
    Job running = queued;
    running = s.create_job(running);
    running.advance(JobState::running);
    s.save_job(running);
  }
  testkit::LiveService svc(name, 30, false);
  svc.service->drain_jobs();
  EXPECT_EQ(svc.service->store().job("j1").state, JobState::done);
  EXPECT_EQ(svc.service->store().job("j2").state, JobState::failed);
  EXPECT_TRUE(svc.service->store().job("j2").error_detail);
}
