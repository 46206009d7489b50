#include <algorithm>
#include <fstream>

#include "caring/errors.hpp"
#include "caring/io.hpp"
#include "caring/service.hpp"

namespace caring {

namespace fs = std::filesystem;

namespace {

bool safe_id(std::string_view id) {
  return !id.empty() && id.size() <= 64 && std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '-' || c == '_';
  });
}

void require_safe(std::string_view kind, const std::string& id) {
  // Ids become file names; anything else cannot exist.
  if (!safe_id(id)) throw NotFoundError("unknown " + std::string(kind) + " '" + id + "'");
}

}  // namespace

const char* to_string(JobState s) {
  switch (s) {
    case JobState::queued: return "queued";
    case JobState::running: return "running";
    case JobState::done: return "done";
    case JobState::failed: return "failed";
  }
  return "?";
}

JobState job_state_from_string(std::string_view s) {
  if (s == "queued") return JobState::queued;
  if (s == "running") return JobState::running;
  if (s == "done") return JobState::done;
  if (s == "failed") return JobState::failed;
  throw ParseError("unknown job state '" + std::string(s) + "'");
}

void Job::advance(JobState next) {
  const bool ok = (state == JobState::queued && next == JobState::running) ||
                  (state == JobState::running && (next == JobState::done || next == JobState::failed));
  if (!ok) {
    throw ConflictError(std::string("job ") + id + " cannot go from " + to_string(state) + " to " +
                            to_string(next),
                        {id});
  }
  state = next;
}

nlohmann::json to_json(const Job& job) {
  return {{"id", job.id},
          {"project_id", job.project_id},
          {"state", to_string(job.state)},
          {"seed", job.seed},
          {"blend_len", job.blend_len},
          {"guidance_scale", job.guidance_scale},
          {"plan", to_json(job.plan)},
          {"result_motion_ref", job.result_motion_ref ? json(*job.result_motion_ref) : json(nullptr)},
          {"error_detail", job.error_detail ? json(*job.error_detail) : json(nullptr)},
          {"warnings", job.warnings}};
}

Job job_from_json(const nlohmann::json& j) {
  try {
    Job job;
    job.id = j.at("id").get<std::string>();
    job.project_id = j.at("project_id").get<std::string>();
    job.state = job_state_from_string(j.at("state").get<std::string>());
    job.seed = j.at("seed").get<std::uint64_t>();
    job.blend_len = j.at("blend_len").get<std::size_t>();
    job.guidance_scale = j.at("guidance_scale").get<double>();
    job.plan = plan_from_json(j.at("plan"));
    if (!j.at("result_motion_ref").is_null()) {
      job.result_motion_ref = j["result_motion_ref"].get<std::string>();
    }
    if (!j.at("error_detail").is_null()) job.error_detail = j["error_detail"].get<std::string>();
    job.warnings = j.at("warnings").get<std::vector<std::string>>();
    return job;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("job: ") + e.what());
  }
}

Store::Store(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  for (const char* sub : {"projects", "jobs", "motions"}) {
    fs::create_directories(root_ / sub, ec);
    if (ec) throw IoError("cannot create " + (root_ / sub).string() + ": " + ec.message());
  }
  const auto counters = root_ / "counters.json";
  if (fs::exists(counters)) {
    const auto j = parse_json_text(read_text_file(counters));
    next_project_ = j.value("next_project", std::uint64_t{1});
    next_job_ = j.value("next_job", std::uint64_t{1});
  }
}

fs::path Store::project_path(const std::string& id) const { return root_ / "projects" / (id + ".json"); }
fs::path Store::job_path(const std::string& id) const { return root_ / "jobs" / (id + ".json"); }
fs::path Store::motion_path(const std::string& id, std::string_view suffix) const {
  return root_ / "motions" / (id + std::string(suffix) + ".json");
}

void Store::save_counters_locked() {
  const nlohmann::json j{{"next_project", next_project_}, {"next_job", next_job_}};
  write_text_file(root_ / "counters.json", j.dump(2) + "\n");
}

Project Store::create_project() {
  std::lock_guard lock(mu_);
  auto p = make_project("p" + std::to_string(next_project_++));
  save_counters_locked();
  commit_locked(p);
  return p;
}

Project Store::load_project_locked(const std::string& id) const {
  require_safe("project", id);
  const auto path = project_path(id);
  if (!fs::exists(path)) throw NotFoundError("unknown project '" + id + "'");
  return load_project(path);
}

void Store::commit_locked(const Project& p) {
  p.validate();
  save_project(p, project_path(p.id));
}

Project Store::project(const std::string& id) const {
  std::lock_guard lock(mu_);
  return load_project_locked(id);
}

Job Store::create_job(Job job) {
  std::lock_guard lock(mu_);
  job.id = "j" + std::to_string(next_job_++);
  save_counters_locked();
  write_text_file(job_path(job.id), to_json(job).dump(2) + "\n");
  return job;
}

void Store::save_job(const Job& job) {
  std::lock_guard lock(mu_);
  write_text_file(job_path(job.id), to_json(job).dump(2) + "\n");
}

Job Store::job(const std::string& id) const {
  std::lock_guard lock(mu_);
  require_safe("job", id);
  const auto path = job_path(id);
  if (!fs::exists(path)) throw NotFoundError("unknown job '" + id + "'");
  return job_from_json(parse_json_text(read_text_file(path)));
}

std::vector<Job> Store::jobs() const {
  std::vector<fs::path> files;
  {
    std::lock_guard lock(mu_);
    for (const auto& e : fs::directory_iterator(root_ / "jobs")) {
      if (e.path().extension() == ".json") files.push_back(e.path());
    }
  }
  std::vector<Job> out;
  for (const auto& f : files) out.push_back(job(f.stem().string()));
  // Numeric id order is submission order.
  std::sort(out.begin(), out.end(), [](const Job& a, const Job& b) {
    return std::stoull(a.id.substr(1)) < std::stoull(b.id.substr(1));
  });
  return out;
}

void Store::save_motion(const std::string& motion_id, const GenerationResult& result) {
  std::lock_guard lock(mu_);
  write_text_file(motion_path(motion_id, ""), serialize_motion(result.motion));
  write_text_file(motion_path(motion_id, ".naive"), serialize_motion(result.naive));
  write_text_file(motion_path(motion_id, ".metrics"), serialize_report(result.report));
}

std::string Store::motion_text(const std::string& motion_id) const {
  std::lock_guard lock(mu_);
  require_safe("motion", motion_id);
  const auto path = motion_path(motion_id, "");
  if (!fs::exists(path)) throw NotFoundError("unknown motion '" + motion_id + "'");
  return read_text_file(path);
}

std::string Store::metrics_text(const std::string& motion_id) const {
  std::lock_guard lock(mu_);
  require_safe("motion", motion_id);
  const auto path = motion_path(motion_id, ".metrics");
  if (!fs::exists(path)) throw NotFoundError("unknown motion '" + motion_id + "'");
  return read_text_file(path);
}

ModelProvider::ModelProvider(fs::path checkpoint, int train_steps)
    : checkpoint_(std::move(checkpoint)), train_steps_(train_steps) {}

const gen::Denoiser& ModelProvider::get() {
  std::lock_guard lock(mu_);
  if (!model_) {
    if (fs::exists(checkpoint_)) {
      model_ = std::make_unique<gen::Denoiser>(gen::load_denoiser(checkpoint_));
    } else {
      model_ = std::make_unique<gen::Denoiser>(train_humanoid_denoiser(train_steps_));
      gen::save_denoiser(*model_, checkpoint_);
    }
  }
  return *model_;
}

JobRunner::JobRunner(std::size_t workers, Work work) : work_(std::move(work)) {
  if (workers == 0) throw ValidationError("workers", "need at least one worker");
  for (std::size_t i = 0; i < workers; ++i) threads_.emplace_back([this] { loop(); });
}

JobRunner::~JobRunner() { stop(); }

void JobRunner::submit(const std::string& job_id, const std::string& project_id) {
  {
    std::lock_guard lock(mu_);
    queue_.emplace_back(job_id, project_id);
  }
  cv_.notify_all();
}

void JobRunner::drain() {
  std::unique_lock lock(mu_);
  idle_cv_.wait(lock, [this] { return (queue_.empty() && running_ == 0) || stopping_; });
}

void JobRunner::stop() {
  {
    std::lock_guard lock(mu_);
    if (stopping_ && threads_.empty()) return;
    stopping_ = true;
  }
  cv_.notify_all();
  idle_cv_.notify_all();
  for (auto& t : threads_) {
    if (t.joinable()) t.join();
  }
  threads_.clear();
}

void JobRunner::loop() {
  std::unique_lock lock(mu_);
  while (true) {
    // Oldest job whose project has nothing in flight.
    auto next = queue_.end();
    cv_.wait(lock, [&] {
      if (stopping_) return true;
      next = std::find_if(queue_.begin(), queue_.end(),
                          [&](const auto& q) { return !busy_projects_.contains(q.second); });
      return next != queue_.end();
    });
    if (stopping_) return;
    const auto [job_id, project_id] = *next;
    queue_.erase(next);
    busy_projects_.insert(project_id);
    ++running_;
    lock.unlock();
    work_(job_id);
    lock.lock();
    busy_projects_.erase(project_id);
    --running_;
    cv_.notify_all();
    if (queue_.empty() && running_ == 0) idle_cv_.notify_all();
  }
}

}  // namespace caring
