#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <type_traits>
#include <vector>

#include <nlohmann/json.hpp>

#include "caring/generator/denoiser.hpp"
#include "caring/pipeline.hpp"
#include "caring/session.hpp"

namespace caring {

inline constexpr const char* kVersion = "0.1.0";

enum class JobState { queued, running, done, failed };

const char* to_string(JobState s);
JobState job_state_from_string(std::string_view s);

struct Job {
  std::string id;
  std::string project_id;
  JobState state = JobState::queued;
  std::uint64_t seed = 0;
  std::size_t blend_len = kDefaultBlendLength;
  double guidance_scale = 2.5;
  /// Plan frozen at submission; later project edits do not affect the job.
  GenerationPlan plan;
  std::optional<std::string> result_motion_ref;
  std::optional<std::string> error_detail;
  std::vector<std::string> warnings;

  /// Only queued -> running -> done | failed. Throws ConflictError otherwise.
  void advance(JobState next);
  friend bool operator==(const Job&, const Job&) = default;
};

nlohmann::json to_json(const Job& job);
Job job_from_json(const nlohmann::json& j);

/**
 * Projects, jobs and motions kept as files under one directory:
 *   projects/<id>.json, jobs/<id>.json, motions/<id>.json (+ .metrics.json,
 *   .naive.json), counters.json.
 * All access goes through one mutex, so mutations are serialized and readers
 * see whole states.
 */
class Store {
 public:
  explicit Store(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  Project create_project();
  Project project(const std::string& id) const;

  /// Applies `fn` to a copy of the project and persists it only when `fn`
  /// returns normally and the result validates.
  template <typename Fn>
  auto mutate(const std::string& id, Fn&& fn) {
    std::lock_guard lock(mu_);
    Project p = load_project_locked(id);
    if constexpr (std::is_void_v<decltype(fn(p))>) {
      fn(p);
      commit_locked(p);
    } else {
      auto out = fn(p);
      commit_locked(p);
      return out;
    }
  }

  Job create_job(Job job);
  void save_job(const Job& job);
  Job job(const std::string& id) const;
  std::vector<Job> jobs() const;

  void save_motion(const std::string& motion_id, const GenerationResult& result);
  std::string motion_text(const std::string& motion_id) const;
  std::string metrics_text(const std::string& motion_id) const;

 private:
  Project load_project_locked(const std::string& id) const;
  void commit_locked(const Project& p);
  void save_counters_locked();
  std::filesystem::path project_path(const std::string& id) const;
  std::filesystem::path job_path(const std::string& id) const;
  std::filesystem::path motion_path(const std::string& id, std::string_view suffix) const;

  std::filesystem::path root_;
  mutable std::mutex mu_;
  std::uint64_t next_project_ = 1;
  std::uint64_t next_job_ = 1;
};

/// Loads data_dir/denoiser.json, training and caching it on first use.
class ModelProvider {
 public:
  ModelProvider(std::filesystem::path checkpoint, int train_steps);
  /// Thread-safe; the first caller pays for training.
  const gen::Denoiser& get();

 private:
  std::filesystem::path checkpoint_;
  int train_steps_;
  std::mutex mu_;
  std::unique_ptr<gen::Denoiser> model_;
};

/// Background workers running generation jobs in FIFO order with at most
/// one job in flight per project.
class JobRunner {
 public:
  using Work = std::function<void(const std::string& job_id)>;
  JobRunner(std::size_t workers, Work work);
  ~JobRunner();
  JobRunner(const JobRunner&) = delete;
  JobRunner& operator=(const JobRunner&) = delete;

  void submit(const std::string& job_id, const std::string& project_id);
  /// Blocks until the queue is empty and no job runs.
  void drain();
  void stop();

 private:
  void loop();

  Work work_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable idle_cv_;
  std::deque<std::pair<std::string, std::string>> queue_;
  std::set<std::string> busy_projects_;
  std::size_t running_ = 0;
  bool stopping_ = false;
  std::vector<std::thread> threads_;
};

struct ServiceConfig {
  std::filesystem::path data_dir = "caring-data";
  /// Training steps for the humanoid model when no checkpoint exists.
  int train_steps = 600;
  std::size_t workers = 1;
  /// "mock" or "http".
  std::string instruction_client = "mock";
  std::string cors_origin = "*";
};

/// JSON error body {"error": {"code", "message", "fields", "ids"}} and status
/// for an exception thrown by the pipeline.
std::pair<int, nlohmann::json> error_response(const std::exception& e);

class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and serves on a background thread. Port 0 picks a free port;
  /// returns the bound port. Throws IoError when binding fails.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Serves on the calling thread until stop().
  void listen(const std::string& host, int port);
  void stop();

  Store& store() { return store_; }
  /// Waits for queued jobs (tests and CLI).
  void drain_jobs() { runner_.drain(); }

 private:
  struct Http;
  void run_job(const std::string& job_id);

  ServiceConfig config_;
  Store store_;
  ModelProvider models_;
  std::unique_ptr<Http> http_;
  JobRunner runner_;
  std::thread server_thread_;
};

}  // namespace caring
