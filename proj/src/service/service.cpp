#include "caring/service.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cmath>
#include <iostream>

#include "caring/errors.hpp"
#include "caring/io.hpp"
#include "caring/metrics.hpp"

namespace caring {

namespace {

constexpr const char* kJson = "application/json";

json body_json(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  auto j = parse_json_text(req.body);
  if (!j.is_object()) throw ParseError("request body: expected a JSON object");
  return j;
}

std::string str_field(const json& j, const char* key) {
  const auto& v = require_field(j, key, "");
  if (!v.is_string()) throw ValidationError(key, "expected a string");
  return v.get<std::string>();
}

std::optional<std::string> opt_str(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return str_field(j, key);
}

std::uint64_t u64_field(const json& j, const char* key, std::uint64_t fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  const auto& v = j[key];
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
    throw ValidationError(key, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

double num_field(const json& j, const char* key, double fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  if (!j[key].is_number()) throw ValidationError(key, "expected a number");
  const double v = j[key].get<double>();
  if (!std::isfinite(v)) throw ValidationError(key, "must be finite");
  return v;
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", kJson);
}

}  // namespace

std::pair<int, nlohmann::json> error_response(const std::exception& e) {
  json err{{"message", e.what()}, {"fields", json::array()}, {"ids", json::array()}};
  int status = 500;
  if (const auto* v = dynamic_cast<const ValidationError*>(&e)) {
    status = 422;
    err["code"] = "validation_error";
    if (!v->field.empty()) err["fields"].push_back(v->field);
  } else if (dynamic_cast<const NotFoundError*>(&e)) {
    status = 404;
    err["code"] = "not_found";
  } else if (const auto* c = dynamic_cast<const ConflictError*>(&e)) {
    status = 409;
    err["code"] = "conflict";
    err["ids"] = c->ids;
  } else if (dynamic_cast<const ParseError*>(&e)) {
    status = 400;
    err["code"] = "parse_error";
  } else if (dynamic_cast<const IoError*>(&e)) {
    status = 502;
    err["code"] = "upstream_error";
  } else {
    err["code"] = "internal_error";
  }
  return {status, json{{"error", std::move(err)}}};
}

namespace {

std::vector<InstructionStep> refine_with(const std::string& text, const std::string& client_kind) {
  auto client = make_instruction_client(client_kind);
  return refine_instructions(text, *client);
}

// Step ids are reassigned from the project's counter under the store lock;
// the client call itself happens before.
Project assign_task(Store& store, const std::string& project_id, const std::string& text,
                    std::vector<InstructionStep> steps) {
  return store.mutate(project_id, [&](Project& pr) {
    for (auto& st : steps) st.id = "s" + std::to_string(pr.next_step++);
    pr.task = text;
    pr.steps = steps;
    pr.groups.clear();
    pr.scan_logs.clear();
    pr.plan_cache.reset();
    return pr;
  });
}

}  // namespace

struct Service::Http {
  httplib::Server server;
};

Service::Service(ServiceConfig config)
    : config_(std::move(config)),
      store_(config_.data_dir),
      models_(config_.data_dir / "denoiser.json", config_.train_steps),
      http_(std::make_unique<Http>()),
      runner_(config_.workers, [this](const std::string& id) { run_job(id); }) {
  // Jobs interrupted by a previous shutdown.
  for (auto job : store_.jobs()) {
    if (job.state == JobState::running) {
      job.advance(JobState::failed);
      job.error_detail = "service restarted while the job was running";
      store_.save_job(job);
    } else if (job.state == JobState::queued) {
      runner_.submit(job.id, job.project_id);
    }
  }

  auto& s = http_->server;
  const auto origin = config_.cors_origin;
  s.set_default_headers({{"Access-Control-Allow-Origin", origin},
                         {"Access-Control-Allow-Methods", "GET, POST, PATCH, DELETE, OPTIONS"},
                         {"Access-Control-Allow-Headers", "Content-Type"}});
  s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      auto [status, body] = error_response(e);
      reply(res, status, body);
    } catch (...) {
      reply(res, 500, json{{"error", {{"code", "internal_error"}, {"message", "unknown error"}}}});
    }
  });
  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty() && res.status == 404) {
      reply(res, 404, json{{"error", {{"code", "not_found"}, {"message", "no such route"},
                                      {"fields", json::array()}, {"ids", json::array()}}}});
    }
  });
  s.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  s.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, {{"status", "ok"}, {"version", kVersion}});
  });

  s.Post("/projects", [this](const httplib::Request& req, httplib::Response& res) {
    const auto body = body_json(req);
    const auto task = opt_str(body, "task");
    std::vector<InstructionStep> steps;
    if (task) steps = refine_with(*task, config_.instruction_client);
    auto p = store_.create_project();
    if (task) p = assign_task(store_, p.id, *task, std::move(steps));
    reply(res, 201, to_json(p));
  });

  s.Get(R"(/projects/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, 200, to_json(store_.project(req.matches[1])));
  });

  s.Post(R"(/projects/([^/]+)/task)", [this](const httplib::Request& req, httplib::Response& res) {
    const auto body = body_json(req);
    const auto text = str_field(body, "text");
    const auto kind = opt_str(body, "client").value_or(config_.instruction_client);
    store_.project(req.matches[1]);
    reply(res, 200, to_json(assign_task(store_, req.matches[1], text, refine_with(text, kind))));
  });

  s.Patch(R"(/projects/([^/]+)/steps/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const auto body = body_json(req);
    StepEdit edit;
    edit.text = opt_str(body, "text");
    if (auto v = opt_str(body, "scale")) edit.scale = step_scale_from_string(*v);
    if (auto v = opt_str(body, "status")) edit.status = step_status_from_string(*v);
    if (body.contains("target_object_id")) edit.target_object_id = opt_str(body, "target_object_id");
    const std::string sid = req.matches[2];
    auto p = store_.mutate(req.matches[1], [&](Project& pr) {
      edit_step(pr, sid, edit);
      return pr;
    });
    reply(res, 200, {{"step", to_json(p.step(sid))}, {"project", to_json(p)}});
  });

  s.Post(R"(/projects/([^/]+)/steps)", [this](const httplib::Request& req, httplib::Response& res) {
    const auto body = body_json(req);
    const auto text = str_field(body, "text");
    const auto anchor = opt_str(body, "anchor");
    const auto pos = opt_str(body, "position").value_or("after");
    if (pos != "before" && pos != "after") throw ValidationError("position", "expected before or after");
    const auto scale = step_scale_from_string(opt_str(body, "scale").value_or("full_body"));
    auto [step, p] = store_.mutate(req.matches[1], [&](Project& pr) {
      auto st = insert_step(pr, text, anchor,
                            pos == "before" ? InsertPosition::before : InsertPosition::after, scale);
      return std::pair{st, pr};
    });
    reply(res, 201, {{"step", to_json(step)}, {"project", to_json(p)}});
  });

  s.Delete(R"(/projects/([^/]+)/steps/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string sid = req.matches[2];
    auto [rep, p] = store_.mutate(req.matches[1], [&](Project& pr) {
      auto r = delete_step(pr, sid);
      return std::pair{r, pr};
    });
    reply(res, 200,
          {{"deleted", sid},
           {"detached_from", rep.detached_from ? json(*rep.detached_from) : json(nullptr)},
           {"group_removed", rep.group_removed},
           {"project", to_json(p)}});
  });

  s.Post(R"(/projects/([^/]+)/groups)", [this](const httplib::Request& req, httplib::Response& res) {
    const auto body = body_json(req);
    const auto& ids = require_field(body, "step_ids", "");
    if (!ids.is_array()) throw ValidationError("step_ids", "expected an array of step ids");
    std::vector<std::string> step_ids;
    for (const auto& v : ids) {
      if (!v.is_string()) throw ValidationError("step_ids", "expected an array of step ids");
      step_ids.push_back(v.get<std::string>());
    }
    auto [group, p] = store_.mutate(req.matches[1], [&](Project& pr) {
      auto g = create_group(pr, step_ids);
      return std::pair{g, pr};
    });
    reply(res, 201, {{"group", to_json(group)}, {"project", to_json(p)}});
  });

  s.Post(R"(/projects/([^/]+)/groups/([^/]+)/scan)",
         [this](const httplib::Request& req, httplib::Response& res) {
           const auto log = parse_scan_log(req.body);
           const std::string gid = req.matches[2];
           auto [warnings, p] = store_.mutate(req.matches[1], [&](Project& pr) {
             auto w = ingest_scan(pr, gid, log);
             return std::pair{w, pr};
           });
           reply(res, 200, {{"group", to_json(p.group(gid))}, {"warnings", warnings}, {"project", to_json(p)}});
         });

  s.Get(R"(/projects/([^/]+)/plan)", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, 200, to_json(compile_plan(store_.project(req.matches[1]))));
  });

  s.Post(R"(/projects/([^/]+)/generate)", [this](const httplib::Request& req, httplib::Response& res) {
    const auto body = body_json(req);
    Job job;
    job.project_id = req.matches[1];
    job.seed = u64_field(body, "seed", 0);
    job.blend_len = u64_field(body, "blend_len", kDefaultBlendLength);
    job.guidance_scale = num_field(body, "guidance_scale", 2.5);
    if (job.guidance_scale < 0.0) throw ValidationError("guidance_scale", "must be non-negative");
    BlendConfig{job.blend_len}.validate();
    job.plan = store_.mutate(job.project_id, [](Project& pr) {
      pr.plan_cache = compile_plan(pr);
      return *pr.plan_cache;
    });
    for (std::size_t i = 0; i < job.plan.steps.size(); ++i) {
      if (job.plan.steps[i].frames() < 2 * job.blend_len) {
        throw ValidationError("blend_len", "steps are shorter than 2 * blend_len frames");
      }
    }
    job.warnings = job.plan.warnings;
    job = store_.create_job(job);
    runner_.submit(job.id, job.project_id);
    res.set_header("Location", "/jobs/" + job.id);
    reply(res, 202, to_json(job));
  });

  s.Get(R"(/jobs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, 200, to_json(store_.job(req.matches[1])));
  });

  s.Get(R"(/motions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    res.status = 200;
    res.set_content(store_.motion_text(req.matches[1]), kJson);
  });

  s.Get(R"(/motions/([^/]+)/metrics)", [this](const httplib::Request& req, httplib::Response& res) {
    res.status = 200;
    res.set_content(store_.metrics_text(req.matches[1]), kJson);
  });
}

Service::~Service() {
  stop();
  runner_.stop();
}

void Service::run_job(const std::string& job_id) {
  Job job = store_.job(job_id);
  job.advance(JobState::running);
  store_.save_job(job);
  try {
    GenerationOptions opts;
    opts.seed = job.seed;
    opts.blend_length = job.blend_len;
    opts.guidance_scale = job.guidance_scale;
    const auto result = run_generation(job.plan, models_.get(), opts);
    const auto motion_id = "m" + job.id.substr(1);
    store_.save_motion(motion_id, result);
    job.result_motion_ref = motion_id;
    job.warnings = result.warnings;
    job.advance(JobState::done);
  } catch (const std::exception& e) {
    job.error_detail = e.what();
    job.advance(JobState::failed);
  }
  store_.save_job(job);
}

int Service::start(const std::string& host, int port) {
  auto& s = http_->server;
  int bound = port;
  if (port == 0) {
    bound = s.bind_to_any_port(host);
  } else if (!s.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  server_thread_ = std::thread([this] { http_->server.listen_after_bind(); });
  s.wait_until_ready();
  return bound;
}

void Service::listen(const std::string& host, int port) {
  if (!http_->server.listen(host, port)) {
    throw IoError("cannot listen on " + host + ":" + std::to_string(port));
  }
}

void Service::stop() {
  if (http_) http_->server.stop();
  if (server_thread_.joinable()) server_thread_.join();
}

}  // namespace caring
