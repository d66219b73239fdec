// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/cli/service.hpp"

#include <httplib.h>

#include <fstream>

#include "abstain/core/error.hpp"

namespace abstain::cli {

using nlohmann::json;
using std::chrono::steady_clock;

AnnotationService::AnnotationService(std::vector<annotation::AnnotationTask> tasks,
                                     std::vector<annotation::AnnotatorResponse> existing,
                                     Options options)
    : options_(std::move(options)) {
  if (options_.responses_per_task < 1) throw Error("responses_per_task must be positive");
  for (auto& task : tasks) {
    if (index_.count(task.task_id)) throw Error("duplicate task id '" + task.task_id + "'");
    index_[task.task_id] = tasks_.size();
    tasks_.push_back({std::move(task), {}, {}});
  }
  for (auto& r : existing) {
    auto it = index_.find(r.task_id);
    if (it == index_.end()) continue;
    if (tasks_[it->second].answered_by.insert(r.worker_id).second) responses_.push_back(std::move(r));
  }
}

steady_clock::time_point AnnotationService::now() const {
  return options_.clock ? options_.clock() : steady_clock::now();
}

void AnnotationService::expire(TaskState& state, steady_clock::time_point at) {
  std::erase_if(state.leases, [&](const auto& lease) { return lease.second <= at; });
}

std::optional<AnnotationService::Lease> AnnotationService::next_task(const std::string& worker) {
  if (worker.empty()) throw Error("worker id is required");
  std::lock_guard lock(mutex_);
  const auto t = now();
  for (auto& state : tasks_) {
    expire(state, t);
    if (auto it = state.leases.find(worker); it != state.leases.end()) {
      return Lease{state.task,
                   std::chrono::duration_cast<std::chrono::seconds>(it->second - t)};
    }
  }
  for (auto& state : tasks_) {
    if (state.answered_by.count(worker)) continue;
    const auto taken = state.answered_by.size() + state.leases.size();
    if (taken >= static_cast<std::size_t>(options_.responses_per_task)) continue;
    state.leases[worker] = t + options_.lease;
    return Lease{state.task, options_.lease};
  }
  return std::nullopt;
}

AnnotationService::SubmitStatus AnnotationService::submit(
    const annotation::AnnotatorResponse& response) {
  try {
    annotation::validate(response);
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError({e.what()});
  }
  std::lock_guard lock(mutex_);
  auto it = index_.find(response.task_id);
  if (it == index_.end()) throw Error("unknown task '" + response.task_id + "'");
  auto& state = tasks_[it->second];
  state.leases.erase(response.worker_id);
  if (!state.answered_by.insert(response.worker_id).second) return SubmitStatus::kDuplicate;
  responses_.push_back(response);
  if (on_stored_) on_stored_(response);
  return SubmitStatus::kStored;
}

json AnnotationService::progress() const {
  std::lock_guard lock(mutex_);
  const auto t = now();
  std::size_t complete = 0;
  std::size_t leases = 0;
  for (const auto& state : tasks_) {
    complete += state.answered_by.size() >= static_cast<std::size_t>(options_.responses_per_task);
    for (const auto& [_, expiry] : state.leases) leases += expiry > t;
  }
  return {{"tasks", tasks_.size()},
          {"complete", complete},
          {"responses", responses_.size()},
          {"active_leases", leases},
          {"responses_per_task", options_.responses_per_task}};
}

std::vector<annotation::AnnotatorResponse> AnnotationService::responses() const {
  std::lock_guard lock(mutex_);
  return responses_;
}

void AnnotationService::on_stored(
    std::function<void(const annotation::AnnotatorResponse&)> callback) {
  std::lock_guard lock(mutex_);
  on_stored_ = std::move(callback);
}

namespace {

void reply_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

std::string content_type(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  return "application/octet-stream";
}

}  // namespace

HttpService::HttpService(AnnotationService& service, std::vector<std::filesystem::path> image_roots)
    : service_(service),
      image_roots_(std::move(image_roots)),
      server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

HttpService::~HttpService() { stop(); }

void HttpService::install_routes() {
  server_->set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
  server_->Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  server_->Get("/tasks/next", [this](const httplib::Request& req, httplib::Response& res) {
    const auto worker = req.get_param_value("worker");
    if (worker.empty()) return reply_json(res, 400, {{"error", "worker query parameter is required"}});
    const auto lease = service_.next_task(worker);
    if (!lease) {
      res.status = 204;
      return;
    }
    reply_json(res, 200, {{"task", annotation::to_json(lease->task)},
                          {"lease_expires_in", lease->expires_in.count()}});
  });

  server_->Post("/responses", [this](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception& e) {
      return reply_json(res, 400, {{"error", std::string("invalid JSON: ") + e.what()}});
    }
    annotation::AnnotatorResponse response;
    try {
      response = annotation::response_from_json(body);
    } catch (const std::exception& e) {
      return reply_json(res, 422, {{"errors", {std::string(e.what())}}});
    }
    try {
      const auto status = service_.submit(response);
      if (status == AnnotationService::SubmitStatus::kStored) {
        reply_json(res, 201, {{"status", "stored"}});
      } else {
        reply_json(res, 200, {{"status", "duplicate"}});
      }
    } catch (const ValidationError& e) {
      reply_json(res, 422, {{"errors", e.diagnostics()}});
    } catch (const Error& e) {
      reply_json(res, 404, {{"error", e.what()}});
    }
  });

  server_->Get("/progress", [this](const httplib::Request&, httplib::Response& res) {
    reply_json(res, 200, service_.progress());
  });

  server_->Get(R"(/images/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
    const std::filesystem::path ref(req.matches[1].str());
    for (const auto& part : ref) {
      if (part == "..") return reply_json(res, 400, {{"error", "invalid image path"}});
    }
    for (const auto& root : image_roots_) {
      const auto path = root / ref;
      if (!std::filesystem::is_regular_file(path)) continue;
      std::ifstream in(path, std::ios::binary);
      std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      res.set_content(bytes, content_type(path));
      return;
    }
    reply_json(res, 404, {{"error", "no such image"}});
  });
}

int HttpService::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
    if (bound < 0) throw Error("cannot bind " + host);
  } else if (!server_->bind_to_port(host, port)) {
    throw Error("cannot bind " + host + ":" + std::to_string(port) + " (port in use?)");
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void HttpService::run(const std::string& host, int port) {
  if (!server_->bind_to_port(host, port)) {
    throw Error("cannot bind " + host + ":" + std::to_string(port) + " (port in use?)");
  }
  server_->listen_after_bind();
}

void HttpService::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace abstain::cli
