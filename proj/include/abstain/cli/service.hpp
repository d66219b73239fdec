// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "abstain/annotation/types.hpp"

namespace httplib {
class Server;
}

namespace abstain::cli {

/// Task leasing and response collection behind the labeling UI. Each task
/// is handed to `responses_per_task` distinct workers. A lease reserves one
/// of those slots for `lease` and lapses back to the pool afterwards.
class AnnotationService {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;

  struct Options {
    int responses_per_task = 3;
    std::chrono::seconds lease{600};
    Clock clock;  // steady_clock::now when empty
  };

  AnnotationService(std::vector<annotation::AnnotationTask> tasks,
                    std::vector<annotation::AnnotatorResponse> existing, Options options);

  struct Lease {
    annotation::AnnotationTask task;
    std::chrono::seconds expires_in{0};
  };

  /// The worker's current lease if it has one, else the first task that
  /// still has a free slot and that the worker has not answered.
  std::optional<Lease> next_task(const std::string& worker);

  enum class SubmitStatus { kStored, kDuplicate };

  /// Throws ValidationError for invalid payloads and abstain::Error for an
  /// unknown task id. A second response from the same worker for the same
  /// task is acknowledged and dropped.
  SubmitStatus submit(const annotation::AnnotatorResponse& response);

  nlohmann::json progress() const;
  std::vector<annotation::AnnotatorResponse> responses() const;

  /// Called under the service lock for every stored response.
  void on_stored(std::function<void(const annotation::AnnotatorResponse&)> callback);

 private:
  struct TaskState {
    annotation::AnnotationTask task;
    std::set<std::string> answered_by;
    std::map<std::string, std::chrono::steady_clock::time_point> leases;  // worker -> expiry
  };

  std::chrono::steady_clock::time_point now() const;
  void expire(TaskState& state, std::chrono::steady_clock::time_point at);

  mutable std::mutex mutex_;
  Options options_;
  std::vector<TaskState> tasks_;
  std::map<std::string, std::size_t> index_;
  std::vector<annotation::AnnotatorResponse> responses_;
  std::function<void(const annotation::AnnotatorResponse&)> on_stored_;
};

/// HTTP binding:
///   GET  /tasks/next?worker=ID   200 {"task", "lease_expires_in"} | 204
///   POST /responses              201 stored | 200 duplicate | 422 invalid | 404 unknown task
///   GET  /progress
///   GET  /images/<ref>           files under the image roots
/// All replies carry permissive CORS headers.
class HttpService {
 public:
  HttpService(AnnotationService& service, std::vector<std::filesystem::path> image_roots);
  ~HttpService();

  /// Binds (port 0 picks a free one) and serves on a background thread.
  /// Throws abstain::Error when the port cannot be bound.
  int start(const std::string& host, int port);
  /// Binds and serves on the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();

 private:
  void install_routes();

  AnnotationService& service_;
  std::vector<std::filesystem::path> image_roots_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace abstain::cli
