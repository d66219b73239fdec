// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>
#include <httplib.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "abstain/annotation/exchange.hpp"
#include "abstain/annotation/types.hpp"
#include "abstain/cli/commands.hpp"
#include "abstain/cli/config.hpp"
#include "abstain/cli/http_backends.hpp"
#include "abstain/cli/service.hpp"
#include "abstain/core/dataset.hpp"
#include "abstain/core/error.hpp"
#include "abstain/selective/storage.hpp"
#include "temp_dir.hpp"

using namespace abstain;
using namespace abstain::cli;
using abstain::annotation::AnnotationTask;
using abstain::annotation::AnnotatorResponse;
using abstain::testing::data_dir;
using abstain::testing::read_file;
using abstain::testing::TempDir;
using abstain::testing::write_file;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "abstain");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<json> read_jsonl(const fs::path& path) {
  std::vector<json> out;
  std::istringstream in(read_file(path));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

AnnotationTask task(std::string id) {
  AnnotationTask t;
  t.task_id = std::move(id);
  t.source_id = "s";
  t.image_ref = "bridge.png";
  t.question = "What color is the tunnel?";
  t.options = {annotation::AnswerOption{"red", annotation::OptionSource::kOriginal},
               annotation::AnswerOption{"blue", annotation::OptionSource::kBaseline},
               annotation::AnswerOption{"green", annotation::OptionSource::kRandom}};
  return t;
}

AnnotatorResponse unans(std::string task, std::string worker) {
  AnnotatorResponse r;
  r.task_id = std::move(task);
  r.worker_id = std::move(worker);
  r.answerable = false;
  r.reason = annotation::Reason::kUnclear;
  r.refusal = annotation::Refusal::kDontKnow;
  r.confidence = 4;
  return r;
}

AnnotatorResponse ans(std::string task, std::string worker) {
  AnnotatorResponse r;
  r.task_id = std::move(task);
  r.worker_id = std::move(worker);
  r.answerable = true;
  r.altered_element = annotation::AlteredElement::kImage;
  r.chosen_answer = annotation::OptionSource::kOriginal;
  r.confidence = 5;
  return r;
}

struct FakeClock {
  std::chrono::steady_clock::time_point t{};
  AnnotationService::Clock fn() {
    return [this] { return t; };
  }
};

}  // namespace

TEST_CASE("config overlay and validation") {
  RunConfig c;
  apply_json(c, json{{"epsilon", 0.3}, {"kinds", {"T2_negation"}}});
  CHECK(c.epsilon == 0.3);
  CHECK(c.kinds == std::vector<std::string>{"T2_negation"});
  CHECK(c.neighbors == 5);
  CHECK_THROWS_AS(apply_json(c, json{{"epsilonn", 1}}), Error);
  RunConfig back;
  apply_json(back, to_json(c));
  CHECK(to_json(back) == to_json(c));
}

TEST_CASE("config file paths resolve against the file") {
  TempDir dir;
  write_file(dir / "c.json", "// comment\n{\"corpus\": \"data/c.jsonl\", \"images\": \"/abs\"}\n");
  const auto c = load_config(dir / "c.json");
  CHECK(c.corpus == (dir / "data" / "c.jsonl").string());
  CHECK(c.images == "/abs");
  CHECK_THROWS_AS(load_config(dir / "missing.json"), Error);
}

TEST_CASE("environment overrides endpoints") {
  ::setenv("ABSTAIN_MODEL_ENDPOINT", "http://127.0.0.1:9/complete", 1);
  RunConfig c;
  apply_env(c);
  CHECK(c.model_endpoint == "http://127.0.0.1:9/complete");
  ::unsetenv("ABSTAIN_MODEL_ENDPOINT");
}

TEST_CASE("sha256 and output directories") {
  TempDir dir;
  write_file(dir / "abc", "abc");
  CHECK(sha256_file(dir / "abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK_NOTHROW(prepare_output_dir(dir / "fresh", false));
  CHECK(fs::is_directory(dir / "fresh"));
  CHECK_NOTHROW(prepare_output_dir(dir / "fresh", false));
  write_file(dir / "fresh" / "x", "1");
  CHECK_THROWS_WITH_AS(prepare_output_dir(dir / "fresh", false), doctest::Contains("--force"),
                       Error);
  CHECK_NOTHROW(prepare_output_dir(dir / "fresh", true));
}

TEST_CASE("endpoint parsing") {
  const auto e = parse_endpoint("http://localhost:8080/v1/score");
  CHECK(e.base == "http://localhost:8080");
  CHECK(e.path == "/v1/score");
  CHECK(parse_endpoint("http://host:1").path == "/");
  CHECK_THROWS_AS(parse_endpoint("localhost"), Error);
}

TEST_CASE("http backends talk JSON") {
  httplib::Server server;
  server.Post("/lm", [](const httplib::Request& req, httplib::Response& res) {
    const auto text = json::parse(req.body).at("text").get<std::string>();
    res.set_content(json{{"nll", static_cast<double>(text.size())}}.dump(), "application/json");
  });
  server.Post("/embed", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(json{{"vector", {3.0, 4.0}}}.dump(), "application/json");
  });
  server.Post("/detect", [](const httplib::Request& req, httplib::Response& res) {
    const auto image = json::parse(req.body).at("image").get<std::string>();
    res.set_content(
        json{{"objects", {{{"label", "cat"}, {"bbox", {1, 2, 3, 4}}, {"score", 0.9}}}}}.dump(),
        "application/json");
    (void)image;
  });
  server.Post("/model", [](const httplib::Request& req, httplib::Response& res) {
    const auto body = json::parse(req.body);
    res.set_content(json{{"text", body.at("id").get<std::string>() + ":" +
                                      body.at("image").get<std::string>()}}
                        .dump(),
                    "application/json");
  });
  server.Post("/fail", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  const auto base = "http://127.0.0.1:" + std::to_string(port);

  CHECK(HttpLmScorer(base + "/lm", 5).score("four") == 4.0);
  const auto emb = HttpEmbedder(base + "/embed", 5).embed("x.png");
  CHECK(emb.image_ref == "x.png");
  REQUIRE(emb.vector.size() == 2);
  const auto det = HttpDetector(base + "/detect", 5).detect("x.png");
  REQUIRE(det.objects.size() == 1);
  CHECK(det.objects[0].label == "cat");
  CHECK(det.objects[0].box == image::BoundingBox{1, 2, 3, 4});
  HttpModelClient model(base + "/model", 5);
  CHECK(model.complete({"q1", "prompt", "a.png"}) == "q1:a.png");
  CHECK_THROWS_AS(HttpLmScorer(base + "/fail", 5).score("x"), Error);
  CHECK_THROWS_AS(HttpLmScorer("http://127.0.0.1:1/none", 1).score("x"), Error);

  server.stop();
  th.join();
}

TEST_CASE("annotation service leases") {
  FakeClock clock;
  AnnotationService svc({task("t1"), task("t2")}, {},
                        {3, std::chrono::seconds(60), clock.fn()});
  auto a = svc.next_task("w1");
  REQUIRE(a);
  CHECK(a->task.task_id == "t1");
  CHECK(a->expires_in.count() == 60);
  clock.t += std::chrono::seconds(10);
  auto again = svc.next_task("w1");
  REQUIRE(again);
  CHECK(again->task.task_id == "t1");
  CHECK(again->expires_in.count() == 50);

  CHECK(svc.next_task("w2")->task.task_id == "t1");
  CHECK(svc.next_task("w3")->task.task_id == "t1");
  CHECK(svc.next_task("w4")->task.task_id == "t2");
  CHECK(svc.progress()["active_leases"] == 4);

  clock.t += std::chrono::seconds(51);
  CHECK(svc.progress()["active_leases"] == 3);
  clock.t += std::chrono::seconds(10);
  CHECK(svc.progress()["active_leases"] == 0);
  CHECK(svc.next_task("w5")->task.task_id == "t1");

  CHECK(svc.submit(unans("t1", "w1")) == AnnotationService::SubmitStatus::kStored);
  CHECK(svc.submit(unans("t1", "w1")) == AnnotationService::SubmitStatus::kDuplicate);
  CHECK(svc.responses().size() == 1);
  CHECK(svc.next_task("w1")->task.task_id == "t2");

  auto bad = ans("t1", "w9");
  bad.reason = annotation::Reason::kUnclear;
  CHECK_THROWS_AS(svc.submit(bad), ValidationError);
  CHECK_THROWS_AS(svc.submit(ans("nope", "w9")), Error);
}

TEST_CASE("annotation service stops at the response quota") {
  AnnotationService svc({task("t1")}, {unans("t1", "a"), unans("t1", "b")}, {3, std::chrono::seconds(60), {}});
  CHECK_FALSE(svc.next_task("a"));
  REQUIRE(svc.next_task("c"));
  CHECK_FALSE(svc.next_task("d"));
  CHECK(svc.submit(ans("t1", "c")) == AnnotationService::SubmitStatus::kStored);
  CHECK(svc.progress()["complete"] == 1);
}

TEST_CASE("http service endpoints") {
  TempDir dir;
  write_file(dir / "pic.png", "not really a png");
  AnnotationService svc({task("t1")}, {}, {3, std::chrono::seconds(60), {}});
  std::vector<AnnotatorResponse> stored;
  svc.on_stored([&](const AnnotatorResponse& r) { stored.push_back(r); });
  HttpService http(svc, {dir.path()});
  const int port = http.start("127.0.0.1", 0);
  httplib::Client client("127.0.0.1", port);

  auto res = client.Get("/tasks/next?worker=w1");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->get_header_value("Access-Control-Allow-Origin") == "*");
  const auto body = json::parse(res->body);
  CHECK(annotation::task_from_json(body["task"]) == task("t1"));
  CHECK(body["lease_expires_in"] == 60);

  CHECK(client.Get("/tasks/next")->status == 400);

  const auto post = [&](const json& j) {
    return client.Post("/responses", j.dump(), "application/json");
  };
  CHECK(post(annotation::to_json(unans("t1", "w1")))->status == 201);
  CHECK(post(annotation::to_json(unans("t1", "w1")))->status == 200);
  CHECK(stored.size() == 1);
  auto invalid = annotation::to_json(unans("t1", "w2"));
  invalid["chosen_answer"] = "original";
  res = post(invalid);
  CHECK(res->status == 422);
  CHECK(json::parse(res->body)["errors"].size() == 1);
  invalid = annotation::to_json(unans("t1", "w2"));
  invalid["confidence"] = 9;
  CHECK(post(invalid)->status == 422);
  CHECK(post(annotation::to_json(unans("zz", "w2")))->status == 404);
  CHECK(client.Post("/responses", "{oops", "application/json")->status == 400);

  res = client.Get("/progress");
  CHECK(json::parse(res->body)["responses"] == 1);

  res = client.Get("/images/pic.png");
  CHECK(res->status == 200);
  CHECK(res->body == "not really a png");
  CHECK(res->get_header_value("Content-Type") == "image/png");
  CHECK(client.Get("/images/missing.png")->status == 404);
  CHECK(client.Get("/images/../etc/passwd")->status != 200);
  CHECK(client.Options("/responses")->status == 204);

  CHECK(post(annotation::to_json(unans("t1", "w2")))->status == 201);
  CHECK(post(annotation::to_json(ans("t1", "w3")))->status == 201);
  CHECK(client.Get("/tasks/next?worker=w4")->status == 204);
  http.stop();
}

TEST_CASE("usage and fatal exit codes") {
  CHECK(invoke({}).code == kExitUsage);
  CHECK(invoke({"frobnicate"}).code == kExitUsage);
  const auto r = invoke({"split", "--out", "/nonexistent/x"});
  CHECK(r.code == kExitFatal);
  CHECK(json::parse(r.err).contains("error"));
}

TEST_CASE("perturb skips and isolates failures") {
  TempDir dir;
  const auto smoke = data_dir() / "smoke";
  SUBCASE("binary-only corpus gives no records") {
    write_file(dir / "yn.jsonl",
               R"({"id":"y","image":"door.png","question":"Is the door open?","answers":["yes"],"question_type":"is the","answer_type":"yes/no"})"
               "\n");
    const auto r = invoke({"perturb", "--config", (smoke / "config.json").string(), "--corpus",
                        (dir / "yn.jsonl").string(), "--out", (dir / "out").string()});
    REQUIRE(r.code == kExitOk);
    CHECK(read_file(dir / "out" / "records.jsonl").empty());
    const auto skips = read_jsonl(dir / "out" / "skips.jsonl");
    REQUIRE(skips.size() == 1);
    CHECK(skips[0]["stage"] == "filter");
  }
  SUBCASE("missing image skips one instance") {
    auto corpus = load_dataset(smoke / "corpus.jsonl");
    corpus[0].image_ref = "gone.png";
    save_dataset(corpus, dir / "c.jsonl");
    const auto r = invoke({"perturb", "--config", (smoke / "config.json").string(), "--corpus",
                        (dir / "c.jsonl").string(), "--out", (dir / "out").string()});
    REQUIRE(r.code == kExitOk);
    std::set<std::string> sources;
    for (const auto& rec : read_jsonl(dir / "out" / "records.jsonl")) {
      sources.insert(rec["source_id"].get<std::string>());
    }
    CHECK_FALSE(sources.contains("s1"));
    CHECK(sources.contains("s2"));
    bool input_skip = false;
    for (const auto& s : read_jsonl(dir / "out" / "skips.jsonl")) {
      input_skip |= s["source_id"] == "s1" && s["stage"] == "input";
    }
    CHECK(input_skip);
  }
}

TEST_CASE("annotation round trip through the CLI") {
  TempDir dir;
  const auto smoke = data_dir() / "smoke";
  const auto cfg = (smoke / "config.json").string();
  REQUIRE(invoke({"perturb", "--config", cfg, "--out", (dir / "p").string()}).code == kExitOk);
  const auto manifest = json::parse(read_file(dir / "p" / "manifest.json"));
  CHECK(manifest["command"] == "perturb");
  CHECK(manifest["outputs"].contains("records.jsonl"));
  CHECK(manifest["config"]["seed"] == 7);

  auto r = invoke({"perturb", "--config", cfg, "--out", (dir / "p").string()});
  CHECK(r.code == kExitFatal);
  CHECK(r.err.find("--force") != std::string::npos);
  CHECK(invoke({"perturb", "--config", cfg, "--out", (dir / "p").string(), "--force"}).code ==
        kExitOk);

  std::vector<std::string> baseline_lines;
  for (const auto& rec : read_jsonl(dir / "p" / "records.jsonl")) {
    baseline_lines.push_back(json{{"source_id", rec["source_id"]},
                                  {"kind", rec["kind"]},
                                  {"answer", "something"}}
                                 .dump());
  }
  std::string joined;
  for (const auto& l : baseline_lines) joined += l + "\n";
  write_file(dir / "baselines.jsonl", joined);

  r = invoke({"annotate", "export", "--config", cfg, "--records", (dir / "p" / "records.jsonl").string(),
           "--baselines", (dir / "baselines.jsonl").string(), "--out", (dir / "x").string()});
  REQUIRE(r.code == kExitOk);
  const auto tasks = annotation::load_tasks(dir / "x" / "tasks.jsonl");
  REQUIRE(tasks.size() == 21);
  CHECK(annotation::load_tasks_csv(dir / "x" / "tasks.csv") == tasks);

  // First task U,U,A; second A,A,U; third only two responses.
  std::vector<AnnotatorResponse> responses = {
      unans(tasks[0].task_id, "w1"), unans(tasks[0].task_id, "w2"), ans(tasks[0].task_id, "w3"),
      ans(tasks[1].task_id, "w1"),   ans(tasks[1].task_id, "w2"),   unans(tasks[1].task_id, "w3"),
      ans(tasks[2].task_id, "w1"),   ans(tasks[2].task_id, "w2")};
  annotation::export_responses(responses, dir / "responses.csv");
  r = invoke({"annotate", "ingest", "--input", (dir / "responses.csv").string(), "--out",
           (dir / "i").string()});
  REQUIRE(r.code == kExitOk);
  CHECK(json::parse(read_file(dir / "i" / "rejects.json")).empty());

  r = invoke({"annotate", "consensus", "--tasks", (dir / "x" / "tasks.jsonl").string(), "--responses",
           (dir / "i" / "responses.jsonl").string(), "--out", (dir / "c").string()});
  REQUIRE(r.code == kExitOk);
  const auto labels = read_jsonl(dir / "c" / "consensus.jsonl");
  REQUIRE(labels.size() == 2);
  CHECK(labels[0]["label"] == "unanswerable");
  CHECK(labels[0]["answer"] == "I don't know");
  CHECK(labels[1]["label"] == "answerable");
  const auto pending = read_jsonl(dir / "c" / "pending.jsonl");
  CHECK(pending.size() == 19);
  const auto analytics = json::parse(read_file(dir / "c" / "analytics.json"));
  CHECK(analytics.contains("consensus_counts"));

  r = invoke({"eval", "--items", (dir / "c" / "eval_items.jsonl").string(), "--protocol", "MC",
           "--client", "oracle", "--out", (dir / "e").string()});
  REQUIRE(r.code == kExitOk);
  const auto report = json::parse(read_file(dir / "e" / "report.json"));
  CHECK(report["breakdown"]["all"]["acc_b"] == 1.0);
  CHECK(report["breakdown"]["all"]["n"] == 2);
}

TEST_CASE("eval and report commands") {
  TempDir dir;
  const auto items = (data_dir() / "smoke" / "eval_items.jsonl").string();
  for (const char* protocol : {"BY", "MC", "OE", "OEH"}) {
    const auto out = (dir / (std::string("e_") + protocol)).string();
    const auto r = invoke({"eval", "--items", items, "--protocol", protocol, "--client", "oracle",
                        "--out", out, "--seed", "3"});
    REQUIRE(r.code == kExitOk);
    const auto rep = json::parse(read_file(fs::path(out) / "report.json"));
    CHECK(rep["breakdown"]["all"]["acc_b"] == 1.0);
    CHECK(rep["breakdown"]["all"]["oos_ratio"] == 0.0);
    const auto m = json::parse(read_file(fs::path(out) / "manifest.json"));
    CHECK(m["extra"]["client"] == "oracle");
    CHECK(m["extra"]["lexicon_version"] == 1);
  }
  auto r = invoke({"eval", "--items", items, "--client", "empty", "--out", (dir / "empty").string()});
  REQUIRE(r.code == kExitOk);
  CHECK(json::parse(read_file(dir / "empty" / "report.json"))["breakdown"]["all"]["oos_ratio"] ==
        1.0);

  r = invoke({"eval", "--items", items, "--protocol", "OE", "--client", "oracle", "--pool", items,
           "--shots-answerable", "1", "--shots-unanswerable", "2", "--out",
           (dir / "shots").string()});
  REQUIRE(r.code == kExitOk);
  for (const auto& rec : read_jsonl(dir / "shots" / "responses.jsonl")) {
    CHECK(rec["exemplars"].size() == 3);
  }

  r = invoke({"report", (dir / "e_BY").string(), (dir / "e_MC").string(), (dir / "e_OE").string(),
           (dir / "e_OEH" / "report.json").string(), "--out", (dir / "table.txt").string()});
  REQUIRE(r.code == kExitOk);
  for (const char* col : {"BY", "MC", "OE", "OEH", "100.0"}) {
    CHECK(r.out.find(col) != std::string::npos);
  }
  CHECK(read_file(dir / "table.txt") == r.out);
  CHECK(invoke({"report", (dir / "e_BY").string(), "--out", (dir / "table.txt").string()}).code ==
        kExitFatal);
}

TEST_CASE("select commands") {
  TempDir dir;
  std::vector<selective::FusedFeature> feats;
  std::map<std::string, std::optional<std::size_t>> labels;
  for (int i = 0; i < 40; ++i) {
    const auto id = "f" + std::to_string(i);
    const double x0 = (i % 2 ? 1.0 : -1.0) * (1 + (i % 5) * 0.1);
    const double x1 = i % 4 < 2 ? 1.0 : -1.0;
    feats.push_back({id, {x0, x1}});
    labels[id] = x0 > 0 ? std::optional<std::size_t>(x1 > 0 ? 1 : 0) : std::nullopt;
  }
  selective::save_features(dir / "f.bin", feats);
  selective::save_labels(dir / "l.jsonl", labels);

  auto r = invoke({"select", "fit", "--features", (dir / "f.bin").string(), "--labels",
                (dir / "l.jsonl").string(), "--variant", "CLS", "--answers", "2", "--out",
                (dir / "fit").string()});
  REQUIRE(r.code == kExitOk);
  const auto stats = json::parse(read_file(dir / "fit" / "fit.json"));
  CHECK(stats["train_acc_b"] == 1.0);

  r = invoke({"select", "calibrate", "--heads", (dir / "fit" / "heads.json").string(), "--features",
           (dir / "f.bin").string(), "--labels", (dir / "l.jsonl").string(), "--grid", "0.3",
           "--out", (dir / "cal").string()});
  REQUIRE(r.code == kExitOk);
  CHECK(json::parse(read_file(dir / "cal" / "calibration.json"))["theta"] == 0.3);

  // ENT heads with zero weights give uniform distributions, so every row abstains.
  selective::SelectiveHeads uniform;
  uniform.variant = selective::Variant::kEnt;
  uniform.classifier = selective::ClassifierHead::zeros(4, 2);
  selective::save_heads(dir / "uniform.json", uniform);
  r = invoke({"select", "infer", "--heads", (dir / "uniform.json").string(), "--features",
           (dir / "f.bin").string(), "--theta", "1.0", "--out", (dir / "inf").string()});
  REQUIRE(r.code == kExitOk);
  const auto preds = read_jsonl(dir / "inf" / "predictions.jsonl");
  CHECK(preds.size() == feats.size());
  for (const auto& p : preds) CHECK(p["abstain"] == true);
}

TEST_CASE("split command") {
  TempDir dir;
  std::vector<VqaInstance> corpus;
  for (int i = 0; i < 100; ++i) {
    VqaInstance v;
    v.id = "q" + std::to_string(i);
    v.image_ref = "i.png";
    v.question = "What is it?";
    v.answers = {"cup"};
    corpus.push_back(v);
  }
  save_dataset(corpus, dir / "c.jsonl");
  const auto r = invoke({"split", "--corpus", (dir / "c.jsonl").string(), "--ratios", "0.7", "0.1",
                      "0.2", "--out", (dir / "s").string()});
  REQUIRE(r.code == kExitOk);
  const auto split = json::parse(read_file(dir / "s" / "split.json"));
  CHECK(split["train"].size() == 70);
  CHECK(split["valid"].size() == 10);
  CHECK(split["test"].size() == 20);
}
