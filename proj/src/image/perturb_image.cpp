// Copyright 2026 The abstain Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "abstain/image/perturb_image.hpp"

#include <cctype>
#include <map>

#include "abstain/core/error.hpp"
#include "abstain/core/random.hpp"
#include "abstain/image/object_edit.hpp"

namespace abstain::image {
namespace {

std::string file_stem(std::string_view id) {
  std::string out;
  for (char c : id) {
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  }
  return out;
}

void replace_image(const VqaInstance& instance, const ImagePerturbConfig& config,
                   const ImageBackends& backends, const ConceptSet& concepts,
                   const ObjectDetection& anchor_detection, PerturbOutcome& out) {
  const auto anchor = backends.embedder.embed(instance.image_ref);
  const auto ranked = rank_candidates(anchor, backends.pool, config.top_n);
  if (ranked.empty()) throw SkipError("empty candidate pool");

  std::map<std::string, ObjectDetection> detections;
  detections.emplace(instance.image_ref, anchor_detection);
  for (const auto& c : ranked) detections.emplace(c.image_ref, backends.detector.detect(c.image_ref));

  const auto chosen =
      select_replacement(instance, ranked, detections, concepts, config.alpha, config.min_score);
  PerturbationRecord r;
  r.source_id = instance.id;
  r.kind = PerturbationKind::kImageReplace;
  r.perturbed_image_ref = chosen.image_ref;
  r.params = {
      {"alpha", config.alpha},
      {"top_n", config.top_n},
      {"min_score", config.min_score},
      {"candidate_rank", chosen.rank},
      {"similarity", ranked[chosen.rank].similarity},
      {"overlap_score", chosen.score.value},
  };
  out.records.push_back(std::move(r));
}

}  // namespace

FileImageStore::FileImageStore(std::filesystem::path input_root, std::filesystem::path output_root)
    : input_root_(std::move(input_root)), output_root_(std::move(output_root)) {}

Image FileImageStore::load(std::string_view image_ref) const {
  return read_image(input_root_ / std::filesystem::path(image_ref));
}

std::string FileImageStore::save(const Image& image, std::string_view name) {
  const auto ref = "images/" + std::string(name) + ".png";
  write_png(image, output_root_ / ref);
  return ref;
}

PerturbOutcome perturb_image(const VqaInstance& instance, const ImagePerturbConfig& config,
                             const ImageBackends& backends) {
  PerturbOutcome out;
  ConceptSet concepts;
  ObjectDetection detection;
  try {
    concepts = extract_concepts(instance.question, instance.answers, backends.tagger);
    detection = backends.detector.detect(instance.image_ref);
  } catch (const std::exception& e) {
    out.skips.push_back({instance.id, "image", e.what()});
    return out;
  }

  if (config.replace) {
    try {
      replace_image(instance, config, backends, concepts, detection, out);
    } catch (const std::exception& e) {
      out.skips.push_back({instance.id, "I1_image_replace", e.what()});
    }
  }
  if (!config.mask && !config.copy_move) return out;

  const auto relevant = relevant_objects(detection, concepts, config.min_score);
  if (relevant.empty()) {
    out.skips.push_back({instance.id, "object", "no detected object matches a concept"});
    return out;
  }

  Image pixels;
  try {
    pixels = backends.store.load(instance.image_ref);
    validate(detection, pixels.width(), pixels.height());
  } catch (const std::exception& e) {
    out.skips.push_back({instance.id, "object", e.what()});
    return out;
  }

  std::vector<BoundingBox> relevant_boxes;
  for (const auto& o : relevant) relevant_boxes.push_back(o.box);
  const auto stem = file_stem(instance.id);
  const std::size_t n = std::min(config.max_objects, relevant.size());

  for (std::size_t i = 0; i < n; ++i) {
    const auto& object = relevant[i];
    if (config.mask) {
      try {
        PerturbationRecord r;
        r.source_id = instance.id;
        r.kind = PerturbationKind::kObjectMask;
        r.perturbed_image_ref =
            backends.store.save(mask_object(pixels, object.box), stem + "_I2_" + std::to_string(i));
        r.params = {{"label", object.label},
                    {"bbox", to_json(object.box)},
                    {"min_score", config.min_score}};
        out.records.push_back(std::move(r));
      } catch (const std::exception& e) {
        out.skips.push_back({instance.id, "I2_object_mask", e.what()});
      }
    }
    if (config.copy_move) {
      try {
        const auto seed = derive_seed(config.seed, instance.id + "#" + std::to_string(i));
        auto moved = copy_move_object(pixels, object.box, relevant_boxes, seed);
        PerturbationRecord r;
        r.source_id = instance.id;
        r.kind = PerturbationKind::kCopyMove;
        r.perturbed_image_ref = backends.store.save(moved.image, stem + "_I3_" + std::to_string(i));
        r.params = {{"label", object.label},
                    {"bbox", to_json(object.box)},
                    {"source_bbox", to_json(moved.source)},
                    {"seed", seed},
                    {"filter", "bilinear"},
                    {"min_score", config.min_score}};
        out.records.push_back(std::move(r));
      } catch (const std::exception& e) {
        out.skips.push_back({instance.id, "I3_copy_move", e.what()});
      }
    }
  }
  return out;
}

}  // namespace abstain::image
