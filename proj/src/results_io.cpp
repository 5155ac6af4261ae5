// Copyright (C) 2026 The fuzzy-nms authors
// SPDX-License-Identifier: Apache-2.0

#include "fnms/results_io.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

namespace fnms::kitti {
namespace {

using json = nlohmann::ordered_json;

enum class BoxStatus { kKept, kSuppressed, kScoreFiltered };

struct BoxOutcome {
  BoxStatus status = BoxStatus::kKept;
  int suppressor = -1;
  double final_score = 0.0;
};

std::vector<BoxOutcome> outcomes(const Frame& frame,
                                 const nms::NmsResult& result) {
  std::vector<BoxOutcome> out(frame.boxes.size());
  for (std::size_t i = 0; i < frame.boxes.size(); ++i) {
    out[i].final_score = frame.boxes[i].score;
  }
  for (const auto& kept : result.kept) {
    out[kept.index].status = BoxStatus::kKept;
    out[kept.index].final_score = kept.score;
  }
  for (const auto& sup : result.suppressed) {
    out[sup.index].status = BoxStatus::kSuppressed;
    out[sup.index].suppressor = sup.suppressor;
  }
  for (int idx : result.score_filtered) {
    out[idx].status = BoxStatus::kScoreFiltered;
  }
  return out;
}

const char* status_name(BoxStatus s) {
  switch (s) {
    case BoxStatus::kKept:
      return "kept";
    case BoxStatus::kSuppressed:
      return "suppressed";
    case BoxStatus::kScoreFiltered:
      return "score_filtered";
  }
  return "?";
}

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.8f", v);
  return buf;
}

}  // namespace

const char* kResultsCsvHeader =
    "frame,box_index,type,score,cx,cy,cz,dx,dy,dz,yaw,cluster_id,density,"
    "volume,v_o,category,status,suppressor,final_score";

std::optional<OutputFormat> output_format_from_string(const std::string& name) {
  if (name == "kitti") return OutputFormat::kKitti;
  if (name == "json") return OutputFormat::kJson;
  if (name == "csv") return OutputFormat::kCsv;
  return std::nullopt;
}

const char* to_string(OutputFormat format) {
  switch (format) {
    case OutputFormat::kKitti:
      return "kitti";
    case OutputFormat::kJson:
      return "json";
    case OutputFormat::kCsv:
      return "csv";
  }
  return "?";
}

std::string frame_to_kitti(const ParsedFrame& parsed,
                           const nms::NmsResult& result,
                           const CategoryMap& categories) {
  std::vector<int> kept;
  kept.reserve(result.kept.size());
  for (const auto& k : result.kept) kept.push_back(k.index);
  return format_detections(parsed.frame.boxes, kept, categories,
                           parsed.detection_records);
}

std::string frame_to_csv(const ParsedFrame& parsed,
                         const nms::PipelineResult& run,
                         const CategoryMap& categories) {
  const auto outcome = outcomes(parsed.frame, run.result);
  const auto& diag = run.diagnostics;
  std::string out;
  for (std::size_t i = 0; i < parsed.frame.boxes.size(); ++i) {
    const Box3D& box = parsed.frame.boxes[i];
    const bool has_diag = i < diag.density.size();
    out += parsed.frame.frame_id;
    out += ',' + std::to_string(i);
    out += ',' + categories.name_of(box.label);
    out += ',' + fmt(box.score);
    out += ',' + fmt(box.cx) + ',' + fmt(box.cy) + ',' + fmt(box.cz);
    out += ',' + fmt(box.dx) + ',' + fmt(box.dy) + ',' + fmt(box.dz);
    out += ',' + fmt(box.yaw);
    if (has_diag && diag.cluster_id[i] >= 0) {
      out += ',' + std::to_string(diag.cluster_id[i]);
      out += ',' + fmt(diag.density[i]);
      out += ',' + fmt(diag.volume[i]);
      out += ',' + fmt(diag.category[i].v_o);
      out += ',';
      out += fuzzy::to_string(diag.category[i].cls);
    } else {
      out += ",,,,,";
    }
    out += ',';
    out += status_name(outcome[i].status);
    out += ',';
    if (outcome[i].suppressor >= 0) out += std::to_string(outcome[i].suppressor);
    out += ',' + fmt(outcome[i].final_score);
    out += '\n';
  }
  return out;
}

std::string frame_to_json(const ParsedFrame& parsed,
                          const nms::PipelineResult& run,
                          const CategoryMap& categories) {
  const auto outcome = outcomes(parsed.frame, run.result);
  const auto& diag = run.diagnostics;
  json j;
  j["frame_id"] = parsed.frame.frame_id;
  j["counts"] = {{"input", parsed.frame.boxes.size()},
                 {"kept", run.result.kept.size()},
                 {"suppressed", run.result.suppressed.size()},
                 {"score_filtered", run.result.score_filtered.size()}};
  j["boxes"] = json::array();
  for (std::size_t i = 0; i < parsed.frame.boxes.size(); ++i) {
    const Box3D& box = parsed.frame.boxes[i];
    json b;
    b["index"] = i;
    b["type"] = categories.name_of(box.label);
    b["score"] = box.score;
    b["center"] = {box.cx, box.cy, box.cz};
    b["size"] = {box.dx, box.dy, box.dz};
    b["yaw"] = box.yaw;
    if (i < diag.density.size() && diag.cluster_id[i] >= 0) {
      b["cluster_id"] = diag.cluster_id[i];
      b["density"] = diag.density[i];
      b["volume"] = diag.volume[i];
      b["v_o"] = diag.category[i].v_o;
      b["category"] = fuzzy::to_string(diag.category[i].cls);
    }
    b["status"] = status_name(outcome[i].status);
    if (outcome[i].suppressor >= 0) b["suppressor"] = outcome[i].suppressor;
    b["final_score"] = outcome[i].final_score;
    j["boxes"].push_back(std::move(b));
  }
  return j.dump(2);
}

void write_frame_results(const std::filesystem::path& dir,
                         const ParsedFrame& parsed,
                         const nms::PipelineResult& run, OutputFormat format,
                         const CategoryMap& categories) {
  switch (format) {
    case OutputFormat::kKitti:
      write_text_file(dir / (parsed.frame.frame_id + ".txt"),
                      frame_to_kitti(parsed, run.result, categories));
      break;
    case OutputFormat::kJson:
      write_text_file(dir / (parsed.frame.frame_id + ".json"),
                      frame_to_json(parsed, run, categories));
      break;
    case OutputFormat::kCsv: {
      std::string content = kResultsCsvHeader;
      content += '\n';
      content += frame_to_csv(parsed, run, categories);
      write_text_file(dir / (parsed.frame.frame_id + ".csv"), content);
      break;
    }
  }
}

}  // namespace fnms::kitti
