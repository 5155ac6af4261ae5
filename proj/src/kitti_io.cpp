// Copyright (C) 2026 The fuzzy-nms authors
// SPDX-License-Identifier: Apache-2.0

#include "fnms/kitti_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fnms::kitti {
namespace {

const char* kFieldNames[16] = {
    "type", "truncated", "occluded", "alpha", "bbox_left", "bbox_top",
    "bbox_right", "bbox_bottom", "h", "w", "l", "x", "y", "z", "rotation_y",
    "score"};

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' ||
                               line[i] == '\r')) {
      ++i;
    }
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' &&
           line[j] != '\r') {
      ++j;
    }
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view token, int line_number, int field) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError("line " + std::to_string(line_number) + ": field " +
                     std::to_string(field + 1) + " (" + kFieldNames[field] +
                     "): not a number: '" + std::string(token) + "'");
  }
  return value;
}

bool is_dont_care(const KittiRecord& r) { return r.type == "DontCare"; }

void append_formatted(std::string& out, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), " %.8f", value);
  out += buf;
}

}  // namespace

std::optional<int> CategoryMap::id_of(std::string_view type) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == type) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::string CategoryMap::name_of(int label) const {
  if (label >= 0 && label < static_cast<int>(names.size())) {
    return names[static_cast<std::size_t>(label)];
  }
  return "Unknown_" + std::to_string(label);
}

KittiRecord parse_line(std::string_view line, int line_number,
                       bool expect_score) {
  const auto tokens = split_ws(line);
  const std::size_t expected = expect_score ? 16 : 15;
  if (tokens.size() != expected) {
    throw ParseError("line " + std::to_string(line_number) + ": expected " +
                     std::to_string(expected) + " fields (" +
                     (expect_score ? "detection" : "label") + "), got " +
                     std::to_string(tokens.size()));
  }
  KittiRecord r;
  r.type = std::string(tokens[0]);
  r.truncated = parse_double(tokens[1], line_number, 1);
  r.occluded = static_cast<int>(parse_double(tokens[2], line_number, 2));
  r.alpha = parse_double(tokens[3], line_number, 3);
  for (int k = 0; k < 4; ++k) {
    r.bbox[k] = parse_double(tokens[4 + k], line_number, 4 + k);
  }
  r.h = parse_double(tokens[8], line_number, 8);
  r.w = parse_double(tokens[9], line_number, 9);
  r.l = parse_double(tokens[10], line_number, 10);
  r.x = parse_double(tokens[11], line_number, 11);
  r.y = parse_double(tokens[12], line_number, 12);
  r.z = parse_double(tokens[13], line_number, 13);
  r.rotation_y = parse_double(tokens[14], line_number, 14);
  if (expect_score) r.score = parse_double(tokens[15], line_number, 15);
  return r;
}

std::string format_line(const KittiRecord& record) {
  std::string out = record.type;
  append_formatted(out, record.truncated);
  char buf[32];
  std::snprintf(buf, sizeof(buf), " %d", record.occluded);
  out += buf;
  append_formatted(out, record.alpha);
  for (double v : record.bbox) append_formatted(out, v);
  append_formatted(out, record.h);
  append_formatted(out, record.w);
  append_formatted(out, record.l);
  append_formatted(out, record.x);
  append_formatted(out, record.y);
  append_formatted(out, record.z);
  append_formatted(out, record.rotation_y);
  if (record.score.has_value()) append_formatted(out, *record.score);
  return out;
}

Box3D box_from_record(const KittiRecord& record, int label) {
  Box3D box;
  box.cx = record.x;
  box.cy = record.y - 0.5 * record.h;
  box.cz = record.z;
  box.dx = record.l;
  box.dy = record.w;
  box.dz = record.h;
  box.yaw = normalize_angle(record.rotation_y);
  box.label = label;
  box.score = record.score.value_or(0.0);
  return box;
}

KittiRecord record_from_box(const Box3D& box, const std::string& type,
                            const KittiRecord* base) {
  KittiRecord r;
  if (base != nullptr) {
    r = *base;
  } else {
    r.alpha = normalize_angle(box.yaw - std::atan2(box.cx, box.cz));
  }
  r.type = type;
  r.h = box.dz;
  r.w = box.dy;
  r.l = box.dx;
  r.x = box.cx;
  r.y = box.cy + 0.5 * box.dz;
  r.z = box.cz;
  r.rotation_y = box.yaw;
  r.score = box.score;
  return r;
}

ParsedFrame parse_frame(std::string frame_id,
                        std::optional<std::string_view> label_text,
                        std::string_view detection_text,
                        const CategoryMap& categories,
                        UnknownCategoryPolicy policy) {
  ParsedFrame out;
  out.frame.frame_id = std::move(frame_id);

  const auto consume = [&](std::string_view text, bool expect_score) {
    std::vector<KittiRecord> records;
    int line_number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t eol = text.find('\n', pos);
      const std::string_view line =
          text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                         : eol - pos);
      ++line_number;
      if (!split_ws(line).empty()) {
        records.push_back(parse_line(line, line_number, expect_score));
      }
      if (eol == std::string_view::npos) break;
      pos = eol + 1;
    }
    return records;
  };

  const auto validate_dims = [](const KittiRecord& r, int line) {
    if (r.h <= 0.0 || r.w <= 0.0 || r.l <= 0.0) {
      throw ParseError("record " + std::to_string(line) + " (" + r.type +
                       "): non-positive dimensions");
    }
  };

  int det_line = 0;
  for (const KittiRecord& r : consume(detection_text, true)) {
    ++det_line;
    if (is_dont_care(r)) {
      out.dont_care_records.push_back(r);
      continue;
    }
    const auto label = categories.id_of(r.type);
    if (!label.has_value()) {
      if (policy == UnknownCategoryPolicy::kError) {
        throw ParseError("record " + std::to_string(det_line) +
                         ": unknown category '" + r.type + "'");
      }
      ++out.skipped_unknown;
      continue;
    }
    validate_dims(r, det_line);
    if (*r.score < 0.0 || *r.score > 1.0) {
      throw ParseError("record " + std::to_string(det_line) +
                       ": score outside [0, 1]");
    }
    out.frame.boxes.push_back(box_from_record(r, *label));
    out.detection_records.push_back(r);
  }

  if (label_text.has_value()) {
    out.frame.ground_truth.emplace();
    int gt_line = 0;
    for (const KittiRecord& r : consume(*label_text, false)) {
      ++gt_line;
      if (is_dont_care(r)) {
        out.dont_care_records.push_back(r);
        if (r.h > 0.0 && r.w > 0.0 && r.l > 0.0) {
          out.frame.dont_care.push_back(box_from_record(r, 0));
        }
        continue;
      }
      const auto label = categories.id_of(r.type);
      if (!label.has_value()) {
        if (policy == UnknownCategoryPolicy::kError) {
          throw ParseError("record " + std::to_string(gt_line) +
                           ": unknown category '" + r.type + "'");
        }
        ++out.skipped_unknown;
        continue;
      }
      validate_dims(r, gt_line);
      out.frame.ground_truth->push_back(box_from_record(r, *label));
      out.gt_records.push_back(r);
    }
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot read file: " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path,
                     std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ParseError("cannot write file: " + path.string());
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) {
    throw ParseError("write failed: " + path.string());
  }
}

std::string format_detections(std::span<const Box3D> boxes,
                              std::span<const int> kept_indices,
                              const CategoryMap& categories,
                              std::span<const KittiRecord> source_records) {
  std::string out;
  for (int idx : kept_indices) {
    const Box3D& box = boxes[idx];
    const KittiRecord* base =
        idx < static_cast<int>(source_records.size()) ? &source_records[idx]
                                                      : nullptr;
    out += format_line(
        record_from_box(box, categories.name_of(box.label), base));
    out += '\n';
  }
  return out;
}

}  // namespace fnms::kitti
