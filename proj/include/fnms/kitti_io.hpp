// Copyright (C) 2026 The fuzzy-nms authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fnms/box.hpp"

namespace fnms::kitti {

// One KITTI object line. Labels carry 15 fields, detections 16 (score).
struct KittiRecord {
  std::string type;
  double truncated = 0.0;
  int occluded = 0;
  double alpha = 0.0;
  std::array<double, 4> bbox{};  // left, top, right, bottom (pixels)
  double h = 0.0;                // height, meters
  double w = 0.0;                // width, meters
  double l = 0.0;                // length, meters
  double x = 0.0;                // camera coordinates, bottom center
  double y = 0.0;
  double z = 0.0;
  double rotation_y = 0.0;
  std::optional<double> score;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class UnknownCategoryPolicy { kSkip, kError };

// Maps KITTI type strings to label ids (position in the list).
struct CategoryMap {
  std::vector<std::string> names = {"Car", "Pedestrian", "Cyclist"};
  std::optional<int> id_of(std::string_view type) const;
  std::string name_of(int label) const;
};

// Parses one whitespace-separated line. `expect_score` selects the required
// field count (16 vs 15). Throws ParseError naming the line and field.
KittiRecord parse_line(std::string_view line, int line_number,
                       bool expect_score);

// 15- or 16-field line, floats with 8 decimals, no trailing newline.
std::string format_line(const KittiRecord& record);

// KITTI stores the bottom-center in camera coordinates; the toolkit works
// with geometric centers: (cx, cy, cz) = (x, y - h/2, z), (dx, dy, dz) =
// (l, w, h), yaw = rotation_y.
Box3D box_from_record(const KittiRecord& record, int label);

// Inverse lifting. Fields Box3D cannot carry (bbox, truncation, occlusion,
// alpha) come from `base` when given, otherwise zeros and an alpha derived
// from yaw and viewing direction.
KittiRecord record_from_box(const Box3D& box, const std::string& type,
                            const KittiRecord* base = nullptr);

struct ParsedFrame {
  Frame frame;
  std::vector<KittiRecord> detection_records;  // aligned with frame.boxes
  std::vector<KittiRecord> gt_records;  // aligned with frame.ground_truth
  std::vector<KittiRecord> dont_care_records;
  int skipped_unknown = 0;
};

// Builds a Frame from KITTI text. label_text == nullopt means "no label
// file" (ground_truth stays empty); an empty string is an empty label file.
// DontCare records never become candidate boxes; the ones with valid
// extents are kept as masking regions.
ParsedFrame parse_frame(std::string frame_id,
                        std::optional<std::string_view> label_text,
                        std::string_view detection_text,
                        const CategoryMap& categories,
                        UnknownCategoryPolicy policy =
                            UnknownCategoryPolicy::kSkip);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     std::string_view content);

// Kept-box indices of one frame as KITTI detection lines.
std::string format_detections(std::span<const Box3D> boxes,
                              std::span<const int> kept_indices,
                              const CategoryMap& categories,
                              std::span<const KittiRecord> source_records = {});

}  // namespace fnms::kitti
