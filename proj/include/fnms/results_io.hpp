// Copyright (C) 2026 The fuzzy-nms authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "fnms/kitti_io.hpp"
#include "fnms/nms.hpp"

namespace fnms::kitti {

enum class OutputFormat { kKitti, kJson, kCsv };

std::optional<OutputFormat> output_format_from_string(const std::string& name);
const char* to_string(OutputFormat format);

// kitti mode: 16-field detection lines for the kept boxes (the inverse of
// the parse lifting; numeric fields round-trip within 1e-6).
std::string frame_to_kitti(const ParsedFrame& parsed,
                           const nms::NmsResult& result,
                           const CategoryMap& categories);

// One CSV row per box with the fuzzy diagnostics (density, volume, v_o,
// category) and the suppression provenance.
extern const char* kResultsCsvHeader;
std::string frame_to_csv(const ParsedFrame& parsed,
                         const nms::PipelineResult& run,
                         const CategoryMap& categories);

// JSON object for one frame (same content as the CSV rows).
std::string frame_to_json(const ParsedFrame& parsed,
                          const nms::PipelineResult& run,
                          const CategoryMap& categories);

// Writes one frame's results under `dir` ("<frame_id>.txt" for kitti,
// "<frame_id>.json" / "<frame_id>.csv" otherwise).
void write_frame_results(const std::filesystem::path& dir,
                         const ParsedFrame& parsed,
                         const nms::PipelineResult& run,
                         OutputFormat format, const CategoryMap& categories);

}  // namespace fnms::kitti
