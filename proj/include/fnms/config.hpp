// Copyright (C) 2026 The fuzzy-nms authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "fnms/clustering.hpp"
#include "fnms/eval.hpp"
#include "fnms/fuzzy.hpp"
#include "fnms/kitti_io.hpp"
#include "fnms/nms.hpp"

namespace fnms::config {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Everything the toolkit needs for one run. The shipped defaults are the
// membership functions, rule table, suppression thresholds and DBSCAN
// parameters the fuzzy classifier was tuned with; a config file overrides
// any subset of them.
struct ToolkitConfig {
  int version = 1;
  kitti::CategoryMap categories;
  kitti::UnknownCategoryPolicy unknown_category =
      kitti::UnknownCategoryPolicy::kSkip;
  cluster::DbscanParams dbscan;
  fuzzy::FuzzySystemConfig fuzzy = default_fuzzy_config();
  nms::NmsConfig nms;
  eval::EvalSpec eval;

  static fuzzy::FuzzySystemConfig default_fuzzy_config();
};

// The shipped default configuration.
ToolkitConfig default_config();

// Parses a JSON config. Missing sections keep their defaults; unknown keys
// and invalid values raise ConfigError with a description.
ToolkitConfig config_from_json_text(const std::string& text);
ToolkitConfig load_config(const std::filesystem::path& path);

// Canonical JSON serialization (stable key order, full precision).
std::string to_json_text(const ToolkitConfig& cfg);

// FNV-1a hash of the canonical serialization, as 16 hex digits.
std::string config_hash(const ToolkitConfig& cfg);

}  // namespace fnms::config
