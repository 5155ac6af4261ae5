// Copyright (C) 2026 The fuzzy-nms authors
// SPDX-License-Identifier: Apache-2.0

#include "fnms/config.hpp"

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fnms::config {
namespace {

using json = nlohmann::json;

const char* kClassNames[3] = {"LD", "SVHD", "LVHD"};

void require_keys(const json& j, const std::set<std::string>& allowed,
                  const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

double get_number(const json& j, const std::string& key, double fallback,
                  const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) {
    throw ConfigError(where + "." + key + ": expected a number");
  }
  return j[key].get<double>();
}

fuzzy::FuzzyVariable variable_from_json(const json& j,
                                        const fuzzy::FuzzyVariable& fallback,
                                        const std::string& where) {
  require_keys(j, {"domain", "sets"}, where);
  fuzzy::FuzzyVariable var = fallback;
  if (j.contains("domain")) {
    const auto& dom = j["domain"];
    if (!dom.is_array() || dom.size() != 2) {
      throw ConfigError(where + ".domain: expected [lo, hi]");
    }
    var.lo = dom[0].get<double>();
    var.hi = dom[1].get<double>();
  }
  if (j.contains("sets")) {
    const auto& sets = j["sets"];
    if (!sets.is_array()) {
      throw ConfigError(where + ".sets: expected an array");
    }
    var.sets.clear();
    for (const auto& s : sets) {
      require_keys(s, {"name", "mf"}, where + ".sets[]");
      if (!s.contains("name") || !s.contains("mf") || !s["mf"].is_array() ||
          s["mf"].size() != 3) {
        throw ConfigError(where + ".sets[]: expected {name, mf: [a, b, c]}");
      }
      fuzzy::FuzzySet set;
      set.name = s["name"].get<std::string>();
      set.mf = {s["mf"][0].get<double>(), s["mf"][1].get<double>(),
                s["mf"][2].get<double>()};
      if (set.mf.a > set.mf.b) {
        throw ConfigError(where + ".sets[" + set.name +
                          "]: invalid MF ordering (a > b)");
      }
      if (set.mf.b > set.mf.c) {
        throw ConfigError(where + ".sets[" + set.name +
                          "]: invalid MF ordering (b > c)");
      }
      var.sets.push_back(std::move(set));
    }
  }
  return var;
}

int set_index(const fuzzy::FuzzyVariable& var, const std::string& name,
              const std::string& where) {
  for (int i = 0; i < static_cast<int>(var.sets.size()); ++i) {
    if (var.sets[i].name == name) return i;
  }
  throw ConfigError(where + ": unknown set '" + name + "' for variable '" +
                    var.name + "'");
}

json variable_to_json(const fuzzy::FuzzyVariable& var) {
  json sets = json::array();
  for (const auto& s : var.sets) {
    sets.push_back({{"name", s.name}, {"mf", {s.mf.a, s.mf.b, s.mf.c}}});
  }
  return {{"domain", {var.lo, var.hi}}, {"sets", sets}};
}

std::array<double, 3> thresholds_from_json(const json& j,
                                           std::array<double, 3> fallback,
                                           const std::string& where) {
  require_keys(j, {"LD", "SVHD", "LVHD"}, where);
  std::array<double, 3> out = fallback;
  for (int c = 0; c < 3; ++c) {
    out[c] = get_number(j, kClassNames[c], fallback[c], where);
    if (out[c] < 0.0 || out[c] > 1.0) {
      throw ConfigError(where + "." + kClassNames[c] +
                        ": threshold outside [0, 1]");
    }
  }
  return out;
}

}  // namespace

fuzzy::FuzzySystemConfig ToolkitConfig::default_fuzzy_config() {
  fuzzy::FuzzySystemConfig cfg;
  cfg.density.name = "density";
  cfg.density.lo = 0.0;
  cfg.density.hi = 1.0;
  cfg.density.sets = {{"ZE", {0.0, 0.0, 0.1}},
                      {"PS", {0.1, 0.2, 0.5}},
                      {"PM", {0.4, 0.8, 0.9}},
                      {"PB", {0.9, 1.0, 1.0}}};
  cfg.volume.name = "volume";
  cfg.volume.lo = 0.0;
  cfg.volume.hi = 35.0;
  cfg.volume.sets = {{"ZE", {0.0, 0.0, 3.0}},
                     {"PS", {2.0, 5.0, 10.0}},
                     {"PM", {9.0, 12.0, 20.0}},
                     {"PB", {17.0, 20.0, 35.0}}};
  cfg.output.name = "class";
  cfg.output.lo = 0.0;
  cfg.output.hi = 1.0;
  cfg.output.sets = {{"S", {0.0, 0.25, 0.35}},
                     {"M", {0.34, 0.5, 0.65}},
                     {"B", {0.64, 0.85, 1.0}}};
  // Row per density set; S -> LD, M -> SVHD, B -> LVHD.
  // ZE row: everything is low density.
  cfg.rules = {
      {0, 0, 0}, {0, 1, 0}, {0, 2, 0}, {0, 3, 0},  // ZE: S S S S
      {1, 0, 0}, {1, 1, 1}, {1, 2, 2}, {1, 3, 2},  // PS: S M B B
      {2, 0, 1}, {2, 1, 1}, {2, 2, 2}, {2, 3, 2},  // PM: M M B B
      {3, 0, 1}, {3, 1, 2}, {3, 2, 2}, {3, 3, 2},  // PB: M B B B
  };
  cfg.resolution = 1001;
  return cfg;
}

ToolkitConfig default_config() { return ToolkitConfig{}; }

ToolkitConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text.empty() ? "{}" : text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");
  require_keys(j,
               {"version", "labels", "unknown_category", "iou_mode", "dbscan",
                "fuzzy", "nms", "eval"},
               "config");

  ToolkitConfig cfg;
  if (j.contains("version")) {
    if (!j["version"].is_number_integer() || j["version"].get<int>() != 1) {
      throw ConfigError("unsupported config version (expected 1)");
    }
  }
  if (j.contains("labels")) {
    if (!j["labels"].is_array() || j["labels"].empty()) {
      throw ConfigError("labels: expected a non-empty array of class names");
    }
    cfg.categories.names.clear();
    for (const auto& name : j["labels"]) {
      cfg.categories.names.push_back(name.get<std::string>());
    }
    std::set<std::string> unique(cfg.categories.names.begin(),
                                 cfg.categories.names.end());
    if (unique.size() != cfg.categories.names.size()) {
      throw ConfigError("labels: duplicate class name");
    }
  }
  if (j.contains("unknown_category")) {
    const std::string policy = j["unknown_category"].get<std::string>();
    if (policy == "skip") {
      cfg.unknown_category = kitti::UnknownCategoryPolicy::kSkip;
    } else if (policy == "error") {
      cfg.unknown_category = kitti::UnknownCategoryPolicy::kError;
    } else {
      throw ConfigError("unknown_category: expected 'skip' or 'error'");
    }
  }
  if (j.contains("iou_mode")) {
    const auto mode = iou_mode_from_string(j["iou_mode"].get<std::string>());
    if (!mode.has_value()) {
      throw ConfigError("iou_mode: expected 'bev' or '3d'");
    }
    cfg.nms.iou_mode = *mode;
    cfg.eval.iou_mode = *mode;
  }
  if (j.contains("dbscan")) {
    const auto& d = j["dbscan"];
    require_keys(d, {"eps", "min_pts"}, "dbscan");
    cfg.dbscan.eps = get_number(d, "eps", cfg.dbscan.eps, "dbscan");
    if (d.contains("min_pts")) cfg.dbscan.min_pts = d["min_pts"].get<int>();
    if (!(cfg.dbscan.eps > 0.0)) throw ConfigError("dbscan.eps must be > 0");
    if (cfg.dbscan.min_pts < 1) throw ConfigError("dbscan.min_pts must be >= 1");
  }
  if (j.contains("fuzzy")) {
    const auto& f = j["fuzzy"];
    require_keys(f, {"resolution", "density", "volume", "class", "rules"},
                 "fuzzy");
    if (f.contains("resolution")) {
      cfg.fuzzy.resolution = f["resolution"].get<int>();
    }
    if (f.contains("density")) {
      cfg.fuzzy.density =
          variable_from_json(f["density"], cfg.fuzzy.density, "fuzzy.density");
    }
    if (f.contains("volume")) {
      cfg.fuzzy.volume =
          variable_from_json(f["volume"], cfg.fuzzy.volume, "fuzzy.volume");
    }
    if (f.contains("class")) {
      cfg.fuzzy.output =
          variable_from_json(f["class"], cfg.fuzzy.output, "fuzzy.class");
    }
    if (f.contains("rules")) {
      if (!f["rules"].is_array()) {
        throw ConfigError("fuzzy.rules: expected an array");
      }
      cfg.fuzzy.rules.clear();
      for (const auto& r : f["rules"]) {
        require_keys(r, {"density", "volume", "class"}, "fuzzy.rules[]");
        if (!r.contains("density") || !r.contains("volume") ||
            !r.contains("class")) {
          throw ConfigError("fuzzy.rules[]: expected {density, volume, class}");
        }
        fuzzy::Rule rule;
        rule.density_set = set_index(
            cfg.fuzzy.density, r["density"].get<std::string>(), "fuzzy.rules");
        rule.volume_set = set_index(
            cfg.fuzzy.volume, r["volume"].get<std::string>(), "fuzzy.rules");
        rule.output_set = set_index(
            cfg.fuzzy.output, r["class"].get<std::string>(), "fuzzy.rules");
        cfg.fuzzy.rules.push_back(rule);
      }
    }
  }
  if (j.contains("nms")) {
    const auto& n = j["nms"];
    require_keys(n,
                 {"iou_threshold", "score_threshold", "pre_filter_score",
                  "per_label"},
                 "nms");
    if (n.contains("iou_threshold")) {
      cfg.nms.iou_threshold = thresholds_from_json(
          n["iou_threshold"], cfg.nms.iou_threshold, "nms.iou_threshold");
    }
    if (n.contains("score_threshold")) {
      cfg.nms.score_threshold = thresholds_from_json(
          n["score_threshold"], cfg.nms.score_threshold, "nms.score_threshold");
    }
    if (n.contains("pre_filter_score") && !n["pre_filter_score"].is_null()) {
      const double cutoff = n["pre_filter_score"].get<double>();
      if (cutoff < 0.0 || cutoff > 1.0) {
        throw ConfigError("nms.pre_filter_score: outside [0, 1]");
      }
      cfg.nms.pre_filter_score = cutoff;
    }
    if (n.contains("per_label")) cfg.nms.per_label = n["per_label"].get<bool>();
  }
  if (j.contains("eval")) {
    const auto& e = j["eval"];
    require_keys(e,
                 {"iou_thresholds", "default_iou_threshold", "min_height",
                  "max_occlusion", "max_truncation", "recall_points"},
                 "eval");
    if (e.contains("iou_thresholds")) {
      cfg.eval.iou_thresholds.clear();
      for (const auto& [cls, value] : e["iou_thresholds"].items()) {
        cfg.eval.iou_thresholds[cls] = value.get<double>();
      }
    }
    cfg.eval.default_iou_threshold =
        get_number(e, "default_iou_threshold", cfg.eval.default_iou_threshold,
                   "eval");
    if (e.contains("recall_points")) {
      cfg.eval.recall_points = e["recall_points"].get<int>();
      if (cfg.eval.recall_points < 1) {
        throw ConfigError("eval.recall_points must be >= 1");
      }
    }
    const auto load_triplet = [&](const char* key, auto& target) {
      if (!e.contains(key)) return;
      if (!e[key].is_array() || e[key].size() != 3) {
        throw ConfigError(std::string("eval.") + key + ": expected 3 values");
      }
      for (int i = 0; i < 3; ++i) {
        target[i] = e[key][i].get<
            typename std::remove_reference_t<decltype(target)>::value_type>();
      }
    };
    load_triplet("min_height", cfg.eval.min_height);
    load_triplet("max_occlusion", cfg.eval.max_occlusion);
    load_triplet("max_truncation", cfg.eval.max_truncation);
  }

  if (cfg.eval.default_iou_threshold <= 0.0 ||
      cfg.eval.default_iou_threshold > 1.0) {
    throw ConfigError("eval.default_iou_threshold: outside (0, 1]");
  }
  for (const auto& [cls, thr] : cfg.eval.iou_thresholds) {
    if (thr <= 0.0 || thr > 1.0) {
      throw ConfigError("eval.iou_thresholds." + cls + ": outside (0, 1]");
    }
  }

  // Full structural validation of the fuzzy section.
  try {
    fuzzy::FuzzySystem system(cfg.fuzzy);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("fuzzy: ") + e.what());
  }
  return cfg;
}

ToolkitConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

std::string to_json_text(const ToolkitConfig& cfg) {
  json j;
  j["version"] = cfg.version;
  j["labels"] = cfg.categories.names;
  j["unknown_category"] =
      cfg.unknown_category == kitti::UnknownCategoryPolicy::kSkip ? "skip"
                                                                  : "error";
  j["iou_mode"] = to_string(cfg.nms.iou_mode);
  j["dbscan"] = {{"eps", cfg.dbscan.eps}, {"min_pts", cfg.dbscan.min_pts}};
  json rules = json::array();
  for (const auto& rule : cfg.fuzzy.rules) {
    rules.push_back(
        {{"density", cfg.fuzzy.density.sets[rule.density_set].name},
         {"volume", cfg.fuzzy.volume.sets[rule.volume_set].name},
         {"class", cfg.fuzzy.output.sets[rule.output_set].name}});
  }
  j["fuzzy"] = {{"resolution", cfg.fuzzy.resolution},
                {"density", variable_to_json(cfg.fuzzy.density)},
                {"volume", variable_to_json(cfg.fuzzy.volume)},
                {"class", variable_to_json(cfg.fuzzy.output)},
                {"rules", rules}};
  json nms_iou, nms_score;
  for (int c = 0; c < 3; ++c) {
    nms_iou[kClassNames[c]] = cfg.nms.iou_threshold[c];
    nms_score[kClassNames[c]] = cfg.nms.score_threshold[c];
  }
  j["nms"] = {{"iou_threshold", nms_iou},
              {"score_threshold", nms_score},
              {"pre_filter_score", cfg.nms.pre_filter_score.has_value()
                                       ? json(*cfg.nms.pre_filter_score)
                                       : json(nullptr)},
              {"per_label", cfg.nms.per_label}};
  j["eval"] = {{"iou_thresholds", cfg.eval.iou_thresholds},
               {"default_iou_threshold", cfg.eval.default_iou_threshold},
               {"min_height", cfg.eval.min_height},
               {"max_occlusion", cfg.eval.max_occlusion},
               {"max_truncation", cfg.eval.max_truncation},
               {"recall_points", cfg.eval.recall_points}};
  return j.dump(2);
}

std::string config_hash(const ToolkitConfig& cfg) {
  const std::string text = to_json_text(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace fnms::config
